#pragma once

#include "epimem/traj_model.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace epimem {

enum class WriteMode { full, event_only, object_only, plain_chunk };

std::string_view to_string(WriteMode m);
std::optional<WriteMode> write_mode_from(std::string_view name);

struct Relation {
    std::string subject;
    std::string predicate;
    std::string object;

    auto operator<=>(const Relation&) const = default;
};

struct UnitState {
    std::map<std::string, std::int64_t> inventory;
    std::set<std::string> facts;
    // Facts that became true at this step (absent at the previous step).
    std::set<std::string> changed_facts;

    bool operator==(const UnitState&) const = default;
};

// Structured per-step memory record.
struct MemoryUnit {
    std::size_t step = 0;
    std::string action;
    std::set<std::string> objects;
    std::set<EventFact> events;
    std::set<Relation> relations;
    UnitState state;
    std::string location;
    std::string summary;
    WriteMode mode = WriteMode::full;  // which fields were written

    bool operator==(const MemoryUnit&) const = default;
};

enum class KeyKind { object, event_kind, location };

struct WriteOptions {
    // Token cap on the plain_chunk summary.
    std::size_t plain_chunk_cap = 20;
};

class MemoryStore {
public:
    MemoryStore() = default;
    MemoryStore(std::string episode_id, WriteMode mode, std::vector<MemoryUnit> units);

    const std::string& episode_id() const { return episode_id_; }
    WriteMode write_mode() const { return mode_; }
    std::span<const MemoryUnit> units() const { return units_; }
    bool empty() const { return units_.empty(); }

    // Unit whose step equals `step`, or nullptr.
    const MemoryUnit* unit_at(std::size_t step) const;

    // Ascending steps whose unit carries `key` in the keyed field; unknown
    // keys give an empty list.
    std::vector<std::size_t> lookup(KeyKind kind, std::string_view key) const;

    // word_tokens(unit_text(u)) for each unit, in unit order.
    const std::vector<std::string>& text_tokens(std::size_t unit_index) const { return tokens_[unit_index]; }

    bool operator==(const MemoryStore&) const = default;

private:
    std::string episode_id_;
    WriteMode mode_ = WriteMode::full;
    std::vector<MemoryUnit> units_;
    std::vector<std::vector<std::string>> tokens_;
    std::map<std::string, std::vector<std::size_t>, std::less<>> by_object_;
    std::map<std::string, std::vector<std::size_t>, std::less<>> by_event_kind_;
    std::map<std::string, std::vector<std::size_t>, std::less<>> by_location_;
};

MemoryStore write_trajectory(const Trajectory& t, WriteMode mode, const WriteOptions& options = {});

// Text used by lexical scoring: the summary followed by every populated
// structured field.
std::string unit_text(const MemoryUnit& u);

std::string unit_to_json_line(const MemoryUnit& u);

}  // namespace epimem
