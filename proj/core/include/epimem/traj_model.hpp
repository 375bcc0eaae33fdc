#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace epimem {

// A local event observed at one step, e.g. gain_item(wood).
struct EventFact {
    std::string kind;
    std::string object;
    std::string location;  // may be empty

    auto operator<=>(const EventFact&) const = default;
};

struct Step {
    std::size_t index = 0;
    std::string action;  // space-separated token sequence
    std::string observation;
    std::string location;
    std::set<std::string> visible_objects;
    std::map<std::string, std::int64_t> inventory;
    std::set<EventFact> events;
    std::set<std::string> state_facts;  // e.g. "red_door:unlocked"

    bool operator==(const Step&) const = default;
};

struct Trajectory {
    std::string episode_id;
    std::string env_kind;  // gridworld | textadventure | archive
    std::vector<Step> steps;
    std::uint64_t seed = 0;

    bool operator==(const Trajectory&) const = default;
};

struct ArchiveItem {
    std::string item_id;
    std::int64_t timestamp = 0;
    std::string kind;  // email | image | video | other
    std::string body;
};

// Closed, configuration-declared vocabulary of event kinds. The question
// generator and the gold executor both read it.
class EventRegistry {
public:
    EventRegistry() = default;
    explicit EventRegistry(std::set<std::string> kinds) : kinds_(std::move(kinds)) {}

    static const EventRegistry& defaults();

    bool contains(std::string_view kind) const { return kinds_.find(std::string(kind)) != kinds_.end(); }
    const std::set<std::string>& kinds() const { return kinds_; }

private:
    std::set<std::string> kinds_;
};

struct ValidationResult {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

ValidationResult validate_trajectory(const Trajectory& t,
                                     const EventRegistry& registry = EventRegistry::defaults());

// Episode ids must be unique within one dataset file.
ValidationResult validate_dataset(std::span<const Trajectory> trajectories,
                                  const EventRegistry& registry = EventRegistry::defaults());

// Orders items by (timestamp, item_id) and turns each into an "observe"
// pseudo-step. Throws Error("non-orderable archive") on duplicate keys.
Trajectory convert_archive_to_pseudo_trajectory(std::span<const ArchiveItem> items,
                                                std::string episode_id = "archive");

// "kind(object)" or "kind(object@location)".
std::string render_event(const EventFact& e);

// Canonical one-line rendering; every set/map field is sorted.
std::string serialize_step_plain(const Step& s);

std::string trajectory_to_json_line(const Trajectory& t);
Trajectory trajectory_from_json_line(std::string_view line);
std::vector<Trajectory> read_trajectories(const std::filesystem::path& path);
void write_trajectories(const std::filesystem::path& path, std::span<const Trajectory> trajectories);

std::vector<ArchiveItem> read_archive(const std::filesystem::path& path);
void write_archive(const std::filesystem::path& path, std::span<const ArchiveItem> items);

}  // namespace epimem
