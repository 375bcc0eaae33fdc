#pragma once

#include "epimem/anchor.hpp"
#include "epimem/packer.hpp"
#include "epimem/qa_gen.hpp"
#include "epimem/traj_model.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace epimem {

enum class Protocol { current, generic, gold_executor };

std::string_view to_string(Protocol p);
std::optional<Protocol> protocol_from(std::string_view name);

struct Answer {
    std::string text;
    Protocol protocol = Protocol::current;
    bool resolved = false;

    static Answer unresolved(Protocol p);
    static Answer of(std::string text, Protocol p);
};

// One step as far as the evidence exposes it. Absent fields stay nullopt so
// that "not shown" is never read as "empty".
struct EvidenceRecord {
    std::size_t step = 0;
    std::optional<std::string> action;
    std::optional<std::string> location;
    std::set<EventFact> events;  // location left empty
    std::optional<std::map<std::string, std::int64_t>> inventory;
};

// Parses pack lines in either the "[<step>] <summary> | <digest>" form or
// the "step=<i> key=value ..." form and merges lines of the same step.
// Throws Error("evidence corrupt: ...") on a line without a step marker.
std::vector<EvidenceRecord> parse_evidence(const EvidencePack& pack);

// Records carrying every field of every step; the executor's view.
std::vector<EvidenceRecord> records_from_trajectory(const Trajectory& t);

struct SelectStep {
    std::size_t step = 0;
    bool operator==(const SelectStep&) const = default;
};
struct SelectOccurrence {
    std::string event;
    std::optional<std::string> object;
    Occurrence k;
    bool operator==(const SelectOccurrence&) const = default;
};
struct Offset {
    long delta = 0;
    bool operator==(const Offset&) const = default;
};
// Projects a field of the selected step. `object` filters count (inventory
// of that item) and `event` names the event whose object an item query reads.
struct Project {
    QueriedField field = QueriedField::action;
    std::optional<std::string> object;
    std::optional<std::string> event;
    bool operator==(const Project&) const = default;
};
struct CountEvents {
    std::string event;
    std::optional<std::string> object;
    bool operator==(const CountEvents&) const = default;
};
struct Interval {
    std::string first_event;
    std::optional<std::string> first_object;
    std::string second_event;
    std::optional<std::string> second_object;
    bool operator==(const Interval&) const = default;
};
struct CompareOrder {
    std::string first_event;
    std::optional<std::string> first_object;
    std::string second_event;
    std::optional<std::string> second_object;
    bool operator==(const CompareOrder&) const = default;
};

using Instruction = std::variant<SelectStep, SelectOccurrence, Offset, Project, CountEvents, Interval, CompareOrder>;

struct Program {
    std::vector<Instruction> ops;

    bool empty() const { return ops.empty(); }
    bool operator==(const Program&) const = default;
};

std::string to_string(const Program& p);

Program compile_program(const AnchorTuple& anchors);

// Runs `p` over `records` (sorted by step). An empty program is the
// unanswerable program. Throws Error("invalid program") on malformed input.
Answer run_program(const Program& p, const std::vector<EvidenceRecord>& records, Protocol protocol);

Answer execute_program(const Program& p, const Trajectory& t);

Answer answer_current(const EvidencePack& pack, const AnchorTuple& anchors);

Answer answer_generic(const EvidencePack& pack, std::string_view question);

}  // namespace epimem
