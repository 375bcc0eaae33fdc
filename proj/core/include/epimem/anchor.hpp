#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace epimem {

enum class QueriedField { action, location, item, count, step, order, answerability };

std::string_view to_string(QueriedField f);
std::optional<QueriedField> queried_field_from(std::string_view name);

// Which occurrence of the trigger event is meant: 1st, 2nd, 3rd, ... or last.
struct Occurrence {
    std::size_t nth = 1;
    bool last = false;

    static Occurrence ordinal(std::size_t n) { return Occurrence{n, false}; }
    static Occurrence final_one() { return Occurrence{0, true}; }

    std::string to_string() const;  // "1", "2", "last"
    auto operator<=>(const Occurrence&) const = default;
};

// Cues extracted from a question. Interval and ordering questions name a
// second event, carried in second_event/second_object.
struct AnchorTuple {
    std::optional<std::string> target_object;
    std::optional<std::string> trigger_event;
    QueriedField queried_field = QueriedField::answerability;
    std::optional<Occurrence> occurrence;
    std::optional<long> temporal_offset;
    std::optional<std::size_t> target_step;
    std::optional<std::string> second_event;
    std::optional<std::string> second_object;

    bool operator==(const AnchorTuple&) const = default;
    bool empty() const;
};

// Vocabulary shared by the question generator and the extractor.
struct AnchorVocabulary {
    // Surface verb -> event kind ("obtain" -> gain_item). Event kinds map to themselves.
    std::map<std::string, std::string> event_verbs;
    // Object, item, room, door and decoy labels recognised without brackets.
    std::set<std::string> objects;
    // Accept cell_<x>_<y> labels by pattern.
    bool cell_labels = true;

    static const AnchorVocabulary& defaults();
};

AnchorTuple extract_anchors(std::string_view question, const AnchorVocabulary& vocab = AnchorVocabulary::defaults());

std::string anchors_to_json(const AnchorTuple& a);

}  // namespace epimem
