#include "epimem/qa_gen.hpp"

#include "epimem/error.hpp"
#include "json_io.hpp"
#include "rng.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>

namespace epimem {

const std::vector<std::string>& family_registry() {
    static const std::vector<std::string> families = {
        "adversarial",     "multi_hop", "temporal_offset", "temporal_interval", "occurrence", "event_ordering",
        "counting",        "inventory", "state_query",     "aggregation",       "spatial",    "step_lookup",
    };
    return families;
}

bool is_family(std::string_view family) {
    const auto& f = family_registry();
    return std::find(f.begin(), f.end(), family) != f.end();
}

const std::vector<std::string>& decoy_objects() {
    static const std::vector<std::string> decoys = {"diamond", "vault", "crown", "dragon", "throne", "portal"};
    return decoys;
}

namespace {

using detail::Rng;

struct Label {
    std::string kind;
    std::string object;
    auto operator<=>(const Label&) const = default;
};

// Steps carrying kind(object), ascending.
std::map<Label, std::vector<std::size_t>> occurrence_index(const Trajectory& t) {
    std::map<Label, std::vector<std::size_t>> out;
    for (const auto& s : t.steps) {
        for (const auto& e : s.events) {
            auto& v = out[Label{e.kind, e.object}];
            if (v.empty() || v.back() != s.index) v.push_back(s.index);
        }
    }
    return out;
}

std::vector<std::size_t> kind_steps(const Trajectory& t, const std::string& kind) {
    std::vector<std::size_t> out;
    for (const auto& s : t.steps) {
        for (const auto& e : s.events) {
            if (e.kind == kind) {
                out.push_back(s.index);
                break;
            }
        }
    }
    return out;
}

std::string ordinal_word(const Occurrence& k) {
    if (k.last) return "last";
    switch (k.nth) {
        case 1: return "1st";
        case 2: return "2nd";
        case 3: return "3rd";
        default: return std::to_string(k.nth) + "th";
    }
}

// Position of occurrence k within `steps`, or nullopt.
std::optional<std::size_t> pick(const std::vector<std::size_t>& steps, const Occurrence& k) {
    if (steps.empty()) return std::nullopt;
    if (k.last) return steps.size() - 1;
    if (k.nth == 0 || k.nth > steps.size()) return std::nullopt;
    return k.nth - 1;
}

// Evidence for an occurrence: every occurrence up to the selected one, or
// just the last one for "last".
std::vector<std::size_t> occurrence_evidence(const std::vector<std::size_t>& steps, const Occurrence& k,
                                             std::size_t pos) {
    if (k.last) return {steps[pos]};
    return std::vector<std::size_t>(steps.begin(), steps.begin() + static_cast<std::ptrdiff_t>(pos) + 1);
}

std::string render(const Label& l) { return l.kind + "(" + l.object + ")"; }

std::int64_t held(const Step& s, const std::string& item) {
    auto it = s.inventory.find(item);
    return it == s.inventory.end() ? 0 : it->second;
}

std::int64_t held_total(const Step& s) {
    std::int64_t n = 0;
    for (const auto& [_, c] : s.inventory) n += c;
    return n;
}

const std::map<std::string, std::string>& count_verbs() {
    static const std::map<std::string, std::string> verbs = {
        {"gain_item", "obtain"}, {"visit", "visit"}, {"use_item", "use"}, {"unlock", "unlock"}, {"craft", "craft"}};
    return verbs;
}

const std::vector<Occurrence>& occurrence_choices() {
    static const std::vector<Occurrence> ks = {Occurrence::ordinal(1), Occurrence::ordinal(2), Occurrence::final_one()};
    return ks;
}

struct Candidate {
    std::string question;
    std::string gold;
    std::vector<std::size_t> evidence;
    AnchorTuple params;
    bool answerable = true;
};

using Builder = std::vector<Candidate> (*)(const Trajectory&, const std::map<Label, std::vector<std::size_t>>&);

std::vector<Candidate> step_lookup(const Trajectory& t, const std::map<Label, std::vector<std::size_t>>&) {
    std::vector<Candidate> out;
    for (const auto& s : t.steps) {
        Candidate c;
        c.question = "What action was executed at step " + std::to_string(s.index) + "?";
        c.gold = s.action;
        c.evidence = {s.index};
        c.params.queried_field = QueriedField::action;
        c.params.target_step = s.index;
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<Candidate> spatial(const Trajectory& t, const std::map<Label, std::vector<std::size_t>>&) {
    std::vector<Candidate> out;
    for (const auto& s : t.steps) {
        if (s.location.empty()) continue;
        Candidate c;
        c.question = "Where was the agent at step " + std::to_string(s.index) + "?";
        c.gold = s.location;
        c.evidence = {s.index};
        c.params.queried_field = QueriedField::location;
        c.params.target_step = s.index;
        out.push_back(std::move(c));
    }
    return out;
}

std::set<std::string> items_ever_held(const Trajectory& t) {
    std::set<std::string> items;
    for (const auto& s : t.steps) {
        for (const auto& [item, n] : s.inventory) {
            if (n > 0) items.insert(item);
        }
    }
    return items;
}

std::vector<Candidate> state_query(const Trajectory& t, const std::map<Label, std::vector<std::size_t>>&) {
    std::vector<Candidate> out;
    const auto items = items_ever_held(t);
    for (const auto& s : t.steps) {
        for (const auto& item : items) {
            Candidate c;
            c.question = "How many " + item + " did the agent hold at step " + std::to_string(s.index) + "?";
            c.gold = std::to_string(held(s, item));
            c.evidence = {s.index};
            c.params.queried_field = QueriedField::count;
            c.params.target_object = item;
            c.params.target_step = s.index;
            out.push_back(std::move(c));
        }
    }
    return out;
}

std::vector<Candidate> aggregation(const Trajectory& t, const std::map<Label, std::vector<std::size_t>>&) {
    std::vector<Candidate> out;
    if (items_ever_held(t).empty()) return out;
    for (const auto& s : t.steps) {
        Candidate c;
        c.question = "How many items did the agent hold in total at step " + std::to_string(s.index) + "?";
        c.gold = std::to_string(held_total(s));
        c.evidence = {s.index};
        c.params.queried_field = QueriedField::count;
        c.params.target_step = s.index;
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<Candidate> inventory(const Trajectory& t, const std::map<Label, std::vector<std::size_t>>&) {
    std::vector<Candidate> out;
    for (const auto& [kind, verb] : std::vector<std::pair<std::string, std::string>>{{"gain_item", "gained"},
                                                                                     {"use_item", "used"}}) {
        const auto steps = kind_steps(t, kind);
        for (const auto& k : occurrence_choices()) {
            auto pos = pick(steps, k);
            if (!pos) continue;
            const Step& s = t.steps[steps[*pos]];
            std::vector<std::string> objects;
            for (const auto& e : s.events) {
                if (e.kind == kind) objects.push_back(e.object);
            }
            if (objects.size() != 1) continue;  // ambiguous step
            Candidate c;
            c.question = "What item was " + verb + " at the " + ordinal_word(k) + " " + kind + " event?";
            c.gold = objects.front();
            c.evidence = occurrence_evidence(steps, k, *pos);
            c.params.queried_field = QueriedField::item;
            c.params.trigger_event = kind;
            c.params.occurrence = k;
            out.push_back(std::move(c));
        }
    }
    return out;
}

std::vector<Candidate> occurrence(const Trajectory&, const std::map<Label, std::vector<std::size_t>>& occ) {
    std::vector<Candidate> out;
    for (const auto& [label, steps] : occ) {
        for (const auto& k : occurrence_choices()) {
            auto pos = pick(steps, k);
            if (!pos) continue;
            if (k.last && steps.size() < 2) continue;  // same as the 1st
            Candidate c;
            c.question = "At which step did the " + ordinal_word(k) + " " + render(label) + " happen?";
            c.gold = std::to_string(steps[*pos]);
            c.evidence = occurrence_evidence(steps, k, *pos);
            c.params.queried_field = QueriedField::step;
            c.params.trigger_event = label.kind;
            c.params.target_object = label.object;
            c.params.occurrence = k;
            out.push_back(std::move(c));
        }
    }
    return out;
}

std::string offset_phrase(long delta) {
    const long n = delta < 0 ? -delta : delta;
    return std::to_string(n) + (n == 1 ? " step " : " steps ") + (delta < 0 ? "before" : "after");
}

std::vector<Candidate> temporal_offset(const Trajectory& t, const std::map<Label, std::vector<std::size_t>>& occ) {
    std::vector<Candidate> out;
    for (const auto& [label, steps] : occ) {
        for (const auto& k : occurrence_choices()) {
            auto pos = pick(steps, k);
            if (!pos) continue;
            if (k.last && steps.size() < 2) continue;
            const std::size_t anchor = steps[*pos];
            for (long delta : {1L, 2L, 3L, -1L, -2L}) {
                const long target = static_cast<long>(anchor) + delta;
                if (target < 0 || target >= static_cast<long>(t.steps.size())) continue;
                const Step& s = t.steps[static_cast<std::size_t>(target)];
                for (auto field : {QueriedField::action, QueriedField::location}) {
                    Candidate c;
                    const std::string tail = offset_phrase(delta) + " the " + ordinal_word(k) + " " + render(label) + "?";
                    if (field == QueriedField::action) {
                        c.question = "What action was executed " + tail;
                        c.gold = s.action;
                    } else {
                        if (s.location.empty()) continue;
                        c.question = "Where was the agent " + tail;
                        c.gold = s.location;
                    }
                    c.evidence = occurrence_evidence(steps, k, *pos);
                    c.evidence.push_back(static_cast<std::size_t>(target));
                    c.params.queried_field = field;
                    c.params.trigger_event = label.kind;
                    c.params.target_object = label.object;
                    c.params.occurrence = k;
                    c.params.temporal_offset = delta;
                    out.push_back(std::move(c));
                }
            }
        }
    }
    return out;
}

// Pairs of distinct labels whose first occurrences fall on different steps.
template <typename F>
void for_each_pair(const std::map<Label, std::vector<std::size_t>>& occ, F&& f) {
    for (auto a = occ.begin(); a != occ.end(); ++a) {
        for (auto b = std::next(a); b != occ.end(); ++b) {
            if (a->second.front() == b->second.front()) continue;
            f(a->first, a->second.front(), b->first, b->second.front());
            f(b->first, b->second.front(), a->first, a->second.front());
        }
    }
}

std::vector<Candidate> temporal_interval(const Trajectory&, const std::map<Label, std::vector<std::size_t>>& occ) {
    std::vector<Candidate> out;
    for_each_pair(occ, [&](const Label& a, std::size_t sa, const Label& b, std::size_t sb) {
        Candidate c;
        c.question = "How many steps passed between the first " + render(a) + " and the first " + render(b) + "?";
        c.gold = std::to_string(sa > sb ? sa - sb : sb - sa);
        c.evidence = {std::min(sa, sb), std::max(sa, sb)};
        c.params.queried_field = QueriedField::count;
        c.params.trigger_event = a.kind;
        c.params.target_object = a.object;
        c.params.second_event = b.kind;
        c.params.second_object = b.object;
        c.params.occurrence = Occurrence::ordinal(1);
        out.push_back(std::move(c));
    });
    return out;
}

std::vector<Candidate> event_ordering(const Trajectory&, const std::map<Label, std::vector<std::size_t>>& occ) {
    std::vector<Candidate> out;
    for_each_pair(occ, [&](const Label& a, std::size_t sa, const Label& b, std::size_t sb) {
        Candidate c;
        c.question = "Which happened first: " + render(a) + " or " + render(b) + "?";
        const Label& first = sa < sb ? a : b;
        c.gold = first.kind + " " + first.object;
        c.evidence = {std::min(sa, sb), std::max(sa, sb)};
        c.params.queried_field = QueriedField::order;
        c.params.trigger_event = a.kind;
        c.params.target_object = a.object;
        c.params.second_event = b.kind;
        c.params.second_object = b.object;
        out.push_back(std::move(c));
    });
    return out;
}

std::vector<Candidate> counting(const Trajectory&, const std::map<Label, std::vector<std::size_t>>& occ) {
    std::vector<Candidate> out;
    for (const auto& [label, steps] : occ) {
        auto verb = count_verbs().find(label.kind);
        if (verb == count_verbs().end()) continue;
        Candidate c;
        c.question = "How many times did the agent " + verb->second + " " + label.object + "?";
        c.gold = std::to_string(steps.size());
        c.evidence = steps;
        c.params.queried_field = QueriedField::count;
        c.params.trigger_event = label.kind;
        c.params.target_object = label.object;
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<Candidate> multi_hop(const Trajectory& t, const std::map<Label, std::vector<std::size_t>>& occ) {
    std::vector<Candidate> out;
    for (const auto& [label, steps] : occ) {
        if (label.kind != "gain_item") continue;
        for (const auto& k : occurrence_choices()) {
            auto pos = pick(steps, k);
            if (!pos) continue;
            if (k.last && steps.size() < 2) continue;
            const std::size_t anchor = steps[*pos];
            for (long delta : {1L, 2L, 3L, 4L}) {
                const std::size_t target = anchor + static_cast<std::size_t>(delta);
                if (target >= t.steps.size()) continue;
                Candidate c;
                c.question = "How many " + label.object + " did the agent hold " + offset_phrase(delta) + " the " +
                             ordinal_word(k) + " " + render(label) + "?";
                c.gold = std::to_string(held(t.steps[target], label.object));
                c.evidence = occurrence_evidence(steps, k, *pos);
                c.evidence.push_back(target);
                c.params.queried_field = QueriedField::count;
                c.params.trigger_event = label.kind;
                c.params.target_object = label.object;
                c.params.occurrence = k;
                c.params.temporal_offset = delta;
                out.push_back(std::move(c));
            }
        }
    }
    return out;
}

std::vector<Candidate> adversarial(const Trajectory& t, const std::map<Label, std::vector<std::size_t>>&) {
    std::vector<Candidate> out;
    std::set<std::string> present;
    for (const auto& s : t.steps) {
        present.insert(s.location);
        present.insert(s.visible_objects.begin(), s.visible_objects.end());
        for (const auto& [item, _] : s.inventory) present.insert(item);
        for (const auto& e : s.events) present.insert(e.object);
    }
    static const std::vector<std::pair<std::string, std::string>> kinds = {
        {"gain_item", "obtain"}, {"unlock", "unlock"}, {"visit", "visit"}, {"use_item", "use"}};
    for (const auto& decoy : decoy_objects()) {
        if (present.contains(decoy)) continue;
        for (const auto& [kind, verb] : kinds) {
            const Label label{kind, decoy};
            Candidate occ_form;
            occ_form.question = "At which step did the 1st " + render(label) + " happen?";
            occ_form.params.queried_field = QueriedField::step;
            occ_form.params.trigger_event = kind;
            occ_form.params.target_object = decoy;
            occ_form.params.occurrence = Occurrence::ordinal(1);
            out.push_back(occ_form);

            Candidate verb_form;
            verb_form.question = "At which step did the agent " + verb + " the " + decoy + "?";
            verb_form.params.queried_field = QueriedField::step;
            verb_form.params.trigger_event = kind;
            verb_form.params.target_object = decoy;
            out.push_back(verb_form);

            Candidate offset_form;
            offset_form.question = "What action was executed 2 steps after the 1st " + render(label) + "?";
            offset_form.params = occ_form.params;
            offset_form.params.queried_field = QueriedField::action;
            offset_form.params.temporal_offset = 2;
            out.push_back(offset_form);
        }
    }
    for (auto& c : out) {
        c.gold = std::string(kNotAnswerable);
        c.answerable = false;
    }
    return out;
}

const std::map<std::string, Builder>& builders() {
    static const std::map<std::string, Builder> b = {
        {"step_lookup", step_lookup},
        {"spatial", spatial},
        {"state_query", state_query},
        {"aggregation", aggregation},
        {"inventory", inventory},
        {"occurrence", occurrence},
        {"temporal_offset", temporal_offset},
        {"temporal_interval", temporal_interval},
        {"event_ordering", event_ordering},
        {"counting", counting},
        {"multi_hop", multi_hop},
        {"adversarial", adversarial},
    };
    return b;
}

std::uint64_t text_seed(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

std::vector<GeneratedQuestion> generate_with_params(const Trajectory& t, std::size_t per_family, std::uint64_t seed,
                                                    GenerationLog* log) {
    if (per_family < 1) throw Error("per_family must be >= 1");
    if (auto v = validate_trajectory(t); !v.ok()) throw Error("invalid trajectory: " + v.violations.front());

    const auto occ = occurrence_index(t);
    std::vector<GeneratedQuestion> out;
    // Emission order follows the template list, not the priority order.
    static const std::vector<std::string> order = {"step_lookup", "spatial",   "state_query",       "aggregation",
                                                   "inventory",   "occurrence", "temporal_offset", "temporal_interval",
                                                   "event_ordering", "counting", "multi_hop",      "adversarial"};
    for (const auto& family : order) {
        auto candidates = builders().at(family)(t, occ);
        if (candidates.empty()) {
            if (log) log->skipped.push_back(family + ": no applicable template instance");
            continue;
        }
        Rng rng(detail::mix_seed(seed, text_seed(t.episode_id + "/" + family)));
        for (std::size_t i = candidates.size(); i > 1; --i) {
            std::swap(candidates[i - 1], candidates[rng.below(i)]);
        }
        std::set<std::string> seen;
        std::size_t n = 0;
        for (auto& c : candidates) {
            if (n == per_family) break;
            if (!seen.insert(c.question).second) continue;
            std::sort(c.evidence.begin(), c.evidence.end());
            c.evidence.erase(std::unique(c.evidence.begin(), c.evidence.end()), c.evidence.end());
            GeneratedQuestion g;
            g.item.qid = t.episode_id + ":" + family + ":" + std::to_string(n);
            g.item.episode_id = t.episode_id;
            g.item.question = c.question;
            g.item.gold_answer = c.gold;
            g.item.family = family;
            g.item.gold_evidence_steps = c.evidence;
            g.item.answerable = c.answerable;
            g.params = c.params;
            out.push_back(std::move(g));
            ++n;
        }
    }
    return out;
}

std::vector<QAItem> generate_questions(const Trajectory& t, std::size_t per_family, std::uint64_t seed,
                                       GenerationLog* log) {
    std::vector<QAItem> out;
    for (auto& g : generate_with_params(t, per_family, seed, log)) out.push_back(std::move(g.item));
    return out;
}

std::vector<QAItem> filter_invalid(std::vector<QAItem> items, const Trajectory& t) {
    std::vector<QAItem> kept;
    for (auto& q : items) {
        if (q.episode_id != t.episode_id) continue;
        if (q.gold_answer.empty() || !is_family(q.family)) continue;
        if (q.answerable == (q.family == "adversarial")) continue;
        const bool in_range = std::all_of(q.gold_evidence_steps.begin(), q.gold_evidence_steps.end(),
                                          [&](std::size_t s) { return s < t.steps.size(); });
        if (!in_range) continue;
        kept.push_back(std::move(q));
    }
    return kept;
}

std::string qa_to_json_line(const QAItem& q) { return detail::to_json(q).dump(); }

QAItem qa_from_json_line(std::string_view line) {
    try {
        return detail::qa_from_json(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& ex) {
        throw Error(std::string("malformed question record: ") + ex.what());
    }
}

std::vector<QAItem> read_questions(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::vector<QAItem> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        out.push_back(qa_from_json_line(line));
    }
    return out;
}

void write_questions(const std::filesystem::path& path, std::span<const QAItem> items) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    for (const auto& q : items) out << qa_to_json_line(q) << '\n';
}

}  // namespace epimem
