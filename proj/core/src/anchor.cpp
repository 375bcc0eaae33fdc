#include "epimem/anchor.hpp"

#include "epimem/env_sim.hpp"
#include "epimem/qa_gen.hpp"
#include "epimem/text.hpp"

#include <nlohmann/json.hpp>

#include <cctype>
#include <regex>
#include <vector>

namespace epimem {

std::string_view to_string(QueriedField f) {
    switch (f) {
        case QueriedField::action: return "action";
        case QueriedField::location: return "location";
        case QueriedField::item: return "item";
        case QueriedField::count: return "count";
        case QueriedField::step: return "step";
        case QueriedField::order: return "order";
        case QueriedField::answerability: return "answerability";
    }
    return "answerability";
}

std::optional<QueriedField> queried_field_from(std::string_view name) {
    for (auto f : {QueriedField::action, QueriedField::location, QueriedField::item, QueriedField::count,
                   QueriedField::step, QueriedField::order, QueriedField::answerability}) {
        if (to_string(f) == name) return f;
    }
    return std::nullopt;
}

std::string Occurrence::to_string() const { return last ? "last" : std::to_string(nth); }

bool AnchorTuple::empty() const {
    return !target_object && !trigger_event && !occurrence && !temporal_offset && !target_step &&
           !second_event && !second_object;
}

const AnchorVocabulary& AnchorVocabulary::defaults() {
    static const AnchorVocabulary vocab = [] {
        AnchorVocabulary v;
        for (const auto& kind : EventRegistry::defaults().kinds()) v.event_verbs[kind] = kind;
        v.event_verbs["obtain"] = "gain_item";
        v.event_verbs["obtained"] = "gain_item";
        v.event_verbs["gain"] = "gain_item";
        v.event_verbs["gained"] = "gain_item";
        v.event_verbs["visited"] = "visit";
        v.event_verbs["unlocked"] = "unlock";
        v.event_verbs["use"] = "use_item";
        v.event_verbs["used"] = "use_item";
        v.event_verbs["crafted"] = "craft";
        v.event_verbs["collected"] = "collect";
        for (const auto& [site, res] : gridworld_site_resources()) {
            v.objects.insert(site);
            v.objects.insert(res);
        }
        for (const auto& r : craft_recipes()) v.objects.insert(r.product);
        for (const auto& r : textadv_room_names()) v.objects.insert(r);
        for (const auto& i : textadv_item_names()) v.objects.insert(i);
        for (const auto& c : textadv_door_colors()) {
            v.objects.insert(c + "_door");
            v.objects.insert(c + "_key");
        }
        for (const auto& d : decoy_objects()) v.objects.insert(d);
        return v;
    }();
    return vocab;
}

namespace {

struct Word {
    std::string text;
    std::size_t pos = 0;
};

std::vector<Word> label_words(const std::string& q) {
    std::vector<Word> out;
    std::size_t i = 0;
    while (i < q.size()) {
        const auto c = static_cast<unsigned char>(q[i]);
        if (std::isalnum(c) || c == '_') {
            std::size_t j = i;
            while (j < q.size() && (std::isalnum(static_cast<unsigned char>(q[j])) || q[j] == '_')) ++j;
            out.push_back({q.substr(i, j - i), i});
            i = j;
        } else {
            ++i;
        }
    }
    return out;
}

bool is_cell_label(const std::string& w) {
    static const std::regex cell(R"(cell_\d+_\d+)");
    return std::regex_match(w, cell);
}

std::optional<long> small_number(const std::string& w) {
    static const std::map<std::string, long> words = {{"one", 1}, {"two", 2},  {"three", 3},
                                                      {"four", 4}, {"five", 5}, {"six", 6}};
    if (auto it = words.find(w); it != words.end()) return it->second;
    if (!w.empty() && std::all_of(w.begin(), w.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        return std::stol(w);
    }
    return std::nullopt;
}

std::optional<Occurrence> ordinal_of(const std::string& w) {
    if (w == "first" || w == "1st") return Occurrence::ordinal(1);
    if (w == "second" || w == "2nd") return Occurrence::ordinal(2);
    if (w == "third" || w == "3rd") return Occurrence::ordinal(3);
    if (w == "last") return Occurrence::final_one();
    static const std::regex nth(R"((\d+)(st|nd|rd|th))");
    std::smatch m;
    if (std::regex_match(w, m, nth)) return Occurrence::ordinal(std::stoul(m[1].str()));
    return std::nullopt;
}

std::string normalize_question(std::string_view question) {
    std::string lowered = to_lower(question);
    std::string out;
    bool space = false;
    for (char c : lowered) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            space = true;
            continue;
        }
        if (space && !out.empty()) out.push_back(' ');
        space = false;
        out.push_back(c);
    }
    return out;
}

}  // namespace

AnchorTuple extract_anchors(std::string_view question, const AnchorVocabulary& vocab) {
    const std::string q = normalize_question(question);
    AnchorTuple a;

    std::optional<QueriedField> field;
    bool order_phrase = false;
    if (q.find("which happened first") != std::string::npos) {
        field = QueriedField::order;
        order_phrase = true;
    } else if (q.find("what action") != std::string::npos) {
        field = QueriedField::action;
    } else if (q.find("what item") != std::string::npos) {
        field = QueriedField::item;
    } else if (q.find("how many") != std::string::npos) {
        field = QueriedField::count;
    } else if (q.find("at which step") != std::string::npos || q.rfind("when ", 0) == 0) {
        field = QueriedField::step;
    } else if (q.find("where") != std::string::npos) {
        field = QueriedField::location;
    }
    if (!field) return a;

    const auto words = label_words(q);

    // Bracketed event mentions: kind(object) or kind().
    static const std::regex bracket(R"(([a-z_]+)\(([a-z0-9_]*)\))");
    std::vector<std::pair<std::string, std::string>> mentions;
    for (auto it = std::sregex_iterator(q.begin(), q.end(), bracket); it != std::sregex_iterator(); ++it) {
        const std::string kind = (*it)[1].str();
        auto verb = vocab.event_verbs.find(kind);
        if (verb == vocab.event_verbs.end()) continue;
        mentions.emplace_back(verb->second, (*it)[2].str());
    }
    if (!mentions.empty()) {
        a.trigger_event = mentions[0].first;
        if (!mentions[0].second.empty()) a.target_object = mentions[0].second;
        if (mentions.size() > 1) {
            a.second_event = mentions[1].first;
            if (!mentions[1].second.empty()) a.second_object = mentions[1].second;
        }
    } else {
        // Verb form: the first event verb, then the first known label after it.
        for (std::size_t i = 0; i < words.size(); ++i) {
            auto verb = vocab.event_verbs.find(words[i].text);
            if (verb == vocab.event_verbs.end()) continue;
            a.trigger_event = verb->second;
            for (std::size_t j = i + 1; j < words.size(); ++j) {
                const auto& w = words[j].text;
                if (vocab.objects.contains(w) || (vocab.cell_labels && is_cell_label(w))) {
                    a.target_object = w;
                    break;
                }
            }
            break;
        }
    }

    // "how many <item> did the agent hold"
    static const std::regex hold(R"(how many ([a-z0-9_]+) did the agent hold)");
    std::smatch m;
    if (std::regex_search(q, m, hold) && m[1].str() != "items") {
        a.target_object = m[1].str();
    }

    static const std::regex at_step(R"(at step (\d+))");
    if (std::regex_search(q, m, at_step)) a.target_step = std::stoul(m[1].str());

    // Offsets: "<n> step(s) after|before|later|earlier".
    for (std::size_t i = 0; i + 2 < words.size(); ++i) {
        auto n = small_number(words[i].text);
        if (!n) continue;
        if (words[i + 1].text != "step" && words[i + 1].text != "steps") continue;
        const auto& dir = words[i + 2].text;
        if (dir == "after" || dir == "later") {
            a.temporal_offset = *n;
        } else if (dir == "before" || dir == "earlier") {
            a.temporal_offset = -*n;
        } else {
            continue;
        }
        break;
    }

    if (a.trigger_event && !order_phrase) {
        for (const auto& w : words) {
            if (auto occ = ordinal_of(w.text)) {
                a.occurrence = occ;
                break;
            }
        }
    }

    const bool has_anchor = a.target_step || a.trigger_event;
    const bool order_ok = *field != QueriedField::order || (a.trigger_event && a.second_event);
    if (!has_anchor || !order_ok) return AnchorTuple{};
    a.queried_field = *field;
    return a;
}

std::string anchors_to_json(const AnchorTuple& a) {
    nlohmann::json j;
    auto opt = [](const auto& v) -> nlohmann::json {
        if (v) return *v;
        return nullptr;
    };
    j["target_object"] = opt(a.target_object);
    j["trigger_event"] = opt(a.trigger_event);
    j["queried_field"] = std::string(to_string(a.queried_field));
    j["occurrence"] = a.occurrence ? nlohmann::json(a.occurrence->to_string()) : nlohmann::json(nullptr);
    j["temporal_offset"] = opt(a.temporal_offset);
    j["target_step"] = opt(a.target_step);
    j["second_event"] = opt(a.second_event);
    j["second_object"] = opt(a.second_object);
    return j.dump();
}

}  // namespace epimem
