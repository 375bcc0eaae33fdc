#include "epimem/answer.hpp"

#include "epimem/error.hpp"
#include "epimem/text.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <sstream>

namespace epimem {

std::string_view to_string(Protocol p) {
    switch (p) {
        case Protocol::current: return "current";
        case Protocol::generic: return "generic";
        case Protocol::gold_executor: return "gold_executor";
    }
    return "current";
}

std::optional<Protocol> protocol_from(std::string_view name) {
    for (auto p : {Protocol::current, Protocol::generic, Protocol::gold_executor}) {
        if (to_string(p) == name) return p;
    }
    return std::nullopt;
}

Answer Answer::unresolved(Protocol p) { return Answer{std::string(kNotAnswerable), p, false}; }

Answer Answer::of(std::string text, Protocol p) {
    const bool resolved = text != kNotAnswerable;
    return Answer{std::move(text), p, resolved};
}

namespace {

[[noreturn]] void corrupt(const std::string& line, std::string_view why) {
    throw Error("evidence corrupt: " + std::string(why) + " in line \"" + line + "\"");
}

std::optional<std::size_t> parse_index(std::string_view s) {
    if (s.empty()) return std::nullopt;
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
    return v;
}

std::set<EventFact> parse_events(const std::string& text, const std::string& line) {
    std::set<EventFact> out;
    for (const auto& part : split(text, ',')) {
        const std::string p = trim(part);
        if (p.empty()) continue;
        const auto open = p.find('(');
        if (open == std::string::npos || p.back() != ')') corrupt(line, "bad event");
        EventFact e;
        e.kind = p.substr(0, open);
        std::string obj = p.substr(open + 1, p.size() - open - 2);
        if (auto at = obj.find('@'); at != std::string::npos) obj = obj.substr(0, at);
        e.object = obj;
        out.insert(std::move(e));
    }
    return out;
}

std::map<std::string, std::int64_t> parse_inventory(const std::string& text, const std::string& line) {
    std::map<std::string, std::int64_t> out;
    for (const auto& part : split(text, ',')) {
        const std::string p = trim(part);
        if (p.empty()) continue;
        const auto colon = p.rfind(':');
        if (colon == std::string::npos) corrupt(line, "bad inventory entry");
        std::int64_t n = 0;
        const std::string num = p.substr(colon + 1);
        auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), n);
        if (ec != std::errc() || ptr != num.data() + num.size()) corrupt(line, "bad inventory count");
        out[p.substr(0, colon)] = n;
    }
    return out;
}

bool known_key(std::string_view k) {
    static const std::set<std::string, std::less<>> keys = {"step", "action", "loc",   "objs", "inv",
                                                            "events", "state", "obs", "topic", "new"};
    return keys.contains(k);
}

// Splits "k1=v1 k2=v two k3=..." on known keys. Everything after obs= is
// the observation.
std::vector<std::pair<std::string, std::string>> split_fields(const std::string& text) {
    std::vector<std::pair<std::size_t, std::string>> starts;  // value start, key
    std::vector<std::size_t> key_pos;
    std::size_t i = 0;
    while (i < text.size()) {
        if (i == 0 || text[i - 1] == ' ') {
            std::size_t j = i;
            while (j < text.size() && (std::islower(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
            if (j < text.size() && j > i && text[j] == '=' && known_key(std::string_view(text).substr(i, j - i))) {
                key_pos.push_back(i);
                starts.emplace_back(j + 1, text.substr(i, j - i));
                if (starts.back().second == "obs") break;
                i = j + 1;
                continue;
            }
        }
        ++i;
    }
    std::vector<std::pair<std::string, std::string>> out;
    for (std::size_t n = 0; n < starts.size(); ++n) {
        const std::size_t begin = starts[n].first;
        std::size_t end = n + 1 < starts.size() ? key_pos[n + 1] : text.size();
        std::string value = text.substr(begin, end - begin);
        while (!value.empty() && value.back() == ' ') value.pop_back();
        out.emplace_back(starts[n].second, std::move(value));
    }
    return out;
}

void apply_field(EvidenceRecord& r, const std::string& key, const std::string& value, const std::string& line) {
    if (key == "action") {
        if (!value.empty()) r.action = value;
    } else if (key == "loc") {
        if (!value.empty()) r.location = value;
    } else if (key == "events") {
        auto ev = parse_events(value, line);
        r.events.insert(ev.begin(), ev.end());
    } else if (key == "inv") {
        r.inventory = parse_inventory(value, line);
    }
}

// Key=value body. When `trailing_cut` is set the final field may have been
// cut by a token cap and is ignored unless it is the observation.
void apply_key_values(EvidenceRecord& r, const std::string& text, const std::string& line, bool trailing_cut,
                      bool expect_step) {
    auto fields = split_fields(text);
    if (fields.empty()) corrupt(line, "no fields");
    if (expect_step) {
        if (fields.front().first != "step") corrupt(line, "missing step marker");
        auto step = parse_index(fields.front().second);
        if (!step) corrupt(line, "bad step marker");
        r.step = *step;
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
        const auto& [key, value] = fields[i];
        if (key == "step") {
            auto step = parse_index(value);
            if (!step || *step != r.step) corrupt(line, "conflicting step marker");
            continue;
        }
        const bool last = i + 1 == fields.size();
        if (trailing_cut && last && key != "obs") continue;
        apply_field(r, key, value, line);
    }
}

void apply_summary(EvidenceRecord& r, const std::string& summary, const std::string& line) {
    if (summary.rfind("step=", 0) == 0) {
        apply_key_values(r, summary, line, true, false);
        return;
    }
    if (summary == "no events") return;
    if (summary.rfind("events: ", 0) == 0) {
        auto ev = parse_events(summary.substr(8), line);
        r.events.insert(ev.begin(), ev.end());
        return;
    }
    if (summary.rfind("at ", 0) == 0) {
        const auto semi = summary.find("; objects: ");
        const std::string loc = summary.substr(3, semi == std::string::npos ? std::string::npos : semi - 3);
        if (!loc.empty()) r.location = loc;
        return;
    }
    std::string head = summary;
    if (auto ev = summary.find("; events: "); ev != std::string::npos) {
        head = summary.substr(0, ev);
        auto events = parse_events(summary.substr(ev + 10), line);
        r.events.insert(events.begin(), events.end());
    }
    const auto at = head.rfind(" at ");
    if (at == std::string::npos) {
        if (head.size() >= 3 && head.compare(head.size() - 3, 3, " at") == 0) {
            r.action = head.substr(0, head.size() - 3);
            return;
        }
        corrupt(line, "unrecognised summary");
    }
    r.action = head.substr(0, at);
    const std::string loc = head.substr(at + 4);
    if (!loc.empty()) r.location = loc;
}

void merge_into(EvidenceRecord& into, const EvidenceRecord& from) {
    if (!into.action) into.action = from.action;
    if (!into.location) into.location = from.location;
    into.events.insert(from.events.begin(), from.events.end());
    if (!into.inventory) into.inventory = from.inventory;
}

}  // namespace

namespace {

// Drops the " (xN)" suffix that line grouping appends to repeated lines.
std::string strip_group_marker(const std::string& line) {
    const auto open = line.rfind(" (x");
    if (open == std::string::npos || line.back() != ')') return line;
    const auto digits = std::string_view(line).substr(open + 3, line.size() - open - 4);
    if (digits.empty()) return line;
    for (char c : digits)
        if (c < '0' || c > '9') return line;
    return line.substr(0, open);
}

}  // namespace

std::vector<EvidenceRecord> parse_evidence(const EvidencePack& pack) {
    std::map<std::size_t, EvidenceRecord> by_step;
    for (const auto& pl : pack.lines) {
        const std::string line = strip_group_marker(pl.text);
        EvidenceRecord r;
        if (!line.empty() && line.front() == '[') {
            const auto close = line.find(']');
            if (close == std::string::npos) corrupt(line, "unterminated step marker");
            auto step = parse_index(std::string_view(line).substr(1, close - 1));
            if (!step) corrupt(line, "bad step marker");
            r.step = *step;
            std::string rest = line.substr(close + 1);
            if (!rest.empty() && rest.front() == ' ') rest.erase(0, 1);
            const auto bar = rest.rfind(" |");
            if (bar == std::string::npos) {
                // A line cut by the degenerate-budget policy keeps only its marker.
                if (!pack.truncated) corrupt(line, "missing digest separator");
            } else {
                apply_summary(r, rest.substr(0, bar), line);
                const std::string digest = trim(rest.substr(bar + 2));
                if (!digest.empty()) apply_key_values(r, digest, line, false, false);
            }
        } else if (line.rfind("step=", 0) == 0) {
            apply_key_values(r, line, line, false, true);
        } else {
            corrupt(line, "missing step marker");
        }
        auto [it, inserted] = by_step.try_emplace(r.step, r);
        if (!inserted) merge_into(it->second, r);
    }
    std::vector<EvidenceRecord> out;
    out.reserve(by_step.size());
    for (auto& [_, r] : by_step) out.push_back(std::move(r));
    return out;
}

std::vector<EvidenceRecord> records_from_trajectory(const Trajectory& t) {
    std::vector<EvidenceRecord> out;
    out.reserve(t.steps.size());
    for (const auto& s : t.steps) {
        EvidenceRecord r;
        r.step = s.index;
        r.action = s.action;
        if (!s.location.empty()) r.location = s.location;
        for (const auto& e : s.events) r.events.insert(EventFact{e.kind, e.object, ""});
        r.inventory = s.inventory;
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

std::string opt_text(const std::optional<std::string>& o) { return o ? *o : "*"; }

struct InstructionPrinter {
    std::string operator()(const SelectStep& s) const { return "SelectStep(" + std::to_string(s.step) + ")"; }
    std::string operator()(const SelectOccurrence& s) const {
        return "SelectOccurrence(" + s.event + "," + opt_text(s.object) + "," + s.k.to_string() + ")";
    }
    std::string operator()(const Offset& o) const {
        return "Offset(" + std::string(o.delta >= 0 ? "+" : "") + std::to_string(o.delta) + ")";
    }
    std::string operator()(const Project& p) const {
        std::string out = "Project(" + std::string(to_string(p.field));
        if (p.object) out += "," + *p.object;
        return out + ")";
    }
    std::string operator()(const CountEvents& c) const {
        return "CountEvents(" + c.event + "," + opt_text(c.object) + ")";
    }
    std::string operator()(const Interval& i) const {
        return "Interval(" + i.first_event + "(" + opt_text(i.first_object) + ")," + i.second_event + "(" +
               opt_text(i.second_object) + "))";
    }
    std::string operator()(const CompareOrder& c) const {
        return "CompareOrder(" + c.first_event + "(" + opt_text(c.first_object) + ")," + c.second_event + "(" +
               opt_text(c.second_object) + "))";
    }
};

bool has_event(const EvidenceRecord& r, const std::string& kind, const std::optional<std::string>& object) {
    for (const auto& e : r.events) {
        if (e.kind == kind && (!object || e.object == *object)) return true;
    }
    return false;
}

std::vector<std::size_t> occurrences(const std::vector<EvidenceRecord>& records, const std::string& kind,
                                     const std::optional<std::string>& object) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (has_event(records[i], kind, object)) out.push_back(i);
    }
    return out;
}

const EvidenceRecord* find_step(const std::vector<EvidenceRecord>& records, std::size_t step) {
    auto it = std::lower_bound(records.begin(), records.end(), step,
                               [](const EvidenceRecord& r, std::size_t s) { return r.step < s; });
    if (it == records.end() || it->step != step) return nullptr;
    return &*it;
}

bool is_selection(const Instruction& op) {
    return std::holds_alternative<SelectStep>(op) || std::holds_alternative<SelectOccurrence>(op);
}

bool is_standalone(const Instruction& op) {
    return std::holds_alternative<CountEvents>(op) || std::holds_alternative<Interval>(op) ||
           std::holds_alternative<CompareOrder>(op);
}

void check_program(const Program& p) {
    const auto& ops = p.ops;
    if (ops.size() == 1 && is_standalone(ops[0])) return;
    const bool shape = (ops.size() == 2 || ops.size() == 3) && is_selection(ops.front()) &&
                       std::holds_alternative<Project>(ops.back()) &&
                       (ops.size() == 2 || std::holds_alternative<Offset>(ops[1]));
    if (!shape) throw Error("invalid program");
    const auto& proj = std::get<Project>(ops.back());
    if (proj.field == QueriedField::order || proj.field == QueriedField::answerability) {
        throw Error("invalid program");
    }
    if (const auto* occ = std::get_if<SelectOccurrence>(&ops.front()); occ && !occ->k.last && occ->k.nth == 0) {
        throw Error("invalid program");
    }
}

}  // namespace

std::string to_string(const Program& p) {
    std::vector<std::string> parts;
    for (const auto& op : p.ops) parts.push_back(std::visit(InstructionPrinter{}, op));
    return join(parts, " ");
}

Program compile_program(const AnchorTuple& a) {
    Program p;
    if (a.queried_field == QueriedField::answerability) return p;
    if (a.queried_field == QueriedField::order) {
        if (a.trigger_event && a.second_event) {
            p.ops.push_back(CompareOrder{*a.trigger_event, a.target_object, *a.second_event, a.second_object});
        }
        return p;
    }
    if (a.queried_field == QueriedField::count && a.trigger_event && a.second_event) {
        p.ops.push_back(Interval{*a.trigger_event, a.target_object, *a.second_event, a.second_object});
        return p;
    }
    if (a.queried_field == QueriedField::count && a.trigger_event && !a.target_step && !a.occurrence &&
        !a.temporal_offset) {
        p.ops.push_back(CountEvents{*a.trigger_event, a.target_object});
        return p;
    }
    if (a.target_step) {
        p.ops.push_back(SelectStep{*a.target_step});
    } else if (a.trigger_event) {
        p.ops.push_back(SelectOccurrence{*a.trigger_event, a.target_object, a.occurrence.value_or(Occurrence{})});
    } else {
        return p;
    }
    if (a.temporal_offset) p.ops.push_back(Offset{*a.temporal_offset});
    // Only item and count projections read the anchored object and event.
    const bool keyed = a.queried_field == QueriedField::item || a.queried_field == QueriedField::count;
    p.ops.push_back(Project{a.queried_field, keyed ? a.target_object : std::nullopt,
                            keyed ? a.trigger_event : std::nullopt});
    return p;
}

Answer run_program(const Program& p, const std::vector<EvidenceRecord>& records, Protocol protocol) {
    if (p.empty()) return Answer::unresolved(protocol);
    check_program(p);
    const auto fail = Answer::unresolved(protocol);

    if (const auto* c = std::get_if<CountEvents>(&p.ops[0])) {
        return Answer::of(std::to_string(occurrences(records, c->event, c->object).size()), protocol);
    }
    if (const auto* iv = std::get_if<Interval>(&p.ops[0])) {
        auto a = occurrences(records, iv->first_event, iv->first_object);
        auto b = occurrences(records, iv->second_event, iv->second_object);
        if (a.empty() || b.empty()) return fail;
        const std::size_t sa = records[a.front()].step;
        const std::size_t sb = records[b.front()].step;
        return Answer::of(std::to_string(sa > sb ? sa - sb : sb - sa), protocol);
    }
    if (const auto* co = std::get_if<CompareOrder>(&p.ops[0])) {
        auto a = occurrences(records, co->first_event, co->first_object);
        auto b = occurrences(records, co->second_event, co->second_object);
        if (a.empty() || b.empty()) return fail;
        const std::size_t sa = records[a.front()].step;
        const std::size_t sb = records[b.front()].step;
        if (sa == sb) return fail;
        if (sa < sb) return Answer::of(co->first_event + " " + opt_text(co->first_object), protocol);
        return Answer::of(co->second_event + " " + opt_text(co->second_object), protocol);
    }

    std::size_t step = 0;
    if (const auto* ss = std::get_if<SelectStep>(&p.ops[0])) {
        if (!find_step(records, ss->step)) return fail;
        step = ss->step;
    } else {
        const auto& so = std::get<SelectOccurrence>(p.ops[0]);
        auto occ = occurrences(records, so.event, so.object);
        if (occ.empty()) return fail;
        if (so.k.last) {
            step = records[occ.back()].step;
        } else {
            if (so.k.nth > occ.size()) return fail;
            step = records[occ[so.k.nth - 1]].step;
        }
    }
    if (p.ops.size() == 3) {
        const long target = static_cast<long>(step) + std::get<Offset>(p.ops[1]).delta;
        if (target < 0 || !find_step(records, static_cast<std::size_t>(target))) return fail;
        step = static_cast<std::size_t>(target);
    }
    const EvidenceRecord& r = *find_step(records, step);
    const auto& proj = std::get<Project>(p.ops.back());
    switch (proj.field) {
        case QueriedField::action:
            if (!r.action) return fail;
            return Answer::of(*r.action, protocol);
        case QueriedField::location:
            if (!r.location) return fail;
            return Answer::of(*r.location, protocol);
        case QueriedField::item: {
            if (!proj.event) return fail;
            for (const auto& e : r.events) {
                if (e.kind == *proj.event) return Answer::of(e.object, protocol);
            }
            return fail;
        }
        case QueriedField::count: {
            if (!r.inventory) return fail;
            std::int64_t n = 0;
            if (proj.object) {
                auto it = r.inventory->find(*proj.object);
                n = it == r.inventory->end() ? 0 : it->second;
            } else {
                for (const auto& [_, c] : *r.inventory) n += c;
            }
            return Answer::of(std::to_string(n), protocol);
        }
        case QueriedField::step: return Answer::of(std::to_string(r.step), protocol);
        default: break;
    }
    throw Error("invalid program");
}

Answer execute_program(const Program& p, const Trajectory& t) {
    return run_program(p, records_from_trajectory(t), Protocol::gold_executor);
}

Answer answer_current(const EvidencePack& pack, const AnchorTuple& anchors) {
    const Program p = compile_program(anchors);
    if (p.empty()) return Answer::unresolved(Protocol::current);
    return run_program(p, parse_evidence(pack), Protocol::current);
}

Answer answer_generic(const EvidencePack& pack, std::string_view question) {
    std::vector<std::string> keywords;
    for (auto& w : word_tokens(question)) {
        if (is_stopword(w)) continue;
        if (std::find(keywords.begin(), keywords.end(), w) == keywords.end()) keywords.push_back(std::move(w));
    }
    std::size_t best_overlap = 0;
    std::vector<std::string> best_line;
    for (const auto& pl : pack.lines) {
        auto tokens = word_tokens(pl.text);
        std::size_t overlap = 0;
        for (const auto& k : keywords) {
            if (std::find(tokens.begin(), tokens.end(), k) != tokens.end()) ++overlap;
        }
        if (overlap > best_overlap) {
            best_overlap = overlap;
            best_line = std::move(tokens);
        }
    }
    if (best_overlap == 0) return Answer::unresolved(Protocol::generic);
    // The longest matched keyword wins; the answer is the token after it.
    std::string chosen;
    for (const auto& k : keywords) {
        if (std::find(best_line.begin(), best_line.end(), k) != best_line.end() && k.size() > chosen.size()) chosen = k;
    }
    auto it = std::find(best_line.begin(), best_line.end(), chosen);
    if (it == best_line.end() || std::next(it) == best_line.end()) return Answer::unresolved(Protocol::generic);
    return Answer::of(*std::next(it), Protocol::generic);
}

}  // namespace epimem
