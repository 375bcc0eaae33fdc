#include "epimem/mem_write.hpp"

#include "epimem/text.hpp"
#include "json_io.hpp"

#include <algorithm>
#include <sstream>

namespace epimem {

std::string_view to_string(WriteMode m) {
    switch (m) {
        case WriteMode::full: return "full";
        case WriteMode::event_only: return "event_only";
        case WriteMode::object_only: return "object_only";
        case WriteMode::plain_chunk: return "plain_chunk";
    }
    return "full";
}

std::optional<WriteMode> write_mode_from(std::string_view name) {
    for (auto m : {WriteMode::full, WriteMode::event_only, WriteMode::object_only, WriteMode::plain_chunk}) {
        if (to_string(m) == name) return m;
    }
    return std::nullopt;
}

MemoryStore::MemoryStore(std::string episode_id, WriteMode mode, std::vector<MemoryUnit> units)
    : episode_id_(std::move(episode_id)), mode_(mode), units_(std::move(units)) {
    std::sort(units_.begin(), units_.end(), [](const MemoryUnit& a, const MemoryUnit& b) { return a.step < b.step; });
    auto post = [](auto& index, const std::string& key, std::size_t step) {
        auto& list = index[key];
        if (list.empty() || list.back() != step) list.push_back(step);
    };
    tokens_.reserve(units_.size());
    for (const auto& u : units_) {
        tokens_.push_back(word_tokens(unit_text(u)));
        for (const auto& o : u.objects) post(by_object_, o, u.step);
        for (const auto& e : u.events) post(by_event_kind_, e.kind, u.step);
        if (!u.location.empty()) post(by_location_, u.location, u.step);
    }
}

const MemoryUnit* MemoryStore::unit_at(std::size_t step) const {
    auto it = std::lower_bound(units_.begin(), units_.end(), step,
                               [](const MemoryUnit& u, std::size_t s) { return u.step < s; });
    if (it == units_.end() || it->step != step) return nullptr;
    return &*it;
}

std::vector<std::size_t> MemoryStore::lookup(KeyKind kind, std::string_view key) const {
    const auto& index = kind == KeyKind::object ? by_object_
                        : kind == KeyKind::event_kind ? by_event_kind_
                                                      : by_location_;
    auto it = index.find(key);
    if (it == index.end()) return {};
    return it->second;
}

namespace {

std::string events_list(const std::set<EventFact>& events) {
    std::vector<std::string> parts;
    for (const auto& e : events) parts.push_back(render_event(e));
    return join(parts, ",");
}

std::string full_summary(const Step& s) {
    std::string out = s.action + " at " + s.location;
    if (!s.events.empty()) out += "; events: " + events_list(s.events);
    return out;
}

}  // namespace

MemoryStore write_trajectory(const Trajectory& t, WriteMode mode, const WriteOptions& options) {
    std::vector<MemoryUnit> units;
    units.reserve(t.steps.size());
    const std::set<std::string> no_facts;
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        const Step& s = t.steps[i];
        const auto& previous = i > 0 ? t.steps[i - 1].state_facts : no_facts;
        MemoryUnit u;
        u.step = s.index;
        u.mode = mode;
        switch (mode) {
            case WriteMode::full: {
                u.action = s.action;
                u.objects = s.visible_objects;
                for (const auto& e : s.events) u.objects.insert(e.object);
                u.events = s.events;
                u.location = s.location;
                u.state.inventory = s.inventory;
                u.state.facts = s.state_facts;
                for (const auto& f : s.state_facts) {
                    if (!previous.contains(f)) u.state.changed_facts.insert(f);
                }
                if (!s.location.empty()) u.relations.insert({"agent", "at", s.location});
                for (const auto& [item, n] : s.inventory) {
                    if (n > 0) u.relations.insert({"agent", "has", item});
                }
                if (i + 1 < t.steps.size()) {
                    u.relations.insert({"step_" + std::to_string(s.index), "next",
                                        "step_" + std::to_string(t.steps[i + 1].index)});
                }
                u.summary = full_summary(s);
                break;
            }
            case WriteMode::event_only:
                u.events = s.events;
                u.summary = s.events.empty() ? "no events" : "events: " + events_list(s.events);
                break;
            case WriteMode::object_only: {
                u.objects = s.visible_objects;
                u.location = s.location;
                std::vector<std::string> objs(s.visible_objects.begin(), s.visible_objects.end());
                u.summary = "at " + s.location + "; objects: " + (objs.empty() ? std::string("none") : join(objs, ","));
                break;
            }
            case WriteMode::plain_chunk:
                u.summary = truncate_tokens(serialize_step_plain(s), options.plain_chunk_cap);
                break;
        }
        units.push_back(std::move(u));
    }
    return MemoryStore(t.episode_id, mode, std::move(units));
}

std::string unit_text(const MemoryUnit& u) {
    std::ostringstream os;
    os << "step=" << u.step << " " << u.summary;
    if (!u.action.empty()) os << " action=" << u.action;
    if (!u.location.empty()) os << " loc=" << u.location;
    if (!u.objects.empty()) os << " objs=" << join(std::vector<std::string>(u.objects.begin(), u.objects.end()), ",");
    if (!u.events.empty()) os << " events=" << events_list(u.events);
    if (!u.state.inventory.empty()) {
        std::vector<std::string> inv;
        for (const auto& [item, n] : u.state.inventory) inv.push_back(item + ":" + std::to_string(n));
        os << " inv=" << join(inv, ",");
    }
    if (!u.state.facts.empty()) {
        os << " state=" << join(std::vector<std::string>(u.state.facts.begin(), u.state.facts.end()), ",");
    }
    return os.str();
}

std::string unit_to_json_line(const MemoryUnit& u) { return detail::to_json(u).dump(); }

}  // namespace epimem
