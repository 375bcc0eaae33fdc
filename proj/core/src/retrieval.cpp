#include "epimem/retrieval.hpp"

#include "epimem/error.hpp"
#include "epimem/text.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>

namespace epimem {

void RetrievalConfig::validate() const {
    if (top_k < 1) throw Error("retrieval.top_k must be >= 1");
}

bool AnchorResolution::is_decisive(std::size_t step) const {
    return std::binary_search(decisive.begin(), decisive.end(), step);
}

bool AnchorResolution::is_support(std::size_t step) const {
    return std::binary_search(support.begin(), support.end(), step);
}

namespace {

bool better_text(const ScoredUnit& a, const ScoredUnit& b) {
    if (a.s_text != b.s_text) return a.s_text > b.s_text;
    return a.unit->step < b.unit->step;
}

ScoredUnit score_text(const MemoryStore& store, std::size_t index, const std::vector<std::string>& q) {
    ScoredUnit s;
    s.unit = &store.units()[index];
    s.s_text = token_f1(q, store.text_tokens(index));
    s.total = s.s_text;
    return s;
}

std::size_t index_of(const MemoryStore& store, const MemoryUnit* u) {
    return static_cast<std::size_t>(u - store.units().data());
}

void sort_unique(std::vector<std::size_t>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

std::vector<ScoredUnit> text_candidates(const MemoryStore& store, std::string_view question, std::size_t top_k) {
    const auto q = word_tokens(question);
    std::vector<ScoredUnit> all;
    all.reserve(store.units().size());
    for (std::size_t i = 0; i < store.units().size(); ++i) all.push_back(score_text(store, i, q));
    const std::size_t k = std::min(top_k, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<long>(k), all.end(), better_text);
    all.resize(k);
    return all;
}

std::vector<std::size_t> event_steps(const MemoryStore& store, std::string_view event,
                                     const std::optional<std::string>& object) {
    std::vector<std::size_t> out;
    for (auto step : store.lookup(KeyKind::event_kind, event)) {
        const MemoryUnit* u = store.unit_at(step);
        if (!u) continue;
        for (const auto& e : u->events) {
            if (e.kind == event && (!object || e.object == *object)) {
                out.push_back(step);
                break;
            }
        }
    }
    return out;
}

std::optional<std::size_t> resolve_occurrence(const MemoryStore& store, std::string_view event,
                                              const std::optional<std::string>& object, Occurrence k) {
    const auto steps = event_steps(store, event, object);
    if (steps.empty()) return std::nullopt;
    if (k.last) return steps.back();
    if (k.nth == 0 || k.nth > steps.size()) return std::nullopt;
    return steps[k.nth - 1];
}

AnchorResolution resolve_anchors(const MemoryStore& store, const AnchorTuple& a) {
    AnchorResolution r;
    if (a.queried_field == QueriedField::answerability) return r;

    auto with_offset = [&](std::size_t anchor) {
        r.primary = anchor;
        if (a.temporal_offset && *a.temporal_offset != 0) {
            const long target = static_cast<long>(anchor) + *a.temporal_offset;
            if (target >= 0 && store.unit_at(static_cast<std::size_t>(target))) {
                r.decisive.push_back(static_cast<std::size_t>(target));
            }
            const auto lo = std::min<long>(static_cast<long>(anchor), target);
            const auto hi = std::max<long>(static_cast<long>(anchor), target);
            for (long s = lo + 1; s < hi; ++s) {
                if (s >= 0 && store.unit_at(static_cast<std::size_t>(s))) r.support.push_back(static_cast<std::size_t>(s));
            }
        } else {
            if (anchor > 0 && store.unit_at(anchor - 1)) r.support.push_back(anchor - 1);
            if (store.unit_at(anchor + 1)) r.support.push_back(anchor + 1);
        }
    };

    if (a.target_step) {
        if (store.unit_at(*a.target_step)) {
            r.decisive.push_back(*a.target_step);
            with_offset(*a.target_step);
        }
    } else if (a.trigger_event) {
        const auto steps = event_steps(store, *a.trigger_event, a.target_object);
        if (a.second_event) {
            const auto second = event_steps(store, *a.second_event, a.second_object);
            if (!steps.empty()) {
                r.decisive.push_back(steps.front());
                r.primary = steps.front();
            }
            if (!second.empty()) r.decisive.push_back(second.front());
        } else if (a.queried_field == QueriedField::count && !a.occurrence && !a.temporal_offset) {
            r.decisive = steps;
        } else {
            const Occurrence k = a.occurrence.value_or(Occurrence::ordinal(1));
            if (k.last && !steps.empty()) {
                r.decisive.push_back(steps.back());
                with_offset(steps.back());
            } else if (!k.last && k.nth >= 1 && k.nth <= steps.size()) {
                r.decisive.insert(r.decisive.end(), steps.begin(), steps.begin() + static_cast<long>(k.nth));
                with_offset(steps[k.nth - 1]);
            }
        }
    }
    sort_unique(r.decisive);
    sort_unique(r.support);
    std::erase_if(r.support, [&](std::size_t s) { return r.is_decisive(s); });
    return r;
}

std::vector<ScoredUnit> rerank(std::vector<ScoredUnit> candidates, const AnchorTuple& a,
                               const AnchorResolution& resolution, const RetrievalConfig& cfg) {
    std::set<std::string> anchor_objects;
    if (a.target_object) anchor_objects.insert(*a.target_object);
    if (a.second_object) anchor_objects.insert(*a.second_object);
    std::set<std::string> anchor_events;
    if (a.trigger_event) anchor_events.insert(*a.trigger_event);
    if (a.second_event) anchor_events.insert(*a.second_event);

    auto in_window = [&](std::size_t step) {
        for (auto d : resolution.decisive) {
            const auto gap = step > d ? step - d : d - step;
            if (gap <= cfg.short_window) return true;
        }
        return false;
    };

    for (auto& c : candidates) {
        const MemoryUnit& u = *c.unit;
        double anchor = 0.0;
        bool object_match = false;
        for (const auto& o : anchor_objects) {
            if (u.objects.contains(o) || u.state.inventory.contains(o)) object_match = true;
            for (const auto& e : u.events) {
                if (e.object == o) object_match = true;
            }
        }
        bool event_match = false;
        for (const auto& e : u.events) {
            if (anchor_events.contains(e.kind)) event_match = true;
        }
        const bool location_match = !u.location.empty() && anchor_objects.contains(u.location);
        anchor += object_match ? 1.0 : 0.0;
        anchor += event_match ? 1.0 : 0.0;
        anchor += location_match ? 1.0 : 0.0;
        anchor += resolution.is_decisive(u.step) ? 1.0 : 0.0;
        c.s_anchor = anchor;
        c.s_chain = in_window(u.step) ? 1.0 : 0.0;
        c.total = c.s_text + cfg.lambda_a * c.s_anchor + cfg.lambda_c * c.s_chain;
    }

    auto order = [&](const ScoredUnit& x, const ScoredUnit& y) {
        if (x.total != y.total) return x.total > y.total;
        const bool xa = resolution.is_decisive(x.unit->step);
        const bool ya = resolution.is_decisive(y.unit->step);
        if (xa != ya) return xa;
        const bool xs = resolution.is_support(x.unit->step) || in_window(x.unit->step);
        const bool ys = resolution.is_support(y.unit->step) || in_window(y.unit->step);
        if (xs != ys) return xs;
        return x.unit->step < y.unit->step;
    };

    // State-fact completion depends on what ranks above, so it is assigned
    // in the preliminary order and the list is then re-sorted. Without a
    // decisive anchor there is no chain to complete.
    std::stable_sort(candidates.begin(), candidates.end(), order);
    if (resolution.decisive.empty()) return candidates;
    std::set<std::string> covered;
    for (auto& c : candidates) {
        bool supplies = false;
        for (const auto& f : c.unit->state.changed_facts) {
            if (!covered.contains(f)) supplies = true;
        }
        covered.insert(c.unit->state.changed_facts.begin(), c.unit->state.changed_facts.end());
        if (supplies) {
            c.s_chain += 1.0;
            c.total += cfg.lambda_c;
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(), order);
    return candidates;
}

RetrievalResult retrieve(const MemoryStore& store, const AnchorTuple& anchors, std::string_view question,
                         const RetrievalConfig& cfg) {
    cfg.validate();
    RetrievalResult result;
    if (store.empty()) return result;
    result.resolution = resolve_anchors(store, anchors);
    auto candidates = text_candidates(store, question, cfg.top_k);

    if (cfg.seed_injection) {
        std::set<std::size_t> present;
        for (const auto& c : candidates) present.insert(c.unit->step);
        std::vector<std::size_t> inject = result.resolution.decisive;
        auto transitions = [&](const std::optional<std::string>& event, const std::optional<std::string>& object) {
            if (!event) return;
            if (*event != "gain_item" && *event != "unlock" && *event != "visit") return;
            const auto steps = event_steps(store, *event, object);
            inject.insert(inject.end(), steps.begin(), steps.end());
        };
        transitions(anchors.trigger_event, anchors.target_object);
        transitions(anchors.second_event, anchors.second_object);
        for (auto d : result.resolution.decisive) {
            const auto lo = d > cfg.short_window ? d - cfg.short_window : 0;
            for (auto s = lo; s <= d + cfg.short_window; ++s) inject.push_back(s);
        }
        const auto q = word_tokens(question);
        for (auto step : inject) {
            if (present.contains(step)) continue;
            const MemoryUnit* u = store.unit_at(step);
            if (!u) continue;
            present.insert(step);
            candidates.push_back(score_text(store, index_of(store, u), q));
        }
    }
    result.ranked = rerank(std::move(candidates), anchors, result.resolution, cfg);
    return result;
}

}  // namespace epimem
