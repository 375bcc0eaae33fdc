#include "epimem/packer.hpp"

#include "epimem/error.hpp"
#include "epimem/text.hpp"

#include <algorithm>
#include <numeric>

namespace epimem {

std::vector<std::size_t> EvidencePack::steps() const {
    std::vector<std::size_t> out;
    for (const auto& l : lines) {
        if (out.empty() || out.back() != l.step) out.push_back(l.step);
    }
    return out;
}

EvidencePack make_pack(std::vector<PackLine> lines, std::size_t budget) {
    EvidencePack pack;
    std::stable_sort(lines.begin(), lines.end(), [](const PackLine& a, const PackLine& b) { return a.step < b.step; });
    pack.lines = std::move(lines);
    pack.budget = budget;
    for (const auto& l : pack.lines) pack.token_cost += token_count(l.text);
    return pack;
}

namespace {

bool state_count(const AnchorTuple& a) {
    return a.queried_field == QueriedField::count && !a.second_event &&
           (a.target_step || a.occurrence || a.temporal_offset);
}

// Answers read purely off event facts (event counts, occurrence steps,
// orderings and intervals) do not need action or location.
bool reads_events_only(const AnchorTuple& a) {
    if (!a.trigger_event) return false;
    if (a.queried_field == QueriedField::count) return !state_count(a);
    return a.queried_field == QueriedField::step || a.queried_field == QueriedField::order;
}

std::string digest_of(const MemoryUnit& u, const AnchorTuple& anchors) {
    std::vector<std::string> digest;
    // Inventory matters only when a count is read off one step's state,
    // not for event counts or intervals.
    if (u.mode == WriteMode::full && state_count(anchors)) {
        std::vector<std::string> inv;
        for (const auto& [item, n] : u.state.inventory) {
            if (!anchors.target_object || item == *anchors.target_object) inv.push_back(item + ":" + std::to_string(n));
        }
        digest.push_back("inv=" + join(inv, ","));
    }
    if (!u.state.changed_facts.empty()) {
        digest.push_back("new=" +
                         join(std::vector<std::string>(u.state.changed_facts.begin(), u.state.changed_facts.end()), ","));
    }
    return digest.empty() ? std::string() : " " + join(digest, " ");
}

// Event facts only, for anchor lines that would not fit in full.
std::string compact_pack_line(const MemoryUnit& u, const AnchorTuple& anchors) {
    std::vector<std::string> events;
    for (const auto& e : u.events) events.push_back(render_event(e));
    return "[" + std::to_string(u.step) + "] events: " + join(events, ",") + " |" + digest_of(u, anchors);
}

}  // namespace

std::string render_pack_line(const MemoryUnit& u, const AnchorTuple& anchors) {
    return "[" + std::to_string(u.step) + "] " + u.summary + " |" + digest_of(u, anchors);
}

std::vector<PackCandidate> classify_candidates(std::span<const ScoredUnit> ranked, const AnchorResolution& resolution,
                                               const AnchorTuple& anchors) {
    std::vector<PackCandidate> out;
    out.reserve(ranked.size());
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        const MemoryUnit& u = *ranked[i].unit;
        PackCandidate c;
        c.rank = i;
        c.step = u.step;
        c.new_facts = u.state.changed_facts;
        if (resolution.is_decisive(u.step)) {
            c.tier = PackTier::anchor;
        } else if (resolution.is_support(u.step)) {
            c.tier = PackTier::neighborhood;
        } else if (!c.new_facts.empty()) {
            c.tier = PackTier::state_completion;
        }
        c.line = render_pack_line(u, anchors);
        c.cost = token_count(c.line);
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<std::size_t> greedy_select(std::span<const PackCandidate> candidates, std::size_t budget) {
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& x = candidates[a];
        const auto& y = candidates[b];
        if (x.tier != y.tier) return x.tier < y.tier;
        if (x.cost != y.cost) return x.cost < y.cost;
        return x.rank < y.rank;
    });
    std::vector<std::size_t> chosen;
    std::set<std::string> covered;
    std::size_t remaining = budget;
    for (auto idx : order) {
        const auto& c = candidates[idx];
        if (c.tier == PackTier::inadmissible) continue;
        if (c.tier == PackTier::state_completion &&
            std::all_of(c.new_facts.begin(), c.new_facts.end(), [&](const std::string& f) { return covered.contains(f); })) {
            continue;
        }
        if (c.cost > remaining) continue;
        remaining -= c.cost;
        chosen.push_back(idx);
        covered.insert(c.new_facts.begin(), c.new_facts.end());
    }
    return chosen;
}

PackScore score_selection(std::span<const PackCandidate> candidates, std::span<const std::size_t> chosen,
                          const PackObjective& objective) {
    PackScore s;
    std::set<std::string> core_facts;
    for (auto idx : chosen) {
        const auto& c = candidates[idx];
        if (c.tier == PackTier::anchor) ++s.anchors;
        if (c.tier == PackTier::neighborhood) ++s.neighborhood;
        if (c.tier == PackTier::anchor || c.tier == PackTier::neighborhood) {
            core_facts.insert(c.new_facts.begin(), c.new_facts.end());
        }
    }
    std::set<std::string> completion;
    for (auto idx : chosen) {
        const auto& c = candidates[idx];
        if (c.tier == PackTier::inadmissible) {
            ++s.redundant;
            continue;
        }
        if (c.tier != PackTier::state_completion) continue;
        // Redundant when every fact it carries is supplied by another chosen unit.
        bool adds = false;
        for (const auto& f : c.new_facts) {
            bool elsewhere = false;
            for (auto other : chosen) {
                if (other != idx && candidates[other].new_facts.contains(f)) elsewhere = true;
            }
            if (!elsewhere) adds = true;
            if (!core_facts.contains(f)) completion.insert(f);
        }
        if (!adds) ++s.redundant;
    }
    s.state_facts = completion.size();
    s.value = objective.w_anchor * static_cast<double>(s.anchors) +
              objective.w_neighborhood * static_cast<double>(s.neighborhood) +
              objective.w_statefact * static_cast<double>(s.state_facts) -
              objective.w_redundancy * static_cast<double>(s.redundant);
    return s;
}

EvidencePack pack_evidence(std::span<const ScoredUnit> ranked, const AnchorResolution& resolution,
                           const AnchorTuple& anchors, std::size_t budget, const PackObjective&) {
    if (budget < 1) throw Error("token budget must be >= 1");
    auto candidates = classify_candidates(ranked, resolution, anchors);

    // When the anchor lines alone overflow the budget and the answer only
    // needs event facts, anchors fall back to their event-only rendering.
    std::size_t anchor_total = 0;
    for (const auto& c : candidates) {
        if (c.tier == PackTier::anchor) anchor_total += c.cost;
    }
    if (anchor_total > budget && reads_events_only(anchors)) {
        for (auto& c : candidates) {
            const MemoryUnit& u = *ranked[c.rank].unit;
            if (c.tier != PackTier::anchor || u.events.empty()) continue;
            auto line = compact_pack_line(u, anchors);
            const auto cost = token_count(line);
            if (cost < c.cost) {
                c.line = std::move(line);
                c.cost = cost;
            }
        }
    }

    // Degenerate budget: no anchor line fits at all, so the cheapest one is
    // cut down to the budget instead of exposing nothing.
    const PackCandidate* cheapest_anchor = nullptr;
    for (const auto& c : candidates) {
        if (c.tier != PackTier::anchor) continue;
        if (!cheapest_anchor || c.cost < cheapest_anchor->cost) cheapest_anchor = &c;
    }
    if (cheapest_anchor && cheapest_anchor->cost > budget) {
        EvidencePack pack = make_pack({PackLine{cheapest_anchor->step, truncate_tokens(cheapest_anchor->line, budget)}}, budget);
        pack.truncated = true;
        pack.anchor_steps_included.insert(cheapest_anchor->step);
        return pack;
    }

    std::vector<PackLine> lines;
    std::set<std::size_t> anchors_in;
    for (auto idx : greedy_select(candidates, budget)) {
        lines.push_back(PackLine{candidates[idx].step, candidates[idx].line});
        if (candidates[idx].tier == PackTier::anchor) anchors_in.insert(candidates[idx].step);
    }
    EvidencePack pack = make_pack(std::move(lines), budget);
    pack.anchor_steps_included = std::move(anchors_in);
    return pack;
}

EvidencePack no_compress_interface(std::span<const ScoredUnit> ranked, const Trajectory& t) {
    std::vector<PackLine> lines;
    std::set<std::size_t> seen;
    for (const auto& r : ranked) {
        const auto step = r.unit->step;
        if (step >= t.steps.size() || !seen.insert(step).second) continue;
        lines.push_back(PackLine{step, serialize_step_plain(t.steps[step])});
    }
    return make_pack(std::move(lines));
}

}  // namespace epimem
