#pragma once

#include "epimem/packer.hpp"

#include <random>
#include <tuple>
#include <vector>

namespace epimem::testing {

struct PackInstance {
    std::vector<PackCandidate> candidates;
    std::size_t budget = 0;
};

// Candidates in the shape the packer sees: every state-completion unit
// carries one fact, anchor and neighbourhood units sometimes one, and facts
// are distinct because a fact is "changed" only at its first appearance.
inline PackInstance random_pack_instance(std::mt19937_64& rng, std::size_t max_candidates = 12) {
    PackInstance inst;
    std::uniform_int_distribution<std::size_t> count(1, max_candidates);
    std::uniform_int_distribution<int> tier(0, 3);
    std::uniform_int_distribution<std::size_t> cost(3, 24);
    std::uniform_int_distribution<std::size_t> budget(4, 120);
    std::bernoulli_distribution has_fact(0.3);
    const std::size_t n = count(rng);
    std::size_t next_fact = 0;
    for (std::size_t i = 0; i < n; ++i) {
        PackCandidate c;
        c.rank = i;
        c.step = i * 3;
        c.tier = static_cast<PackTier>(tier(rng));
        c.cost = cost(rng);
        if (c.tier == PackTier::state_completion ||
            ((c.tier == PackTier::anchor || c.tier == PackTier::neighborhood) && has_fact(rng))) {
            c.new_facts.insert("fact" + std::to_string(next_fact++));
        }
        c.line = "unit " + std::to_string(i);
        inst.candidates.push_back(std::move(c));
    }
    inst.budget = budget(rng);
    return inst;
}

struct OracleResult {
    std::vector<std::size_t> chosen;
    PackScore score;
};

// Exhaustive search over every subset of admissible candidates that fits the
// budget. Tiers are strict priorities: more anchors first, then more
// neighbourhood units, then more state facts, then fewer redundant units.
inline OracleResult brute_force_pack(const PackInstance& inst, const PackObjective& obj = {}) {
    const auto& c = inst.candidates;
    const std::size_t n = c.size();
    OracleResult best;
    bool have = false;
    auto key = [](const PackScore& s) {
        return std::make_tuple(s.anchors, s.neighborhood, s.state_facts, -static_cast<long>(s.redundant));
    };
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        std::vector<std::size_t> chosen;
        std::size_t total = 0;
        bool admissible = true;
        for (std::size_t i = 0; i < n; ++i) {
            if (!(mask >> i & 1)) continue;
            if (c[i].tier == PackTier::inadmissible) admissible = false;
            total += c[i].cost;
            chosen.push_back(i);
        }
        if (!admissible || total > inst.budget) continue;
        const PackScore s = score_selection(c, chosen, obj);
        if (!have || key(s) > key(best.score)) {
            best = {chosen, s};
            have = true;
        }
    }
    return best;
}

}  // namespace epimem::testing
