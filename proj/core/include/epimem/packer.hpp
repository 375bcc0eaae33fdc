#pragma once

#include "epimem/anchor.hpp"
#include "epimem/retrieval.hpp"
#include "epimem/traj_model.hpp"

#include <cstddef>
#include <limits>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace epimem {

struct PackLine {
    std::size_t step = 0;
    std::string text;

    bool operator==(const PackLine&) const = default;
};

// The evidence interface handed to an answerer. Lines are sorted by step and
// token_cost is the accounted cost of exactly these lines.
struct EvidencePack {
    std::vector<PackLine> lines;
    std::size_t token_cost = 0;
    std::size_t budget = std::numeric_limits<std::size_t>::max();
    std::set<std::size_t> anchor_steps_included;
    bool truncated = false;

    std::vector<std::size_t> steps() const;
    bool operator==(const EvidencePack&) const = default;
};

inline constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

// Sorts lines by step (stable) and recomputes token_cost.
EvidencePack make_pack(std::vector<PackLine> lines, std::size_t budget = kUnbounded);

struct PackObjective {
    double w_anchor = 4.0;
    double w_neighborhood = 2.0;
    double w_statefact = 1.0;
    double w_redundancy = 1.0;
};

// Admission class of a candidate, in priority order.
enum class PackTier { anchor = 0, neighborhood = 1, state_completion = 2, inadmissible = 3 };

struct PackCandidate {
    std::size_t rank = 0;  // position in the ranked list
    std::size_t step = 0;
    PackTier tier = PackTier::inadmissible;
    std::size_t cost = 0;
    std::set<std::string> new_facts;  // state-change facts the unit supplies
    std::string line;
};

// Counts over a selection, and F = w_a*anchors + w_n*neighborhood
// + w_s*state_facts - w_r*redundant.
struct PackScore {
    std::size_t anchors = 0;
    std::size_t neighborhood = 0;
    std::size_t state_facts = 0;
    std::size_t redundant = 0;
    double value = 0.0;
};

// "[<step>] <summary> | <field digest>". The digest carries the inventory
// and state-change entries relevant to the anchors.
std::string render_pack_line(const MemoryUnit& u, const AnchorTuple& anchors);

std::vector<PackCandidate> classify_candidates(std::span<const ScoredUnit> ranked, const AnchorResolution& resolution,
                                               const AnchorTuple& anchors);

// Indices into `candidates` chosen by the greedy packer under `budget`.
std::vector<std::size_t> greedy_select(std::span<const PackCandidate> candidates, std::size_t budget);

PackScore score_selection(std::span<const PackCandidate> candidates, std::span<const std::size_t> chosen,
                          const PackObjective& objective = {});

EvidencePack pack_evidence(std::span<const ScoredUnit> ranked, const AnchorResolution& resolution,
                           const AnchorTuple& anchors, std::size_t budget, const PackObjective& objective = {});

// Every ranked unit's full serialize_step_plain line, no budget.
EvidencePack no_compress_interface(std::span<const ScoredUnit> ranked, const Trajectory& t);

}  // namespace epimem
