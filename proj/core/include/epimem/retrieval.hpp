#pragma once

#include "epimem/anchor.hpp"
#include "epimem/mem_write.hpp"

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

namespace epimem {

struct ScoredUnit {
    const MemoryUnit* unit = nullptr;
    double s_text = 0.0;
    double s_anchor = 0.0;
    double s_chain = 0.0;
    double total = 0.0;
};

struct RetrievalConfig {
    std::size_t top_k = 16;
    std::size_t short_window = 4;
    double lambda_a = 2.0;
    double lambda_c = 1.0;
    bool seed_injection = true;

    void validate() const;
};

// Steps the anchors resolve to in a store.
//   decisive: anchor-bearing steps (target step, the selected occurrence and
//             the earlier occurrences that disambiguate it, offset target,
//             second-event anchor, or every occurrence for counts).
//   support:  minimal neighbourhood: steps strictly between an anchor and
//             its offset target, or +-1 around a single anchor without offset.
//   primary:  the step that offsets and projections start from.
struct AnchorResolution {
    std::vector<std::size_t> decisive;
    std::vector<std::size_t> support;
    std::optional<std::size_t> primary;

    bool is_decisive(std::size_t step) const;
    bool is_support(std::size_t step) const;
};

struct RetrievalResult {
    std::vector<ScoredUnit> ranked;
    AnchorResolution resolution;
};

// Top-k units by token-overlap F1 against unit_text; ties to the lower step.
std::vector<ScoredUnit> text_candidates(const MemoryStore& store, std::string_view question, std::size_t top_k);

// Steps carrying an event of kind `event` (with object `object` when given).
std::vector<std::size_t> event_steps(const MemoryStore& store, std::string_view event,
                                     const std::optional<std::string>& object);

std::optional<std::size_t> resolve_occurrence(const MemoryStore& store, std::string_view event,
                                              const std::optional<std::string>& object, Occurrence k);

AnchorResolution resolve_anchors(const MemoryStore& store, const AnchorTuple& anchors);

// Recomputes s_anchor/s_chain for `candidates` and orders them by
// total = s_text + lambda_a * s_anchor + lambda_c * s_chain, ties broken
// anchor-bearing first, then local support, then lower step.
std::vector<ScoredUnit> rerank(std::vector<ScoredUnit> candidates, const AnchorTuple& anchors,
                               const AnchorResolution& resolution, const RetrievalConfig& cfg);

RetrievalResult retrieve(const MemoryStore& store, const AnchorTuple& anchors, std::string_view question,
                         const RetrievalConfig& cfg);

}  // namespace epimem
