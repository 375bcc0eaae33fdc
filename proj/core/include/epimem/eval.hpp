#pragma once

#include "epimem/answer.hpp"
#include "epimem/packer.hpp"
#include "epimem/qa_gen.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace epimem {

// Lowercase, trim, collapse whitespace, strip outer punctuation, and drop
// leading zeros of integer tokens. Idempotent.
std::string normalize_answer(std::string_view text);

int exact_match(std::string_view pred, std::string_view gold);

struct FamilyScore {
    double em = 0.0;
    std::size_t correct = 0;
    std::size_t n = 0;
};

struct RunReport {
    std::string method;
    std::string protocol;
    std::string label;  // free-form run label, e.g. env and variant
    double em = 0.0;
    double avg_tokens = 0.0;
    std::map<std::string, FamilyScore> per_family;
    std::size_t n_questions = 0;
    std::size_t correct = 0;
    double ci_center = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::string config_hash;
};

// One answered question. `evidence_episode` names the episode the evidence
// was drawn from; it must match the item's episode.
struct AnsweredQuestion {
    QAItem item;
    Answer answer;
    std::size_t token_cost = 0;
    std::string evidence_episode;
};

// Throws Error("dataset mismatch") on an episode mismatch and on empty input.
RunReport score_run(std::span<const AnsweredQuestion> answers, std::uint64_t bootstrap_seed = 0,
                    std::size_t bootstrap_resamples = 2000);

struct Interval95 {
    double center = 0.0;
    double low = 0.0;
    double high = 0.0;

    bool operator==(const Interval95&) const = default;
};

// Percentile bootstrap of the mean. Resample b draws from its own
// generator seeded by (seed, b), so the result does not depend on
// evaluation order.
Interval95 bootstrap_ci(std::span<const int> correctness, std::size_t resamples = 2000, std::uint64_t seed = 0);

// Bootstrap of mean(a) - mean(b) with jointly resampled indices.
Interval95 paired_bootstrap(std::span<const int> a, std::span<const int> b, std::size_t resamples = 2000,
                            std::uint64_t seed = 0);

struct FrontierEntry {
    std::string method;
    std::string label;
    double em = 0.0;
    double avg_tokens = 0.0;
    bool pareto = false;
};

// Sorted by EM descending, then tokens ascending. An entry is on the
// frontier unless another has strictly higher EM and strictly lower tokens.
std::vector<FrontierEntry> frontier(std::span<const RunReport> reports);
std::string frontier_table(std::span<const RunReport> reports);
std::string frontier_json(std::span<const RunReport> reports);

std::string report_to_json(const RunReport& r);
RunReport report_from_json(std::string_view text);

// Aligned plain-text table with EM and Avg. Tokens columns.
std::string report_table(std::span<const RunReport> reports);

}  // namespace epimem
