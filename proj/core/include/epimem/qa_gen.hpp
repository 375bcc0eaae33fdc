#pragma once

#include "epimem/anchor.hpp"
#include "epimem/traj_model.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace epimem {

inline constexpr std::string_view kNotAnswerable = "not answerable";

struct QAItem {
    std::string qid;
    std::string episode_id;
    std::string question;
    std::string gold_answer;
    std::string family;
    std::vector<std::size_t> gold_evidence_steps;
    bool answerable = true;

    bool operator==(const QAItem&) const = default;
};

// Closed family set. Listed in labelling priority order: when a template
// touches several families it is labelled with the earliest one here.
const std::vector<std::string>& family_registry();
bool is_family(std::string_view family);

// Labels that the adversarial family draws from; they never occur in
// simulated trajectories.
const std::vector<std::string>& decoy_objects();

struct GenerationLog {
    std::vector<std::string> skipped;  // "<family>: <reason>"
};

// A generated item together with the template parameters it was built from.
struct GeneratedQuestion {
    QAItem item;
    AnchorTuple params;
};

// Template questions over one trajectory, up to per_family per family.
std::vector<GeneratedQuestion> generate_with_params(const Trajectory& t, std::size_t per_family,
                                                    std::uint64_t seed, GenerationLog* log = nullptr);

std::vector<QAItem> generate_questions(const Trajectory& t, std::size_t per_family, std::uint64_t seed,
                                       GenerationLog* log = nullptr);

// Drops items whose evidence steps fall outside the trajectory, that belong
// to a different episode, or that violate the QAItem invariants.
std::vector<QAItem> filter_invalid(std::vector<QAItem> items, const Trajectory& t);

std::string qa_to_json_line(const QAItem& q);
QAItem qa_from_json_line(std::string_view line);
std::vector<QAItem> read_questions(const std::filesystem::path& path);
void write_questions(const std::filesystem::path& path, std::span<const QAItem> items);

}  // namespace epimem
