#pragma once

#include "epimem/anchor.hpp"
#include "epimem/answer.hpp"
#include "epimem/config.hpp"
#include "epimem/eval.hpp"
#include "epimem/mem_write.hpp"
#include "epimem/packer.hpp"
#include "epimem/qa_gen.hpp"
#include "epimem/retrieval.hpp"
#include "epimem/traj_model.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace epimem {

const std::vector<std::string>& method_registry();
const std::vector<std::string>& env_registry();  // gridworld | textadv

// Retrieval defaults for an environment (wider top_k on gridworld).
RetrievalConfig retrieval_preset(std::string_view env);

struct RunConfig {
    std::string env = "gridworld";
    SeedRange seeds{1, 24};
    std::string policy = "mixed";  // simulator policy, or "mixed" to alternate by seed
    std::string method = "s3mem";
    std::string protocol = "current";
    std::string write_mode = "full";
    RetrievalConfig retrieval = retrieval_preset("gridworld");
    std::size_t budget = 192;
    bool rtk = false;
    bool compress = true;  // false: every ranked unit as a full plain line
    std::size_t rag_top_k = 16;
    std::size_t rag_chunk_size = 3;
    std::size_t rag_stride = 3;
    std::size_t graph_hops = 2;
    std::size_t plain_chunk_cap = 20;
    std::size_t per_family = 3;
    std::uint64_t qa_seed = 7;
    std::uint64_t bootstrap_seed = 2026;
    std::size_t bootstrap_resamples = 2000;
    std::string variant;  // label only, e.g. an ablation name
    std::filesystem::path trajectories_path;
    std::filesystem::path questions_path;
    std::filesystem::path output_dir;

    // Registry and range checks; throws Error before any work is done.
    void validate() const;

    // Sorted key=value lines of every field that affects results.
    std::string canonical_text() const;
    std::string hash() const { return stable_hash(canonical_text()); }

    // Starts from the environment preset and applies the keys present.
    static RunConfig from(const KeyValueConfig& kv);
};

struct Dataset {
    std::vector<Trajectory> trajectories;
    std::vector<QAItem> questions;
};

// Simulated episode for one seed. `policy` "mixed" gives the scripted or
// expert policy on odd seeds and valid_random on even ones.
Trajectory simulate_episode(std::string_view env, std::uint64_t seed, std::string_view policy,
                            const KeyValueConfig& overrides = {});

Dataset build_dataset(std::string_view env, SeedRange seeds, std::string_view policy, std::size_t per_family,
                      std::uint64_t qa_seed, const KeyValueConfig& overrides = {});

// Per-episode state of one method: the memory store or baseline index
// built once and queried per question.
class EpisodeMemory {
public:
    EpisodeMemory(const Trajectory& t, const RunConfig& cfg);
    ~EpisodeMemory();
    EpisodeMemory(EpisodeMemory&&) noexcept;
    EpisodeMemory& operator=(EpisodeMemory&&) noexcept;

    // Evidence interface of the configured method for one question,
    // including the optional generic compression pass.
    EvidencePack evidence(std::string_view question, const AnchorTuple& anchors) const;

    const Trajectory& trajectory() const;
    const MemoryStore* store() const;  // s3mem only

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

struct QuestionRecord {
    std::string qid;
    std::string episode_id;
    std::string family;
    std::string pred;
    std::string gold;
    bool correct = false;
    bool resolved = false;
    std::size_t tokens = 0;
    std::vector<std::size_t> evidence_steps;
};

std::string record_to_json_line(const QuestionRecord& r);
QuestionRecord record_from_json_line(std::string_view line);
std::vector<QuestionRecord> read_records(const std::filesystem::path& path);

struct RunOutput {
    RunReport report;
    std::vector<QuestionRecord> records;
};

// Answers one question end to end.
Answer answer_question(const EpisodeMemory& memory, const RunConfig& cfg, const QAItem& q, EvidencePack* pack = nullptr);

// In-memory evaluation over a dataset.
RunOutput evaluate(const RunConfig& cfg, const Dataset& data);

// Reads cfg.trajectories_path / cfg.questions_path, evaluates, and, when
// output_dir is set, writes <hash>.records.jsonl and <hash>.report.json.
RunReport run_eval(const RunConfig& cfg);

// The ablation grid: {full, no_seed, no_compress, top_k16, budget96} x
// {full, event_only, object_only, plain_chunk}.
std::vector<RunConfig> ablation_grid(const RunConfig& base);
std::vector<RunOutput> run_ablation_suite(const RunConfig& base, const Dataset& data);
std::vector<RunReport> run_ablation_suite(const RunConfig& base);

// Checksum of the canonical serialization of a dataset.
std::string dataset_hash(const Dataset& data);

}  // namespace epimem
