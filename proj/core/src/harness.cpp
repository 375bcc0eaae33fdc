#include "epimem/harness.hpp"

#include "epimem/baselines.hpp"
#include "epimem/env_sim.hpp"
#include "epimem/error.hpp"
#include "epimem/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace epimem {

const std::vector<std::string>& method_registry() {
    static const std::vector<std::string> methods = {"no_memory",   "vanilla_rag", "graph_noreader",
                                                     "full_history", "summarize",  "s3mem",
                                                     "amem_like",    "memoryos_like", "lightmem_like"};
    return methods;
}

const std::vector<std::string>& env_registry() {
    static const std::vector<std::string> envs = {"gridworld", "textadv"};
    return envs;
}

RetrievalConfig retrieval_preset(std::string_view env) {
    RetrievalConfig r;
    r.top_k = env == "textadv" ? 24 : 32;
    return r;
}

namespace {

bool contains(const std::vector<std::string>& v, std::string_view x) {
    return std::find(v.begin(), v.end(), x) != v.end();
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

void RunConfig::validate() const {
    if (!contains(env_registry(), env)) throw Error("unknown env: " + env);
    if (!contains(method_registry(), method)) throw Error("unknown method: " + method);
    if (!protocol_from(protocol)) throw Error("unknown protocol: " + protocol);
    if (!write_mode_from(write_mode)) throw Error("unknown write_mode: " + write_mode);
    if (seeds.first > seeds.last) throw Error("empty seed range " + seeds.to_string());
    if (budget < 1) throw Error("budget must be >= 1");
    if (rag_top_k < 1) throw Error("rag.top_k must be >= 1");
    if (rag_chunk_size < 1 || rag_stride < 1 || rag_stride > rag_chunk_size) throw Error("bad rag chunking");
    if (per_family < 1) throw Error("qa.per_family must be >= 1");
    if (bootstrap_resamples < 1) throw Error("eval.bootstrap_resamples must be >= 1");
    retrieval.validate();
}

std::string RunConfig::canonical_text() const {
    std::map<std::string, std::string> kv = {
        {"env", env},
        {"seeds", seeds.to_string()},
        {"policy", policy},
        {"method", method},
        {"protocol", protocol},
        {"write_mode", write_mode},
        {"retrieval.top_k", std::to_string(retrieval.top_k)},
        {"retrieval.short_window", std::to_string(retrieval.short_window)},
        {"retrieval.lambda_a", format_double(retrieval.lambda_a)},
        {"retrieval.lambda_c", format_double(retrieval.lambda_c)},
        {"retrieval.seed_injection", retrieval.seed_injection ? "true" : "false"},
        {"budget", std::to_string(budget)},
        {"rtk", rtk ? "on" : "off"},
        {"compress", compress ? "true" : "false"},
        {"rag.top_k", std::to_string(rag_top_k)},
        {"rag.chunk_size", std::to_string(rag_chunk_size)},
        {"rag.stride", std::to_string(rag_stride)},
        {"graph.hops", std::to_string(graph_hops)},
        {"mem.plain_chunk_cap", std::to_string(plain_chunk_cap)},
        {"qa.per_family", std::to_string(per_family)},
        {"qa.seed", std::to_string(qa_seed)},
        {"eval.bootstrap_seed", std::to_string(bootstrap_seed)},
        {"eval.bootstrap_resamples", std::to_string(bootstrap_resamples)},
    };
    std::ostringstream os;
    for (const auto& [k, v] : kv) os << k << "=" << v << "\n";
    return os.str();
}

RunConfig RunConfig::from(const KeyValueConfig& kv) {
    RunConfig c;
    c.env = kv.get_string("env", c.env);
    c.retrieval = retrieval_preset(c.env);
    if (auto s = kv.get("seeds")) c.seeds = SeedRange::parse(*s);
    c.policy = kv.get_string("policy", c.policy);
    c.method = kv.get_string("method", c.method);
    c.protocol = kv.get_string("protocol", c.protocol);
    c.write_mode = kv.get_string("write_mode", c.write_mode);
    c.retrieval.top_k = kv.get_uint("retrieval.top_k", c.retrieval.top_k);
    c.retrieval.short_window = kv.get_uint("retrieval.short_window", c.retrieval.short_window);
    c.retrieval.lambda_a = kv.get_double("retrieval.lambda_a", c.retrieval.lambda_a);
    c.retrieval.lambda_c = kv.get_double("retrieval.lambda_c", c.retrieval.lambda_c);
    c.retrieval.seed_injection = kv.get_bool("retrieval.seed_injection", c.retrieval.seed_injection);
    c.budget = kv.get_uint("budget", c.budget);
    if (auto r = kv.get("rtk")) {
        if (*r != "on" && *r != "off") throw Error("rtk must be on or off");
        c.rtk = *r == "on";
    }
    c.compress = kv.get_bool("compress", c.compress);
    c.rag_top_k = kv.get_uint("rag.top_k", c.rag_top_k);
    c.rag_chunk_size = kv.get_uint("rag.chunk_size", c.rag_chunk_size);
    c.rag_stride = kv.get_uint("rag.stride", c.rag_stride);
    c.graph_hops = kv.get_uint("graph.hops", c.graph_hops);
    c.plain_chunk_cap = kv.get_uint("mem.plain_chunk_cap", c.plain_chunk_cap);
    c.per_family = kv.get_uint("qa.per_family", c.per_family);
    c.qa_seed = kv.get_uint("qa.seed", c.qa_seed);
    c.bootstrap_seed = kv.get_uint("eval.bootstrap_seed", c.bootstrap_seed);
    c.bootstrap_resamples = kv.get_uint("eval.bootstrap_resamples", c.bootstrap_resamples);
    c.variant = kv.get_string("variant", c.variant);
    if (auto p = kv.get("data.trajectories")) c.trajectories_path = *p;
    if (auto p = kv.get("data.questions")) c.questions_path = *p;
    if (auto p = kv.get("output_dir")) c.output_dir = *p;
    return c;
}

Trajectory simulate_episode(std::string_view env, std::uint64_t seed, std::string_view policy,
                            const KeyValueConfig& overrides) {
    const bool mixed = policy == "mixed";
    if (env == "gridworld") {
        GridWorldConfig c = gridworld_config_from(overrides);
        c.seed = seed;
        c.policy = mixed ? (seed % 2 == 1 ? "scripted_gather" : "valid_random") : std::string(policy);
        c.validate();
        return simulate_gridworld(c);
    }
    if (env == "textadv") {
        TextAdvConfig c = textadv_config_from(overrides);
        c.seed = seed;
        c.policy = mixed ? (seed % 2 == 1 ? "expert" : "valid_random") : std::string(policy);
        c.validate();
        return simulate_textadventure(c);
    }
    throw Error("unknown env: " + std::string(env));
}

Dataset build_dataset(std::string_view env, SeedRange seeds, std::string_view policy, std::size_t per_family,
                      std::uint64_t qa_seed, const KeyValueConfig& overrides) {
    Dataset d;
    for (std::uint64_t s = seeds.first; s <= seeds.last; ++s) {
        Trajectory t = simulate_episode(env, s, policy, overrides);
        auto qs = filter_invalid(generate_questions(t, per_family, qa_seed), t);
        d.questions.insert(d.questions.end(), qs.begin(), qs.end());
        d.trajectories.push_back(std::move(t));
    }
    return d;
}

std::string dataset_hash(const Dataset& data) {
    std::string text;
    for (const auto& t : data.trajectories) text += trajectory_to_json_line(t) + "\n";
    for (const auto& q : data.questions) text += qa_to_json_line(q) + "\n";
    return stable_hash(text);
}

struct EpisodeMemory::Impl {
    const Trajectory* traj = nullptr;
    RunConfig cfg;
    std::optional<MemoryStore> store;
    std::optional<ChunkIndex> chunks;
    std::optional<TrajGraph> graph;
    std::optional<NoteStore> notes;
    std::optional<HierStore> hier;
    std::optional<LightStore> light;
    EvidencePack fixed_pack;  // interfaces that ignore the question
};

EpisodeMemory::EpisodeMemory(const Trajectory& t, const RunConfig& cfg) : impl_(std::make_unique<Impl>()) {
    impl_->traj = &t;
    impl_->cfg = cfg;
    const auto& m = cfg.method;
    if (m == "s3mem") {
        WriteOptions opts;
        opts.plain_chunk_cap = cfg.plain_chunk_cap;
        impl_->store = write_trajectory(t, *write_mode_from(cfg.write_mode), opts);
    } else if (m == "vanilla_rag") {
        impl_->chunks = build_chunk_index(t, cfg.rag_chunk_size, cfg.rag_stride);
    } else if (m == "graph_noreader") {
        impl_->graph = graph_build(t);
    } else if (m == "amem_like") {
        impl_->notes = build_note_store(t);
    } else if (m == "memoryos_like") {
        impl_->hier = build_hier_store(t);
    } else if (m == "lightmem_like") {
        impl_->light = build_light_store(t);
    } else if (m == "no_memory") {
        impl_->fixed_pack = no_memory_interface(t);
    } else if (m == "full_history") {
        impl_->fixed_pack = full_history_interface(t);
    } else if (m == "summarize") {
        impl_->fixed_pack = summarize_then_answer_interface(t);
    } else {
        throw Error("unknown method: " + m);
    }
}

EpisodeMemory::~EpisodeMemory() = default;
EpisodeMemory::EpisodeMemory(EpisodeMemory&&) noexcept = default;
EpisodeMemory& EpisodeMemory::operator=(EpisodeMemory&&) noexcept = default;

const Trajectory& EpisodeMemory::trajectory() const { return *impl_->traj; }
const MemoryStore* EpisodeMemory::store() const { return impl_->store ? &*impl_->store : nullptr; }

EvidencePack EpisodeMemory::evidence(std::string_view question, const AnchorTuple& anchors) const {
    const auto& cfg = impl_->cfg;
    EvidencePack pack;
    if (impl_->store) {
        const auto r = retrieve(*impl_->store, anchors, question, cfg.retrieval);
        pack = cfg.compress ? pack_evidence(r.ranked, r.resolution, anchors, cfg.budget)
                            : no_compress_interface(r.ranked, *impl_->traj);
    } else if (impl_->chunks) {
        pack = vanilla_rag_retrieve(*impl_->chunks, question, cfg.rag_top_k);
    } else if (impl_->graph) {
        pack = graph_retrieve(*impl_->graph, question, cfg.graph_hops);
    } else if (impl_->notes) {
        pack = neighbor_retrieve(*impl_->notes, question, cfg.retrieval.top_k, cfg.budget);
    } else if (impl_->hier) {
        pack = neighbor_retrieve(*impl_->hier, question, cfg.retrieval.top_k, cfg.budget);
    } else if (impl_->light) {
        pack = neighbor_retrieve(*impl_->light, question, cfg.retrieval.top_k, cfg.budget);
    } else {
        pack = impl_->fixed_pack;
    }
    if (cfg.rtk && !pack.lines.empty()) pack = rtk_compress(pack, question, cfg.budget);
    return pack;
}

Answer answer_question(const EpisodeMemory& memory, const RunConfig& cfg, const QAItem& q, EvidencePack* pack_out) {
    const Protocol protocol = *protocol_from(cfg.protocol);
    const AnchorTuple anchors = extract_anchors(q.question);
    if (protocol == Protocol::gold_executor) {
        if (pack_out) *pack_out = EvidencePack{};
        return execute_program(compile_program(anchors), memory.trajectory());
    }
    EvidencePack pack = memory.evidence(q.question, anchors);
    Answer a = protocol == Protocol::current ? answer_current(pack, anchors) : answer_generic(pack, q.question);
    if (pack_out) *pack_out = std::move(pack);
    return a;
}

std::string record_to_json_line(const QuestionRecord& r) {
    nlohmann::json j = {{"qid", r.qid},         {"episode_id", r.episode_id}, {"family", r.family},
                        {"pred", r.pred},       {"gold", r.gold},             {"correct", r.correct},
                        {"resolved", r.resolved}, {"tokens", r.tokens},       {"evidence_steps", r.evidence_steps}};
    return j.dump();
}

QuestionRecord record_from_json_line(std::string_view line) {
    try {
        const auto j = nlohmann::json::parse(line);
        QuestionRecord r;
        r.qid = j.at("qid").get<std::string>();
        r.episode_id = j.at("episode_id").get<std::string>();
        r.family = j.at("family").get<std::string>();
        r.pred = j.at("pred").get<std::string>();
        r.gold = j.at("gold").get<std::string>();
        r.correct = j.at("correct").get<bool>();
        r.resolved = j.at("resolved").get<bool>();
        r.tokens = j.at("tokens").get<std::size_t>();
        r.evidence_steps = j.at("evidence_steps").get<std::vector<std::size_t>>();
        return r;
    } catch (const nlohmann::json::exception& ex) {
        throw Error(std::string("malformed record: ") + ex.what());
    }
}

std::vector<QuestionRecord> read_records(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::vector<QuestionRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!trim(line).empty()) out.push_back(record_from_json_line(line));
    }
    return out;
}

RunOutput evaluate(const RunConfig& cfg, const Dataset& data) {
    cfg.validate();
    std::map<std::string, const Trajectory*> by_id;
    for (const auto& t : data.trajectories) {
        if (!by_id.emplace(t.episode_id, &t).second) throw Error("duplicate episode id " + t.episode_id);
    }
    std::map<std::string, EpisodeMemory> memories;
    std::vector<AnsweredQuestion> answered;
    RunOutput out;
    answered.reserve(data.questions.size());
    for (const auto& q : data.questions) {
        auto t = by_id.find(q.episode_id);
        if (t == by_id.end()) throw Error("dataset mismatch: no trajectory for " + q.episode_id);
        auto mem = memories.find(q.episode_id);
        if (mem == memories.end()) mem = memories.emplace(q.episode_id, EpisodeMemory(*t->second, cfg)).first;
        EvidencePack pack;
        Answer a = answer_question(mem->second, cfg, q, &pack);
        QuestionRecord rec;
        rec.qid = q.qid;
        rec.episode_id = q.episode_id;
        rec.family = q.family;
        rec.pred = a.text;
        rec.gold = q.gold_answer;
        rec.correct = exact_match(a.text, q.gold_answer) == 1;
        rec.resolved = a.resolved;
        rec.tokens = pack.token_cost;
        rec.evidence_steps = pack.steps();
        out.records.push_back(std::move(rec));
        answered.push_back(AnsweredQuestion{q, std::move(a), pack.token_cost, t->second->episode_id});
    }
    out.report = score_run(answered, cfg.bootstrap_seed, cfg.bootstrap_resamples);
    out.report.method = cfg.method;
    out.report.protocol = cfg.protocol;
    out.report.label = cfg.env + (cfg.variant.empty() ? "" : "/" + cfg.variant);
    out.report.config_hash = cfg.hash();
    return out;
}

namespace {

Dataset load_dataset(const RunConfig& cfg) {
    if (cfg.trajectories_path.empty() || cfg.questions_path.empty()) {
        throw Error("run needs data.trajectories and data.questions");
    }
    for (const auto& p : {cfg.trajectories_path, cfg.questions_path}) {
        if (!std::filesystem::exists(p)) throw Error("missing file: " + p.string());
    }
    Dataset d;
    d.trajectories = read_trajectories(cfg.trajectories_path);
    d.questions = read_questions(cfg.questions_path);
    if (auto v = validate_dataset(d.trajectories); !v.ok()) throw Error("invalid dataset: " + v.violations.front());
    return d;
}

void write_output(const RunConfig& cfg, const RunOutput& out) {
    if (cfg.output_dir.empty()) return;
    std::filesystem::create_directories(cfg.output_dir);
    const std::string stem = cfg.hash();
    {
        std::ofstream rec(cfg.output_dir / (stem + ".records.jsonl"), std::ios::binary);
        if (!rec) throw Error("cannot write records under " + cfg.output_dir.string());
        for (const auto& r : out.records) rec << record_to_json_line(r) << '\n';
    }
    std::ofstream rep(cfg.output_dir / (stem + ".report.json"), std::ios::binary);
    if (!rep) throw Error("cannot write report under " + cfg.output_dir.string());
    rep << report_to_json(out.report) << '\n';
}

}  // namespace

RunReport run_eval(const RunConfig& cfg) {
    cfg.validate();
    const Dataset d = load_dataset(cfg);
    RunOutput out = evaluate(cfg, d);
    write_output(cfg, out);
    return out.report;
}

std::vector<RunConfig> ablation_grid(const RunConfig& base) {
    std::vector<RunConfig> grid;
    for (const std::string mode : {"full", "event_only", "object_only", "plain_chunk"}) {
        for (const std::string variant : {"full", "no_seed", "no_compress", "top_k16", "budget96"}) {
            RunConfig c = base;
            c.method = "s3mem";
            c.write_mode = mode;
            c.variant = variant + "/" + mode;
            if (variant == "no_seed") c.retrieval.seed_injection = false;
            if (variant == "no_compress") c.compress = false;
            if (variant == "top_k16") c.retrieval.top_k = 16;
            if (variant == "budget96") c.budget = 96;
            grid.push_back(std::move(c));
        }
    }
    return grid;
}

std::vector<RunOutput> run_ablation_suite(const RunConfig& base, const Dataset& data) {
    std::vector<RunOutput> out;
    for (const auto& c : ablation_grid(base)) out.push_back(evaluate(c, data));
    return out;
}

std::vector<RunReport> run_ablation_suite(const RunConfig& base) {
    base.validate();
    const Dataset d = load_dataset(base);
    std::vector<RunReport> reports;
    for (const auto& c : ablation_grid(base)) {
        RunOutput out = evaluate(c, d);
        write_output(c, out);
        reports.push_back(std::move(out.report));
    }
    return reports;
}

}  // namespace epimem
