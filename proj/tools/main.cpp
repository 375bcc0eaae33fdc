// Command-line front end: dataset generation, memory inspection, single
// questions, evaluation runs and reports.
#include "epimem/anchor.hpp"
#include "epimem/answer.hpp"
#include "epimem/config.hpp"
#include "epimem/error.hpp"
#include "epimem/eval.hpp"
#include "epimem/harness.hpp"
#include "epimem/mem_write.hpp"
#include "epimem/qa_gen.hpp"
#include "epimem/traj_model.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace epimem;

namespace {

KeyValueConfig load_optional(const std::string& path) {
    return path.empty() ? KeyValueConfig{} : KeyValueConfig::load(path);
}

const Trajectory& find_episode(const std::vector<Trajectory>& ts, const std::string& id) {
    if (ts.empty()) throw Error("no trajectories");
    if (id.empty()) return ts.front();
    for (const auto& t : ts) {
        if (t.episode_id == id) return t;
    }
    throw Error("no episode " + id);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Flags shared by run/ablate/answer that override config file keys.
struct Overrides {
    std::string config;
    std::string env, method, protocol, write_mode, rtk, traj, questions, out_dir;
    long budget = -1;

    void add_to(CLI::App* cmd, bool data_flags) {
        cmd->add_option("--config", config, "key=value configuration file");
        cmd->add_option("--env", env, "gridworld | textadv");
        cmd->add_option("--method", method, "memory method");
        cmd->add_option("--protocol", protocol, "current | generic | gold_executor");
        cmd->add_option("--write-mode", write_mode, "full | event_only | object_only | plain_chunk");
        cmd->add_option("--rtk", rtk, "on | off");
        cmd->add_option("--budget", budget, "evidence token budget");
        if (data_flags) {
            cmd->add_option("--traj", traj, "trajectory JSON-lines file");
            cmd->add_option("--questions", questions, "question JSON-lines file");
            cmd->add_option("--out-dir", out_dir, "directory for records and reports");
        }
    }

    RunConfig resolve() const {
        KeyValueConfig kv = load_optional(config);
        auto put = [&](const char* key, const std::string& v) {
            if (!v.empty()) kv.set(key, v);
        };
        put("env", env);
        put("method", method);
        put("protocol", protocol);
        put("write_mode", write_mode);
        put("rtk", rtk);
        put("data.trajectories", traj);
        put("data.questions", questions);
        put("output_dir", out_dir);
        if (budget >= 0) kv.set("budget", std::to_string(budget));
        RunConfig c = RunConfig::from(kv);
        c.validate();
        return c;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"epimem: episodic memory engine and evaluation harness"};
    app.require_subcommand(1);

    // gen-env
    std::string env = "gridworld", seeds = "1..24", policy = "mixed", config_path, out;
    auto* gen_env = app.add_subcommand("gen-env", "simulate trajectories");
    gen_env->add_option("--env", env, "gridworld | textadv")->check(CLI::IsMember({"gridworld", "textadv"}));
    gen_env->add_option("--seeds", seeds, "seed range a..b");
    gen_env->add_option("--policy", policy, "policy, or mixed");
    gen_env->add_option("--config", config_path, "key=value overrides (gridworld.*, textadv.*)");
    gen_env->add_option("--out", out, "output JSON-lines")->required();
    gen_env->callback([&] {
        const auto kv = load_optional(config_path);
        const auto range = SeedRange::parse(seeds);
        std::vector<Trajectory> ts;
        for (auto s = range.first; s <= range.last; ++s) ts.push_back(simulate_episode(env, s, policy, kv));
        write_trajectories(out, ts);
        std::cout << "wrote " << ts.size() << " trajectories to " << out << "\n";
    });

    // gen-qa
    std::string traj_path;
    std::size_t per_family = 3;
    std::uint64_t qa_seed = 7;
    auto* gen_qa = app.add_subcommand("gen-qa", "generate template questions");
    gen_qa->add_option("--traj", traj_path, "trajectory JSON-lines")->required();
    gen_qa->add_option("--per-family", per_family, "questions per family per episode");
    gen_qa->add_option("--seed", qa_seed, "generator seed");
    gen_qa->add_option("--out", out, "output JSON-lines")->required();
    gen_qa->callback([&] {
        std::vector<QAItem> all;
        for (const auto& t : read_trajectories(traj_path)) {
            GenerationLog log;
            auto qs = filter_invalid(generate_questions(t, per_family, qa_seed, &log), t);
            for (const auto& s : log.skipped) std::cerr << t.episode_id << ": skipped " << s << "\n";
            all.insert(all.end(), qs.begin(), qs.end());
        }
        write_questions(out, all);
        std::cout << "wrote " << all.size() << " questions to " << out << "\n";
    });

    // build-memory / dump-memory
    std::string mode = "full", episode;
    auto* build = app.add_subcommand("build-memory", "write memory stores and print index statistics");
    build->add_option("--traj", traj_path, "trajectory JSON-lines")->required();
    build->add_option("--mode", mode, "write mode");
    build->callback([&] {
        auto m = write_mode_from(mode);
        if (!m) throw Error("unknown write mode " + mode);
        for (const auto& t : read_trajectories(traj_path)) {
            const auto store = write_trajectory(t, *m);
            std::size_t tokens = 0;
            for (std::size_t i = 0; i < store.units().size(); ++i) tokens += store.text_tokens(i).size();
            std::cout << t.episode_id << "\tunits=" << store.units().size() << "\ttext_tokens=" << tokens << "\n";
        }
    });

    auto* dump = app.add_subcommand("dump-memory", "dump memory units as JSON-lines");
    dump->add_option("--traj", traj_path, "trajectory JSON-lines")->required();
    dump->add_option("--mode", mode, "write mode");
    dump->add_option("--episode", episode, "episode id (default: first)");
    dump->add_option("--out", out, "output file (default: stdout)");
    dump->callback([&] {
        auto m = write_mode_from(mode);
        if (!m) throw Error("unknown write mode " + mode);
        const auto ts = read_trajectories(traj_path);
        const auto store = write_trajectory(find_episode(ts, episode), *m);
        std::ofstream file;
        if (!out.empty()) file.open(out);
        std::ostream& os = out.empty() ? std::cout : file;
        for (const auto& u : store.units()) os << unit_to_json_line(u) << "\n";
    });

    // parse-anchor
    std::string question;
    auto* parse = app.add_subcommand("parse-anchor", "print the anchor tuple of a question");
    parse->add_option("--question", question, "question text")->required();
    parse->callback([&] { std::cout << anchors_to_json(extract_anchors(question)) << "\n"; });

    // answer
    Overrides answer_flags;
    auto* answer = app.add_subcommand("answer", "answer one question over one episode");
    answer_flags.add_to(answer, false);
    answer->add_option("--traj", traj_path, "trajectory JSON-lines")->required();
    answer->add_option("--episode", episode, "episode id (default: first)");
    answer->add_option("--question", question, "question text")->required();
    answer->callback([&] {
        const RunConfig cfg = answer_flags.resolve();
        const auto ts = read_trajectories(traj_path);
        const Trajectory& t = find_episode(ts, episode);
        EpisodeMemory memory(t, cfg);
        QAItem q;
        q.episode_id = t.episode_id;
        q.question = question;
        EvidencePack pack;
        const Answer a = answer_question(memory, cfg, q, &pack);
        for (const auto& l : pack.lines) std::cout << l.text << "\n";
        std::cout << "-- tokens=" << pack.token_cost << (pack.truncated ? " (truncated)" : "") << "\n";
        std::cout << "answer: " << a.text << "\n";
    });

    // run
    Overrides run_flags;
    auto* run = app.add_subcommand("run", "evaluate one configuration");
    run_flags.add_to(run, true);
    run->callback([&] {
        const RunConfig cfg = run_flags.resolve();
        const RunReport r = run_eval(cfg);
        std::cout << report_table(std::vector<RunReport>{r});
        std::cout << "config_hash=" << r.config_hash << "\n";
    });

    // ablate
    Overrides ablate_flags;
    auto* ablate = app.add_subcommand("ablate", "run the component x write-mode ablation grid");
    ablate_flags.add_to(ablate, true);
    ablate->callback([&] {
        const RunConfig cfg = ablate_flags.resolve();
        const auto reports = run_ablation_suite(cfg);
        std::cout << report_table(reports);
    });

    // convert-archive
    std::string in_path, episode_id = "archive";
    auto* convert = app.add_subcommand("convert-archive", "turn a timestamped archive into a pseudo-trajectory");
    convert->add_option("--in", in_path, "archive JSON-lines")->required();
    convert->add_option("--out", out, "trajectory JSON-lines")->required();
    convert->add_option("--episode-id", episode_id, "episode id of the result");
    convert->callback([&] {
        const auto items = read_archive(in_path);
        const Trajectory t = convert_archive_to_pseudo_trajectory(items, episode_id);
        write_trajectories(out, std::vector<Trajectory>{t});
        std::cout << "wrote " << t.steps.size() << " pseudo-steps to " << out << "\n";
    });

    // report
    std::vector<std::string> report_files;
    std::vector<std::string> paired;
    bool as_json = false;
    std::uint64_t boot_seed = 2026;
    auto* report = app.add_subcommand("report", "frontier table over reports, or a paired bootstrap of two runs");
    report->add_option("reports", report_files, "report JSON files");
    report->add_option("--paired", paired, "two per-question record files")->expected(2);
    report->add_option("--seed", boot_seed, "bootstrap seed");
    report->add_flag("--json", as_json, "emit JSON");
    report->callback([&] {
        if (!paired.empty()) {
            auto a = read_records(paired[0]);
            auto b = read_records(paired[1]);
            if (a.size() != b.size()) throw Error("record files differ in length");
            std::vector<int> ca, cb;
            for (std::size_t i = 0; i < a.size(); ++i) {
                if (a[i].qid != b[i].qid) throw Error("record files are not aligned at " + a[i].qid);
                ca.push_back(a[i].correct ? 1 : 0);
                cb.push_back(b[i].correct ? 1 : 0);
            }
            const auto d = paired_bootstrap(ca, cb, 2000, boot_seed);
            std::cout << "diff_center=" << d.center << " low=" << d.low << " high=" << d.high << "\n";
            return;
        }
        if (report_files.empty()) throw Error("report needs report files or --paired");
        std::vector<RunReport> reports;
        for (const auto& f : report_files) reports.push_back(report_from_json(slurp(f)));
        std::cout << (as_json ? frontier_json(reports) + "\n" : frontier_table(reports));
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
