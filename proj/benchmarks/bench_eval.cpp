#include <benchmark/benchmark.h>

#include "epimem/harness.hpp"

#include <string>

namespace {

using namespace epimem;

const Dataset& dataset(const std::string& env) {
    static const Dataset grid = build_dataset("gridworld", {1, 6}, "mixed", 3, 7);
    static const Dataset text = build_dataset("textadv", {1, 6}, "mixed", 3, 7);
    return env == "textadv" ? text : grid;
}

void run_method(benchmark::State& state, const std::string& env, const std::string& method) {
    KeyValueConfig kv;
    kv.set("env", env);
    kv.set("method", method);
    const auto cfg = RunConfig::from(kv);
    const auto& d = dataset(env);
    for (auto _ : state) benchmark::DoNotOptimize(evaluate(cfg, d));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(d.questions.size()));
}

void BM_BuildDataset(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(build_dataset("gridworld", {1, 2}, "mixed", 3, 7));
}
BENCHMARK(BM_BuildDataset);

BENCHMARK_CAPTURE(run_method, gridworld_s3mem, std::string("gridworld"), std::string("s3mem"));
BENCHMARK_CAPTURE(run_method, gridworld_vanilla_rag, std::string("gridworld"), std::string("vanilla_rag"));
BENCHMARK_CAPTURE(run_method, textadv_s3mem, std::string("textadv"), std::string("s3mem"));
BENCHMARK_CAPTURE(run_method, textadv_graph_noreader, std::string("textadv"), std::string("graph_noreader"));

}  // namespace
BENCHMARK_MAIN();
