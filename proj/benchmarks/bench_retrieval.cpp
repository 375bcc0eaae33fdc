#include <benchmark/benchmark.h>

#include "epimem/anchor.hpp"
#include "epimem/harness.hpp"
#include "epimem/mem_write.hpp"
#include "epimem/retrieval.hpp"

namespace {

using namespace epimem;

const char* const kQuestion = "What action was executed 2 steps after the 1st gain_item(wood)?";

void BM_WriteTrajectory(benchmark::State& state) {
    const auto t = simulate_episode("gridworld", 1, "mixed");
    for (auto _ : state) benchmark::DoNotOptimize(write_trajectory(t, WriteMode::full));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(t.steps.size()));
}
BENCHMARK(BM_WriteTrajectory);

void BM_ExtractAnchors(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(extract_anchors(kQuestion));
}
BENCHMARK(BM_ExtractAnchors);

void BM_Retrieve(benchmark::State& state) {
    const auto t = simulate_episode("gridworld", 1, "mixed");
    const auto store = write_trajectory(t, WriteMode::full);
    const auto anchors = extract_anchors(kQuestion);
    auto cfg = retrieval_preset("gridworld");
    cfg.top_k = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(retrieve(store, anchors, kQuestion, cfg));
}
BENCHMARK(BM_Retrieve)->Arg(8)->Arg(32)->Arg(128);

}  // namespace
