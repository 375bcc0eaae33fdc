#include <benchmark/benchmark.h>

#include "epimem/anchor.hpp"
#include "epimem/harness.hpp"
#include "epimem/mem_write.hpp"
#include "epimem/packer.hpp"
#include "epimem/retrieval.hpp"

namespace {

using namespace epimem;

const char* const kQuestion = "How many times did gain_item(wood) happen?";

void BM_PackEvidence(benchmark::State& state) {
    const auto t = simulate_episode("gridworld", 1, "mixed");
    const auto store = write_trajectory(t, WriteMode::full);
    const auto anchors = extract_anchors(kQuestion);
    const auto r = retrieve(store, anchors, kQuestion, retrieval_preset("gridworld"));
    const auto budget = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(pack_evidence(r.ranked, r.resolution, anchors, budget));
}
BENCHMARK(BM_PackEvidence)->Arg(96)->Arg(192)->Arg(768);

void BM_NoCompress(benchmark::State& state) {
    const auto t = simulate_episode("gridworld", 1, "mixed");
    const auto store = write_trajectory(t, WriteMode::full);
    const auto anchors = extract_anchors(kQuestion);
    const auto r = retrieve(store, anchors, kQuestion, retrieval_preset("gridworld"));
    for (auto _ : state) benchmark::DoNotOptimize(no_compress_interface(r.ranked, t));
}
BENCHMARK(BM_NoCompress);

}  // namespace
