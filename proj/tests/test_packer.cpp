#include "epimem/packer.hpp"
#include "epimem/retrieval.hpp"
#include "epimem/text.hpp"

#include "packer_oracle.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace epimem;

namespace {

std::vector<ScoredUnit> as_ranked(const MemoryStore& store, std::initializer_list<std::size_t> steps) {
    std::vector<ScoredUnit> out;
    for (auto s : steps) out.push_back(ScoredUnit{store.unit_at(s)});
    return out;
}

}  // namespace

TEST(Packer, EmptyRanked) {
    const auto pack = pack_evidence({}, AnchorResolution{}, AnchorTuple{}, 192);
    EXPECT_TRUE(pack.lines.empty());
    EXPECT_EQ(pack.token_cost, 0u);
}

TEST(Packer, BudgetMustBePositive) { EXPECT_ANY_THROW(pack_evidence({}, AnchorResolution{}, AnchorTuple{}, 0)); }

TEST(Packer, SingleAnchorHugeBudget) {
    const auto store = write_trajectory(epimem::testing::tiny_trajectory(), WriteMode::full);
    AnchorResolution res;
    res.decisive = {4};
    const auto pack = pack_evidence(as_ranked(store, {4}), res, AnchorTuple{}, kUnbounded);
    ASSERT_EQ(pack.lines.size(), 1u);
    EXPECT_EQ(pack.lines[0].step, 4u);
    EXPECT_EQ(pack.lines[0].text, "[4] collect at cell_4_0; events: gain_item(wood) |");
    EXPECT_EQ(pack.anchor_steps_included, (std::set<std::size_t>{4}));
}

TEST(Packer, RenderedLineCarriesDigest) {
    const auto store = write_trajectory(epimem::testing::tiny_trajectory(), WriteMode::full);
    AnchorTuple count_at;
    count_at.queried_field = QueriedField::count;
    count_at.target_step = 5;
    count_at.target_object = "table";
    EXPECT_EQ(render_pack_line(*store.unit_at(5), count_at),
              "[5] craft at cell_5_0; events: craft(table),gain_item(table) | inv=table:1 new=achievement:craft_table");
    EXPECT_EQ(render_pack_line(*store.unit_at(0), AnchorTuple{}), "[0] move_e at cell_0_0 |");
}

TEST(Packer, DegenerateBudgetTruncatesAnchor) {
    const auto store = write_trajectory(epimem::testing::tiny_trajectory(), WriteMode::full);
    AnchorResolution res;
    res.decisive = {5};
    const auto pack = pack_evidence(as_ranked(store, {5, 4}), res, AnchorTuple{}, 6);
    ASSERT_EQ(pack.lines.size(), 1u);
    EXPECT_TRUE(pack.truncated);
    EXPECT_LE(pack.token_cost, 6u);
    EXPECT_EQ(pack.lines[0].text.rfind("[5]", 0), 0u);
}

TEST(Packer, EventOnlyFallbackForTightCounts) {
    const auto store = write_trajectory(epimem::testing::tiny_trajectory(), WriteMode::full);
    AnchorTuple count;
    count.queried_field = QueriedField::count;
    count.trigger_event = "gain_item";
    count.target_object = "wood";
    AnchorResolution res;
    res.decisive = {1, 4};
    const auto ranked = as_ranked(store, {1, 4});
    const auto roomy = pack_evidence(ranked, res, count, 192);
    const std::size_t full_cost = roomy.token_cost;
    const auto tight = pack_evidence(ranked, res, count, full_cost - 1);
    EXPECT_EQ(tight.steps(), (std::vector<std::size_t>{1, 4}));
    EXPECT_LT(tight.token_cost, full_cost);
    EXPECT_EQ(tight.lines[1].text, "[4] events: gain_item(wood) |");
}

TEST(Packer, GreedyMatchesBruteForce) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 200; ++trial) {
        const auto inst = epimem::testing::random_pack_instance(rng);
        const auto greedy = greedy_select(inst.candidates, inst.budget);
        const auto got = score_selection(inst.candidates, greedy);
        const auto want = epimem::testing::brute_force_pack(inst);
        ASSERT_EQ(got.anchors, want.score.anchors) << "trial " << trial;
        ASSERT_DOUBLE_EQ(got.value, want.score.value) << "trial " << trial;
        std::size_t cost = 0;
        for (auto i : greedy) cost += inst.candidates[i].cost;
        ASSERT_LE(cost, inst.budget);
    }
}

TEST(Packer, AnchorTierMonotoneInBudget) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const auto inst = epimem::testing::random_pack_instance(rng);
        auto anchors_at = [&](std::size_t b) {
            std::set<std::size_t> out;
            for (auto i : greedy_select(inst.candidates, b)) {
                if (inst.candidates[i].tier == PackTier::anchor) out.insert(i);
            }
            return out;
        };
        for (std::size_t b = 1; b < 140; b += 7) {
            const auto small = anchors_at(b), large = anchors_at(b + 7);
            ASSERT_TRUE(std::includes(large.begin(), large.end(), small.begin(), small.end()));
        }
    }
}

TEST(Packer, BudgetSafetyAndAnchorFirstOnBenchmark) {
    const auto& d = epimem::testing::small_dataset("gridworld");
    RetrievalConfig cfg = retrieval_preset("gridworld");
    std::map<std::string, MemoryStore> stores;
    for (const auto& t : d.trajectories) stores.emplace(t.episode_id, write_trajectory(t, WriteMode::full));
    for (const auto& q : d.questions) {
        const auto& store = stores.at(q.episode_id);
        const auto anchors = extract_anchors(q.question);
        const auto r = retrieve(store, anchors, q.question, cfg);
        for (std::size_t budget : {12u, 48u, 96u, 192u}) {
            const auto pack = pack_evidence(r.ranked, r.resolution, anchors, budget);
            ASSERT_LE(pack.token_cost, budget) << q.qid;
            std::size_t cost = 0;
            for (const auto& l : pack.lines) cost += token_count(l.text);
            ASSERT_EQ(cost, pack.token_cost);
            ASSERT_TRUE(std::is_sorted(pack.lines.begin(), pack.lines.end(),
                                       [](const PackLine& a, const PackLine& b) { return a.step < b.step; }));
            const auto cands = classify_candidates(r.ranked, r.resolution, anchors);
            const bool anchor_fits = std::any_of(cands.begin(), cands.end(), [&](const PackCandidate& c) {
                return c.tier == PackTier::anchor && c.cost <= budget;
            });
            if (anchor_fits) {
                ASSERT_FALSE(pack.anchor_steps_included.empty()) << q.qid;
            }
        }
    }
}

TEST(NoCompress, OneFullLinePerRankedUnit) {
    const auto t = epimem::testing::tiny_trajectory();
    const auto store = write_trajectory(t, WriteMode::full);
    const auto ranked = as_ranked(store, {0, 1, 2, 3, 4});
    const auto raw = no_compress_interface(ranked, t);
    ASSERT_EQ(raw.lines.size(), 5u);
    EXPECT_EQ(raw.lines[2].text, serialize_step_plain(t.steps[2]));
    AnchorResolution res;
    res.decisive = {1};
    EXPECT_GE(raw.token_cost, pack_evidence(ranked, res, AnchorTuple{}, 192).token_cost);
}
