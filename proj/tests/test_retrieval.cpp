#include "epimem/retrieval.hpp"
#include "epimem/text.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace epimem;

namespace {

// Trajectory with unlock(red_door) at steps 4, 9 and 15 and a long quiet
// stretch around step 9.
Trajectory unlock_trajectory() {
    Trajectory t;
    t.episode_id = "unlocks";
    t.env_kind = "textadventure";
    for (std::size_t i = 0; i < 24; ++i) {
        Step s;
        s.index = i;
        s.action = "go hall";
        s.location = "hall";
        s.observation = "quiet";
        if (i == 4 || i == 9 || i == 15) {
            s.action = "unlock red_door";
            s.events.insert(EventFact{"unlock", "red_door", ""});
        }
        t.steps.push_back(s);
    }
    return t;
}

std::vector<std::pair<std::size_t, double>> brute_force_text(const MemoryStore& store, const std::string& q,
                                                             std::size_t k) {
    const auto qt = word_tokens(q);
    std::vector<std::pair<std::size_t, double>> all;
    for (std::size_t i = 0; i < store.units().size(); ++i) {
        all.emplace_back(store.units()[i].step, token_f1(qt, store.text_tokens(i)));
    }
    std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (all.size() > k) all.resize(k);
    return all;
}

}  // namespace

TEST(TextCandidates, ZeroOverlapOrderedByStep) {
    const auto store = write_trajectory(epimem::testing::tiny_trajectory(), WriteMode::full);
    const auto c = text_candidates(store, "zzz qqq", 4);
    ASSERT_EQ(c.size(), 4u);
    for (std::size_t i = 0; i < c.size(); ++i) {
        EXPECT_EQ(c[i].unit->step, i);
        EXPECT_EQ(c[i].s_text, 0.0);
    }
}

TEST(TextCandidates, IdentityRanksFirst) {
    const auto store = write_trajectory(epimem::testing::tiny_trajectory(), WriteMode::full);
    const auto c = text_candidates(store, unit_text(store.units()[5]), 3);
    EXPECT_EQ(c[0].unit->step, 5u);
    EXPECT_DOUBLE_EQ(c[0].s_text, 1.0);
}

TEST(TextCandidates, MatchesBruteForceScorer) {
    const auto& d = epimem::testing::small_dataset("textadv");
    std::map<std::string, MemoryStore> stores;
    for (const auto& t : d.trajectories) stores.emplace(t.episode_id, write_trajectory(t, WriteMode::full));
    for (std::size_t i = 0; i < d.questions.size(); i += 3) {
        const auto& q = d.questions[i];
        const auto& store = stores.at(q.episode_id);
        const auto got = text_candidates(store, q.question, 16);
        const auto want = brute_force_text(store, q.question, 16);
        ASSERT_EQ(got.size(), want.size());
        for (std::size_t j = 0; j < got.size(); ++j) {
            ASSERT_EQ(got[j].unit->step, want[j].first) << q.question;
            ASSERT_DOUBLE_EQ(got[j].s_text, want[j].second);
            ASSERT_EQ(got[j].s_anchor, 0.0);
        }
    }
}

TEST(ResolveOccurrence, IndexingAndAbsence) {
    const auto store = write_trajectory(unlock_trajectory(), WriteMode::full);
    EXPECT_EQ(resolve_occurrence(store, "unlock", std::string("red_door"), Occurrence::ordinal(2)), 9u);
    EXPECT_EQ(resolve_occurrence(store, "unlock", std::nullopt, Occurrence::final_one()), 15u);
    EXPECT_FALSE(resolve_occurrence(store, "unlock", std::string("red_door"), Occurrence::ordinal(4)));
    EXPECT_FALSE(resolve_occurrence(store, "use_item", std::nullopt, Occurrence::ordinal(1)));
    EXPECT_FALSE(resolve_occurrence(store, "unlock", std::string("vault"), Occurrence::ordinal(1)));
}

TEST(ResolveOccurrence, LastIsScanMaximum) {
    for (const auto& t : epimem::testing::small_dataset("gridworld").trajectories) {
        const auto store = write_trajectory(t, WriteMode::full);
        std::map<std::string, std::size_t> last;
        for (const auto& s : t.steps) {
            for (const auto& e : s.events) last[e.kind + "/" + e.object] = s.index;
        }
        for (const auto& [key, step] : last) {
            const auto slash = key.find('/');
            EXPECT_EQ(resolve_occurrence(store, key.substr(0, slash), key.substr(slash + 1), Occurrence::final_one()), step);
        }
    }
}

TEST(Retrieve, NoAnchorsNoSeedIsTextOrder) {
    const auto store = write_trajectory(epimem::testing::tiny_trajectory(), WriteMode::full);
    RetrievalConfig cfg;
    cfg.seed_injection = false;
    cfg.top_k = 5;
    const std::string q = "collect wood near the tree";
    const auto r = retrieve(store, AnchorTuple{}, q, cfg);
    const auto t = text_candidates(store, q, 5);
    ASSERT_EQ(r.ranked.size(), t.size());
    for (std::size_t i = 0; i < t.size(); ++i) EXPECT_EQ(r.ranked[i].unit->step, t[i].unit->step);
}

TEST(Retrieve, SeedInjectsWindowAroundAnchor) {
    const auto store = write_trajectory(unlock_trajectory(), WriteMode::full);
    RetrievalConfig cfg;
    cfg.top_k = 2;
    const std::string q = "What action was executed 1 step after the 2nd unlock(red_door)?";
    const auto r = retrieve(store, extract_anchors(q), q, cfg);
    std::set<std::size_t> steps;
    for (const auto& s : r.ranked) steps.insert(s.unit->step);
    for (std::size_t s = 5; s <= 13; ++s) EXPECT_TRUE(steps.contains(s)) << s;
    EXPECT_TRUE(r.resolution.is_decisive(9));
    EXPECT_TRUE(r.resolution.is_decisive(10));
    EXPECT_EQ(r.resolution.primary, 9u);
}

TEST(Retrieve, DecisiveStepsAlwaysRanked) {
    for (const std::string env : {"gridworld", "textadv"}) {
        const auto& d = epimem::testing::small_dataset(env);
        const auto cfg = retrieval_preset(env);
        std::map<std::string, MemoryStore> stores;
        for (const auto& t : d.trajectories) stores.emplace(t.episode_id, write_trajectory(t, WriteMode::full));
        for (const auto& q : d.questions) {
            const auto r = retrieve(stores.at(q.episode_id), extract_anchors(q.question), q.question, cfg);
            std::set<std::size_t> steps;
            for (const auto& s : r.ranked) steps.insert(s.unit->step);
            for (auto s : r.resolution.decisive) ASSERT_TRUE(steps.contains(s)) << q.qid;
            for (auto s : q.gold_evidence_steps) ASSERT_TRUE(steps.contains(s)) << q.qid << " missing " << s;
        }
    }
}

TEST(Retrieve, RescoreOracle) {
    const auto& d = epimem::testing::small_dataset("gridworld");
    const auto cfg = retrieval_preset("gridworld");
    std::map<std::string, MemoryStore> stores;
    for (const auto& t : d.trajectories) stores.emplace(t.episode_id, write_trajectory(t, WriteMode::full));
    for (std::size_t i = 0; i < d.questions.size(); i += 2) {
        const auto& q = d.questions[i];
        const auto a = extract_anchors(q.question);
        const auto r = retrieve(stores.at(q.episode_id), a, q.question, cfg);
        const auto qt = word_tokens(q.question);
        std::set<std::string> covered;
        for (std::size_t j = 0; j < r.ranked.size(); ++j) {
            const auto& c = r.ranked[j];
            const MemoryUnit& u = *c.unit;
            ASSERT_NEAR(c.s_text, token_f1(qt, word_tokens(unit_text(u))), 1e-12);

            std::set<std::string> objs = u.objects;
            for (const auto& [item, n] : u.state.inventory) objs.insert(item);
            bool obj = false, ev = false;
            for (const auto& e : u.events) {
                objs.insert(e.object);
                ev = ev || e.kind == a.trigger_event || e.kind == a.second_event;
            }
            obj = (a.target_object && objs.contains(*a.target_object)) ||
                  (a.second_object && objs.contains(*a.second_object));
            const bool loc = !u.location.empty() && (u.location == a.target_object || u.location == a.second_object);
            const double anchor = obj + ev + loc + r.resolution.is_decisive(u.step);
            ASSERT_EQ(c.s_anchor, anchor) << q.qid << " step " << u.step;
            ASSERT_NEAR(c.total, c.s_text + cfg.lambda_a * c.s_anchor + cfg.lambda_c * c.s_chain, 1e-9);
            if (j > 0) {
                ASSERT_GE(r.ranked[j - 1].total, c.total);
            }
        }
    }
}

TEST(Retrieve, OrderInvariantUnderScaling) {
    const auto& d = epimem::testing::small_dataset("textadv");
    const auto& t = d.trajectories.front();
    const auto store = write_trajectory(t, WriteMode::full);
    RetrievalConfig cfg;
    for (const auto& q : d.questions) {
        if (q.episode_id != t.episode_id) continue;
        const auto a = extract_anchors(q.question);
        const auto r = retrieve(store, a, q.question, cfg);
        auto scaled = r.ranked;
        for (auto& s : scaled) s.s_text *= 3.0;
        RetrievalConfig cfg3 = cfg;
        cfg3.lambda_a *= 3.0;
        cfg3.lambda_c *= 3.0;
        const auto again = rerank(scaled, a, r.resolution, cfg3);
        ASSERT_EQ(again.size(), r.ranked.size());
        for (std::size_t i = 0; i < again.size(); ++i) ASSERT_EQ(again[i].unit->step, r.ranked[i].unit->step) << q.qid;
    }
}

TEST(RetrievalConfig, Validation) {
    RetrievalConfig cfg;
    cfg.top_k = 0;
    EXPECT_ANY_THROW(cfg.validate());
}
