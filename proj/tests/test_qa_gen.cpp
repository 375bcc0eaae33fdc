#include "epimem/qa_gen.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace epimem;

namespace {

std::vector<std::size_t> steps_with(const Trajectory& t, const std::string& kind, const std::optional<std::string>& obj) {
    std::vector<std::size_t> out;
    for (const auto& s : t.steps) {
        for (const auto& e : s.events) {
            if (e.kind == kind && (!obj || e.object == *obj)) {
                out.push_back(s.index);
                break;
            }
        }
    }
    return out;
}

std::optional<std::size_t> pick(const std::vector<std::size_t>& v, const Occurrence& k) {
    if (v.empty()) return std::nullopt;
    if (k.last) return v.back();
    if (k.nth == 0 || k.nth > v.size()) return std::nullopt;
    return v[k.nth - 1];
}

// Gold answers recomputed from the generator's parameters by direct scans.
std::optional<std::string> oracle_gold(const Trajectory& t, const std::string& family, const AnchorTuple& p) {
    auto field_at = [&](std::size_t step) -> std::string {
        const Step& s = t.steps.at(step);
        if (p.queried_field == QueriedField::action) return s.action;
        if (p.queried_field == QueriedField::location) return s.location;
        return "?";
    };
    if (family == "step_lookup" || family == "spatial") return field_at(*p.target_step);
    if (family == "occurrence") return std::to_string(*pick(steps_with(t, *p.trigger_event, p.target_object), *p.occurrence));
    if (family == "counting") return std::to_string(steps_with(t, *p.trigger_event, p.target_object).size());
    if (family == "temporal_offset") {
        const auto anchor = *pick(steps_with(t, *p.trigger_event, p.target_object), *p.occurrence);
        return field_at(static_cast<std::size_t>(static_cast<long>(anchor) + *p.temporal_offset));
    }
    if (family == "state_query") {
        const auto& inv = t.steps.at(*p.target_step).inventory;
        auto it = inv.find(*p.target_object);
        return std::to_string(it == inv.end() ? 0 : it->second);
    }
    if (family == "temporal_interval") {
        const auto a = steps_with(t, *p.trigger_event, p.target_object).front();
        const auto b = steps_with(t, *p.second_event, p.second_object).front();
        return std::to_string(a > b ? a - b : b - a);
    }
    if (family == "adversarial") return std::string(kNotAnswerable);
    return std::nullopt;
}

}  // namespace

TEST(QaGen, FamilyRegistryOrder) {
    const auto& f = family_registry();
    ASSERT_EQ(f.size(), 12u);
    EXPECT_EQ(f.front(), "adversarial");
    EXPECT_EQ(f.back(), "step_lookup");
    EXPECT_TRUE(is_family("temporal_offset"));
    EXPECT_FALSE(is_family("poetry"));
}

TEST(QaGen, OffsetTemplateOnTinyTrajectory) {
    const Trajectory t = epimem::testing::tiny_trajectory();
    const auto gen = generate_with_params(t, 50, 1);
    bool seen = false;
    for (const auto& g : gen) {
        if (g.item.question == "What action was executed 2 steps after the 1st gain_item(wood)?") {
            seen = true;
            EXPECT_EQ(g.item.gold_answer, "move_s");
            EXPECT_EQ(g.item.gold_evidence_steps, (std::vector<std::size_t>{1, 3}));
        }
    }
    EXPECT_TRUE(seen);
}

TEST(QaGen, GoldMatchesScanOracle) {
    std::size_t checked = 0;
    for (const std::string env : {"gridworld", "textadv"}) {
        const auto& d = epimem::testing::small_dataset(env);
        for (const auto& t : d.trajectories) {
            for (const auto& g : generate_with_params(t, 3, 7)) {
                const auto want = oracle_gold(t, g.item.family, g.params);
                if (!want) continue;
                ++checked;
                EXPECT_EQ(g.item.gold_answer, *want) << g.item.qid << " " << g.item.question;
            }
        }
    }
    EXPECT_GT(checked, 200u);
}

TEST(QaGen, AdversarialReferencesAbsentObjects) {
    const auto& d = epimem::testing::small_dataset("gridworld");
    for (const auto& t : d.trajectories) {
        for (const auto& g : generate_with_params(t, 3, 7)) {
            if (g.item.family != "adversarial") continue;
            EXPECT_FALSE(g.item.answerable);
            EXPECT_EQ(g.item.gold_answer, kNotAnswerable);
            ASSERT_TRUE(g.params.target_object);
            const auto& decoys = decoy_objects();
            EXPECT_NE(std::find(decoys.begin(), decoys.end(), *g.params.target_object), decoys.end());
            for (const auto& s : t.steps) {
                for (const auto& e : s.events) EXPECT_NE(e.object, *g.params.target_object);
            }
        }
    }
}

TEST(QaGen, DeterministicAndUniqueIds) {
    const auto& t = epimem::testing::small_dataset("textadv").trajectories.front();
    const auto a = generate_questions(t, 3, 7);
    EXPECT_EQ(a, generate_questions(t, 3, 7));
    std::set<std::string> ids, texts;
    for (const auto& q : a) {
        EXPECT_TRUE(ids.insert(q.qid).second);
        EXPECT_TRUE(texts.insert(q.question).second);
        EXPECT_TRUE(std::is_sorted(q.gold_evidence_steps.begin(), q.gold_evidence_steps.end()));
    }
    EXPECT_NE(a, generate_questions(t, 3, 8));
}

TEST(QaGen, ShortTrajectorySkipsFamilies) {
    Trajectory t = epimem::testing::tiny_trajectory();
    t.steps.resize(1);
    GenerationLog log;
    generate_questions(t, 2, 1, &log);
    EXPECT_FALSE(log.skipped.empty());
    const bool offset_skipped = std::any_of(log.skipped.begin(), log.skipped.end(),
                                            [](const std::string& s) { return s.rfind("temporal_offset", 0) == 0; });
    EXPECT_TRUE(offset_skipped);
}

TEST(QaGen, FilterInvalidIdentityOnValid) {
    const auto& t = epimem::testing::small_dataset("gridworld").trajectories.front();
    const auto qs = generate_questions(t, 3, 7);
    EXPECT_EQ(filter_invalid(qs, t), qs);
}

TEST(QaGen, FilterInvalidMatchesRangeOracle) {
    const auto& t = epimem::testing::small_dataset("gridworld").trajectories.front();
    const auto base = generate_questions(t, 3, 7);
    std::mt19937_64 rng(3);
    std::vector<QAItem> fuzzed;
    for (auto q : base) {
        if (rng() % 3 == 0 && !q.gold_evidence_steps.empty()) {
            q.gold_evidence_steps.back() = t.steps.size() + rng() % 3;
        }
        fuzzed.push_back(q);
    }
    std::vector<QAItem> oracle;
    for (const auto& q : fuzzed) {
        if (std::all_of(q.gold_evidence_steps.begin(), q.gold_evidence_steps.end(),
                        [&](std::size_t s) { return s < t.steps.size(); })) {
            oracle.push_back(q);
        }
    }
    EXPECT_LT(oracle.size(), fuzzed.size());
    EXPECT_EQ(filter_invalid(fuzzed, t), oracle);
}

TEST(QaGen, JsonRoundTrip) {
    const auto& t = epimem::testing::small_dataset("textadv").trajectories.front();
    for (const auto& q : generate_questions(t, 1, 7)) EXPECT_EQ(qa_from_json_line(qa_to_json_line(q)), q);
}
