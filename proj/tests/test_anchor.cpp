#include "epimem/anchor.hpp"
#include "epimem/qa_gen.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

using namespace epimem;

TEST(Anchor, OffsetTemplate) {
    const auto a = extract_anchors("What action was executed 2 steps after the 1st gain_item(wood)?");
    EXPECT_EQ(a.target_object, "wood");
    EXPECT_EQ(a.trigger_event, "gain_item");
    EXPECT_EQ(a.queried_field, QueriedField::action);
    EXPECT_EQ(a.occurrence, Occurrence::ordinal(1));
    EXPECT_EQ(a.temporal_offset, 2);
    EXPECT_FALSE(a.target_step);
}

TEST(Anchor, TargetStep) {
    const auto a = extract_anchors("Where was the agent at step 14?");
    EXPECT_EQ(a.queried_field, QueriedField::location);
    EXPECT_EQ(a.target_step, 14u);
    EXPECT_FALSE(a.trigger_event);
}

TEST(Anchor, OrdinalsAndBefore) {
    auto a = extract_anchors("Where was the agent 3 steps before the last visit(kitchen)?");
    EXPECT_EQ(a.occurrence, Occurrence::final_one());
    EXPECT_EQ(a.temporal_offset, -3);
    EXPECT_EQ(a.target_object, "kitchen");
    a = extract_anchors("At which step did the second unlock(red_door) happen?");
    EXPECT_EQ(a.occurrence, Occurrence::ordinal(2));
    EXPECT_EQ(a.queried_field, QueriedField::step);
}

TEST(Anchor, NoPatternIsAnswerabilityOnly) {
    const auto a = extract_anchors("Tell me a story about the weather");
    EXPECT_EQ(a.queried_field, QueriedField::answerability);
    EXPECT_TRUE(a.empty());
}

TEST(Anchor, InvertsEveryGeneratedTemplate) {
    std::size_t n = 0;
    for (const std::string env : {"gridworld", "textadv"}) {
        for (const auto& t : epimem::testing::small_dataset(env).trajectories) {
            for (const auto& g : generate_with_params(t, 3, 7)) {
                ++n;
                EXPECT_EQ(extract_anchors(g.item.question), g.params) << g.item.question;
            }
        }
    }
    EXPECT_GT(n, 300u);
}

TEST(Anchor, JsonFieldsPresent) {
    const auto j = anchors_to_json(extract_anchors("Where was the agent at step 3?"));
    EXPECT_NE(j.find("\"target_step\":3"), std::string::npos);
    EXPECT_NE(j.find("\"queried_field\":\"location\""), std::string::npos);
}
