#include "epimem/env_sim.hpp"
#include "epimem/error.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace epimem;

namespace {

std::pair<std::size_t, std::size_t> cell_of(const std::string& label) {
    const auto a = label.find('_');
    const auto b = label.find('_', a + 1);
    return {std::stoul(label.substr(a + 1, b - a - 1)), std::stoul(label.substr(b + 1))};
}

// Replays a gridworld trajectory from its actions and events alone and
// checks that every recorded location and inventory follows.
void replay_gridworld(const Trajectory& t, const GridWorldConfig& cfg) {
    std::size_t x = cfg.width / 2, y = cfg.height / 2;
    std::map<std::string, std::int64_t> inv;
    for (const auto& s : t.steps) {
        if (s.action == "move_n" && y > 0) --y;
        if (s.action == "move_s" && y + 1 < cfg.height) ++y;
        if (s.action == "move_e" && x + 1 < cfg.width) ++x;
        if (s.action == "move_w" && x > 0) --x;
        for (const auto& e : s.events) {
            if (e.kind == "gain_item" && s.action == "collect") ++inv[e.object];
            if (e.kind == "craft") {
                const auto& recipes = craft_recipes();
                auto r = std::find_if(recipes.begin(), recipes.end(), [&](const Recipe& rc) { return rc.product == e.object; });
                ASSERT_NE(r, recipes.end());
                for (const auto& [item, n] : r->cost) {
                    inv[item] -= n;
                    ASSERT_GE(inv[item], 0) << "step " << s.index;
                    if (inv[item] == 0) inv.erase(item);
                }
                ++inv[e.object];
            }
        }
        ASSERT_EQ(cell_of(s.location), std::make_pair(x, y)) << "step " << s.index;
        ASSERT_EQ(s.inventory, inv) << "step " << s.index;
    }
}

}  // namespace

TEST(GridWorld, BudgetGivesExactLength) {
    GridWorldConfig cfg;
    cfg.step_budget = 10;
    EXPECT_EQ(simulate_gridworld(cfg).steps.size(), 10u);
}

TEST(GridWorld, Deterministic) {
    GridWorldConfig cfg;
    cfg.seed = 9;
    EXPECT_EQ(trajectory_to_json_line(simulate_gridworld(cfg)), trajectory_to_json_line(simulate_gridworld(cfg)));
}

TEST(GridWorld, ActionsFromFixedSet) {
    const std::set<std::string> allowed = {"move_n", "move_s", "move_e", "move_w", "collect", "craft"};
    for (const std::string policy : {"scripted_gather", "valid_random"}) {
        GridWorldConfig cfg;
        cfg.policy = policy;
        for (const auto& s : simulate_gridworld(cfg).steps) EXPECT_TRUE(allowed.contains(s.action)) << s.action;
    }
}

TEST(GridWorld, ReplayOracle) {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        GridWorldConfig cfg;
        cfg.seed = seed;
        cfg.policy = seed % 2 ? "scripted_gather" : "valid_random";
        replay_gridworld(simulate_gridworld(cfg), cfg);
    }
}

TEST(GridWorld, PoliciesDiffer) {
    GridWorldConfig a, b;
    b.policy = "valid_random";
    const auto ta = simulate_gridworld(a), tb = simulate_gridworld(b);
    std::size_t differ = 0;
    for (std::size_t i = 0; i < ta.steps.size(); ++i) differ += ta.steps[i].action != tb.steps[i].action;
    EXPECT_GT(differ, ta.steps.size() / 4);
    // The gather policy crafts at least once in a default-length episode.
    EXPECT_TRUE(std::any_of(ta.steps.begin(), ta.steps.end(), [](const Step& s) { return s.action == "craft"; }));
}

TEST(GridWorld, InvalidConfig) {
    GridWorldConfig cfg;
    cfg.width = 0;
    EXPECT_THROW(simulate_gridworld(cfg), Error);
    cfg = {};
    cfg.policy = "teleport";
    EXPECT_THROW(simulate_gridworld(cfg), Error);
}

TEST(TextAdv, SmallWorldMovesAlongEdges) {
    TextAdvConfig cfg;
    cfg.n_rooms = 2;
    cfg.n_locked_doors = 0;
    cfg.step_budget = 6;
    const auto t = simulate_textadventure(cfg);
    ASSERT_EQ(t.steps.size(), 6u);
    const auto& rooms = textadv_room_names();
    for (const auto& s : t.steps) {
        if (s.action.rfind("go ", 0) == 0) {
            const auto dest = s.action.substr(3);
            EXPECT_TRUE(dest == rooms[0] || dest == rooms[1]);
            EXPECT_EQ(s.location, dest);
        }
    }
}

TEST(TextAdv, DeterministicAndVerbsFromFixedSet) {
    TextAdvConfig cfg;
    cfg.seed = 4;
    const auto t = simulate_textadventure(cfg);
    EXPECT_EQ(t, simulate_textadventure(cfg));
    for (const auto& s : t.steps) {
        const auto verb = s.action.substr(0, s.action.find(' '));
        EXPECT_TRUE(verb == "go" || verb == "take" || verb == "unlock" || verb == "use") << s.action;
    }
}

TEST(TextAdv, UnlockOnlyAfterKeyGained) {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        TextAdvConfig cfg;
        cfg.seed = seed;
        cfg.policy = seed % 2 ? "expert" : "valid_random";
        std::set<std::string> keys;
        for (const auto& s : simulate_textadventure(cfg).steps) {
            for (const auto& e : s.events) {
                if (e.kind == "unlock") {
                    const auto color = e.object.substr(0, e.object.find('_'));
                    EXPECT_TRUE(keys.contains(color + "_key")) << "seed " << seed << " step " << s.index;
                }
            }
            for (const auto& e : s.events) {
                if (e.kind == "gain_item") keys.insert(e.object);
            }
        }
    }
}

TEST(TextAdv, ExpertUnlocksEveryDoor) {
    TextAdvConfig cfg;
    cfg.step_budget = 120;
    std::size_t unlocks = 0;
    for (const auto& s : simulate_textadventure(cfg).steps) {
        for (const auto& e : s.events) unlocks += e.kind == "unlock";
    }
    EXPECT_EQ(unlocks, cfg.n_locked_doors);
}
