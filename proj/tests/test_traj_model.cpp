#include "epimem/env_sim.hpp"
#include "epimem/error.hpp"
#include "epimem/traj_model.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>

using namespace epimem;
using epimem::testing::random_word;

namespace {

// Field-by-field parser for serialize_step_plain lines, independent of the
// serializer: splits on the fixed key markers in order.
struct ParsedLine {
    std::string step, action, loc, objs, inv, events, state, obs;
};

ParsedLine parse_plain(const std::string& line) {
    const std::vector<std::string> keys = {"step=", " action=", " loc=", " objs=", " inv=", " events=", " state=", " obs="};
    std::vector<std::size_t> at;
    std::size_t from = 0;
    for (const auto& k : keys) {
        const auto p = line.find(k, from);
        EXPECT_NE(p, std::string::npos) << k << " in " << line;
        at.push_back(p);
        from = p + k.size();
    }
    auto field = [&](std::size_t i) {
        const auto begin = at[i] + keys[i].size();
        const auto end = i + 1 < keys.size() ? at[i + 1] : line.size();
        return line.substr(begin, end - begin);
    };
    return {field(0), field(1), field(2), field(3), field(4), field(5), field(6), field(7)};
}

std::string comma_join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) out += (out.empty() ? "" : ",") + s;
    return out;
}

}  // namespace

TEST(Validate, EmptyTrajectory) {
    Trajectory t;
    const auto v = validate_trajectory(t);
    ASSERT_FALSE(v.ok());
    EXPECT_EQ(v.violations.front(), "steps nonempty");
}

TEST(Validate, IndexGap) {
    Trajectory t = epimem::testing::tiny_trajectory();
    t.steps.resize(3);
    t.steps[2].index = 3;
    const auto v = validate_trajectory(t);
    ASSERT_FALSE(v.ok());
    EXPECT_NE(std::find(v.violations.begin(), v.violations.end(), "gap at index 2"), v.violations.end());
}

TEST(Validate, UnknownEventKind) {
    Trajectory t = epimem::testing::tiny_trajectory();
    t.steps[0].events.insert(EventFact{"teleport", "x", ""});
    EXPECT_FALSE(validate_trajectory(t).ok());
}

TEST(Validate, SimulatorOutputIsValid) {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        GridWorldConfig g;
        g.seed = seed;
        EXPECT_TRUE(validate_trajectory(simulate_gridworld(g)).ok());
        TextAdvConfig a;
        a.seed = seed;
        a.policy = seed % 2 ? "expert" : "valid_random";
        EXPECT_TRUE(validate_trajectory(simulate_textadventure(a)).ok());
    }
}

TEST(Serialize, EmptyCollections) {
    Step s;
    s.index = 3;
    s.action = "wait";
    s.location = "hall";
    EXPECT_NE(serialize_step_plain(s).find("objs= inv= events= state="), std::string::npos);
}

TEST(Serialize, RandomStepsParseBack) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 300; ++trial) {
        Step s;
        s.index = rng() % 500;
        s.action = random_word(rng) + (trial % 2 ? " " + random_word(rng) : "");
        s.location = random_word(rng);
        s.observation = random_word(rng) + " " + random_word(rng);
        for (int i = rng() % 4; i > 0; --i) s.visible_objects.insert(random_word(rng));
        for (int i = rng() % 4; i > 0; --i) s.inventory[random_word(rng)] = static_cast<std::int64_t>(rng() % 9);
        for (int i = rng() % 3; i > 0; --i) s.events.insert(EventFact{"visit", random_word(rng), ""});
        for (int i = rng() % 3; i > 0; --i) s.state_facts.insert(random_word(rng) + ":" + random_word(rng));

        const ParsedLine p = parse_plain(serialize_step_plain(s));
        EXPECT_EQ(p.step, std::to_string(s.index));
        EXPECT_EQ(p.action, s.action);
        EXPECT_EQ(p.loc, s.location);
        EXPECT_EQ(p.objs, comma_join({s.visible_objects.begin(), s.visible_objects.end()}));
        std::vector<std::string> inv;
        for (const auto& [k, v] : s.inventory) inv.push_back(k + ":" + std::to_string(v));
        EXPECT_EQ(p.inv, comma_join(inv));
        std::vector<std::string> ev;
        for (const auto& e : s.events) ev.push_back(e.kind + "(" + e.object + ")");
        EXPECT_EQ(p.events, comma_join(ev));
        EXPECT_EQ(p.state, comma_join({s.state_facts.begin(), s.state_facts.end()}));
        EXPECT_EQ(p.obs, s.observation);
        EXPECT_EQ(serialize_step_plain(s), serialize_step_plain(Step(s)));
    }
}

TEST(Archive, Singleton) {
    const std::vector<ArchiveItem> items = {{"m1", 5, "email", "hello"}};
    const Trajectory t = convert_archive_to_pseudo_trajectory(items);
    ASSERT_EQ(t.steps.size(), 1u);
    EXPECT_EQ(t.steps[0].index, 0u);
    EXPECT_EQ(t.steps[0].action, "observe");
    EXPECT_EQ(t.steps[0].location, "email");
    EXPECT_TRUE(t.steps[0].events.contains(EventFact{"observe", "m1", ""}));
    EXPECT_TRUE(validate_trajectory(t).ok());
}

TEST(Archive, SortsByTime) {
    const std::vector<ArchiveItem> items = {{"c", 3, "email", "three"}, {"a", 1, "image", "one"}, {"b", 2, "video", "two"}};
    const Trajectory t = convert_archive_to_pseudo_trajectory(items);
    ASSERT_EQ(t.steps.size(), 3u);
    EXPECT_EQ(t.steps[0].observation, "one");
    EXPECT_EQ(t.steps[1].observation, "two");
    EXPECT_EQ(t.steps[2].observation, "three");
}

TEST(Archive, TieBreakMatchesStableSortOracle) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<ArchiveItem> items;
        for (int i = 0; i < 10; ++i) {
            items.push_back({"id" + std::to_string(rng() % 1000) + "_" + std::to_string(i),
                             static_cast<std::int64_t>(rng() % 6), "other", "body" + std::to_string(i)});
        }
        auto oracle = items;
        std::stable_sort(oracle.begin(), oracle.end(), [](const ArchiveItem& a, const ArchiveItem& b) {
            return a.timestamp != b.timestamp ? a.timestamp < b.timestamp : a.item_id < b.item_id;
        });
        std::shuffle(items.begin(), items.end(), rng);
        const Trajectory t = convert_archive_to_pseudo_trajectory(items);
        for (std::size_t i = 0; i < oracle.size(); ++i) ASSERT_EQ(t.steps[i].observation, oracle[i].body);
    }
}

TEST(Archive, DuplicateKeyRejected) {
    const std::vector<ArchiveItem> items = {{"a", 1, "email", "x"}, {"a", 1, "email", "y"}};
    EXPECT_THROW(convert_archive_to_pseudo_trajectory(items), Error);
}

TEST(JsonLines, TrajectoryRoundTrip) {
    GridWorldConfig g;
    g.step_budget = 30;
    const Trajectory t = simulate_gridworld(g);
    EXPECT_EQ(trajectory_from_json_line(trajectory_to_json_line(t)), t);

    const auto path = std::filesystem::temp_directory_path() / "epimem_traj_roundtrip.jsonl";
    const std::vector<Trajectory> ts = {t, epimem::testing::tiny_trajectory()};
    write_trajectories(path, ts);
    EXPECT_EQ(read_trajectories(path), ts);
    std::filesystem::remove(path);
}
