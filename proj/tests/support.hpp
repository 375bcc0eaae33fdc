#pragma once

#include "epimem/harness.hpp"
#include "epimem/traj_model.hpp"

#include <random>
#include <string>
#include <vector>

namespace epimem::testing {

// Small hand-built trajectory: wood gained at steps 1 and 4, a visit at 2,
// a craft at 5.
inline Trajectory tiny_trajectory() {
    Trajectory t;
    t.episode_id = "tiny";
    t.env_kind = "gridworld";
    const std::vector<std::string> actions = {"move_e", "collect", "move_n", "move_s", "collect", "craft", "move_w"};
    std::map<std::string, std::int64_t> inv;
    std::set<std::string> facts;
    for (std::size_t i = 0; i < actions.size(); ++i) {
        Step s;
        s.index = i;
        s.action = actions[i];
        s.location = "cell_" + std::to_string(i) + "_0";
        s.visible_objects = {"tree"};
        if (actions[i] == "collect") {
            ++inv["wood"];
            s.events.insert(EventFact{"gain_item", "wood", ""});
            facts.insert("achievement:collect_wood");
        }
        if (i == 2) s.events.insert(EventFact{"visit", "cell_2_0", ""});
        if (actions[i] == "craft") {
            inv.erase("wood");
            ++inv["table"];
            s.events.insert(EventFact{"craft", "table", ""});
            s.events.insert(EventFact{"gain_item", "table", ""});
            facts.insert("achievement:craft_table");
        }
        s.inventory = inv;
        s.state_facts = facts;
        s.observation = "standing on grass";
        t.steps.push_back(s);
    }
    return t;
}

// Datasets are cached per process; simulation is the slow part of setup.
inline const Dataset& small_dataset(const std::string& env) {
    static std::map<std::string, Dataset> cache;
    auto it = cache.find(env);
    if (it == cache.end()) it = cache.emplace(env, build_dataset(env, SeedRange{1, 6}, "mixed", 3, 7)).first;
    return it->second;
}

inline std::string random_word(std::mt19937_64& rng, std::size_t max_len = 6) {
    static const std::string alphabet = "abcdefghijklmnopqrstuvwxyz0123456789";
    std::uniform_int_distribution<std::size_t> len(1, max_len);
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::string w;
    for (std::size_t n = len(rng); n > 0; --n) w += alphabet[pick(rng)];
    return w;
}

}  // namespace epimem::testing
