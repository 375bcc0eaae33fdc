#include "epimem/env_sim.hpp"

#include "epimem/config.hpp"
#include "epimem/error.hpp"
#include "epimem/text.hpp"
#include "rng.hpp"

#include <algorithm>
#include <deque>
#include <optional>
#include <sstream>
#include <utility>

namespace epimem {

using detail::Rng;

void GridWorldConfig::validate() const {
    if (width < 3 || height < 3) throw Error("gridworld: width and height must be >= 3");
    if (step_budget < 10) throw Error("gridworld: step_budget must be >= 10");
    if (n_object_sites == 0 || n_object_sites >= width * height) {
        throw Error("gridworld: n_object_sites must be in [1, width*height)");
    }
    if (policy != "valid_random" && policy != "scripted_gather") {
        throw Error("gridworld: unknown policy " + policy);
    }
}

void TextAdvConfig::validate() const {
    if (n_rooms < 2) throw Error("textadv: n_rooms must be >= 2");
    if (n_rooms > textadv_room_names().size()) throw Error("textadv: too many rooms");
    if (n_locked_doors > n_items) throw Error("textadv: n_locked_doors must be <= n_items");
    if (n_locked_doors > textadv_door_colors().size() || n_locked_doors + 1 > n_rooms) {
        throw Error("textadv: too many locked doors");
    }
    if (n_items - n_locked_doors > textadv_item_names().size()) throw Error("textadv: too many items");
    if (step_budget == 0) throw Error("textadv: step_budget must be >= 1");
    if (policy != "valid_random" && policy != "expert") throw Error("textadv: unknown policy " + policy);
}

const std::vector<Recipe>& craft_recipes() {
    static const std::vector<Recipe> recipes = {
        {"table", {{"wood", 2}}},
        {"wood_pickaxe", {{"wood", 1}, {"stone", 1}}},
        {"stone_sword", {{"wood", 1}, {"stone", 2}}},
        {"furnace", {{"stone", 3}, {"coal", 1}}},
    };
    return recipes;
}

const std::map<std::string, std::string>& gridworld_site_resources() {
    static const std::map<std::string, std::string> m = {
        {"tree", "wood"}, {"rock", "stone"}, {"coal_ore", "coal"}, {"iron_ore", "iron"}, {"bush", "sapling"}};
    return m;
}

const std::vector<std::string>& textadv_room_names() {
    static const std::vector<std::string> names = {"kitchen", "hall",    "library", "cellar",
                                                   "garden",  "attic",   "study",   "pantry",
                                                   "gallery", "chapel",  "armory",  "greenhouse"};
    return names;
}

const std::vector<std::string>& textadv_item_names() {
    static const std::vector<std::string> names = {"lamp", "rope", "coin", "map", "apple", "book", "torch", "gem"};
    return names;
}

const std::vector<std::string>& textadv_door_colors() {
    static const std::vector<std::string> colors = {"red", "blue", "green", "gold", "silver", "iron"};
    return colors;
}

std::string cell_label(std::size_t x, std::size_t y) {
    return "cell_" + std::to_string(x) + "_" + std::to_string(y);
}

// ----------------------------------------------------------------------------
// Gridworld

namespace {

struct GridState {
    std::size_t x = 0;
    std::size_t y = 0;
    std::map<std::string, std::int64_t> inventory;
    std::set<std::string> facts;
};

using Cell = std::pair<std::size_t, std::size_t>;

const std::vector<std::string>& grid_moves() {
    static const std::vector<std::string> moves = {"move_n", "move_s", "move_e", "move_w"};
    return moves;
}

std::optional<Cell> apply_move(const GridWorldConfig& cfg, Cell at, const std::string& move) {
    auto [x, y] = at;
    if (move == "move_n") {
        if (y == 0) return std::nullopt;
        return Cell{x, y - 1};
    }
    if (move == "move_s") {
        if (y + 1 >= cfg.height) return std::nullopt;
        return Cell{x, y + 1};
    }
    if (move == "move_e") {
        if (x + 1 >= cfg.width) return std::nullopt;
        return Cell{x + 1, y};
    }
    if (move == "move_w") {
        if (x == 0) return std::nullopt;
        return Cell{x - 1, y};
    }
    return std::nullopt;
}

bool affordable(const Recipe& r, const std::map<std::string, std::int64_t>& inv) {
    for (const auto& [item, n] : r.cost) {
        auto it = inv.find(item);
        if (it == inv.end() || it->second < n) return false;
    }
    return true;
}

// First affordable recipe whose product is not yet held, else the first
// affordable recipe at all.
const Recipe* pick_recipe(const std::map<std::string, std::int64_t>& inv, bool require_new) {
    const Recipe* fallback = nullptr;
    for (const auto& r : craft_recipes()) {
        if (!affordable(r, inv)) continue;
        if (!inv.contains(r.product)) return &r;
        if (!fallback) fallback = &r;
    }
    return require_new ? nullptr : fallback;
}

}  // namespace

Trajectory simulate_gridworld(const GridWorldConfig& cfg) {
    cfg.validate();
    Rng rng(detail::mix_seed(cfg.seed, 0x67726964ULL));

    std::map<Cell, std::string> sites;
    const Cell start{cfg.width / 2, cfg.height / 2};
    std::vector<std::string> types;
    for (const auto& [type, res] : gridworld_site_resources()) types.push_back(type);
    // Weighted so wood and stone dominate, as the recipes need them.
    const std::vector<std::string> weighted = {"tree", "tree", "tree", "rock", "rock",
                                               "rock", "coal_ore", "iron_ore", "bush"};
    while (sites.size() < cfg.n_object_sites) {
        Cell c{rng.below(cfg.width), rng.below(cfg.height)};
        if (c == start || sites.contains(c)) continue;
        std::string type;
        if (sites.empty()) {
            type = "tree";
        } else if (sites.size() == 1) {
            type = "rock";
        } else {
            type = weighted[rng.below(weighted.size())];
        }
        sites.emplace(c, type);
    }
    std::vector<Cell> site_cells;
    for (const auto& [c, type] : sites) site_cells.push_back(c);

    GridState st;
    st.x = start.first;
    st.y = start.second;

    std::optional<Cell> target;
    std::uint64_t quota = 0;

    Trajectory traj;
    traj.env_kind = "gridworld";
    traj.seed = cfg.seed;
    traj.episode_id = "gridworld_seed" + std::to_string(cfg.seed) + "_" + cfg.policy;

    for (std::size_t t = 0; t < cfg.step_budget; ++t) {
        const Cell here{st.x, st.y};
        auto site_it = sites.find(here);
        const bool on_site = site_it != sites.end();

        std::vector<std::string> valid;
        for (const auto& m : grid_moves()) {
            if (apply_move(cfg, here, m)) valid.push_back(m);
        }
        if (on_site) valid.push_back("collect");
        if (pick_recipe(st.inventory, false)) valid.push_back("craft");

        std::string action;
        if (cfg.policy == "valid_random") {
            action = valid[rng.below(valid.size())];
        } else {
            if (on_site && target && *target == here && quota > 0) {
                action = "collect";
                --quota;
            } else if (pick_recipe(st.inventory, true)) {
                action = "craft";
            } else {
                if (!target || *target == here) {
                    Cell next = here;
                    while (next == here) next = site_cells[rng.below(site_cells.size())];
                    target = next;
                    quota = 1 + rng.below(3);
                }
                if (rng.unit() < 0.1) {
                    std::vector<std::string> moves(valid.begin(), valid.end());
                    std::erase_if(moves, [](const std::string& a) { return a.rfind("move_", 0) != 0; });
                    action = moves[rng.below(moves.size())];
                } else if (target->first > st.x) {
                    action = "move_e";
                } else if (target->first < st.x) {
                    action = "move_w";
                } else if (target->second > st.y) {
                    action = "move_s";
                } else {
                    action = "move_n";
                }
            }
        }

        Step step;
        step.index = t;
        step.action = action;
        if (action.rfind("move_", 0) == 0) {
            if (auto next = apply_move(cfg, here, action)) {
                st.x = next->first;
                st.y = next->second;
                step.events.insert(EventFact{"visit", cell_label(st.x, st.y), ""});
            }
        } else if (action == "collect") {
            if (on_site) {
                const std::string& res = gridworld_site_resources().at(site_it->second);
                ++st.inventory[res];
                step.events.insert(EventFact{"gain_item", res, ""});
                st.facts.insert("achievement:collect_" + res);
            }
        } else if (action == "craft") {
            if (const Recipe* r = pick_recipe(st.inventory, false)) {
                for (const auto& [item, n] : r->cost) {
                    st.inventory[item] -= n;
                    if (st.inventory[item] == 0) st.inventory.erase(item);
                }
                ++st.inventory[r->product];
                step.events.insert(EventFact{"craft", r->product, ""});
                step.events.insert(EventFact{"gain_item", r->product, ""});
                st.facts.insert("achievement:craft_" + r->product);
            }
        }

        step.location = cell_label(st.x, st.y);
        for (const auto& [c, type] : sites) {
            const auto dx = c.first > st.x ? c.first - st.x : st.x - c.first;
            const auto dy = c.second > st.y ? c.second - st.y : st.y - c.second;
            if (dx <= 1 && dy <= 1) step.visible_objects.insert(type);
        }
        step.inventory = st.inventory;
        step.state_facts = st.facts;
        std::ostringstream obs;
        obs << "standing on " << (sites.contains({st.x, st.y}) ? sites.at({st.x, st.y}) : std::string("grass"))
            << "; nearby: ";
        if (step.visible_objects.empty()) {
            obs << "nothing";
        } else {
            obs << join(std::vector<std::string>(step.visible_objects.begin(), step.visible_objects.end()), ",");
        }
        step.observation = obs.str();
        traj.steps.push_back(std::move(step));
    }
    return traj;
}

// ----------------------------------------------------------------------------
// Text adventure

namespace {

struct Door {
    std::size_t a = 0;
    std::size_t b = 0;
    std::string name;  // empty for an always-open passage
    std::string key;
};

struct TextWorld {
    std::vector<std::string> rooms;
    std::vector<Door> edges;
    std::vector<std::set<std::string>> items;  // per room
};

TextWorld build_text_world(const TextAdvConfig& cfg, Rng& rng) {
    TextWorld w;
    w.rooms.assign(textadv_room_names().begin(), textadv_room_names().begin() + static_cast<long>(cfg.n_rooms));
    std::set<std::pair<std::size_t, std::size_t>> present;
    std::vector<std::size_t> tree_edges;
    for (std::size_t i = 1; i < cfg.n_rooms; ++i) {
        const std::size_t j = rng.below(i);
        w.edges.push_back(Door{j, i, "", ""});
        present.insert({j, i});
        tree_edges.push_back(w.edges.size() - 1);
    }
    const std::size_t extra = cfg.n_rooms / 3;
    for (std::size_t n = 0, guard = 0; n < extra && guard < 100; ++guard) {
        std::size_t a = rng.below(cfg.n_rooms);
        std::size_t b = rng.below(cfg.n_rooms);
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        if (present.contains({a, b})) continue;
        present.insert({a, b});
        w.edges.push_back(Door{a, b, "", ""});
        ++n;
    }
    // Lock a random subset of spanning-tree edges.
    for (std::size_t i = 0; i < cfg.n_locked_doors; ++i) {
        const std::size_t pick = i + rng.below(tree_edges.size() - i);
        std::swap(tree_edges[i], tree_edges[pick]);
        Door& d = w.edges[tree_edges[i]];
        d.name = textadv_door_colors()[i] + "_door";
        d.key = textadv_door_colors()[i] + "_key";
    }

    w.items.assign(cfg.n_rooms, {});
    // Place keys so every locked door is solvable from the start room.
    std::set<std::size_t> reachable{0};
    std::set<std::size_t> opened;
    auto expand = [&] {
        bool grew = true;
        while (grew) {
            grew = false;
            for (std::size_t e = 0; e < w.edges.size(); ++e) {
                const Door& d = w.edges[e];
                if (!d.name.empty() && !opened.contains(e)) continue;
                if (reachable.contains(d.a) != reachable.contains(d.b)) {
                    reachable.insert(d.a);
                    reachable.insert(d.b);
                    grew = true;
                }
            }
        }
    };
    expand();
    while (opened.size() < cfg.n_locked_doors) {
        std::vector<std::size_t> frontier;
        for (std::size_t e = 0; e < w.edges.size(); ++e) {
            const Door& d = w.edges[e];
            if (d.name.empty() || opened.contains(e)) continue;
            if (reachable.contains(d.a) || reachable.contains(d.b)) frontier.push_back(e);
        }
        if (frontier.empty()) {
            // Door entirely behind already-reachable rooms via open passages.
            for (std::size_t e = 0; e < w.edges.size(); ++e) {
                if (!w.edges[e].name.empty() && !opened.contains(e)) frontier.push_back(e);
            }
        }
        const std::size_t e = frontier[rng.below(frontier.size())];
        std::vector<std::size_t> rooms(reachable.begin(), reachable.end());
        w.items[rooms[rng.below(rooms.size())]].insert(w.edges[e].key);
        opened.insert(e);
        expand();
    }
    for (std::size_t i = 0; i < cfg.n_items - cfg.n_locked_doors; ++i) {
        w.items[rng.below(cfg.n_rooms)].insert(textadv_item_names()[i]);
    }
    return w;
}

struct TextState {
    std::size_t room = 0;
    std::map<std::string, std::int64_t> inventory;
    std::set<std::string> unlocked;  // door names
    std::set<std::string> facts;
};

bool passable(const Door& d, const TextState& st) { return d.name.empty() || st.unlocked.contains(d.name); }

std::vector<std::size_t> neighbors(const TextWorld& w, const TextState& st, std::size_t room) {
    std::vector<std::size_t> out;
    for (const auto& d : w.edges) {
        if (!passable(d, st)) continue;
        if (d.a == room) out.push_back(d.b);
        if (d.b == room) out.push_back(d.a);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<const Door*> locked_adjacent(const TextWorld& w, const TextState& st, std::size_t room) {
    std::vector<const Door*> out;
    for (const auto& d : w.edges) {
        if (d.name.empty() || st.unlocked.contains(d.name)) continue;
        if (d.a == room || d.b == room) out.push_back(&d);
    }
    std::sort(out.begin(), out.end(), [](const Door* a, const Door* b) { return a->name < b->name; });
    return out;
}

std::vector<std::string> valid_text_actions(const TextWorld& w, const TextState& st) {
    std::vector<std::string> out;
    for (auto r : neighbors(w, st, st.room)) out.push_back("go " + w.rooms[r]);
    for (const auto& item : w.items[st.room]) out.push_back("take " + item);
    for (const Door* d : locked_adjacent(w, st, st.room)) {
        if (st.inventory.contains(d->key)) out.push_back("unlock " + d->name);
    }
    for (const auto& [item, n] : st.inventory) out.push_back("use " + item);
    return out;
}

std::string expert_action(const TextWorld& w, const TextState& st, Rng& rng) {
    if (!w.items[st.room].empty()) return "take " + *w.items[st.room].begin();
    for (const Door* d : locked_adjacent(w, st, st.room)) {
        if (st.inventory.contains(d->key)) return "unlock " + d->name;
    }
    auto wanted = [&](std::size_t room) {
        if (!w.items[room].empty()) return true;
        for (const Door* d : locked_adjacent(w, st, room)) {
            if (st.inventory.contains(d->key)) return true;
        }
        return false;
    };
    // Breadth-first search for the nearest room worth visiting.
    std::vector<std::optional<std::size_t>> parent(w.rooms.size());
    std::vector<bool> seen(w.rooms.size(), false);
    std::deque<std::size_t> queue{st.room};
    seen[st.room] = true;
    std::optional<std::size_t> goal;
    while (!queue.empty()) {
        const auto r = queue.front();
        queue.pop_front();
        if (r != st.room && wanted(r)) {
            goal = r;
            break;
        }
        for (auto n : neighbors(w, st, r)) {
            if (seen[n]) continue;
            seen[n] = true;
            parent[n] = r;
            queue.push_back(n);
        }
    }
    if (goal) {
        std::size_t step = *goal;
        while (parent[step] && *parent[step] != st.room) step = *parent[step];
        return "go " + w.rooms[step];
    }
    if (!st.inventory.empty() && rng.unit() < 0.5) {
        auto it = st.inventory.begin();
        std::advance(it, static_cast<long>(rng.below(st.inventory.size())));
        return "use " + it->first;
    }
    const auto nb = neighbors(w, st, st.room);
    return "go " + w.rooms[nb[rng.below(nb.size())]];
}

}  // namespace

Trajectory simulate_textadventure(const TextAdvConfig& cfg) {
    cfg.validate();
    Rng rng(detail::mix_seed(cfg.seed, 0x74657874ULL));
    TextWorld world = build_text_world(cfg, rng);
    Rng policy_rng(detail::mix_seed(cfg.seed, cfg.policy == "expert" ? 1 : 2));

    TextState st;
    Trajectory traj;
    traj.env_kind = "textadventure";
    traj.seed = cfg.seed;
    traj.episode_id = "textadv_seed" + std::to_string(cfg.seed) + "_" + cfg.policy;

    auto room_index = [&](const std::string& name) {
        return static_cast<std::size_t>(std::find(world.rooms.begin(), world.rooms.end(), name) -
                                        world.rooms.begin());
    };

    for (std::size_t t = 0; t < cfg.step_budget; ++t) {
        std::string action;
        if (cfg.policy == "expert") {
            action = expert_action(world, st, policy_rng);
        } else {
            const auto valid = valid_text_actions(world, st);
            action = valid[policy_rng.below(valid.size())];
        }

        Step step;
        step.index = t;
        step.action = action;
        const auto space = action.find(' ');
        const std::string verb = action.substr(0, space);
        const std::string arg = action.substr(space + 1);
        if (verb == "go") {
            st.room = room_index(arg);
            step.events.insert(EventFact{"visit", arg, ""});
        } else if (verb == "take") {
            world.items[st.room].erase(arg);
            ++st.inventory[arg];
            step.events.insert(EventFact{"gain_item", arg, ""});
        } else if (verb == "unlock") {
            st.unlocked.insert(arg);
            step.events.insert(EventFact{"unlock", arg, ""});
            st.facts.insert(arg + ":unlocked");
        } else if (verb == "use") {
            step.events.insert(EventFact{"use_item", arg, ""});
            st.facts.insert(arg + ":used");
        }

        step.location = world.rooms[st.room];
        for (const auto& item : world.items[st.room]) step.visible_objects.insert(item);
        for (const auto& d : world.edges) {
            if (!d.name.empty() && (d.a == st.room || d.b == st.room)) step.visible_objects.insert(d.name);
        }
        step.inventory = st.inventory;
        step.state_facts = st.facts;
        std::vector<std::string> exits;
        for (auto r : neighbors(world, st, st.room)) exits.push_back(world.rooms[r]);
        std::ostringstream obs;
        obs << "You are in the " << step.location << ". You see ";
        if (step.visible_objects.empty()) {
            obs << "nothing";
        } else {
            obs << join(std::vector<std::string>(step.visible_objects.begin(), step.visible_objects.end()), ", ");
        }
        obs << ". Exits: " << join(exits, ", ") << ".";
        step.observation = obs.str();
        traj.steps.push_back(std::move(step));
    }
    return traj;
}

GridWorldConfig gridworld_config_from(const KeyValueConfig& kv) {
    GridWorldConfig c;
    c.width = kv.get_uint("gridworld.width", c.width);
    c.height = kv.get_uint("gridworld.height", c.height);
    c.n_object_sites = kv.get_uint("gridworld.n_object_sites", c.n_object_sites);
    c.step_budget = kv.get_uint("gridworld.step_budget", c.step_budget);
    c.seed = kv.get_uint("gridworld.seed", c.seed);
    c.policy = kv.get_string("gridworld.policy", c.policy);
    return c;
}

TextAdvConfig textadv_config_from(const KeyValueConfig& kv) {
    TextAdvConfig c;
    c.n_rooms = kv.get_uint("textadv.n_rooms", c.n_rooms);
    c.n_items = kv.get_uint("textadv.n_items", c.n_items);
    c.n_locked_doors = kv.get_uint("textadv.n_locked_doors", c.n_locked_doors);
    c.step_budget = kv.get_uint("textadv.step_budget", c.step_budget);
    c.seed = kv.get_uint("textadv.seed", c.seed);
    c.policy = kv.get_string("textadv.policy", c.policy);
    return c;
}

}  // namespace epimem
