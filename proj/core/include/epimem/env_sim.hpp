#pragma once

#include "epimem/traj_model.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace epimem {

class KeyValueConfig;

struct GridWorldConfig {
    std::size_t width = 8;
    std::size_t height = 8;
    std::size_t n_object_sites = 10;
    std::size_t step_budget = 180;
    std::uint64_t seed = 1;
    std::string policy = "scripted_gather";  // valid_random | scripted_gather

    // Throws Error on an invalid configuration.
    void validate() const;
};

struct TextAdvConfig {
    std::size_t n_rooms = 6;
    std::size_t n_items = 5;
    std::size_t n_locked_doors = 2;
    std::size_t step_budget = 60;
    std::uint64_t seed = 1;
    std::string policy = "expert";  // valid_random | expert

    void validate() const;
};

struct Recipe {
    std::string product;
    std::map<std::string, std::int64_t> cost;
};

// Fixed crafting table, tried in order.
const std::vector<Recipe>& craft_recipes();

// Site type -> resource gained by "collect" at that site.
const std::map<std::string, std::string>& gridworld_site_resources();

// Label pools the simulators draw from (exposed for question vocabularies).
const std::vector<std::string>& textadv_room_names();
const std::vector<std::string>& textadv_item_names();
const std::vector<std::string>& textadv_door_colors();

std::string cell_label(std::size_t x, std::size_t y);

Trajectory simulate_gridworld(const GridWorldConfig& cfg);
Trajectory simulate_textadventure(const TextAdvConfig& cfg);

// Reads "gridworld.*" / "textadv.*" keys, keeping defaults for absent ones.
GridWorldConfig gridworld_config_from(const KeyValueConfig& kv);
TextAdvConfig textadv_config_from(const KeyValueConfig& kv);

}  // namespace epimem
