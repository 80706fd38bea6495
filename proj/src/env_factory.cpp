#include "sasrl/env_factory.hpp"

#include <functional>

#include "sasrl/env_berzerk.hpp"
#include "sasrl/env_gridworld.hpp"
#include "sasrl/env_slot.hpp"

namespace sasrl {

namespace {

double to_double(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        double x = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for " + key + ": '" + value + "'");
    }
}

int to_int(const std::string& key, const std::string& value) {
    double x = to_double(key, value);
    return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("bad boolean value for " + key + ": '" + value + "'");
}

using Setter = std::function<void(const std::string& key, const std::string& value)>;

void apply_overrides(const std::map<std::string, std::string>& overrides,
                     const std::string& prefix, const std::map<std::string, Setter>& setters) {
    for (const auto& [key, value] : overrides) {
        if (key.rfind(prefix, 0) != 0) continue;
        std::string field = key.substr(prefix.size());
        auto it = setters.find(field);
        if (it == setters.end()) throw ConfigError("unknown environment config key: " + key);
        it->second(key, value);
    }
}

}  // namespace

std::unique_ptr<Env> make_env(const std::string& name,
                              const std::map<std::string, std::string>& overrides, uint64_t seed) {
    if (name == "gridworld") {
        GridWorldConfig cfg;
        std::map<std::string, Setter> setters = {
            {"side_length", [&](auto& k, auto& v) { cfg.side_length = to_double(k, v); }},
            {"move_limit", [&](auto& k, auto& v) { cfg.move_limit = to_double(k, v); }},
            {"mine_x", [&](auto& k, auto& v) { cfg.mine_pos.x = to_double(k, v); }},
            {"mine_y", [&](auto& k, auto& v) { cfg.mine_pos.y = to_double(k, v); }},
            {"exit_x", [&](auto& k, auto& v) { cfg.exit_pos.x = to_double(k, v); }},
            {"exit_y", [&](auto& k, auto& v) { cfg.exit_pos.y = to_double(k, v); }},
            {"mine_radius", [&](auto& k, auto& v) { cfg.mine_radius = to_double(k, v); }},
            {"exit_radius", [&](auto& k, auto& v) { cfg.exit_radius = to_double(k, v); }},
            {"reward_mine", [&](auto& k, auto& v) { cfg.reward_mine = to_double(k, v); }},
            {"reward_exit", [&](auto& k, auto& v) { cfg.reward_exit = to_double(k, v); }},
            {"time_penalty", [&](auto& k, auto& v) { cfg.time_penalty = to_double(k, v); }},
            {"max_steps", [&](auto& k, auto& v) { cfg.max_steps = to_int(k, v); }},
            {"gamma", [&](auto& k, auto& v) { cfg.gamma = to_double(k, v); }},
        };
        apply_overrides(overrides, "grid.", setters);
        return std::make_unique<GridWorldExit>(cfg, seed);
    }
    if (name == "berzerk") {
        BerzerkConfig cfg;
        std::map<std::string, Setter> setters = {
            {"side_length", [&](auto& k, auto& v) { cfg.side_length = to_double(k, v); }},
            {"move_limit", [&](auto& k, auto& v) { cfg.move_limit = to_double(k, v); }},
            {"robot_speed", [&](auto& k, auto& v) { cfg.robot_speed = to_double(k, v); }},
            {"robot_radius", [&](auto& k, auto& v) { cfg.robot_radius = to_double(k, v); }},
            {"exit_radius", [&](auto& k, auto& v) { cfg.exit_radius = to_double(k, v); }},
            {"exit_x", [&](auto& k, auto& v) { cfg.exit_pos.x = to_double(k, v); }},
            {"exit_y", [&](auto& k, auto& v) { cfg.exit_pos.y = to_double(k, v); }},
            {"reward_kill", [&](auto& k, auto& v) { cfg.reward_kill = to_double(k, v); }},
            {"reward_death", [&](auto& k, auto& v) { cfg.reward_death = to_double(k, v); }},
            {"reward_exit", [&](auto& k, auto& v) { cfg.reward_exit = to_double(k, v); }},
            {"time_penalty", [&](auto& k, auto& v) { cfg.time_penalty = to_double(k, v); }},
            {"max_steps", [&](auto& k, auto& v) { cfg.max_steps = to_int(k, v); }},
            {"gamma", [&](auto& k, auto& v) { cfg.gamma = to_double(k, v); }},
        };
        apply_overrides(overrides, "berzerk.", setters);
        return std::make_unique<BerzerkWorld>(cfg, seed);
    }
    if (name == "slot") {
        SlotConfig cfg;
        std::map<std::string, Setter> setters = {
            {"spin_rate", [&](auto& k, auto& v) { cfg.spin_rate = to_double(k, v); }},
            {"timer_min", [&](auto& k, auto& v) { cfg.timer_min = to_double(k, v); }},
            {"timer_max", [&](auto& k, auto& v) { cfg.timer_max = to_double(k, v); }},
            {"payout_two", [&](auto& k, auto& v) { cfg.payout_two = to_double(k, v); }},
            {"payout_three_0", [&](auto& k, auto& v) { cfg.payout_three[0] = to_double(k, v); }},
            {"payout_three_1", [&](auto& k, auto& v) { cfg.payout_three[1] = to_double(k, v); }},
            {"payout_three_2", [&](auto& k, auto& v) { cfg.payout_three[2] = to_double(k, v); }},
            {"payout_three_3", [&](auto& k, auto& v) { cfg.payout_three[3] = to_double(k, v); }},
            {"gamma", [&](auto& k, auto& v) { cfg.gamma = to_double(k, v); }},
            {"test_backdoor", [&](auto& k, auto& v) { cfg.test_backdoor = to_bool(k, v); }},
        };
        apply_overrides(overrides, "slot.", setters);
        return std::make_unique<SlotMachine>(cfg, seed);
    }
    throw ConfigError("unknown environment: " + name + " (expected gridworld|berzerk|slot)");
}

}  // namespace sasrl
