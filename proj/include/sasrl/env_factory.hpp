#pragma once

#include <map>
#include <memory>
#include <string>

#include "sasrl/mmrp.hpp"

namespace sasrl {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Builds a simulator by name ("gridworld" | "berzerk" | "slot"). Overrides are
// flat config keys prefixed with the environment name, e.g. "grid.move_limit",
// "berzerk.robot_speed", "slot.spin_rate". Unknown keys raise ConfigError.
std::unique_ptr<Env> make_env(const std::string& name,
                              const std::map<std::string, std::string>& overrides = {},
                              uint64_t seed = 0);

}  // namespace sasrl
