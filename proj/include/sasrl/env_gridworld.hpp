#pragma once

#include "sasrl/geometry.hpp"
#include "sasrl/mmrp.hpp"

namespace sasrl {

struct GridWorldConfig {
    double side_length = 1.0;
    double move_limit = 0.15;  // max per-step displacement norm
    Point2 mine_pos{0.5, 0.5};
    Point2 exit_pos{0.9, 0.9};
    double mine_radius = 0.1;
    double exit_radius = 0.1;
    double reward_mine = -10.0;
    double reward_exit = 10.0;
    double time_penalty = -0.1;
    int max_steps = 200;
    double gamma = 0.99;
};

// Continuous escape arena: the agent moves freely up to the displacement
// limit per step, dies on the mine disc and is rewarded for reaching the
// exit disc. State is the agent position.
class GridWorldExit : public Env {
public:
    explicit GridWorldExit(GridWorldConfig cfg = {}, uint64_t seed = 0);

    std::string name() const override { return "gridworld"; }
    int state_width() const override { return 2; }
    int action_width() const override { return 2; }
    Box action_box() const override;
    Box state_box() const override;
    double gamma() const override { return cfg_.gamma; }
    int max_episode_steps() const override { return cfg_.max_steps; }

    void seed(uint64_t s) override;
    EnvState reset() override;
    StepResult step(const ActionVec& a) override;

    ActionVec project_action(const ActionVec& a) const override;
    std::vector<EnvState> feasible_candidates(const EnvState& s, int n) const override;
    std::optional<ActionVec> inverse_action(const EnvState& s,
                                            const EnvState& s_next) const override;

    const GridWorldConfig& config() const { return cfg_; }

private:
    GridWorldConfig cfg_;
    Point2 agent_{0.0, 0.0};
    Rng rng_;
};

}  // namespace sasrl
