#pragma once

#include "sasrl/geometry.hpp"
#include "sasrl/mmrp.hpp"

namespace sasrl {

struct WallSegment {
    Point2 a, b;  // axis-aligned
};

// Closed patrol loop traversed at constant speed. Robots are Markov in their
// position: the next position follows from the nearest point on the loop.
struct PatrolLoop {
    std::vector<Point2> waypoints;  // closed polygon, traversed in order

    double perimeter() const;
    Point2 point_at(double arc) const;          // arc wraps modulo perimeter
    double nearest_arc(const Point2& p) const;  // arc of the closest loop point
};

struct BerzerkConfig {
    double side_length = 1.0;
    double move_limit = 0.15;
    std::vector<WallSegment> walls = {{{0.35, 0.0}, {0.35, 0.6}}, {{0.65, 0.4}, {0.65, 1.0}}};
    std::vector<PatrolLoop> patrol_loops = {
        {{{0.45, 0.20}, {0.55, 0.20}, {0.55, 0.80}, {0.45, 0.80}}},
        {{{0.72, 0.55}, {0.88, 0.55}, {0.88, 0.85}, {0.72, 0.85}}},
        {{{0.12, 0.62}, {0.28, 0.62}, {0.28, 0.88}, {0.12, 0.88}}},
    };
    double robot_speed = 0.05;   // arc length per step
    double robot_radius = 0.06;  // kill disc and collision disc
    Point2 exit_pos{0.95, 0.1};
    double exit_radius = 0.08;
    Point2 start_low{0.02, 0.02};
    Point2 start_high{0.30, 0.30};
    double reward_kill = 5.0;
    double reward_death = -10.0;
    double reward_exit = 10.0;
    double time_penalty = -0.1;
    double dead_sentinel = -0.25;  // dead robots are frozen at (sentinel, sentinel)
    int max_steps = 200;
    double gamma = 0.99;
};

// Maze arena with patrolling robots. Each step the agent moves (walls
// truncate the motion), fires one bullet along its direction of travel,
// then robots advance one patrol step. State is
// concat(agent, robot positions, exit).
class BerzerkWorld : public Env {
public:
    explicit BerzerkWorld(BerzerkConfig cfg = {}, uint64_t seed = 0);

    std::string name() const override { return "berzerk"; }
    int state_width() const override { return 2 + 2 * robot_count() + 2; }
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

    int robot_count() const { return static_cast<int>(cfg_.patrol_loops.size()); }
    const BerzerkConfig& config() const { return cfg_; }
    int alive_robots() const;

private:
    struct Robot {
        double arc = 0.0;
        bool alive = true;
    };

    EnvState snapshot() const;
    Point2 robot_pos(const Robot& r, int idx) const;
    // Truncates motion from -> to at the first wall contact.
    Point2 wall_truncate(const Point2& from, const Point2& to) const;

    BerzerkConfig cfg_;
    Point2 agent_{0.0, 0.0};
    std::vector<Robot> robots_;
    Rng rng_;
};

}  // namespace sasrl
