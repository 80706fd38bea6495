#include "sasrl/env_gridworld.hpp"

#include <cmath>

namespace sasrl {

GridWorldExit::GridWorldExit(GridWorldConfig cfg, uint64_t seed) : cfg_(cfg), rng_(seed) {
    if (cfg_.side_length <= 0.0 || cfg_.move_limit <= 0.0)
        throw std::invalid_argument("gridworld: side_length and move_limit must be positive");
    reset();
}

Box GridWorldExit::action_box() const {
    double d = cfg_.move_limit;
    return {{-d, -d}, {d, d}};
}

Box GridWorldExit::state_box() const {
    double L = cfg_.side_length;
    return {{0.0, 0.0}, {L, L}};
}

void GridWorldExit::seed(uint64_t s) { rng_ = Rng(s); }

EnvState GridWorldExit::reset() {
    double L = cfg_.side_length;
    // uniform over the arena, rejecting starts inside the mine or exit discs
    for (int tries = 0; tries < 10000; ++tries) {
        Point2 p{rng_.uniform(0.0, L), rng_.uniform(0.0, L)};
        if (dist(p, cfg_.mine_pos) <= cfg_.mine_radius) continue;
        if (dist(p, cfg_.exit_pos) <= cfg_.exit_radius) continue;
        agent_ = p;
        return {{agent_.x, agent_.y}};
    }
    throw std::runtime_error("gridworld: could not place the agent; discs cover the arena");
}

ActionVec GridWorldExit::project_action(const ActionVec& a) const {
    if (a.width() != 2) throw std::invalid_argument("gridworld: action width must be 2");
    double d = cfg_.move_limit;
    double x = std::min(d, std::max(-d, a.values[0]));
    double y = std::min(d, std::max(-d, a.values[1]));
    double norm = std::sqrt(x * x + y * y);
    if (norm > d && norm > 0.0) {
        x *= d / norm;
        y *= d / norm;
    }
    return {{x, y}};
}

StepResult GridWorldExit::step(const ActionVec& raw) {
    ActionVec a = project_action(raw);
    double L = cfg_.side_length;
    Point2 from = agent_;
    Point2 to{std::min(L, std::max(0.0, from.x + a.values[0])),
              std::min(L, std::max(0.0, from.y + a.values[1]))};

    StepResult out;
    out.r = cfg_.time_penalty;

    // mine first, tested along the whole segment of motion
    if (auto t = segment_disc_hit(from, to, cfg_.mine_pos, cfg_.mine_radius)) {
        agent_ = {from.x + *t * (to.x - from.x), from.y + *t * (to.y - from.y)};
        out.r += cfg_.reward_mine;
        out.done = true;
        out.s_next = {{agent_.x, agent_.y}};
        return out;
    }
    agent_ = to;
    if (dist(agent_, cfg_.exit_pos) <= cfg_.exit_radius) {
        out.r += cfg_.reward_exit;
        out.done = true;
    }
    out.s_next = {{agent_.x, agent_.y}};
    return out;
}

std::vector<EnvState> GridWorldExit::feasible_candidates(const EnvState& s, int n) const {
    if (s.width() != 2) throw std::invalid_argument("gridworld: state width must be 2");
    double L = cfg_.side_length;
    double d = cfg_.move_limit;
    std::vector<EnvState> out;
    out.reserve(static_cast<size_t>(n));
    for (const Point2& p : unit_disc_pattern(n)) {
        double x = std::min(L, std::max(0.0, s.values[0] + d * p.x));
        double y = std::min(L, std::max(0.0, s.values[1] + d * p.y));
        out.push_back({{x, y}});
    }
    return out;
}

std::optional<ActionVec> GridWorldExit::inverse_action(const EnvState& s,
                                                       const EnvState& s_next) const {
    double dx = s_next.values[0] - s.values[0];
    double dy = s_next.values[1] - s.values[1];
    double d = cfg_.move_limit;
    if (std::sqrt(dx * dx + dy * dy) > d + 1e-9) return std::nullopt;
    return ActionVec{{dx, dy}};
}

}  // namespace sasrl
