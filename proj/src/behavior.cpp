#include "sasrl/behavior.hpp"

#include <cmath>

namespace sasrl {

namespace {

// Displacement environments expose a square action box of half-width d.
std::vector<ActionVec> direction_set(double d, int directions, int magnitudes) {
    std::vector<ActionVec> actions;
    actions.reserve(static_cast<size_t>(directions) * magnitudes);
    for (int m = 1; m <= magnitudes; ++m) {
        double r = d * static_cast<double>(m) / magnitudes;
        for (int j = 0; j < directions; ++j) {
            double th = 2.0 * 3.141592653589793 * j / directions;
            actions.push_back({{r * std::cos(th), r * std::sin(th)}});
        }
    }
    return actions;
}

std::vector<ActionVec> timer_grid(const Box& box, int levels) {
    int reels = box.width();
    std::vector<ActionVec> actions;
    std::vector<int> combo(reels, 0);
    while (true) {
        ActionVec a;
        a.values.resize(reels);
        for (int r = 0; r < reels; ++r)
            a.values[r] = box.low[r] + (combo[r] + 0.5) / levels * (box.high[r] - box.low[r]);
        actions.push_back(std::move(a));
        int r = 0;
        while (r < reels) {
            if (++combo[r] < levels) break;
            combo[r] = 0;
            ++r;
        }
        if (r == reels) break;
    }
    return actions;
}

}  // namespace

std::vector<ActionVec> discrete_action_set(Granularity granularity, const Env& env) {
    if (granularity == Granularity::continuous) return {};
    bool displacement = env.action_width() == 2 && env.has_inverse_action();
    if (displacement) {
        double d = env.action_box().high[0];
        return granularity == Granularity::coarse ? direction_set(d, 8, 1)
                                                  : direction_set(d, 32, 4);
    }
    return timer_grid(env.action_box(), granularity == Granularity::coarse ? 4 : 16);
}

Policy behavior_policy(Granularity granularity, const Env& env, Rng& rng) {
    if (granularity == Granularity::continuous) {
        Box box = env.action_box();
        return [box, &rng](const EnvState&) {
            ActionVec a;
            a.values.resize(box.width());
            for (int i = 0; i < box.width(); ++i) a.values[i] = rng.uniform(box.low[i], box.high[i]);
            return a;
        };
    }
    auto actions = discrete_action_set(granularity, env);
    return [actions, &rng](const EnvState&) { return actions[rng.index(actions.size())]; };
}

}  // namespace sasrl
