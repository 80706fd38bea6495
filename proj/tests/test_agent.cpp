#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sasrl/agent.hpp"
#include "sasrl/env_gridworld.hpp"
#include "sasrl/env_slot.hpp"
#include "sasrl/transition_model.hpp"

using namespace sasrl;

namespace {

// Deterministic chain s0 -> s1 -> ... -> terminal, states encoded as scalars.
struct Chain {
    Vec states;    // scalar encodings, one per node
    Vec rewards;   // reward of the transition leaving node i
    double gamma;

    std::function<Vec(const Vec&)> successor_policy() const {
        return [this](const Vec& s) {
            size_t node = nearest(s[0]);
            size_t next = std::min(node + 1, states.size() - 1);
            return Vec{states[next]};
        };
    }

    size_t nearest(double value) const {
        size_t best = 0;
        for (size_t i = 1; i < states.size(); ++i)
            if (std::abs(states[i] - value) < std::abs(states[best] - value)) best = i;
        return best;
    }

    // Fixed point of the recursion, iterated to 1e-10: phi[i] is the value of
    // the transition leaving node i.
    Vec fixed_point() const {
        Vec phi(states.size() - 1, 0.0);
        while (true) {
            double worst = 0.0;
            for (size_t i = 0; i + 1 < states.size(); ++i) {
                double next = i + 2 < states.size() ? rewards[i] + gamma * phi[i + 1] : rewards[i];
                worst = std::max(worst, std::abs(next - phi[i]));
                phi[i] = next;
            }
            if (worst < 1e-10) break;
        }
        return phi;
    }

    std::vector<TransitionSample> transitions() const {
        std::vector<TransitionSample> out;
        for (size_t i = 0; i + 1 < states.size(); ++i) {
            TransitionSample t;
            t.s.values = {states[i]};
            t.s_next.values = {states[i + 1]};
            t.a.values = {0.0};
            t.r = rewards[i];
            t.done = i + 2 == states.size();
            out.push_back(t);
        }
        return out;
    }
};

}  // namespace

TEST_CASE("td_target: terminal samples cut the bootstrap") {
    Rng rng(1);
    StvCritic critic = make_stv_critic(1, 8, rng);
    auto policy = [](const Vec& s) { return s; };
    CHECK(td_target(3.5, EnvState{{0.2}}, true, policy, critic.target_net, 0.9) == 3.5);
}

TEST_CASE("td_target: zero discount returns the reward") {
    Rng rng(2);
    StvCritic critic = make_stv_critic(1, 8, rng);
    auto policy = [](const Vec& s) { return s; };
    CHECK(td_target(1.25, EnvState{{0.2}}, false, policy, critic.target_net, 0.0) ==
          doctest::Approx(1.25));
}

TEST_CASE("critic trained on a 3-state chain matches the tabular oracle") {
    Chain chain{{0.0, 0.5, 1.0}, {1.0, 2.0}, 0.9};
    Vec oracle = chain.fixed_point();
    CHECK(oracle[0] == doctest::Approx(2.8).epsilon(1e-9));
    CHECK(oracle[1] == doctest::Approx(2.0).epsilon(1e-9));

    Rng rng(3);
    StvCritic critic = make_stv_critic(1, 32, rng);
    AdamState opt(critic.net, 1e-3);
    GradientTape scratch = critic.net.make_tape();
    auto batch = chain.transitions();
    auto policy = chain.successor_policy();
    for (int step = 0; step < 4000; ++step) {
        critic_step(critic, opt, batch, policy, chain.gamma, scratch);
        soft_update(critic.net, critic.target_net, 0.05);
    }
    CHECK(stv_value(critic.net, {0.0}, {0.5}) == doctest::Approx(2.8).epsilon(0.01));
    CHECK(stv_value(critic.net, {0.5}, {1.0}) == doctest::Approx(2.0).epsilon(0.01));
}

TEST_CASE("critic_step: exact targets give zero loss and untouched parameters") {
    // zero critic + zero rewards + terminal samples: prediction == target == 0
    StvCritic critic;
    critic.net = Mlp({2, 8, 1}, Act::relu, Act::linear);
    critic.target_net = critic.net;
    AdamState opt(critic.net, 1e-3);
    GradientTape scratch = critic.net.make_tape();
    TransitionSample t;
    t.s.values = {0.3};
    t.s_next.values = {0.4};
    t.a.values = {0.0};
    t.r = 0.0;
    t.done = true;
    auto policy = [](const Vec& s) { return s; };
    double loss = critic_step(critic, opt, {t}, policy, 0.9, scratch);
    CHECK(loss == 0.0);
    for (const Vec& w : critic.net.weights)
        for (double x : w) CHECK(x == 0.0);
}

TEST_CASE("critic_step: single-sample loss matches the hand computation") {
    Rng rng(5);
    StvCritic critic = make_stv_critic(1, 8, rng);
    TransitionSample t;
    t.s.values = {0.2};
    t.s_next.values = {0.7};
    t.a.values = {0.0};
    t.r = 1.5;
    t.done = false;
    auto policy = [](const Vec& s) { return Vec{s[0] * 0.5}; };
    double gamma = 0.9;
    double pred = stv_value(critic.net, {0.2}, {0.7});
    double target = 1.5 + gamma * stv_value(critic.target_net, {0.7}, {0.35});
    double expected = (pred - target) * (pred - target);

    AdamState opt(critic.net, 1e-3);
    GradientTape scratch = critic.net.make_tape();
    double loss = critic_step(critic, opt, {t}, policy, gamma, scratch);
    CHECK(std::abs(loss - expected) < 1e-12);
}

TEST_CASE("critic_step: loss descends on a frozen batch") {
    Rng rng(6);
    StvCritic critic = make_stv_critic(2, 16, rng);
    AdamState opt(critic.net, 1e-3);
    GradientTape scratch = critic.net.make_tape();
    std::vector<TransitionSample> batch;
    for (int i = 0; i < 16; ++i) {
        TransitionSample t;
        t.s.values = {rng.unit(), rng.unit()};
        t.s_next.values = {rng.unit(), rng.unit()};
        t.a.values = {0.0};
        t.r = rng.uniform(-1.0, 1.0);
        t.done = true;  // pure regression onto the rewards
        batch.push_back(t);
    }
    auto policy = [](const Vec& s) { return s; };
    Vec losses;
    for (int step = 0; step < 600; ++step)
        losses.push_back(critic_step(critic, opt, batch, policy, 0.9, scratch));
    // after warm-up the loss should be monotone non-increasing within 5% windows
    for (size_t i = 100; i + 50 < losses.size(); i += 50)
        CHECK(losses[i + 50] <= losses[i] * 1.05);
    CHECK(losses.back() < losses.front());
}

TEST_CASE("actor_step: constant critic leaves the policy untouched") {
    Rng rng(7);
    Box box{{0.0}, {1.0}};
    NextStatePolicy policy = make_next_state_policy(box, 8, rng);
    Mlp before = policy.net;
    AdamState opt(policy.net, 1e-3);
    GradientTape scratch = policy.net.make_tape();
    CriticSlotGrad flat = [](const Vec&, const Vec& s_next) { return Vec(s_next.size(), 0.0); };
    actor_step(policy, opt, flat, identity_proposal(), {{0.1}, {0.5}, {0.9}}, scratch);
    for (size_t l = 0; l < before.weights.size(); ++l)
        CHECK(policy.net.weights[l] == before.weights[l]);
}

TEST_CASE("actor_step drives mu toward the analytic optimum of a frozen critic") {
    Rng rng(8);
    Box box{{0.0}, {1.0}};
    NextStatePolicy policy = make_next_state_policy(box, 32, rng);
    AdamState opt(policy.net, 3e-3);
    GradientTape scratch = policy.net.make_tape();
    const double c = 0.7;
    CriticSlotGrad grad = [c](const Vec&, const Vec& s_next) {
        return Vec{-2.0 * (s_next[0] - c)};  // d/ds' of -(s'-c)^2
    };
    std::vector<Vec> probes = {{0.05}, {0.25}, {0.5}, {0.75}, {0.95}};
    for (int step = 0; step < 4000; ++step)
        actor_step(policy, opt, grad, identity_proposal(), probes, scratch);
    for (const Vec& s : probes) {
        double mu = policy_next_state(policy.net, box, s)[0];
        CHECK(std::abs(mu - c) < 1e-2);
    }
}

TEST_CASE("actor gradient matches directional finite differences of mean Phi") {
    // 10 policy draws x 10 directions, tanh networks for smooth differences
    Rng rng(9);
    Box box{{0.0, 0.0}, {1.0, 1.0}};
    for (int draw = 0; draw < 10; ++draw) {
        NextStatePolicy policy;
        policy.net = Mlp({2, 8, 8, 2}, Act::tanh, Act::tanh);
        policy.net.init_uniform_fanin(rng);
        policy.target_net = policy.net;
        policy.state_box = box;

        Mlp critic({4, 8, 8, 1}, Act::tanh, Act::linear);
        critic.init_uniform_fanin(rng);

        std::vector<Vec> states;
        for (int i = 0; i < 4; ++i) states.push_back({rng.unit(), rng.unit()});

        GradientTape analytic = policy.net.make_tape();
        actor_gradient(policy, stv_slot_gradient(critic), identity_proposal(), states, analytic);

        auto objective = [&](const Mlp& net) {
            double total = 0.0;
            for (const Vec& s : states) {
                Vec mu = policy_next_state(net, box, s);
                total += stv_value(critic, s, mu);
            }
            return total / static_cast<double>(states.size());
        };

        GradientTape direction = policy.net.make_tape();
        double norm2 = 0.0;
        for (auto& layer : direction.dweights)
            for (double& x : layer) {
                x = rng.normal();
                norm2 += x * x;
            }
        for (auto& layer : direction.dbiases)
            for (double& x : layer) {
                x = rng.normal();
                norm2 += x * x;
            }
        double inv = 1.0 / std::sqrt(norm2);
        direction.scale(inv);

        double h = 1e-5;
        Mlp up = policy.net, down = policy.net;
        add_scaled(up, direction, h);
        add_scaled(down, direction, -h);
        double fd = (objective(up) - objective(down)) / (2.0 * h);
        double along = dot(analytic, direction);
        CHECK(std::abs(along - fd) / std::max({std::abs(fd), std::abs(along), 1e-8}) < 1e-3);
    }
}

TEST_CASE("soft_update is the exact affine formula") {
    Rng rng(10);
    Mlp online({2, 4, 1}, Act::relu, Act::linear);
    online.init_uniform_fanin(rng);
    Mlp target({2, 4, 1}, Act::relu, Act::linear);
    target.init_uniform_fanin(rng);

    SUBCASE("eps = 1 copies") {
        soft_update(online, target, 1.0);
        for (size_t l = 0; l < online.weights.size(); ++l)
            CHECK(target.weights[l] == online.weights[l]);
    }
    SUBCASE("eps = 0 leaves the target alone") {
        Mlp before = target;
        soft_update(online, target, 0.0);
        for (size_t l = 0; l < before.weights.size(); ++l)
            CHECK(target.weights[l] == before.weights[l]);
    }
    SUBCASE("interpolation is bit-exact") {
        Mlp before = target;
        double eps = 0.1;
        soft_update(online, target, eps);
        for (size_t l = 0; l < before.weights.size(); ++l)
            for (size_t i = 0; i < before.weights[l].size(); ++i) {
                double expect = eps * online.weights[l][i] + (1.0 - eps) * before.weights[l][i];
                CHECK(target.weights[l][i] == expect);  // identical expression, identical bits
            }
    }
    SUBCASE("scalar example: online 1, target 0, eps 0.1 gives 0.1") {
        Mlp one({1, 1}, Act::relu, Act::linear), zero({1, 1}, Act::relu, Act::linear);
        one.weights[0][0] = 1.0;
        soft_update(one, zero, 0.1);
        CHECK(zero.weights[0][0] == doctest::Approx(0.1));
    }
}

TEST_CASE("project_next_state: candidates map to themselves") {
    GridWorldExit env;
    env.seed(11);
    EnvState s = env.reset();
    auto cands = env.feasible_candidates(s, 64);
    EnvState projected = project_next_state(env, s, cands[10].values, 64);
    CHECK(projected.values == cands[10].values);
}

TEST_CASE("project_next_state: far targets land on the disc edge toward them") {
    GridWorldConfig cfg;
    GridWorldExit env(cfg);
    double d = cfg.move_limit;
    EnvState s{{0.3, 0.5}};
    Vec raw{0.3 + 3.0 * d, 0.5};  // 3d along +x
    EnvState projected = project_next_state(env, s, raw, 256);
    double spacing = 2.0 * d / std::sqrt(256.0);
    CHECK(std::abs(projected.values[0] - (0.3 + d)) < spacing);
    CHECK(std::abs(projected.values[1] - 0.5) < spacing);
}

TEST_CASE("project_next_state: n = 1 degenerates to the single candidate") {
    GridWorldExit env;
    env.seed(12);
    EnvState s = env.reset();
    EnvState projected = project_next_state(env, s, Vec{0.9, 0.9}, 1);
    CHECK(projected.values == s.values);
}

TEST_CASE("projection is idempotent") {
    GridWorldExit env;
    env.seed(13);
    EnvState s = env.reset();
    Rng rng(14);
    for (int i = 0; i < 20; ++i) {
        Vec raw{rng.unit(), rng.unit()};
        EnvState once = project_next_state(env, s, raw, 64);
        EnvState twice = project_next_state(env, s, once.values, 64);
        CHECK(twice.values == once.values);
    }
}

TEST_CASE("act: displacement environments recover the action directly") {
    GridWorldExit env;
    Rng rng(15);
    NextStatePolicy policy = make_next_state_policy(env.state_box(), 16, rng);
    SasrlConfig cfg;
    env.seed(16);
    EnvState s = env.reset();
    Rng noise(17);
    ActDecision d = act(policy, env, s, cfg, false, noise);
    REQUIRE(d.action.has_value());
    CHECK(d.action->values[0] == doctest::Approx(d.target.values[0] - s.values[0]));
    CHECK(d.action->values[1] == doctest::Approx(d.target.values[1] - s.values[1]));
}

TEST_CASE("act: slot decisions defer to the transition model") {
    SlotMachine env;
    Rng rng(18);
    NextStatePolicy policy = make_next_state_policy(env.state_box(), 16, rng);
    SasrlConfig cfg;
    env.seed(19);
    EnvState s = env.reset();
    Rng noise(20);
    ActDecision no_model = act(policy, env, s, cfg, false, noise);
    CHECK_FALSE(no_model.action.has_value());

    TransitionModel tmodel(env.state_box(), env.action_box(), LossKind::mse_continuous, 16, 1e-3,
                           21);
    ActDecision with_model = act(policy, env, s, cfg, false, noise, &tmodel);
    REQUIRE(with_model.action.has_value());
    CHECK(env.action_box().contains(with_model.action->values));
}

TEST_CASE("act: zero exploration noise equals greedy") {
    GridWorldExit env;
    Rng rng(22);
    NextStatePolicy policy = make_next_state_policy(env.state_box(), 16, rng);
    SasrlConfig cfg;
    cfg.explore_sigma_scale = 0.0;
    env.seed(23);
    EnvState s = env.reset();
    Rng noise_a(24), noise_b(24);
    ActDecision greedy = act(policy, env, s, cfg, false, noise_a);
    ActDecision zero_noise = act(policy, env, s, cfg, true, noise_b);
    CHECK(greedy.target.values == zero_noise.target.values);
}

TEST_CASE("policy raw output always lies inside the state box") {
    Rng rng(25);
    Box box{{0.0, -0.25}, {1.0, 1.0}};
    NextStatePolicy policy = make_next_state_policy(box, 16, rng);
    for (int i = 0; i < 50; ++i) {
        Vec s{rng.unit(), rng.uniform(-0.25, 1.0)};
        Vec raw = policy_next_state(policy.net, box, s);
        CHECK(box.contains(raw));
    }
}
