// Acceptance suite: one check per criterion, each printing a PASS/FAIL line.
// Run all with no arguments, or a single one with --criterion N.

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "oracles.hpp"
#include "sasrl/agent.hpp"
#include "sasrl/behavior.hpp"
#include "sasrl/ddpg.hpp"
#include "sasrl/env_factory.hpp"
#include "sasrl/env_gridworld.hpp"
#include "sasrl/env_slot.hpp"
#include "sasrl/harness.hpp"
#include "sasrl/occupancy.hpp"
#include "sasrl/transition_model.hpp"

using namespace sasrl;
namespace fs = std::filesystem;

namespace {

struct Check {
    bool ok = true;
    std::ostringstream detail;

    void expect(bool condition, const std::string& what) {
        if (!condition) {
            ok = false;
            detail << "    FAILED: " << what << "\n";
        }
    }
    void note(const std::string& what) { detail << "    " << what << "\n"; }
};

std::string artifacts_dir() {
    fs::path dir = "acceptance_artifacts";
    fs::create_directories(dir);
    return dir.string();
}

// ---------------------------------------------------------------------------
// criterion 1: gradient oracle suite
// ---------------------------------------------------------------------------

int probes_run = 0;

void check_param_and_input_gradients(Check& c, Rng& rng, const std::vector<int>& dims, Act hidden,
                                     Act out) {
    Mlp net(dims, hidden, out);
    net.init_uniform_fanin(rng);
    Vec x(dims.front());
    for (double& v : x) v = rng.uniform(-1.0, 1.0);
    Vec cot(dims.back());
    for (double& v : cot) v = rng.uniform(-1.0, 1.0);

    GradientTape tape = net.make_tape();
    net.backward(x, cot, tape);
    auto scalar = [&](const Mlp& m) {
        Vec y = oracles::straight_line_forward(m, x);
        double s = 0.0;
        for (size_t i = 0; i < y.size(); ++i) s += y[i] * cot[i];
        return s;
    };
    Vec fd = oracles::fd_param_gradient(net, scalar);
    double param_err = oracles::max_relative_error(oracles::flatten_tape(tape), fd);
    ++probes_run;
    Vec fd_in = oracles::fd_input_gradient(net, x, [&](const Mlp& m, const Vec& in) {
        Vec y = oracles::straight_line_forward(m, in);
        double s = 0.0;
        for (size_t i = 0; i < y.size(); ++i) s += y[i] * cot[i];
        return s;
    });
    double input_err = oracles::max_relative_error(tape.dinput, fd_in);
    ++probes_run;

    std::ostringstream shape;
    for (size_t i = 0; i < dims.size(); ++i) shape << (i ? "x" : "") << dims[i];
    c.expect(param_err < 1e-4, "parameter gradients for " + shape.str() +
                                   " exceed 1e-4 (got " + std::to_string(param_err) + ")");
    c.expect(input_err < 1e-4, "input gradients for " + shape.str() + " exceed 1e-4 (got " +
                                   std::to_string(input_err) + ")");
}

GradientTape random_direction(const Mlp& net, Rng& rng) {
    GradientTape dir = net.make_tape();
    double norm2 = 0.0;
    for (auto& layer : dir.dweights)
        for (double& v : layer) {
            v = rng.normal();
            norm2 += v * v;
        }
    for (auto& layer : dir.dbiases)
        for (double& v : layer) {
            v = rng.normal();
            norm2 += v * v;
        }
    dir.scale(1.0 / std::sqrt(norm2));
    return dir;
}

bool criterion_gradient_suite(Check& c) {
    Rng rng(20240811);
    // every input/output structure the project instantiates, at full width
    check_param_and_input_gradients(c, rng, {4, 64, 64, 1}, Act::relu, Act::linear);    // stv grid
    check_param_and_input_gradients(c, rng, {20, 64, 64, 1}, Act::relu, Act::linear);   // stv berzerk
    check_param_and_input_gradients(c, rng, {24, 64, 64, 1}, Act::relu, Act::linear);   // stv slot
    check_param_and_input_gradients(c, rng, {2, 64, 64, 2}, Act::relu, Act::tanh);      // policy grid
    check_param_and_input_gradients(c, rng, {10, 64, 64, 10}, Act::relu, Act::tanh);    // policy berzerk
    check_param_and_input_gradients(c, rng, {12, 64, 64, 12}, Act::relu, Act::tanh);    // policy slot
    check_param_and_input_gradients(c, rng, {4, 64, 64, 1}, Act::relu, Act::linear);    // sav grid
    check_param_and_input_gradients(c, rng, {15, 64, 64, 1}, Act::relu, Act::linear);   // sav slot
    check_param_and_input_gradients(c, rng, {24, 64, 64, 3}, Act::relu, Act::tanh);     // tmodel slot
    check_param_and_input_gradients(c, rng, {4, 64, 64, 2}, Act::relu, Act::tanh);      // tmodel grid
    check_param_and_input_gradients(c, rng, {6, 32, 16, 3}, Act::relu, Act::sigmoid);   // tmodel bce

    // chained directional probes for the actor update, sasRL slot-gradient path
    for (int probe = 0; probe < 50; ++probe) {
        Box box{{0.0, 0.0}, {1.0, 1.0}};
        NextStatePolicy policy;
        policy.net = Mlp({2, 16, 16, 2}, Act::relu, Act::tanh);
        policy.net.init_uniform_fanin(rng);
        policy.state_box = box;
        Mlp critic({4, 16, 16, 1}, Act::relu, Act::linear);
        critic.init_uniform_fanin(rng);
        std::vector<Vec> states;
        for (int i = 0; i < 4; ++i) states.push_back({rng.unit(), rng.unit()});

        GradientTape analytic = policy.net.make_tape();
        actor_gradient(policy, stv_slot_gradient(critic), identity_proposal(), states, analytic);
        auto objective = [&](const Mlp& net) {
            double total = 0.0;
            for (const Vec& s : states) total += stv_value(critic, s, policy_next_state(net, box, s));
            return total / static_cast<double>(states.size());
        };
        GradientTape dir = random_direction(policy.net, rng);
        double h = 1e-5;
        Mlp up = policy.net, down = policy.net;
        add_scaled(up, dir, h);
        add_scaled(down, dir, -h);
        double fd = (objective(up) - objective(down)) / (2.0 * h);
        double along = dot(analytic, dir);
        double err = std::abs(along - fd) / std::max({std::abs(fd), std::abs(along), 1e-8});
        ++probes_run;
        c.expect(err < 1e-3, "sasRL chained directional probe " + std::to_string(probe) +
                                 " exceeds 1e-3 (got " + std::to_string(err) + ")");
    }

    // chained directional probes for the DDPG action-slot path
    for (int probe = 0; probe < 50; ++probe) {
        Box box{{-0.15, -0.15}, {0.15, 0.15}};
        DdpgActor actor;
        actor.net = Mlp({2, 16, 16, 2}, Act::relu, Act::tanh);
        actor.net.init_uniform_fanin(rng);
        actor.action_box = box;
        Mlp critic({4, 16, 16, 1}, Act::relu, Act::linear);
        critic.init_uniform_fanin(rng);
        std::vector<Vec> states;
        for (int i = 0; i < 4; ++i) states.push_back({rng.unit(), rng.unit()});

        GradientTape analytic = actor.net.make_tape();
        {
            Vec cot(box.width(), 0.0);
            auto dq = sav_slot_gradient(critic);
            for (const Vec& s : states) {
                Vec raw = actor.net.forward(s);
                Vec a_hat(raw.size());
                for (size_t i = 0; i < raw.size(); ++i)
                    a_hat[i] = box.low[i] + 0.5 * (raw[i] + 1.0) * (box.high[i] - box.low[i]);
                Vec g = dq(s, a_hat);
                for (size_t i = 0; i < g.size(); ++i)
                    cot[i] = g[i] * 0.5 * (box.high[i] - box.low[i]);
                actor.net.backward(s, cot, analytic);
            }
            analytic.scale(1.0 / static_cast<double>(states.size()));
        }
        auto objective = [&](const Mlp& net) {
            double total = 0.0;
            for (const Vec& s : states)
                total += sav_value(critic, s, ddpg_action(net, box, s));
            return total / static_cast<double>(states.size());
        };
        GradientTape dir = random_direction(actor.net, rng);
        double h = 1e-5;
        Mlp up = actor.net, down = actor.net;
        add_scaled(up, dir, h);
        add_scaled(down, dir, -h);
        double fd = (objective(up) - objective(down)) / (2.0 * h);
        double along = dot(analytic, dir);
        double err = std::abs(along - fd) / std::max({std::abs(fd), std::abs(along), 1e-8});
        ++probes_run;
        c.expect(err < 1e-3, "ddpg chained directional probe " + std::to_string(probe) +
                                 " exceeds 1e-3 (got " + std::to_string(err) + ")");
    }

    // transition-model loss gradients (loss -> affine decode -> network)
    for (int probe = 0; probe < 20; ++probe) {
        Box state_box{{0.0, 0.0}, {1.0, 1.0}};
        Box action_box{{-0.15, -0.15}, {0.15, 0.15}};
        Mlp net({4, 16, 16, 2}, Act::relu, Act::tanh);
        net.init_uniform_fanin(rng);
        Vec input{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        Vec target{rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1)};
        auto decode = [&](const Vec& raw) {
            Vec a(raw.size());
            for (size_t i = 0; i < raw.size(); ++i)
                a[i] = action_box.low[i] +
                       0.5 * (raw[i] + 1.0) * (action_box.high[i] - action_box.low[i]);
            return a;
        };
        auto loss_of = [&](const Mlp& m) {
            return mse_loss(decode(oracles::straight_line_forward(m, input)), target).first;
        };
        GradientTape tape = net.make_tape();
        {
            auto [loss, grad] = mse_loss(decode(net.forward(input)), target);
            for (size_t i = 0; i < grad.size(); ++i)
                grad[i] *= 0.5 * (action_box.high[i] - action_box.low[i]);
            net.backward(input, grad, tape);
        }
        Vec fd = oracles::fd_param_gradient(net, loss_of);
        double err = oracles::max_relative_error(oracles::flatten_tape(tape), fd);
        ++probes_run;
        c.expect(err < 1e-4, "transition-model loss probe " + std::to_string(probe) +
                                 " exceeds 1e-4 (got " + std::to_string(err) + ")");
    }

    c.note("gradient probes run: " + std::to_string(probes_run));
    c.expect(probes_run >= 100, "fewer than 100 probes");
    return c.ok;
}

// ---------------------------------------------------------------------------
// criterion 2: tabular STV fixed point
// ---------------------------------------------------------------------------

bool criterion_tabular_fixed_point(Check& c) {
    const Vec states = {0.0, 0.25, 0.5, 0.75, 1.0};
    const Vec rewards = {1.0, -0.5, 2.0, 0.7};
    const double gamma = 0.9;

    // oracle: iterate the recursion to 1e-10
    Vec phi(4, 0.0);
    while (true) {
        double worst = 0.0;
        for (size_t i = 0; i < 4; ++i) {
            double next = i + 1 < 4 ? rewards[i] + gamma * phi[i + 1] : rewards[i];
            worst = std::max(worst, std::abs(next - phi[i]));
            phi[i] = next;
        }
        if (worst < 1e-10) break;
    }

    std::vector<TransitionSample> batch;
    for (size_t i = 0; i < 4; ++i) {
        TransitionSample t;
        t.s.values = {states[i]};
        t.s_next.values = {states[i + 1]};
        t.a.values = {0.0};
        t.r = rewards[i];
        t.done = i == 3;
        batch.push_back(t);
    }
    auto successor = [&](const Vec& s) {
        size_t best = 0;
        for (size_t i = 1; i < states.size(); ++i)
            if (std::abs(states[i] - s[0]) < std::abs(states[best] - s[0])) best = i;
        return Vec{states[std::min(best + 1, states.size() - 1)]};
    };

    Rng rng(77001);
    StvCritic critic = make_stv_critic(1, 64, rng);
    AdamState opt(critic.net, 1e-3);
    GradientTape scratch = critic.net.make_tape();
    long steps = 0;
    double worst_gap = 1e9;
    while (steps < 50000) {
        critic_step(critic, opt, batch, successor, gamma, scratch);
        soft_update(critic.net, critic.target_net, 0.05);
        ++steps;
        if (steps % 500 == 0) {
            worst_gap = 0.0;
            for (size_t i = 0; i < 4; ++i)
                worst_gap = std::max(
                    worst_gap, std::abs(stv_value(critic.net, {states[i]}, {states[i + 1]}) - phi[i]));
            if (worst_gap < 1e-2) break;
        }
    }
    c.note("fixed point reached within " + std::to_string(steps) + " critic steps, gap " +
           std::to_string(worst_gap));
    c.expect(worst_gap < 1e-2, "trained STV differs from the 1e-10 oracle by " +
                                   std::to_string(worst_gap) + " after 50k steps");
    return c.ok;
}

// ---------------------------------------------------------------------------
// criterion 3: synthetic actor optimum
// ---------------------------------------------------------------------------

bool criterion_actor_optimum(Check& c) {
    Rng rng(88002);
    Box box{{0.0}, {1.0}};
    NextStatePolicy policy = make_next_state_policy(box, 64, rng);
    AdamState opt(policy.net, 3e-3);
    GradientTape scratch = policy.net.make_tape();
    const double center = 0.7;
    CriticSlotGrad grad = [center](const Vec&, const Vec& s_next) {
        return Vec{-2.0 * (s_next[0] - center)};
    };
    std::vector<Vec> probes = {{0.05}, {0.2}, {0.35}, {0.5}, {0.65}, {0.8}, {0.95}};
    for (int step = 0; step < 5000; ++step)
        actor_step(policy, opt, grad, identity_proposal(), probes, scratch);
    double worst = 0.0;
    for (const Vec& s : probes)
        worst = std::max(worst, std::abs(policy_next_state(policy.net, box, s)[0] - center));
    c.note("worst |mu(s) - c| = " + std::to_string(worst));
    c.expect(worst < 1e-2, "actor missed the frozen-critic optimum by " + std::to_string(worst));
    return c.ok;
}

// ---------------------------------------------------------------------------
// criterion 4: k-estimator correctness
// ---------------------------------------------------------------------------

struct ThreeActionProcess {
    Discretizer state_disc{Box{{0.0}, {1.0}}, 10};
    Discretizer action_disc{Box{{0.0}, {1.0}}, 8};

    TransitionSample sample_for(double u) const {
        TransitionSample t;
        t.s.values = {0.05};
        if (u < 0.1) {
            t.a.values = {0.10};
            t.s_next.values = {0.35};
        } else if (u < 0.5) {
            t.a.values = {0.50};
            t.s_next.values = {0.35};
        } else {
            t.a.values = {0.90};
            t.s_next.values = {0.75};
        }
        return t;
    }

    double k_at(uint64_t w, uint64_t seed) const {
        Rng rng(seed);
        std::vector<TransitionSample> batch;
        batch.reserve(w);
        for (uint64_t i = 0; i < w; ++i) batch.push_back(sample_for(rng.unit()));
        OccupancyStats stats;
        accumulate(stats, batch, state_disc, action_disc);
        return estimate_k(stats, 5).k;
    }
};

bool criterion_k_estimator(Check& c) {
    ThreeActionProcess process;
    double k5 = process.k_at(100000, 4001);
    c.note("three-action example: k = " + std::to_string(k5));
    c.expect(std::abs(k5 - 5.0) < 0.25, "three-action k missed 5 +- 0.25");

    // symmetric two-state/two-action chain
    {
        Discretizer sd{Box{{0.0}, {1.0}}, 10};
        Discretizer ad{Box{{0.0}, {1.0}}, 8};
        Rng rng(4002);
        std::vector<TransitionSample> batch;
        double cells[2] = {0.25, 0.75};
        double current = cells[0];
        for (int i = 0; i < 100000; ++i) {
            int pick = static_cast<int>(rng.index(2));
            TransitionSample t;
            t.s.values = {current};
            t.a.values = {cells[pick]};
            t.s_next.values = {cells[pick]};
            batch.push_back(t);
            current = cells[pick];
        }
        OccupancyStats stats;
        accumulate(stats, batch, sd, ad);
        double k = estimate_k(stats, 5).k;
        c.note("symmetric chain: k = " + std::to_string(k));
        c.expect(std::abs(k - 1.0) < 0.05, "symmetric k missed 1 +- 0.05");
    }

    double previous = 1e18;
    for (uint64_t w : {1000ULL, 10000ULL, 100000ULL}) {
        double err = std::abs(process.k_at(w, 4003) - 5.0);
        c.note("W = " + std::to_string(w) + ": |k - 5| = " + std::to_string(err));
        c.expect(err < previous, "error did not shrink at W = " + std::to_string(w));
        previous = err;
    }
    return c.ok;
}

// ---------------------------------------------------------------------------
// criterion 5: efficient-training condition on the shipped environments
// ---------------------------------------------------------------------------

bool criterion_efficient_condition(Check& c) {
    for (const char* name : {"gridworld", "berzerk", "slot"}) {
        auto env = make_env(name, {}, 0);
        Discretizer state_disc(env->state_box(), 10);
        Discretizer action_disc(env->action_box(), 8);
        Rng behavior_rng(mix_seed(0xACCE55, std::hash<std::string>{}(name)));
        Policy behavior = behavior_policy(Granularity::continuous, *env, behavior_rng);
        OccupancyStats stats;
        uint64_t episode = 0;
        while (stats.total_steps < 200000) {
            RolloutResult ro =
                rollout(*env, behavior, env->max_episode_steps(), mix_seed(1234, episode++));
            accumulate(stats, ro.samples, state_disc, action_disc);
        }
        try {
            KEstimate est = estimate_k(stats, 5);
            c.note(std::string(name) + ": " + format_k_report(stats.total_steps, est));
            c.expect(est.k > 1.0, std::string(name) + " has k <= 1 (" + std::to_string(est.k) +
                                      ") under the uniform-random behavior policy");
        } catch (const NotEnoughDataError& e) {
            c.expect(false, std::string(name) + ": " + e.what());
        }
    }
    return c.ok;
}

// ---------------------------------------------------------------------------
// criterion 6: learning progress on the grid world
// ---------------------------------------------------------------------------

double random_policy_mean_return(Env& env, int episodes, uint64_t seed) {
    Rng rng(mix_seed(seed, 0xBA5E));
    Policy random = behavior_policy(Granularity::continuous, env, rng);
    double total = 0.0;
    for (int e = 0; e < episodes; ++e)
        total += rollout(env, random, env.max_episode_steps(), mix_seed(seed, 7000 + e))
                     .episode_return;
    return total / episodes;
}

bool criterion_grid_learning(Check& c) {
    RunConfig config;
    config.algo = Algo::sasrl;
    config.env_name = "gridworld";
    config.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    config.max_gradient_steps = 20000;
    config.workers = 2;
    config.log_trajectories = false;
    config.out_dir = artifacts_dir();
    config.run_id = "c6-sasrl-gridworld";
    ExperimentResult result = run_experiment(config);

    auto env = make_env("gridworld", {}, 0);
    double random_mean = random_policy_mean_return(*env, 100, 51);
    c.note("random-policy mean return: " + std::to_string(random_mean));

    int passing = 0;
    for (long seed : config.seeds) {
        LearningCurve curve = read_curve_csv(
            (fs::path(result.dir) / ("seed_" + std::to_string(seed) + ".csv")).string());
        double final_mean = curve.rows.empty() ? -1e18 : curve.rows.back().mean_return;
        bool ok = final_mean >= random_mean + 5.0;
        passing += ok ? 1 : 0;
        c.note("seed " + std::to_string(seed) + ": final mean " + std::to_string(final_mean) +
               (ok ? "  (pass)" : "  (below bar)"));
    }
    c.expect(passing >= 8, "only " + std::to_string(passing) +
                               "/10 seeds beat the random policy by 5 reward units");
    return c.ok;
}

// ---------------------------------------------------------------------------
// criterion 7: slot-machine comparison against DDPG
// ---------------------------------------------------------------------------

bool criterion_slot_comparison(Check& c) {
    auto run = [&](Algo algo, const std::string& id) {
        RunConfig config;
        config.algo = algo;
        config.env_name = "slot";
        config.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
        config.max_gradient_steps = 4000;
        config.workers = 2;
        config.log_trajectories = false;
        config.out_dir = artifacts_dir();
        config.run_id = id;
        return run_experiment(config);
    };
    ExperimentResult sas = run(Algo::sasrl, "c7-sasrl-slot");
    ExperimentResult ddpg = run(Algo::ddpg, "c7-ddpg-slot");
    double sas_plateau = plateau_return(sas.aggregate);
    double ddpg_plateau = plateau_return(ddpg.aggregate);
    c.note("sasRL plateau: " + std::to_string(sas_plateau));
    c.note("DDPG plateau:  " + std::to_string(ddpg_plateau));
    c.expect(sas_plateau >= ddpg_plateau, "sasRL plateau return fell below DDPG");
    return c.ok;
}

// ---------------------------------------------------------------------------
// criterion 8: transition-model replay accuracy
// ---------------------------------------------------------------------------

bool criterion_transition_replay(Check& c) {
    // slot machine: held-out display reproduction >= 90%
    {
        SlotConfig cfg;
        cfg.test_backdoor = true;
        SlotMachine env(cfg);
        Rng rng(9101);
        struct Rec {
            TransitionSample t;
            std::vector<int> offsets;
        };
        std::vector<Rec> data;
        for (int i = 0; i < 20000; ++i) {
            env.seed(rng.next());
            EnvState s = env.reset();
            Rec rec;
            rec.offsets = env.debug_offsets();
            ActionVec timers{{rng.unit(), rng.unit(), rng.unit()}};
            auto out = env.step(timers);
            rec.t = {s, out.s_next, timers, out.r, out.done};
            data.push_back(std::move(rec));
        }
        size_t split = 16000;
        ReplayBuffer buffer(split, 9102);
        for (size_t i = 0; i < split; ++i) buffer.push(data[i].t);
        TransitionModel model(env.state_box(), env.action_box(), LossKind::mse_continuous, 64,
                              3e-3, 9103);
        model.fit(buffer, 60, 128);
        int hits = 0, total = 0;
        for (size_t i = split; i < data.size(); ++i) {
            Vec timers = model.predict(data[i].t.s.values, data[i].t.s_next.values);
            SlotMachine probe(cfg);
            probe.debug_set_offsets(data[i].offsets);
            auto out = probe.step(ActionVec{timers});
            hits += out.s_next.values == data[i].t.s_next.values ? 1 : 0;
            ++total;
        }
        double rate = static_cast<double>(hits) / total;
        c.note("slot replay rate: " + std::to_string(rate));
        c.expect(rate >= 0.9, "slot replay rate below 90%");
    }

    // grid world: mean action error < 0.01 d against the analytic displacement
    {
        GridWorldExit env;
        Rng rng(9104);
        Policy random = [&rng](const EnvState&) {
            return ActionVec{{rng.uniform(-0.15, 0.15), rng.uniform(-0.15, 0.15)}};
        };
        std::vector<TransitionSample> samples;
        uint64_t episode = 0;
        while (samples.size() < 5000) {
            auto ro = rollout(env, random, 200, mix_seed(9105, episode++));
            for (const auto& t : ro.samples) {
                double dx = t.s_next.values[0] - t.s.values[0] - t.a.values[0];
                double dy = t.s_next.values[1] - t.s.values[1] - t.a.values[1];
                if (std::abs(dx) < 1e-12 && std::abs(dy) < 1e-12) samples.push_back(t);
            }
        }
        samples.resize(5000);
        std::vector<TransitionSample> train(samples.begin(), samples.begin() + 4000);
        std::vector<TransitionSample> held(samples.begin() + 4000, samples.end());
        ReplayBuffer buffer(train.size(), 9106);
        for (const auto& t : train) buffer.push(t);
        TransitionModel model(env.state_box(), env.action_box(), LossKind::mse_continuous, 64,
                              3e-3, 9107);
        model.fit(buffer, 400, 128);
        model.set_learning_rate(3e-4);
        model.fit(buffer, 200, 128);
        model.set_learning_rate(1e-4);
        model.fit(buffer, 200, 128);
        double mean_err = 0.0;
        for (const auto& t : held) {
            Vec a = model.predict(t.s.values, t.s_next.values);
            double dx = a[0] - (t.s_next.values[0] - t.s.values[0]);
            double dy = a[1] - (t.s_next.values[1] - t.s.values[1]);
            mean_err += std::sqrt(dx * dx + dy * dy);
        }
        mean_err /= static_cast<double>(held.size());
        c.note("grid mean action error: " + std::to_string(mean_err) + " (bar " +
               std::to_string(0.01 * env.config().move_limit) + ")");
        c.expect(mean_err < 0.01 * env.config().move_limit,
                 "grid transition-model error above 0.01 d");
    }
    return c.ok;
}

// ---------------------------------------------------------------------------
// criterion 9: action-granularity ablation direction
// ---------------------------------------------------------------------------

bool criterion_granularity(Check& c) {
    auto run = [&](Granularity g, const std::string& id) {
        RunConfig config;
        config.algo = Algo::sasrl;
        config.env_name = "gridworld";
        config.seeds = {1, 2, 3, 4, 5, 6};
        config.max_gradient_steps = 15000;
        config.workers = 2;
        config.log_trajectories = false;
        config.out_dir = artifacts_dir();
        config.run_id = id;
        config.learner.granularity = g;
        return run_experiment(config);
    };
    ExperimentResult continuous = run(Granularity::continuous, "c9-grid-continuous");
    ExperimentResult coarse = run(Granularity::coarse, "c9-grid-coarse");
    double cont_plateau = plateau_return(continuous.aggregate);
    double coarse_plateau = plateau_return(coarse.aggregate);
    c.note("continuous plateau: " + std::to_string(cont_plateau));
    c.note("coarse plateau:     " + std::to_string(coarse_plateau));
    c.expect(cont_plateau >= coarse_plateau,
             "continuous training data scored below the coarse variant");
    return c.ok;
}

// ---------------------------------------------------------------------------
// criterion 10: mechanical exactness
// ---------------------------------------------------------------------------

std::string file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

bool criterion_mechanical(Check& c) {
    // soft update is the exact affine expression
    {
        Rng rng(1111);
        Mlp online({3, 8, 2}, Act::relu, Act::linear);
        online.init_uniform_fanin(rng);
        Mlp target({3, 8, 2}, Act::relu, Act::linear);
        target.init_uniform_fanin(rng);
        Mlp before = target;
        double eps = 0.0078125;  // 2^-7
        soft_update(online, target, eps);
        bool exact = true;
        for (size_t l = 0; l < target.weights.size(); ++l) {
            for (size_t i = 0; i < target.weights[l].size(); ++i)
                exact = exact && target.weights[l][i] ==
                                     eps * online.weights[l][i] + (1.0 - eps) * before.weights[l][i];
            for (size_t i = 0; i < target.biases[l].size(); ++i)
                exact = exact && target.biases[l][i] ==
                                     eps * online.biases[l][i] + (1.0 - eps) * before.biases[l][i];
        }
        c.expect(exact, "soft update is not bit-exact");
    }

    // replay FIFO property against a reference deque model
    {
        ReplayBuffer buffer(32, 2222);
        std::vector<double> reference;
        Rng rng(2223);
        for (int i = 0; i < 500; ++i) {
            TransitionSample t;
            t.s.values = {rng.unit()};
            t.s_next.values = {rng.unit()};
            t.a.values = {rng.unit()};
            t.r = static_cast<double>(i);
            buffer.push(t);
            reference.push_back(t.r);
            if (reference.size() > 32) reference.erase(reference.begin());
            if (i % 97 == 0) {
                bool match = buffer.size() == reference.size();
                for (size_t j = 0; j < reference.size() && match; ++j)
                    match = buffer.contents()[j].r == reference[j];
                c.expect(match, "FIFO contents diverged from the reference at push " +
                                    std::to_string(i));
            }
        }
    }

    // seeded end-to-end determinism: byte-identical CSVs
    {
        auto run_once = [&](const std::string& id) {
            RunConfig config;
            config.env_name = "gridworld";
            config.seeds = {3};
            config.max_gradient_steps = 200;
            config.learner.prefill_samples = 300;
            config.learner.eval_interval = 100;
            config.learner.eval_episodes = 2;
            config.learner.hidden_width = 16;
            config.workers = 1;
            config.out_dir = artifacts_dir();
            config.run_id = id;
            return run_experiment(config);
        };
        ExperimentResult a = run_once("c10-det-a");
        ExperimentResult b = run_once("c10-det-b");
        for (const char* name : {"seed_3.csv", "aggregate.csv"})
            c.expect(file_bytes((fs::path(a.dir) / name).string()) ==
                         file_bytes((fs::path(b.dir) / name).string()),
                     std::string("rerun produced different ") + name);
    }
    return c.ok;
}

// ---------------------------------------------------------------------------

struct Criterion {
    int id;
    std::string summary;
    std::function<bool(Check&)> run;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> list = {
        {1, "gradient oracle suite (finite differences, 1e-4 / 1e-3)", criterion_gradient_suite},
        {2, "tabular STV fixed point within 1e-2", criterion_tabular_fixed_point},
        {3, "synthetic actor optimum mu(s) -> c within 1e-2", criterion_actor_optimum},
        {4, "k estimator: enumerable examples and error shrinkage", criterion_k_estimator},
        {5, "efficient-training condition k > 1 on shipped environments",
         criterion_efficient_condition},
        {6, "grid-world learning beats the random policy by 5 on 8/10 seeds",
         criterion_grid_learning},
        {7, "slot machine: sasRL plateau >= DDPG plateau", criterion_slot_comparison},
        {8, "transition-model replay accuracy (slot 90%, grid 0.01 d)",
         criterion_transition_replay},
        {9, "granularity ablation: continuous >= coarse on the grid world",
         criterion_granularity},
        {10, "mechanical exactness: soft update, FIFO, seeded determinism",
         criterion_mechanical},
    };
    return list;
}

}  // namespace

int main(int argc, char** argv) {
    int only = -1;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
        if (std::strcmp(argv[i], "--list") == 0) {
            for (const Criterion& cr : criteria())
                std::cout << cr.id << ": " << cr.summary << "\n";
            return 0;
        }
    }

    int failures = 0;
    for (const Criterion& cr : criteria()) {
        if (only > 0 && cr.id != only) continue;
        auto start = std::chrono::steady_clock::now();
        Check check;
        bool ok = false;
        try {
            ok = cr.run(check);
        } catch (const std::exception& e) {
            check.detail << "    exception: " << e.what() << "\n";
        }
        double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << cr.id << ": " << cr.summary
                  << " (" << std::fixed << std::setprecision(1) << seconds << "s)\n"
                  << check.detail.str();
        std::cout.flush();
        failures += ok ? 0 : 1;
    }
    if (only < 0)
        std::cout << (failures == 0 ? "all criteria passed\n"
                                    : std::to_string(failures) + " criterion(s) failed\n");
    return failures == 0 ? 0 : 1;
}
