#include "sasrl/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>

#include "sasrl/behavior.hpp"
#include "sasrl/ddpg.hpp"
#include "sasrl/transition_model.hpp"

namespace sasrl {

std::string algo_name(Algo a) { return a == Algo::sasrl ? "sasrl" : "ddpg"; }

Algo algo_from_name(const std::string& name) {
    if (name == "sasrl") return Algo::sasrl;
    if (name == "ddpg") return Algo::ddpg;
    throw std::invalid_argument("unknown algorithm: " + name + " (expected sasrl|ddpg)");
}

AlgoSpec describe_algo(Algo algo, const SasrlConfig& cfg) {
    AlgoSpec spec;
    spec.hyperparams = cfg;
    if (algo == Algo::sasrl) {
        spec.critic_input = "concat(state,next_state)";
        spec.actor_output = "next_state";
        spec.gradient_slot = "next_state";
    } else {
        spec.critic_input = "concat(state,action)";
        spec.actor_output = "action";
        spec.gradient_slot = "action";
    }
    return spec;
}

namespace {

struct SeedTags {
    // fixed tags so every stream is independent of loop scheduling
    static constexpr uint64_t net_init = 0x11;
    static constexpr uint64_t buffer = 0x22;
    static constexpr uint64_t behavior = 0x33;
    static constexpr uint64_t noise = 0x44;
    static constexpr uint64_t tmodel = 0x55;
    static constexpr uint64_t prefill_episode = 0x66;
    static constexpr uint64_t eval_episode = 0x77;
    static constexpr uint64_t collect_episode = 0x88;
};

uint64_t sub_seed(uint64_t seed, uint64_t tag, uint64_t counter) {
    return mix_seed(mix_seed(seed, tag), counter);
}

}  // namespace

TrainResult train_run(Env& env, Algo algo, const SasrlConfig& cfg, long max_gradient_steps,
                      uint64_t seed, const TrainOutputs& outputs) {
    cfg.validate();
    if (max_gradient_steps < 0) throw std::invalid_argument("max_gradient_steps must be >= 0");

    const int state_width = env.state_width();
    const Box state_box = env.state_box();
    const Box action_box = env.action_box();

    Rng init_rng(mix_seed(seed, SeedTags::net_init));
    Rng behavior_rng(mix_seed(seed, SeedTags::behavior));
    Rng noise_rng(mix_seed(seed, SeedTags::noise));
    ReplayBuffer buffer(cfg.buffer_capacity, mix_seed(seed, SeedTags::buffer));

    // networks and delayed copies
    StvCritic stv_critic;
    NextStatePolicy next_state_policy;
    SavCritic sav_critic;
    DdpgActor ddpg_actor;
    if (algo == Algo::sasrl) {
        stv_critic = make_stv_critic(state_width, cfg.hidden_width, init_rng);
        next_state_policy = make_next_state_policy(state_box, cfg.hidden_width, init_rng);
    } else {
        sav_critic = make_sav_critic(state_width, env.action_width(), cfg.hidden_width, init_rng);
        ddpg_actor = make_ddpg_actor(state_width, action_box, cfg.hidden_width, init_rng);
    }
    Mlp& critic_net = algo == Algo::sasrl ? stv_critic.net : sav_critic.net;
    Mlp& critic_target = algo == Algo::sasrl ? stv_critic.target_net : sav_critic.target_net;
    Mlp& actor_net = algo == Algo::sasrl ? next_state_policy.net : ddpg_actor.net;
    Mlp& actor_target = algo == Algo::sasrl ? next_state_policy.target_net : ddpg_actor.target_net;

    AdamState critic_opt(critic_net, cfg.critic_lr);
    AdamState actor_opt(actor_net, cfg.actor_lr);
    GradientTape critic_scratch = critic_net.make_tape();
    GradientTape actor_scratch = actor_net.make_tape();

    std::ofstream traj_log;
    if (!outputs.trajectory_log_path.empty()) {
        traj_log.open(outputs.trajectory_log_path);
        if (!traj_log)
            throw std::runtime_error("cannot open trajectory log: " + outputs.trajectory_log_path);
    }
    auto log_samples = [&](const std::vector<TransitionSample>& samples) {
        if (traj_log.is_open()) append_trajectory_log(traj_log, samples);
    };

    // The sasRL actor for environments with no analytic inverse action needs a
    // transition model at play time; it is fit on the buffer and refreshed at
    // every evaluation point.
    std::unique_ptr<TransitionModel> tmodel;
    if (algo == Algo::sasrl && !env.has_inverse_action())
        tmodel = std::make_unique<TransitionModel>(state_box, action_box,
                                                   LossKind::mse_continuous, cfg.hidden_width,
                                                   cfg.tmodel_lr, mix_seed(seed, SeedTags::tmodel));

    // behavior policy generating off-policy data
    Policy random_behavior = behavior_policy(cfg.granularity, env, behavior_rng);

    // initialize the replay buffer from the behavior policy
    long prefill_episode = 0;
    while (buffer.size() < static_cast<size_t>(cfg.prefill_samples)) {
        RolloutResult ro = rollout(env, random_behavior, env.max_episode_steps(),
                                   sub_seed(seed, SeedTags::prefill_episode, prefill_episode));
        ++prefill_episode;
        for (const TransitionSample& t : ro.samples) buffer.push(t);
        log_samples(ro.samples);
    }
    if (tmodel && buffer.size() > 0)
        tmodel->fit(buffer, cfg.tmodel_initial_epochs, cfg.tmodel_batch_size);

    // The next-state policy output always passes through the feasibility
    // mapping, in the TD bootstrap as much as at play time; bootstrapping on
    // raw out-of-range proposals would query the critic far off the data
    // manifold.
    auto target_policy_fn = [&](const Vec& s) {
        if (algo == Algo::sasrl) {
            Vec raw = policy_next_state(actor_target, state_box, s);
            return project_next_state(env, EnvState{s}, raw, cfg.projection_candidates).values;
        }
        return ddpg_action(actor_target, action_box, s);
    };

    auto greedy_action = [&](const EnvState& s) -> ActionVec {
        if (algo == Algo::ddpg) return {ddpg_action(actor_net, action_box, s.values)};
        ActDecision d = act(next_state_policy, env, s, cfg, false, noise_rng, tmodel.get());
        if (!d.action) throw std::runtime_error("sasrl act: no action path for this environment");
        return *d.action;
    };
    auto noisy_action = [&](const EnvState& s) -> ActionVec {
        if (algo == Algo::ddpg) {
            Vec a = ddpg_action(actor_net, action_box, s.values);
            for (size_t i = 0; i < a.size(); ++i) {
                double sigma =
                    cfg.explore_sigma_scale * 0.5 * (action_box.high[i] - action_box.low[i]);
                a[i] += noise_rng.normal(0.0, sigma);
            }
            return env.project_action({a});
        }
        ActDecision d = act(next_state_policy, env, s, cfg, true, noise_rng, tmodel.get());
        if (!d.action) throw std::runtime_error("sasrl act: no action path for this environment");
        return *d.action;
    };

    // Noisy-actor collection only applies when the behavior policy tracks the
    // actor and the run uses the continuous action space; granularity
    // ablations keep the discrete random behavior throughout.
    const bool collect_with_actor = cfg.behavior_policy == BehaviorMode::noisy_actor &&
                                    cfg.granularity == Granularity::continuous;

    TrainResult result;
    auto save_checkpoints = [&](const std::string& suffix) {
        if (outputs.checkpoint_prefix.empty()) return;
        std::string actor_path = outputs.checkpoint_prefix + suffix + ".actor";
        std::string critic_path = outputs.checkpoint_prefix + suffix + ".critic";
        save_mlp(actor_net, actor_path);
        save_mlp(critic_net, critic_path);
        result.checkpoint_files = {actor_path, critic_path};
        if (tmodel) {
            std::string tmodel_path = outputs.checkpoint_prefix + suffix + ".tmodel";
            tmodel->save(tmodel_path);
            result.checkpoint_files.push_back(tmodel_path);
        }
    };

    double best_eval = -std::numeric_limits<double>::infinity();
    int evals_since_improvement = 0;
    long eval_index = 0;

    try {
        for (long g = 1; g <= max_gradient_steps; ++g) {
            std::vector<TransitionSample> batch = buffer.sample(cfg.batch_size);

            double loss;
            if (algo == Algo::sasrl)
                loss = critic_step(stv_critic, critic_opt, batch, target_policy_fn, cfg.gamma,
                                   critic_scratch);
            else
                loss = ddpg_critic_step(sav_critic, critic_opt, batch, target_policy_fn, cfg.gamma,
                                        critic_scratch);
            if (!std::isfinite(loss)) throw DivergenceError("critic loss is non-finite");

            std::vector<Vec> states;
            states.reserve(batch.size());
            for (const TransitionSample& t : batch) states.push_back(t.s.values);
            if (algo == Algo::sasrl)
                actor_step(next_state_policy, actor_opt, stv_slot_gradient(stv_critic.net),
                           feasibility_proposal(env, cfg.projection_candidates), states,
                           actor_scratch);
            else
                ddpg_actor_step(ddpg_actor, actor_opt, sav_slot_gradient(sav_critic.net), states,
                                actor_scratch);

            soft_update(critic_net, critic_target, cfg.soft_eps);
            soft_update(actor_net, actor_target, cfg.soft_eps);
            result.gradient_steps = g;

            if (g % cfg.eval_interval == 0) {
                if (tmodel) tmodel->fit(buffer, cfg.tmodel_refit_epochs, cfg.tmodel_batch_size);

                double mean = 0.0;
                double lo = std::numeric_limits<double>::infinity();
                double hi = -std::numeric_limits<double>::infinity();
                for (int e = 0; e < cfg.eval_episodes; ++e) {
                    RolloutResult ro =
                        rollout(env, greedy_action, env.max_episode_steps(),
                                sub_seed(seed, SeedTags::eval_episode, 1000 * eval_index + e));
                    mean += ro.episode_return;
                    lo = std::min(lo, ro.episode_return);
                    hi = std::max(hi, ro.episode_return);
                }
                mean /= cfg.eval_episodes;
                result.curve.rows.push_back({g, mean, lo, hi});
                result.final_eval_mean = mean;

                // Store fresh roll-out samples. Noisy-actor episodes
                // alternate with uniform-random ones so coverage never
                // collapses onto a weak policy.
                for (int e = 0; e < cfg.collect_episodes; ++e) {
                    bool use_actor = collect_with_actor && e % 2 == 1;
                    Policy collector = use_actor ? Policy(noisy_action) : random_behavior;
                    RolloutResult ro =
                        rollout(env, collector, env.max_episode_steps(),
                                sub_seed(seed, SeedTags::collect_episode, 1000 * eval_index + e));
                    for (const TransitionSample& t : ro.samples) buffer.push(t);
                    log_samples(ro.samples);
                }
                ++eval_index;

                if (mean > best_eval + 1e-9) {
                    best_eval = mean;
                    evals_since_improvement = 0;
                } else if (++evals_since_improvement >= cfg.plateau_patience) {
                    break;  // converged: no improvement for plateau_patience evaluations
                }
            }
        }
    } catch (const DivergenceError& err) {
        save_checkpoints(".diverged");
        if (!outputs.checkpoint_prefix.empty()) {
            std::ofstream note(outputs.checkpoint_prefix + ".diverged.txt");
            note << "run diverged at gradient step " << result.gradient_steps << ": " << err.what()
                 << "\n";
        }
        throw;
    }

    save_checkpoints("");
    return result;
}

TrainResult sasrl_train(Env& env, const SasrlConfig& cfg, long max_gradient_steps, uint64_t seed,
                        const TrainOutputs& outputs) {
    return train_run(env, Algo::sasrl, cfg, max_gradient_steps, seed, outputs);
}

TrainResult ddpg_train(Env& env, const SasrlConfig& cfg, long max_gradient_steps, uint64_t seed,
                       const TrainOutputs& outputs) {
    return train_run(env, Algo::ddpg, cfg, max_gradient_steps, seed, outputs);
}

}  // namespace sasrl
