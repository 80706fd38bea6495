#pragma once

#include <string>

#include "sasrl/agent.hpp"
#include "sasrl/curve.hpp"
#include "sasrl/mmrp.hpp"

namespace sasrl {

enum class Algo { sasrl, ddpg };

std::string algo_name(Algo a);
Algo algo_from_name(const std::string& name);

// Structural-parity descriptor. The two algorithms share one training loop;
// everything that differs between them is named here and nowhere else.
struct AlgoSpec {
    std::string critic_input;   // what the critic network scores
    std::string actor_output;   // the space the actor emits
    std::string gradient_slot;  // the critic input slot the actor ascends through
    std::string replay = "uniform-fifo-replay";
    std::string target_update = "soft-interpolation";
    std::string evaluation = "periodic-greedy-episodes";
    std::string collection = "rollout-at-evaluation";
    SasrlConfig hyperparams;
};

AlgoSpec describe_algo(Algo algo, const SasrlConfig& cfg);

struct TrainOutputs {
    std::string checkpoint_prefix;    // empty: no checkpoints written
    std::string trajectory_log_path;  // empty: no trajectory log
};

struct TrainResult {
    LearningCurve curve;
    long gradient_steps = 0;
    double final_eval_mean = 0.0;  // mean return of the last evaluation row
    std::vector<std::string> checkpoint_files;
};

// Off-policy training loop: prefill the buffer from the behavior policy,
// then iterate critic step, actor step, soft target updates, periodic
// evaluation and fresh rollout collection. Throws DivergenceError (after
// saving a diagnostic bundle when a checkpoint prefix is set) on non-finite
// losses.
TrainResult train_run(Env& env, Algo algo, const SasrlConfig& cfg, long max_gradient_steps,
                      uint64_t seed, const TrainOutputs& outputs = {});

// Module entry points; both route through the shared loop above.
TrainResult sasrl_train(Env& env, const SasrlConfig& cfg, long max_gradient_steps, uint64_t seed,
                        const TrainOutputs& outputs = {});
TrainResult ddpg_train(Env& env, const SasrlConfig& cfg, long max_gradient_steps, uint64_t seed,
                       const TrainOutputs& outputs = {});

}  // namespace sasrl
