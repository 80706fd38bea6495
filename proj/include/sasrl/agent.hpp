#pragma once

#include <functional>

#include "sasrl/mmrp.hpp"
#include "sasrl/nn.hpp"

namespace sasrl {

class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class BehaviorMode { uniform_random, noisy_actor };
enum class Granularity { continuous, coarse, fine };

std::string granularity_name(Granularity g);
Granularity granularity_from_name(const std::string& name);

// Learner configuration shared by sasRL and the DDPG baseline.
struct SasrlConfig {
    double gamma = 0.99;
    double actor_lr = 2e-4;
    double critic_lr = 1e-3;
    double soft_eps = 0.01;
    int batch_size = 128;
    int eval_interval = 500;
    int eval_episodes = 10;
    int projection_candidates = 64;
    BehaviorMode behavior_policy = BehaviorMode::noisy_actor;
    double explore_sigma_scale = 0.1;  // noise sigma = scale * box half-width
    Granularity granularity = Granularity::continuous;
    int hidden_width = 64;
    size_t buffer_capacity = 100000;
    int prefill_samples = 10000;
    int collect_episodes = 6;    // fresh rollouts stored at each evaluation
    int plateau_patience = 40;   // evaluations without improvement before stopping
    int tmodel_initial_epochs = 12;
    int tmodel_refit_epochs = 2;
    int tmodel_batch_size = 128;
    double tmodel_lr = 1e-3;

    void validate() const;
};

// State-transition-value critic: the network scores concat(s, s').
struct StvCritic {
    Mlp net;         // parameter set kappa
    Mlp target_net;  // delayed copy kappa'
};

StvCritic make_stv_critic(int state_width, int hidden_width, Rng& rng);

double stv_value(const Mlp& critic_net, const Vec& s, const Vec& s_next);

// Deterministic next-state policy. The network ends in tanh; outputs are
// affinely mapped into the environment's state box.
struct NextStatePolicy {
    Mlp net;         // parameter set theta
    Mlp target_net;  // delayed copy theta'
    Box state_box;
};

NextStatePolicy make_next_state_policy(const Box& state_box, int hidden_width, Rng& rng);

Vec policy_next_state(const Mlp& policy_net, const Box& state_box, const Vec& s);

// TD(0) bootstrap target: r when terminal, else r + gamma * Phi'(s', mu'(s')).
// target_policy supplies mu'(s') so tabular policies can stand in for a net.
double td_target(double r, const EnvState& s_next, bool done,
                 const std::function<Vec(const Vec&)>& target_policy, const Mlp& target_critic,
                 double gamma);

// One minimize step on the mean squared TD(0) error over the batch.
// Returns the pre-step loss.
double critic_step(StvCritic& critic, AdamState& opt,
                   const std::vector<TransitionSample>& batch,
                   const std::function<Vec(const Vec&)>& target_policy, double gamma,
                   GradientTape& scratch);

// Gradient of the critic's scalar output w.r.t. the s' slot at (s, s').
using CriticSlotGrad = std::function<Vec(const Vec& s, const Vec& s_next)>;

CriticSlotGrad stv_slot_gradient(const Mlp& critic_net);

// Maps a raw policy proposal onto the feasible set before the critic gradient
// is taken there; the mapping itself is piecewise constant, so the chain rule
// passes straight through it to the raw output.
using ProposalMap = std::function<Vec(const Vec& s, const Vec& raw)>;

ProposalMap identity_proposal();
ProposalMap feasibility_proposal(const Env& env, int candidates);

// Policy-gradient tape: mean_s grad_theta mu(s) . grad_{s'} Phi(s, s')|_{s'=mu(s)},
// with mu(s) = propose(s, raw policy output).
void actor_gradient(const NextStatePolicy& policy, const CriticSlotGrad& dphi_dsnext,
                    const ProposalMap& propose, const std::vector<Vec>& states,
                    GradientTape& out);

// Ascends theta along the policy gradient. The critic is read-only here.
void actor_step(NextStatePolicy& policy, AdamState& opt, const CriticSlotGrad& dphi_dsnext,
                const ProposalMap& propose, const std::vector<Vec>& states,
                GradientTape& scratch);

// target <- eps * online + (1 - eps) * target, exactly.
void soft_update(const Mlp& online, Mlp& target, double eps);

// Euclidean-nearest feasible candidate; ties break toward the lowest index.
EnvState project_next_state(const Env& env, const EnvState& s, const Vec& raw, int n);

class TransitionModel;  // transition_model.hpp

struct ActDecision {
    EnvState target;                // projected next-state proposal
    std::optional<ActionVec> action;  // absent when deferred to a transition model
};

// Runs the trained policy once: propose, optionally perturb, project, then
// recover the action by analytic inverse or transition-model inference.
ActDecision act(const NextStatePolicy& policy, const Env& env, const EnvState& s,
                const SasrlConfig& cfg, bool explore, Rng& noise_rng,
                const TransitionModel* tmodel = nullptr);

}  // namespace sasrl
