#pragma once

#include "sasrl/agent.hpp"
#include "sasrl/mmrp.hpp"
#include "sasrl/nn.hpp"

namespace sasrl {

// State-action-value critic: the network scores concat(s, a).
struct SavCritic {
    Mlp net;
    Mlp target_net;
};

SavCritic make_sav_critic(int state_width, int action_width, int hidden_width, Rng& rng);

double sav_value(const Mlp& critic_net, const Vec& s, const Vec& a);

// Deterministic action policy; tanh output mapped into the action box.
struct DdpgActor {
    Mlp net;
    Mlp target_net;
    Box action_box;
};

DdpgActor make_ddpg_actor(int state_width, const Box& action_box, int hidden_width, Rng& rng);

Vec ddpg_action(const Mlp& actor_net, const Box& action_box, const Vec& s);

// TD target r + gamma * Q'(s', mu'(s')), r when terminal.
double ddpg_td_target(double r, const EnvState& s_next, bool done,
                      const std::function<Vec(const Vec&)>& target_actor, const Mlp& target_critic,
                      double gamma);

double ddpg_critic_step(SavCritic& critic, AdamState& opt,
                        const std::vector<TransitionSample>& batch,
                        const std::function<Vec(const Vec&)>& target_actor, double gamma,
                        GradientTape& scratch);

// Gradient of Q w.r.t. the action slot at (s, a).
using ActionSlotGrad = std::function<Vec(const Vec& s, const Vec& a)>;

ActionSlotGrad sav_slot_gradient(const Mlp& critic_net);

// Ascends the actor along mean_s grad_theta mu(s) . grad_a Q(s, a)|_{a=mu(s)}.
void ddpg_actor_step(DdpgActor& actor, AdamState& opt, const ActionSlotGrad& dq_da,
                     const std::vector<Vec>& states, GradientTape& scratch);

}  // namespace sasrl
