#include "sasrl/ddpg.hpp"

#include <cmath>

namespace sasrl {

SavCritic make_sav_critic(int state_width, int action_width, int hidden_width, Rng& rng) {
    SavCritic critic;
    critic.net =
        Mlp({state_width + action_width, hidden_width, hidden_width, 1}, Act::relu, Act::linear);
    critic.net.init_uniform_fanin(rng);
    critic.target_net = critic.net;
    return critic;
}

double sav_value(const Mlp& critic_net, const Vec& s, const Vec& a) {
    Vec input;
    input.reserve(s.size() + a.size());
    input.insert(input.end(), s.begin(), s.end());
    input.insert(input.end(), a.begin(), a.end());
    return critic_net.forward(input)[0];
}

DdpgActor make_ddpg_actor(int state_width, const Box& action_box, int hidden_width, Rng& rng) {
    DdpgActor actor;
    actor.net = Mlp({state_width, hidden_width, hidden_width, action_box.width()}, Act::relu,
                    Act::tanh);
    actor.net.init_uniform_fanin(rng);
    // Near-zero head, as in make_next_state_policy.
    for (double& x : actor.net.weights.back()) x *= 0.05;
    for (double& x : actor.net.biases.back()) x *= 0.05;
    actor.target_net = actor.net;
    actor.action_box = action_box;
    return actor;
}

Vec ddpg_action(const Mlp& actor_net, const Box& action_box, const Vec& s) {
    Vec y = actor_net.forward(s);
    for (size_t i = 0; i < y.size(); ++i)
        y[i] = action_box.low[i] + 0.5 * (y[i] + 1.0) * (action_box.high[i] - action_box.low[i]);
    return y;
}

double ddpg_td_target(double r, const EnvState& s_next, bool done,
                      const std::function<Vec(const Vec&)>& target_actor, const Mlp& target_critic,
                      double gamma) {
    if (!std::isfinite(r)) throw DivergenceError("ddpg_td_target: non-finite reward");
    if (done) return r;
    Vec a = target_actor(s_next.values);
    double q = sav_value(target_critic, s_next.values, a);
    if (!std::isfinite(q)) throw DivergenceError("ddpg_td_target: non-finite critic output");
    return r + gamma * q;
}

double ddpg_critic_step(SavCritic& critic, AdamState& opt,
                        const std::vector<TransitionSample>& batch,
                        const std::function<Vec(const Vec&)>& target_actor, double gamma,
                        GradientTape& scratch) {
    if (batch.empty()) throw std::invalid_argument("ddpg_critic_step: empty batch");
    size_t n = batch.size();
    Vec preds(n, 0.0), targets(n, 0.0);
    std::vector<Vec> inputs(n);
    for (size_t i = 0; i < n; ++i) {
        const TransitionSample& t = batch[i];
        inputs[i].reserve(t.s.values.size() + t.a.values.size());
        inputs[i].insert(inputs[i].end(), t.s.values.begin(), t.s.values.end());
        inputs[i].insert(inputs[i].end(), t.a.values.begin(), t.a.values.end());
        preds[i] = critic.net.forward(inputs[i])[0];
        targets[i] = ddpg_td_target(t.r, t.s_next, t.done, target_actor, critic.target_net, gamma);
    }
    auto [loss, grad] = mse_loss(preds, targets);
    scratch.zero();
    for (size_t i = 0; i < n; ++i) {
        double cot[1] = {grad[i]};
        critic.net.backward(inputs[i], cot, scratch);
    }
    opt.apply(critic.net, scratch, StepDirection::minimize);
    return loss;
}

ActionSlotGrad sav_slot_gradient(const Mlp& critic_net) {
    return [&critic_net](const Vec& s, const Vec& a) {
        Vec input;
        input.reserve(s.size() + a.size());
        input.insert(input.end(), s.begin(), s.end());
        input.insert(input.end(), a.begin(), a.end());
        double cot[1] = {1.0};
        Vec din = critic_net.input_gradient(input, cot);
        return Vec(din.begin() + static_cast<long>(s.size()), din.end());
    };
}

void ddpg_actor_step(DdpgActor& actor, AdamState& opt, const ActionSlotGrad& dq_da,
                     const std::vector<Vec>& states, GradientTape& scratch) {
    if (states.empty()) throw std::invalid_argument("ddpg_actor_step: empty batch");
    const Box& box = actor.action_box;
    scratch.zero();
    Vec cot(box.width(), 0.0);
    for (const Vec& s : states) {
        Vec raw = actor.net.forward(s);
        Vec a_hat(raw.size());
        for (size_t i = 0; i < raw.size(); ++i)
            a_hat[i] = box.low[i] + 0.5 * (raw[i] + 1.0) * (box.high[i] - box.low[i]);
        Vec g = dq_da(s, a_hat);
        for (size_t i = 0; i < g.size(); ++i) cot[i] = g[i] * 0.5 * (box.high[i] - box.low[i]);
        actor.net.backward(s, cot, scratch);
    }
    scratch.scale(1.0 / static_cast<double>(states.size()));
    opt.apply(actor.net, scratch, StepDirection::maximize);
}

}  // namespace sasrl
