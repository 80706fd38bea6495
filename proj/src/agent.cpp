#include "sasrl/agent.hpp"

#include <cmath>
#include <limits>

#include "sasrl/transition_model.hpp"

namespace sasrl {

std::string granularity_name(Granularity g) {
    switch (g) {
        case Granularity::continuous: return "continuous";
        case Granularity::coarse: return "coarse";
        case Granularity::fine: return "fine";
    }
    return "continuous";
}

Granularity granularity_from_name(const std::string& name) {
    if (name == "continuous") return Granularity::continuous;
    if (name == "coarse") return Granularity::coarse;
    if (name == "fine") return Granularity::fine;
    throw std::invalid_argument("unknown granularity: " + name);
}

void SasrlConfig::validate() const {
    if (gamma <= 0.0 || gamma >= 1.0) throw std::invalid_argument("gamma must be in (0,1)");
    if (actor_lr <= 0.0 || critic_lr <= 0.0) throw std::invalid_argument("learning rates must be positive");
    if (soft_eps <= 0.0 || soft_eps > 1.0) throw std::invalid_argument("soft_eps must be in (0,1]");
    if (batch_size <= 0 || eval_interval <= 0 || eval_episodes <= 0 || projection_candidates <= 0)
        throw std::invalid_argument("batch/eval/projection counts must be positive");
    if (hidden_width <= 0 || prefill_samples < 0) throw std::invalid_argument("bad network/prefill config");
}

StvCritic make_stv_critic(int state_width, int hidden_width, Rng& rng) {
    StvCritic critic;
    critic.net = Mlp({2 * state_width, hidden_width, hidden_width, 1}, Act::relu, Act::linear);
    critic.net.init_uniform_fanin(rng);
    critic.target_net = critic.net;
    return critic;
}

double stv_value(const Mlp& critic_net, const Vec& s, const Vec& s_next) {
    Vec input;
    input.reserve(s.size() + s_next.size());
    input.insert(input.end(), s.begin(), s.end());
    input.insert(input.end(), s_next.begin(), s_next.end());
    return critic_net.forward(input)[0];
}

NextStatePolicy make_next_state_policy(const Box& state_box, int hidden_width, Rng& rng) {
    NextStatePolicy policy;
    int w = state_box.width();
    policy.net = Mlp({w, hidden_width, hidden_width, w}, Act::relu, Act::tanh);
    policy.net.init_uniform_fanin(rng);
    // Near-zero head: proposals start at the box center, keeping the tanh
    // output unsaturated while the critic is still forming.
    for (double& x : policy.net.weights.back()) x *= 0.05;
    for (double& x : policy.net.biases.back()) x *= 0.05;
    policy.target_net = policy.net;
    policy.state_box = state_box;
    return policy;
}

Vec policy_next_state(const Mlp& policy_net, const Box& state_box, const Vec& s) {
    Vec y = policy_net.forward(s);
    for (size_t i = 0; i < y.size(); ++i)
        y[i] = state_box.low[i] + 0.5 * (y[i] + 1.0) * (state_box.high[i] - state_box.low[i]);
    return y;
}

double td_target(double r, const EnvState& s_next, bool done,
                 const std::function<Vec(const Vec&)>& target_policy, const Mlp& target_critic,
                 double gamma) {
    if (!std::isfinite(r)) throw DivergenceError("td_target: non-finite reward");
    if (done) return r;
    Vec mu = target_policy(s_next.values);
    double phi = stv_value(target_critic, s_next.values, mu);
    if (!std::isfinite(phi)) throw DivergenceError("td_target: non-finite critic output");
    return r + gamma * phi;
}

double critic_step(StvCritic& critic, AdamState& opt,
                   const std::vector<TransitionSample>& batch,
                   const std::function<Vec(const Vec&)>& target_policy, double gamma,
                   GradientTape& scratch) {
    if (batch.empty()) throw std::invalid_argument("critic_step: empty batch");
    size_t n = batch.size();
    Vec preds(n, 0.0), targets(n, 0.0);
    std::vector<Vec> inputs(n);
    for (size_t i = 0; i < n; ++i) {
        const TransitionSample& t = batch[i];
        inputs[i].reserve(t.s.values.size() * 2);
        inputs[i].insert(inputs[i].end(), t.s.values.begin(), t.s.values.end());
        inputs[i].insert(inputs[i].end(), t.s_next.values.begin(), t.s_next.values.end());
        preds[i] = critic.net.forward(inputs[i])[0];
        targets[i] = td_target(t.r, t.s_next, t.done, target_policy, critic.target_net, gamma);
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

CriticSlotGrad stv_slot_gradient(const Mlp& critic_net) {
    return [&critic_net](const Vec& s, const Vec& s_next) {
        Vec input;
        input.reserve(s.size() + s_next.size());
        input.insert(input.end(), s.begin(), s.end());
        input.insert(input.end(), s_next.begin(), s_next.end());
        double cot[1] = {1.0};
        Vec din = critic_net.input_gradient(input, cot);
        return Vec(din.begin() + static_cast<long>(s.size()), din.end());
    };
}

ProposalMap identity_proposal() {
    return [](const Vec&, const Vec& raw) { return raw; };
}

ProposalMap feasibility_proposal(const Env& env, int candidates) {
    return [&env, candidates](const Vec& s, const Vec& raw) {
        return project_next_state(env, EnvState{s}, raw, candidates).values;
    };
}

void actor_gradient(const NextStatePolicy& policy, const CriticSlotGrad& dphi_dsnext,
                    const ProposalMap& propose, const std::vector<Vec>& states,
                    GradientTape& out) {
    if (states.empty()) throw std::invalid_argument("actor_gradient: empty batch");
    const Box& box = policy.state_box;
    out.zero();
    Vec cot(box.width(), 0.0);
    for (const Vec& s : states) {
        Vec raw = policy.net.forward(s);  // tanh outputs in (-1, 1)
        Vec s_hat(raw.size());
        for (size_t i = 0; i < raw.size(); ++i)
            s_hat[i] = box.low[i] + 0.5 * (raw[i] + 1.0) * (box.high[i] - box.low[i]);
        Vec g = dphi_dsnext(s, propose(s, s_hat));
        // chain through the affine box mapping
        for (size_t i = 0; i < g.size(); ++i) cot[i] = g[i] * 0.5 * (box.high[i] - box.low[i]);
        policy.net.backward(s, cot, out);
    }
    out.scale(1.0 / static_cast<double>(states.size()));  // mean over batch
}

void actor_step(NextStatePolicy& policy, AdamState& opt, const CriticSlotGrad& dphi_dsnext,
                const ProposalMap& propose, const std::vector<Vec>& states,
                GradientTape& scratch) {
    actor_gradient(policy, dphi_dsnext, propose, states, scratch);
    opt.apply(policy.net, scratch, StepDirection::maximize);
}

void soft_update(const Mlp& online, Mlp& target, double eps) {
    if (online.layer_dims != target.layer_dims)
        throw std::invalid_argument("soft_update: incongruent networks");
    for (size_t l = 0; l < online.weights.size(); ++l) {
        for (size_t i = 0; i < online.weights[l].size(); ++i)
            target.weights[l][i] = eps * online.weights[l][i] + (1.0 - eps) * target.weights[l][i];
        for (size_t i = 0; i < online.biases[l].size(); ++i)
            target.biases[l][i] = eps * online.biases[l][i] + (1.0 - eps) * target.biases[l][i];
    }
}

EnvState project_next_state(const Env& env, const EnvState& s, const Vec& raw, int n) {
    std::vector<EnvState> candidates = env.feasible_candidates(s, n);
    if (candidates.empty())
        throw std::runtime_error("project_next_state: environment produced no candidates");
    size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < candidates.size(); ++i) {
        double d2 = 0.0;
        const Vec& c = candidates[i].values;
        for (size_t j = 0; j < c.size(); ++j) {
            double d = c[j] - raw[j];
            d2 += d * d;
        }
        if (d2 < best_d2) {
            best_d2 = d2;
            best = i;
        }
    }
    return candidates[best];
}

ActDecision act(const NextStatePolicy& policy, const Env& env, const EnvState& s,
                const SasrlConfig& cfg, bool explore, Rng& noise_rng,
                const TransitionModel* tmodel) {
    Vec raw = policy_next_state(policy.net, policy.state_box, s.values);
    if (explore && cfg.explore_sigma_scale > 0.0) {
        const Box& box = policy.state_box;
        for (size_t i = 0; i < raw.size(); ++i) {
            double sigma = cfg.explore_sigma_scale * 0.5 * (box.high[i] - box.low[i]);
            raw[i] += noise_rng.normal(0.0, sigma);
            raw[i] = std::min(box.high[i], std::max(box.low[i], raw[i]));
        }
    }
    ActDecision decision;
    decision.target = project_next_state(env, s, raw, cfg.projection_candidates);
    decision.action = env.inverse_action(s, decision.target);
    if (!decision.action && tmodel != nullptr)
        decision.action = ActionVec{tmodel->predict(s.values, decision.target.values)};
    return decision;
}

}  // namespace sasrl
