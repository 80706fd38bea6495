#pragma once

#include <deque>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sasrl/nn.hpp"
#include "sasrl/rng.hpp"

namespace sasrl {

struct EnvState {
    Vec values;
    int width() const { return static_cast<int>(values.size()); }
};

struct ActionVec {
    Vec values;
    int width() const { return static_cast<int>(values.size()); }
};

// Per-dimension (low, high) bounds.
struct Box {
    Vec low, high;
    int width() const { return static_cast<int>(low.size()); }
    bool contains(const Vec& x, double tol = 1e-9) const;
    Vec clamp(const Vec& x) const;
};

// One experience tuple (s, s', a, r, done).
struct TransitionSample {
    EnvState s;
    EnvState s_next;
    ActionVec a;
    double r = 0.0;
    bool done = false;

    bool finite() const;
};

struct StepResult {
    EnvState s_next;
    double r = 0.0;
    bool done = false;
};

// Environment contract shared by every simulator.
class Env {
public:
    virtual ~Env() = default;

    virtual std::string name() const = 0;
    virtual int state_width() const = 0;
    virtual int action_width() const = 0;
    virtual Box action_box() const = 0;
    virtual Box state_box() const = 0;
    virtual double gamma() const = 0;
    virtual int max_episode_steps() const = 0;

    virtual void seed(uint64_t s) = 0;
    virtual EnvState reset() = 0;
    virtual StepResult step(const ActionVec& a) = 0;

    // Clamp an arbitrary action into the feasible action set (box bounds plus
    // any per-environment constraint such as a displacement norm limit).
    virtual ActionVec project_action(const ActionVec& a) const = 0;

    // Deterministic pattern of next states reachable from s in one step.
    virtual std::vector<EnvState> feasible_candidates(const EnvState& s, int n) const = 0;

    // Action realizing s -> s_next where one can be read off the states;
    // nullopt when the environment has no analytic inverse.
    virtual std::optional<ActionVec> inverse_action(const EnvState& s,
                                                    const EnvState& s_next) const = 0;

    // False when actions must come from a learned transition model instead.
    virtual bool has_inverse_action() const { return true; }
};

using Policy = std::function<ActionVec(const EnvState&)>;

class NotReadyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bounded FIFO of transition samples with a seeded stream for minibatch draws.
class ReplayBuffer {
public:
    ReplayBuffer(size_t capacity, uint64_t seed);

    // Appends the sample, evicting the oldest when full. Invalid samples
    // (non-finite fields) are rejected; returns false in that case.
    bool push(const TransitionSample& sample);

    // n draws uniformly with replacement. Throws NotReadyError when empty.
    std::vector<TransitionSample> sample(size_t n);

    size_t size() const { return storage_.size(); }
    size_t capacity() const { return capacity_; }
    const std::deque<TransitionSample>& contents() const { return storage_; }

private:
    size_t capacity_;
    std::deque<TransitionSample> storage_;
    Rng rng_;
};

struct RolloutResult {
    std::vector<TransitionSample> samples;
    double episode_return = 0.0;      // undiscounted accumulated reward
    double discounted_return = 0.0;   // diagnostic
};

// Runs one episode: seeds the environment, resets it, then steps the policy
// until done or max_steps. Out-of-box actions are projected and the projected
// action is what gets recorded.
RolloutResult rollout(Env& env, const Policy& policy, int max_steps, uint64_t rng_seed);

// Trajectory log: one sample per line, "s... | a... | s'... | r | done".
void write_trajectory_log(const std::string& path, const std::vector<TransitionSample>& samples);
void append_trajectory_log(std::ostream& out, const std::vector<TransitionSample>& samples);
std::vector<TransitionSample> read_trajectory_log(const std::string& path);

}  // namespace sasrl
