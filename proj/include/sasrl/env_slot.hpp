#pragma once

#include <array>

#include "sasrl/mmrp.hpp"

namespace sasrl {

struct SlotConfig {
    int n_reels = 3;
    int symbols_per_reel = 8;
    int n_symbol_kinds = 4;
    // Symbols advanced per unit timer. With 4 symbol kinds this maps each
    // displayed-kind shift to a single timer quarter-interval, so the inverse
    // timers are a well-posed single-valued function of the display pair.
    double spin_rate = 4.0;
    double timer_min = 0.0;
    double timer_max = 1.0;
    Vec payout_three = {20.0, 15.0, 10.0, 5.0};  // three-of-a-kind of kind k
    double payout_two = 2.0;                     // exactly two matching
    double gamma = 0.99;
    bool test_backdoor = false;  // gates the reel-strip accessors used by tests
};

// One-armed bandit with hidden reel strips. The agent sets a stop timer per
// reel; each reel advances floor(spin_rate * timer) positions. State is the
// one-hot encoding of the displayed symbol kind per reel. Episodes are a
// single spin.
class SlotMachine : public Env {
public:
    explicit SlotMachine(SlotConfig cfg = {}, uint64_t seed = 0);

    std::string name() const override { return "slot"; }
    int state_width() const override { return cfg_.n_reels * cfg_.n_symbol_kinds; }
    int action_width() const override { return cfg_.n_reels; }
    Box action_box() const override;
    Box state_box() const override;
    double gamma() const override { return cfg_.gamma; }
    int max_episode_steps() const override { return 1; }

    void seed(uint64_t s) override;
    EnvState reset() override;
    StepResult step(const ActionVec& timers) override;

    ActionVec project_action(const ActionVec& a) const override;
    std::vector<EnvState> feasible_candidates(const EnvState& s, int n) const override;
    std::optional<ActionVec> inverse_action(const EnvState&, const EnvState&) const override {
        return std::nullopt;  // the reel arrangement is not observable
    }
    bool has_inverse_action() const override { return false; }

    double payout(const std::vector<int>& kinds) const;
    const SlotConfig& config() const { return cfg_; }

    // test-only backdoor, enabled by SlotConfig::test_backdoor
    const std::vector<std::vector<int>>& debug_strips() const;
    std::vector<int> debug_offsets() const;
    void debug_set_offsets(const std::vector<int>& offsets);

private:
    std::vector<int> displayed_kinds() const;
    EnvState encode_display() const;

    SlotConfig cfg_;
    std::vector<std::vector<int>> strips_;  // strips_[reel][position] = symbol kind
    std::vector<int> offsets_;
    Rng rng_;
};

}  // namespace sasrl
