#include "sasrl/env_slot.hpp"

#include <cmath>

namespace sasrl {

SlotMachine::SlotMachine(SlotConfig cfg, uint64_t seed) : cfg_(std::move(cfg)), rng_(seed) {
    if (cfg_.n_reels <= 0 || cfg_.symbols_per_reel <= 0 || cfg_.n_symbol_kinds <= 0)
        throw std::invalid_argument("slot: reel geometry must be positive");
    if (static_cast<int>(cfg_.payout_three.size()) != cfg_.n_symbol_kinds)
        throw std::invalid_argument("slot: payout_three needs one entry per symbol kind");
    if (cfg_.symbols_per_reel % cfg_.n_symbol_kinds != 0)
        throw std::invalid_argument("slot: symbols_per_reel must be a multiple of the kind count");
    // Strips cycle through the symbol kinds, each reel rotated by its index.
    // Fixed at construction; never visible through the Env interface.
    strips_.assign(cfg_.n_reels, std::vector<int>(cfg_.symbols_per_reel, 0));
    for (int r = 0; r < cfg_.n_reels; ++r)
        for (int p = 0; p < cfg_.symbols_per_reel; ++p)
            strips_[r][p] = (p + r) % cfg_.n_symbol_kinds;
    offsets_.assign(cfg_.n_reels, 0);
    reset();
}

Box SlotMachine::action_box() const {
    Box box;
    box.low.assign(cfg_.n_reels, cfg_.timer_min);
    box.high.assign(cfg_.n_reels, cfg_.timer_max);
    return box;
}

Box SlotMachine::state_box() const {
    Box box;
    box.low.assign(state_width(), 0.0);
    box.high.assign(state_width(), 1.0);
    return box;
}

void SlotMachine::seed(uint64_t s) { rng_ = Rng(s); }

std::vector<int> SlotMachine::displayed_kinds() const {
    std::vector<int> kinds(cfg_.n_reels);
    for (int r = 0; r < cfg_.n_reels; ++r) kinds[r] = strips_[r][offsets_[r]];
    return kinds;
}

EnvState SlotMachine::encode_display() const {
    EnvState s;
    s.values.assign(state_width(), 0.0);
    std::vector<int> kinds = displayed_kinds();
    for (int r = 0; r < cfg_.n_reels; ++r) s.values[r * cfg_.n_symbol_kinds + kinds[r]] = 1.0;
    return s;
}

EnvState SlotMachine::reset() {
    for (int r = 0; r < cfg_.n_reels; ++r)
        offsets_[r] = static_cast<int>(rng_.index(static_cast<uint64_t>(cfg_.symbols_per_reel)));
    return encode_display();
}

ActionVec SlotMachine::project_action(const ActionVec& a) const {
    if (a.width() != cfg_.n_reels) throw std::invalid_argument("slot: one timer per reel");
    ActionVec out = a;
    for (double& t : out.values) t = std::min(cfg_.timer_max, std::max(cfg_.timer_min, t));
    return out;
}

double SlotMachine::payout(const std::vector<int>& kinds) const {
    bool all_same = true;
    for (size_t i = 1; i < kinds.size(); ++i) all_same = all_same && kinds[i] == kinds[0];
    if (all_same) return cfg_.payout_three[kinds[0]];
    for (size_t i = 0; i < kinds.size(); ++i)
        for (size_t j = i + 1; j < kinds.size(); ++j)
            if (kinds[i] == kinds[j]) return cfg_.payout_two;
    return 0.0;
}

StepResult SlotMachine::step(const ActionVec& raw) {
    ActionVec timers = project_action(raw);
    for (int r = 0; r < cfg_.n_reels; ++r) {
        int advance = static_cast<int>(std::floor(cfg_.spin_rate * timers.values[r]));
        offsets_[r] = (offsets_[r] + advance) % cfg_.symbols_per_reel;
    }
    StepResult out;
    out.s_next = encode_display();
    out.r = payout(displayed_kinds());
    out.done = true;  // one spin per episode
    return out;
}

std::vector<EnvState> SlotMachine::feasible_candidates(const EnvState& s, int n) const {
    if (s.width() != state_width())
        throw std::invalid_argument("slot: candidate query with wrong state width");
    // Decode the displayed kind per reel from the one-hot blocks.
    std::vector<int> kinds(cfg_.n_reels, 0);
    for (int r = 0; r < cfg_.n_reels; ++r) {
        int best = 0;
        for (int k = 1; k < cfg_.n_symbol_kinds; ++k)
            if (s.values[r * cfg_.n_symbol_kinds + k] > s.values[r * cfg_.n_symbol_kinds + best])
                best = k;
        kinds[r] = best;
    }
    // Quantized timer grid: levels per reel chosen so the combination count
    // approaches n. The displayed kind advances with the strip period, so the
    // candidate display follows from the current display alone.
    auto ipow = [](long base, int exp) {
        long v = 1;
        for (int i = 0; i < exp; ++i) v *= base;
        return v;
    };
    int levels = 1;
    while (ipow(levels + 1, cfg_.n_reels) <= n) ++levels;
    std::vector<EnvState> out;
    std::vector<int> combo(cfg_.n_reels, 0);
    while (static_cast<int>(out.size()) < n) {
        EnvState cand;
        cand.values.assign(state_width(), 0.0);
        for (int r = 0; r < cfg_.n_reels; ++r) {
            double t = cfg_.timer_min + (combo[r] + 0.5) / levels * (cfg_.timer_max - cfg_.timer_min);
            int advance = static_cast<int>(std::floor(cfg_.spin_rate * t)) % cfg_.symbols_per_reel;
            int kind = (kinds[r] + advance) % cfg_.n_symbol_kinds;
            cand.values[r * cfg_.n_symbol_kinds + kind] = 1.0;
        }
        out.push_back(std::move(cand));
        int r = 0;
        while (r < cfg_.n_reels) {
            if (++combo[r] < levels) break;
            combo[r] = 0;
            ++r;
        }
        if (r == cfg_.n_reels) break;  // grid exhausted
    }
    return out;
}

const std::vector<std::vector<int>>& SlotMachine::debug_strips() const {
    if (!cfg_.test_backdoor) throw std::runtime_error("slot: reel strips are hidden");
    return strips_;
}

std::vector<int> SlotMachine::debug_offsets() const {
    if (!cfg_.test_backdoor) throw std::runtime_error("slot: reel offsets are hidden");
    return offsets_;
}

void SlotMachine::debug_set_offsets(const std::vector<int>& offsets) {
    if (!cfg_.test_backdoor) throw std::runtime_error("slot: reel offsets are hidden");
    if (static_cast<int>(offsets.size()) != cfg_.n_reels)
        throw std::invalid_argument("slot: one offset per reel");
    offsets_ = offsets;
}

}  // namespace sasrl
