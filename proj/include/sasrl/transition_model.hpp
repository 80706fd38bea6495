#pragma once

#include "sasrl/mmrp.hpp"
#include "sasrl/nn.hpp"

namespace sasrl {

enum class LossKind { mse_continuous, bce_binary };

// Supervised inverse model tau(s, s') -> a, trained on replay tuples. Inputs
// are normalized to the state box; continuous outputs end in tanh mapped to
// the action box, binary outputs end in sigmoid.
class TransitionModel {
public:
    TransitionModel(Box state_box, Box action_box, LossKind loss_kind, int hidden_width,
                    double learning_rate, uint64_t seed);

    // Normalizes, de-duplicates exact (s, s') collisions (keeping the sample
    // with the highest reward, first seen on ties), and encodes targets.
    // Exposed for tests; fit() applies it to the whole buffer.
    std::vector<std::pair<Vec, Vec>> preprocess_batch(
        const std::vector<TransitionSample>& batch) const;

    // Supervised minimize loop over the buffer contents. Returns the final
    // epoch's mean loss (0 epochs leave the model untouched and return 0).
    double fit(const ReplayBuffer& buffer, int epochs, int batch_size);

    Vec predict(const Vec& s, const Vec& s_next) const;

    double loss_on(const std::vector<std::pair<Vec, Vec>>& dataset) const;

    const Mlp& net() const { return net_; }
    LossKind loss_kind() const { return loss_kind_; }
    void set_learning_rate(double lr) { opt_.learning_rate = lr; }

    void save(const std::string& path) const;   // tensor-nn snapshot format
    void load(const std::string& path);

private:
    Vec normalize_input(const Vec& s, const Vec& s_next) const;
    Vec decode_output(const Vec& raw) const;

    Box state_box_;
    Box action_box_;
    LossKind loss_kind_;
    Mlp net_;  // parameter set omega
    AdamState opt_;
    Rng rng_;
};

}  // namespace sasrl
