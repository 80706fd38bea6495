#include "sasrl/transition_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "sasrl/agent.hpp"

namespace sasrl {

TransitionModel::TransitionModel(Box state_box, Box action_box, LossKind loss_kind,
                                 int hidden_width, double learning_rate, uint64_t seed)
    : state_box_(std::move(state_box)),
      action_box_(std::move(action_box)),
      loss_kind_(loss_kind),
      net_({2 * state_box_.width(), hidden_width, hidden_width, action_box_.width()}, Act::relu,
           loss_kind == LossKind::mse_continuous ? Act::tanh : Act::sigmoid),
      opt_(net_, learning_rate),
      rng_(seed) {
    Rng init(mix_seed(seed, 0x7a0d));
    net_.init_uniform_fanin(init);
}

Vec TransitionModel::normalize_input(const Vec& s, const Vec& s_next) const {
    Vec input;
    input.reserve(s.size() + s_next.size());
    auto norm = [this](double x, size_t dim) {
        double lo = state_box_.low[dim], hi = state_box_.high[dim];
        if (hi <= lo) return 0.0;
        return 2.0 * (x - lo) / (hi - lo) - 1.0;
    };
    for (size_t i = 0; i < s.size(); ++i) input.push_back(norm(s[i], i));
    for (size_t i = 0; i < s_next.size(); ++i) input.push_back(norm(s_next[i], i));
    return input;
}

Vec TransitionModel::decode_output(const Vec& raw) const {
    if (loss_kind_ == LossKind::bce_binary) return raw;  // per-coordinate probability
    Vec a(raw.size());
    for (size_t i = 0; i < raw.size(); ++i)
        a[i] = action_box_.low[i] + 0.5 * (raw[i] + 1.0) * (action_box_.high[i] - action_box_.low[i]);
    return a;
}

std::vector<std::pair<Vec, Vec>> TransitionModel::preprocess_batch(
    const std::vector<TransitionSample>& batch) const {
    // Keep one canonical action per exact (s, s') pair: the highest-reward
    // sample, first seen on ties. All such actions realize the same
    // transition, so any single-valued choice is a valid regression target.
    std::map<Vec, size_t> pos_of;  // (s,s') key -> position in `order`
    std::vector<size_t> order;     // batch index of the kept sample, in first-seen order
    for (size_t i = 0; i < batch.size(); ++i) {
        Vec key;
        key.reserve(batch[i].s.values.size() * 2);
        key.insert(key.end(), batch[i].s.values.begin(), batch[i].s.values.end());
        key.insert(key.end(), batch[i].s_next.values.begin(), batch[i].s_next.values.end());
        auto [it, inserted] = pos_of.emplace(std::move(key), order.size());
        if (inserted)
            order.push_back(i);
        else if (batch[i].r > batch[order[it->second]].r)
            order[it->second] = i;
    }
    std::vector<std::pair<Vec, Vec>> out;
    out.reserve(order.size());
    for (size_t idx : order) {
        const TransitionSample& t = batch[idx];
        Vec target = t.a.values;
        if (loss_kind_ == LossKind::bce_binary)
            for (double v : target)
                if (v != 0.0 && v != 1.0)
                    throw std::invalid_argument("binary transition targets must be 0/1");
        out.emplace_back(normalize_input(t.s.values, t.s_next.values), std::move(target));
    }
    return out;
}

double TransitionModel::loss_on(const std::vector<std::pair<Vec, Vec>>& dataset) const {
    if (dataset.empty()) return 0.0;
    double total = 0.0;
    for (const auto& [input, target] : dataset) {
        Vec pred = decode_output(net_.forward(input));
        double loss = loss_kind_ == LossKind::mse_continuous ? mse_loss(pred, target).first
                                                             : bce_loss(pred, target).first;
        total += loss;
    }
    return total / static_cast<double>(dataset.size());
}

double TransitionModel::fit(const ReplayBuffer& buffer, int epochs, int batch_size) {
    if (buffer.size() == 0) throw NotReadyError("transition model fit: replay buffer is empty");
    if (batch_size <= 0) throw std::invalid_argument("transition model fit: bad batch size");
    std::vector<TransitionSample> all(buffer.contents().begin(), buffer.contents().end());
    auto dataset = preprocess_batch(all);

    GradientTape tape = net_.make_tape();
    double final_loss = 0.0;
    std::vector<size_t> index(dataset.size());
    for (size_t i = 0; i < index.size(); ++i) index[i] = i;

    for (int epoch = 0; epoch < epochs; ++epoch) {
        // Fisher-Yates with the model's own stream
        for (size_t i = index.size(); i > 1; --i)
            std::swap(index[i - 1], index[rng_.index(i)]);

        double epoch_loss = 0.0;
        size_t batches = 0;
        for (size_t start = 0; start < index.size(); start += batch_size) {
            size_t end = std::min(index.size(), start + batch_size);
            tape.zero();
            double batch_loss = 0.0;
            for (size_t ii = start; ii < end; ++ii) {
                const auto& [input, target] = dataset[index[ii]];
                Vec raw = net_.forward(input);
                Vec pred = decode_output(raw);
                auto [loss, grad] = loss_kind_ == LossKind::mse_continuous
                                        ? mse_loss(pred, target)
                                        : bce_loss(pred, target);
                batch_loss += loss;
                if (loss_kind_ == LossKind::mse_continuous) {
                    // chain through the affine box mapping
                    for (size_t j = 0; j < grad.size(); ++j)
                        grad[j] *= 0.5 * (action_box_.high[j] - action_box_.low[j]);
                }
                net_.backward(input, grad, tape);
            }
            double count = static_cast<double>(end - start);
            tape.scale(1.0 / count);
            if (!opt_.apply(net_, tape, StepDirection::minimize))
                throw DivergenceError("transition model fit: non-finite gradients");
            epoch_loss += batch_loss / count;
            ++batches;
        }
        final_loss = batches > 0 ? epoch_loss / static_cast<double>(batches) : 0.0;
        if (!std::isfinite(final_loss))
            throw DivergenceError("transition model fit: loss diverged");
    }
    return final_loss;
}

Vec TransitionModel::predict(const Vec& s, const Vec& s_next) const {
    Vec a = decode_output(net_.forward(normalize_input(s, s_next)));
    return action_box_.clamp(a);
}

void TransitionModel::save(const std::string& path) const { save_mlp(net_, path); }

void TransitionModel::load(const std::string& path) {
    Mlp loaded = load_mlp(path);
    if (loaded.layer_dims != net_.layer_dims)
        throw std::runtime_error("transition model load: incompatible snapshot " + path);
    net_ = std::move(loaded);
}

}  // namespace sasrl
