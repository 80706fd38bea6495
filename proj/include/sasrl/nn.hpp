#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sasrl/rng.hpp"

namespace sasrl {

using Vec = std::vector<double>;

enum class Act { linear, relu, tanh, sigmoid };

std::string act_name(Act a);
Act act_from_name(const std::string& name);

struct GradientTape;

// Dense multi-layer perceptron, double precision throughout. Weight matrix
// of layer l has shape (layer_dims[l+1] x layer_dims[l]), stored row-major.
class Mlp {
public:
    Mlp() = default;
    Mlp(std::vector<int> layer_dims, Act hidden_activation, Act output_activation);

    void init_uniform_fanin(Rng& rng);  // U(-1/sqrt(fan_in), +1/sqrt(fan_in))

    int input_width() const { return layer_dims.empty() ? 0 : layer_dims.front(); }
    int output_width() const { return layer_dims.empty() ? 0 : layer_dims.back(); }
    int layer_count() const { return static_cast<int>(weights.size()); }
    size_t param_count() const;

    Vec forward(std::span<const double> input) const;

    // Accumulates d(output . output_gradient)/d(params) and d/d(input) into
    // the tape. Call tape.zero() first for a fresh gradient.
    void backward(std::span<const double> input, std::span<const double> output_gradient,
                  GradientTape& tape) const;

    // Gradient w.r.t. the input only; skips parameter accumulation.
    Vec input_gradient(std::span<const double> input,
                       std::span<const double> output_gradient) const;

    GradientTape make_tape() const;

    void assert_finite(const char* where) const;

    std::vector<int> layer_dims;
    std::vector<Vec> weights;  // weights[l]: (dims[l+1] x dims[l]) row-major
    std::vector<Vec> biases;   // biases[l]: dims[l+1]
    Act hidden_activation = Act::relu;
    Act output_activation = Act::linear;
};

// Per-parameter gradient accumulators, congruent in shape to an Mlp.
struct GradientTape {
    std::vector<Vec> dweights;
    std::vector<Vec> dbiases;
    Vec dinput;

    void zero();
    void axpy(double c, const GradientTape& other);  // this += c * other
    void scale(double c);
    bool finite() const;
};

double dot(const GradientTape& a, const GradientTape& b);  // parameter slots only
void add_scaled(Mlp& net, const GradientTape& tape, double c);  // params += c * tape

enum class StepDirection { minimize, maximize };

// Adam with bias correction. One optimizer state per network.
struct AdamState {
    explicit AdamState(const Mlp& net, double learning_rate);

    // Applies one bias-corrected step. Returns false (and leaves the network
    // untouched) when the tape contains non-finite entries.
    bool apply(Mlp& net, const GradientTape& tape, StepDirection direction);

    long step_count = 0;
    double learning_rate;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon_div = 1e-8;
    std::vector<Vec> m_weights, v_weights;
    std::vector<Vec> m_biases, v_biases;
};

// mean squared error and its gradient w.r.t. pred
std::pair<double, Vec> mse_loss(std::span<const double> pred, std::span<const double> target);

// mean binary cross-entropy; pred is clamped to [1e-7, 1-1e-7], target must be 0/1
std::pair<double, Vec> bce_loss(std::span<const double> pred, std::span<const double> target);

// Parameter snapshot: header line "mlp <dims joined by 'x'> <hidden> <out>\n"
// followed by a flat little-endian stream of 64-bit floats (per layer:
// weights row-major, then biases).
void save_mlp(const Mlp& net, const std::string& path);
Mlp load_mlp(const std::string& path);

}  // namespace sasrl
