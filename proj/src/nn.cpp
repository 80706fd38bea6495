#include "sasrl/nn.hpp"

#include <cassert>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace sasrl {

namespace {

double activate(Act a, double x) {
    switch (a) {
        case Act::linear: return x;
        case Act::relu: return x > 0.0 ? x : 0.0;
        case Act::tanh: return std::tanh(x);
        case Act::sigmoid: return 1.0 / (1.0 + std::exp(-x));
    }
    return x;
}

// derivative expressed through the activated value y = f(x)
double activate_deriv(Act a, double y) {
    switch (a) {
        case Act::linear: return 1.0;
        case Act::relu: return y > 0.0 ? 1.0 : 0.0;
        case Act::tanh: return 1.0 - y * y;
        case Act::sigmoid: return y * (1.0 - y);
    }
    return 1.0;
}

}  // namespace

std::string act_name(Act a) {
    switch (a) {
        case Act::linear: return "linear";
        case Act::relu: return "relu";
        case Act::tanh: return "tanh";
        case Act::sigmoid: return "sigmoid";
    }
    return "linear";
}

Act act_from_name(const std::string& name) {
    if (name == "linear") return Act::linear;
    if (name == "relu") return Act::relu;
    if (name == "tanh") return Act::tanh;
    if (name == "sigmoid") return Act::sigmoid;
    throw std::invalid_argument("unknown activation: " + name);
}

Mlp::Mlp(std::vector<int> dims, Act hidden, Act output)
    : layer_dims(std::move(dims)), hidden_activation(hidden), output_activation(output) {
    if (layer_dims.size() < 2) throw std::invalid_argument("Mlp needs at least 2 layer dims");
    for (int d : layer_dims)
        if (d <= 0) throw std::invalid_argument("Mlp layer dims must be positive");
    for (size_t l = 0; l + 1 < layer_dims.size(); ++l) {
        weights.emplace_back(static_cast<size_t>(layer_dims[l + 1]) * layer_dims[l], 0.0);
        biases.emplace_back(static_cast<size_t>(layer_dims[l + 1]), 0.0);
    }
}

void Mlp::init_uniform_fanin(Rng& rng) {
    for (size_t l = 0; l < weights.size(); ++l) {
        double bound = 1.0 / std::sqrt(static_cast<double>(layer_dims[l]));
        for (double& w : weights[l]) w = rng.uniform(-bound, bound);
        for (double& b : biases[l]) b = rng.uniform(-bound, bound);
    }
}

size_t Mlp::param_count() const {
    size_t n = 0;
    for (size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
    return n;
}

Vec Mlp::forward(std::span<const double> input) const {
    if (static_cast<int>(input.size()) != input_width())
        throw std::invalid_argument("Mlp::forward: input width mismatch");
    Vec cur(input.begin(), input.end());
    Vec next;
    for (size_t l = 0; l < weights.size(); ++l) {
        int in_n = layer_dims[l];
        int out_n = layer_dims[l + 1];
        Act act = (l + 1 == weights.size()) ? output_activation : hidden_activation;
        next.assign(out_n, 0.0);
        const double* w = weights[l].data();
        for (int j = 0; j < out_n; ++j) {
            double z = biases[l][j];
            const double* row = w + static_cast<size_t>(j) * in_n;
            for (int i = 0; i < in_n; ++i) z += row[i] * cur[i];
            next[j] = activate(act, z);
        }
        cur.swap(next);
    }
    return cur;
}

GradientTape Mlp::make_tape() const {
    GradientTape t;
    t.dweights.reserve(weights.size());
    t.dbiases.reserve(biases.size());
    for (size_t l = 0; l < weights.size(); ++l) {
        t.dweights.emplace_back(weights[l].size(), 0.0);
        t.dbiases.emplace_back(biases[l].size(), 0.0);
    }
    t.dinput.assign(input_width(), 0.0);
    return t;
}

void Mlp::backward(std::span<const double> input, std::span<const double> output_gradient,
                   GradientTape& tape) const {
    if (static_cast<int>(input.size()) != input_width())
        throw std::invalid_argument("Mlp::backward: input width mismatch");
    if (static_cast<int>(output_gradient.size()) != output_width())
        throw std::invalid_argument("Mlp::backward: output gradient width mismatch");
    if (tape.dweights.size() != weights.size() || tape.dinput.size() != input.size())
        throw std::invalid_argument("Mlp::backward: tape shape mismatch");

    size_t layers = weights.size();
    // forward pass, caching activations of every layer
    std::vector<Vec> acts(layers + 1);
    acts[0].assign(input.begin(), input.end());
    for (size_t l = 0; l < layers; ++l) {
        int in_n = layer_dims[l];
        int out_n = layer_dims[l + 1];
        Act act = (l + 1 == layers) ? output_activation : hidden_activation;
        acts[l + 1].assign(out_n, 0.0);
        const double* w = weights[l].data();
        for (int j = 0; j < out_n; ++j) {
            double z = biases[l][j];
            const double* row = w + static_cast<size_t>(j) * in_n;
            for (int i = 0; i < in_n; ++i) z += row[i] * acts[l][i];
            acts[l + 1][j] = activate(act, z);
        }
    }

    // reverse pass
    Vec delta(output_gradient.begin(), output_gradient.end());
    for (size_t l = layers; l-- > 0;) {
        int in_n = layer_dims[l];
        int out_n = layer_dims[l + 1];
        Act act = (l + 1 == layers) ? output_activation : hidden_activation;
        for (int j = 0; j < out_n; ++j) delta[j] *= activate_deriv(act, acts[l + 1][j]);

        double* dw = tape.dweights[l].data();
        const double* a_in = acts[l].data();
        for (int j = 0; j < out_n; ++j) {
            double dj = delta[j];
            tape.dbiases[l][j] += dj;
            double* drow = dw + static_cast<size_t>(j) * in_n;
            for (int i = 0; i < in_n; ++i) drow[i] += dj * a_in[i];
        }

        Vec prev(in_n, 0.0);
        const double* w = weights[l].data();
        for (int j = 0; j < out_n; ++j) {
            double dj = delta[j];
            const double* row = w + static_cast<size_t>(j) * in_n;
            for (int i = 0; i < in_n; ++i) prev[i] += dj * row[i];
        }
        delta.swap(prev);
    }
    for (size_t i = 0; i < delta.size(); ++i) tape.dinput[i] += delta[i];
}

Vec Mlp::input_gradient(std::span<const double> input,
                        std::span<const double> output_gradient) const {
    if (static_cast<int>(input.size()) != input_width())
        throw std::invalid_argument("Mlp::input_gradient: input width mismatch");
    if (static_cast<int>(output_gradient.size()) != output_width())
        throw std::invalid_argument("Mlp::input_gradient: output gradient width mismatch");

    size_t layers = weights.size();
    std::vector<Vec> acts(layers + 1);
    acts[0].assign(input.begin(), input.end());
    for (size_t l = 0; l < layers; ++l) {
        int in_n = layer_dims[l];
        int out_n = layer_dims[l + 1];
        Act act = (l + 1 == layers) ? output_activation : hidden_activation;
        acts[l + 1].assign(out_n, 0.0);
        const double* w = weights[l].data();
        for (int j = 0; j < out_n; ++j) {
            double z = biases[l][j];
            const double* row = w + static_cast<size_t>(j) * in_n;
            for (int i = 0; i < in_n; ++i) z += row[i] * acts[l][i];
            acts[l + 1][j] = activate(act, z);
        }
    }
    Vec delta(output_gradient.begin(), output_gradient.end());
    for (size_t l = layers; l-- > 0;) {
        int in_n = layer_dims[l];
        int out_n = layer_dims[l + 1];
        Act act = (l + 1 == layers) ? output_activation : hidden_activation;
        for (int j = 0; j < out_n; ++j) delta[j] *= activate_deriv(act, acts[l + 1][j]);
        Vec prev(in_n, 0.0);
        const double* w = weights[l].data();
        for (int j = 0; j < out_n; ++j) {
            double dj = delta[j];
            const double* row = w + static_cast<size_t>(j) * in_n;
            for (int i = 0; i < in_n; ++i) prev[i] += dj * row[i];
        }
        delta.swap(prev);
    }
    return delta;
}

void Mlp::assert_finite(const char* where) const {
    for (size_t l = 0; l < weights.size(); ++l) {
        for (double w : weights[l])
            if (!std::isfinite(w)) throw std::runtime_error(std::string("non-finite weight after ") + where);
        for (double b : biases[l])
            if (!std::isfinite(b)) throw std::runtime_error(std::string("non-finite bias after ") + where);
    }
}

void GradientTape::zero() {
    for (auto& v : dweights) std::fill(v.begin(), v.end(), 0.0);
    for (auto& v : dbiases) std::fill(v.begin(), v.end(), 0.0);
    std::fill(dinput.begin(), dinput.end(), 0.0);
}

void GradientTape::axpy(double c, const GradientTape& other) {
    for (size_t l = 0; l < dweights.size(); ++l) {
        for (size_t i = 0; i < dweights[l].size(); ++i) dweights[l][i] += c * other.dweights[l][i];
        for (size_t i = 0; i < dbiases[l].size(); ++i) dbiases[l][i] += c * other.dbiases[l][i];
    }
    for (size_t i = 0; i < dinput.size(); ++i) dinput[i] += c * other.dinput[i];
}

void GradientTape::scale(double c) {
    for (auto& v : dweights)
        for (double& x : v) x *= c;
    for (auto& v : dbiases)
        for (double& x : v) x *= c;
    for (double& x : dinput) x *= c;
}

bool GradientTape::finite() const {
    for (const auto& v : dweights)
        for (double x : v)
            if (!std::isfinite(x)) return false;
    for (const auto& v : dbiases)
        for (double x : v)
            if (!std::isfinite(x)) return false;
    return true;
}

double dot(const GradientTape& a, const GradientTape& b) {
    double s = 0.0;
    for (size_t l = 0; l < a.dweights.size(); ++l) {
        for (size_t i = 0; i < a.dweights[l].size(); ++i) s += a.dweights[l][i] * b.dweights[l][i];
        for (size_t i = 0; i < a.dbiases[l].size(); ++i) s += a.dbiases[l][i] * b.dbiases[l][i];
    }
    return s;
}

void add_scaled(Mlp& net, const GradientTape& tape, double c) {
    for (size_t l = 0; l < net.weights.size(); ++l) {
        for (size_t i = 0; i < net.weights[l].size(); ++i) net.weights[l][i] += c * tape.dweights[l][i];
        for (size_t i = 0; i < net.biases[l].size(); ++i) net.biases[l][i] += c * tape.dbiases[l][i];
    }
}

AdamState::AdamState(const Mlp& net, double lr) : learning_rate(lr) {
    for (size_t l = 0; l < net.weights.size(); ++l) {
        m_weights.emplace_back(net.weights[l].size(), 0.0);
        v_weights.emplace_back(net.weights[l].size(), 0.0);
        m_biases.emplace_back(net.biases[l].size(), 0.0);
        v_biases.emplace_back(net.biases[l].size(), 0.0);
    }
}

bool AdamState::apply(Mlp& net, const GradientTape& tape, StepDirection direction) {
    if (m_weights.size() != net.weights.size() || tape.dweights.size() != net.weights.size())
        throw std::invalid_argument("AdamState::apply: shape mismatch");
    if (!tape.finite()) {
        std::cerr << "adam: rejected update with non-finite gradient entries (step "
                  << step_count << ")\n";
        return false;
    }
    step_count += 1;
    double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step_count));
    double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step_count));
    double sign = direction == StepDirection::minimize ? -1.0 : 1.0;

    auto update = [&](Vec& p, Vec& m, Vec& v, const Vec& g) {
        for (size_t i = 0; i < p.size(); ++i) {
            m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
            v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
            double mhat = m[i] / bc1;
            double vhat = v[i] / bc2;
            p[i] += sign * learning_rate * mhat / (std::sqrt(vhat) + epsilon_div);
        }
    };
    for (size_t l = 0; l < net.weights.size(); ++l) {
        update(net.weights[l], m_weights[l], v_weights[l], tape.dweights[l]);
        update(net.biases[l], m_biases[l], v_biases[l], tape.dbiases[l]);
    }
    net.assert_finite("adam step");
    return true;
}

std::pair<double, Vec> mse_loss(std::span<const double> pred, std::span<const double> target) {
    if (pred.empty() || pred.size() != target.size())
        throw std::invalid_argument("mse_loss: empty or mismatched vectors");
    double n = static_cast<double>(pred.size());
    double loss = 0.0;
    Vec grad(pred.size(), 0.0);
    for (size_t i = 0; i < pred.size(); ++i) {
        double d = pred[i] - target[i];
        loss += d * d;
        grad[i] = 2.0 * d / n;
    }
    return {loss / n, grad};
}

std::pair<double, Vec> bce_loss(std::span<const double> pred, std::span<const double> target) {
    if (pred.empty() || pred.size() != target.size())
        throw std::invalid_argument("bce_loss: empty or mismatched vectors");
    constexpr double kFloor = 1e-7;
    double n = static_cast<double>(pred.size());
    double loss = 0.0;
    Vec grad(pred.size(), 0.0);
    for (size_t i = 0; i < pred.size(); ++i) {
        double t = target[i];
        if (t != 0.0 && t != 1.0)
            throw std::invalid_argument("bce_loss: target entries must be 0 or 1");
        double p = std::min(1.0 - kFloor, std::max(kFloor, pred[i]));
        loss += -(t * std::log(p) + (1.0 - t) * std::log(1.0 - p));
        grad[i] = (-t / p + (1.0 - t) / (1.0 - p)) / n;
    }
    return {loss / n, grad};
}

void save_mlp(const Mlp& net, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_mlp: cannot open " + path);
    std::ostringstream header;
    header << "mlp ";
    for (size_t i = 0; i < net.layer_dims.size(); ++i) {
        if (i) header << 'x';
        header << net.layer_dims[i];
    }
    header << ' ' << act_name(net.hidden_activation) << ' ' << act_name(net.output_activation)
           << '\n';
    out << header.str();

    auto put = [&](double x) {
        uint64_t bits;
        std::memcpy(&bits, &x, sizeof bits);
        unsigned char bytes[8];
        for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
        out.write(reinterpret_cast<const char*>(bytes), 8);
    };
    for (size_t l = 0; l < net.weights.size(); ++l) {
        for (double w : net.weights[l]) put(w);
        for (double b : net.biases[l]) put(b);
    }
    if (!out) throw std::runtime_error("save_mlp: write failed for " + path);
}

Mlp load_mlp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_mlp: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("load_mlp: missing header in " + path);
    std::istringstream hs(line);
    std::string magic, dims_str, hidden_str, out_str;
    hs >> magic >> dims_str >> hidden_str >> out_str;
    if (magic != "mlp" || dims_str.empty() || hidden_str.empty() || out_str.empty())
        throw std::runtime_error("load_mlp: malformed header in " + path);
    std::vector<int> dims;
    size_t pos = 0;
    while (pos < dims_str.size()) {
        size_t x = dims_str.find('x', pos);
        std::string tok = dims_str.substr(pos, x == std::string::npos ? x : x - pos);
        dims.push_back(std::stoi(tok));
        if (x == std::string::npos) break;
        pos = x + 1;
    }
    Mlp net(dims, act_from_name(hidden_str), act_from_name(out_str));

    auto get = [&]() {
        unsigned char bytes[8];
        in.read(reinterpret_cast<char*>(bytes), 8);
        if (!in) throw std::runtime_error("load_mlp: truncated stream in " + path);
        uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= static_cast<uint64_t>(bytes[i]) << (8 * i);
        double x;
        std::memcpy(&x, &bits, sizeof x);
        return x;
    };
    for (size_t l = 0; l < net.weights.size(); ++l) {
        for (double& w : net.weights[l]) w = get();
        for (double& b : net.biases[l]) b = get();
    }
    return net;
}

}  // namespace sasrl
