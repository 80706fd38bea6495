#include "sasrl/mmrp.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace sasrl {

bool Box::contains(const Vec& x, double tol) const {
    if (x.size() != low.size()) return false;
    for (size_t i = 0; i < x.size(); ++i)
        if (x[i] < low[i] - tol || x[i] > high[i] + tol) return false;
    return true;
}

Vec Box::clamp(const Vec& x) const {
    Vec out(x);
    for (size_t i = 0; i < out.size() && i < low.size(); ++i)
        out[i] = std::min(high[i], std::max(low[i], out[i]));
    return out;
}

bool TransitionSample::finite() const {
    if (!std::isfinite(r)) return false;
    for (double x : s.values)
        if (!std::isfinite(x)) return false;
    for (double x : s_next.values)
        if (!std::isfinite(x)) return false;
    for (double x : a.values)
        if (!std::isfinite(x)) return false;
    return s.width() == s_next.width();
}

ReplayBuffer::ReplayBuffer(size_t capacity, uint64_t seed) : capacity_(capacity), rng_(seed) {
    if (capacity == 0) throw std::invalid_argument("ReplayBuffer capacity must be positive");
}

bool ReplayBuffer::push(const TransitionSample& sample) {
    if (!sample.finite()) {
        std::cerr << "replay buffer: rejected sample with non-finite fields\n";
        return false;
    }
    storage_.push_back(sample);
    if (storage_.size() > capacity_) storage_.pop_front();
    return true;
}

std::vector<TransitionSample> ReplayBuffer::sample(size_t n) {
    if (storage_.empty()) throw NotReadyError("replay buffer is empty; collect samples first");
    std::vector<TransitionSample> out;
    out.reserve(n);
    for (size_t i = 0; i < n; ++i) out.push_back(storage_[rng_.index(storage_.size())]);
    return out;
}

RolloutResult rollout(Env& env, const Policy& policy, int max_steps, uint64_t rng_seed) {
    if (max_steps < 1) throw std::invalid_argument("rollout: max_steps must be >= 1");
    RolloutResult result;
    env.seed(rng_seed);
    EnvState s = env.reset();
    double discount = 1.0;
    double gamma = env.gamma();
    for (int t = 0; t < max_steps; ++t) {
        ActionVec a = env.project_action(policy(s));
        StepResult step = env.step(a);
        result.samples.push_back({s, step.s_next, a, step.r, step.done});
        result.episode_return += step.r;
        result.discounted_return += discount * step.r;
        discount *= gamma;
        s = step.s_next;
        if (step.done) break;
    }
    return result;
}

void append_trajectory_log(std::ostream& out, const std::vector<TransitionSample>& samples) {
    out << std::setprecision(17);
    for (const auto& t : samples) {
        for (size_t i = 0; i < t.s.values.size(); ++i) out << (i ? " " : "") << t.s.values[i];
        out << " | ";
        for (size_t i = 0; i < t.a.values.size(); ++i) out << (i ? " " : "") << t.a.values[i];
        out << " | ";
        for (size_t i = 0; i < t.s_next.values.size(); ++i)
            out << (i ? " " : "") << t.s_next.values[i];
        out << " | " << t.r << " | " << (t.done ? 1 : 0) << "\n";
    }
}

void write_trajectory_log(const std::string& path, const std::vector<TransitionSample>& samples) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open trajectory log for writing: " + path);
    append_trajectory_log(out, samples);
}

std::vector<TransitionSample> read_trajectory_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trajectory log: " + path);
    std::vector<TransitionSample> samples;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        size_t pos = 0;
        while (true) {
            size_t bar = line.find('|', pos);
            fields.push_back(line.substr(pos, bar == std::string::npos ? bar : bar - pos));
            if (bar == std::string::npos) break;
            pos = bar + 1;
        }
        if (fields.size() != 5)
            throw std::runtime_error("trajectory log " + path + ": bad field count at line " +
                                     std::to_string(lineno));
        auto parse_vec = [](const std::string& text) {
            Vec v;
            std::istringstream is(text);
            double x;
            while (is >> x) v.push_back(x);
            return v;
        };
        TransitionSample t;
        t.s.values = parse_vec(fields[0]);
        t.a.values = parse_vec(fields[1]);
        t.s_next.values = parse_vec(fields[2]);
        t.r = std::stod(fields[3]);
        t.done = std::stoi(fields[4]) != 0;
        samples.push_back(std::move(t));
    }
    return samples;
}

}  // namespace sasrl
