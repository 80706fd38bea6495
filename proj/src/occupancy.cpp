#include "sasrl/occupancy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <vector>

namespace sasrl {

Discretizer::Discretizer(Box box_, std::vector<int> bins_)
    : box(std::move(box_)), bins(std::move(bins_)) {
    if (box.width() != static_cast<int>(bins.size()))
        throw std::invalid_argument("discretizer: one bin count per dimension");
    for (int b : bins)
        if (b <= 0) throw std::invalid_argument("discretizer: bin counts must be positive");
}

Discretizer::Discretizer(Box box_, int bins_per_dim)
    : Discretizer(box_, std::vector<int>(box_.low.size(), bins_per_dim)) {}

uint64_t Discretizer::cell_count() const {
    uint64_t n = 1;
    for (int b : bins) n *= static_cast<uint64_t>(b);
    return n;
}

uint64_t Discretizer::cell(const Vec& x, bool* clamped) const {
    if (static_cast<int>(x.size()) != box.width())
        throw std::invalid_argument("discretizer: dimension mismatch");
    uint64_t index = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        double lo = box.low[i], hi = box.high[i];
        double span = hi - lo;
        int b = bins[i];
        int cell_i;
        if (span <= 0.0) {
            cell_i = 0;
        } else {
            double t = (x[i] - lo) / span;
            if (t < 0.0 || t > 1.0) {
                if (clamped) *clamped = true;
                t = std::min(1.0, std::max(0.0, t));
            }
            cell_i = std::min(b - 1, static_cast<int>(t * b));
        }
        index = index * static_cast<uint64_t>(b) + static_cast<uint64_t>(cell_i);
    }
    return index;
}

void OccupancyStats::merge(const OccupancyStats& other) {
    total_steps += other.total_steps;
    for (const auto& [key, count] : other.nu_sa) nu_sa[key] += count;
    for (const auto& [key, count] : other.nu_ss) nu_ss[key] += count;
}

void accumulate(OccupancyStats& stats, std::span<const TransitionSample> samples,
                const Discretizer& state_disc, const Discretizer& action_disc) {
    bool clamped = false;
    for (const TransitionSample& t : samples) {
        uint64_t s_cell = state_disc.cell(t.s.values, &clamped);
        uint64_t a_cell = action_disc.cell(t.a.values, &clamped);
        uint64_t s_next_cell = state_disc.cell(t.s_next.values, &clamped);
        stats.nu_sa[{s_cell, a_cell}] += 1;
        stats.nu_ss[{s_cell, s_next_cell}] += 1;
        stats.total_steps += 1;
    }
    if (clamped)
        std::cerr << "occupancy: out-of-box samples were counted in boundary cells\n";
}

namespace {

// min/max counts over supported cells; 0 supported cells -> nullopt-like flag
struct MinMax {
    uint64_t min_count = 0;
    uint64_t max_count = 0;
    uint64_t supported = 0;
    uint64_t distinct = 0;
};

MinMax supported_min_max(const PairCounts& counts, uint64_t threshold) {
    MinMax mm;
    mm.min_count = std::numeric_limits<uint64_t>::max();
    for (const auto& [key, count] : counts) {
        ++mm.distinct;
        if (count < threshold) continue;
        ++mm.supported;
        mm.min_count = std::min(mm.min_count, count);
        mm.max_count = std::max(mm.max_count, count);
    }
    return mm;
}

}  // namespace

KEstimate estimate_k(const OccupancyStats& stats, uint64_t support_threshold) {
    if (stats.total_steps == 0) throw NotEnoughDataError("k estimate: no recorded steps");
    MinMax sa = supported_min_max(stats.nu_sa, support_threshold);
    MinMax ss = supported_min_max(stats.nu_ss, support_threshold);

    auto complain = [&](const char* map_name, const MinMax& mm) {
        std::ostringstream msg;
        msg << "k estimate: only " << mm.supported << " " << map_name
            << " cells meet the support threshold " << support_threshold << " (" << mm.distinct
            << " visited); collect roughly " << 10 * std::max<uint64_t>(stats.total_steps, 1)
            << " steps and retry";
        throw NotEnoughDataError(msg.str());
    };
    // A single visited cell is a legitimate degenerate support (ratio 1).
    // Multiple visited cells with fewer than two supported ones means the
    // sample is too thin to compare min against max.
    if (sa.supported == 0 || (sa.distinct >= 2 && sa.supported < 2)) complain("(s,a)", sa);
    if (ss.supported == 0 || (ss.distinct >= 2 && ss.supported < 2)) complain("(s,s')", ss);

    KEstimate est;
    est.supported_sa = sa.supported;
    est.supported_ss = ss.supported;
    // probabilities are counts / W; W cancels in the ratios
    est.r1 = static_cast<double>(sa.min_count) / static_cast<double>(sa.max_count);
    est.r2 = static_cast<double>(ss.min_count) / static_cast<double>(ss.max_count);
    est.k = est.r2 / est.r1;
    return est;
}

std::string regime_name(SpeedupRegime r) {
    switch (r) {
        case SpeedupRegime::mMRP_faster: return "mMRP_faster";
        case SpeedupRegime::neutral: return "neutral";
        case SpeedupRegime::MDP_faster: return "MDP_faster";
    }
    return "neutral";
}

SpeedupRegime predict_speedup_regime(double k) {
    if (!(k > 0.0)) throw std::invalid_argument("speedup regime: k must be positive");
    if (std::abs(k - 1.0) <= 0.05) return SpeedupRegime::neutral;
    return k > 1.0 ? SpeedupRegime::mMRP_faster : SpeedupRegime::MDP_faster;
}

std::string format_k_report(uint64_t total_steps, const KEstimate& est) {
    std::ostringstream out;
    out << total_steps << " " << est.r1 << " " << est.r2 << " " << est.k << " "
        << regime_name(predict_speedup_regime(est.k));
    return out.str();
}

void write_histogram_csv(const OccupancyStats& stats, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open histogram csv: " + path);
    out << "map,s_cell,other_cell,count,probability\n";
    double w = static_cast<double>(std::max<uint64_t>(stats.total_steps, 1));
    auto dump = [&](const char* name, const PairCounts& counts) {
        // deterministic output order
        std::vector<std::pair<CellPair, uint64_t>> rows(counts.begin(), counts.end());
        std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
            return a.first.first != b.first.first ? a.first.first < b.first.first
                                                  : a.first.second < b.first.second;
        });
        for (const auto& [key, count] : rows)
            out << name << ',' << key.first << ',' << key.second << ',' << count << ','
                << static_cast<double>(count) / w << "\n";
    };
    dump("sa", stats.nu_sa);
    dump("ss", stats.nu_ss);
}

}  // namespace sasrl
