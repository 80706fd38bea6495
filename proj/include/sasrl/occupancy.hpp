#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>

#include "sasrl/mmrp.hpp"

namespace sasrl {

class NotEnoughDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Uniform per-dimension binning over a box. Out-of-box points clamp to the
// boundary cell.
struct Discretizer {
    Box box;
    std::vector<int> bins;  // one entry per dimension

    Discretizer() = default;
    Discretizer(Box box_, std::vector<int> bins_);
    Discretizer(Box box_, int bins_per_dim);

    uint64_t cell_count() const;
    uint64_t cell(const Vec& x, bool* clamped = nullptr) const;
};

struct CellPair {
    uint64_t first = 0;
    uint64_t second = 0;
    bool operator==(const CellPair&) const = default;
};

struct CellPairHash {
    size_t operator()(const CellPair& p) const {
        return static_cast<size_t>(mix_seed(p.first, p.second));
    }
};

using PairCounts = std::unordered_map<CellPair, uint64_t, CellPairHash>;

// Empirical occupancy counts nu(s,a) and nu(s,s') over recorded steps.
struct OccupancyStats {
    uint64_t total_steps = 0;  // W
    PairCounts nu_sa;
    PairCounts nu_ss;

    // shard merge: counts are additive, associative, commutative
    void merge(const OccupancyStats& other);
};

// Records every sample into both count maps. Out-of-box entries land in the
// clamped boundary cell, with a warning on stderr (once per call).
void accumulate(OccupancyStats& stats, std::span<const TransitionSample> samples,
                const Discretizer& state_disc, const Discretizer& action_disc);

struct KEstimate {
    double r1 = 0.0;  // p_min(s,a) / p_max(s,a)
    double r2 = 0.0;  // p_min(s,s') / p_max(s,s')
    double k = 0.0;   // r2 / r1
    uint64_t supported_sa = 0;
    uint64_t supported_ss = 0;
};

// Min/max ratios over cells visited at least support_threshold times.
// Throws NotEnoughDataError when the support is too thin to compare.
KEstimate estimate_k(const OccupancyStats& stats, uint64_t support_threshold);

enum class SpeedupRegime { mMRP_faster, neutral, MDP_faster };

std::string regime_name(SpeedupRegime r);

// Threshold classification around k = 1 with a +-0.05 neutral band.
SpeedupRegime predict_speedup_regime(double k);

// "W r1 r2 k regime" single-line report.
std::string format_k_report(uint64_t total_steps, const KEstimate& est);

// Per-cell histogram: map,s_cell,other_cell,count,probability
void write_histogram_csv(const OccupancyStats& stats, const std::string& path);

}  // namespace sasrl
