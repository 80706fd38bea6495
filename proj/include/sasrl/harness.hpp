#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sasrl/config.hpp"
#include "sasrl/curve.hpp"
#include "sasrl/trainer.hpp"

namespace sasrl {

// Experiment runner configuration: one sub-run per seed, shared learner
// settings, environment overrides passed through to the factory.
struct RunConfig {
    Algo algo = Algo::sasrl;
    std::string env_name = "gridworld";
    std::vector<long> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    long max_gradient_steps = 20000;
    SasrlConfig learner;
    std::optional<double> gamma_override;  // unset: adopt the environment default
    KvMap env_overrides;
    int workers = 0;  // 0: hardware concurrency
    bool log_trajectories = true;
    bool train_transition_model = false;  // optional post-training fit phase
    long kprobe_state_bins = 10;
    long kprobe_action_bins = 8;
    long kprobe_support = 5;
    std::string out_dir = "runs";
    std::string run_id;  // default "<algo>-<env>"

    static RunConfig from_kv(const KvMap& kv);  // rejects unknown keys
    KvMap to_kv() const;                        // manifest round-trip
    std::string effective_run_id() const;
    void validate() const;
};

struct ExperimentResult {
    std::string dir;
    std::vector<long> surviving_seeds;
    std::vector<long> diverged_seeds;
    LearningCurve aggregate;
};

// Runs every seed (in parallel worker slots), writes per-seed curve CSVs,
// the aggregate CSV, checkpoints, the k-probe report, and a reproducibility
// manifest. Divergent seeds are recorded and skipped in the aggregate.
ExperimentResult run_experiment(const RunConfig& config);

// Mean/min/max across the per-seed mean returns, row by row. All curves must
// share the same gradient-step grid.
LearningCurve aggregate_curves(const std::vector<LearningCurve>& curves);

struct CompareEntry {
    std::string dir;
    std::string algo;
    std::string env;
    double plateau_return = 0.0;
    long steps_to_plateau = 0;
};

struct CompareReport {
    std::vector<CompareEntry> entries;
    // improvement_pct[i][j]: plateau improvement of run i over run j, percent
    std::vector<std::vector<double>> improvement_pct;
    std::string table;
};

// Final-plateau comparison across artifact directories sharing an env and an
// evaluation grid. Plateau is the mean return over the last quarter of the
// curve; steps-to-plateau is the first step within 5% of it.
CompareReport compare_runs(const std::vector<std::string>& dirs);
void write_compare_csv(const CompareReport& report, const std::string& path);

// Plateau helpers shared by compare_runs and tests.
double plateau_return(const LearningCurve& curve);
long steps_to_plateau(const LearningCurve& curve);

// Post-hoc transition model fit from a run directory's trajectory logs.
// Returns the final loss; writes seed_<seed>.tmodel next to the logs.
double fit_transition_from_run(const std::string& run_dir, long seed);

}  // namespace sasrl
