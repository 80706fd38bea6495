#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "sasrl/env_factory.hpp"
#include "sasrl/harness.hpp"
#include "sasrl/occupancy.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitDivergence = 3;

int cmd_train(const std::string& config_path, const std::vector<std::string>& overrides) {
    sasrl::KvMap kv;
    if (!config_path.empty()) kv = sasrl::parse_kv_file(config_path);
    for (const std::string& entry : overrides) {
        size_t eq = entry.find('=');
        if (eq == std::string::npos)
            throw sasrl::ConfigError("override must be key=value: " + entry);
        kv[entry.substr(0, eq)] = entry.substr(eq + 1);
    }
    sasrl::RunConfig config = sasrl::RunConfig::from_kv(kv);
    sasrl::ExperimentResult result = sasrl::run_experiment(config);
    std::cout << "artifacts: " << result.dir << "\n";
    if (!result.aggregate.rows.empty())
        std::cout << "final aggregate mean return: " << result.aggregate.rows.back().mean_return
                  << "\n";
    if (!result.diverged_seeds.empty()) {
        std::cout << result.diverged_seeds.size() << " seed(s) diverged (see failures.txt)\n";
    }
    return kExitOk;
}

int cmd_probe_k(const std::string& log_path, const std::string& env_name, long state_bins,
                long action_bins, long support, const std::string& out_prefix) {
    auto env = sasrl::make_env(env_name, {}, 0);
    sasrl::Discretizer state_disc(env->state_box(), static_cast<int>(state_bins));
    sasrl::Discretizer action_disc(env->action_box(), static_cast<int>(action_bins));
    sasrl::OccupancyStats stats;
    auto samples = sasrl::read_trajectory_log(log_path);
    sasrl::accumulate(stats, samples, state_disc, action_disc);
    sasrl::KEstimate est = sasrl::estimate_k(stats, static_cast<uint64_t>(support));
    std::string line = sasrl::format_k_report(stats.total_steps, est);
    std::cout << line << "\n";
    if (!out_prefix.empty()) {
        std::ofstream report(out_prefix + ".txt");
        report << line << "\n";
        sasrl::write_histogram_csv(stats, out_prefix + "_hist.csv");
    }
    return kExitOk;
}

int cmd_compare(const std::vector<std::string>& dirs, const std::string& out_csv) {
    sasrl::CompareReport report = sasrl::compare_runs(dirs);
    std::cout << report.table;
    if (!out_csv.empty()) sasrl::write_compare_csv(report, out_csv);
    return kExitOk;
}

int cmd_fit_transition(const std::string& run_dir, long seed) {
    long chosen = seed;
    if (chosen < 0) {
        sasrl::KvMap manifest =
            sasrl::parse_kv_file((std::filesystem::path(run_dir) / "manifest.txt").string());
        chosen = sasrl::kv_long_list(manifest, "seeds", {1}).front();
    }
    double loss = sasrl::fit_transition_from_run(run_dir, chosen);
    std::cout << "final transition-model loss (seed " << chosen << "): " << loss << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sasRL experiment harness"};
    app.require_subcommand(1);

    auto* train = app.add_subcommand("train", "run a multi-seed training experiment");
    std::string config_path;
    std::vector<std::string> overrides;
    train->add_option("--config", config_path, "flat key=value config file");
    train->add_option("--set", overrides, "config override key=value (repeatable)");
    std::string algo, env_name, seeds, granularity, out_dir, run_id;
    long max_steps = -1, workers = -1;
    bool fit_tmodel = false;
    train->add_option("--algo", algo, "sasrl|ddpg");
    train->add_option("--env", env_name, "gridworld|berzerk|slot");
    train->add_option("--seeds", seeds, "comma-separated seed list");
    train->add_option("--granularity", granularity, "continuous|coarse|fine");
    train->add_option("--max-gradient-steps", max_steps, "gradient step budget");
    train->add_option("--out-dir", out_dir, "artifact root directory");
    train->add_option("--run-id", run_id, "artifact subdirectory name");
    train->add_option("--workers", workers, "parallel seed workers");
    train->add_flag("--train-transition-model", fit_tmodel,
                    "fit the inverse transition model after training");

    auto* probe = app.add_subcommand("probe-k", "estimate R1, R2 and k from a trajectory log");
    std::string log_path, probe_env, probe_out;
    long state_bins = 10, action_bins = 8, support = 5;
    probe->add_option("--log", log_path, "trajectory log file")->required();
    probe->add_option("--env", probe_env, "environment the log came from")->required();
    probe->add_option("--bins", state_bins, "state bins per dimension");
    probe->add_option("--action-bins", action_bins, "action bins per dimension");
    probe->add_option("--support", support, "minimum cell count included in the ratios");
    probe->add_option("--out", probe_out, "report file prefix");

    auto* compare = app.add_subcommand("compare", "plateau comparison across run directories");
    std::vector<std::string> dirs;
    std::string compare_csv;
    compare->add_option("--runs", dirs, "artifact directories")->required()->expected(-1);
    compare->add_option("--out", compare_csv, "summary csv path");

    auto* fit = app.add_subcommand("fit-transition", "fit the inverse model from logged data");
    std::string run_dir;
    long fit_seed = -1;
    fit->add_option("--run", run_dir, "artifact directory")->required();
    fit->add_option("--seed", fit_seed, "seed whose log to use (default: first)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) {
            if (!algo.empty()) overrides.push_back("algo=" + algo);
            if (!env_name.empty()) overrides.push_back("env=" + env_name);
            if (!seeds.empty()) overrides.push_back("seeds=" + seeds);
            if (!granularity.empty()) overrides.push_back("granularity=" + granularity);
            if (max_steps >= 0)
                overrides.push_back("max_gradient_steps=" + std::to_string(max_steps));
            if (!out_dir.empty()) overrides.push_back("out_dir=" + out_dir);
            if (!run_id.empty()) overrides.push_back("run_id=" + run_id);
            if (workers >= 0) overrides.push_back("workers=" + std::to_string(workers));
            if (fit_tmodel) overrides.push_back("train_transition_model=true");
            return cmd_train(config_path, overrides);
        }
        if (probe->parsed())
            return cmd_probe_k(log_path, probe_env, state_bins, action_bins, support, probe_out);
        if (compare->parsed()) return cmd_compare(dirs, compare_csv);
        if (fit->parsed()) return cmd_fit_transition(run_dir, fit_seed);
    } catch (const sasrl::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const sasrl::NotEnoughDataError& e) {
        std::cerr << "not enough data: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const sasrl::DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return kExitDivergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfigError;
    }
    return kExitOk;
}
