#include "sasrl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include "sasrl/env_factory.hpp"
#include "sasrl/occupancy.hpp"
#include "sasrl/transition_model.hpp"

namespace fs = std::filesystem;

namespace sasrl {

namespace {

constexpr const char* kCodeVersion = "sasrl-0.1.0";

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "algo", "env", "seeds", "max_gradient_steps", "workers", "out_dir", "run_id",
        "log_trajectories", "train_transition_model", "gamma", "actor_lr", "critic_lr",
        "soft_eps", "batch_size", "eval_interval", "eval_episodes", "projection_candidates",
        "behavior_policy", "explore_sigma_scale", "granularity", "hidden_width",
        "buffer_capacity", "prefill_samples", "collect_episodes", "plateau_patience",
        "tmodel_initial_epochs", "tmodel_refit_epochs", "tmodel_batch_size", "tmodel_lr",
        "kprobe_state_bins", "kprobe_action_bins", "kprobe_support", "code_version",
    };
    return keys;
}

bool is_env_override(const std::string& key) {
    return key.rfind("grid.", 0) == 0 || key.rfind("berzerk.", 0) == 0 ||
           key.rfind("slot.", 0) == 0;
}

std::string format_double(double x) {
    std::ostringstream out;
    out << std::setprecision(17) << x;
    return out.str();
}

}  // namespace

RunConfig RunConfig::from_kv(const KvMap& kv) {
    for (const auto& [key, value] : kv)
        if (!known_keys().count(key) && !is_env_override(key))
            throw ConfigError("unknown config key: " + key);

    RunConfig cfg;
    try {
        cfg.algo = algo_from_name(kv_string(kv, "algo", "sasrl"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    cfg.env_name = kv_string(kv, "env", "gridworld");
    cfg.seeds = kv_long_list(kv, "seeds", cfg.seeds);
    cfg.max_gradient_steps = kv_long(kv, "max_gradient_steps", cfg.max_gradient_steps);
    cfg.workers = static_cast<int>(kv_long(kv, "workers", cfg.workers));
    cfg.out_dir = kv_string(kv, "out_dir", cfg.out_dir);
    cfg.run_id = kv_string(kv, "run_id", cfg.run_id);
    cfg.log_trajectories = kv_bool(kv, "log_trajectories", cfg.log_trajectories);
    cfg.train_transition_model =
        kv_bool(kv, "train_transition_model", cfg.train_transition_model);

    if (kv.count("gamma")) cfg.gamma_override = kv_double(kv, "gamma", 0.0);
    SasrlConfig& L = cfg.learner;
    L.actor_lr = kv_double(kv, "actor_lr", L.actor_lr);
    L.critic_lr = kv_double(kv, "critic_lr", L.critic_lr);
    L.soft_eps = kv_double(kv, "soft_eps", L.soft_eps);
    L.batch_size = static_cast<int>(kv_long(kv, "batch_size", L.batch_size));
    L.eval_interval = static_cast<int>(kv_long(kv, "eval_interval", L.eval_interval));
    L.eval_episodes = static_cast<int>(kv_long(kv, "eval_episodes", L.eval_episodes));
    L.projection_candidates =
        static_cast<int>(kv_long(kv, "projection_candidates", L.projection_candidates));
    std::string behavior = kv_string(kv, "behavior_policy", "noisy_actor");
    if (behavior == "noisy_actor")
        L.behavior_policy = BehaviorMode::noisy_actor;
    else if (behavior == "uniform_random")
        L.behavior_policy = BehaviorMode::uniform_random;
    else
        throw ConfigError("unknown behavior_policy: " + behavior);
    L.explore_sigma_scale = kv_double(kv, "explore_sigma_scale", L.explore_sigma_scale);
    try {
        L.granularity = granularity_from_name(kv_string(kv, "granularity", "continuous"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    L.hidden_width = static_cast<int>(kv_long(kv, "hidden_width", L.hidden_width));
    L.buffer_capacity =
        static_cast<size_t>(kv_long(kv, "buffer_capacity", static_cast<long>(L.buffer_capacity)));
    L.prefill_samples = static_cast<int>(kv_long(kv, "prefill_samples", L.prefill_samples));
    L.collect_episodes = static_cast<int>(kv_long(kv, "collect_episodes", L.collect_episodes));
    L.plateau_patience = static_cast<int>(kv_long(kv, "plateau_patience", L.plateau_patience));
    L.tmodel_initial_epochs =
        static_cast<int>(kv_long(kv, "tmodel_initial_epochs", L.tmodel_initial_epochs));
    L.tmodel_refit_epochs =
        static_cast<int>(kv_long(kv, "tmodel_refit_epochs", L.tmodel_refit_epochs));
    L.tmodel_batch_size = static_cast<int>(kv_long(kv, "tmodel_batch_size", L.tmodel_batch_size));
    L.tmodel_lr = kv_double(kv, "tmodel_lr", L.tmodel_lr);

    cfg.kprobe_state_bins = kv_long(kv, "kprobe_state_bins", cfg.kprobe_state_bins);
    cfg.kprobe_action_bins = kv_long(kv, "kprobe_action_bins", cfg.kprobe_action_bins);
    cfg.kprobe_support = kv_long(kv, "kprobe_support", cfg.kprobe_support);

    for (const auto& [key, value] : kv)
        if (is_env_override(key)) cfg.env_overrides[key] = value;
    cfg.validate();
    return cfg;
}

KvMap RunConfig::to_kv() const {
    KvMap kv;
    kv["code_version"] = kCodeVersion;
    kv["algo"] = algo_name(algo);
    kv["env"] = env_name;
    std::ostringstream seeds_text;
    for (size_t i = 0; i < seeds.size(); ++i) seeds_text << (i ? "," : "") << seeds[i];
    kv["seeds"] = seeds_text.str();
    kv["max_gradient_steps"] = std::to_string(max_gradient_steps);
    kv["workers"] = std::to_string(workers);
    kv["out_dir"] = out_dir;
    kv["run_id"] = effective_run_id();
    kv["log_trajectories"] = log_trajectories ? "true" : "false";
    kv["train_transition_model"] = train_transition_model ? "true" : "false";
    if (gamma_override) kv["gamma"] = format_double(*gamma_override);
    kv["actor_lr"] = format_double(learner.actor_lr);
    kv["critic_lr"] = format_double(learner.critic_lr);
    kv["soft_eps"] = format_double(learner.soft_eps);
    kv["batch_size"] = std::to_string(learner.batch_size);
    kv["eval_interval"] = std::to_string(learner.eval_interval);
    kv["eval_episodes"] = std::to_string(learner.eval_episodes);
    kv["projection_candidates"] = std::to_string(learner.projection_candidates);
    kv["behavior_policy"] =
        learner.behavior_policy == BehaviorMode::noisy_actor ? "noisy_actor" : "uniform_random";
    kv["explore_sigma_scale"] = format_double(learner.explore_sigma_scale);
    kv["granularity"] = granularity_name(learner.granularity);
    kv["hidden_width"] = std::to_string(learner.hidden_width);
    kv["buffer_capacity"] = std::to_string(learner.buffer_capacity);
    kv["prefill_samples"] = std::to_string(learner.prefill_samples);
    kv["collect_episodes"] = std::to_string(learner.collect_episodes);
    kv["plateau_patience"] = std::to_string(learner.plateau_patience);
    kv["tmodel_initial_epochs"] = std::to_string(learner.tmodel_initial_epochs);
    kv["tmodel_refit_epochs"] = std::to_string(learner.tmodel_refit_epochs);
    kv["tmodel_batch_size"] = std::to_string(learner.tmodel_batch_size);
    kv["tmodel_lr"] = format_double(learner.tmodel_lr);
    kv["kprobe_state_bins"] = std::to_string(kprobe_state_bins);
    kv["kprobe_action_bins"] = std::to_string(kprobe_action_bins);
    kv["kprobe_support"] = std::to_string(kprobe_support);
    for (const auto& [key, value] : env_overrides) kv[key] = value;
    return kv;
}

std::string RunConfig::effective_run_id() const {
    return run_id.empty() ? algo_name(algo) + "-" + env_name : run_id;
}

void RunConfig::validate() const {
    if (seeds.empty()) throw ConfigError("seeds must be non-empty");
    std::set<long> unique(seeds.begin(), seeds.end());
    if (unique.size() != seeds.size()) throw ConfigError("seeds must be distinct");
    if (max_gradient_steps < 0) throw ConfigError("max_gradient_steps must be >= 0");
    if (kprobe_state_bins <= 0 || kprobe_action_bins <= 0 || kprobe_support < 1)
        throw ConfigError("k-probe bins and support must be positive");
    try {
        learner.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("learner config: ") + e.what());
    }
}

LearningCurve aggregate_curves(const std::vector<LearningCurve>& curves) {
    LearningCurve agg;
    if (curves.empty()) return agg;
    size_t rows = curves.front().rows.size();
    for (const LearningCurve& c : curves)
        if (c.rows.size() != rows)
            throw std::runtime_error("aggregate: per-seed curves have different lengths");
    for (size_t r = 0; r < rows; ++r) {
        LearningCurve::Row row;
        row.gradient_step = curves.front().rows[r].gradient_step;
        double mean = 0.0;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (const LearningCurve& c : curves) {
            if (c.rows[r].gradient_step != row.gradient_step)
                throw std::runtime_error("aggregate: curves disagree on the gradient-step grid");
            double m = c.rows[r].mean_return;
            mean += m;
            lo = std::min(lo, m);
            hi = std::max(hi, m);
        }
        row.mean_return = mean / static_cast<double>(curves.size());
        row.min_return = lo;
        row.max_return = hi;
        agg.rows.push_back(row);
    }
    return agg;
}

ExperimentResult run_experiment(const RunConfig& config) {
    config.validate();
    fs::path dir = fs::path(config.out_dir) / config.effective_run_id();
    fs::create_directories(dir);

    // reproducibility manifest: the effective config, re-parseable as a config file
    {
        std::ofstream manifest(dir / "manifest.txt");
        if (!manifest) throw std::runtime_error("cannot write manifest in " + dir.string());
        manifest << "# reproducibility manifest; rerun with: sasrl train --config manifest.txt\n";
        for (const auto& [key, value] : config.to_kv()) manifest << key << "=" << value << "\n";
    }

    struct SeedOutcome {
        bool diverged = false;
        std::string note;
        LearningCurve curve;
    };
    std::vector<SeedOutcome> outcomes(config.seeds.size());

    std::atomic<size_t> next_index{0};
    auto worker = [&]() {
        while (true) {
            size_t i = next_index.fetch_add(1);
            if (i >= config.seeds.size()) break;
            long seed = config.seeds[i];
            std::string prefix = (dir / ("seed_" + std::to_string(seed))).string();
            try {
                auto env = make_env(config.env_name, config.env_overrides,
                                    static_cast<uint64_t>(seed));
                SasrlConfig learner = config.learner;
                learner.gamma = config.gamma_override.value_or(env->gamma());
                TrainOutputs outputs;
                outputs.checkpoint_prefix = prefix;
                if (config.log_trajectories) outputs.trajectory_log_path = prefix + ".log";
                TrainResult result = train_run(*env, config.algo, learner,
                                               config.max_gradient_steps,
                                               static_cast<uint64_t>(seed), outputs);
                write_curve_csv(result.curve, prefix + ".csv");
                if (config.train_transition_model && env->has_inverse_action() &&
                    config.log_trajectories) {
                    // optional phase: fit the inverse model from this seed's log
                    fit_transition_from_run(dir.string(), seed);
                }
                outcomes[i].curve = std::move(result.curve);
            } catch (const DivergenceError& e) {
                outcomes[i].diverged = true;
                outcomes[i].note = e.what();
            } catch (const std::exception& e) {
                outcomes[i].diverged = true;
                outcomes[i].note = std::string("seed failed: ") + e.what();
            }
        }
    };
    int workers = config.workers > 0 ? config.workers
                                     : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min<int>(workers, static_cast<int>(config.seeds.size())));
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();

    ExperimentResult result;
    result.dir = dir.string();
    std::vector<LearningCurve> curves;
    for (size_t i = 0; i < config.seeds.size(); ++i) {
        if (outcomes[i].diverged)
            result.diverged_seeds.push_back(config.seeds[i]);
        else {
            result.surviving_seeds.push_back(config.seeds[i]);
            curves.push_back(outcomes[i].curve);
        }
    }
    if (!result.diverged_seeds.empty()) {
        std::ofstream failures(dir / "failures.txt");
        for (size_t i = 0; i < config.seeds.size(); ++i)
            if (outcomes[i].diverged)
                failures << "seed " << config.seeds[i] << ": " << outcomes[i].note << "\n";
        std::cerr << "warning: " << result.diverged_seeds.size()
                  << " seed(s) diverged; aggregate covers survivors only\n";
    }
    if (curves.empty()) throw DivergenceError("all seeds diverged in " + dir.string());
    result.aggregate = aggregate_curves(curves);
    write_curve_csv(result.aggregate, (dir / "aggregate.csv").string());

    // k probe over the logged behavior data, merged across surviving seeds
    if (config.log_trajectories) {
        auto probe_env = make_env(config.env_name, config.env_overrides, 0);
        Discretizer state_disc(probe_env->state_box(),
                               static_cast<int>(config.kprobe_state_bins));
        Discretizer action_disc(probe_env->action_box(),
                                static_cast<int>(config.kprobe_action_bins));
        OccupancyStats stats;
        for (long seed : result.surviving_seeds) {
            auto samples =
                read_trajectory_log((dir / ("seed_" + std::to_string(seed) + ".log")).string());
            accumulate(stats, samples, state_disc, action_disc);
        }
        write_histogram_csv(stats, (dir / "kprobe_hist.csv").string());
        std::ofstream report(dir / "kprobe.txt");
        try {
            KEstimate est = estimate_k(stats, static_cast<uint64_t>(config.kprobe_support));
            report << format_k_report(stats.total_steps, est) << "\n";
        } catch (const NotEnoughDataError& e) {
            report << "insufficient-data " << e.what() << "\n";
        }
    }
    return result;
}

double plateau_return(const LearningCurve& curve) {
    if (curve.rows.empty()) throw std::runtime_error("plateau: empty curve");
    size_t window = std::max<size_t>(1, curve.rows.size() / 4);
    double sum = 0.0;
    for (size_t i = curve.rows.size() - window; i < curve.rows.size(); ++i)
        sum += curve.rows[i].mean_return;
    return sum / static_cast<double>(window);
}

long steps_to_plateau(const LearningCurve& curve) {
    if (curve.rows.empty()) throw std::runtime_error("plateau: empty curve");
    double plateau = plateau_return(curve);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& row : curve.rows) {
        lo = std::min(lo, row.mean_return);
        hi = std::max(hi, row.mean_return);
    }
    double tolerance = 0.05 * (hi - lo);
    for (const auto& row : curve.rows)
        if (row.mean_return >= plateau - tolerance) return row.gradient_step;
    return curve.rows.back().gradient_step;
}

CompareReport compare_runs(const std::vector<std::string>& dirs) {
    if (dirs.empty()) throw ConfigError("compare: no run directories given");
    CompareReport report;
    std::vector<LearningCurve> curves;
    std::string shared_env;
    for (const std::string& d : dirs) {
        KvMap manifest = parse_kv_file((fs::path(d) / "manifest.txt").string());
        CompareEntry entry;
        entry.dir = d;
        entry.algo = kv_string(manifest, "algo", "?");
        entry.env = kv_string(manifest, "env", "?");
        if (shared_env.empty())
            shared_env = entry.env;
        else if (entry.env != shared_env)
            throw ConfigError("compare: runs use different environments (" + shared_env + " vs " +
                              entry.env + ")");
        LearningCurve curve = read_curve_csv((fs::path(d) / "aggregate.csv").string());
        if (curve.rows.empty()) throw ConfigError("compare: empty aggregate curve in " + d);
        entry.plateau_return = plateau_return(curve);
        entry.steps_to_plateau = steps_to_plateau(curve);
        curves.push_back(std::move(curve));
        report.entries.push_back(std::move(entry));
    }
    for (size_t i = 1; i < curves.size(); ++i) {
        if (curves[i].rows.size() != curves[0].rows.size())
            throw ConfigError("compare: evaluation grids differ between runs");
        for (size_t r = 0; r < curves[i].rows.size(); ++r)
            if (curves[i].rows[r].gradient_step != curves[0].rows[r].gradient_step)
                throw ConfigError("compare: evaluation grids differ between runs");
    }

    size_t n = report.entries.size();
    report.improvement_pct.assign(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            double a = report.entries[i].plateau_return;
            double b = report.entries[j].plateau_return;
            report.improvement_pct[i][j] =
                std::abs(b) < 1e-12 ? 0.0 : 100.0 * (a - b) / std::abs(b);
        }

    std::ostringstream table;
    table << std::left << std::setw(24) << "run" << std::setw(10) << "algo" << std::setw(12)
          << "env" << std::setw(18) << "plateau_return" << std::setw(18) << "steps_to_plateau"
          << "\n";
    for (const CompareEntry& e : report.entries)
        table << std::left << std::setw(24) << fs::path(e.dir).filename().string() << std::setw(10)
              << e.algo << std::setw(12) << e.env << std::setw(18) << e.plateau_return
              << std::setw(18) << e.steps_to_plateau << "\n";
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            if (i != j)
                table << fs::path(report.entries[i].dir).filename().string() << " vs "
                      << fs::path(report.entries[j].dir).filename().string() << ": "
                      << std::showpos << report.improvement_pct[i][j] << std::noshowpos << "%\n";
    report.table = table.str();
    return report;
}

void write_compare_csv(const CompareReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open compare csv: " + path);
    out << "run,algo,env,plateau_return,steps_to_plateau\n";
    out << std::setprecision(17);
    for (const CompareEntry& e : report.entries)
        out << fs::path(e.dir).filename().string() << ',' << e.algo << ',' << e.env << ','
            << e.plateau_return << ',' << e.steps_to_plateau << "\n";
}

double fit_transition_from_run(const std::string& run_dir, long seed) {
    KvMap manifest = parse_kv_file((fs::path(run_dir) / "manifest.txt").string());
    RunConfig config = RunConfig::from_kv(manifest);
    auto env = make_env(config.env_name, config.env_overrides, static_cast<uint64_t>(seed));
    std::string log_path = (fs::path(run_dir) / ("seed_" + std::to_string(seed) + ".log")).string();
    auto samples = read_trajectory_log(log_path);
    if (samples.empty()) throw NotReadyError("fit-transition: empty trajectory log " + log_path);

    ReplayBuffer buffer(std::max<size_t>(samples.size(), 1), mix_seed(seed, 0xF17));
    for (const TransitionSample& t : samples) buffer.push(t);
    TransitionModel model(env->state_box(), env->action_box(), LossKind::mse_continuous,
                          config.learner.hidden_width, config.learner.tmodel_lr,
                          mix_seed(seed, 0x7A0));
    double loss = model.fit(buffer, config.learner.tmodel_initial_epochs,
                            config.learner.tmodel_batch_size);
    model.save((fs::path(run_dir) / ("seed_" + std::to_string(seed) + ".tmodel")).string());
    return loss;
}

}  // namespace sasrl
