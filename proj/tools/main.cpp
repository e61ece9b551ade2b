// Command-line surface for the random-duration signal detection toolkit.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rdsig/combinatorics.hpp"
#include "rdsig/config.hpp"
#include "rdsig/csv.hpp"
#include "rdsig/enumeration.hpp"
#include "rdsig/errors.hpp"
#include "rdsig/experiments.hpp"
#include "rdsig/exponent.hpp"
#include "rdsig/lrt.hpp"
#include "rdsig/monte_carlo.hpp"
#include "rdsig/sampling.hpp"
#include "rdsig/version.hpp"

namespace {

using nlohmann::json;
using namespace rdsig;

// Flags shared by every subcommand. Only flags the user actually set are
// collected, so config-file values survive unless explicitly overridden.
struct CommonFlags {
    std::string config_file;
    std::vector<KeyValue> collected;
};

void add_common_options(CLI::App* cmd, CommonFlags& f) {
    auto track = [&f](const std::string& key) {
        return [&f, key](const std::string& value) {
            f.collected.push_back(KeyValue{key, value, 0});
        };
    };
    cmd->add_option_function<std::string>("--config", [&f](const std::string& v) {
        f.config_file = v;
    }, "key=value config file (sections model.*, run.*, output.*)");
    cmd->add_option_function<std::string>("--preset", track("preset"),
                                          "experiment preset (fig1, fig_pmiss_sigma, "
                                          "fig_exponent_vs_bound, fig_mu1zero, fig_dishwasher)");
    cmd->add_option_function<std::string>("--out", track("output.dir"),
                                          "output directory");
    cmd->add_option_function<std::string>("--seed", track("run.seed"), "master seed");
    cmd->add_option_function<std::string>("--threads", track("run.threads"),
                                          "worker threads");
    cmd->add_option_function<std::string>("--scale", track("run.scale"),
                                          "run-count scale factor applied to run.J");
    cmd->add_option_function<std::string>("--delta", track("model.delta"),
                                          "duration spread");
    cmd->add_option_function<std::string>("--p1", track("model.p1"),
                                          "state-1 duration pmf ('uniform' or comma list)");
    cmd->add_option_function<std::string>("--p2", track("model.p2"),
                                          "state-2 duration pmf");
    cmd->add_option_function<std::string>("--mu1", track("model.mu1"),
                                          "state-1 signal level");
    cmd->add_option_function<std::string>("--mu2", track("model.mu2"),
                                          "state-2 signal level");
    cmd->add_option_function<std::string>("--sigma", track("model.sigma"),
                                          "noise standard deviation");
    cmd->add_option_function<std::string>("--mu0", track("model.mu0"),
                                          "baseline offset");
    cmd->add_option_function<std::string>("-T,--horizon", track("run.T"),
                                          "observation horizon");
    cmd->add_option_function<std::string>("-J,--runs", track("run.J"),
                                          "Monte Carlo runs per hypothesis (pre-scale)");
    cmd->add_option_function<std::string>("--alpha", track("run.alpha"),
                                          "false-alarm budget");
    cmd->add_option_function<std::string>("--sigma-grid", track("run.sigma_grid"),
                                          "comma list of noise levels");
}

ExperimentConfig resolve(const CommonFlags& f) {
    std::optional<std::filesystem::path> file;
    if (!f.config_file.empty()) file = f.config_file;
    return parse_config(file, f.collected);
}

Hypothesis parse_hypothesis(const std::string& name) {
    if (name == "h0" || name == "H0") return Hypothesis::h0;
    if (name == "h1" || name == "H1") return Hypothesis::h1;
    throw ConfigError("unknown hypothesis '" + name + "' (use h0 or h1)");
}

InitMode parse_init_mode(const std::string& name) {
    if (name == "model") return InitMode::model_consistent;
    if (name == "paper") return InitMode::paper_literal;
    throw ConfigError("unknown init mode '" + name + "' (use model or paper)");
}

int cmd_simulate(const CommonFlags& f, const std::string& hypothesis) {
    ExperimentConfig cfg = resolve(f);
    Hypothesis hyp = parse_hypothesis(hypothesis);
    Rng rng(cfg.seed, 0);
    Observations obs = sample_observations(cfg.params, hyp, cfg.t_horizon, rng);
    auto obs_path = cfg.output_dir / "observations.csv";
    write_observation_csv(obs_path, cfg.metadata(), obs.x);
    std::cout << obs_path.string() << "\n";
    if (obs.truth) {
        auto truth_path = cfg.output_dir / "truth_phases.csv";
        write_phase_sequence_csv(truth_path, cfg.metadata(), *obs.truth);
        std::cout << truth_path.string() << "\n";
    }
    return 0;
}

int cmd_lrt_run(const CommonFlags& f, const std::string& input,
                const std::string& init_mode, bool oracle,
                const std::string& hypothesis) {
    ExperimentConfig cfg = resolve(f);
    InitMode mode = parse_init_mode(init_mode);
    std::vector<double> x;
    if (!input.empty()) {
        x = read_observation_csv(input);
    } else {
        Rng rng(cfg.seed, 0);
        x = sample_observations(cfg.params, parse_hypothesis(hypothesis),
                                cfg.t_horizon, rng)
                .x;
    }
    std::vector<double> traj = run_trajectory(cfg.params, x, mode);
    auto path = cfg.output_dir / "lrt.csv";
    CsvWriter w(path, cfg.metadata(), {"t", "log_lrt"});
    for (size_t i = 0; i < traj.size(); ++i) {
        w.row({std::to_string(i + 1), format_double(traj[i])});
    }
    std::cout << path.string() << "\n";

    if (oracle) {
        if (mode != InitMode::model_consistent) {
            throw ConfigError("--oracle requires --init-mode model (the "
                              "enumeration sums feasible sequences only)");
        }
        double worst = 0.0;
        int checked = 0;
        for (int t = 1; t <= static_cast<int>(x.size()); ++t) {
            if (count_sequences(cfg.params.delta(), t) > kEnumerationGuard) break;
            double ref = oracle_log_lrt(
                cfg.params, std::span<const double>(x.data(), static_cast<size_t>(t)));
            worst = std::max(worst, std::abs(ref - traj[static_cast<size_t>(t) - 1]));
            ++checked;
        }
        std::cout << "oracle cross-check: " << checked
                  << " prefixes, max |diff| = " << format_double(worst) << "\n";
        if (checked > 0 && !(worst <= 1e-9)) {
            throw GuardError("lrt-run: recursion disagrees with the enumeration "
                             "oracle (max |diff| = " + format_double(worst) + ")");
        }
    }
    return 0;
}

int cmd_combinatorics(const CommonFlags& f) {
    ExperimentConfig cfg = resolve(f);
    CountTable table(cfg.params.delta(), cfg.t_horizon);
    auto path = cfg.output_dir / "counts.csv";
    CsvWriter w(path, cfg.metadata(), {"t", "C_t", "log_C_t"});
    for (int t = 1; t <= cfg.t_horizon; ++t) {
        w.row({std::to_string(t), table.count(t).str(),
               format_double(table.log_count(t))});
    }
    std::cout << path.string() << "\n";
    return 0;
}

int cmd_roc(const CommonFlags& f, int at_t, int n_thresholds) {
    ExperimentConfig cfg = resolve(f);
    int runs = cfg.effective_runs();
    int t = at_t > 0 ? at_t : cfg.t_horizon;
    BatchResult b0 = run_batch(cfg.params, Hypothesis::h0, cfg.t_horizon, runs,
                               derive_seed(cfg.seed, 0), cfg.threads);
    BatchResult b1 = run_batch(cfg.params, Hypothesis::h1, cfg.t_horizon, runs,
                               derive_seed(cfg.seed, 1), cfg.threads);
    auto curve = roc_curve(b0, b1, t, n_thresholds);
    auto path = cfg.output_dir / "roc.csv";
    CsvWriter w(path, cfg.metadata(), {"t", "gamma_log", "p_fa", "p_miss"});
    for (const RocPoint& pt : curve) {
        w.row({std::to_string(pt.t), format_double(pt.gamma_log),
               format_double(pt.p_fa), format_double(pt.p_miss)});
    }
    std::cout << path.string() << "\n";
    return 0;
}

int cmd_pmiss(const CommonFlags& f, bool grid, int n_thresholds) {
    ExperimentConfig cfg = resolve(f);
    int runs = cfg.effective_runs();
    BatchResult b0 = run_batch(cfg.params, Hypothesis::h0, cfg.t_horizon, runs,
                               derive_seed(cfg.seed, 0), cfg.threads);
    BatchResult b1 = run_batch(cfg.params, Hypothesis::h1, cfg.t_horizon, runs,
                               derive_seed(cfg.seed, 1), cfg.threads);
    auto path = cfg.output_dir / "pmiss.csv";
    CsvWriter w(path, cfg.metadata(), {"t", "p_miss", "gamma_star_log"});
    for (int t = 1; t <= cfg.t_horizon; ++t) {
        PmissResult r = grid
                            ? p_miss_at_alpha_grid(b0, b1, t, cfg.alpha, n_thresholds)
                            : p_miss_at_alpha(b0, b1, t, cfg.alpha);
        w.row({std::to_string(t), format_double(r.p_miss),
               format_double(r.gamma_star_log)});
    }
    std::cout << path.string() << "\n";
    return 0;
}

std::vector<double> read_pmiss_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open pmiss file: " + path.string());
    std::vector<double> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#' || line.rfind("t,", 0) == 0) continue;
        std::istringstream row(line);
        std::string t_cell, p_cell;
        if (!std::getline(row, t_cell, ',') || !std::getline(row, p_cell, ',')) {
            throw ConfigError("pmiss file " + path.string() +
                              ": malformed row at line " + std::to_string(line_no));
        }
        try {
            out.push_back(std::stod(p_cell));
        } catch (const std::exception&) {
            throw ConfigError("pmiss file " + path.string() +
                              ": bad value at line " + std::to_string(line_no));
        }
    }
    if (out.empty()) throw ConfigError("pmiss file has no data rows");
    return out;
}

int cmd_slope(const CommonFlags& f, const std::string& input,
              const std::string& window, double tail_fraction) {
    ExperimentConfig cfg = resolve(f);
    std::vector<double> series;
    if (!input.empty()) {
        series = read_pmiss_csv(input);
    } else {
        MissSeries ms = compute_miss_series(cfg.params, cfg.t_horizon,
                                            cfg.effective_runs(), cfg.alpha,
                                            derive_seed(cfg.seed, 0),
                                            derive_seed(cfg.seed, 1), cfg.threads);
        series = ms.p_miss;
    }
    FitWindow fw = FitWindow::full();
    if (window == "tail") {
        fw = FitWindow::tail(tail_fraction);
    } else if (window != "full") {
        throw ConfigError("slope: --window must be 'full' or 'tail'");
    }
    SlopeFit fit = fit_slope(series, fw);
    json out{{"slope", fit.slope},
             {"intercept", fit.intercept},
             {"slope_std_error", fit.slope_std_error},
             {"window", window},
             {"tail_fraction", fw.tail_only ? fw.tail_fraction : 0.0},
             {"t_max", fit.t_max},
             {"points_used", fit.points_used}};
    auto path = cfg.output_dir / "slope.json";
    std::filesystem::create_directories(cfg.output_dir);
    std::ofstream os(path);
    os << out.dump(2) << "\n";
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_exponent(const CommonFlags& f, const std::string& horizons) {
    ExperimentConfig cfg = resolve(f);
    std::vector<int> ts;
    if (horizons.empty()) {
        ts.push_back(cfg.t_horizon);
    } else {
        std::istringstream is(horizons);
        std::string cell;
        while (std::getline(is, cell, ',')) {
            try {
                ts.push_back(std::stoi(cell));
            } catch (const std::exception&) {
                throw ConfigError("exponent: bad --horizons entry '" + cell + "'");
            }
        }
    }
    auto path = cfg.output_dir / "exponent.csv";
    CsvWriter w(path, cfg.metadata(), {"T", "zeta_hat", "std_error"});
    for (int t : ts) {
        ExponentEstimate est = estimate_error_exponent(
            cfg.params, t, cfg.effective_runs(), derive_seed(cfg.seed, 0),
            cfg.threads);
        w.row({std::to_string(t), format_double(est.zeta_hat),
               format_double(est.std_error)});
    }
    std::cout << path.string() << "\n";
    return 0;
}

int cmd_bound(const CommonFlags& f, long budget, bool no_refine,
              const std::string& convention) {
    ExperimentConfig cfg = resolve(f);
    EntropyConvention conv;
    if (convention == "normalized") {
        conv = EntropyConvention::normalized;
    } else if (convention == "mass-weighted") {
        conv = EntropyConvention::mass_weighted;
    } else {
        throw ConfigError("bound: --convention must be 'normalized' or 'mass-weighted'");
    }
    BoundResult res = solve_bound(cfg.params, budget, conv, !no_refine,
                                  derive_seed(cfg.seed, 2), cfg.threads);
    json out{{"eta_lower", res.eta_lower},
             {"zeta_lower", res.zeta_lower},
             {"argmin_xi", res.argmin_xi},
             {"mode", convention},
             {"budget", budget},
             {"seed", cfg.seed},
             {"feasible_points_evaluated", res.feasible_points_evaluated},
             {"fallback_guaranteed_only", res.fallback_guaranteed_only}};
    if (res.argmin_nu) {
        out["argmin_nu"] = {{"nu1", res.argmin_nu->nu(kState1)},
                            {"nu2", res.argmin_nu->nu(kState2)},
                            {"theta2", res.argmin_nu->theta(kState2)}};
    }
    std::filesystem::create_directories(cfg.output_dir);
    {
        std::ofstream os(cfg.output_dir / "bound.json");
        os << out.dump(2) << "\n";
    }
    CsvWriter w(cfg.output_dir / "bound_trace.csv", cfg.metadata(),
                {"samples_evaluated", "best_value"});
    for (const auto& [idx, value] : res.trace) {
        w.row({std::to_string(idx), format_double(value)});
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_detectability(const CommonFlags& f) {
    ExperimentConfig cfg = resolve(f);
    DetectabilityResult res = detectability(cfg.params);
    json out{{"entropy_lhs", res.lhs},
             {"snr_rhs", res.rhs},
             {"undetectable", res.undetectable},
             {"sigma", cfg.params.sigma()}};
    if (cfg.params.delta() >= 2) {
        bool uniform = true;
        for (int m : {kState1, kState2}) {
            for (double v : cfg.params.pmf(m).probs()) {
                uniform &= std::abs(v - 1.0 / cfg.params.delta()) < 1e-12;
            }
        }
        if (uniform) {
            out["sigma_star"] =
                critical_sigma_uniform(cfg.params.delta(), cfg.params.mu2());
        }
    }
    std::filesystem::create_directories(cfg.output_dir);
    std::ofstream os(cfg.output_dir / "detectability.json");
    os << out.dump(2) << "\n";
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_reproduce(const CommonFlags& f) {
    ExperimentConfig cfg = resolve(f);
    auto written = reproduce(cfg);
    for (const auto& path : written) std::cout << path.string() << "\n";
    return 0;
}

int cmd_ingest(const CommonFlags& f, const std::string& input,
               int calibration_runs) {
    ExperimentConfig cfg = resolve(f);
    int calib = calibration_runs > 0 ? calibration_runs : cfg.effective_runs();
    IngestReport report =
        ingest_trace(input, cfg.params, cfg.alpha, calib, cfg.seed, cfg.threads);
    auto csv_path = cfg.output_dir / "ingest_lrt.csv";
    CsvWriter w(csv_path, cfg.metadata(),
                {"t", "log_lrt", "gamma_star_log", "alarm"});
    for (size_t i = 0; i < report.log_lrt.size(); ++i) {
        bool alarm = report.log_lrt[i] > report.gamma_star_log[i];
        w.row({std::to_string(i + 1), format_double(report.log_lrt[i]),
               format_double(report.gamma_star_log[i]), alarm ? "1" : "0"});
    }
    json out{{"alpha", report.alpha},
             {"calibration_runs", report.calibration_runs},
             {"trace_length", report.log_lrt.size()},
             {"first_crossing_t",
              report.first_crossing_t ? json(*report.first_crossing_t) : json()}};
    std::ofstream os(cfg.output_dir / "ingest_report.json");
    os << out.dump(2) << "\n";
    std::cout << out.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-state random-duration signal detection toolkit"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    CommonFlags flags;

    std::string hypothesis = "h1";
    auto* simulate = app.add_subcommand("simulate", "sample observations (and truth)");
    add_common_options(simulate, flags);
    simulate->add_option("--hypothesis", hypothesis, "h0 or h1");

    std::string lrt_input;
    std::string init_mode = "model";
    std::string lrt_hypothesis = "h1";
    bool oracle = false;
    auto* lrt_run = app.add_subcommand("lrt-run", "log likelihood-ratio trajectory");
    add_common_options(lrt_run, flags);
    lrt_run->add_option("--input", lrt_input, "observation CSV (t,x); generated when absent");
    lrt_run->add_option("--init-mode", init_mode, "model | paper");
    lrt_run->add_option("--hypothesis", lrt_hypothesis, "hypothesis for generated input");
    lrt_run->add_flag("--oracle", oracle, "cross-check against enumeration within the guard");

    auto* comb = app.add_subcommand("combinatorics", "sequence counts C_t");
    add_common_options(comb, flags);

    int roc_t = 0, roc_thresholds = 101;
    auto* roc = app.add_subcommand("roc", "ROC curve at a fixed t");
    add_common_options(roc, flags);
    roc->add_option("--time", roc_t, "evaluation time (default: horizon)");
    roc->add_option("--thresholds", roc_thresholds, "grid size");

    bool pmiss_grid = false;
    int pmiss_thresholds = 2001;
    auto* pmiss = app.add_subcommand("pmiss", "miss probability at the FA budget");
    add_common_options(pmiss, flags);
    pmiss->add_flag("--grid", pmiss_grid, "use the threshold-sweep fidelity rule");
    pmiss->add_option("--thresholds", pmiss_thresholds, "grid size for --grid");

    std::string slope_input, slope_window = "full";
    double tail_fraction = 0.8;
    auto* slope = app.add_subcommand("slope", "error-exponent estimate from a miss curve");
    add_common_options(slope, flags);
    slope->add_option("--input", slope_input, "pmiss CSV (computed when absent)");
    slope->add_option("--window", slope_window, "full | tail");
    slope->add_option("--tail-fraction", tail_fraction, "tail window start fraction");

    std::string horizons;
    auto* exponent = app.add_subcommand("exponent", "Monte Carlo error exponent");
    add_common_options(exponent, flags);
    exponent->add_option("--horizons", horizons, "comma list of horizons (default: run.T)");

    long budget = 100000;
    bool no_refine = false;
    std::string convention = "normalized";
    auto* bound = app.add_subcommand("bound", "large-deviations lower bound");
    add_common_options(bound, flags);
    bound->add_option("--budget", budget, "random-search sample count");
    bound->add_flag("--no-refine", no_refine, "skip the local refinement pass");
    bound->add_option("--convention", convention, "normalized | mass-weighted");

    auto* detect = app.add_subcommand("detectability", "entropy-vs-SNR condition (mu1 = 0)");
    add_common_options(detect, flags);

    auto* repro = app.add_subcommand("reproduce", "run a full experiment preset");
    add_common_options(repro, flags);

    std::string ingest_input;
    int calibration_runs = 0;
    auto* ingest = app.add_subcommand("ingest", "detect over a user-supplied trace");
    add_common_options(ingest, flags);
    ingest->add_option("--input", ingest_input, "trace CSV (t,x)")->required();
    ingest->add_option("--calibration-runs", calibration_runs,
                       "noise-only calibration batch size (default: effective J)");

    try {
        app.parse(argc, argv);
        if (simulate->parsed()) return cmd_simulate(flags, hypothesis);
        if (lrt_run->parsed())
            return cmd_lrt_run(flags, lrt_input, init_mode, oracle, lrt_hypothesis);
        if (comb->parsed()) return cmd_combinatorics(flags);
        if (roc->parsed()) return cmd_roc(flags, roc_t, roc_thresholds);
        if (pmiss->parsed()) return cmd_pmiss(flags, pmiss_grid, pmiss_thresholds);
        if (slope->parsed()) return cmd_slope(flags, slope_input, slope_window, tail_fraction);
        if (exponent->parsed()) return cmd_exponent(flags, horizons);
        if (bound->parsed()) return cmd_bound(flags, budget, no_refine, convention);
        if (detect->parsed()) return cmd_detectability(flags);
        if (repro->parsed()) return cmd_reproduce(flags);
        if (ingest->parsed()) return cmd_ingest(flags, ingest_input, calibration_runs);
        return 0;
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const GuardError& e) {
        std::cerr << "guard: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "fatal: " << e.what() << "\n";
        return 1;
    }
}
