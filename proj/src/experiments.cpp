#include "rdsig/experiments.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>

#include "rdsig/csv.hpp"
#include "rdsig/errors.hpp"
#include "rdsig/version.hpp"

namespace rdsig {

namespace {

using nlohmann::json;

constexpr std::uint64_t kStreamH0 = 0;
constexpr std::uint64_t kStreamH1 = 1;
constexpr std::uint64_t kStreamBound = 2;
constexpr std::uint64_t kStreamCalibration = 3;
constexpr long kBoundBudget = 100000;

ModelParams with_sigma(const ModelParams& p, double sigma) {
    return ModelParams(p.delta(), p.pmf(kState1), p.pmf(kState2), p.mu1(),
                       p.mu2(), sigma, p.mu0());
}

std::uint64_t sigma_stream(std::uint64_t seed, size_t sigma_index,
                           std::uint64_t purpose) {
    return derive_seed(seed, 16 * (sigma_index + 1) + purpose);
}

void write_json(const std::filesystem::path& path, const json& j) {
    if (!path.parent_path().empty()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path.string());
    out << j.dump(2) << "\n";
}

double upper_envelope(const ModelParams& p) {
    return p.mu2() * p.mu2() / (2.0 * p.sigma() * p.sigma());
}

json slope_entry(const SlopeFit& fit) {
    return json{{"slope", fit.slope},
                {"intercept", fit.intercept},
                {"slope_std_error", fit.slope_std_error},
                {"t_max", fit.t_max},
                {"points_used", fit.points_used}};
}

json type_to_json(const TypeVector& nu) {
    return json{{"nu1", nu.nu(kState1)},
                {"nu2", nu.nu(kState2)},
                {"theta2", nu.theta(kState2)}};
}

}  // namespace

MissSeries compute_miss_series(const ModelParams& params, int t_horizon,
                               int runs, double alpha, std::uint64_t seed0,
                               std::uint64_t seed1, int threads) {
    BatchResult b0 = run_batch(params, Hypothesis::h0, t_horizon, runs, seed0, threads);
    BatchResult b1 = run_batch(params, Hypothesis::h1, t_horizon, runs, seed1, threads);
    MissSeries series;
    series.sigma = params.sigma();
    series.p_miss.resize(static_cast<size_t>(t_horizon));
    series.gamma_star_log.resize(static_cast<size_t>(t_horizon));
    for (int t = 1; t <= t_horizon; ++t) {
        PmissResult r = p_miss_at_alpha(b0, b1, t, alpha);
        series.p_miss[static_cast<size_t>(t) - 1] = r.p_miss;
        series.gamma_star_log[static_cast<size_t>(t) - 1] = r.gamma_star_log;
    }
    return series;
}

namespace {

std::vector<std::filesystem::path> reproduce_fig1(const ExperimentConfig& cfg) {
    const ModelParams& params = cfg.params;
    int t_horizon = cfg.t_horizon;
    int runs = cfg.effective_runs();
    BatchResult b0 = run_batch(params, Hypothesis::h0, t_horizon, runs,
                               derive_seed(cfg.seed, kStreamH0), cfg.threads);
    BatchResult b1 = run_batch(params, Hypothesis::h1, t_horizon, runs,
                               derive_seed(cfg.seed, kStreamH1), cfg.threads);

    std::vector<double> p_miss(static_cast<size_t>(t_horizon));
    std::vector<double> gamma(static_cast<size_t>(t_horizon));
    std::vector<double> lrt_rate_mean(static_cast<size_t>(t_horizon));
    std::vector<double> lrt_rate_se(static_cast<size_t>(t_horizon));
    for (int t = 1; t <= t_horizon; ++t) {
        PmissResult r = p_miss_at_alpha(b0, b1, t, cfg.alpha);
        p_miss[static_cast<size_t>(t) - 1] = r.p_miss;
        gamma[static_cast<size_t>(t) - 1] = r.gamma_star_log;
        double mean = 0.0;
        for (int j = 0; j < runs; ++j) {
            mean += -b0.at(j, t) / static_cast<double>(t);
        }
        mean /= static_cast<double>(runs);
        double var = 0.0;
        for (int j = 0; j < runs; ++j) {
            double v = -b0.at(j, t) / static_cast<double>(t) - mean;
            var += v * v;
        }
        lrt_rate_mean[static_cast<size_t>(t) - 1] = mean;
        lrt_rate_se[static_cast<size_t>(t) - 1] =
            runs > 1 ? std::sqrt(var / static_cast<double>(runs - 1) /
                                 static_cast<double>(runs))
                     : 0.0;
    }

    auto csv_path = cfg.output_dir / "fig1_convergence.csv";
    CsvWriter w(csv_path, cfg.metadata(),
                {"t", "p_miss", "gamma_star_log", "pmiss_rate", "lrt_rate_mean",
                 "lrt_rate_se"});
    for (int t = 1; t <= t_horizon; ++t) {
        size_t i = static_cast<size_t>(t) - 1;
        double rate = p_miss[i] > 0.0
                          ? -std::log(p_miss[i]) / static_cast<double>(t)
                          : std::nan("");
        w.row({std::to_string(t), format_double(p_miss[i]), format_double(gamma[i]),
               format_double(rate), format_double(lrt_rate_mean[i]),
               format_double(lrt_rate_se[i])});
    }

    int tail_lo = static_cast<int>(std::ceil(0.8 * t_horizon));
    double pmiss_tail = 0.0, pmiss_tail_se = 0.0, lrt_tail = 0.0;
    int n_p = 0;
    for (int t = tail_lo; t <= t_horizon; ++t) {
        size_t i = static_cast<size_t>(t) - 1;
        if (p_miss[i] > 0.0) {
            pmiss_tail += -std::log(p_miss[i]) / static_cast<double>(t);
            pmiss_tail_se += std::sqrt((1.0 - p_miss[i]) /
                                       (p_miss[i] * static_cast<double>(runs))) /
                             static_cast<double>(t);
            ++n_p;
        }
        lrt_tail += lrt_rate_mean[i];
    }
    int n_window = t_horizon - tail_lo + 1;
    lrt_tail /= static_cast<double>(n_window);
    if (n_p > 0) {
        pmiss_tail /= static_cast<double>(n_p);
        pmiss_tail_se /= static_cast<double>(n_p);
    }
    // Run-level SE of the windowed LRT rate average.
    double lrt_tail_se = 0.0;
    {
        double mean = 0.0;
        std::vector<double> per_run(static_cast<size_t>(runs));
        for (int j = 0; j < runs; ++j) {
            double acc = 0.0;
            for (int t = tail_lo; t <= t_horizon; ++t) {
                acc += -b0.at(j, t) / static_cast<double>(t);
            }
            per_run[static_cast<size_t>(j)] = acc / static_cast<double>(n_window);
            mean += per_run[static_cast<size_t>(j)];
        }
        mean /= static_cast<double>(runs);
        double var = 0.0;
        for (double v : per_run) var += (v - mean) * (v - mean);
        lrt_tail_se = runs > 1 ? std::sqrt(var / static_cast<double>(runs - 1) /
                                           static_cast<double>(runs))
                               : 0.0;
    }

    json summary{
        {"preset", "fig1"},
        {"config", cfg.metadata()},
        {"tail_window", {tail_lo, t_horizon}},
        {"pmiss_rate_tail_mean", pmiss_tail},
        {"pmiss_rate_tail_se", pmiss_tail_se},
        {"pmiss_tail_points", n_p},
        {"lrt_rate_tail_mean", lrt_tail},
        {"lrt_rate_tail_se", lrt_tail_se},
        {"bound_state1_snr", guaranteed_bound(params)},
        {"envelope_state2_snr", upper_envelope(params)},
    };
    try {
        summary["slope_full"] = slope_entry(fit_slope(p_miss, FitWindow::full()));
        summary["slope_tail"] = slope_entry(fit_slope(p_miss, FitWindow::tail()));
    } catch (const std::invalid_argument&) {
        // Too few usable miss probabilities at this scale to fit.
    }
    auto json_path = cfg.output_dir / "fig1_summary.json";
    write_json(json_path, summary);
    return {csv_path, json_path};
}

std::vector<std::filesystem::path> reproduce_sigma_sweep(
    const ExperimentConfig& cfg, const std::string& stem, bool with_bound,
    bool emit_series) {
    if (cfg.sigma_grid.empty()) {
        throw ConfigError("reproduce: preset requires run.sigma_grid");
    }
    int runs = cfg.effective_runs();
    std::vector<std::filesystem::path> written;

    std::optional<CsvWriter> series_writer;
    std::filesystem::path series_path = cfg.output_dir / (stem + "_pmiss.csv");
    if (emit_series) {
        series_writer.emplace(series_path, cfg.metadata(),
                              std::vector<std::string>{"sigma", "t", "p_miss",
                                                       "gamma_star_log"});
        written.push_back(series_path);
    }

    json per_sigma = json::array();
    std::filesystem::path table_path = cfg.output_dir / (stem + ".csv");
    std::vector<std::string> header = with_bound
        ? std::vector<std::string>{"sigma", "slope", "slope_tail", "eta_lower",
                                   "undetectable"}
        : std::vector<std::string>{"sigma", "slope", "lb", "ub"};
    CsvWriter table(table_path, cfg.metadata(), header);
    written.push_back(table_path);

    for (size_t i = 0; i < cfg.sigma_grid.size(); ++i) {
        ModelParams p = with_sigma(cfg.params, cfg.sigma_grid[i]);
        MissSeries series = compute_miss_series(
            p, cfg.t_horizon, runs, cfg.alpha,
            sigma_stream(cfg.seed, i, kStreamH0),
            sigma_stream(cfg.seed, i, kStreamH1), cfg.threads);
        if (series_writer) {
            for (int t = 1; t <= cfg.t_horizon; ++t) {
                size_t k = static_cast<size_t>(t) - 1;
                series_writer->row({format_double(series.sigma), std::to_string(t),
                                    format_double(series.p_miss[k]),
                                    format_double(series.gamma_star_log[k])});
            }
        }

        json entry{{"sigma", series.sigma}};
        std::optional<SlopeFit> full, tail;
        try {
            full = fit_slope(series.p_miss, FitWindow::full());
            tail = fit_slope(series.p_miss, FitWindow::tail());
        } catch (const std::invalid_argument&) {
            if (full && !tail) tail = full;  // tail window too sparse
        }
        if (full) entry["slope_full"] = slope_entry(*full);
        if (tail) entry["slope_tail"] = slope_entry(*tail);
        entry["lb_state1_snr"] = guaranteed_bound(p);
        entry["ub_state2_snr"] = upper_envelope(p);

        if (with_bound) {
            BoundResult bound =
                solve_bound(p, kBoundBudget, EntropyConvention::normalized,
                            /*refine=*/true, sigma_stream(cfg.seed, i, kStreamBound),
                            cfg.threads);
            bool undetectable =
                p.mu1() == 0.0 && detectability(p).undetectable;
            entry["eta_lower"] = bound.eta_lower;
            entry["zeta_lower"] = bound.zeta_lower;
            entry["undetectable"] = undetectable;
            if (bound.argmin_nu) entry["argmin_nu"] = type_to_json(*bound.argmin_nu);
            table.row({format_double(series.sigma),
                       format_double(full ? full->slope : std::nan("")),
                       format_double(tail ? tail->slope : std::nan("")),
                       format_double(bound.eta_lower),
                       undetectable ? "1" : "0"});
        } else {
            table.row({format_double(series.sigma),
                       format_double(full ? full->slope : std::nan("")),
                       format_double(guaranteed_bound(p)),
                       format_double(upper_envelope(p))});
        }

        if (emit_series) {
            // First horizon at which the empirical miss probability falls to
            // the budget, and to zero.
            std::optional<int> t_below_alpha, t_zero;
            for (int t = 1; t <= cfg.t_horizon; ++t) {
                double v = series.p_miss[static_cast<size_t>(t) - 1];
                if (!t_below_alpha && v <= cfg.alpha) t_below_alpha = t;
                if (!t_zero && v == 0.0) t_zero = t;
            }
            if (t_below_alpha) entry["first_t_pmiss_below_alpha"] = *t_below_alpha;
            if (t_zero) entry["first_t_pmiss_zero"] = *t_zero;
        }
        per_sigma.push_back(std::move(entry));
    }

    json summary{{"preset", stem},
                 {"config", cfg.metadata()},
                 {"per_sigma", std::move(per_sigma)}};
    if (with_bound && cfg.params.mu1() == 0.0 && cfg.params.delta() >= 2) {
        bool uniform = true;
        for (double v : cfg.params.pmf(kState1).probs()) {
            uniform &= std::abs(v - 1.0 / cfg.params.delta()) < 1e-12;
        }
        for (double v : cfg.params.pmf(kState2).probs()) {
            uniform &= std::abs(v - 1.0 / cfg.params.delta()) < 1e-12;
        }
        if (uniform) {
            summary["sigma_star"] =
                critical_sigma_uniform(cfg.params.delta(), cfg.params.mu2());
        }
    }
    std::filesystem::path json_path = cfg.output_dir / (stem + "_summary.json");
    write_json(json_path, summary);
    written.push_back(json_path);
    return written;
}

}  // namespace

std::vector<std::filesystem::path> reproduce(const ExperimentConfig& cfg) {
    if (!cfg.preset) {
        throw ConfigError("reproduce: a preset is required (one of fig1, "
                          "fig_pmiss_sigma, fig_exponent_vs_bound, fig_mu1zero, "
                          "fig_dishwasher)");
    }
    switch (*cfg.preset) {
        case Preset::fig1:
            return reproduce_fig1(cfg);
        case Preset::fig_pmiss_sigma:
            return reproduce_sigma_sweep(cfg, "fig_pmiss_sigma",
                                         /*with_bound=*/false,
                                         /*emit_series=*/true);
        case Preset::fig_exponent_vs_bound:
            return reproduce_sigma_sweep(cfg, "fig_exponent_vs_bound",
                                         /*with_bound=*/false,
                                         /*emit_series=*/false);
        case Preset::fig_mu1zero:
            return reproduce_sigma_sweep(cfg, "fig_mu1zero",
                                         /*with_bound=*/true,
                                         /*emit_series=*/false);
        case Preset::fig_dishwasher:
            return reproduce_sigma_sweep(cfg, "fig_dishwasher",
                                         /*with_bound=*/false,
                                         /*emit_series=*/true);
    }
    throw ConfigError("reproduce: unknown preset");
}

IngestReport ingest_trace(const std::filesystem::path& csv_path,
                          const ModelParams& params, double alpha,
                          int calibration_runs, std::uint64_t seed, int threads) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw ConfigError("ingest_trace: alpha must be in (0, 1)");
    }
    if (calibration_runs < 1) {
        throw ConfigError("ingest_trace: calibration_runs must be >= 1");
    }
    std::vector<double> x = read_observation_csv(csv_path);
    IngestReport report;
    report.alpha = alpha;
    report.calibration_runs = calibration_runs;
    report.log_lrt = run_trajectory(params, x);

    int t_horizon = static_cast<int>(x.size());
    BatchResult calib =
        run_batch(params, Hypothesis::h0, t_horizon, calibration_runs,
                  derive_seed(seed, kStreamCalibration), threads);
    report.gamma_star_log.resize(static_cast<size_t>(t_horizon));
    for (int t = 1; t <= t_horizon; ++t) {
        double cut = threshold_at_alpha(calib, t, alpha);
        report.gamma_star_log[static_cast<size_t>(t) - 1] = cut;
        if (!report.first_crossing_t &&
            report.log_lrt[static_cast<size_t>(t) - 1] > cut) {
            report.first_crossing_t = t;
        }
    }
    return report;
}

}  // namespace rdsig
