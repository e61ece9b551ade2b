#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "rdsig/config.hpp"
#include "rdsig/exponent.hpp"
#include "rdsig/monte_carlo.hpp"

namespace rdsig {

// Miss-probability curve at the false-alarm budget, one entry per t.
struct MissSeries {
    double sigma = 0.0;
    std::vector<double> p_miss;
    std::vector<double> gamma_star_log;
};

MissSeries compute_miss_series(const ModelParams& params, int t_horizon,
                               int runs, double alpha, std::uint64_t seed0,
                               std::uint64_t seed1, int threads);

// Runs the full pipeline for the configured preset (batches, miss curves,
// slopes, bounds as applicable) and writes per-figure CSVs plus a summary
// JSON into cfg.output_dir. Returns the written paths. Purely synthetic; no
// external data is read.
std::vector<std::filesystem::path> reproduce(const ExperimentConfig& cfg);

struct IngestReport {
    std::vector<double> log_lrt;
    std::vector<double> gamma_star_log;
    std::optional<int> first_crossing_t;
    double alpha = 0.0;
    int calibration_runs = 0;
};

// Runs the detector over a user-supplied trace (`t,x` CSV; the baseline mu0
// is removed internally) against per-t thresholds calibrated offline on a
// synthetic noise-only batch with the same parameters.
IngestReport ingest_trace(const std::filesystem::path& csv_path,
                          const ModelParams& params, double alpha,
                          int calibration_runs, std::uint64_t seed, int threads);

}  // namespace rdsig
