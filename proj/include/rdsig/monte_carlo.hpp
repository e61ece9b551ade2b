#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rdsig/lrt.hpp"
#include "rdsig/model.hpp"
#include "rdsig/sampling.hpp"

namespace rdsig {

// J independent log-likelihood-ratio trajectories under one hypothesis.
// Row j is reproducible from (master_seed, j) alone, so the batch is
// identical for any thread count.
class BatchResult {
public:
    BatchResult(const ModelParams& params, Hypothesis hyp, int t_horizon,
                int runs, std::uint64_t master_seed);

    Hypothesis hypothesis() const { return hypothesis_; }
    int t_horizon() const { return t_horizon_; }
    int runs() const { return runs_; }
    std::uint64_t master_seed() const { return master_seed_; }
    const ModelParams& params() const { return params_; }

    // log L_t of run j, t in [1, t_horizon]
    double at(int j, int t) const {
        return log_lrt_[static_cast<size_t>(j) * static_cast<size_t>(t_horizon_) +
                        static_cast<size_t>(t) - 1];
    }
    std::span<double> row(int j) {
        return {log_lrt_.data() +
                    static_cast<size_t>(j) * static_cast<size_t>(t_horizon_),
                static_cast<size_t>(t_horizon_)};
    }
    std::vector<double> column(int t) const;

private:
    ModelParams params_;
    Hypothesis hypothesis_;
    int t_horizon_;
    int runs_;
    std::uint64_t master_seed_;
    std::vector<double> log_lrt_;  // row-major runs x t_horizon
};

BatchResult run_batch(const ModelParams& params, Hypothesis hyp, int t_horizon,
                      int runs, std::uint64_t master_seed, int threads = 1,
                      InitMode mode = InitMode::model_consistent);

struct RocPoint {
    int t = 0;
    double gamma_log = 0.0;
    double p_fa = 0.0;
    double p_miss = 0.0;
};

// Log-domain threshold sweep spanning both batches' values at time t with a
// +-beta margin. Alarms on log L_t >= gamma (ties count as alarms).
std::vector<RocPoint> roc_curve(const BatchResult& batch0,
                                const BatchResult& batch1, int t,
                                int n_thresholds, double beta = 1.0);

struct PmissResult {
    double p_miss = 0.0;
    double gamma_star_log = 0.0;
};

// The order-statistic threshold alone: alarms are values strictly above it,
// and the alarm fraction under the noise-only batch is <= alpha.
double threshold_at_alpha(const BatchResult& batch0, int t, double alpha);

// Exact order-statistic rule: gamma* sits just above the ceil((1-alpha)J)-th
// smallest noise-only value, the smallest threshold meeting the false-alarm
// budget. Grid-free.
PmissResult p_miss_at_alpha(const BatchResult& batch0, const BatchResult& batch1,
                            int t, double alpha);

// Grid-sweep variant: scans an n-point log-domain threshold grid instead of
// the exact order statistic.
PmissResult p_miss_at_alpha_grid(const BatchResult& batch0,
                                 const BatchResult& batch1, int t, double alpha,
                                 int n_thresholds, double beta = 1.0);

struct FitWindow {
    bool tail_only = false;
    double tail_fraction = 0.8;  // fit on [fraction * t_max, t_max]

    static FitWindow full() { return {false, 0.0}; }
    static FitWindow tail(double fraction = 0.8) { return {true, fraction}; }
};

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_std_error = 0.0;
    int t_max = 0;        // largest t with nonzero miss probability
    int points_used = 0;
};

// Least squares of -log p_miss against t, restricted to entries with
// p_miss > 0. p_miss_by_t[i] is the value at t = i + 1.
SlopeFit fit_slope(std::span<const double> p_miss_by_t, FitWindow window);

}  // namespace rdsig
