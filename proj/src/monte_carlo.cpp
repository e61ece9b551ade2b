#include "rdsig/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace rdsig {

BatchResult::BatchResult(const ModelParams& params, Hypothesis hyp,
                         int t_horizon, int runs, std::uint64_t master_seed)
    : params_(params),
      hypothesis_(hyp),
      t_horizon_(t_horizon),
      runs_(runs),
      master_seed_(master_seed) {
    if (t_horizon_ < 1 || runs_ < 1) {
        throw std::invalid_argument("BatchResult: need t_horizon >= 1 and runs >= 1");
    }
    log_lrt_.assign(static_cast<size_t>(runs_) * static_cast<size_t>(t_horizon_),
                    0.0);
}

std::vector<double> BatchResult::column(int t) const {
    std::vector<double> col(static_cast<size_t>(runs_));
    for (int j = 0; j < runs_; ++j) col[static_cast<size_t>(j)] = at(j, t);
    return col;
}

BatchResult run_batch(const ModelParams& params, Hypothesis hyp, int t_horizon,
                      int runs, std::uint64_t master_seed, int threads,
                      InitMode mode) {
    BatchResult batch(params, hyp, t_horizon, runs, master_seed);
    TransitionStructure structure(params);

    auto work = [&](int lo, int hi) {
        for (int j = lo; j < hi; ++j) {
            Rng rng(master_seed, static_cast<std::uint64_t>(j));
            Observations obs = sample_observations(params, hyp, t_horizon, rng);
            std::span<double> row = batch.row(j);
            LrtState state = init_state(params, obs.x[0], mode);
            row[0] = log_likelihood_ratio(state, structure);
            for (int t = 2; t <= t_horizon; ++t) {
                step(state, obs.x[static_cast<size_t>(t) - 1], structure, params);
                row[static_cast<size_t>(t) - 1] =
                    log_likelihood_ratio(state, structure);
            }
        }
    };

    int k = std::max(1, threads);
    if (k == 1 || runs == 1) {
        work(0, runs);
    } else {
        int chunk = (runs + k - 1) / k;
        std::vector<std::thread> pool;
        for (int lo = 0; lo < runs; lo += chunk) {
            int hi = std::min(runs, lo + chunk);
            pool.emplace_back(work, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    return batch;
}

std::vector<RocPoint> roc_curve(const BatchResult& batch0,
                                const BatchResult& batch1, int t,
                                int n_thresholds, double beta) {
    if (t < 1 || t > batch0.t_horizon() || t > batch1.t_horizon()) {
        throw std::invalid_argument("roc_curve: t outside the simulated horizon");
    }
    if (n_thresholds < 2) {
        throw std::invalid_argument("roc_curve: need at least 2 thresholds");
    }
    std::vector<double> v0 = batch0.column(t);
    std::vector<double> v1 = batch1.column(t);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : v0) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    for (double v : v1) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    lo -= beta;
    hi += beta;

    std::vector<RocPoint> curve(static_cast<size_t>(n_thresholds));
    for (int i = 0; i < n_thresholds; ++i) {
        double gamma = lo + (hi - lo) * static_cast<double>(i) /
                                static_cast<double>(n_thresholds - 1);
        long alarms = 0;
        for (double v : v0) alarms += v >= gamma;
        long misses = 0;
        for (double v : v1) misses += v < gamma;
        curve[static_cast<size_t>(i)] = RocPoint{
            t, gamma, static_cast<double>(alarms) / static_cast<double>(v0.size()),
            static_cast<double>(misses) / static_cast<double>(v1.size())};
    }
    return curve;
}

double threshold_at_alpha(const BatchResult& batch0, int t, double alpha) {
    if (!(alpha > 0.0) || !(alpha <= 1.0)) {
        throw std::invalid_argument("threshold_at_alpha: alpha must be in (0, 1]");
    }
    if (t < 1 || t > batch0.t_horizon()) {
        throw std::invalid_argument("threshold_at_alpha: t outside the simulated horizon");
    }
    std::vector<double> v0 = batch0.column(t);
    long j0 = static_cast<long>(v0.size());
    long rank = static_cast<long>(
        std::ceil((1.0 - alpha) * static_cast<double>(j0) - 1e-9));
    if (rank <= 0) {
        // Every threshold meets the budget; nothing is ever missed.
        return -std::numeric_limits<double>::infinity();
    }
    // gamma* sits infinitesimally above the rank-th smallest noise-only value,
    // so that value itself does not alarm and P_fa <= alpha holds exactly.
    std::nth_element(v0.begin(), v0.begin() + (rank - 1), v0.end());
    return v0[static_cast<size_t>(rank - 1)];
}

PmissResult p_miss_at_alpha(const BatchResult& batch0, const BatchResult& batch1,
                            int t, double alpha) {
    if (t < 1 || t > batch1.t_horizon()) {
        throw std::invalid_argument("p_miss_at_alpha: t outside the simulated horizon");
    }
    PmissResult res;
    res.gamma_star_log = threshold_at_alpha(batch0, t, alpha);
    std::vector<double> v1 = batch1.column(t);
    long misses = 0;
    for (double v : v1) misses += v <= res.gamma_star_log;
    res.p_miss = static_cast<double>(misses) / static_cast<double>(v1.size());
    return res;
}

PmissResult p_miss_at_alpha_grid(const BatchResult& batch0,
                                 const BatchResult& batch1, int t, double alpha,
                                 int n_thresholds, double beta) {
    if (!(alpha > 0.0) || !(alpha <= 1.0)) {
        throw std::invalid_argument("p_miss_at_alpha_grid: alpha must be in (0, 1]");
    }
    std::vector<RocPoint> curve = roc_curve(batch0, batch1, t, n_thresholds, beta);
    for (const RocPoint& pt : curve) {
        if (pt.p_fa <= alpha) {
            return PmissResult{pt.p_miss, pt.gamma_log};
        }
    }
    const RocPoint& last = curve.back();
    return PmissResult{last.p_miss, last.gamma_log};
}

SlopeFit fit_slope(std::span<const double> p_miss_by_t, FitWindow window) {
    int t_max = 0;
    for (size_t i = 0; i < p_miss_by_t.size(); ++i) {
        if (p_miss_by_t[i] > 0.0) t_max = static_cast<int>(i) + 1;
    }
    if (t_max == 0) {
        throw std::invalid_argument("fit_slope: no nonzero miss probabilities");
    }
    double t_lo = window.tail_only ? window.tail_fraction * t_max : 1.0;

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (int t = 1; t <= t_max; ++t) {
        double p = p_miss_by_t[static_cast<size_t>(t) - 1];
        if (p <= 0.0 || static_cast<double>(t) < t_lo) continue;
        double x = static_cast<double>(t);
        double y = -std::log(p);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) {
        throw std::invalid_argument("fit_slope: fewer than 2 usable points");
    }
    double denom = static_cast<double>(n) * sxx - sx * sx;
    SlopeFit fit;
    fit.slope = (static_cast<double>(n) * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / static_cast<double>(n);
    fit.t_max = t_max;
    fit.points_used = n;

    if (n > 2) {
        double ss_res = 0.0;
        for (int t = 1; t <= t_max; ++t) {
            double p = p_miss_by_t[static_cast<size_t>(t) - 1];
            if (p <= 0.0 || static_cast<double>(t) < t_lo) continue;
            double x = static_cast<double>(t);
            double r = -std::log(p) - (fit.intercept + fit.slope * x);
            ss_res += r * r;
        }
        double var = ss_res / static_cast<double>(n - 2);
        fit.slope_std_error = std::sqrt(var * static_cast<double>(n) / denom);
    }
    return fit;
}

}  // namespace rdsig
