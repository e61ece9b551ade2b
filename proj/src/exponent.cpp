#include "rdsig/exponent.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>

#include "rdsig/sampling.hpp"

namespace rdsig {

namespace {

constexpr double kThetaFloor = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::pair<size_t, size_t>> partition_ranges(size_t n, int threads) {
    int k = std::max(1, threads);
    std::vector<std::pair<size_t, size_t>> ranges;
    size_t chunk = (n + static_cast<size_t>(k) - 1) / static_cast<size_t>(k);
    for (size_t lo = 0; lo < n; lo += chunk) {
        ranges.emplace_back(lo, std::min(n, lo + chunk));
    }
    return ranges;
}

void run_partitioned(size_t n, int threads,
                     const std::function<void(size_t, size_t)>& work) {
    auto ranges = partition_ranges(n, threads);
    if (ranges.size() <= 1) {
        if (!ranges.empty()) work(ranges[0].first, ranges[0].second);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(ranges.size());
    for (auto [lo, hi] : ranges) {
        pool.emplace_back([lo, hi, &work] { work(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace

ExponentEstimate estimate_error_exponent(const ModelParams& params, int t_horizon,
                                         int n_runs, std::uint64_t seed,
                                         int threads) {
    if (t_horizon < 1 || n_runs < 1) {
        throw std::invalid_argument(
            "estimate_error_exponent: need t_horizon >= 1 and n_runs >= 1");
    }
    ExponentEstimate est;
    est.t_used = t_horizon;
    est.n_runs = n_runs;
    est.per_run_values.assign(static_cast<size_t>(n_runs), 0.0);

    run_partitioned(static_cast<size_t>(n_runs), threads, [&](size_t lo, size_t hi) {
        for (size_t j = lo; j < hi; ++j) {
            Rng rng(seed, j);
            Observations obs =
                sample_observations(params, Hypothesis::h0, t_horizon, rng);
            std::vector<double> traj = run_trajectory(params, obs.x);
            est.per_run_values[j] =
                -traj.back() / static_cast<double>(t_horizon);
        }
    });

    double mean = 0.0;
    for (double v : est.per_run_values) mean += v;
    mean /= static_cast<double>(n_runs);
    double var = 0.0;
    for (double v : est.per_run_values) var += (v - mean) * (v - mean);
    est.zeta_hat = mean;
    est.std_error = n_runs > 1
                        ? std::sqrt(var / static_cast<double>(n_runs - 1) /
                                    static_cast<double>(n_runs))
                        : 0.0;
    return est;
}

double guaranteed_bound(const ModelParams& params) {
    double s2 = params.sigma() * params.sigma();
    return params.mu1() * params.mu1() / (2.0 * s2);
}

DetectabilityResult detectability(const ModelParams& params) {
    if (params.mu1() != 0.0) {
        throw std::invalid_argument(
            "detectability: defined for mu1 = 0 only; use solve_bound for the "
            "general case");
    }
    DetectabilityResult res;
    const auto& p1 = params.pmf(kState1);
    const auto& p2 = params.pmf(kState2);
    res.lhs = entropy(p1.probs()) + entropy(p2.probs());
    double qp1 = p1.mean_duration();
    double qp2 = p2.mean_duration();
    double mu = params.mu2();
    double s2 = params.sigma() * params.sigma();
    res.rhs = qp2 / (qp1 + qp2) * mu * mu / (2.0 * s2);
    res.undetectable = res.lhs >= res.rhs;
    return res;
}

double critical_sigma_uniform(int delta, double mu) {
    if (delta < 2) {
        throw std::invalid_argument(
            "critical_sigma_uniform: delta must be >= 2 (a deterministic "
            "process is always detectable)");
    }
    if (!(mu > 0.0)) {
        throw std::invalid_argument("critical_sigma_uniform: mu must be > 0");
    }
    return mu / (2.0 * std::sqrt(2.0 * std::log(static_cast<double>(delta))));
}

namespace {

// Uniform point on the (delta-1)-simplex via sorted uniform spacings.
std::vector<double> simplex_point(int delta, Rng& rng) {
    if (delta == 1) return {1.0};
    std::vector<double> cuts(static_cast<size_t>(delta) - 1);
    for (double& c : cuts) c = rng.uniform();
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> w(static_cast<size_t>(delta));
    double prev = 0.0;
    for (size_t i = 0; i < cuts.size(); ++i) {
        w[i] = cuts[i] - prev;
        prev = cuts[i];
    }
    w.back() = 1.0 - prev;
    return w;
}

TypeVector type_from_weights(std::vector<double> w1, std::vector<double> w2) {
    double q1 = 0.0, q2 = 0.0;
    for (size_t i = 0; i < w1.size(); ++i) {
        double d = static_cast<double>(i + 1);
        q1 += d * w1[i];
        q2 += d * w2[i];
    }
    double c = 1.0 / (q1 + q2);
    for (size_t i = 0; i < w1.size(); ++i) {
        w1[i] *= c;
        w2[i] *= c;
    }
    return TypeVector(std::move(w1), std::move(w2));
}

}  // namespace

TypeVector sample_type(int delta, Rng& rng) {
    if (delta < 1) throw std::invalid_argument("sample_type: delta must be >= 1");
    return type_from_weights(simplex_point(delta, rng), simplex_point(delta, rng));
}

ObjectiveValue bound_objective(const TypeVector& nu, double xi,
                               const ModelParams& params,
                               EntropyConvention conv) {
    ObjectiveValue out;
    double theta2 = nu.theta(kState2);
    if (theta2 < kThetaFloor) {
        out.value = kInf;
        out.feasible = false;
        return out;
    }
    double s2 = params.sigma() * params.sigma();
    double gap = params.mu2() - params.mu1();
    double h = entropy(nu.nu(kState1), conv) + entropy(nu.nu(kState2), conv);
    double mismatch = xi / theta2 - gap;
    out.value = kl_divergence(nu.nu(kState1), params.pmf(kState1)) +
                kl_divergence(nu.nu(kState2), params.pmf(kState2)) +
                theta2 / (2.0 * s2) * mismatch * mismatch +
                theta2 * params.mu1() * gap / s2;
    out.feasible = h >= xi * xi / (2.0 * theta2 * s2);
    return out;
}

namespace {

struct InnerEval {
    double value = kInf;
    double xi = 0.0;
    bool feasible = false;
};

// Objective with the constrained minimization over xi folded in:
// xi* = min(theta2 * gap, sigma * sqrt(2 theta2 H)). The pair (nu, xi*) is
// always feasible when theta2 is bounded away from zero.
InnerEval eval_type(const TypeVector& nu, const ModelParams& params,
                    EntropyConvention conv) {
    InnerEval ev;
    double theta2 = nu.theta(kState2);
    if (theta2 < kThetaFloor) return ev;
    double s2 = params.sigma() * params.sigma();
    double gap = params.mu2() - params.mu1();
    double h = entropy(nu.nu(kState1), conv) + entropy(nu.nu(kState2), conv);
    double cap = params.sigma() * std::sqrt(2.0 * theta2 * h);
    ev.xi = std::min(theta2 * gap, cap);
    double mismatch = ev.xi / theta2 - gap;
    ev.value = kl_divergence(nu.nu(kState1), params.pmf(kState1)) +
               kl_divergence(nu.nu(kState2), params.pmf(kState2)) +
               theta2 / (2.0 * s2) * mismatch * mismatch +
               theta2 * params.mu1() * gap / s2;
    ev.feasible = true;
    return ev;
}

struct SearchBest {
    double value = kInf;
    long index = -1;
    std::optional<TypeVector> nu;
    double xi = 0.0;
    std::vector<std::pair<long, double>> improvements;
};

}  // namespace

BoundResult solve_bound(const ModelParams& params, long budget,
                        EntropyConvention mode, bool refine, std::uint64_t seed,
                        int threads) {
    if (budget < 1) throw std::invalid_argument("solve_bound: budget must be >= 1");
    BoundResult res;
    res.mode = mode;

    if (params.mu1() == 0.0) {
        DetectabilityResult det = detectability(params);
        if (det.undetectable) {
            // The cost vanishes at nu proportional to the model pmfs.
            const auto& p1 = params.pmf(kState1).probs();
            const auto& p2 = params.pmf(kState2).probs();
            res.argmin_nu = type_from_weights(p1, p2);
            res.argmin_xi = res.argmin_nu->theta(kState2) * params.mu2();
            res.eta_lower = 0.0;
            res.zeta_lower = guaranteed_bound(params);
            res.feasible_points_evaluated = 0;
            res.trace.emplace_back(0, 0.0);
            return res;
        }
    }

    int delta = params.delta();
    auto ranges = partition_ranges(static_cast<size_t>(budget), threads);
    std::vector<SearchBest> worker_best(ranges.size());
    std::vector<long> feasible_counts(ranges.size(), 0);
    {
        std::vector<std::thread> pool;
        for (size_t w = 0; w < ranges.size(); ++w) {
            pool.emplace_back([&, w] {
                SearchBest best;
                long feasible = 0;
                for (size_t i = ranges[w].first; i < ranges[w].second; ++i) {
                    Rng rng(seed, i);
                    TypeVector nu = sample_type(delta, rng);
                    InnerEval ev = eval_type(nu, params, mode);
                    if (!ev.feasible) continue;
                    ++feasible;
                    if (ev.value < best.value) {
                        best.value = ev.value;
                        best.index = static_cast<long>(i);
                        best.nu = std::move(nu);
                        best.xi = ev.xi;
                        best.improvements.emplace_back(static_cast<long>(i) + 1,
                                                       ev.value);
                    }
                }
                worker_best[w] = std::move(best);
                feasible_counts[w] = feasible;
            });
        }
        for (auto& th : pool) th.join();
    }

    // Ranges are contiguous and ascending, so filtering local improvement
    // lists in order reconstructs the global best-so-far trace.
    double running = kInf;
    for (size_t w = 0; w < ranges.size(); ++w) {
        res.feasible_points_evaluated += feasible_counts[w];
        for (const auto& [idx, value] : worker_best[w].improvements) {
            if (value < running) {
                running = value;
                res.trace.emplace_back(idx, value);
            }
        }
    }
    SearchBest best;
    for (auto& wb : worker_best) {
        if (wb.nu && wb.value < best.value) {
            best.value = wb.value;
            best.index = wb.index;
            best.nu = std::move(wb.nu);
            best.xi = wb.xi;
        }
    }

    if (!best.nu) {
        res.fallback_guaranteed_only = true;
        res.eta_lower = 0.0;
        res.zeta_lower = guaranteed_bound(params);
        return res;
    }

    if (refine) {
        // Coordinate descent in simplex-weight space; rebuilding the type
        // re-applies the common scale, so every candidate stays in the set.
        double mass = best.nu->mass(kState1);
        std::vector<double> w1 = best.nu->nu(kState1);
        std::vector<double> w2 = best.nu->nu(kState2);
        for (double& v : w1) v /= mass;
        for (double& v : w2) v /= mass;
        double refined = best.value;
        double xi = best.xi;
        for (double step = 1e-3; step >= 1e-6; step *= 0.1) {
            bool improved = true;
            int guard = 0;
            while (improved && guard++ < 4000) {
                improved = false;
                for (int block = 0; block < 2; ++block) {
                    for (size_t j = 0; j < w1.size(); ++j) {
                        for (double sign : {+1.0, -1.0}) {
                            std::vector<double> a = w1, b = w2;
                            auto& tgt = block == 0 ? a : b;
                            tgt[j] = std::max(0.0, tgt[j] + sign * step);
                            double s = 0.0;
                            for (double v : tgt) s += v;
                            if (!(s > 0.0)) continue;
                            for (double& v : tgt) v /= s;
                            TypeVector cand = type_from_weights(a, b);
                            InnerEval ev = eval_type(cand, params, mode);
                            if (ev.feasible && ev.value < refined) {
                                refined = ev.value;
                                xi = ev.xi;
                                w1 = cand.nu(kState1);
                                w2 = cand.nu(kState2);
                                double m = cand.mass(kState1);
                                for (double& v : w1) v /= m;
                                for (double& v : w2) v /= m;
                                best.nu = cand;
                                improved = true;
                            }
                        }
                    }
                }
            }
        }
        if (refined < best.value) {
            best.value = refined;
            best.xi = xi;
            res.trace.emplace_back(budget + 1, refined);
        }
    }

    res.eta_lower = best.value;
    res.zeta_lower = best.value + guaranteed_bound(params);
    res.argmin_nu = best.nu;
    res.argmin_xi = best.xi;
    return res;
}

}  // namespace rdsig
