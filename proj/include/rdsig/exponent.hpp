#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "rdsig/combinatorics.hpp"
#include "rdsig/lrt.hpp"
#include "rdsig/model.hpp"
#include "rdsig/rng.hpp"

namespace rdsig {

// Monte Carlo estimate of the error exponent: mean of -(1/T) log L_T over
// independent noise-only streams, with its standard error.
struct ExponentEstimate {
    double zeta_hat = 0.0;
    double std_error = 0.0;
    int t_used = 0;
    int n_runs = 0;
    std::vector<double> per_run_values;
};

ExponentEstimate estimate_error_exponent(const ModelParams& params, int t_horizon,
                                         int n_runs, std::uint64_t seed,
                                         int threads = 1);

// Always-valid lower bound on the exponent: the state-1 SNR mu1^2/(2 sigma^2).
double guaranteed_bound(const ModelParams& params);

// Entropy-vs-SNR test for mu1 = 0: undetectable when
// H(p1) + H(p2) >= q'p2 / (q'p1 + q'p2) * mu2^2 / (2 sigma^2).
struct DetectabilityResult {
    double lhs = 0.0;  // process entropy
    double rhs = 0.0;  // expected long-run SNR
    bool undetectable = false;
};

DetectabilityResult detectability(const ModelParams& params);

// Noise level at which uniform-pmf models become undetectable:
// mu / (2 sqrt(2 log delta)). Requires delta >= 2.
double critical_sigma_uniform(int delta, double mu);

// Uniform-ish draw from the feasible type set: two simplex points (sorted
// uniform spacings) rescaled by a common factor so the occupation fractions
// sum to one. Always lands in the set exactly.
TypeVector sample_type(int delta, Rng& rng);

struct ObjectiveValue {
    double value = 0.0;
    bool feasible = false;
};

// Lower-bound objective at (nu, xi): the two KL terms, the quadratic mismatch
// term, and the coupling term theta2 * mu1 (mu2 - mu1) / sigma^2. Feasible
// when H(nu1) + H(nu2) >= xi^2 / (2 theta2 sigma^2).
ObjectiveValue bound_objective(const TypeVector& nu, double xi,
                               const ModelParams& params,
                               EntropyConvention conv = EntropyConvention::normalized);

struct BoundResult {
    double eta_lower = 0.0;
    double zeta_lower = 0.0;  // eta_lower + mu1^2/(2 sigma^2)
    std::optional<TypeVector> argmin_nu;  // empty only in the fallback case
    double argmin_xi = 0.0;
    long feasible_points_evaluated = 0;
    EntropyConvention mode = EntropyConvention::normalized;
    bool fallback_guaranteed_only = false;
    // Best-so-far improvements: (1-based sample index, objective value).
    // A final entry with index budget+1 is appended by the refinement pass
    // when it improves on the search.
    std::vector<std::pair<long, double>> trace;
};

// Random search over sampled types with the exact inner minimization over xi
// folded in, plus an optional coordinate-descent refinement of the best point.
// Returns 0 immediately (with the known vanishing point) when mu1 = 0 and the
// model is undetectable. Deterministic for fixed seed, any thread count.
BoundResult solve_bound(const ModelParams& params, long budget,
                        EntropyConvention mode, bool refine, std::uint64_t seed,
                        int threads = 1);

}  // namespace rdsig
