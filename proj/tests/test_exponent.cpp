#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "rdsig/exponent.hpp"
#include "rdsig/rng.hpp"

using namespace rdsig;

namespace {

ModelParams uniform_params(int delta, double mu1, double mu2, double sigma) {
    return ModelParams(delta, DurationPmf::uniform(delta),
                       DurationPmf::uniform(delta), mu1, mu2, sigma);
}

// Simpson weights on [0,1] with n panels (n even).
double simpson_weight(int i, int n) {
    if (i == 0 || i == n) return 1.0;
    return i % 2 == 1 ? 4.0 : 2.0;
}

}  // namespace

TEST_CASE("guaranteed bound closed form") {
    CHECK(guaranteed_bound(uniform_params(3, 2.0, 5.0, 10.0)) ==
          doctest::Approx(0.02));
    CHECK(guaranteed_bound(uniform_params(2, 0.0, 1.0, 0.3)) == 0.0);
    CHECK(guaranteed_bound(uniform_params(2, 3.0, 4.0, 1.0)) ==
          doctest::Approx(4.5));
}

TEST_CASE("detectability condition") {
    ModelParams loud = uniform_params(2, 0.0, 1.0, 0.5);
    DetectabilityResult r = detectability(loud);
    CHECK(r.lhs == doctest::Approx(2.0 * std::log(2.0)));
    CHECK(r.rhs == doctest::Approx(1.0));
    CHECK(r.undetectable);

    ModelParams det1 = uniform_params(1, 0.0, 5.0, 1.0);
    DetectabilityResult r1 = detectability(det1);
    CHECK(r1.lhs == doctest::Approx(0.0));
    CHECK_FALSE(r1.undetectable);

    CHECK_THROWS_AS(detectability(uniform_params(2, 1.0, 2.0, 1.0)),
                    std::invalid_argument);
}

TEST_CASE("critical sigma for uniform pmfs") {
    CHECK(critical_sigma_uniform(2, 1.0) == doctest::Approx(0.42466).epsilon(1e-4));
    CHECK(critical_sigma_uniform(4, 2.0) == doctest::Approx(0.6006).epsilon(1e-3));
    CHECK_THROWS_AS(critical_sigma_uniform(1, 1.0), std::invalid_argument);

    // Root-bracket the detectability boundary in sigma and compare.
    for (int delta : {2, 3, 5}) {
        double mu = 1.5;
        double lo = 0.01, hi = 10.0;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            ModelParams p = uniform_params(delta, 0.0, mu, mid);
            if (detectability(p).undetectable) {
                hi = mid;  // noise already too high
            } else {
                lo = mid;
            }
        }
        CHECK(0.5 * (lo + hi) ==
              doctest::Approx(critical_sigma_uniform(delta, mu)).epsilon(1e-8));
    }
}

TEST_CASE("sampled types live in the feasible set") {
    Rng rng(41);
    for (int delta : {1, 2, 3, 7}) {
        for (int i = 0; i < 2000; ++i) {
            TypeVector nu = sample_type(delta, rng);
            CHECK(nu.in_type_set(1e-12));
            CHECK(nu.theta(kState2) > 0.0);
        }
    }
    TypeVector single = sample_type(1, rng);
    CHECK(single.nu(kState1)[0] == doctest::Approx(0.5));
    CHECK(single.nu(kState2)[0] == doctest::Approx(0.5));
    CHECK(single.theta(kState2) == doctest::Approx(0.5));
}

TEST_CASE("type sampler mean occupation matches quadrature") {
    // For delta = 2 the construction reduces to theta2 = (2-u2)/(4-u1-u2)
    // with u1, u2 independent uniforms; integrate on a Simpson grid.
    const int n = 200;
    double quad = 0.0;
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            double u1 = static_cast<double>(i) / n;
            double u2 = static_cast<double>(j) / n;
            quad += simpson_weight(i, n) * simpson_weight(j, n) *
                    (2.0 - u2) / (4.0 - u1 - u2);
        }
    }
    quad /= 9.0 * n * n;

    Rng rng(43);
    const int draws = 100000;
    double mean = 0.0, sq = 0.0;
    for (int i = 0; i < draws; ++i) {
        double th = sample_type(2, rng).theta(kState2);
        mean += th;
        sq += th * th;
    }
    mean /= draws;
    double var = (sq - draws * mean * mean) / (draws - 1);
    double se = std::sqrt(var / draws);
    CHECK(std::abs(mean - quad) <= 3 * se + 1e-6);
}

TEST_CASE("objective vanishes exactly at the model point") {
    // nu proportional to the pmfs, xi at the matched mean.
    for (double sigma : {0.5, 0.3}) {
        ModelParams p = uniform_params(2, 0.0, 1.0, sigma);
        double denom = p.pmf(kState1).mean_duration() + p.pmf(kState2).mean_duration();
        std::vector<double> nu1(2), nu2(2);
        for (int d = 0; d < 2; ++d) {
            nu1[static_cast<size_t>(d)] = p.pmf(kState1).probs()[static_cast<size_t>(d)] / denom;
            nu2[static_cast<size_t>(d)] = p.pmf(kState2).probs()[static_cast<size_t>(d)] / denom;
        }
        TypeVector nu(nu1, nu2);
        double xi = nu.theta(kState2) * p.mu2();
        ObjectiveValue v = bound_objective(nu, xi, p);
        CHECK(v.value == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(v.feasible == detectability(p).undetectable);
    }
}

TEST_CASE("objective with equal levels reduces to the KL terms") {
    ModelParams p(2, DurationPmf({0.7, 0.3}), DurationPmf({0.4, 0.6}), 1.0, 1.0,
                  1.0);
    Rng rng(47);
    TypeVector nu = sample_type(2, rng);
    ObjectiveValue at_zero = bound_objective(nu, 0.0, p);
    double kl = kl_divergence(nu.nu(kState1), p.pmf(kState1)) +
                kl_divergence(nu.nu(kState2), p.pmf(kState2));
    CHECK(at_zero.value == doctest::Approx(kl));
    CHECK(at_zero.feasible);
    // Any other xi only adds the quadratic term.
    CHECK(bound_objective(nu, 0.3, p).value >= at_zero.value);
}

TEST_CASE("objective is nonnegative everywhere") {
    ModelParams p = uniform_params(3, 1.0, 2.0, 0.8);
    Rng rng(53);
    for (int i = 0; i < 10000; ++i) {
        TypeVector nu = sample_type(3, rng);
        double xi = rng.gaussian(0.0, 2.0);
        ObjectiveValue v = bound_objective(nu, xi, p);
        CHECK(v.value >= 0.0);
    }
}

TEST_CASE("solver reproduces the delta 1 closed form") {
    // The feasible set is a single point, so the bound reduces to
    // (mu2-mu1)^2/(4 sigma^2) + mu1 (mu2-mu1)/(2 sigma^2), and the full lower
    // bound to (mu1^2 + mu2^2)/(4 sigma^2).
    for (auto [mu1, mu2, sigma] : {std::tuple{0.0, 1.0, 0.5},
                                   std::tuple{1.0, 3.0, 1.0},
                                   std::tuple{2.0, 2.0, 0.7}}) {
        ModelParams p = uniform_params(1, mu1, mu2, sigma);
        BoundResult res = solve_bound(p, 100, EntropyConvention::normalized,
                                      true, 9, 1);
        double gap = mu2 - mu1;
        double expect_eta = gap * gap / (4.0 * sigma * sigma) +
                            mu1 * gap / (2.0 * sigma * sigma);
        CHECK(res.eta_lower == doctest::Approx(expect_eta).epsilon(1e-9));
        CHECK(res.zeta_lower ==
              doctest::Approx((mu1 * mu1 + mu2 * mu2) / (4.0 * sigma * sigma))
                  .epsilon(1e-9));
    }
}

TEST_CASE("bound vanishes exactly in the undetectable regime") {
    // 20-point sigma grid straddling the threshold, including the boundary.
    double sigma_star = critical_sigma_uniform(2, 1.0);
    for (int i = 0; i < 10; ++i) {
        double factor = 1.0 + 0.02 * i;
        ModelParams p = uniform_params(2, 0.0, 1.0, factor * sigma_star);
        CHECK(detectability(p).undetectable);
        BoundResult res =
            solve_bound(p, 1000, EntropyConvention::normalized, true, 11, 1);
        CHECK(res.eta_lower == 0.0);
        CHECK(res.zeta_lower == 0.0);
        REQUIRE(res.argmin_nu.has_value());
        CHECK(res.argmin_nu->nu(kState1)[0] == doctest::Approx(1.0 / 6.0));
    }
    for (int i = 0; i < 10; ++i) {
        double factor = 0.9 - 0.04 * i;
        ModelParams p = uniform_params(2, 0.0, 1.0, factor * sigma_star);
        CHECK_FALSE(detectability(p).undetectable);
        BoundResult res =
            solve_bound(p, 20000, EntropyConvention::normalized, true, 11, 1);
        CHECK(res.eta_lower > 0.0);
    }
}

TEST_CASE("bound is monotone nonincreasing in sigma") {
    std::vector<double> sigmas = {0.24, 0.28, 0.32, 0.36, 0.40, 0.44};
    double prev = std::numeric_limits<double>::infinity();
    for (double s : sigmas) {
        ModelParams p = uniform_params(2, 0.0, 1.0, s);
        BoundResult res =
            solve_bound(p, 20000, EntropyConvention::normalized, true, 13, 2);
        CHECK(res.eta_lower <= prev + 1e-6);
        prev = res.eta_lower;
    }
}

TEST_CASE("positive mu1 keeps the guaranteed component") {
    for (double sigma : {0.5, 1.0, 3.0}) {
        ModelParams p = uniform_params(3, 1.0, 2.0, sigma);
        BoundResult res =
            solve_bound(p, 5000, EntropyConvention::normalized, true, 17, 1);
        CHECK(res.zeta_lower >= guaranteed_bound(p) - 1e-12);
        CHECK(res.eta_lower >= 0.0);
    }
}

TEST_CASE("solver is deterministic across thread counts") {
    ModelParams p = uniform_params(2, 0.0, 1.0, 0.3);
    BoundResult a = solve_bound(p, 20000, EntropyConvention::normalized, true, 19, 1);
    BoundResult b = solve_bound(p, 20000, EntropyConvention::normalized, true, 19, 4);
    CHECK(a.eta_lower == b.eta_lower);
    CHECK(a.argmin_xi == b.argmin_xi);
    CHECK(a.feasible_points_evaluated == b.feasible_points_evaluated);
    REQUIRE(a.trace.size() == b.trace.size());
    for (size_t i = 0; i < a.trace.size(); ++i) {
        CHECK(a.trace[i].first == b.trace[i].first);
        CHECK(a.trace[i].second == b.trace[i].second);
    }
    // The mass-weighted convention shrinks the feasible entropy budget, so
    // the bound can only grow.
    BoundResult mw =
        solve_bound(p, 20000, EntropyConvention::mass_weighted, true, 19, 1);
    CHECK(mw.eta_lower >= a.eta_lower - 1e-6);
}

TEST_CASE("exponent estimate: identical hypotheses give zero") {
    ModelParams p = uniform_params(2, 0.0, 0.0, 1.0);
    ExponentEstimate est = estimate_error_exponent(p, 50, 20, 23, 1);
    CHECK(est.zeta_hat == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(est.std_error == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("exponent estimate: known-signal Gaussian rate") {
    // Delta 1 with equal levels is a known deterministic signal, whose
    // exponent is the classical mu^2/(2 sigma^2).
    ModelParams p = uniform_params(1, 1.0, 1.0, 1.0);
    ExponentEstimate est = estimate_error_exponent(p, 2000, 200, 29, 2);
    CHECK(est.zeta_hat == doctest::Approx(0.5).epsilon(0.02));
    CHECK(est.n_runs == 200);
    CHECK(est.t_used == 2000);
    CHECK(est.std_error >= 0.0);
}

TEST_CASE("exponent standard error shrinks with the horizon") {
    ModelParams p = uniform_params(2, 0.0, 1.0, 0.5);
    ExponentEstimate coarse = estimate_error_exponent(p, 100, 200, 31, 2);
    ExponentEstimate fine = estimate_error_exponent(p, 400, 200, 31, 2);
    CHECK(fine.std_error < coarse.std_error);
    CHECK(static_cast<int>(fine.per_run_values.size()) == 200);
}
