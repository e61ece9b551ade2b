#include "rdsig/combinatorics.hpp"

#include <algorithm>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace rdsig {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(std::span<const double> v) {
    double m = kNegInf;
    for (double x : v) m = std::max(m, x);
    if (m == kNegInf) return kNegInf;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

// Rounds nu * t to integer counts; rejects non-integral types.
std::vector<long long> integral_counts(std::span<const double> nu, int t) {
    std::vector<long long> counts(nu.size());
    for (size_t i = 0; i < nu.size(); ++i) {
        double scaled = nu[i] * static_cast<double>(t);
        long long rounded = std::llround(scaled);
        if (std::abs(scaled - static_cast<double>(rounded)) > 1e-6) {
            throw std::invalid_argument(
                "count_type_sequences: nu * t is not integral");
        }
        counts[i] = rounded;
    }
    return counts;
}

BigInt factorial(long long n) {
    BigInt f = 1;
    for (long long i = 2; i <= n; ++i) f *= i;
    return f;
}

double log_multinomial(const std::vector<long long>& counts) {
    long long n = 0;
    for (long long c : counts) n += c;
    double v = std::lgamma(static_cast<double>(n) + 1.0);
    for (long long c : counts) v -= std::lgamma(static_cast<double>(c) + 1.0);
    return v;
}

BigInt multinomial(const std::vector<long long>& counts) {
    long long n = 0;
    for (long long c : counts) n += c;
    BigInt v = factorial(n);
    for (long long c : counts) v /= factorial(c);
    return v;
}

}  // namespace

CountTable::CountTable(int delta, int t_max) : delta_(delta), t_max_(t_max) {
    if (delta_ < 1) throw std::invalid_argument("CountTable: delta must be >= 1");
    if (t_max_ < 0) throw std::invalid_argument("CountTable: t_max must be >= 0");
    counts_.resize(static_cast<size_t>(t_max_) + 1);
    log_counts_.resize(static_cast<size_t>(t_max_) + 1);
    counts_[0] = 1;
    log_counts_[0] = 0.0;
    std::vector<double> window;
    for (int t = 1; t <= t_max_; ++t) {
        BigInt c = 0;
        window.clear();
        for (int k = 1; k <= delta_ && k <= t; ++k) {
            c += counts_[static_cast<size_t>(t - k)];
            window.push_back(log_counts_[static_cast<size_t>(t - k)]);
        }
        counts_[static_cast<size_t>(t)] = std::move(c);
        log_counts_[static_cast<size_t>(t)] = log_sum_exp(window);
    }
}

BigInt count_sequences(int delta, int t) {
    if (t < 1) throw std::invalid_argument("count_sequences: t must be >= 1");
    return CountTable(delta, t).count(t);
}

double log_count_sequences(int delta, int t) {
    if (t < 1) throw std::invalid_argument("log_count_sequences: t must be >= 1");
    return CountTable(delta, t).log_count(t);
}

double log_big(const BigInt& x) {
    if (x <= 0) throw std::invalid_argument("log_big: argument must be positive");
    if (msb(x) <= 1000) {
        return std::log(x.convert_to<double>());
    }
    boost::multiprecision::cpp_bin_float_100 wide(x);
    return log(wide).convert_to<double>();
}

double growth_rate_psi(int delta) {
    if (delta < 1) throw std::invalid_argument("growth_rate_psi: delta must be >= 1");
    if (delta == 1) return 1.0;
    // p(x) = x^delta - x^{delta-1} - ... - 1; p(1) = 1 - delta < 0, p(2) = 1,
    // so the root is bracketed by (1, 2). Geometric-sum form for the low terms.
    auto p = [delta](double x) {
        double xd = std::pow(x, delta);
        return xd - (xd - 1.0) / (x - 1.0);
    };
    double lo = 1.0, hi = 2.0;
    while (hi - lo > 1e-12) {
        double mid = 0.5 * (lo + hi);
        if (p(mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

BigInt count_type_sequences(int delta, int t, const TypeVector& nu) {
    if (nu.delta() != delta) {
        throw std::invalid_argument("count_type_sequences: nu has wrong delta");
    }
    auto c1 = integral_counts(nu.nu(kState1), t);
    auto c2 = integral_counts(nu.nu(kState2), t);
    long long n1 = 0, n2 = 0, total = 0;
    for (size_t i = 0; i < c1.size(); ++i) {
        n1 += c1[i];
        n2 += c2[i];
        total += static_cast<long long>(i + 1) * (c1[i] + c2[i]);
    }
    if (n1 - n2 != 0 && n1 - n2 != 1) {
        throw std::invalid_argument(
            "count_type_sequences: phase counts must satisfy n1 - n2 in {0, 1}");
    }
    if (total != t) {
        throw std::invalid_argument(
            "count_type_sequences: durations must sum to t");
    }
    return multinomial(c1) * multinomial(c2);
}

double log_count_type_sequences(int delta, int t, const TypeVector& nu) {
    if (nu.delta() != delta) {
        throw std::invalid_argument("log_count_type_sequences: nu has wrong delta");
    }
    auto c1 = integral_counts(nu.nu(kState1), t);
    auto c2 = integral_counts(nu.nu(kState2), t);
    return log_multinomial(c1) + log_multinomial(c2);
}

double entropy(std::span<const double> lambda, EntropyConvention conv) {
    double mass = 0.0;
    for (double v : lambda) {
        if (!(v >= 0.0)) {
            throw std::invalid_argument("entropy: entries must be nonnegative");
        }
        mass += v;
    }
    if (!(mass > 0.0)) {
        throw std::invalid_argument("entropy: total mass must be positive");
    }
    double h = 0.0;
    for (double v : lambda) {
        if (v > 0.0) {
            double q = v / mass;
            h -= q * std::log(q);
        }
    }
    return conv == EntropyConvention::normalized ? h : mass * h;
}

double kl_divergence(std::span<const double> lambda, const DurationPmf& p) {
    if (static_cast<int>(lambda.size()) != p.spread()) {
        throw std::invalid_argument("kl_divergence: size mismatch");
    }
    double mass = 0.0;
    for (double v : lambda) {
        if (!(v >= 0.0)) {
            throw std::invalid_argument("kl_divergence: entries must be nonnegative");
        }
        mass += v;
    }
    if (!(mass > 0.0)) {
        throw std::invalid_argument("kl_divergence: total mass must be positive");
    }
    double d = 0.0;
    for (size_t i = 0; i < lambda.size(); ++i) {
        if (lambda[i] > 0.0) {
            double q = lambda[i] / mass;
            double pd = p.prob(static_cast<int>(i) + 1);
            if (pd <= 0.0) return std::numeric_limits<double>::infinity();
            d += q * std::log(q / pd);
        }
    }
    if (d < 0.0 && d > -1e-12) d = 0.0;  // rounding at lambda proportional to p
    return d;
}

}  // namespace rdsig
