#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <span>
#include <vector>

#include "rdsig/duration_pmf.hpp"
#include "rdsig/model.hpp"

namespace rdsig {

using BigInt = boost::multiprecision::cpp_int;

// Bounded-composition counts C_t = C_{t-1} + ... + C_{t-delta}, with C_0 = 1
// (one empty composition) and C_k = 0 for k < 0. Exact integers plus
// independently maintained log-domain values.
class CountTable {
public:
    CountTable(int delta, int t_max);

    int delta() const { return delta_; }
    int t_max() const { return t_max_; }
    const BigInt& count(int t) const { return counts_[static_cast<size_t>(t)]; }
    double log_count(int t) const { return log_counts_[static_cast<size_t>(t)]; }

private:
    int delta_;
    int t_max_;
    std::vector<BigInt> counts_;
    std::vector<double> log_counts_;
};

BigInt count_sequences(int delta, int t);
double log_count_sequences(int delta, int t);

// Natural log of a positive big integer, exact to double precision even far
// beyond the double range.
double log_big(const BigInt& x);

// Growth constant of the count recursion: the unique positive root of
// x^delta - x^{delta-1} - ... - 1. Equals 1 for delta = 1; lies in (1, 2)
// otherwise. Bisection to 1e-12.
double growth_rate_psi(int delta);

// Number of sequences of length t sharing the type nu (which must have
// integral counts nu * t): a product of two permutations-with-repetitions.
BigInt count_type_sequences(int delta, int t, const TypeVector& nu);
double log_count_type_sequences(int delta, int t, const TypeVector& nu);

enum class EntropyConvention { normalized, mass_weighted };

// Shannon entropy of lambda normalized to a distribution; the mass_weighted
// convention scales it by the total mass (the Stirling exponent of a
// multinomial with lambda*t slots out of t).
double entropy(std::span<const double> lambda,
               EntropyConvention conv = EntropyConvention::normalized);

// KL divergence of lambda (normalized) against p. Returns +inf when p has a
// zero entry carrying positive lambda mass.
double kl_divergence(std::span<const double> lambda, const DurationPmf& p);

}  // namespace rdsig
