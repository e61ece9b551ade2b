#pragma once

#include <vector>

#include "rdsig/rng.hpp"

namespace rdsig {

// Probability mass function on phase durations {1, ..., delta}.
//
// Keeps the cumulative table for inverse-CDF sampling and the tail sums
// tail(d) = P(D >= d), which price the possibly still ongoing final phase of
// an observed sequence.
class DurationPmf {
public:
    explicit DurationPmf(std::vector<double> probs);

    static DurationPmf uniform(int delta);

    int spread() const { return static_cast<int>(probs_.size()); }

    // d in [1, spread]
    double prob(int d) const { return probs_[static_cast<size_t>(d) - 1]; }
    double tail(int d) const { return tail_[static_cast<size_t>(d) - 1]; }

    double min_prob() const { return min_prob_; }
    bool strictly_positive() const { return strictly_positive_; }
    double mean_duration() const { return mean_; }
    const std::vector<double>& probs() const { return probs_; }

    // Inverse-CDF lookup, O(log spread).
    int sample(Rng& rng) const;

private:
    std::vector<double> probs_;
    std::vector<double> cdf_;
    std::vector<double> tail_;
    double min_prob_ = 0.0;
    double mean_ = 0.0;
    bool strictly_positive_ = false;
};

}  // namespace rdsig
