#include "rdsig/duration_pmf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rdsig {

DurationPmf::DurationPmf(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) {
        throw std::invalid_argument("DurationPmf: need at least one duration entry");
    }
    double sum = 0.0;
    min_prob_ = probs_.front();
    for (double p : probs_) {
        if (!(p >= 0.0)) {
            throw std::invalid_argument("DurationPmf: entries must be nonnegative");
        }
        sum += p;
        min_prob_ = std::min(min_prob_, p);
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw std::invalid_argument("DurationPmf: entries must sum to 1 (got " +
                                    std::to_string(sum) + ")");
    }
    strictly_positive_ = min_prob_ > 0.0;

    cdf_.resize(probs_.size());
    tail_.resize(probs_.size());
    double acc = 0.0;
    for (size_t i = 0; i < probs_.size(); ++i) {
        acc += probs_[i];
        cdf_[i] = acc;
        mean_ += static_cast<double>(i + 1) * probs_[i];
    }
    cdf_.back() = 1.0;
    double t = 0.0;
    for (size_t i = probs_.size(); i-- > 0;) {
        t += probs_[i];
        tail_[i] = t;
    }
}

DurationPmf DurationPmf::uniform(int delta) {
    if (delta < 1) {
        throw std::invalid_argument("DurationPmf::uniform: delta must be >= 1");
    }
    return DurationPmf(std::vector<double>(static_cast<size_t>(delta),
                                           1.0 / static_cast<double>(delta)));
}

int DurationPmf::sample(Rng& rng) const {
    double u = rng.uniform();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) --it;
    return static_cast<int>(it - cdf_.begin()) + 1;
}

}  // namespace rdsig
