#include "rdsig/sequence_probability.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rdsig {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_feasible(const ModelParams& params, const PhaseSequence& seq) {
    if (!is_feasible(seq, params.delta())) {
        throw std::invalid_argument(
            "sequence probability: infeasible sequence (duration > delta)");
    }
}

}  // namespace

double log_sequence_probability(const ModelParams& params,
                                const PhaseSequence& seq) {
    check_feasible(params, seq);
    const auto& phases = seq.phases();
    double log_p = 0.0;
    for (size_t i = 0; i + 1 < phases.size(); ++i) {
        double p = params.pmf(phases[i].state).prob(phases[i].duration);
        if (p <= 0.0) return kNegInf;
        log_p += std::log(p);
    }
    const Phase& last = phases.back();
    double p_last = seq.last_censored()
                        ? params.pmf(last.state).tail(last.duration)
                        : params.pmf(last.state).prob(last.duration);
    if (p_last <= 0.0) return kNegInf;
    return log_p + std::log(p_last);
}

double sequence_probability(const ModelParams& params, const PhaseSequence& seq) {
    return std::exp(log_sequence_probability(params, seq));
}

double log_sequence_probability_prime(const ModelParams& params,
                                      const PhaseSequence& seq) {
    check_feasible(params, seq);
    double log_p = 0.0;
    for (const Phase& ph : seq.phases()) {
        double p = params.pmf(ph.state).prob(ph.duration);
        if (p <= 0.0) return kNegInf;
        log_p += std::log(p);
    }
    return log_p;
}

double sequence_probability_prime(const ModelParams& params,
                                  const PhaseSequence& seq) {
    return std::exp(log_sequence_probability_prime(params, seq));
}

}  // namespace rdsig
