#include "rdsig/lrt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rdsig/enumeration.hpp"
#include "rdsig/errors.hpp"
#include "rdsig/sequence_probability.hpp"

namespace rdsig {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

double log_emission_weight(double y, int state, const ModelParams& params) {
    double mu = params.mu(state);
    double s2 = params.sigma() * params.sigma();
    return mu * y / s2 - mu * mu / (2.0 * s2);
}

TransitionStructure::TransitionStructure(const ModelParams& params)
    : delta_(params.delta()),
      p1_(params.pmf(kState1).probs()),
      p2_(params.pmf(kState2).probs()) {
    p_plus_.resize(2 * static_cast<size_t>(delta_));
    for (int d = 1; d <= delta_; ++d) {
        p_plus_[static_cast<size_t>(d) - 1] = params.pmf(kState1).tail(d);
        p_plus_[static_cast<size_t>(delta_ + d) - 1] = params.pmf(kState2).tail(d);
    }
}

std::vector<double> TransitionStructure::dense() const {
    size_t n = 2 * static_cast<size_t>(delta_);
    std::vector<double> m(n * n, 0.0);
    size_t d = static_cast<size_t>(delta_);
    for (size_t i = 1; i < d; ++i) {
        m[i * n + (i - 1)] = 1.0;              // state-1 block lower shift
        m[(d + i) * n + (d + i - 1)] = 1.0;    // state-2 block lower shift
    }
    for (size_t j = 0; j < d; ++j) {
        m[0 * n + (d + j)] = p2_[j];  // transition 2 -> 1 completes a phase
        m[d * n + j] = p1_[j];        // transition 1 -> 2 completes a phase
    }
    return m;
}

LrtState init_state(const ModelParams& params, double x1, InitMode mode) {
    double y = x1 - params.mu0();
    int delta = params.delta();
    LrtState state;
    state.lambda.assign(2 * static_cast<size_t>(delta), 0.0);
    state.mode = mode;
    state.t = 1;
    double f1 = log_emission_weight(y, kState1, params);
    if (mode == InitMode::model_consistent) {
        state.lambda[0] = 1.0;
        state.log_scale = f1;
    } else {
        double f2 = log_emission_weight(y, kState2, params);
        double c = std::max(f1, f2);
        double w1 = std::exp(f1 - c);
        double w2 = std::exp(f2 - c);
        double norm = w1 + w2;
        state.lambda[0] = w1 / norm;
        state.lambda[static_cast<size_t>(delta)] = w2 / norm;
        state.log_scale = c + std::log(norm);
    }
    return state;
}

void step(LrtState& state, double x, const TransitionStructure& structure,
          const ModelParams& params, int renorm_stride) {
    if (state.t < 1) {
        throw std::invalid_argument("step: state not initialized");
    }
    if (renorm_stride < 1) {
        throw std::invalid_argument("step: renorm_stride must be >= 1");
    }
    double y = x - params.mu0();
    int delta = structure.delta();
    size_t d = static_cast<size_t>(delta);
    double f1 = log_emission_weight(y, kState1, params);
    double f2 = log_emission_weight(y, kState2, params);
    double c = std::max(f1, f2);
    double w1 = std::exp(f1 - c);
    double w2 = std::exp(f2 - c);

    double* lam = state.lambda.data();
    std::span<const double> p1 = structure.p1();
    std::span<const double> p2 = structure.p2();

    // Cross terms read the pre-shift state, so accumulate them first.
    double into1 = 0.0, into2 = 0.0;
    for (size_t j = 0; j < d; ++j) {
        into1 += p2[j] * lam[d + j];
        into2 += p1[j] * lam[j];
    }
    // In-place downward shift inside each block.
    for (size_t i = d; i-- > 1;) {
        lam[i] = w1 * lam[i - 1];
        lam[d + i] = w2 * lam[d + i - 1];
    }
    lam[0] = w1 * into1;
    lam[d] = w2 * into2;
    state.log_scale += c;
    state.t += 1;

    if (state.t % renorm_stride == 0) {
        double norm = 0.0;
        for (size_t i = 0; i < 2 * d; ++i) norm += lam[i];
        if (!(norm > 0.0)) {
            throw GuardError("step: recursion state vanished (zero pmf mass "
                             "along every feasible continuation)");
        }
        double inv = 1.0 / norm;
        for (size_t i = 0; i < 2 * d; ++i) lam[i] *= inv;
        state.log_scale += std::log(norm);
    }
}

double log_likelihood_ratio(const LrtState& state,
                            const TransitionStructure& structure) {
    std::span<const double> w = structure.p_plus();
    double dot = 0.0;
    for (size_t i = 0; i < w.size(); ++i) dot += w[i] * state.lambda[i];
    if (!(dot > 0.0)) return kNegInf;
    return std::log(dot) + state.log_scale;
}

std::vector<double> run_trajectory(const ModelParams& params,
                                   std::span<const double> x, InitMode mode,
                                   int renorm_stride) {
    if (x.empty()) {
        throw std::invalid_argument("run_trajectory: empty observation vector");
    }
    TransitionStructure structure(params);
    std::vector<double> out(x.size());
    LrtState state = init_state(params, x[0], mode);
    out[0] = log_likelihood_ratio(state, structure);
    for (size_t k = 1; k < x.size(); ++k) {
        step(state, x[k], structure, params, renorm_stride);
        out[k] = log_likelihood_ratio(state, structure);
    }
    return out;
}

double oracle_log_lrt(const ModelParams& params, std::span<const double> x) {
    if (x.empty()) {
        throw std::invalid_argument("oracle_log_lrt: empty observation vector");
    }
    int t = static_cast<int>(x.size());
    // Prefix sums of the shifted observations make each phase's emission
    // contribution O(1).
    std::vector<double> prefix(x.size() + 1, 0.0);
    for (size_t k = 0; k < x.size(); ++k) {
        prefix[k + 1] = prefix[k] + (x[k] - params.mu0());
    }
    double s2 = params.sigma() * params.sigma();
    double running_max = kNegInf;
    double running_sum = 0.0;  // sum of exp(term - running_max)
    enumerate_sequences(params.delta(), t, [&](const PhaseSequence& seq) {
        double log_p = log_sequence_probability(params, seq);
        if (log_p == kNegInf) return;
        double term = log_p;
        int k0 = 0;
        for (const Phase& ph : seq.phases()) {
            double mu = params.mu(ph.state);
            double seg = prefix[static_cast<size_t>(k0 + ph.duration)] -
                         prefix[static_cast<size_t>(k0)];
            term += mu * seg / s2 -
                    static_cast<double>(ph.duration) * mu * mu / (2.0 * s2);
            k0 += ph.duration;
        }
        if (term <= running_max) {
            running_sum += std::exp(term - running_max);
        } else {
            running_sum = running_sum * std::exp(running_max - term) + 1.0;
            running_max = term;
        }
    });
    if (running_max == kNegInf) return kNegInf;
    return running_max + std::log(running_sum);
}

}  // namespace rdsig
