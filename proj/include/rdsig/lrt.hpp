#pragma once

#include <span>
#include <vector>

#include "rdsig/model.hpp"

namespace rdsig {

// Initial condition for the recursion. `model_consistent` (default) puts mass
// only on the state-1 block, matching the model's fixed first state and the
// enumeration oracle. `paper_literal` seeds both blocks.
enum class InitMode { model_consistent, paper_literal };

// Per-sample log emission weight of state m against the noise-only density:
// mu_m * y / sigma^2 - mu_m^2 / (2 sigma^2). The baseline offset must already
// be removed from y.
double log_emission_weight(double y, int state, const ModelParams& params);

// The constant transition matrix of the recursion and the tail-sum readout
// weights. Block structure: a lower shift inside each state block (the phase
// grows by one sample) and a rank-1 cross block weighted by the other state's
// pmf (the previous phase completes). Immutable, shared read-only.
class TransitionStructure {
public:
    explicit TransitionStructure(const ModelParams& params);

    int delta() const { return delta_; }
    std::span<const double> p1() const { return {p1_.data(), p1_.size()}; }
    std::span<const double> p2() const { return {p2_.data(), p2_.size()}; }

    // Readout weights: tail sums of both pmfs, concatenated (size 2*delta).
    std::span<const double> p_plus() const { return {p_plus_.data(), p_plus_.size()}; }

    // Dense 2*delta x 2*delta copy of the transition matrix (row-major); used
    // by reference implementations and tests.
    std::vector<double> dense() const;

private:
    int delta_;
    std::vector<double> p1_, p2_;
    std::vector<double> p_plus_;
};

// Recursion state: the 2*delta contribution vector held at unit 1-norm plus
// the accumulated log of the normalization factors. Value type, one owner.
struct LrtState {
    std::vector<double> lambda;
    double log_scale = 0.0;
    int t = 0;
    InitMode mode = InitMode::model_consistent;
};

LrtState init_state(const ModelParams& params, double x1,
                    InitMode mode = InitMode::model_consistent);

// One recursion update with observation x. Renormalization runs every
// `renorm_stride` steps (1 = every step); the log factor accumulates either
// way, so the readout is stride-invariant.
void step(LrtState& state, double x, const TransitionStructure& structure,
          const ModelParams& params, int renorm_stride = 1);

// log L_t of the current state: log(p_plus . lambda) + log_scale.
double log_likelihood_ratio(const LrtState& state,
                            const TransitionStructure& structure);

// log L_t for every prefix t = 1..|x|. O(delta) per step.
std::vector<double> run_trajectory(const ModelParams& params,
                                   std::span<const double> x,
                                   InitMode mode = InitMode::model_consistent,
                                   int renorm_stride = 1);

// Ground truth by exhaustive enumeration: log-sum-exp over all feasible
// sequences of log P(s^t) plus the per-sample emission weights. Guarded by
// the enumeration limit.
double oracle_log_lrt(const ModelParams& params, std::span<const double> x);

}  // namespace rdsig
