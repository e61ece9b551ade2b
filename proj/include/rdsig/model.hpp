#pragma once

#include <vector>

#include "rdsig/duration_pmf.hpp"

namespace rdsig {

inline constexpr int kState1 = 1;
inline constexpr int kState2 = 2;

// Full problem instance: common duration spread, one duration pmf per state,
// the two signal levels, noise level, and an optional baseline offset that the
// detector removes by the change of variables y = x - mu0.
class ModelParams {
public:
    ModelParams(int delta, DurationPmf p1, DurationPmf p2, double mu1,
                double mu2, double sigma, double mu0 = 0.0);

    int delta() const { return delta_; }
    const DurationPmf& pmf(int state) const {
        return state == kState1 ? p1_ : p2_;
    }
    double mu(int state) const { return state == kState1 ? mu1_ : mu2_; }
    double mu1() const { return mu1_; }
    double mu2() const { return mu2_; }
    double sigma() const { return sigma_; }
    double mu0() const { return mu0_; }

    // min over both pmfs' entries
    double p_min() const;
    bool strictly_positive() const {
        return p1_.strictly_positive() && p2_.strictly_positive();
    }

private:
    int delta_;
    DurationPmf p1_;
    DurationPmf p2_;
    double mu1_, mu2_, sigma_, mu0_;
};

struct Phase {
    int state;     // kState1 or kState2
    int duration;  // samples, >= 1

    bool operator==(const Phase&) const = default;
};

// A realized state path as an ordered list of phases. States strictly
// alternate and the first phase is state 1. The final phase is stored at its
// observed (possibly truncated) duration; `last_censored` marks it as still
// ongoing at the horizon.
class PhaseSequence {
public:
    explicit PhaseSequence(std::vector<Phase> phases, bool last_censored = true);

    const std::vector<Phase>& phases() const { return phases_; }
    int total_length() const { return total_length_; }
    bool last_censored() const { return last_censored_; }
    int last_state() const { return phases_.back().state; }
    int last_duration() const { return phases_.back().duration; }

    // Expansion to the per-sample state string s_1..s_t.
    std::vector<int> states() const;

private:
    std::vector<Phase> phases_;
    int total_length_ = 0;
    bool last_censored_ = true;
};

// Structural feasibility against a duration spread (alternation and the start
// state are already enforced by the type).
bool is_feasible(const PhaseSequence& seq, int delta);

// Per-duration phase histograms and occupation times. The censored last phase
// is counted at its observed duration and also exposed separately.
struct SequenceStats {
    std::vector<int> n1d, n2d;  // index d-1 holds the count of duration-d phases
    int n1 = 0, n2 = 0;         // phase counts per state
    long tau1 = 0, tau2 = 0;    // occupation times (samples)
    int last_state = kState1;
    int last_duration = 0;
    bool last_censored = true;

    int count(int state, int d) const {
        const auto& v = state == kState1 ? n1d : n2d;
        return v[static_cast<size_t>(d) - 1];
    }
};

SequenceStats compute_stats(const PhaseSequence& seq, int delta);

// Empirical type: phase-duration histograms normalized by sequence length,
// plus the derived occupation fractions theta_m = sum_d d * nu_{m,d}.
class TypeVector {
public:
    TypeVector(std::vector<double> nu1, std::vector<double> nu2);

    int delta() const { return static_cast<int>(nu1_.size()); }
    const std::vector<double>& nu(int state) const {
        return state == kState1 ? nu1_ : nu2_;
    }
    double mass(int state) const { return state == kState1 ? mass1_ : mass2_; }
    double theta(int state) const { return state == kState1 ? theta1_ : theta2_; }

    // Membership in the limit set: equal masses and theta_1 + theta_2 = 1.
    bool in_type_set(double tol = 1e-9) const;

private:
    std::vector<double> nu1_, nu2_;
    double mass1_ = 0.0, mass2_ = 0.0;
    double theta1_ = 0.0, theta2_ = 0.0;
};

TypeVector sequence_type(const PhaseSequence& seq, int delta);

}  // namespace rdsig
