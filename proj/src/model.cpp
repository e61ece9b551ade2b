#include "rdsig/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rdsig {

ModelParams::ModelParams(int delta, DurationPmf p1, DurationPmf p2, double mu1,
                         double mu2, double sigma, double mu0)
    : delta_(delta),
      p1_(std::move(p1)),
      p2_(std::move(p2)),
      mu1_(mu1),
      mu2_(mu2),
      sigma_(sigma),
      mu0_(mu0) {
    if (delta_ < 1) {
        throw std::invalid_argument("ModelParams: delta must be >= 1");
    }
    if (p1_.spread() != delta_ || p2_.spread() != delta_) {
        throw std::invalid_argument("ModelParams: pmf length must equal delta");
    }
    if (!(sigma_ > 0.0)) {
        throw std::invalid_argument("ModelParams: sigma must be > 0");
    }
    if (!(mu1_ >= 0.0) || !(mu2_ >= mu1_)) {
        throw std::invalid_argument("ModelParams: require mu2 >= mu1 >= 0");
    }
    if (!std::isfinite(mu0_)) {
        throw std::invalid_argument("ModelParams: mu0 must be finite");
    }
}

double ModelParams::p_min() const {
    return std::min(p1_.min_prob(), p2_.min_prob());
}

PhaseSequence::PhaseSequence(std::vector<Phase> phases, bool last_censored)
    : phases_(std::move(phases)), last_censored_(last_censored) {
    if (phases_.empty()) {
        throw std::invalid_argument("PhaseSequence: no phases");
    }
    if (phases_.front().state != kState1) {
        throw std::invalid_argument("PhaseSequence: first phase must be state 1");
    }
    int prev = 0;
    for (const Phase& ph : phases_) {
        if (ph.state != kState1 && ph.state != kState2) {
            throw std::invalid_argument("PhaseSequence: state must be 1 or 2");
        }
        if (ph.state == prev) {
            throw std::invalid_argument("PhaseSequence: states must alternate");
        }
        if (ph.duration < 1) {
            throw std::invalid_argument("PhaseSequence: duration must be >= 1");
        }
        total_length_ += ph.duration;
        prev = ph.state;
    }
}

std::vector<int> PhaseSequence::states() const {
    std::vector<int> s;
    s.reserve(static_cast<size_t>(total_length_));
    for (const Phase& ph : phases_) {
        s.insert(s.end(), static_cast<size_t>(ph.duration), ph.state);
    }
    return s;
}

bool is_feasible(const PhaseSequence& seq, int delta) {
    for (const Phase& ph : seq.phases()) {
        if (ph.duration > delta) return false;
    }
    return true;
}

SequenceStats compute_stats(const PhaseSequence& seq, int delta) {
    if (!is_feasible(seq, delta)) {
        throw std::invalid_argument("compute_stats: infeasible sequence (duration > delta)");
    }
    SequenceStats st;
    st.n1d.assign(static_cast<size_t>(delta), 0);
    st.n2d.assign(static_cast<size_t>(delta), 0);
    for (const Phase& ph : seq.phases()) {
        if (ph.state == kState1) {
            ++st.n1d[static_cast<size_t>(ph.duration) - 1];
            ++st.n1;
            st.tau1 += ph.duration;
        } else {
            ++st.n2d[static_cast<size_t>(ph.duration) - 1];
            ++st.n2;
            st.tau2 += ph.duration;
        }
    }
    st.last_state = seq.last_state();
    st.last_duration = seq.last_duration();
    st.last_censored = seq.last_censored();
    return st;
}

TypeVector::TypeVector(std::vector<double> nu1, std::vector<double> nu2)
    : nu1_(std::move(nu1)), nu2_(std::move(nu2)) {
    if (nu1_.empty() || nu1_.size() != nu2_.size()) {
        throw std::invalid_argument("TypeVector: blocks must be nonempty and equal-sized");
    }
    for (size_t i = 0; i < nu1_.size(); ++i) {
        if (!(nu1_[i] >= 0.0) || !(nu2_[i] >= 0.0)) {
            throw std::invalid_argument("TypeVector: entries must be nonnegative");
        }
        double d = static_cast<double>(i + 1);
        mass1_ += nu1_[i];
        mass2_ += nu2_[i];
        theta1_ += d * nu1_[i];
        theta2_ += d * nu2_[i];
    }
}

bool TypeVector::in_type_set(double tol) const {
    return std::abs(mass1_ - mass2_) <= tol &&
           std::abs(theta1_ + theta2_ - 1.0) <= tol;
}

TypeVector sequence_type(const PhaseSequence& seq, int delta) {
    SequenceStats st = compute_stats(seq, delta);
    double t = static_cast<double>(seq.total_length());
    std::vector<double> nu1(st.n1d.size()), nu2(st.n2d.size());
    for (size_t i = 0; i < nu1.size(); ++i) {
        nu1[i] = static_cast<double>(st.n1d[i]) / t;
        nu2[i] = static_cast<double>(st.n2d[i]) / t;
    }
    return TypeVector(std::move(nu1), std::move(nu2));
}

}  // namespace rdsig
