#pragma once

#include <optional>
#include <vector>

#include "rdsig/model.hpp"
#include "rdsig/rng.hpp"

namespace rdsig {

enum class Hypothesis { h0, h1 };

// Draws alternating phases starting in state 1, each duration i.i.d. from the
// state's pmf, until the horizon t is covered; the final phase is truncated to
// end exactly at t and flagged censored.
PhaseSequence sample_phase_sequence(const ModelParams& params, int t, Rng& rng);

struct Observations {
    std::vector<double> x;
    std::optional<PhaseSequence> truth;  // present under h1 only
};

// Under h0: x_k ~ N(mu0, sigma^2) i.i.d. Under h1: a phase sequence is drawn
// first, then x_k ~ N(mu0 + mu_{s_k}, sigma^2) independently given the path.
Observations sample_observations(const ModelParams& params, Hypothesis hyp,
                                 int t, Rng& rng);

}  // namespace rdsig
