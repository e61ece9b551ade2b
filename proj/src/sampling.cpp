#include "rdsig/sampling.hpp"

#include <stdexcept>

namespace rdsig {

PhaseSequence sample_phase_sequence(const ModelParams& params, int t, Rng& rng) {
    if (t < 1) {
        throw std::invalid_argument("sample_phase_sequence: t must be >= 1");
    }
    std::vector<Phase> phases;
    int covered = 0;
    int state = kState1;
    while (covered < t) {
        int d = params.pmf(state).sample(rng);
        if (covered + d >= t) {
            d = t - covered;  // truncate the ongoing phase at the horizon
        }
        phases.push_back(Phase{state, d});
        covered += d;
        state = state == kState1 ? kState2 : kState1;
    }
    return PhaseSequence(std::move(phases), /*last_censored=*/true);
}

Observations sample_observations(const ModelParams& params, Hypothesis hyp,
                                 int t, Rng& rng) {
    if (t < 1) {
        throw std::invalid_argument("sample_observations: t must be >= 1");
    }
    Observations obs;
    obs.x.resize(static_cast<size_t>(t));
    if (hyp == Hypothesis::h0) {
        for (double& xi : obs.x) {
            xi = rng.gaussian(params.mu0(), params.sigma());
        }
    } else {
        PhaseSequence seq = sample_phase_sequence(params, t, rng);
        size_t k = 0;
        for (const Phase& ph : seq.phases()) {
            double level = params.mu0() + params.mu(ph.state);
            for (int i = 0; i < ph.duration; ++i) {
                obs.x[k++] = rng.gaussian(level, params.sigma());
            }
        }
        obs.truth = std::move(seq);
    }
    return obs;
}

}  // namespace rdsig
