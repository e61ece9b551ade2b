#pragma once

#include "rdsig/model.hpp"

namespace rdsig {

// log P(S^t = s^t): product of the completed phases' pmf values times the
// tail sum P(D >= d) for the possibly ongoing final phase. Returns -inf when
// the sequence has probability zero. Throws on structurally infeasible input.
double log_sequence_probability(const ModelParams& params,
                                const PhaseSequence& seq);

double sequence_probability(const ModelParams& params, const PhaseSequence& seq);

// The plain pmf product, i.e. the probability with the final phase treated as
// exactly completed. Satisfies prime <= P <= prime / p_min.
double log_sequence_probability_prime(const ModelParams& params,
                                      const PhaseSequence& seq);

double sequence_probability_prime(const ModelParams& params,
                                  const PhaseSequence& seq);

}  // namespace rdsig
