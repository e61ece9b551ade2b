#pragma once

#include <functional>
#include <vector>

#include "rdsig/model.hpp"

namespace rdsig {

inline constexpr long long kEnumerationGuard = 10'000'000;

// Visits every feasible sequence of length t exactly once, in lexicographic
// order of phase durations. The number of such sequences equals the bounded
// composition count of t; throws GuardError when it exceeds kEnumerationGuard.
void enumerate_sequences(int delta, int t,
                         const std::function<void(const PhaseSequence&)>& visit);

std::vector<PhaseSequence> collect_sequences(int delta, int t);

}  // namespace rdsig
