#include "rdsig/enumeration.hpp"

#include <sstream>

#include "rdsig/combinatorics.hpp"
#include "rdsig/errors.hpp"

namespace rdsig {

namespace {

void recurse(int delta, int remaining, int state, std::vector<Phase>& prefix,
             const std::function<void(const PhaseSequence&)>& visit) {
    if (remaining == 0) {
        visit(PhaseSequence(prefix, /*last_censored=*/true));
        return;
    }
    int d_max = std::min(delta, remaining);
    for (int d = 1; d <= d_max; ++d) {
        prefix.push_back(Phase{state, d});
        recurse(delta, remaining - d, state == kState1 ? kState2 : kState1,
                prefix, visit);
        prefix.pop_back();
    }
}

}  // namespace

void enumerate_sequences(int delta, int t,
                         const std::function<void(const PhaseSequence&)>& visit) {
    if (delta < 1 || t < 1) {
        throw std::invalid_argument("enumerate_sequences: need delta >= 1 and t >= 1");
    }
    BigInt total = count_sequences(delta, t);
    if (total > kEnumerationGuard) {
        std::ostringstream os;
        os << "enumerate_sequences: C_t = " << total << " exceeds the guard of "
           << kEnumerationGuard << " (delta=" << delta << ", t=" << t << ")";
        throw GuardError(os.str());
    }
    std::vector<Phase> prefix;
    prefix.reserve(static_cast<size_t>(t));
    recurse(delta, t, kState1, prefix, visit);
}

std::vector<PhaseSequence> collect_sequences(int delta, int t) {
    std::vector<PhaseSequence> out;
    enumerate_sequences(delta, t,
                        [&out](const PhaseSequence& s) { out.push_back(s); });
    return out;
}

}  // namespace rdsig
