#pragma once
// Simulation of the elephant random walk, under the unconditioned law and
// under the restart-at-zero laws P_k (k even): the walk is at 0 at time k
// and evolves with step law
//
//   P(next step = +1 | time n, position s) = 1/2 + (2p-1) s / (2n).
//
// Two samplers are provided. Marginal mode draws each step from the law
// above and keeps O(1) state. Memory mode replays the defining dynamics:
// the next step repeats a uniformly recalled past step with probability p
// and reverses it otherwise. Both sample identical path distributions.

#include <cstdint>
#include <vector>

#include "erw/coeffs.hpp"
#include "erw/rng.hpp"

namespace erw {

struct WalkState {
    std::int64_t time = 0;      // absolute time n
    std::int64_t position = 0;  // S(n)
};

struct WalkPath {
    std::int64_t start_time = 0;             // even k; positions[m] = S(k+m)
    std::vector<std::int32_t> positions;     // positions[0] = 0
    std::vector<std::int64_t> zero_indices;  // m >= 1 with positions[m] == 0
};

struct ReturnSample {
    std::int64_t value = 0;  // first-return time (steps after the start), even
    std::int64_t cap = 0;
    bool censored = false;   // no zero within cap steps
};

enum class SimMode { marginal, memory };

// Probability that the step taken at time n >= 1 from position s is +1.
// Requires |s| <= n; outside that range the formula leaves [0, 1].
double step_probability(const MemoryParam& p, std::int64_t n, std::int64_t s);

// Walk of `steps` steps under P_k (k = 0 gives the unconditioned walk with
// a fair first step). Memory mode retains the step history and is only
// defined from k = 0; use marginal mode for restarted walks.
WalkPath simulate_path(const MemoryParam& p, std::int64_t start_time,
                       std::int64_t steps, Philox& rng,
                       SimMode mode = SimMode::marginal);

// Number of indices 1 <= m <= horizon with positions[m] == 0.
std::int64_t count_zeros(const WalkPath& path, std::int64_t horizon);

// First-return time under P_k, right-censored at `cap` steps (cap >= 2).
ReturnSample first_return(const MemoryParam& p, std::int64_t start_time,
                          std::int64_t cap, Philox& rng);

// Absolute times of the zeros, with the start time prepended:
// zeta(0) = k < zeta(1) < ... Consistent with count_zeros through
// Z(n) < j  <=>  zeta(j) > n.
std::vector<std::int64_t> zeros_enumeration(const WalkPath& path);

// Streaming variants that avoid storing a path.
std::int64_t simulate_zero_count(const MemoryParam& p, std::int64_t start_time,
                                 std::int64_t steps, Philox& rng);

// Zero times (relative to the start) until `target` zeros have been seen or
// `horizon` steps elapsed; `complete` reports whether target was reached.
struct ZeroTimes {
    std::vector<std::int64_t> times;  // m with S(k+m) = 0, increasing
    bool complete = false;
};
ZeroTimes simulate_zeros_until(const MemoryParam& p, std::int64_t start_time,
                               std::int64_t target, std::int64_t horizon,
                               Philox& rng);

}  // namespace erw
