#pragma once
// Skorokhod-type embedding of the rescaled walk martingale M_k(n) =
// a(k+n) S(k+n) into a Brownian path. Each step is a first-exit problem:
// started from B(T_{k,n}), the motion runs until its increment equals
//
//   (1-2p)/(k+n+2p-1) * B(T_{k,n})  +/-  a(k+n+1),
//
// i.e. a corridor of halfwidth a(k+n+1) centred at the drift-compensation
// point. The exit side reproduces the walk's step law exactly (gambler's
// ruin), and the exit times accumulate to the embedded clock T_{k,n} with
// compensator V_k(n) = sum_j ((2p-1)/(k+j+2p-1))^2 M_k(j)^2, so that
// T_{k,n} + V_k(n) - (A(k+n) - A(k)) is a martingale.

#include <cstdint>
#include <vector>

#include "erw/coeffs.hpp"
#include "erw/rng.hpp"
#include "erw/walk.hpp"

namespace erw {

// First exit of B(t) + y from (-x, x); |y| <= x, with |y| = x degenerate
// (immediate exit on the touching side).
struct ExitProblem {
    double halfwidth = 1.0;    // x > 0
    double start_offset = 0.0; // y
};

// Exit corridor for embedding step n of the walk restarted at k, given the
// current martingale value m_value = a(k+n) * S(k+n). m_value must sit on
// the lattice a(k+n) * Z.
ExitProblem exit_interval(const CoeffSequence& coeffs, std::int64_t k,
                          std::int64_t n, double m_value);

// Probability that the exit happens on the upper side, (x - c)/(2x) with c
// the corridor centre. Identical (to rounding) with
// step_probability(p, k+n, s); the identity is the consistency proof that
// the embedding reproduces the walk.
double embedded_up_probability(const CoeffSequence& coeffs, std::int64_t k,
                               std::int64_t n, std::int64_t s);

enum class ExitMethod { grid, exact_side };

// Tuning of the grid sampler. The time step is dist^2/divisor, where dist
// is the current distance to the nearest barrier, floored at
// (floor_fraction * x)^2 / divisor. Crossings inside a step are resolved
// with the exact Brownian-bridge barrier-crossing probability, so the
// floor does not bias exit sides and leaves an O(step) error in times.
// (An exact-in-law tau(x, y) sampler via theta-series inversion would
// remove the grid entirely; a possible extension, not needed at the
// tolerances checked here.)
struct GridTuning {
    double divisor = 400.0;
    double floor_fraction = 0.05;
    std::uint64_t max_steps = 200'000'000;
};

struct ExitSample {
    double time = 0.0;
    int side = 0;  // +1 upper, -1 lower
};

ExitSample sample_exit(const ExitProblem& problem, Philox& rng,
                       ExitMethod method = ExitMethod::grid,
                       const GridTuning& tuning = {});

// Joint embedded path: martingale values, exit clock, compensator, and the
// coupled walk (driven by the exit sides, so values[n] = a(k+n) S(k+n)
// holds exactly, not just in law).
struct EmbeddedPath {
    std::int64_t start_time = 0;
    std::vector<double> times;        // T[0] = 0 <= T[1] <= ...
    std::vector<double> values;       // M[n]
    std::vector<double> compensator;  // V[n]
    WalkPath walk;
};

EmbeddedPath sample_embedded_path(const CoeffSequence& coeffs, std::int64_t k,
                                  std::int64_t n_steps, Philox& rng,
                                  const GridTuning& tuning = {});

// Monte Carlo scan of E V_k(n) over a dyadic n-grid with a log-log slope
// fit. V_k is a function of the martingale values alone, so the scan runs
// on walk paths. For p < 1/2 the growth exponent should stay below
// (2-4p) + 0.1; for p >= 1/2 the sequence should be bounded.
struct CompensatorReport {
    std::vector<std::int64_t> n_grid;
    std::vector<double> mean_v;
    double fitted_slope = 0.0;
    double bound = 0.0;      // slope bound that applies at this p
    double growth_ratio = 0.0;  // mean_v.back() / mean_v at the mid grid point
    bool pass = false;
};
CompensatorReport compensator_moment_check(const MemoryParam& p, std::int64_t k,
                                           std::int64_t n, std::uint64_t replicates,
                                           std::uint64_t seed, unsigned threads = 0);

// Empirical frequency of sup_{l<=n} |T_{k,l} - (A(k+l) - A(k))| >=
// eps * (k+n)^{3-4p}.
double concentration_check(const CoeffSequence& coeffs, std::int64_t k,
                           std::int64_t n, double eps, std::uint64_t replicates,
                           std::uint64_t seed, unsigned threads = 0,
                           const GridTuning& tuning = {});

}  // namespace erw
