#pragma once
// Estimation harness: survival curves with deterministic right-censoring,
// log-log tail fits, the normalized first-return statistic
// sqrt(A(n+k) - A(k))/a(k+1) * P_k(R > n) whose limit is sqrt(2/pi), the
// zero-count scaling E Z(n)/sqrt(n), and two-sample KS comparisons against
// the limit-process samplers.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "erw/coeffs.hpp"
#include "erw/exact.hpp"
#include "erw/walk.hpp"

namespace erw {

struct TailEstimate {
    std::vector<std::int64_t> n_grid;  // sorted
    std::vector<double> survival;      // non-increasing
    std::vector<double> se;            // binomial standard errors (0 for exact data)
    double censored_fraction = 0.0;
    std::int64_t cap = 0;
    // filled by fit_tail_exponent
    double fitted_slope = 0.0;
    double fitted_intercept = 0.0;
    double slope_se = 0.0;
    std::int64_t fit_min = 0, fit_max = 0;
};

struct ReturnTailStatistic {
    double p = 0.0;
    std::int64_t k = 0, n = 0;
    double value = 0.0;  // sqrt(A(n+k)-A(k))/a(k+1) * survival
    double se = 0.0;
};

struct KsReport {
    double statistic = 0.0;
    double critical = 0.0;  // asymptotic two-sample critical value
    double significance = 0.0;
    std::size_t n1 = 0, n2 = 0;
    bool pass = false;  // statistic <= max(critical, bias allowance)
};

// Empirical survival P(R > n) on a grid; censored samples count as beyond
// the cap, so every n_grid entry must satisfy n <= cap. All samples must
// share the same cap.
TailEstimate survival_curve(std::span<const ReturnSample> samples,
                            std::span<const std::int64_t> n_grid);

// Exact survival curve read off a killed DP table (se = 0).
TailEstimate tail_estimate_from_table(const ExactTable& table,
                                      std::span<const std::int64_t> n_grid);

// Weighted least squares of log survival against log n over
// [window_min, window_max]; weights are the propagated log-scale errors
// (unweighted when the curve is exact). Censored-informative points only
// (n < cap when the curve is empirical). Returns (slope, slope_se).
std::pair<double, double> fit_tail_exponent(TailEstimate& estimate,
                                            std::int64_t window_min,
                                            std::int64_t window_max);

ReturnTailStatistic return_tail_statistic(const CoeffSequence& coeffs,
                                           std::int64_t k, std::int64_t n,
                                           double survival_value, double se);

struct ZeroScaling {
    double mc_mean = 0.0;  // mean of Z(n)/sqrt(n)
    double mc_se = 0.0;
    std::optional<double> exact;  // sum_j P(S(j)=0)/sqrt(n) when affordable
};
ZeroScaling zeros_scaling_statistic(const MemoryParam& p, std::int64_t n,
                                    std::uint64_t replicates, std::uint64_t seed,
                                    unsigned threads = 0, bool with_exact = true);

KsReport two_sample_ks(std::vector<double> a, std::vector<double> b,
                       double significance, double bias_allowance = 0.0);

// Two-sample KS between Z(n)/sqrt(n) from walk simulation and H(1) from
// the limit sampler.
KsReport distributional_check_H(const MemoryParam& p, std::int64_t n,
                                std::uint64_t replicates, std::uint64_t seed,
                                double grid_step = 1e-3, unsigned threads = 0,
                                double significance = 1e-3,
                                double bias_allowance = 0.03);

// Marginal comparison of the rescaled return chain zeta(floor(n^2 t))/n^4
// against eta(t). (The index budget is ~n^2 t zeros, so n stays small;
// replicates that exhaust `horizon` steps are dropped and reported.)
struct ChainScalingEntry {
    double t = 0.0;
    KsReport ks;
    std::uint64_t used = 0;      // replicates that reached the index
    std::uint64_t truncated = 0; // replicates that exhausted the horizon
};
std::vector<ChainScalingEntry> return_chain_scaling(
    const MemoryParam& p, std::int64_t n, std::span<const double> t_grid,
    std::uint64_t replicates, std::int64_t horizon, std::uint64_t seed,
    double grid_step = 1e-3, unsigned threads = 0, double significance = 1e-3,
    double bias_allowance = 0.05);

}  // namespace erw
