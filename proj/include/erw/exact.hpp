#pragma once
// Exact dynamic-programming oracle for the time-inhomogeneous chain
// (n, S(n)). Forward propagation of the step law gives machine-precision
// state occupancies; the killed variant removes all mass entering 0 and
// yields exact first-return survival curves P_k(R > m).

#include <cstdint>
#include <vector>

#include "erw/coeffs.hpp"

namespace erw {

class ExactTable {
public:
    // Occupancy probability of state (start_time + m, s); zero when (m, s)
    // is unreachable. Requires retained rows (see rows_kept()).
    double mass(std::int64_t m, std::int64_t s) const;

    const MemoryParam& param() const noexcept { return p_; }
    std::int64_t start_time() const noexcept { return start_time_; }
    std::int64_t horizon() const noexcept { return horizon_; }
    bool killed() const noexcept { return killed_; }
    bool rows_kept() const noexcept { return !rows_.empty(); }

    // Killed table: survival[m] = P_k(R > m), non-increasing, survival[0] = 1.
    const std::vector<double>& survival() const;

    // Unkilled table: zero_mass[m] = P_k(S(k+m) = 0).
    const std::vector<double>& zero_mass() const;

    // Unkilled: exact E Z(n) = sum_{j<=n} zero_mass[j].
    double expected_zeros(std::int64_t n) const;

    // Killed: exact E[R ^ N] = sum_{m<N} survival[m].
    double expected_return_capped() const;

    // Row m as a dense vector over s = -m, -m+2, ..., m.
    const std::vector<double>& row(std::int64_t m) const;

private:
    friend ExactTable exact_table(const MemoryParam&, std::int64_t,
                                  std::int64_t, bool, int);
    explicit ExactTable(MemoryParam p) : p_(p) {}
    MemoryParam p_;
    std::int64_t start_time_ = 0;
    std::int64_t horizon_ = 0;
    bool killed_ = false;
    std::vector<std::vector<double>> rows_;   // retained occupancy rows
    std::vector<double> survival_;            // killed only
    std::vector<double> zero_mass_;           // unkilled only
    std::vector<double> expected_zeros_;      // unkilled prefix sums
    double expected_return_capped_ = 0.0;
};

// Build the table over m = 0..horizon under P_k. keep_rows: 1 = keep the
// full triangular array, 0 = keep only the derived curves, -1 = keep rows
// automatically when the horizon is small enough to afford them. Horizons
// beyond 2^14 are refused (O(N^2) work/memory).
ExactTable exact_table(const MemoryParam& p, std::int64_t start_time,
                       std::int64_t horizon, bool killed_at_zero,
                       int keep_rows = -1);

}  // namespace erw
