#include "erw/exact.hpp"

#include <stdexcept>
#include <string>
#include <utility>

#include "erw/errors.hpp"

namespace erw {

namespace {
constexpr std::int64_t kMaxHorizon = 1 << 14;
constexpr std::int64_t kAutoRowLimit = 4096;
}  // namespace

double ExactTable::mass(std::int64_t m, std::int64_t s) const {
    if (m < 0 || m > horizon_) throw std::invalid_argument("row index out of range");
    if (!rows_kept()) throw std::invalid_argument("occupancy rows were not retained");
    if (s < -m || s > m || ((s + m) & 1)) return 0.0;
    return rows_[static_cast<std::size_t>(m)][static_cast<std::size_t>((s + m) / 2)];
}

const std::vector<double>& ExactTable::survival() const {
    if (!killed_) throw std::invalid_argument("survival requires a killed table");
    return survival_;
}

const std::vector<double>& ExactTable::zero_mass() const {
    if (killed_) throw std::invalid_argument("zero_mass requires an unkilled table");
    return zero_mass_;
}

double ExactTable::expected_zeros(std::int64_t n) const {
    if (killed_) throw std::invalid_argument("expected_zeros requires an unkilled table");
    if (n < 0 || n > horizon_) throw std::invalid_argument("horizon out of range");
    return expected_zeros_[static_cast<std::size_t>(n)];
}

double ExactTable::expected_return_capped() const {
    if (!killed_) throw std::invalid_argument("expected_return_capped requires a killed table");
    return expected_return_capped_;
}

const std::vector<double>& ExactTable::row(std::int64_t m) const {
    if (!rows_kept()) throw std::invalid_argument("occupancy rows were not retained");
    if (m < 0 || m > horizon_) throw std::invalid_argument("row index out of range");
    return rows_[static_cast<std::size_t>(m)];
}

ExactTable exact_table(const MemoryParam& p, std::int64_t start_time,
                       std::int64_t horizon, bool killed_at_zero, int keep_rows) {
    if (start_time < 0 || (start_time & 1)) {
        throw std::invalid_argument("start time must be even and >= 0");
    }
    if (horizon < 0) throw std::invalid_argument("horizon must be >= 0");
    if (horizon > kMaxHorizon) {
        throw ResourceError("exact table horizon " + std::to_string(horizon) +
                            " exceeds the O(N^2) budget (max " +
                            std::to_string(kMaxHorizon) + ")");
    }
    const bool retain = keep_rows == 1 || (keep_rows < 0 && horizon <= kAutoRowLimit);

    ExactTable t(p);
    t.start_time_ = start_time;
    t.horizon_ = horizon;
    t.killed_ = killed_at_zero;

    std::vector<double> cur{1.0};
    std::vector<double> nxt;
    if (retain) t.rows_.push_back(cur);
    if (killed_at_zero) {
        t.survival_.assign(static_cast<std::size_t>(horizon) + 1, 1.0);
        t.expected_return_capped_ = 0.0;
    } else {
        t.zero_mass_.assign(static_cast<std::size_t>(horizon) + 1, 0.0);
        t.zero_mass_[0] = 1.0;
        t.expected_zeros_.assign(static_cast<std::size_t>(horizon) + 1, 0.0);
    }

    const double half_drift = 0.5 * p.two_p_minus_one();
    for (std::int64_t m = 0; m < horizon; ++m) {
        const std::int64_t t_abs = start_time + m;
        nxt.assign(static_cast<std::size_t>(m) + 2, 0.0);
        for (std::int64_t i = 0; i <= m; ++i) {
            const double v = cur[static_cast<std::size_t>(i)];
            if (v == 0.0) continue;
            const std::int64_t s = 2 * i - m;
            const double q =
                t_abs == 0 ? 0.5
                           : 0.5 + half_drift * static_cast<double>(s) /
                                       static_cast<double>(t_abs);
            nxt[static_cast<std::size_t>(i) + 1] += v * q;
            nxt[static_cast<std::size_t>(i)] += v * (1.0 - q);
        }

        const std::int64_t mn = m + 1;
        if ((mn & 1) == 0) {  // position 0 is reachable at even offsets only
            double& center = nxt[static_cast<std::size_t>(mn / 2)];
            if (killed_at_zero) {
                t.survival_[static_cast<std::size_t>(mn)] =
                    t.survival_[static_cast<std::size_t>(mn - 1)] - center;
                center = 0.0;
            } else {
                t.zero_mass_[static_cast<std::size_t>(mn)] = center;
            }
        } else if (killed_at_zero) {
            t.survival_[static_cast<std::size_t>(mn)] =
                t.survival_[static_cast<std::size_t>(mn - 1)];
        }
        cur = std::move(nxt);
        if (retain) t.rows_.push_back(cur);
    }

    if (killed_at_zero) {
        double acc = 0.0;
        for (std::int64_t m = 0; m < horizon; ++m) {
            acc += t.survival_[static_cast<std::size_t>(m)];
        }
        t.expected_return_capped_ = acc;
    } else {
        double acc = 0.0;
        for (std::int64_t m = 1; m <= horizon; ++m) {
            acc += t.zero_mass_[static_cast<std::size_t>(m)];
            t.expected_zeros_[static_cast<std::size_t>(m)] = acc;
        }
    }
    return t;
}

}  // namespace erw
