#include "erw/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "erw/limits.hpp"
#include "erw/parallel.hpp"

namespace erw {

namespace {

void require_sorted_grid(std::span<const std::int64_t> grid) {
    if (grid.empty()) throw std::invalid_argument("empty n grid");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (grid[i] <= grid[i - 1]) {
            throw std::invalid_argument("n grid must be strictly increasing");
        }
    }
}

}  // namespace

TailEstimate survival_curve(std::span<const ReturnSample> samples,
                            std::span<const std::int64_t> n_grid) {
    if (samples.empty()) throw std::invalid_argument("empty sample set");
    require_sorted_grid(n_grid);
    const std::int64_t cap = samples.front().cap;
    for (const auto& s : samples) {
        if (s.cap != cap) throw std::invalid_argument("samples mix censoring caps");
    }
    if (n_grid.back() > cap) {
        throw std::invalid_argument("survival grid extends beyond the censoring cap");
    }

    TailEstimate est;
    est.cap = cap;
    est.n_grid.assign(n_grid.begin(), n_grid.end());
    const auto count = static_cast<double>(samples.size());

    std::uint64_t censored = 0;
    std::vector<std::int64_t> values;
    values.reserve(samples.size());
    for (const auto& s : samples) {
        censored += s.censored;
        values.push_back(s.censored ? cap + 1 : s.value);
    }
    std::sort(values.begin(), values.end());
    est.censored_fraction = static_cast<double>(censored) / count;

    est.survival.reserve(n_grid.size());
    est.se.reserve(n_grid.size());
    for (const std::int64_t n : n_grid) {
        const auto beyond = values.end() -
                            std::upper_bound(values.begin(), values.end(), n);
        const double s = static_cast<double>(beyond) / count;
        est.survival.push_back(s);
        est.se.push_back(std::sqrt(s * (1.0 - s) / count));
    }
    return est;
}

TailEstimate tail_estimate_from_table(const ExactTable& table,
                                      std::span<const std::int64_t> n_grid) {
    require_sorted_grid(n_grid);
    if (n_grid.back() > table.horizon()) {
        throw std::invalid_argument("survival grid extends beyond the table horizon");
    }
    TailEstimate est;
    est.cap = table.horizon();
    est.n_grid.assign(n_grid.begin(), n_grid.end());
    for (const std::int64_t n : n_grid) {
        est.survival.push_back(table.survival()[static_cast<std::size_t>(n)]);
        est.se.push_back(0.0);
    }
    est.censored_fraction = table.survival().back();
    return est;
}

std::pair<double, double> fit_tail_exponent(TailEstimate& estimate,
                                            std::int64_t window_min,
                                            std::int64_t window_max) {
    const bool exact = std::all_of(estimate.se.begin(), estimate.se.end(),
                                   [](double s) { return s == 0.0; });
    std::vector<double> lx, ly, w;
    for (std::size_t i = 0; i < estimate.n_grid.size(); ++i) {
        const std::int64_t n = estimate.n_grid[i];
        if (n < window_min || n > window_max) continue;
        if (!exact && n >= estimate.cap) continue;  // censored-informative only
        const double s = estimate.survival[i];
        if (s <= 0.0) continue;
        lx.push_back(std::log(static_cast<double>(n)));
        ly.push_back(std::log(s));
        // se on the log scale; exact curves get unit weights
        const double lse = exact ? 1.0 : std::max(estimate.se[i] / s, 1e-12);
        w.push_back(1.0 / (lse * lse));
    }
    if (lx.size() < 4) {
        throw std::invalid_argument("tail fit needs >= 4 usable grid points");
    }

    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sw += w[i];
        swx += w[i] * lx[i];
        swy += w[i] * ly[i];
        swxx += w[i] * lx[i] * lx[i];
        swxy += w[i] * lx[i] * ly[i];
    }
    const double det = sw * swxx - swx * swx;
    const double slope = (sw * swxy - swx * swy) / det;
    const double intercept = (swxx * swy - swx * swxy) / det;
    const double slope_se = exact ? 0.0 : std::sqrt(sw / det);

    estimate.fitted_slope = slope;
    estimate.fitted_intercept = intercept;
    estimate.slope_se = slope_se;
    estimate.fit_min = window_min;
    estimate.fit_max = window_max;
    return {slope, slope_se};
}

ReturnTailStatistic return_tail_statistic(const CoeffSequence& coeffs,
                                           std::int64_t k, std::int64_t n,
                                           double survival_value, double se) {
    if (n < 2) throw std::invalid_argument("return_tail_statistic needs n >= 2");
    if (k < 0 || (k & 1)) throw std::invalid_argument("k must be even and >= 0");
    if (coeffs.param().value() == 0.0 && k < 2) {
        throw std::invalid_argument("p = 0 needs k >= 2 (a(1) = 0)");
    }
    const double factor =
        std::sqrt(coeffs.A(static_cast<std::size_t>(n + k)) -
                  coeffs.A(static_cast<std::size_t>(k))) /
        coeffs.a(static_cast<std::size_t>(k) + 1);
    ReturnTailStatistic stat;
    stat.p = coeffs.param().value();
    stat.k = k;
    stat.n = n;
    stat.value = factor * survival_value;
    stat.se = factor * se;
    return stat;
}

ZeroScaling zeros_scaling_statistic(const MemoryParam& p, std::int64_t n,
                                    std::uint64_t replicates, std::uint64_t seed,
                                    unsigned threads, bool with_exact) {
    if (replicates < 1000) {
        throw std::invalid_argument("zeros_scaling_statistic needs >= 1000 replicates");
    }
    const double root_n = std::sqrt(static_cast<double>(n));
    const auto zs = map_replicates<double>(
        seed, replicates, threads, [&](std::uint64_t, Philox& rng) {
            return static_cast<double>(simulate_zero_count(p, 0, n, rng)) / root_n;
        });
    ZeroScaling out;
    double sum = 0, sum2 = 0;
    for (const double z : zs) {
        sum += z;
        sum2 += z * z;
    }
    const auto count = static_cast<double>(replicates);
    out.mc_mean = sum / count;
    out.mc_se = std::sqrt(std::max(0.0, sum2 / count - out.mc_mean * out.mc_mean) /
                          count);
    if (with_exact && n <= (1 << 14)) {
        const ExactTable table = exact_table(p, 0, n, false, 0);
        out.exact = table.expected_zeros(n) / root_n;
    }
    return out;
}

KsReport two_sample_ks(std::vector<double> a, std::vector<double> b,
                       double significance, double bias_allowance) {
    if (a.empty() || b.empty()) throw std::invalid_argument("empty KS sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());

    double d = 0.0, fa = 0.0, fb = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        fa = static_cast<double>(i) / na;
        fb = static_cast<double>(j) / nb;
        d = std::max(d, std::abs(fa - fb));
    }

    KsReport report;
    report.statistic = d;
    report.significance = significance;
    report.n1 = a.size();
    report.n2 = b.size();
    const double c = std::sqrt(-0.5 * std::log(significance / 2.0));
    report.critical = c * std::sqrt((na + nb) / (na * nb));
    report.pass = d <= std::max(report.critical, bias_allowance);
    return report;
}

KsReport distributional_check_H(const MemoryParam& p, std::int64_t n,
                                std::uint64_t replicates, std::uint64_t seed,
                                double grid_step, unsigned threads,
                                double significance, double bias_allowance) {
    if (replicates < 10'000) {
        throw std::invalid_argument("distributional_check_H needs >= 10^4 replicates");
    }
    const double root_n = std::sqrt(static_cast<double>(n));
    auto walk_side = map_replicates<double>(
        seed, replicates, threads, [&](std::uint64_t, Philox& rng) {
            return static_cast<double>(simulate_zero_count(p, 0, n, rng)) / root_n;
        });
    auto limit_side = map_replicates<double>(
        seed, replicates, threads, [&](std::uint64_t r, Philox&) {
            Philox rng(seed, (1ull << 48) + r);
            return sample_H(p, 1.0, grid_step, rng).h_value;
        });
    return two_sample_ks(std::move(walk_side), std::move(limit_side), significance,
                         bias_allowance);
}

std::vector<ChainScalingEntry> return_chain_scaling(
    const MemoryParam& p, std::int64_t n, std::span<const double> t_grid,
    std::uint64_t replicates, std::int64_t horizon, std::uint64_t seed,
    double grid_step, unsigned threads, double significance,
    double bias_allowance) {
    if (n < 2 || n > 64) {
        throw std::invalid_argument("return_chain_scaling is a desk-scale check, n in [2, 64]");
    }
    std::vector<double> ts(t_grid.begin(), t_grid.end());
    std::sort(ts.begin(), ts.end());
    if (ts.empty() || ts.front() < 0.0) {
        throw std::invalid_argument("invalid t grid");
    }

    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    std::vector<std::int64_t> targets;
    targets.reserve(ts.size());
    for (const double t : ts) {
        targets.push_back(static_cast<std::int64_t>(std::floor(n2 * t)));
    }
    const std::int64_t max_target = *std::max_element(targets.begin(), targets.end());

    // zeta(floor(n^2 t)) per replicate; -1 marks a truncated path.
    const auto zeta_rows = map_replicates<std::vector<std::int64_t>>(
        seed, replicates, threads, [&](std::uint64_t, Philox& rng) {
            const ZeroTimes zt =
                simulate_zeros_until(p, 0, max_target, horizon, rng);
            std::vector<std::int64_t> row(targets.size(), -1);
            for (std::size_t i = 0; i < targets.size(); ++i) {
                const std::int64_t j = targets[i];
                if (j == 0) {
                    row[i] = 0;  // zeta(0) = start time 0
                } else if (static_cast<std::int64_t>(zt.times.size()) >= j) {
                    row[i] = zt.times[static_cast<std::size_t>(j) - 1];
                }
            }
            return row;
        });

    // Heavy-tailed return times leave some replicates short of the target
    // index within the horizon; both sides are censored at the common cap
    // horizon/n^4, so the comparison stays exact below the cap.
    const double norm = n2 * n2;  // zeta(floor(n^2 t)) / n^4 -> eta(t)
    const double cap = static_cast<double>(horizon) / norm;
    std::vector<ChainScalingEntry> out;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        ChainScalingEntry entry;
        entry.t = ts[i];
        std::vector<double> chain;
        chain.reserve(replicates);
        for (const auto& row : zeta_rows) {
            if (row[i] >= 0) {
                chain.push_back(static_cast<double>(row[i]) / norm);
            } else {
                chain.push_back(cap);
                ++entry.truncated;
            }
        }
        entry.used = chain.size() - entry.truncated;
        if (entry.t == 0.0) {
            // zeta(0)/n^4 = 0 exactly; nothing to compare.
            entry.ks.pass = true;
            out.push_back(entry);
            continue;
        }
        auto eta_draws = map_replicates<double>(
            seed, chain.size(), threads, [&](std::uint64_t r, Philox&) {
                Philox rng(seed, ((2ull + i) << 48) + r);
                return std::min(cap, sample_eta(p, ts[i], grid_step, rng));
            });
        entry.ks = two_sample_ks(std::move(chain), std::move(eta_draws),
                                 significance, bias_allowance);
        out.push_back(entry);
    }
    return out;
}

}  // namespace erw
