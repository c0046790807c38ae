#include "erw/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "erw/errors.hpp"
#include "erw/parallel.hpp"

namespace erw {

namespace {

// Centre of the exit corridor relative to the current value, expressed as
// a fraction of the halfwidth: c/x = (1-2p) s / (k+n). Algebraically
// equivalent to (1-2p)/(k+n+2p-1) * m / a(k+n+1) but exact at the
// boundary |s| = k+n.
inline double centre_fraction(const MemoryParam& p, std::int64_t k,
                              std::int64_t n, double s) {
    if (k + n == 0) return 0.0;  // opening step: value 0, centred corridor
    return -p.two_p_minus_one() * s / static_cast<double>(k + n);
}

}  // namespace

ExitProblem exit_interval(const CoeffSequence& coeffs, std::int64_t k,
                          std::int64_t n, double m_value) {
    if (k < 0 || n < 0 || k + n < 1) {
        throw std::invalid_argument("exit_interval needs k + n >= 1");
    }
    const double a_cur = coeffs.a(static_cast<std::size_t>(k + n));
    double s = 0.0;
    if (a_cur == 0.0) {
        if (m_value != 0.0) {
            throw std::invalid_argument("martingale value must be 0 when a(k+n) = 0");
        }
    } else {
        s = m_value / a_cur;
        const double snapped = std::nearbyint(s);
        if (std::abs(s - snapped) > 1e-9 * std::max(1.0, std::abs(s))) {
            throw std::invalid_argument("martingale value " + std::to_string(m_value) +
                                        " is not on the lattice a(k+n) * Z");
        }
        s = snapped;
    }
    const double x = coeffs.a(static_cast<std::size_t>(k + n + 1));
    const double frac = centre_fraction(coeffs.param(), k, n, s);
    return ExitProblem{x, -frac * x};  // start offset y = -c
}

double embedded_up_probability(const CoeffSequence& coeffs, std::int64_t k,
                               std::int64_t n, std::int64_t s) {
    if (std::abs(s) > k + n) {
        throw std::invalid_argument("position |s| must not exceed the time k+n");
    }
    const double frac =
        centre_fraction(coeffs.param(), k, n, static_cast<double>(s));
    // P(exit at +x) = (x - c)/(2x) with corridor centre c = frac * x.
    return 0.5 * (1.0 - frac);
}

ExitSample sample_exit(const ExitProblem& problem, Philox& rng,
                       ExitMethod method, const GridTuning& tuning) {
    const double x = problem.halfwidth;
    const double y = problem.start_offset;
    if (!(x > 0.0)) throw std::invalid_argument("exit halfwidth must be positive");
    if (std::abs(y) > x) {
        throw std::invalid_argument("start offset lies outside the corridor");
    }

    if (method == ExitMethod::exact_side) {
        const double p_up = 0.5 * (1.0 + y / x);
        const int side = (rng.uniform01() < p_up) ? 1 : -1;
        // Exit time conditioned on the drawn side: rerun the grid sampler
        // until its side matches.
        for (int attempt = 0; attempt < 1'000'000; ++attempt) {
            const ExitSample s = sample_exit(problem, rng, ExitMethod::grid, tuning);
            if (s.side == side) return s;
        }
        throw ResourceError("exact-side exit sampling failed to match the drawn side");
    }

    if (std::abs(y) == x) return ExitSample{0.0, y > 0 ? 1 : -1};

    const double floor_step =
        (tuning.floor_fraction * x) * (tuning.floor_fraction * x) / tuning.divisor;
    double u = y;
    double t = 0.0;
    for (std::uint64_t it = 0; it < tuning.max_steps; ++it) {
        const double dist = x - std::abs(u);
        // The opening step keeps dt <= dist^2/divisor exactly; afterwards
        // the floor bounds the work near the barriers, where the bridge
        // probabilities below keep the exit law exact anyway.
        const double raw = dist * dist / tuning.divisor;
        const double dt = it == 0 ? raw : std::max(raw, floor_step);
        const double w = u + std::sqrt(dt) * rng.normal();
        if (w >= x) return ExitSample{t + dt, 1};
        if (w <= -x) return ExitSample{t + dt, -1};
        // Brownian bridge: P(sup over the step >= x | endpoints u, w) =
        // exp(-2 (x-u)(x-w)/dt), and likewise for the lower barrier.
        const double eu = 2.0 * (x - u) * (x - w) / dt;
        const double ed = 2.0 * (x + u) * (x + w) / dt;
        double q_up = eu < 40.0 ? std::exp(-eu) : 0.0;
        double q_dn = ed < 40.0 ? std::exp(-ed) : 0.0;
        if (q_up + q_dn > 0.0) {
            const double r = rng.uniform01();
            if (r < q_up) return ExitSample{t + 0.5 * dt, 1};
            if (r < q_up + q_dn) return ExitSample{t + 0.5 * dt, -1};
        }
        u = w;
        t += dt;
    }
    throw ResourceError("grid exit sampler exceeded its step budget");
}

EmbeddedPath sample_embedded_path(const CoeffSequence& coeffs, std::int64_t k,
                                  std::int64_t n_steps, Philox& rng,
                                  const GridTuning& tuning) {
    if (k < 0 || (k & 1)) throw std::invalid_argument("restart time k must be even");
    if (coeffs.param().value() == 0.0 && k < 2) {
        throw std::invalid_argument("embedding at p = 0 needs k >= 2 (a(1) = 0)");
    }
    coeffs.reserve(static_cast<std::size_t>(k + n_steps) + 2);

    EmbeddedPath path;
    path.start_time = k;
    path.walk.start_time = k;
    path.times.assign(1, 0.0);
    path.values.assign(1, 0.0);
    path.compensator.assign(1, 0.0);
    path.walk.positions.assign(1, 0);

    const MemoryParam& p = coeffs.param();
    std::int64_t s = 0;
    double t = 0.0;
    double v = 0.0;
    for (std::int64_t n = 0; n < n_steps; ++n) {
        const double x = coeffs.a(static_cast<std::size_t>(k + n + 1));
        const double frac = centre_fraction(p, k, n, static_cast<double>(s));
        const ExitSample exit =
            sample_exit(ExitProblem{x, -frac * x}, rng, ExitMethod::grid, tuning);

        const double m_cur = path.values.back();
        const double weight =
            k + n == 0 ? 0.0
                       : p.two_p_minus_one() /
                             (static_cast<double>(k + n) + p.two_p_minus_one());
        v += weight * weight * m_cur * m_cur;
        t += exit.time;
        s += exit.side;

        path.times.push_back(t);
        path.values.push_back(x * static_cast<double>(s));
        path.compensator.push_back(v);
        path.walk.positions.push_back(static_cast<std::int32_t>(s));
        if (s == 0) path.walk.zero_indices.push_back(n + 1);
    }
    return path;
}

CompensatorReport compensator_moment_check(const MemoryParam& p, std::int64_t k,
                                           std::int64_t n, std::uint64_t replicates,
                                           std::uint64_t seed, unsigned threads) {
    if (replicates < 1000) {
        throw std::invalid_argument("compensator_moment_check needs >= 1000 replicates");
    }
    if (n < 256) throw std::invalid_argument("compensator scan needs n >= 256");
    CoeffSequence coeffs(p, static_cast<std::size_t>(k + n) + 2);
    CompensatorReport report;
    for (std::int64_t g = 64; g <= n; g *= 2) report.n_grid.push_back(g);
    if (report.n_grid.empty() || report.n_grid.back() != n) report.n_grid.push_back(n);

    const auto grid = report.n_grid;
    const auto sums = map_replicates<std::vector<double>>(
        seed, replicates, threads, [&](std::uint64_t, Philox& rng) {
            std::vector<double> v_at(grid.size(), 0.0);
            std::int64_t s = 0;
            double v = 0.0;
            std::size_t gi = 0;
            for (std::int64_t m = 0; m < n; ++m) {
                const double mval =
                    coeffs.a(static_cast<std::size_t>(k + m)) * static_cast<double>(s);
                if (mval != 0.0) {
                    const double weight =
                        p.two_p_minus_one() /
                        (static_cast<double>(k + m) + p.two_p_minus_one());
                    v += weight * weight * mval * mval;
                }
                const double q = k + m == 0
                                     ? 0.5
                                     : 0.5 + 0.5 * p.two_p_minus_one() *
                                                 static_cast<double>(s) /
                                                 static_cast<double>(k + m);
                s += (rng.uniform01() < q) ? 1 : -1;
                while (gi < grid.size() && m + 1 == grid[gi]) {
                    // after the j = m term, v holds V(m+1) = sum_{j <= m}
                    v_at[gi] = v;
                    ++gi;
                }
            }
            return v_at;
        });

    report.mean_v.assign(grid.size(), 0.0);
    for (const auto& v : sums) {
        for (std::size_t i = 0; i < grid.size(); ++i) report.mean_v[i] += v[i];
    }
    for (auto& m : report.mean_v) m /= static_cast<double>(replicates);

    const bool all_zero =
        std::all_of(report.mean_v.begin(), report.mean_v.end(),
                    [](double v) { return v == 0.0; });
    if (all_zero) {
        report.fitted_slope = 0.0;
        report.growth_ratio = 1.0;
    } else {
        // Unweighted log-log least squares.
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const auto count = static_cast<double>(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double lx = std::log(static_cast<double>(grid[i]));
            const double ly = std::log(report.mean_v[i]);
            sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        }
        report.fitted_slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
        const std::size_t mid = grid.size() / 2;
        report.growth_ratio = report.mean_v.back() / report.mean_v[mid];
    }

    if (p.value() < 0.5) {
        report.bound = (2.0 - 4.0 * p.value()) + 0.1;
        report.pass = report.fitted_slope <= report.bound;
    } else {
        report.bound = 0.05;
        report.pass = report.fitted_slope <= report.bound;
    }
    return report;
}

double concentration_check(const CoeffSequence& coeffs, std::int64_t k,
                           std::int64_t n, double eps, std::uint64_t replicates,
                           std::uint64_t seed, unsigned threads,
                           const GridTuning& tuning) {
    if (replicates < 1000) {
        throw std::invalid_argument("concentration_check needs >= 1000 replicates");
    }
    coeffs.reserve(static_cast<std::size_t>(k + n) + 2);
    const double threshold =
        eps * std::pow(static_cast<double>(k + n),
                       coeffs.param().three_minus_four_p());
    const double a_k = coeffs.A(static_cast<std::size_t>(k));
    const auto hits = map_replicates<char>(
        seed, replicates, threads, [&](std::uint64_t, Philox& rng) -> char {
            const EmbeddedPath path = sample_embedded_path(coeffs, k, n, rng, tuning);
            for (std::int64_t l = 1; l <= n; ++l) {
                const double target =
                    coeffs.A(static_cast<std::size_t>(k + l)) - a_k;
                if (std::abs(path.times[static_cast<std::size_t>(l)] - target) >=
                    threshold) {
                    return 1;
                }
            }
            return 0;
        });
    double freq = 0.0;
    for (const char h : hits) freq += h;
    return freq / static_cast<double>(replicates);
}

}  // namespace erw
