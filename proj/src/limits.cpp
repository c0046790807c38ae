#include "erw/limits.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "erw/errors.hpp"
#include "erw/quadrature.hpp"

namespace erw {

namespace {

constexpr double kPi = 3.14159265358979323846;

double nonzero_normal(Philox& rng) {
    double z;
    do {
        z = rng.normal();
    } while (z == 0.0);
    return z;
}

// Cell weights of the power rule. Cell [u_i, u_{i+1}] enters the integral
// of lambda^gamma d u as
//
//   lambda(u_{i+1})^gamma * (u_{i+1}^{1+2g} - u_i^{1+2g}) / ((1+2g) u_{i+1}^{2g})
//
// which is exactly unbiased cell by cell, because the stable-1/2 scaling
// gives E lambda(u)^gamma = const * u^{2 gamma}. A flat Riemann rule (or a
// linearly interpolated first cell) carries an O(du^{1+2gamma}) error from
// the u^{2 gamma} singularity at zero, which is far above Monte Carlo
// resolution for gamma < 0.
class CellWeights {
public:
    void reset(double gamma, double du) {
        if (gamma == gamma_ && du == du_) return;
        gamma_ = gamma;
        du_ = du;
        factors_.clear();
    }

    double weight(std::size_t i) {
        while (factors_.size() <= i) {
            const std::size_t j = factors_.size();
            const double e = 1.0 + 2.0 * gamma_;
            const double hi = std::pow(static_cast<double>(j + 1), e);
            const double lo = j == 0 ? 0.0 : std::pow(static_cast<double>(j), e);
            factors_.push_back((hi - lo) /
                               (e * std::pow(static_cast<double>(j + 1), 2.0 * gamma_)));
        }
        return du_ * factors_[i];
    }

private:
    double gamma_ = 2.0;  // sentinel outside the admissible range
    double du_ = 0.0;
    std::vector<double> factors_;
};

thread_local CellWeights tl_weights;

double gamma_exponent(const MemoryParam& p) {
    return p.two_p_minus_one() / p.three_minus_four_p();
}

}  // namespace

double sample_stable_half(double s, Philox& rng) {
    if (!(s > 0.0)) throw std::invalid_argument("sample_stable_half needs s > 0");
    const double z = nonzero_normal(rng);
    return (s / z) * (s / z);
}

SubordinatorPath::SubordinatorPath(double grid_step) : du_(grid_step) {
    if (!(grid_step > 0.0)) throw std::invalid_argument("grid step must be positive");
    values_.push_back(0.0);
}

std::size_t SubordinatorPath::extend_until_above(double level, Philox& rng,
                                                 std::size_t max_cells) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (values_[i] > level) return i;
    }
    while (values_.size() < max_cells) {
        const double z = nonzero_normal(rng);
        const double inc = (du_ / z) * (du_ / z);
        values_.push_back(values_.back() + inc);
        if (values_.back() > level) return values_.size() - 1;
    }
    throw ResourceError("subordinator path exceeded its cell budget");
}

void SubordinatorPath::extend_to(std::size_t i, Philox& rng) {
    while (values_.size() <= i) {
        const double z = nonzero_normal(rng);
        const double inc = (du_ / z) * (du_ / z);
        values_.push_back(values_.back() + inc);
    }
}

LimitSample sample_H(const MemoryParam& p, double t, double grid_step,
                     Philox& rng) {
    if (!(t > 0.0)) throw std::invalid_argument("sample_H needs t > 0");
    const double gamma = gamma_exponent(p);
    const double scale = 1.0 / std::sqrt(p.three_minus_four_p());
    const double target = std::pow(t, p.three_minus_four_p());

    SubordinatorPath path(grid_step);
    const std::size_t stop = path.extend_until_above(target, rng);
    tl_weights.reset(gamma, grid_step);

    const auto& lam = path.values();
    double h = 0.0;
    if (stop == 1) {
        // The path clears the target within the first cell: integrate the
        // scaling model lambda(u) = lambda(u_1) (u/u_1)^2 up to the level
        // crossing.
        const double b = lam[1];
        h = scale * std::pow(b, gamma) * grid_step *
            std::pow(target / b, 0.5 * (1.0 + 2.0 * gamma)) /
            (1.0 + 2.0 * gamma);
    } else {
        // Accumulated exactly like the eta inversion (scale folded into
        // each term), so shared-stream replays reproduce the partial sums
        // bitwise.
        for (std::size_t i = 0; i + 1 < stop; ++i) {
            h += scale * std::pow(lam[i + 1], gamma) * tl_weights.weight(i);
        }
    }
    if (!std::isfinite(h)) throw ResourceError("non-finite H accumulation");
    return LimitSample{t, h};
}

std::vector<double> sample_eta_path(const MemoryParam& p,
                                    const std::vector<double>& sorted_ts,
                                    double grid_step, Philox& rng) {
    for (std::size_t i = 0; i < sorted_ts.size(); ++i) {
        if (!(sorted_ts[i] >= 0.0) ||
            (i > 0 && sorted_ts[i] < sorted_ts[i - 1])) {
            throw std::invalid_argument("eta thresholds must be sorted and >= 0");
        }
    }
    const double gamma = gamma_exponent(p);
    const double beta = p.three_minus_four_p();
    const double scale = 1.0 / std::sqrt(beta);
    tl_weights.reset(gamma, grid_step);

    SubordinatorPath path(grid_step);
    std::vector<double> out;
    out.reserve(sorted_ts.size());

    double acc = 0.0;     // integral up to u_i
    std::size_t cell = 0; // next cell to consume is [u_cell, u_cell+1]
    auto lambda_at = [&](std::size_t i) -> double {
        path.extend_to(i, rng);
        return path.values()[i];
    };

    for (const double t : sorted_ts) {
        if (t == 0.0) {
            out.push_back(0.0);
            continue;
        }
        // Consume cells while the accumulated integral stays <= t; the
        // returned level is the right endpoint of the first cell whose
        // term pushes the sum strictly beyond t. This is the exact inverse
        // of the step function s -> accumulated integral, so eta(H(t)) >= t
        // holds pathwise on a shared stream (jumps land on the post-jump
        // value, as the right-continuous inverse requires).
        double cell_term = scale * std::pow(lambda_at(cell + 1), gamma) *
                           tl_weights.weight(cell);
        while (acc + cell_term <= t) {
            acc += cell_term;
            ++cell;
            if (cell > 400'000'000) throw ResourceError("eta accumulation budget exceeded");
            cell_term = scale * std::pow(lambda_at(cell + 1), gamma) *
                        tl_weights.weight(cell);
        }
        const double level = lambda_at(cell + 1);
        if (!std::isfinite(level) || !std::isfinite(acc)) {
            throw ResourceError("non-finite eta accumulation");
        }
        out.push_back(std::pow(level, 1.0 / beta));
    }
    return out;
}

double sample_eta(const MemoryParam& p, double t, double grid_step, Philox& rng) {
    return sample_eta_path(p, {t}, grid_step, rng).front();
}

double levy_density(const MemoryParam& p, double x) {
    if (!(x > 0.0)) throw std::invalid_argument("levy_density needs x > 0");
    const double beta = p.three_minus_four_p();
    const double c = std::sqrt(beta * beta * beta / (2.0 * kPi));
    // (e^{bx} - 1)^{-3/2} e^{bx} rewritten overflow-free.
    return c * std::exp(-0.5 * beta * x) *
           std::pow(-std::expm1(-beta * x), -1.5);
}

double levy_tail_integral(const MemoryParam& p) {
    const double beta = p.three_minus_four_p();
    const double c = std::sqrt(beta * beta * beta / (2.0 * kPi));

    // int_0^1 x Pi(dx), substituted x = v^2 to absorb the x^{-1/2}
    // singularity at the origin.
    auto near = [&](double v) -> double {
        const double x = v * v;
        if (beta * x < 1e-10) {
            // v^3 (e^{bx}-1)^{-3/2} -> beta^{-3/2} without the 0 * inf trap
            return 2.0 * c * std::pow(beta, -1.5);
        }
        return 2.0 * v * x * c * std::exp(-0.5 * beta * x) *
               std::pow(-std::expm1(-beta * x), -1.5);
    };
    const double head = integrate(near, 0.0, 1.0, 1e-12);

    // int_1^inf Pi(dx); the integrand decays like e^{-beta x / 2}.
    auto far = [&](double x) {
        return c * std::exp(-0.5 * beta * x) *
               std::pow(-std::expm1(-beta * x), -1.5);
    };
    const double cutoff = 1.0 + 80.0 / beta;
    const double tail = integrate(far, 1.0, cutoff, 1e-12);

    return head + tail;
}

double mean_H(const MemoryParam& p, double t) {
    if (t < 0.0) throw std::invalid_argument("mean_H needs t >= 0");
    return std::sqrt((6.0 - 8.0 * p.value()) * t / kPi);
}

double calibrate_grid_step(const MemoryParam& p, double t, std::uint64_t seed,
                           double initial, double rel_tol, std::uint64_t pilot,
                           int max_halvings) {
    auto pilot_mean = [&](double du, std::uint64_t salt) {
        double sum = 0.0;
        for (std::uint64_t r = 0; r < pilot; ++r) {
            Philox rng(seed, (salt << 48) + r);
            sum += sample_H(p, t, du, rng).h_value;
        }
        return sum / static_cast<double>(pilot);
    };
    double du = initial;
    double mean = pilot_mean(du, 1);
    for (int h = 0; h < max_halvings; ++h) {
        const double refined = pilot_mean(0.5 * du, static_cast<std::uint64_t>(h) + 2);
        if (std::abs(mean - refined) <= rel_tol * std::abs(refined)) return du;
        du *= 0.5;
        mean = refined;
    }
    return du;
}

}  // namespace erw
