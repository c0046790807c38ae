#pragma once
// Samplers and numerics for the limit objects of the zero-counting
// asymptotics: the stable-1/2 inverse local time lambda, the local-time
// integral process
//
//   H(t) = (3-4p)^{-1/2} * int_0^{t^{3-4p}} s^gamma dL(s),
//   gamma = (2p-1)/(3-4p),
//
// its right-continuous inverse eta, and the Levy measure of the
// subordinator attached to eta by the Lamperti transform,
//
//   Pi(dx) = sqrt((3-4p)^3 / (2 pi)) (e^{(3-4p)x} - 1)^{-3/2} e^{(3-4p)x} dx.
//
// Local time carries the normalization that makes |B| - L a Brownian
// motion, i.e. E L(t) = sqrt(2t/pi) and lambda has Laplace exponent
// sqrt(2q); do not swap in the semimartingale normalization (factor 2).

#include <cstdint>
#include <vector>

#include "erw/coeffs.hpp"
#include "erw/rng.hpp"

namespace erw {

// One draw of lambda(s): first-passage representation s^2 / Z^2.
double sample_stable_half(double s, Philox& rng);

// Lazily grown stable-1/2 path on the uniform local-time grid u_i = i*du.
// Increments are i.i.d. du^2/Z^2, so grid marginals are exact in law.
class SubordinatorPath {
public:
    explicit SubordinatorPath(double grid_step);

    double grid_step() const noexcept { return du_; }
    const std::vector<double>& values() const noexcept { return values_; }

    // Ensure the path reaches above `level`; returns the first index i
    // with values[i] > level.
    std::size_t extend_until_above(double level, Philox& rng,
                                   std::size_t max_cells = 200'000'000);

    // Ensure indices 0..i exist.
    void extend_to(std::size_t i, Philox& rng);

private:
    double du_;
    std::vector<double> values_;  // values_[0] = 0
};

struct LimitSample {
    double t = 0.0;
    double h_value = 0.0;
};

// Integral of lambda^gamma over local time, evaluated with the
// scaling-exact cell rule: cell [u_i, u_{i+1}] contributes
// lambda(u_{i+1})^gamma * (u_{i+1}^{1+2g} - u_i^{1+2g}) / ((1+2g) u_{i+1}^{2g}),
// which matches E lambda(u)^gamma = c u^{2gamma} exactly in expectation
// for every cell (the linear-in-u rule is badly biased near 0 for
// gamma < 0, see the cell weights in limits.cpp).
LimitSample sample_H(const MemoryParam& p, double t, double grid_step,
                     Philox& rng);

// eta(t) = inf{s : H(s) > t}: runs the same accumulation along one lambda
// path until it reaches t, then reports lambda at that grid point raised
// to 1/(3-4p). sample_eta_path shares one path across a sorted t-grid, so
// the outputs are pathwise monotone.
double sample_eta(const MemoryParam& p, double t, double grid_step, Philox& rng);
std::vector<double> sample_eta_path(const MemoryParam& p,
                                    const std::vector<double>& sorted_ts,
                                    double grid_step, Philox& rng);

// Pointwise density of Pi (x > 0) and the tail integral
// int (1 ^ x) Pi(dx), by adaptive quadrature with the x^{-1/2} singularity
// at 0 removed by substitution.
double levy_density(const MemoryParam& p, double x);
double levy_tail_integral(const MemoryParam& p);

// Closed form E H(t) = sqrt((6-8p) t / pi).
double mean_H(const MemoryParam& p, double t);

// Halve the grid step until the pilot mean of H(t) moves by less than
// rel_tol; returns the accepted step.
double calibrate_grid_step(const MemoryParam& p, double t, std::uint64_t seed,
                           double initial = 1e-3, double rel_tol = 5e-3,
                           std::uint64_t pilot = 20'000, int max_halvings = 4);

}  // namespace erw
