#include "erw/coeffs.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace erw {

MemoryParam::MemoryParam(double p, bool allow_superdiffusive) : p_(p) {
    if (!(p >= 0.0) || !(p < 1.0)) {
        throw std::invalid_argument("memory parameter must lie in [0, 1), got " +
                                    std::to_string(p));
    }
    if (p >= 0.75 && !allow_superdiffusive) {
        throw std::invalid_argument(
            "memory parameter " + std::to_string(p) +
            " is outside the diffusive regime [0, 3/4); "
            "pass allow_superdiffusive for the transience demo");
    }
}

CoeffSequence::CoeffSequence(MemoryParam p, std::size_t initial_horizon) : p_(p) {
    a_.reserve(initial_horizon + 1);
    cum_.reserve(initial_horizon + 1);
    a_.push_back(0.0);
    cum_.push_back(0.0);
    extend(initial_horizon);
}

void CoeffSequence::extend(std::size_t n) const {
    const double p = p_.value();
    while (a_.size() <= n) {
        const std::size_t m = a_.size();  // next index to fill
        double v;
        if (p == 0.0) {
            v = static_cast<double>(m) - 1.0;  // Gamma(m)/Gamma(m-1), and a(1) = 0
        } else if (m == 1) {
            v = std::exp(-std::lgamma(2.0 * p));  // 1/Gamma(2p)
        } else {
            const double j = static_cast<double>(m - 1);
            v = a_[m - 1] * j / (j + 2.0 * p - 1.0);
        }
        a_.push_back(v);
        cum_.push_back(cum_[m - 1] + v * v);
    }
}

void CoeffSequence::reserve(std::size_t n) const { extend(n); }

double CoeffSequence::a(std::size_t n) const {
    if (n >= a_.size()) extend(n + n / 2 + 16);
    return a_[n];
}

double CoeffSequence::A(std::size_t n) const {
    if (n >= cum_.size()) extend(n + n / 2 + 16);
    return cum_[n];
}

double coeff_a(const MemoryParam& p, std::size_t n) {
    return CoeffSequence(p, n).a(n);
}

double coeff_A(const MemoryParam& p, std::size_t n) {
    return CoeffSequence(p, n).A(n);
}

double asymptotic_a(const MemoryParam& p, std::size_t n) {
    if (n == 0) throw std::invalid_argument("asymptotic_a needs n >= 1");
    return std::pow(static_cast<double>(n), 1.0 - 2.0 * p.value());
}

double asymptotic_A(const MemoryParam& p, std::size_t n) {
    if (n == 0) throw std::invalid_argument("asymptotic_A needs n >= 1");
    const double e = p.three_minus_four_p();
    return std::pow(static_cast<double>(n), e) / e;
}

double return_tail_constant(const MemoryParam& p) {
    if (p.value() == 0.0) {
        throw std::invalid_argument(
            "return_tail_constant undefined at p = 0: the first return happens at time 2 a.s.");
    }
    constexpr double pi = 3.14159265358979323846;
    return std::exp(-std::lgamma(2.0 * p.value())) *
           std::sqrt((6.0 - 8.0 * p.value()) / pi);
}

}  // namespace erw
