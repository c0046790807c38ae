#pragma once
// Deterministic coefficient sequences of the reinforced walk:
//
//   a(0) = 0,  a(n) = Gamma(n) / Gamma(n + 2p - 1)  for n >= 1
//              (convention a(1) = 0 when p = 0),
//   A(n) = sum_{j<=n} a(j)^2.
//
// a is evaluated by the multiplicative recurrence
//   a(n+1) = a(n) * n / (n + 2p - 1),   a(1) = 1 / Gamma(2p),
// because the Gamma quotient overflows doubles near n = 171. Leading-order
// surrogates: a(n) ~ n^{1-2p} and A(n) ~ n^{3-4p} / (3-4p).

#include <cstddef>
#include <vector>

namespace erw {

// Memory parameter p of the walk, restricted to the diffusive regime
// [0, 3/4). Values in [3/4, 1) are admitted only when the caller opts into
// the qualitative transience demo.
class MemoryParam {
public:
    explicit MemoryParam(double p, bool allow_superdiffusive = false);

    double value() const noexcept { return p_; }
    bool superdiffusive() const noexcept { return p_ >= 0.75; }

    // Frequently used combinations.
    double two_p_minus_one() const noexcept { return 2.0 * p_ - 1.0; }
    double three_minus_four_p() const noexcept { return 3.0 - 4.0 * p_; }

private:
    double p_;
};

// Memoized (a, A) pair. Growth is amortized-doubling and not thread-safe;
// call reserve() before sharing across workers.
class CoeffSequence {
public:
    explicit CoeffSequence(MemoryParam p, std::size_t initial_horizon = 1024);

    const MemoryParam& param() const noexcept { return p_; }

    double a(std::size_t n) const;
    double A(std::size_t n) const;

    void reserve(std::size_t n) const;

private:
    void extend(std::size_t n) const;

    MemoryParam p_;
    mutable std::vector<double> a_;
    mutable std::vector<double> cum_;
};

// One-shot evaluations (build a scratch sequence internally).
double coeff_a(const MemoryParam& p, std::size_t n);
double coeff_A(const MemoryParam& p, std::size_t n);

// Leading-order surrogates n^{1-2p} and n^{3-4p}/(3-4p), n >= 1.
double asymptotic_a(const MemoryParam& p, std::size_t n);
double asymptotic_A(const MemoryParam& p, std::size_t n);

// Tail constant (1/Gamma(2p)) * sqrt((6-8p)/pi) of the first-return law
// P(R > n) ~ const * n^{2p-3/2}. Rejects p = 0, where the first return
// happens at time 2 almost surely and there is no power tail.
double return_tail_constant(const MemoryParam& p);

}  // namespace erw
