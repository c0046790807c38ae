#pragma once
// Shared test helpers: an independent log-Gamma routine (kept separate
// from the library so Gamma-derived expectations have a second route),
// chi-square critical values, and small statistics utilities.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace testutil {

// Lanczos-style log Gamma (Numerical Recipes coefficients); independent of
// std::lgamma and of the library's coefficient recurrences.
inline double gammln(double xx) {
    static const double cof[6] = {76.18009172947146,  -86.50532032941677,
                                  24.01409824083091,  -1.231739572450155,
                                  0.1208650973866179e-2, -0.5395239384953e-5};
    double x = xx, y = xx;
    double tmp = x + 5.5;
    tmp -= (x + 0.5) * std::log(tmp);
    double ser = 1.000000000190015;
    for (int j = 0; j <= 5; ++j) ser += cof[j] / ++y;
    return -tmp + std::log(2.5066282746310005 * ser / x);
}

inline double gamma_ratio(double a, double b) {  // Gamma(a)/Gamma(b)
    return std::exp(gammln(a) - gammln(b));
}

// Upper quantile of chi-square by Wilson-Hilferty; alpha in {1e-3, 1e-4}.
inline double chi2_critical(double df, double alpha) {
    double z;
    if (alpha == 1e-3) {
        z = 3.090232306167814;
    } else if (alpha == 1e-4) {
        z = 3.719016485455709;
    } else {
        throw std::invalid_argument("unsupported alpha");
    }
    const double c = 2.0 / (9.0 * df);
    const double inner = 1.0 - c + z * std::sqrt(c);
    return df * inner * inner * inner;
}

// Pearson statistic with pooling of low-expectation cells.
struct ChiSquareResult {
    double statistic = 0.0;
    double df = 0.0;
};

inline ChiSquareResult pearson(std::span<const double> observed,
                               std::span<const double> expected,
                               double min_expected = 5.0) {
    double stat = 0.0;
    double pooled_obs = 0.0, pooled_exp = 0.0;
    std::size_t cells = 0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (expected[i] < min_expected) {
            pooled_obs += observed[i];
            pooled_exp += expected[i];
            continue;
        }
        const double d = observed[i] - expected[i];
        stat += d * d / expected[i];
        ++cells;
    }
    if (pooled_exp > 0.0) {
        const double d = pooled_obs - pooled_exp;
        stat += d * d / pooled_exp;
        ++cells;
    }
    return {stat, static_cast<double>(cells) - 1.0};
}

// Two-sample Pearson statistic over shared cells (counts1[i] vs counts2[i]).
inline ChiSquareResult pearson_two_sample(std::span<const double> counts1,
                                          std::span<const double> counts2) {
    double stat = 0.0;
    std::size_t cells = 0;
    for (std::size_t i = 0; i < counts1.size(); ++i) {
        const double tot = counts1[i] + counts2[i];
        if (tot < 10.0) continue;
        const double d = counts1[i] - counts2[i];
        stat += d * d / tot;
        ++cells;
    }
    return {stat, static_cast<double>(cells) - 1.0};
}

inline std::pair<double, double> mean_se(std::span<const double> xs) {
    double sum = 0, sum2 = 0;
    for (const double x : xs) {
        sum += x;
        sum2 += x * x;
    }
    const double n = static_cast<double>(xs.size());
    const double mean = sum / n;
    const double var = std::max(0.0, sum2 / n - mean * mean);
    return {mean, std::sqrt(var / n)};
}

inline double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

// Step-up probability of the walk written out directly, as the oracle for
// chi-square path-law comparisons.
inline double oracle_up(double p, std::int64_t t, std::int64_t s) {
    if (t == 0) return 0.5;
    return 0.5 + (2.0 * p - 1.0) * static_cast<double>(s) /
                     (2.0 * static_cast<double>(t));
}

// Exact probability of a +-1 sign sequence under the restart-at-k law.
inline double path_probability(double p, std::int64_t k, std::span<const int> signs) {
    double prob = 1.0;
    std::int64_t s = 0;
    for (std::size_t m = 0; m < signs.size(); ++m) {
        const double q = oracle_up(p, k + static_cast<std::int64_t>(m), s);
        prob *= signs[m] > 0 ? q : 1.0 - q;
        s += signs[m];
    }
    return prob;
}

}  // namespace testutil
