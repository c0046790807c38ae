#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "erw/coeffs.hpp"
#include "erw/parallel.hpp"
#include "erw/rng.hpp"
#include "erw/walk.hpp"
#include "test_util.hpp"

using erw::MemoryParam;
using erw::Philox;
using erw::SimMode;
using erw::WalkPath;

TEST_SUITE_BEGIN("walk");

TEST_CASE("step probability formula and guards") {
    CHECK(erw::step_probability(MemoryParam(0.5), 99, 17) == 0.5);
    for (const double pv : {0.1, 0.3, 0.6}) {
        CHECK(erw::step_probability(MemoryParam(pv), 1, 1) == doctest::Approx(pv));
    }
    CHECK(erw::step_probability(MemoryParam(0.6), 4, -2) == doctest::Approx(0.45));
    CHECK(erw::step_probability(MemoryParam(0.6), 4, 4) >= 0.0);
    CHECK(erw::step_probability(MemoryParam(0.6), 4, 4) <= 1.0);
    CHECK_THROWS_AS(erw::step_probability(MemoryParam(0.6), 4, 5),
                    std::invalid_argument);
    CHECK_THROWS_AS(erw::step_probability(MemoryParam(0.6), 0, 0),
                    std::invalid_argument);
}

TEST_CASE("martingale identity of the rescaled chain") {
    // a(n+1)(s+1)q + a(n+1)(s-1)(1-q) == a(n) s with q the step-up law.
    for (const double pv : {0.1, 0.25, 0.5, 0.6, 0.74}) {
        const MemoryParam p(pv);
        const erw::CoeffSequence seq(p, 256);
        for (std::int64_t n = 1; n <= 200; ++n) {
            for (std::int64_t s = -n; s <= n; ++s) {
                const double q = erw::step_probability(p, n, s);
                const double lhs = seq.a(n + 1) * ((s + 1) * q + (s - 1) * (1 - q));
                const double rhs = seq.a(n) * s;
                CHECK(std::abs(lhs - rhs) <=
                      1e-12 * std::max(std::abs(rhs), 1e-30));
            }
        }
    }
}

TEST_CASE("p = 0 surely reverses its first excursion") {
    // The first return lands at time 2 with probability one; later zeros
    // are random again (P(S(4) = 0) = 2/3 by the exact table), so only the
    // opening excursion is pinned.
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Philox rng(9000, seed);
        const WalkPath path = erw::simulate_path(MemoryParam(0.0), 0, 12, rng);
        REQUIRE(path.positions[2] == 0);
        const auto zeta = erw::zeros_enumeration(path);
        REQUIRE(zeta.size() >= 2);
        CHECK(zeta[0] == 0);
        CHECK(zeta[1] == 2);
        for (const std::int64_t z : path.zero_indices) CHECK(z % 2 == 0);
    }
}

TEST_CASE("fair walk has balanced steps") {
    Philox rng(9001, 0);
    const std::int64_t n = 10000;
    const WalkPath path = erw::simulate_path(MemoryParam(0.5), 0, n, rng);
    std::int64_t ups = 0;
    for (std::int64_t m = 1; m <= n; ++m) {
        ups += path.positions[m] > path.positions[m - 1];
    }
    const double freq = static_cast<double>(ups) / static_cast<double>(n);
    CHECK(std::abs(freq - 0.5) <= 3.0 / (2.0 * std::sqrt(static_cast<double>(n))));
}

TEST_CASE("path law matches the exact sign-sequence probabilities") {
    // chi-square over all 2^6 sign sequences at p = 0.6
    const double pv = 0.6;
    const std::int64_t steps = 6;
    const std::uint64_t reps = 1'000'000;
    std::vector<double> counts(1 << steps, 0.0);
    const auto codes = erw::map_replicates<int>(
        4321, reps, 0, [&](std::uint64_t, Philox& rng) {
            const WalkPath path = erw::simulate_path(MemoryParam(pv), 0, steps, rng);
            int code = 0;
            for (std::int64_t m = 1; m <= steps; ++m) {
                code = 2 * code + (path.positions[m] > path.positions[m - 1]);
            }
            return code;
        });
    for (const int code : codes) counts[code] += 1.0;

    std::vector<double> expected;
    for (int code = 0; code < (1 << steps); ++code) {
        std::vector<int> signs;
        for (int b = steps - 1; b >= 0; --b) signs.push_back((code >> b) & 1 ? 1 : -1);
        expected.push_back(testutil::path_probability(pv, 0, signs) *
                           static_cast<double>(reps));
    }
    const auto chi = testutil::pearson(counts, expected);
    CHECK(chi.statistic < testutil::chi2_critical(chi.df, 1e-3));
}

TEST_CASE("memory mode and marginal mode sample the same law") {
    const double pv = 0.35;
    const std::int64_t steps = 8;
    const std::uint64_t reps = 1'000'000;
    auto histogram = [&](SimMode mode, std::uint64_t seed) {
        std::vector<double> counts(1 << steps, 0.0);
        const auto codes = erw::map_replicates<int>(
            seed, reps, 0, [&](std::uint64_t, Philox& rng) {
                const WalkPath path =
                    erw::simulate_path(MemoryParam(pv), 0, steps, rng, mode);
                int code = 0;
                for (std::int64_t m = 1; m <= steps; ++m) {
                    code = 2 * code + (path.positions[m] > path.positions[m - 1]);
                }
                return code;
            });
        for (const int code : codes) counts[code] += 1.0;
        return counts;
    };
    const auto marginal = histogram(SimMode::marginal, 101);
    const auto memory = histogram(SimMode::memory, 202);
    const auto chi = testutil::pearson_two_sample(marginal, memory);
    CHECK(chi.statistic < testutil::chi2_critical(chi.df, 1e-4));
}

TEST_CASE("occupancies are symmetric under sign flip") {
    const std::int64_t n = 16;
    const std::uint64_t reps = 200'000;
    std::vector<std::vector<double>> counts(
        static_cast<std::size_t>(n) + 1,
        std::vector<double>(2 * static_cast<std::size_t>(n) + 1, 0.0));
    const auto paths = erw::map_replicates<std::vector<std::int8_t>>(
        777, reps, 0, [&](std::uint64_t, Philox& rng) {
            const WalkPath path = erw::simulate_path(MemoryParam(0.6), 0, n, rng);
            std::vector<std::int8_t> out(path.positions.size());
            for (std::size_t i = 0; i < out.size(); ++i) {
                out[i] = static_cast<std::int8_t>(path.positions[i]);
            }
            return out;
        });
    for (const auto& pos : paths) {
        for (std::size_t m = 0; m < pos.size(); ++m) {
            counts[m][static_cast<std::size_t>(pos[m] + n)] += 1.0;
        }
    }
    for (std::int64_t m = 1; m <= n; ++m) {
        for (std::int64_t s = 1; s <= m; ++s) {
            const double c_pos = counts[m][s + n];
            const double c_neg = counts[m][-s + n];
            const double se = std::sqrt(std::max(c_pos + c_neg, 1.0));
            CHECK(std::abs(c_pos - c_neg) <= 4.0 * se);
        }
    }
}

TEST_CASE("first return at p = 0 is two steps, never censored") {
    for (std::uint64_t r = 0; r < 200; ++r) {
        Philox rng(31, r);
        const auto sample = erw::first_return(MemoryParam(0.0), 0, 10, rng);
        REQUIRE_FALSE(sample.censored);
        REQUIRE(sample.value == 2);
    }
}

TEST_CASE("first-return tail probabilities at small horizons") {
    auto survival_mc = [&](double pv, std::int64_t n, std::uint64_t seed) {
        const std::uint64_t reps = 1'000'000;
        const auto censored = erw::map_replicates<char>(
            seed, reps, 0, [&](std::uint64_t, Philox& rng) -> char {
                return erw::first_return(MemoryParam(pv), 0, n, rng).censored;
            });
        double frac = 0;
        for (const char c : censored) frac += c;
        return std::pair{frac / static_cast<double>(reps),
                         std::sqrt(frac / reps * (1 - frac / reps) /
                                   static_cast<double>(reps))};
    };
    for (const double pv : {0.3, 0.6}) {
        const auto [s2, se2] = survival_mc(pv, 2, 51);
        CHECK(std::abs(s2 - pv) <= 3.0 * se2);  // P(R>2) = p
    }
    const auto [s4, se4] = survival_mc(0.5, 4, 52);
    CHECK(std::abs(s4 - 0.375) <= 3.0 * se4);  // p(1+3p-p^2)/3 at p = 1/2
}

TEST_CASE("return values are even and within the cap") {
    Philox rng(32, 0);
    for (int i = 0; i < 2000; ++i) {
        const auto sample = erw::first_return(MemoryParam(0.6), 64, 128, rng);
        CHECK(sample.cap == 128);
        if (!sample.censored) {
            CHECK(sample.value >= 2);
            CHECK(sample.value <= 128);
            CHECK(sample.value % 2 == 0);
        }
    }
    Philox guard_rng(0, 0);
    CHECK_THROWS_AS(erw::first_return(MemoryParam(0.5), 1, 16, guard_rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(erw::first_return(MemoryParam(0.5), 0, 1, guard_rng),
                    std::invalid_argument);
}

TEST_CASE("zero bookkeeping is consistent") {
    WalkPath zigzag;
    zigzag.start_time = 0;
    zigzag.positions = {0, 1, 0, 1, 0, 1, 0};
    zigzag.zero_indices = {2, 4, 6};
    CHECK(erw::count_zeros(zigzag, 6) == 3);
    CHECK(erw::count_zeros(zigzag, 1) == 0);
    CHECK(erw::count_zeros(zigzag, 5) == 2);
    CHECK_THROWS_AS(erw::count_zeros(zigzag, 7), std::invalid_argument);

    WalkPath no_zero;
    no_zero.start_time = 4;
    no_zero.positions = {0, 1, 2};
    CHECK(erw::zeros_enumeration(no_zero) == std::vector<std::int64_t>{4});
}

TEST_CASE("counting and enumeration are inverse to each other") {
    // Z(n) < j <=> zeta(j) > n, checked pathwise.
    for (std::uint64_t r = 0; r < 1000; ++r) {
        Philox rng(88, r);
        const WalkPath path = erw::simulate_path(MemoryParam(0.5), 0, 64, rng);
        const auto zeta = erw::zeros_enumeration(path);
        for (std::int64_t n = 0; n <= 64; n += 7) {
            const std::int64_t z = erw::count_zeros(path, n);
            for (std::size_t j = 1; j < zeta.size(); ++j) {
                CHECK(((z < static_cast<std::int64_t>(j)) ==
                       (zeta[j] > n)));
            }
        }
    }
}

TEST_CASE("streaming helpers agree with the path sampler on a shared stream") {
    for (std::uint64_t r = 0; r < 50; ++r) {
        Philox rng1(55, r), rng2(55, r), rng3(55, r);
        const WalkPath path = erw::simulate_path(MemoryParam(0.3), 2, 128, rng1);
        CHECK(erw::simulate_zero_count(MemoryParam(0.3), 2, 128, rng2) ==
              static_cast<std::int64_t>(path.zero_indices.size()));
        const auto zt = erw::simulate_zeros_until(MemoryParam(0.3), 2, 1000, 128, rng3);
        CHECK(zt.times == path.zero_indices);
        CHECK_FALSE(zt.complete);
    }
}

TEST_CASE("memory mode is only defined from the origin") {
    Philox rng(1, 1);
    CHECK_THROWS_AS(
        erw::simulate_path(MemoryParam(0.5), 2, 8, rng, SimMode::memory),
        std::invalid_argument);
    CHECK_THROWS_AS(erw::simulate_path(MemoryParam(0.5), 3, 8, rng),
                    std::invalid_argument);
}

TEST_CASE("recurrence regimes at desk scale") {
    // diffusive: the median zero count keeps growing
    auto median_zeros = [&](double pv, std::int64_t n, bool demo) {
        std::vector<double> zs;
        const auto counts = erw::map_replicates<double>(
            606, 51, 0, [&](std::uint64_t, Philox& rng) {
                return static_cast<double>(
                    erw::simulate_zero_count(MemoryParam(pv, demo), 0, n, rng));
            });
        return testutil::median({counts.begin(), counts.end()});
    };
    const double m4 = median_zeros(0.6, 10000, false);
    const double m5 = median_zeros(0.6, 100000, false);
    const double m6 = median_zeros(0.6, 1000000, false);
    CHECK(m4 < m5);
    CHECK(m5 < m6);

    // superdiffusive demo: most paths stop visiting the origin early
    const auto last_zero_late = erw::map_replicates<char>(
        607, 400, 0, [&](std::uint64_t, Philox& rng) -> char {
            const auto zt = erw::simulate_zeros_until(MemoryParam(0.9, true), 0,
                                                      1 << 20, 10000, rng);
            return !zt.times.empty() && zt.times.back() > 1000;
        });
    double frac = 0;
    for (const char c : last_zero_late) frac += c;
    CHECK(frac / 400.0 < 0.5);
}

TEST_SUITE_END();
