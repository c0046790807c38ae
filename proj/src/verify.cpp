#include "erw/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

#include "erw/coeffs.hpp"
#include "erw/embedding.hpp"
#include "erw/exact.hpp"
#include "erw/limits.hpp"
#include "erw/parallel.hpp"
#include "erw/quadrature.hpp"
#include "erw/rng.hpp"
#include "erw/stats.hpp"
#include "erw/walk.hpp"

namespace erw {

namespace {

constexpr double kPi = 3.14159265358979323846;
const double kSqrt2OverPi = std::sqrt(2.0 / kPi);

std::string fmt(const char* format, ...) {
    va_list args;
    va_start(args, format);
    char buf[512];
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

class Criterion {
public:
    explicit Criterion(std::string name) : start_(std::chrono::steady_clock::now()) {
        result_.name = std::move(name);
        result_.pass = true;
    }

    void check(const std::string& name, bool pass, const std::string& detail) {
        result_.checks.push_back({name, pass, detail});
        result_.pass = result_.pass && pass;
    }

    // |measured - target| <= tol
    void check_abs(const std::string& name, double measured, double target,
                   double tol) {
        check(name, std::abs(measured - target) <= tol,
              fmt("measured=%.6g target=%.6g tol=%.3g", measured, target, tol));
    }

    // |measured - target| <= rel * |target|
    void check_rel(const std::string& name, double measured, double target,
                   double rel) {
        check(name, std::abs(measured - target) <= rel * std::abs(target),
              fmt("measured=%.6g target=%.6g rel_err=%.3g rel_tol=%.3g", measured,
                  target, std::abs(measured - target) / std::abs(target), rel));
    }

    CriterionResult finish() {
        result_.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
                .count();
        return result_;
    }

private:
    CriterionResult result_;
    std::chrono::steady_clock::time_point start_;
};

// ---------------------------------------------------------------------------
// 1. coefficient identities: recurrence + Stirling over the full p grid
// ---------------------------------------------------------------------------
CriterionResult coeff_identities(const VerifyOptions&) {
    Criterion c("coeff-identities");
    const std::size_t horizon = 1'000'000;
    for (const double pv : {0.0, 0.1, 0.25, 0.5, 0.6, 0.74}) {
        const MemoryParam p(pv);
        const CoeffSequence seq(p, horizon + 1);

        double worst_rec = 0.0;
        for (std::size_t n = 1; n < horizon; ++n) {
            const double lhs =
                seq.a(n + 1) * (static_cast<double>(n) + 2.0 * pv - 1.0);
            const double rhs = seq.a(n) * static_cast<double>(n);
            const double scale = std::max(std::abs(rhs), 1e-300);
            worst_rec = std::max(worst_rec, std::abs(lhs - rhs) / scale);
        }
        c.check(fmt("recurrence p=%.2f", pv), worst_rec <= 1e-12,
                fmt("max_rel_defect=%.3g tol=1e-12", worst_rec));

        double worst_stirling = 0.0;
        for (std::size_t n = 1000; n <= horizon; ++n) {
            const double ratio =
                seq.a(n) * std::pow(static_cast<double>(n), 2.0 * pv - 1.0);
            worst_stirling = std::max(worst_stirling, std::abs(ratio - 1.0));
        }
        c.check(fmt("stirling p=%.2f", pv), worst_stirling <= 0.01,
                fmt("max_defect=%.3g tol=0.01", worst_stirling));
    }
    return c.finish();
}

// ---------------------------------------------------------------------------
// 2. exact small-horizon laws: P(R>2) = p, P(R>4) = p(1+3p-p^2)/3
// ---------------------------------------------------------------------------
CriterionResult exact_small_horizon(const VerifyOptions&) {
    Criterion c("exact-small-horizon");
    double worst2 = 0.0, worst4 = 0.0;
    for (int i = 1; i <= 20; ++i) {
        const double pv = 0.74 * static_cast<double>(i) / 20.0;
        const ExactTable t = exact_table(MemoryParam(pv), 0, 4, true);
        worst2 = std::max(worst2, std::abs(t.survival()[2] - pv));
        const double want4 = pv * (1.0 + 3.0 * pv - pv * pv) / 3.0;
        worst4 = std::max(worst4, std::abs(t.survival()[4] - want4));
    }
    c.check("survival-at-2", worst2 <= 1e-12, fmt("max_defect=%.3g tol=1e-12", worst2));
    c.check("survival-at-4", worst4 <= 1e-12, fmt("max_defect=%.3g tol=1e-12", worst4));
    return c.finish();
}

// ---------------------------------------------------------------------------
// 3. sqrt(n) P(R>n) at p = 1/2 from the exact DP
// ---------------------------------------------------------------------------
CriterionResult return_tail_srw(const VerifyOptions&) {
    Criterion c("return-tail-srw");
    const std::int64_t n = 4096;
    const MemoryParam p(0.5);
    const ExactTable t = exact_table(p, 0, n, true, 0);
    const CoeffSequence coeffs(p, static_cast<std::size_t>(n) + 2);
    const ReturnTailStatistic stat =
        return_tail_statistic(coeffs, 0, n, t.survival()[static_cast<std::size_t>(n)], 0.0);
    c.check_rel("sqrt(n)P(R>n) vs sqrt(2/pi)", stat.value, kSqrt2OverPi, 0.02);
    return c.finish();
}

// ---------------------------------------------------------------------------
// 4. tail-constant map at p in {0.25, 0.4, 0.6}: normalized statistic and
//    fitted log-log slope
// ---------------------------------------------------------------------------
CriterionResult return_tail_map(const VerifyOptions&) {
    Criterion c("return-tail-map");
    const std::int64_t horizon = 4096;
    const std::vector<std::int64_t> grid{256, 512, 1024, 2048, 4096};
    for (const double pv : {0.25, 0.4, 0.6}) {
        const MemoryParam p(pv);
        const ExactTable t = exact_table(p, 0, horizon, true, 0);
        const CoeffSequence coeffs(p, static_cast<std::size_t>(horizon) + 2);
        const ReturnTailStatistic stat = return_tail_statistic(
            coeffs, 0, horizon, t.survival()[static_cast<std::size_t>(horizon)], 0.0);
        c.check_rel(fmt("statistic p=%.2f", pv), stat.value, kSqrt2OverPi, 0.08);

        TailEstimate est = tail_estimate_from_table(t, grid);
        const auto [slope, se] = fit_tail_exponent(est, 256, 4096);
        (void)se;
        c.check_abs(fmt("tail-slope p=%.2f", pv), slope, 2.0 * pv - 1.5, 0.08);
    }
    return c.finish();
}

// ---------------------------------------------------------------------------
// 5. uniformity in k: Monte Carlo under P_k with k = n = 2048
// ---------------------------------------------------------------------------
CriterionResult return_tail_uniformity(const VerifyOptions& options) {
    Criterion c("return-tail-uniformity");
    const MemoryParam p(0.5);
    const std::int64_t k = 2048, n = 2048;
    const std::uint64_t replicates = 100'000;
    const auto censored = map_replicates<char>(
        options.seed, replicates, options.threads,
        [&](std::uint64_t, Philox& rng) -> char {
            return first_return(p, k, n, rng).censored ? 1 : 0;
        });
    double frac = 0.0;
    for (const char x : censored) frac += x;
    frac /= static_cast<double>(replicates);
    const double se =
        std::sqrt(frac * (1.0 - frac) / static_cast<double>(replicates));

    const CoeffSequence coeffs(p, static_cast<std::size_t>(k + n) + 2);
    const ReturnTailStatistic stat = return_tail_statistic(coeffs, k, n, frac, se);
    const double tol = 3.0 * stat.se + 0.05 * kSqrt2OverPi;
    c.check("sqrt(A_{n+k}-A_k)/a_{k+1} * P_k(R>n)",
            std::abs(stat.value - kSqrt2OverPi) <= tol,
            fmt("measured=%.5g +- %.2g target=%.5g tol(3se+5%%)=%.3g", stat.value,
                stat.se, kSqrt2OverPi, tol));
    return c.finish();
}

// ---------------------------------------------------------------------------
// 6. zero-count scaling: E Z(n)/sqrt(n) against sqrt((6-8p)/pi)
// ---------------------------------------------------------------------------
CriterionResult zeros_scaling(const VerifyOptions& options) {
    Criterion c("zeros-scaling");
    const std::int64_t n = 4096;
    for (const double pv : {0.25, 0.5}) {
        const MemoryParam p(pv);
        const ExactTable t = exact_table(p, 0, n, false, 0);
        const double measured =
            t.expected_zeros(n) / std::sqrt(static_cast<double>(n));
        c.check_rel(fmt("exact p=%.2f", pv), measured, mean_H(p, 1.0), 0.03);
    }
    {
        const MemoryParam p(0.65);
        const ZeroScaling z =
            zeros_scaling_statistic(p, n, 10'000, options.seed, options.threads, false);
        const double target = mean_H(p, 1.0);
        const double tol = 3.0 * z.mc_se + 0.10 * target;
        c.check("mc p=0.65", std::abs(z.mc_mean - target) <= tol,
                fmt("measured=%.5g +- %.2g target=%.5g tol(3se+10%%)=%.3g", z.mc_mean,
                    z.mc_se, target, tol));
    }
    return c.finish();
}

// ---------------------------------------------------------------------------
// 7. distributional limit: KS(Z(2^14)/2^7, H(1)) <= 0.03
// ---------------------------------------------------------------------------
CriterionResult zeros_distribution(const VerifyOptions& options) {
    Criterion c("zeros-distribution");
    for (const double pv : {0.25, 0.5}) {
        const MemoryParam p(pv);
        const KsReport ks = distributional_check_H(p, 1 << 14, 10'000, options.seed,
                                                   2.5e-4, options.threads, 1e-3, 0.03);
        c.check(fmt("ks p=%.2f", pv), ks.statistic <= 0.03,
                fmt("ks=%.4f allowance=0.03 (critical@1e-3=%.4f)", ks.statistic,
                    ks.critical));
    }
    return c.finish();
}

// ---------------------------------------------------------------------------
// 8. limit-process means: E H(1) within 3 SE; lambda Laplace transform
// ---------------------------------------------------------------------------
CriterionResult limit_means(const VerifyOptions& options) {
    Criterion c("limit-means");
    const std::uint64_t paths = 100'000;
    std::uint64_t salt = 0;
    for (const double pv : {0.1, 0.25, 0.5, 0.65}) {
        const MemoryParam p(pv);
        const auto hs = map_replicates<double>(
            options.seed + 7919 * ++salt, paths, options.threads,
            [&](std::uint64_t, Philox& rng) {
                return sample_H(p, 1.0, 2.5e-4, rng).h_value;
            });
        double sum = 0, sum2 = 0;
        for (const double h : hs) {
            sum += h;
            sum2 += h * h;
        }
        const double mean = sum / static_cast<double>(paths);
        const double se = std::sqrt(
            (sum2 / static_cast<double>(paths) - mean * mean) /
            static_cast<double>(paths));
        const double target = mean_H(p, 1.0);
        c.check(fmt("mean-H p=%.2f", pv), std::abs(mean - target) <= 3.0 * se,
                fmt("measured=%.5g +- %.2g target=%.5g", mean, se, target));
    }
    {
        const std::uint64_t draws = 1'000'000;
        const auto lam = map_replicates<double>(
            options.seed + 1, draws, options.threads,
            [&](std::uint64_t, Philox& rng) { return sample_stable_half(1.0, rng); });
        for (const double q : {0.5, 1.0, 2.0}) {
            double sum = 0, sum2 = 0;
            for (const double l : lam) {
                const double e = std::exp(-q * l);
                sum += e;
                sum2 += e * e;
            }
            const double mean = sum / static_cast<double>(draws);
            const double se = std::sqrt(
                (sum2 / static_cast<double>(draws) - mean * mean) /
                static_cast<double>(draws));
            const double target = std::exp(-std::sqrt(2.0 * q));
            c.check(fmt("laplace q=%.1f", q), std::abs(mean - target) <= 3.0 * se,
                    fmt("measured=%.6g +- %.2g target=%.6g", mean, se, target));
        }
    }
    return c.finish();
}

// ---------------------------------------------------------------------------
// 9. quadrature identity: the scaled log-return integral equals the
//    (1 ^ x) integral against the Levy density
// ---------------------------------------------------------------------------
CriterionResult quadrature_identity(const VerifyOptions&) {
    Criterion c("quadrature-identity");
    for (const double pv : {0.1, 0.25, 0.5, 0.6}) {
        const MemoryParam p(pv);
        const double beta = p.three_minus_four_p();
        // sqrt((6-8p)/pi) * int_0^{e-1} dt / ((1+t) sqrt((1+t)^{3-4p} - 1)),
        // substituted t = v^2 against the 1/sqrt(t) singularity.
        auto integrand = [&](double v) {
            const double t = v * v;
            const double grow = std::expm1(beta * std::log1p(t));
            if (grow < 1e-12 * beta) return 2.0 / std::sqrt(beta);
            return 2.0 * v / ((1.0 + t) * std::sqrt(grow));
        };
        const double lhs = std::sqrt((6.0 - 8.0 * pv) / kPi) *
                           integrate(integrand, 0.0,
                                     std::sqrt(std::exp(1.0) - 1.0), 1e-12);
        const double rhs = levy_tail_integral(p);
        c.check(fmt("identity p=%.2f", pv), std::abs(lhs - rhs) <= 1e-8,
                fmt("lhs=%.12g rhs=%.12g |diff|=%.3g tol=1e-8", lhs, rhs,
                    std::abs(lhs - rhs)));
    }
    return c.finish();
}

// ---------------------------------------------------------------------------
// 10. embedding identities: exit-side law, exit-time means, clock identity
// ---------------------------------------------------------------------------
CriterionResult embedding_identities(const VerifyOptions& options) {
    Criterion c("embedding-identities");
    {
        double worst = 0.0;
        for (const double pv : {0.1, 0.25, 0.5, 0.6, 0.74}) {
            const MemoryParam p(pv);
            const CoeffSequence coeffs(p, 512);
            for (std::int64_t n = 1; n <= 200; ++n) {
                for (std::int64_t s = -n; s <= n; s += 2) {
                    const double lhs = embedded_up_probability(coeffs, 0, n, s);
                    const double rhs = step_probability(p, n, s);
                    worst = std::max(worst, std::abs(lhs - rhs));
                }
            }
        }
        c.check("exit-side law == step law", worst <= 1e-12,
                fmt("max_defect=%.3g tol=1e-12", worst));
    }
    {
        const std::uint64_t samples = 100'000;
        const std::pair<double, double> problems[] = {{1.0, 0.0}, {2.0, 1.0}, {1.0, 0.9}};
        std::uint64_t salt = 0;
        for (const auto& [x, y] : problems) {
            const auto times = map_replicates<double>(
                options.seed + 100 + salt++, samples, options.threads,
                [&, x = x, y = y](std::uint64_t, Philox& rng) {
                    return sample_exit(ExitProblem{x, y}, rng).time;
                });
            double sum = 0, sum2 = 0;
            for (const double t : times) {
                sum += t;
                sum2 += t * t;
            }
            const double mean = sum / static_cast<double>(samples);
            const double se = std::sqrt(
                (sum2 / static_cast<double>(samples) - mean * mean) /
                static_cast<double>(samples));
            const double target = x * x - y * y;
            c.check(fmt("mean exit time x=%.1f y=%.1f", x, y),
                    std::abs(mean - target) <= 3.0 * se,
                    fmt("measured=%.5g +- %.2g target=%.5g", mean, se, target));
        }
    }
    {
        GridTuning tuning;
        tuning.divisor = 100.0;
        tuning.floor_fraction = 0.05;
        const std::int64_t n = 512;
        const std::uint64_t replicates = 10'000;
        for (const double pv : {0.25, 0.6}) {
            const MemoryParam p(pv);
            CoeffSequence coeffs(p, static_cast<std::size_t>(n) + 2);
            // E T_n = A_n - E V_n <=> E[T_n + V_n] = A_n for the martingale
            // clock; test the combined mean against its 3-SE band.
            const auto tv = map_replicates<double>(
                options.seed + 200, replicates, options.threads,
                [&](std::uint64_t, Philox& rng) {
                    const EmbeddedPath path =
                        sample_embedded_path(coeffs, 0, n, rng, tuning);
                    return path.times.back() + path.compensator.back();
                });
            double sum = 0, sum2 = 0;
            for (const double v : tv) {
                sum += v;
                sum2 += v * v;
            }
            const double mean = sum / static_cast<double>(replicates);
            const double se = std::sqrt(
                (sum2 / static_cast<double>(replicates) - mean * mean) /
                static_cast<double>(replicates));
            const double target = coeffs.A(static_cast<std::size_t>(n));
            c.check(fmt("E[T_n + V_n] = A_n p=%.2f", pv),
                    std::abs(mean - target) <= 3.0 * se,
                    fmt("measured=%.6g +- %.2g target=%.6g", mean, se, target));
        }
    }
    return c.finish();
}

// ---------------------------------------------------------------------------
// 11. mean-return dichotomy proxy (E[R ^ N] stabilization vs divergence)
// ---------------------------------------------------------------------------
CriterionResult return_dichotomy(const VerifyOptions&) {
    Criterion c("return-dichotomy");
    auto partial_means = [](double pv) {
        std::vector<double> means;
        for (const int lg : {8, 10, 12, 14}) {
            const ExactTable t = exact_table(MemoryParam(pv), 0, 1ll << lg, true, 0);
            means.push_back(t.expected_return_capped());
        }
        return means;
    };
    {
        const auto m = partial_means(0.15);
        const double step = (m[3] - m[2]) / m[2];
        c.check("stabilization p=0.15", step < 0.02,
                fmt("E[R^2^12]=%.6f E[R^2^14]=%.6f step=%.4f%% tol=2%%", m[2], m[3],
                    100.0 * step));
    }
    {
        const auto m = partial_means(0.35);
        bool all = true;
        double min_step = 1e300;
        for (std::size_t i = 1; i < m.size(); ++i) {
            const double step = (m[i] - m[i - 1]) / m[i - 1];
            min_step = std::min(min_step, step);
            all = all && step > 0.05;
        }
        c.check("divergence p=0.35", all,
                fmt("min successive step=%.1f%% threshold=5%%", 100.0 * min_step));
    }
    return c.finish();
}

// ---------------------------------------------------------------------------
// 12. CLI determinism: same config and seed, different thread counts
// ---------------------------------------------------------------------------
std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CriterionResult determinism(const VerifyOptions& options) {
    Criterion c("determinism");
    if (options.cli_path.empty()) {
        c.check("cli available", false, "no CLI path configured for this run");
        return c.finish();
    }
    namespace fs = std::filesystem;
    const fs::path dir =
        fs::temp_directory_path() /
        ("erwlab-determinism-" + std::to_string(static_cast<unsigned>(::getpid())));
    fs::create_directories(dir);

    const std::string base = "\"" + options.cli_path +
                             "\" return-tail --p 0.5 --k 0 --cap 512 --replicates 20000 "
                             "--seed 7 --grid 2,8,32,128,512";
    struct Run {
        const char* label;
        std::string args;
    };
    const Run runs[] = {
        {"threads1-csv-a", " --threads 1 --format csv --out "},
        {"threads1-csv-b", " --threads 1 --format csv --out "},
        {"threads4-csv", " --threads 4 --format csv --out "},
        {"threads1-json", " --threads 1 --format json --out "},
        {"threads4-json", " --threads 4 --format json --out "},
    };
    std::vector<std::string> contents;
    bool ran_ok = true;
    for (const Run& run : runs) {
        const fs::path out = dir / (std::string(run.label) + ".out");
        const std::string cmd = base + run.args + "\"" + out.string() + "\"" +
                                " 2> /dev/null";
        const int rc = std::system(cmd.c_str());
        ran_ok = ran_ok && rc == 0;
        contents.push_back(slurp(out));
    }
    c.check("campaigns run", ran_ok, ran_ok ? "all exit 0" : "nonzero exit status");
    c.check("csv repeat identical", contents[0] == contents[1],
            fmt("%zu bytes", contents[0].size()));
    c.check("csv threads 1 vs 4 identical", contents[0] == contents[2],
            fmt("%zu bytes", contents[0].size()));
    c.check("json threads 1 vs 4 identical", contents[3] == contents[4],
            fmt("%zu bytes", contents[3].size()));
    std::error_code ec;
    fs::remove_all(dir, ec);
    return c.finish();
}

}  // namespace

const std::vector<std::string>& verify_suite_names() {
    static const std::vector<std::string> names{
        "coeff-identities", "exact-small-horizon", "return-tail-srw",
        "return-tail-map",  "return-tail-uniformity",       "zeros-scaling",
        "zeros-distribution", "limit-means",       "quadrature-identity",
        "embedding-identities", "return-dichotomy", "determinism",
    };
    return names;
}

bool is_verify_suite(const std::string& name) {
    const auto& names = verify_suite_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

CriterionResult run_verify_suite(const std::string& name,
                                 const VerifyOptions& options) {
    if (name == "coeff-identities") return coeff_identities(options);
    if (name == "exact-small-horizon") return exact_small_horizon(options);
    if (name == "return-tail-srw") return return_tail_srw(options);
    if (name == "return-tail-map") return return_tail_map(options);
    if (name == "return-tail-uniformity") return return_tail_uniformity(options);
    if (name == "zeros-scaling") return zeros_scaling(options);
    if (name == "zeros-distribution") return zeros_distribution(options);
    if (name == "limit-means") return limit_means(options);
    if (name == "quadrature-identity") return quadrature_identity(options);
    if (name == "embedding-identities") return embedding_identities(options);
    if (name == "return-dichotomy") return return_dichotomy(options);
    if (name == "determinism") return determinism(options);
    throw std::invalid_argument("unknown verify suite: " + name);
}

std::vector<CriterionResult> run_all_verify_suites(const VerifyOptions& options) {
    std::vector<CriterionResult> results;
    for (const auto& name : verify_suite_names()) {
        results.push_back(run_verify_suite(name, options));
    }
    return results;
}

}  // namespace erw
