// erwlab: reproducible campaigns over the elephant-walk laboratory.
// Every replicate r of a campaign with master seed s runs on the RNG
// stream (s, r), so output files are byte-identical for any --threads.
// Exit codes: 0 ok, 1 verification failure, 2 usage error, 3 resource
// limit.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "erw/coeffs.hpp"
#include "erw/embedding.hpp"
#include "erw/errors.hpp"
#include "erw/exact.hpp"
#include "erw/limits.hpp"
#include "erw/parallel.hpp"
#include "erw/report.hpp"
#include "erw/stats.hpp"
#include "erw/verify.hpp"
#include "erw/walk.hpp"

namespace {

struct CommonOptions {
    double p = 0.5;
    std::int64_t k = 0;
    std::uint64_t seed = 12345;
    unsigned threads = 0;
    std::string out = "-";
    std::string format = "csv";
    bool demo_mode = false;  // admit p >= 3/4 for the transience demo
};

void add_common(CLI::App* cmd, CommonOptions& opt, bool with_p = true) {
    if (with_p) {
        cmd->add_option("--p", opt.p, "memory parameter in [0, 3/4)")->required();
    }
    cmd->add_option("--k", opt.k, "restart time (even)");
    cmd->add_option("--seed", opt.seed, "master seed");
    cmd->add_option("--threads", opt.threads,
                    "worker count (0 = ERWLAB_THREADS or hardware)");
    cmd->add_option("--out", opt.out, "output path ('-' = stdout)");
    cmd->add_option("--format", opt.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_flag("--demo-mode", opt.demo_mode,
                  "admit p >= 3/4 (qualitative transience demo)");
}

erw::ReportFormat parse_format(const std::string& format) {
    return format == "json" ? erw::ReportFormat::json : erw::ReportFormat::csv;
}

void emit(const erw::Report& report, const CommonOptions& opt, double wall_s) {
    if (opt.out == "-") {
        erw::write_report(report, parse_format(opt.format), std::cout);
    } else {
        std::ofstream out(opt.out, std::ios::binary);
        if (!out) throw std::invalid_argument("cannot open output path " + opt.out);
        erw::write_report(report, parse_format(opt.format), out);
    }
    std::cerr << "# threads=" << erw::resolve_threads(opt.threads)
              << " wall_time_s=" << wall_s << "\n";
}

std::string fmt_i(std::int64_t v) { return std::to_string(v); }
std::string fmt_u(std::uint64_t v) { return std::to_string(v); }

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

// ---------------------------------------------------------------- simulate
int cmd_simulate(const CommonOptions& opt, std::int64_t steps,
                 std::uint64_t replicates, const std::string& mode) {
    Stopwatch watch;
    const erw::MemoryParam p(opt.p, opt.demo_mode);
    const erw::SimMode sim_mode =
        mode == "memory" ? erw::SimMode::memory : erw::SimMode::marginal;

    const auto rows = erw::map_replicates<std::vector<double>>(
        opt.seed, replicates, opt.threads,
        [&](std::uint64_t r, erw::Philox& rng) -> std::vector<double> {
            const erw::WalkPath path =
                erw::simulate_path(p, opt.k, steps, rng, sim_mode);
            const double zeros = static_cast<double>(path.zero_indices.size());
            const double last_zero =
                path.zero_indices.empty()
                    ? -1.0
                    : static_cast<double>(path.zero_indices.back());
            return {static_cast<double>(r),
                    static_cast<double>(path.positions.back()), zeros, last_zero};
        });

    erw::Report report;
    report.command = "simulate";
    report.config = {{"p", erw::format_double(opt.p)},
                     {"k", fmt_i(opt.k)},
                     {"steps", fmt_i(steps)},
                     {"replicates", fmt_u(replicates)},
                     {"mode", mode},
                     {"seed", fmt_u(opt.seed)},
                     {"format", opt.format}};
    report.columns = {"replicate", "final_position", "zeros", "last_zero"};
    report.rows = rows;
    double mean_pos = 0, mean_zeros = 0;
    for (const auto& row : rows) {
        mean_pos += row[1];
        mean_zeros += row[2];
    }
    const auto n = static_cast<double>(rows.size());
    report.summary = {{"mean_final_position", mean_pos / n},
                      {"mean_zeros", mean_zeros / n}};
    emit(report, opt, watch.seconds());
    return 0;
}

// ------------------------------------------------------------------- zeros
int cmd_zeros(const CommonOptions& opt, std::int64_t n, std::uint64_t replicates,
              bool skip_exact) {
    Stopwatch watch;
    const erw::MemoryParam p(opt.p, opt.demo_mode);
    if (opt.k != 0) throw std::invalid_argument("zeros campaign runs from k = 0");
    const erw::ZeroScaling z = erw::zeros_scaling_statistic(
        p, n, replicates, opt.seed, opt.threads, !skip_exact && n <= (1 << 14));

    const double root_n = std::sqrt(static_cast<double>(n));
    const auto counts = erw::map_replicates<double>(
        opt.seed, replicates, opt.threads, [&](std::uint64_t, erw::Philox& rng) {
            return static_cast<double>(erw::simulate_zero_count(p, 0, n, rng));
        });

    erw::Report report;
    report.command = "zeros";
    report.config = {{"p", erw::format_double(opt.p)},
                     {"n", fmt_i(n)},
                     {"replicates", fmt_u(replicates)},
                     {"seed", fmt_u(opt.seed)},
                     {"format", opt.format}};
    report.columns = {"replicate", "zeros", "scaled"};
    report.rows.reserve(counts.size());
    for (std::size_t r = 0; r < counts.size(); ++r) {
        report.rows.push_back(
            {static_cast<double>(r), counts[r], counts[r] / root_n});
    }
    report.summary = {{"mean_scaled", z.mc_mean},
                      {"se_scaled", z.mc_se},
                      {"limit_mean", erw::mean_H(p, 1.0)}};
    if (z.exact) report.summary.emplace_back("exact_scaled", *z.exact);
    emit(report, opt, watch.seconds());
    return 0;
}

// ------------------------------------------------------------- return-tail
int cmd_return_tail(const CommonOptions& opt, std::int64_t cap,
                    std::uint64_t replicates, std::vector<std::int64_t> grid) {
    Stopwatch watch;
    const erw::MemoryParam p(opt.p, opt.demo_mode);
    if (grid.empty()) {
        for (std::int64_t n = 2; n < cap; n *= 2) grid.push_back(n);
        grid.push_back(cap);
    }

    const auto samples = erw::map_replicates<erw::ReturnSample>(
        opt.seed, replicates, opt.threads, [&](std::uint64_t, erw::Philox& rng) {
            return erw::first_return(p, opt.k, cap, rng);
        });
    erw::TailEstimate est = erw::survival_curve(samples, grid);

    std::ostringstream grid_str;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid_str << (i ? "," : "") << grid[i];
    }

    erw::Report report;
    report.command = "return-tail";
    report.config = {{"p", erw::format_double(opt.p)},
                     {"k", fmt_i(opt.k)},
                     {"cap", fmt_i(cap)},
                     {"replicates", fmt_u(replicates)},
                     {"grid", grid_str.str()},
                     {"seed", fmt_u(opt.seed)},
                     {"format", opt.format}};
    report.columns = {"n", "survival", "se"};
    for (std::size_t i = 0; i < est.n_grid.size(); ++i) {
        report.rows.push_back({static_cast<double>(est.n_grid[i]), est.survival[i],
                               est.se[i]});
    }
    report.summary = {{"censored_fraction", est.censored_fraction}};

    std::size_t usable = 0;
    for (std::size_t i = 0; i < est.n_grid.size(); ++i) {
        usable += est.n_grid[i] < cap && est.survival[i] > 0.0;
    }
    if (usable >= 4) {
        const auto [slope, slope_se] =
            erw::fit_tail_exponent(est, grid.front(), grid.back());
        report.summary.emplace_back("slope", slope);
        report.summary.emplace_back("slope_se", slope_se);
        report.summary.emplace_back("slope_limit", 2.0 * opt.p - 1.5);
    }
    if (opt.p > 0.0 || opt.k >= 2) {
        const erw::CoeffSequence coeffs(p, static_cast<std::size_t>(opt.k + cap) + 2);
        const auto stat = erw::return_tail_statistic(
            coeffs, opt.k, cap, est.censored_fraction,
            std::sqrt(est.censored_fraction * (1.0 - est.censored_fraction) /
                      static_cast<double>(replicates)));
        report.summary.emplace_back("tail_statistic", stat.value);
        report.summary.emplace_back("tail_statistic_se", stat.se);
        report.summary.emplace_back("tail_statistic_limit", std::sqrt(2.0 / 3.14159265358979323846));
    }
    emit(report, opt, watch.seconds());
    return 0;
}

// ------------------------------------------------------------------- exact
int cmd_exact(const CommonOptions& opt, std::int64_t horizon, bool killed) {
    Stopwatch watch;
    const erw::MemoryParam p(opt.p, opt.demo_mode);
    const erw::ExactTable table = erw::exact_table(p, opt.k, horizon, killed, 0);

    erw::Report report;
    report.command = "exact";
    report.config = {{"p", erw::format_double(opt.p)},
                     {"k", fmt_i(opt.k)},
                     {"horizon", fmt_i(horizon)},
                     {"killed", killed ? "true" : "false"},
                     {"seed", fmt_u(opt.seed)},
                     {"format", opt.format}};
    if (killed) {
        report.columns = {"m", "survival"};
        for (std::int64_t m = 0; m <= horizon; ++m) {
            report.rows.push_back({static_cast<double>(m),
                                   table.survival()[static_cast<std::size_t>(m)]});
        }
        report.summary = {{"expected_return_capped", table.expected_return_capped()}};
    } else {
        report.columns = {"m", "zero_mass", "expected_zeros"};
        for (std::int64_t m = 0; m <= horizon; ++m) {
            report.rows.push_back({static_cast<double>(m),
                                   table.zero_mass()[static_cast<std::size_t>(m)],
                                   table.expected_zeros(m)});
        }
        report.summary = {
            {"expected_zeros", table.expected_zeros(horizon)},
            {"scaled_zeros",
             table.expected_zeros(horizon) / std::sqrt(static_cast<double>(horizon))}};
    }
    emit(report, opt, watch.seconds());
    return 0;
}

// ------------------------------------------------------------------- embed
int cmd_embed(const CommonOptions& opt, std::int64_t steps,
              std::uint64_t replicates, double divisor, double floor_fraction) {
    Stopwatch watch;
    const erw::MemoryParam p(opt.p, opt.demo_mode);
    erw::CoeffSequence coeffs(p, static_cast<std::size_t>(opt.k + steps) + 2);
    erw::GridTuning tuning;
    tuning.divisor = divisor;
    tuning.floor_fraction = floor_fraction;

    const auto rows = erw::map_replicates<std::vector<double>>(
        opt.seed, replicates, opt.threads,
        [&](std::uint64_t r, erw::Philox& rng) -> std::vector<double> {
            const erw::EmbeddedPath path =
                erw::sample_embedded_path(coeffs, opt.k, steps, rng, tuning);
            return {static_cast<double>(r), path.times.back(),
                    path.compensator.back(), path.values.back()};
        });

    erw::Report report;
    report.command = "embed";
    report.config = {{"p", erw::format_double(opt.p)},
                     {"k", fmt_i(opt.k)},
                     {"steps", fmt_i(steps)},
                     {"replicates", fmt_u(replicates)},
                     {"divisor", erw::format_double(divisor)},
                     {"floor_fraction", erw::format_double(floor_fraction)},
                     {"seed", fmt_u(opt.seed)},
                     {"format", opt.format}};
    report.columns = {"replicate", "T_n", "V_n", "M_n"};
    report.rows = rows;
    double mean_t = 0, mean_v = 0;
    for (const auto& row : rows) {
        mean_t += row[1];
        mean_v += row[2];
    }
    const auto n = static_cast<double>(rows.size());
    mean_t /= n;
    mean_v /= n;
    const double target = coeffs.A(static_cast<std::size_t>(opt.k + steps)) -
                          coeffs.A(static_cast<std::size_t>(opt.k));
    report.summary = {{"mean_T", mean_t},
                      {"mean_V", mean_v},
                      {"target_A_diff", target},
                      {"clock_defect", mean_t + mean_v - target}};
    emit(report, opt, watch.seconds());
    return 0;
}

// ------------------------------------------------------------------- limit
int cmd_limit(const CommonOptions& opt, double t, std::uint64_t replicates,
              double grid_step, const std::string& what) {
    Stopwatch watch;
    const erw::MemoryParam p(opt.p, opt.demo_mode);
    const auto values = erw::map_replicates<double>(
        opt.seed, replicates, opt.threads, [&](std::uint64_t, erw::Philox& rng) {
            if (what == "lambda") return erw::sample_stable_half(t, rng);
            if (what == "eta") return erw::sample_eta(p, t, grid_step, rng);
            return erw::sample_H(p, t, grid_step, rng).h_value;
        });

    erw::Report report;
    report.command = "limit";
    report.config = {{"p", erw::format_double(opt.p)},
                     {"t", erw::format_double(t)},
                     {"replicates", fmt_u(replicates)},
                     {"grid_step", erw::format_double(grid_step)},
                     {"what", what},
                     {"seed", fmt_u(opt.seed)},
                     {"format", opt.format}};
    report.columns = {"replicate", "value"};
    for (std::size_t r = 0; r < values.size(); ++r) {
        report.rows.push_back({static_cast<double>(r), values[r]});
    }
    double sum = 0, sum2 = 0;
    for (const double v : values) {
        sum += v;
        sum2 += v * v;
    }
    const auto n = static_cast<double>(values.size());
    const double mean = sum / n;
    report.summary = {{"mean", mean},
                      {"se", std::sqrt(std::max(0.0, sum2 / n - mean * mean) / n)}};
    if (what == "H") report.summary.emplace_back("closed_form_mean", erw::mean_H(p, t));
    emit(report, opt, watch.seconds());
    return 0;
}

// ------------------------------------------------------------------ verify
int cmd_verify(const std::vector<std::string>& suites, std::uint64_t seed,
               unsigned threads, const std::string& out,
               const std::string& cli_path) {
    erw::VerifyOptions options;
    options.seed = seed;
    options.threads = threads;
    options.cli_path = cli_path;

    std::vector<std::string> names;
    if (suites.empty() || (suites.size() == 1 && suites[0] == "all")) {
        names = erw::verify_suite_names();
    } else {
        for (const auto& s : suites) {
            if (!erw::is_verify_suite(s)) {
                throw std::invalid_argument("unknown verify suite: " + s);
            }
            names.push_back(s);
        }
    }

    bool all_pass = true;
    nlohmann::ordered_json jcriteria = nlohmann::ordered_json::array();
    for (const auto& name : names) {
        const erw::CriterionResult result = erw::run_verify_suite(name, options);
        all_pass = all_pass && result.pass;
        std::cout << (result.pass ? "[PASS] " : "[FAIL] ") << result.name << " ("
                  << result.seconds << " s)\n";
        nlohmann::ordered_json jchecks = nlohmann::ordered_json::array();
        for (const auto& check : result.checks) {
            std::cout << "  " << (check.pass ? "ok   " : "FAIL ") << check.name
                      << ": " << check.detail << "\n";
            jchecks.push_back({{"name", check.name},
                               {"pass", check.pass},
                               {"detail", check.detail}});
        }
        jcriteria.push_back({{"name", result.name},
                             {"pass", result.pass},
                             {"seconds", result.seconds},
                             {"checks", jchecks}});
    }
    if (!out.empty()) {
        nlohmann::ordered_json j{{"artifact", erw::kArtifactName},
                                 {"version", erw::kArtifactVersion},
                                 {"seed", seed},
                                 {"pass", all_pass},
                                 {"criteria", jcriteria}};
        std::ofstream f(out, std::ios::binary);
        if (!f) throw std::invalid_argument("cannot open output path " + out);
        f << j.dump(2) << "\n";
    }
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"elephant random walk laboratory"};
    app.require_subcommand(1);
    // flags override config-file values override defaults
    app.set_config("--config");

    CommonOptions opt;

    auto* simulate = app.add_subcommand("simulate", "sample walk paths");
    simulate->configurable();
    std::int64_t steps = 1024;
    std::uint64_t replicates = 1000;
    std::string mode = "marginal";
    add_common(simulate, opt);
    simulate->add_option("--steps", steps, "steps per path")->required();
    simulate->add_option("--replicates", replicates, "paths to sample");
    simulate->add_option("--mode", mode, "marginal or memory")
        ->check(CLI::IsMember({"marginal", "memory"}));

    auto* zeros = app.add_subcommand("zeros", "zero-count scaling campaign");
    zeros->configurable();
    std::int64_t zeros_n = 4096;
    std::uint64_t zeros_reps = 10'000;
    bool skip_exact = false;
    add_common(zeros, opt);
    zeros->add_option("--n", zeros_n, "horizon")->required();
    zeros->add_option("--replicates", zeros_reps, "paths to sample");
    zeros->add_flag("--skip-exact", skip_exact, "skip the exact DP companion");

    auto* tail = app.add_subcommand("return-tail", "first-return survival campaign");
    tail->configurable();
    std::int64_t cap = 4096;
    std::uint64_t tail_reps = 100'000;
    std::string grid_arg;
    add_common(tail, opt);
    tail->add_option("--cap", cap, "censoring cap")->required();
    tail->add_option("--replicates", tail_reps, "return samples");
    tail->add_option("--grid", grid_arg, "comma-separated n grid (default dyadic)");

    auto* exact = app.add_subcommand("exact", "exact DP distribution table");
    exact->configurable();
    std::int64_t horizon = 1024;
    bool killed = false;
    add_common(exact, opt);
    exact->add_option("--horizon", horizon, "table horizon")->required();
    exact->add_flag("--killed", killed, "kill mass at the origin (survival table)");

    auto* embed = app.add_subcommand("embed", "Brownian embedding campaign");
    embed->configurable();
    std::int64_t embed_steps = 256;
    std::uint64_t embed_reps = 1000;
    double divisor = 400.0, floor_fraction = 0.05;
    add_common(embed, opt);
    embed->add_option("--steps", embed_steps, "embedded steps")->required();
    embed->add_option("--replicates", embed_reps, "paths to sample");
    embed->add_option("--divisor", divisor, "grid step divisor");
    embed->add_option("--floor", floor_fraction, "grid step floor fraction");

    auto* limit = app.add_subcommand("limit", "limit-process sampling campaign");
    limit->configurable();
    double limit_t = 1.0, grid_step = 1e-3;
    std::uint64_t limit_reps = 10'000;
    std::string what = "H";
    add_common(limit, opt);
    limit->add_option("--t", limit_t, "time argument");
    limit->add_option("--replicates", limit_reps, "samples");
    limit->add_option("--grid-step", grid_step, "local-time grid step");
    limit->add_option("--what", what, "H, eta, or lambda")
        ->check(CLI::IsMember({"H", "eta", "lambda"}));

    auto* verify = app.add_subcommand("verify", "run named verification suites");
    std::vector<std::string> suites;
    std::uint64_t verify_seed = 20250811;
    unsigned verify_threads = 0;
    std::string verify_out;
    verify->add_option("suites", suites, "suite names or 'all'");
    verify->add_option("--seed", verify_seed, "master seed");
    verify->add_option("--threads", verify_threads, "worker count");
    verify->add_option("--out", verify_out, "write a JSON report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(opt, steps, replicates, mode);
        if (zeros->parsed()) return cmd_zeros(opt, zeros_n, zeros_reps, skip_exact);
        if (tail->parsed()) {
            std::vector<std::int64_t> grid;
            if (!grid_arg.empty()) {
                std::istringstream in(grid_arg);
                std::string token;
                while (std::getline(in, token, ',')) grid.push_back(std::stoll(token));
            }
            return cmd_return_tail(opt, cap, tail_reps, std::move(grid));
        }
        if (exact->parsed()) return cmd_exact(opt, horizon, killed);
        if (embed->parsed()) {
            return cmd_embed(opt, embed_steps, embed_reps, divisor, floor_fraction);
        }
        if (limit->parsed()) return cmd_limit(opt, limit_t, limit_reps, grid_step, what);
        if (verify->parsed()) {
            return cmd_verify(suites, verify_seed, verify_threads, verify_out, argv[0]);
        }
    } catch (const erw::ResourceError& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
