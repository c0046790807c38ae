#include "erw/walk.hpp"

#include <stdexcept>
#include <string>

namespace erw {

namespace {

void require_even_start(std::int64_t k) {
    if (k < 0 || (k & 1)) {
        throw std::invalid_argument("restart time k must be even and >= 0, got " +
                                    std::to_string(k));
    }
}

// Step-up probability at absolute time t from position s; t = 0 is the fair
// opening step.
inline double up_prob(const MemoryParam& p, std::int64_t t, std::int64_t s) {
    if (t == 0) return 0.5;
    return 0.5 + p.two_p_minus_one() * static_cast<double>(s) /
                     (2.0 * static_cast<double>(t));
}

}  // namespace

double step_probability(const MemoryParam& p, std::int64_t n, std::int64_t s) {
    if (n < 1) throw std::invalid_argument("step_probability needs n >= 1");
    if (s > n || -s > n) {
        throw std::invalid_argument("position |s| must not exceed the time n");
    }
    return up_prob(p, n, s);
}

WalkPath simulate_path(const MemoryParam& p, std::int64_t start_time,
                       std::int64_t steps, Philox& rng, SimMode mode) {
    require_even_start(start_time);
    if (steps < 0) throw std::invalid_argument("steps must be >= 0");
    if (mode == SimMode::memory && start_time != 0) {
        throw std::invalid_argument(
            "memory mode keeps the full step history and is defined from k = 0 only");
    }

    WalkPath path;
    path.start_time = start_time;
    path.positions.reserve(static_cast<std::size_t>(steps) + 1);
    path.positions.push_back(0);

    if (mode == SimMode::marginal) {
        std::int64_t s = 0;
        for (std::int64_t m = 0; m < steps; ++m) {
            const double q = up_prob(p, start_time + m, s);
            s += (rng.uniform01() < q) ? 1 : -1;
            path.positions.push_back(static_cast<std::int32_t>(s));
            if (s == 0) path.zero_indices.push_back(m + 1);
        }
    } else {
        std::vector<std::int8_t> history;
        history.reserve(static_cast<std::size_t>(steps));
        std::int64_t s = 0;
        for (std::int64_t m = 0; m < steps; ++m) {
            std::int8_t step;
            if (m == 0) {
                step = (rng.uniform01() < 0.5) ? 1 : -1;
            } else {
                const std::int8_t recalled =
                    history[rng.uniform_below(static_cast<std::uint64_t>(m))];
                const bool repeat = rng.uniform01() < p.value();
                step = repeat ? recalled : static_cast<std::int8_t>(-recalled);
            }
            history.push_back(step);
            s += step;
            path.positions.push_back(static_cast<std::int32_t>(s));
            if (s == 0) path.zero_indices.push_back(m + 1);
        }
    }
    return path;
}

std::int64_t count_zeros(const WalkPath& path, std::int64_t horizon) {
    if (horizon < 0 ||
        horizon >= static_cast<std::int64_t>(path.positions.size())) {
        throw std::invalid_argument("horizon exceeds the path length");
    }
    std::int64_t count = 0;
    for (const std::int64_t m : path.zero_indices) {
        if (m > horizon) break;
        ++count;
    }
    return count;
}

ReturnSample first_return(const MemoryParam& p, std::int64_t start_time,
                          std::int64_t cap, Philox& rng) {
    require_even_start(start_time);
    if (cap < 2) throw std::invalid_argument("first_return needs cap >= 2");

    std::int64_t s = 0;
    for (std::int64_t m = 0; m < cap; ++m) {
        const double q = up_prob(p, start_time + m, s);
        s += (rng.uniform01() < q) ? 1 : -1;
        if (s == 0) return ReturnSample{m + 1, cap, false};
    }
    return ReturnSample{cap, cap, true};
}

std::vector<std::int64_t> zeros_enumeration(const WalkPath& path) {
    std::vector<std::int64_t> zeta;
    zeta.reserve(path.zero_indices.size() + 1);
    zeta.push_back(path.start_time);
    for (const std::int64_t m : path.zero_indices) {
        zeta.push_back(path.start_time + m);
    }
    return zeta;
}

std::int64_t simulate_zero_count(const MemoryParam& p, std::int64_t start_time,
                                 std::int64_t steps, Philox& rng) {
    require_even_start(start_time);
    std::int64_t s = 0;
    std::int64_t count = 0;
    for (std::int64_t m = 0; m < steps; ++m) {
        const double q = up_prob(p, start_time + m, s);
        s += (rng.uniform01() < q) ? 1 : -1;
        count += (s == 0);
    }
    return count;
}

ZeroTimes simulate_zeros_until(const MemoryParam& p, std::int64_t start_time,
                               std::int64_t target, std::int64_t horizon,
                               Philox& rng) {
    require_even_start(start_time);
    ZeroTimes out;
    if (target <= 0) {
        out.complete = true;
        return out;
    }
    out.times.reserve(static_cast<std::size_t>(target));
    std::int64_t s = 0;
    for (std::int64_t m = 0; m < horizon; ++m) {
        const double q = up_prob(p, start_time + m, s);
        s += (rng.uniform01() < q) ? 1 : -1;
        if (s == 0) {
            out.times.push_back(m + 1);
            if (static_cast<std::int64_t>(out.times.size()) == target) {
                out.complete = true;
                return out;
            }
        }
    }
    return out;
}

}  // namespace erw
