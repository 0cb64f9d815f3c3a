#include "convarb/simkernel.hpp"

#include "convarb/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

namespace convarb {

std::size_t TimeGrid::index_of(double t) const {
    auto it = std::lower_bound(points.begin(), points.end(), t);
    if (it == points.end() || *it != t) {
        throw DomainError("time " + std::to_string(t) + " is not a grid point");
    }
    return static_cast<std::size_t>(it - points.begin());
}

std::size_t TimeGrid::index_at_or_before(double t) const {
    auto it = std::upper_bound(points.begin(), points.end(), t);
    if (it == points.begin()) return 0;
    return static_cast<std::size_t>(it - points.begin()) - 1;
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t counter, std::uint64_t stream) {
    return mix64(mix64(mix64(base) ^ counter) ^ (stream * 0xd6e8feb86659fd93ULL));
}

TimeGrid make_grid(double horizon, std::size_t n_steps, std::span<const double> event_times) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("make_grid: horizon must be > 0");
    if (n_steps < 1) throw DomainError("make_grid: n_steps must be >= 1");
    TimeGrid grid;
    grid.points.reserve(n_steps + 1 + event_times.size());
    for (std::size_t i = 0; i <= n_steps; ++i) {
        grid.points.push_back(i == n_steps ? horizon
                                           : horizon * static_cast<double>(i) / static_cast<double>(n_steps));
    }
    for (double t : event_times) {
        if (!(t > 0.0 && t <= horizon)) {
            throw DomainError("make_grid: event time " + std::to_string(t) + " outside (0, horizon]");
        }
        grid.points.push_back(t);
        grid.event_times.push_back(t);
    }
    std::sort(grid.points.begin(), grid.points.end());
    grid.points.erase(std::unique(grid.points.begin(), grid.points.end()), grid.points.end());
    std::sort(grid.event_times.begin(), grid.event_times.end());
    grid.event_times.erase(std::unique(grid.event_times.begin(), grid.event_times.end()),
                           grid.event_times.end());
    return grid;
}

IncrementPath brownian_increments(const TimeGrid& grid, std::uint64_t seed) {
    Engine eng(seed);
    std::normal_distribution<double> normal;
    IncrementPath out;
    out.values.resize(grid.steps());
    for (std::size_t i = 0; i < grid.steps(); ++i) {
        out.values[i] = std::sqrt(grid.dt(i)) * normal(eng);
    }
    return out;
}

IncrementPath brownian_bridge_increments(const TimeGrid& grid, double terminal_value,
                                         std::uint64_t seed) {
    Engine eng(seed);
    std::normal_distribution<double> normal;
    const double horizon = grid.horizon();
    const std::size_t n = grid.steps();
    IncrementPath out;
    out.values.resize(n);
    double level = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double remaining = horizon - grid.points[i];
        const double dt = grid.dt(i);
        const double mean = dt / remaining * (terminal_value - level);
        const double var = dt * (horizon - grid.points[i + 1]) / remaining;
        const double inc = mean + std::sqrt(var) * normal(eng);
        out.values[i] = inc;
        level += inc;
    }
    out.values[n - 1] = terminal_value - level;
    return out;
}

std::vector<double> ou_path(const TimeGrid& grid, double drift_coeff, const IncrementPath& driving,
                            double initial) {
    if (driving.values.size() != grid.steps()) {
        throw DomainError("ou_path: driving increments do not match the grid");
    }
    std::vector<double> w(grid.points.size());
    w[0] = initial;
    for (std::size_t i = 0; i < grid.steps(); ++i) {
        w[i + 1] = w[i] + drift_coeff * w[i] * grid.dt(i) + driving.values[i];
    }
    return w;
}

std::vector<double> doleans_exponential(const JumpMarkedPath& z, const IncrementPath& qv_continuous) {
    const auto& dz = z.continuous_part.values;
    if (qv_continuous.values.size() != dz.size()) {
        throw DomainError("doleans_exponential: quadratic variation does not match the path");
    }
    std::vector<double> jump_at(dz.size(), 0.0);
    for (const Jump& j : z.jumps) {
        if (j.step >= dz.size()) throw DomainError("doleans_exponential: jump index out of range");
        jump_at[j.step] += j.size;
    }
    std::vector<double> out(dz.size() + 1);
    out[0] = 1.0;
    // The log of the continuous factor is accumulated separately so a path that
    // returns to Z = 0, <Z> = 0 reproduces exp(0) = 1 without drift from rounding.
    double log_cont = 0.0;
    double jump_factor = 1.0;
    for (std::size_t i = 0; i < dz.size(); ++i) {
        log_cont += dz[i] - 0.5 * qv_continuous.values[i];
        jump_factor *= 1.0 + jump_at[i];
        out[i + 1] = jump_factor == 0.0 ? 0.0 : jump_factor * std::exp(log_cont);
    }
    return out;
}

namespace {

double exponential_draw(std::uint64_t seed) {
    Engine eng(seed);
    std::exponential_distribution<double> expo(1.0);
    return expo(eng);
}

}  // namespace

std::optional<double> sample_default_time(const std::function<double(double)>& intensity,
                                          double horizon, std::uint64_t seed) {
    if (!(horizon > 0.0)) throw DomainError("sample_default_time: horizon must be > 0");
    auto checked = [&](double t) {
        const double v = intensity(t);
        if (v < 0.0 || std::isnan(v)) throw DomainError("sample_default_time: negative intensity");
        return v;
    };
    auto hazard = [&](double t) {
        if (t <= 0.0) return 0.0;
        return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(checked, 0.0, t, 8, 1e-13);
    };
    const double target = exponential_draw(seed);
    const double total = hazard(horizon);
    if (total < target) return std::nullopt;
    std::uintmax_t max_iter = 200;
    auto [lo, hi] = boost::math::tools::toms748_solve(
        [&](double t) { return hazard(t) - target; }, 0.0, horizon, -target, total - target,
        boost::math::tools::eps_tolerance<double>(52), max_iter);
    return 0.5 * (lo + hi);
}

std::optional<double> sample_default_time(double rate, double horizon, std::uint64_t seed) {
    if (rate < 0.0) throw DomainError("sample_default_time: negative intensity");
    if (!(horizon > 0.0)) throw DomainError("sample_default_time: horizon must be > 0");
    const double target = exponential_draw(seed);
    if (rate * horizon < target) return std::nullopt;
    return target / rate;
}

std::vector<double> cumulative(double initial, std::span<const double> increments) {
    std::vector<double> out(increments.size() + 1);
    out[0] = initial;
    for (std::size_t i = 0; i < increments.size(); ++i) out[i + 1] = out[i] + increments[i];
    return out;
}

}  // namespace convarb
