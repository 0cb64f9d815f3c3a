#include "models_internal.hpp"

#include "convarb/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace convarb::detail {

double sample_hitting_time(double level, Engine& eng) {
    std::normal_distribution<double> normal;
    double z = 0.0;
    while (z == 0.0) z = normal(eng);
    return level * level / (z * z);
}

std::vector<double> path_hitting_at(std::span<const double> times, double theta, double level, Engine& eng) {
    std::normal_distribution<double> normal;
    const std::size_t n = times.size();
    std::vector<double> w(n);
    // R_s = |3-d bridge from 0 (s = 0) to (level, 0, 0) (s = theta)|, W_t = level - R_{theta - t}.
    std::array<double, 3> x{0.0, 0.0, 0.0};
    const std::array<double, 3> end{level, 0.0, 0.0};
    double s_prev = 0.0;
    for (std::size_t k = n; k-- > 0;) {
        const double s = theta - times[k];
        if (k == 0) {
            w[0] = 0.0;
            break;
        }
        if (s > s_prev) {
            const double ds = s - s_prev;
            const double rem = theta - s_prev;
            const double sd = std::sqrt(ds * (theta - s) / rem);
            for (int c = 0; c < 3; ++c) x[c] += ds / rem * (end[c] - x[c]) + sd * normal(eng);
            s_prev = s;
        }
        w[k] = level - std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    }
    return w;
}

std::vector<double> path_staying_below(const TimeGrid& grid, double level, Engine& eng) {
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> w(grid.points.size());
    constexpr int kMaxAttempts = 1'000'000;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        w[0] = 0.0;
        double survive = 1.0;
        bool ok = true;
        for (std::size_t i = 0; i < grid.steps() && ok; ++i) {
            const double dt = grid.dt(i);
            w[i + 1] = w[i] + std::sqrt(dt) * normal(eng);
            if (w[i + 1] >= level) {
                ok = false;
                break;
            }
            survive *= 1.0 - std::exp(-2.0 * (level - w[i]) * (level - w[i + 1]) / dt);
        }
        if (ok && unif(eng) < survive) return w;
    }
    throw DomainError("path_staying_below: barrier too close, conditioning rejected every sample");
}

std::vector<double> announced_event_times(double theta, double horizon) {
    double gap = kAnnounceGap * horizon;
    if (theta - gap <= 0.0) gap = 0.5 * theta;
    return {theta - gap, theta};
}

void realize_driver(HittingDriver& d, const TimeGrid& grid, SimulationMode mode, Engine& eng) {
    const std::size_t n = grid.points.size();
    d.hit_point.reset();
    d.announcing_point.reset();
    if (mode == SimulationMode::euler) {
        std::normal_distribution<double> normal;
        d.w.assign(n, 0.0);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            d.w[i + 1] = d.w[i] + std::sqrt(grid.dt(i)) * normal(eng);
            if (!d.hit_point && d.w[i + 1] >= d.level) d.hit_point = i + 1;
        }
        return;
    }
    if (!d.hit_time) {
        d.w = path_staying_below(grid, d.level, eng);
        return;
    }
    const std::size_t hit = grid.index_of(*d.hit_time);
    d.hit_point = hit;
    d.announcing_point = hit - 1;
    std::span<const double> head(grid.points.data(), hit + 1);
    d.w = path_hitting_at(head, *d.hit_time, d.level, eng);
    d.w[hit] = d.level;
    d.w.resize(n, d.level);
}

void apply_left_limits(std::span<HittingDriver*> drivers, std::span<const std::size_t> announcing_points) {
    for (std::size_t a : announcing_points) {
        for (HittingDriver* d : drivers) d->w[a] = d->w[a + 1];
    }
}

void jordan(std::span<const double> v, DiscreteMeasure& dA, DiscreteMeasure& da) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        dA[i] = v[i] > 0.0 ? v[i] : 0.0;
        da[i] = v[i] < 0.0 ? -v[i] : 0.0;
    }
}

void allocate(DecomposedPath& p) {
    const std::size_t n = p.grid.steps();
    p.X.assign(n + 1, 0.0);
    p.Y.assign(n + 1, 0.0);
    p.dJX = DiscreteMeasure(n);
    p.dWX = DiscreteMeasure(n);
    p.MX = MartingalePart(n);
    p.h.assign(n, 0.0);
    p.M1 = MartingalePart(n);
    p.M2 = MartingalePart(n);
    p.dA = DiscreteMeasure(n);
    p.da = DiscreteMeasure(n);
    p.dJY = DiscreteMeasure(n);
}

double param(const std::map<std::string, double>& params, const char* name) {
    auto it = params.find(name);
    if (it == params.end()) throw DomainError(std::string("missing parameter ") + name);
    return it->second;
}

}  // namespace convarb::detail
