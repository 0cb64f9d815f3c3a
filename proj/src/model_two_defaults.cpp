#include "convarb/models.hpp"

#include "models_internal.hpp"

#include <array>
#include <cmath>

namespace convarb {

using namespace detail;

DecomposedPath model_two_defaults(const TwoDefaultsParams& p, const GridSpec& g, std::uint64_t seed,
                                  SimulationMode mode) {
    const double T = g.horizon;
    HittingDriver d1, d2;
    d1.level = p.barrier1 / p.sigma1;
    d2.level = p.barrier2 / p.sigma2;

    std::vector<double> events;
    if (mode == SimulationMode::analytic) {
        Engine e1(derive_seed(seed, kHittingTime1));
        Engine e2(derive_seed(seed, kHittingTime2));
        const double t1 = sample_hitting_time(d1.level, e1);
        const double t2 = sample_hitting_time(d2.level, e2);
        if (t1 <= T) {
            d1.hit_time = t1;
            for (double t : announced_event_times(t1, T)) events.push_back(t);
        }
        if (t2 <= T) {
            d2.hit_time = t2;
            for (double t : announced_event_times(t2, T)) events.push_back(t);
        }
    }

    DecomposedPath path;
    path.grid = make_grid(T, g.n_steps, events);
    const TimeGrid& grid = path.grid;
    Engine w1(derive_seed(seed, kDriver1));
    Engine w2(derive_seed(seed, kDriver2));
    realize_driver(d1, grid, mode, w1);
    realize_driver(d2, grid, mode, w2);

    std::vector<std::size_t> announcing;
    if (d1.announcing_point) announcing.push_back(*d1.announcing_point);
    if (d2.announcing_point) announcing.push_back(*d2.announcing_point);
    std::array<HittingDriver*, 2> drivers{&d1, &d2};
    apply_left_limits(drivers, announcing);

    allocate(path);
    path.meta.model = "two_defaults";
    path.meta.mode = mode;
    path.meta.announcing_points = announcing;
    if (d1.hit_point) path.meta.events.push_back({"theta1", *d1.hit_point});
    if (d2.hit_point) path.meta.events.push_back({"theta2", *d2.hit_point});
    path.horizon_is_convergence = true;

    const double c1T = hitting_cdf(T, p.barrier1, p.sigma1);
    const double c2T = hitting_cdf(T, p.barrier2, p.sigma2);
    const std::size_t np = grid.points.size();
    std::vector<double> R1(np), R2(np), P2(np), Q1(np);
    std::vector<double> price_time = grid.points;
    for (std::size_t a : announcing) price_time[a] = grid.points[a + 1];
    for (std::size_t j = 0; j < np; ++j) {
        const double t = price_time[j];
        R1[j] = survival_ratio(c1T, hitting_cdf(t, p.barrier1, p.sigma1));
        R2[j] = survival_ratio(c2T, hitting_cdf(t, p.barrier2, p.sigma2));
        P2[j] = d2.alive_at(j) ? hitting_prob_remaining(p.sigma2 * d2.w[j], t, T, p.barrier2, p.sigma2) : 1.0;
        Q1[j] = d1.alive_at(j) ? 1.0 - hitting_prob_remaining(p.sigma1 * d1.w[j], t, T, p.barrier1, p.sigma1) : 0.0;
        path.X[j] = (d1.alive_at(j) ? R1[j] : 0.0) + P2[j];
        path.Y[j] = Q1[j] + (1.0 - (d2.alive_at(j) ? R2[j] : 0.0));
    }

    auto is_announcing = [&](std::size_t i) {
        for (std::size_t a : announcing) {
            if (a == i) return true;
        }
        return false;
    };

    const std::size_t n = grid.steps();
    std::vector<double> v(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = price_time[i];
        const double dt = grid.dt(i);
        if (d1.alive_at(i)) {
            path.dWX[i] = R1[i + 1] - R1[i];
            if (!d1.alive_at(i + 1)) path.dJX[i] = -R1[i + 1];
        }
        path.MX.increments[i] = (path.X[i + 1] - path.X[i]) - path.dJX[i] - path.dWX[i];
        if (d2.alive_at(i) && !is_announcing(i)) {
            const double g2 = hitting_prob_remaining_du(p.sigma2 * d2.w[i], t, T, p.barrier2, p.sigma2) * p.sigma2;
            path.MX.qv[i] = g2 * g2 * dt;
        }

        if (d2.alive_at(i)) {
            v[i] = -(R2[i + 1] - R2[i]);
            if (!d2.alive_at(i + 1)) {
                v[i] += R2[i + 1];
                path.dJY[i] = R2[i + 1];
            }
        }
        path.M2.increments[i] = (path.Y[i + 1] - path.Y[i]) - v[i];
        if (d1.alive_at(i) && !is_announcing(i)) {
            const double g1 = hitting_prob_remaining_du(p.sigma1 * d1.w[i], t, T, p.barrier1, p.sigma1) * p.sigma1;
            path.M2.qv[i] = g1 * g1 * dt;
        }
    }
    jordan(v, path.dA, path.da);
    path.MX.qv_continuous = path.MX.qv;
    path.M2.qv_continuous = path.M2.qv;
    return path;
}

}  // namespace convarb
