#include "convarb/models.hpp"

#include "models_internal.hpp"

#include <array>
#include <cmath>

namespace convarb {

using namespace detail;

DecomposedPath model_predictable_default_variant(const PredictableDefaultParams& p, const GridSpec& g,
                                                 std::uint64_t seed, SimulationMode mode) {
    const double T = g.horizon;
    HittingDriver d;
    d.level = p.barrier / p.sigma;
    std::vector<double> events;
    if (mode == SimulationMode::analytic) {
        Engine e(derive_seed(seed, kHittingTime1));
        const double theta = sample_hitting_time(d.level, e);
        if (theta <= T) {
            d.hit_time = theta;
            events = announced_event_times(theta, T);
        }
    }

    DecomposedPath path;
    path.grid = make_grid(T, g.n_steps, events);
    const TimeGrid& grid = path.grid;
    Engine w(derive_seed(seed, kDriver1));
    realize_driver(d, grid, mode, w);
    std::vector<std::size_t> announcing;
    if (d.announcing_point) announcing.push_back(*d.announcing_point);
    std::array<HittingDriver*, 1> drivers{&d};
    apply_left_limits(drivers, announcing);

    allocate(path);
    path.meta.model = "predictable_default_variant";
    path.meta.mode = mode;
    path.meta.normal_form_violated = true;
    path.meta.announcing_points = announcing;
    if (d.hit_point) path.meta.events.push_back({"tau", *d.hit_point});
    path.horizon_is_convergence = true;

    const std::size_t np = grid.points.size();
    std::vector<double> price_time = grid.points;
    for (std::size_t a : announcing) price_time[a] = grid.points[a + 1];
    for (std::size_t j = 0; j < np; ++j) {
        const double t = price_time[j];
        const bool alive = d.alive_at(j);
        path.X[j] = alive ? 1.0 - hitting_prob_remaining(p.sigma * d.w[j], t, T, p.barrier, p.sigma) : 0.0;
        path.Y[j] = alive ? std::exp(-p.lambda_y * (T - t)) : 0.0;
    }

    const std::size_t n = grid.steps();
    std::vector<double> v(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        path.MX.increments[i] = path.X[i + 1] - path.X[i];
        const bool alive = d.alive_at(i);
        if (alive && (announcing.empty() || announcing[0] != i)) {
            const double gx = hitting_prob_remaining_du(p.sigma * d.w[i], price_time[i], T, p.barrier, p.sigma) * p.sigma;
            path.MX.qv[i] = gx * gx * grid.dt(i);
        }
        v[i] = path.Y[i + 1] - path.Y[i];
        if (alive && !d.alive_at(i + 1)) {
            const double y_pre = std::exp(-p.lambda_y * (T - grid.points[i + 1]));
            path.dJY[i] = -y_pre;
        }
    }
    path.MX.qv_continuous = path.MX.qv;
    jordan(v, path.dA, path.da);
    return path;
}

}  // namespace convarb
