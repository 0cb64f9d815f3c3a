#include "convarb/models.hpp"

#include "models_internal.hpp"

#include <cmath>

namespace convarb {

using namespace detail;

DecomposedPath model_survival_claim(const SurvivalClaimParams& p, const GridSpec& g, std::uint64_t seed,
                                    SimulationMode mode) {
    const double T = g.horizon;
    const double lx = p.lambda_x, ly = p.lambda_y;
    const std::optional<double> tau = sample_default_time(lx, T, derive_seed(seed, kDefault));

    DecomposedPath path;
    std::vector<double> events;
    if (tau && mode == SimulationMode::analytic) events.push_back(*tau);
    path.grid = make_grid(T, g.n_steps, events);
    const TimeGrid& grid = path.grid;
    allocate(path);
    path.meta.model = "survival_claim";
    path.meta.mode = mode;
    path.horizon_is_convergence = true;

    std::size_t death = grid.points.size();
    if (tau) {
        const std::size_t j = grid.index_at_or_before(*tau);
        death = grid.points[j] == *tau ? j : j + 1;
        if (death < grid.points.size()) path.meta.events.push_back({"tau", death});
    }

    const std::size_t np = grid.points.size();
    for (std::size_t j = 0; j < np; ++j) {
        const double rem = T - grid.points[j];
        path.X[j] = j < death ? std::exp(-lx * rem) : 0.0;
        path.Y[j] = j < death ? std::exp(-ly * rem) : 0.0;
    }

    const std::size_t n = grid.steps();
    std::vector<double> v(n, 0.0);
    for (std::size_t i = 0; i < n && i < death; ++i) {
        const double rem = T - grid.points[i + 1];
        const double x_pre = std::exp(-lx * rem);
        const double y_pre = std::exp(-ly * rem);
        const double dt = grid.dt(i);
        v[i] = (ly - lx) / ly * (y_pre - path.Y[i]);
        const double dmx = path.X[i + 1] - path.X[i];
        const double dmy = (path.Y[i + 1] - path.Y[i]) - v[i];
        path.MX.increments[i] = dmx;
        path.MX.qv[i] = path.X[i] * path.X[i] * lx * dt;
        path.h[i] = dmx != 0.0 ? dmy / dmx : path.Y[i] / path.X[i];
        path.M1.increments[i] = path.h[i] * dmx;
        path.M1.qv[i] = path.h[i] * path.h[i] * path.MX.qv[i];
        if (i + 1 == death) {
            path.MX.jumps.push_back({i, -x_pre});
            path.M1.jumps.push_back({i, -path.h[i] * x_pre});
        }
    }
    jordan(v, path.dA, path.da);
    return path;
}

}  // namespace convarb
