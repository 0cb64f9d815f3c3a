#include "convarb/models.hpp"

#include "models_internal.hpp"

#include <cmath>

namespace convarb {

using namespace detail;

DecomposedPath model_deterministic_h(const DeterministicHParams& p, const GridSpec& g, std::uint64_t seed) {
    const double T = g.horizon;
    DecomposedPath path;
    path.grid = make_grid(T, g.n_steps);
    const TimeGrid& grid = path.grid;
    allocate(path);
    path.meta.model = "deterministic_h";
    path.meta.prices_may_be_negative = true;

    const IncrementPath dB = brownian_increments(grid, derive_seed(seed, kDriver1));
    const std::size_t n = grid.steps();
    const double erT = std::exp(p.r * T);
    path.X[0] = p.x0;
    path.Y[0] = p.y0;
    std::vector<double> v(n, 0.0);
    bool absorbed = false;
    for (std::size_t i = 0; i < n; ++i) {
        const double ert = std::exp(p.r * grid.points[i]);
        path.h[i] = 1.0 + ert - erT;
        if (absorbed) {
            path.X[i + 1] = path.X[i];
            path.Y[i + 1] = path.Y[i];
            continue;
        }
        const double dt = grid.dt(i);
        const double m = path.X[i] - p.x0;
        path.MX.increments[i] = dB.values[i];
        path.MX.qv[i] = dt;
        path.X[i + 1] = path.X[i] + dB.values[i];
        v[i] = m * (-p.r * ert) * dt;
        path.M1.increments[i] = path.h[i] * path.MX.increments[i];
        path.M1.qv[i] = path.h[i] * path.h[i] * path.MX.qv[i];
        path.Y[i + 1] = path.Y[i] + v[i] + path.M1.increments[i];
        if (path.X[i + 1] <= 0.0) {
            absorbed = true;
            path.meta.absorption_point = i + 1;
        }
    }
    path.MX.qv_continuous = path.MX.qv;
    path.M1.qv_continuous = path.M1.qv;
    jordan(v, path.dA, path.da);
    return path;
}

}  // namespace convarb
