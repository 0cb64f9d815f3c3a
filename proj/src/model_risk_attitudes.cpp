#include "convarb/models.hpp"

#include "models_internal.hpp"

#include <algorithm>
#include <cmath>

namespace convarb {

using namespace detail;

DecomposedPath model_risk_attitudes(const RiskAttitudesParams& p, const GridSpec& g, std::uint64_t seed) {
    const double T = g.horizon;
    const double rho = p.rho;
    const double rho_c = std::sqrt(std::max(0.0, 1.0 - rho * rho));

    DecomposedPath path;
    path.grid = make_grid(T, g.n_steps);
    const TimeGrid& grid = path.grid;
    allocate(path);
    path.meta.model = "risk_attitudes";
    path.meta.prices_may_be_negative = true;

    const IncrementPath dB = brownian_increments(grid, derive_seed(seed, kDriver1));
    const IncrementPath dbeta = brownian_increments(grid, derive_seed(seed, kDriver2));
    IncrementPath driving;
    driving.values.resize(grid.steps());
    for (std::size_t i = 0; i < grid.steps(); ++i) driving.values[i] = rho * dB.values[i] + rho_c * dbeta.values[i];
    const std::vector<double> W = ou_path(grid, rho, driving, 0.0);

    const std::size_t n = grid.steps();
    path.X[0] = p.x0;
    path.Y[0] = p.x0;
    std::vector<double> v(n, 0.0);
    bool absorbed = false;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = grid.points[i];
        path.h[i] = 1.0 - rho * (T - t);
        if (absorbed) {
            path.X[i + 1] = path.X[i];
            path.Y[i + 1] = path.Y[i];
            continue;
        }
        const double dt = grid.dt(i);
        path.MX.increments[i] = dB.values[i];
        path.MX.qv[i] = dt;
        path.X[i + 1] = path.X[i] + dB.values[i];

        v[i] = path.h[i] * W[i] * dt;
        path.M1.increments[i] = path.h[i] * path.MX.increments[i];
        path.M1.qv[i] = path.h[i] * path.h[i] * path.MX.qv[i];
        const double k = rho_c * (T - t);
        path.M2.increments[i] = -k * dbeta.values[i];
        path.M2.qv[i] = k * k * dt;
        path.Y[i + 1] = path.Y[i] + v[i] + path.M1.increments[i] + path.M2.increments[i];

        if (path.X[i + 1] <= 0.0) {
            absorbed = true;
            path.meta.absorption_point = i + 1;
        }
    }
    path.MX.qv_continuous = path.MX.qv;
    path.M1.qv_continuous = path.M1.qv;
    path.M2.qv_continuous = path.M2.qv;
    jordan(v, path.dA, path.da);
    return path;
}

}  // namespace convarb
