#include "convarb/models.hpp"

#include "models_internal.hpp"

#include <cmath>

namespace convarb {

using namespace detail;

DecomposedPath model_filtering(const FilteringParams& p, const GridSpec& g, std::uint64_t seed) {
    const double T = g.horizon;
    const std::vector<double> announce{T - kAnnounceGap * T};
    DecomposedPath path;
    path.grid = make_grid(T, g.n_steps, announce);
    const TimeGrid& grid = path.grid;
    allocate(path);
    const std::size_t n = grid.steps();
    path.meta.model = "filtering";
    path.meta.prices_may_be_negative = true;
    path.meta.announcing_points = {n - 1};
    path.meta.events.push_back({"reveal", n});
    path.horizon_is_convergence = true;

    const IncrementPath dB = brownian_increments(grid, derive_seed(seed, kDriver1));
    const IncrementPath dW = brownian_increments(grid, derive_seed(seed, kDriver2));
    const std::vector<double> psi = riccati_gain(grid);

    path.X[0] = p.x0;
    path.Y[0] = p.x0;
    std::vector<double> v(n, 0.0);
    path.innovations.resize(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double dt = grid.dt(i);
        path.MX.increments[i] = dB.values[i];
        path.MX.qv[i] = dt;
        path.X[i + 1] = path.X[i] + dB.values[i];

        path.innovations[i] = (path.X[i] - path.Y[i]) * dt + dW.values[i];
        v[i] = psi[i] * (path.X[i] - path.Y[i]) * dt;
        path.M2.increments[i] = psi[i] * dW.values[i];
        path.M2.qv[i] = psi[i] * psi[i] * dt;
        path.Y[i + 1] = path.Y[i] + v[i] + path.M2.increments[i];
    }
    path.X[n] = path.X[n - 1];
    path.Y[n] = path.X[n];
    v[n - 1] = path.Y[n] - path.Y[n - 1];
    path.dJY[n - 1] = v[n - 1];

    path.MX.qv_continuous = path.MX.qv;
    path.M2.qv_continuous = path.M2.qv;
    jordan(v, path.dA, path.da);
    return path;
}

}  // namespace convarb
