#include "convarb/models.hpp"

#include "models_internal.hpp"

#include <algorithm>
#include <cmath>

namespace convarb {

using namespace detail;

DecomposedPath model_random_barrier(const RandomBarrierParams& p, const GridSpec& g, std::uint64_t seed,
                                    SimulationMode mode) {
    const double kappa = p.barrier_rate;
    DecomposedPath path;
    path.grid = make_grid(g.horizon, g.n_steps);
    const TimeGrid& grid = path.grid;
    allocate(path);
    path.meta.model = "random_barrier";
    path.meta.mode = mode;
    path.meta.single_asset = true;
    path.meta.normal_form_violated = true;

    Engine barrier_eng(derive_seed(seed, kBarrier));
    const double D = std::exponential_distribution<double>(kappa)(barrier_eng);
    const IncrementPath dB = brownian_increments(grid, derive_seed(seed, kDriver1));
    Engine max_eng(derive_seed(seed, kSecondary));
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    const std::size_t n = grid.steps();
    path.X[0] = p.x0;
    double b = 0.0, S = 0.0;
    bool alive = true;
    for (std::size_t i = 0; i < n; ++i) {
        if (!alive) continue;
        const double dt = grid.dt(i);
        const double b_next = b + dB.values[i];
        double step_max = std::max(b, b_next);
        if (mode == SimulationMode::analytic) {
            double u = 0.0;
            while (u == 0.0) u = unif(max_eng);
            const double db = b_next - b;
            step_max = 0.5 * (b + b_next + std::sqrt(db * db - 2.0 * dt * std::log(u)));
        }
        const double S_next = std::max(S, step_max);
        const bool defaults = S_next >= D;
        const double dS = (defaults ? D : S_next) - S;

        const double G1 = random_barrier_survival(grid.points[i + 1], kappa);
        const double x = path.X[i];
        const double pre = p.x0 / G1;
        path.dJX[i] = pre - x;
        path.dWX[i] = -x * kappa * dS;
        path.MX.qv[i] = x * x * kappa * dS;
        path.X[i + 1] = defaults ? 0.0 : pre;
        path.MX.increments[i] = (path.X[i + 1] - x) - path.dJX[i] - path.dWX[i];
        if (defaults) {
            path.MX.jumps.push_back({i, -pre});
            path.meta.events.push_back({"default", i + 1});
            alive = false;
        }
        b = b_next;
        S = S_next;
    }

    path.Y = path.X;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        path.h[i] = 1.0;
        path.M1.increments[i] = path.MX.increments[i];
        path.M1.qv[i] = path.MX.qv[i];
        v[i] = path.dJX[i] + path.dWX[i];
        path.dJY[i] = path.dJX[i];
    }
    path.M1.jumps = path.MX.jumps;
    jordan(v, path.dA, path.da);
    return path;
}

}  // namespace convarb
