#include "convarb/models.hpp"

#include "models_internal.hpp"

#include <cmath>

namespace convarb {

using namespace detail;

DecomposedPath model_insider_defaultable(const InsiderParams& p, const GridSpec& g, std::uint64_t seed) {
    const double T = g.horizon;
    const std::optional<double> tau = sample_default_time(p.lambda, T, derive_seed(seed, kDefault));
    Engine terminal_eng(derive_seed(seed, kTerminal));
    const double BT = std::normal_distribution<double>(0.0, std::sqrt(T))(terminal_eng);

    DecomposedPath path;
    std::vector<double> events;
    if (tau) events.push_back(*tau);
    path.grid = make_grid(T, g.n_steps, events);
    const TimeGrid& grid = path.grid;
    allocate(path);
    path.meta.model = "insider_defaultable";
    path.meta.normal_form_violated = true;
    path.horizon_is_convergence = true;

    const IncrementPath dB = brownian_bridge_increments(grid, BT, derive_seed(seed, kDriver1));
    std::vector<double> B = cumulative(0.0, dB.values);
    B.back() = BT;

    const std::size_t np = grid.points.size();
    const std::size_t death = tau ? grid.index_of(*tau) : np;
    if (tau) path.meta.events.push_back({"tau", death});
    const double terminal_exp = std::exp(BT - 0.5 * T);
    const bool survives = !tau;
    for (std::size_t j = 0; j < np; ++j) {
        const double t = grid.points[j];
        path.X[j] = j < death ? std::exp(-p.lambda * (T - t)) * terminal_exp : 0.0;
        path.Y[j] = survives ? std::exp(B[j] - 0.5 * t) : 0.0;
    }

    const std::size_t n = grid.steps();
    std::vector<double> v(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        path.dJX[i] = path.X[i + 1] - path.X[i];
        if (!survives) continue;
        const double dt = grid.dt(i);
        v[i] = path.Y[i] * (BT - B[i]) / (T - grid.points[i]) * dt;
        path.M2.increments[i] = (path.Y[i + 1] - path.Y[i]) - v[i];
        path.M2.qv[i] = path.Y[i] * path.Y[i] * dt;
    }
    path.M2.qv_continuous = path.M2.qv;
    jordan(v, path.dA, path.da);
    return path;
}

}  // namespace convarb
