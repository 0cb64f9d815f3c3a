#include "convarb/models.hpp"

#include "convarb/error.hpp"
#include "models_internal.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

namespace convarb {

const char* to_string(SimulationMode m) {
    return m == SimulationMode::analytic ? "analytic" : "euler";
}

SimulationMode simulation_mode_from_string(std::string_view s) {
    if (s == "analytic") return SimulationMode::analytic;
    if (s == "euler") return SimulationMode::euler;
    throw DomainError("unknown simulation mode '" + std::string(s) + "' (expected analytic or euler)");
}

std::vector<double> MartingalePart::continuous_increments() const {
    std::vector<double> out = increments;
    for (const Jump& j : jumps) out[j.step] -= j.size;
    return out;
}

std::optional<std::size_t> PathMetadata::event(std::string_view name) const {
    for (const auto& e : events) {
        if (e.name == name) return e.point;
    }
    return std::nullopt;
}

DiscreteMeasure DecomposedPath::qv_MY() const {
    DiscreteMeasure out(steps());
    for (std::size_t i = 0; i < steps(); ++i) out[i] = M1.qv[i] + M2.qv[i];
    return out;
}

DiscreteMeasure DecomposedPath::dVY() const {
    DiscreteMeasure out(steps());
    for (std::size_t i = 0; i < steps(); ++i) out[i] = dA[i] - da[i];
    return out;
}

InvariantReport check_invariants(const DecomposedPath& p, double tol) {
    InvariantReport r;
    auto fail = [&](std::string msg) {
        r.ok = false;
        r.failures.push_back(std::move(msg));
    };
    const std::size_t n = p.steps();
    auto sized = [&](std::size_t got, std::size_t want, const char* what) {
        if (got != want) fail(std::string(what) + " has the wrong length");
        return got == want;
    };
    bool shapes = sized(p.X.size(), n + 1, "X") & sized(p.Y.size(), n + 1, "Y") &
                  sized(p.dJX.size(), n, "dJX") & sized(p.dWX.size(), n, "dWX") &
                  sized(p.MX.increments.size(), n, "dMX") & sized(p.h.size(), n, "h") &
                  sized(p.M1.increments.size(), n, "dM1") & sized(p.M2.increments.size(), n, "dM2") &
                  sized(p.dA.size(), n, "dA") & sized(p.da.size(), n, "da") &
                  sized(p.MX.qv.size(), n, "dQV_MX") & sized(p.M1.qv.size(), n, "dQV_M1") &
                  sized(p.M2.qv.size(), n, "dQV_M2") & sized(p.dJY.size(), n, "dJY");
    if (!shapes) return r;

    double scale = 1.0;
    for (double v : p.X) scale = std::max(scale, std::abs(v));
    for (double v : p.Y) scale = std::max(scale, std::abs(v));
    const double eps = tol * scale;

    for (std::size_t i = 0; i < n; ++i) {
        const double dx = p.X[i + 1] - p.X[i];
        if (std::abs(dx - (p.dJX[i] + p.dWX[i] + p.MX.increments[i])) > eps) {
            fail("X price consistency fails at step " + std::to_string(i));
            break;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double dy = p.Y[i + 1] - p.Y[i];
        if (std::abs(dy - (p.dA[i] - p.da[i] + p.M1.increments[i] + p.M2.increments[i])) > eps) {
            fail("Y price consistency fails at step " + std::to_string(i));
            break;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (p.M1.increments[i] != p.h[i] * p.MX.increments[i]) {
            fail("dM1 != h dMX at step " + std::to_string(i));
            break;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (p.M1.qv[i] != p.h[i] * p.h[i] * p.MX.qv[i]) {
            fail("d<M1> != h^2 d<M^X> at step " + std::to_string(i));
            break;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (p.MX.qv[i] < 0.0 || p.M1.qv[i] < 0.0 || p.M2.qv[i] < 0.0 || p.dA[i] < 0.0 || p.da[i] < 0.0) {
            fail("negative increasing-process mass at step " + std::to_string(i));
            break;
        }
    }
    if (!is_orthogonal(p.dA, p.da, 0.0)) fail("dA and da are not orthogonal");
    if (!p.meta.normal_form_violated && !p.meta.single_asset) {
        const DiscreteMeasure qv = p.qv_MY();
        const double ref_tol = default_tol(qv);
        for (std::size_t i = 0; i < n; ++i) {
            // Predictable jumps declared in dJY are the singular part and exempt.
            if (p.dA[i] > eps && qv[i] <= ref_tol && p.dJY[i] == 0.0) {
                fail("dA charges a d<M^Y>-null cell at step " + std::to_string(i));
                break;
            }
        }
    }
    if (!p.meta.prices_may_be_negative) {
        for (std::size_t j = 0; j <= n; ++j) {
            if (p.X[j] < 0.0 || p.Y[j] < 0.0) {
                fail("negative price at point " + std::to_string(j));
                break;
            }
        }
    }
    if (p.horizon_is_convergence && p.X.back() != p.Y.back()) fail("X_T != Y_T on a converging model");
    return r;
}

// ---------------------------------------------------------------------------
// Closed forms

double hitting_cdf(double t, double barrier, double sigma) {
    if (t <= 0.0) return 0.0;
    return std::erfc(barrier / (sigma * std::sqrt(2.0 * t)));
}

double hitting_prob_remaining(double u, double t, double horizon, double barrier, double sigma) {
    if (u >= barrier) return 1.0;
    const double tau = horizon - t;
    if (tau <= 0.0) return 0.0;
    return std::erfc((barrier - u) / (sigma * std::sqrt(2.0 * tau)));
}

double hitting_prob_remaining_du(double u, double t, double horizon, double barrier, double sigma) {
    const double tau = horizon - t;
    if (u >= barrier || tau <= 0.0) return 0.0;
    const double s = sigma * std::sqrt(2.0 * tau);
    const double z = (barrier - u) / s;
    return 2.0 / std::sqrt(std::numbers::pi) * std::exp(-z * z) / s;
}

double survival_ratio(double cdf_at_horizon, double cdf_at_s) {
    return (1.0 - cdf_at_horizon) / (1.0 - cdf_at_s);
}

namespace {

// e^{x^2} erfc(x) for x >= 0.
constexpr double kAsymptoticFrom = 8.0;

// 1 - x sqrt(pi) erfcx(x) by its asymptotic series, valid for x >= kAsymptoticFrom
double erfcx_defect(double x) {
    const double u = 1.0 / (2.0 * x * x);
    double term = -u, sum = 0.0;
    for (int k = 1; k < 60 && std::abs(term) > 1e-18 * std::abs(sum); ++k) {
        sum -= term;
        term *= -(2.0 * k + 1.0) * u;
    }
    return sum;
}

double erfcx(double x) {
    if (x < kAsymptoticFrom) return std::exp(x * x) * std::erfc(x);
    return (1.0 - erfcx_defect(x)) / (x * std::sqrt(std::numbers::pi));
}

}  // namespace

double random_barrier_survival(double t, double kappa) {
    if (t <= 0.0) return 1.0;
    return erfcx(kappa * std::sqrt(0.5 * t));
}

double random_barrier_intensity(double t, double kappa) {
    if (t <= 0.0) return std::numeric_limits<double>::infinity();
    const double x = kappa * std::sqrt(0.5 * t);
    if (x >= kAsymptoticFrom) {
        const double d = erfcx_defect(x);
        return 0.5 * kappa * kappa * d / (1.0 - d);
    }
    return kappa / (std::sqrt(2.0 * std::numbers::pi * t) * erfcx(x)) - 0.5 * kappa * kappa;
}

std::vector<double> riccati_gain(const TimeGrid& grid) {
    auto f = [](double p) { return 1.0 - p * p; };
    std::vector<double> gain(grid.points.size());
    gain[0] = 0.0;
    for (std::size_t i = 0; i < grid.steps(); ++i) {
        const double h = grid.dt(i);
        const double p = gain[i];
        const double k1 = f(p);
        const double k2 = f(p + 0.5 * h * k1);
        const double k3 = f(p + 0.5 * h * k2);
        const double k4 = f(p + h * k3);
        gain[i + 1] = p + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return gain;
}

double bridge_integrand_energy(const TimeGrid& grid, std::span<const double> bridge, double eps) {
    if (bridge.size() != grid.points.size()) throw DomainError("bridge_integrand_energy: size mismatch");
    const double horizon = grid.horizon();
    const std::size_t stop = grid.index_of(horizon - eps);
    const double terminal = bridge.back();
    double energy = 0.0;
    for (std::size_t i = 0; i < stop; ++i) {
        const double g = std::max(terminal - bridge[i], 0.0) / (horizon - grid.points[i]);
        energy += g * g * grid.dt(i);
    }
    return energy;
}

// ---------------------------------------------------------------------------
// Catalog

const std::vector<ModelInfo>& model_catalog() {
    static const std::vector<ModelInfo> catalog = {
        {"two_defaults", "structure conditions: two Brownian default times",
         "payoff 1{theta1>T} + 1{theta2<=T} priced in two filtrations; Y jumps up at theta2",
         {{"sigma1", 1.0, "> 0"}, {"sigma2", 1.0, "> 0"}, {"barrier1", 1.0, "> 0"}, {"barrier2", 1.0, "> 0"}},
         true},
        {"random_barrier", "structure conditions: hitting time of a random barrier",
         "X = X0 E(-H); in the insider filtration X grows while B stays below its running maximum",
         {{"barrier_rate", 1.0, "> 0"}, {"x0", 1.0, "> 0"}},
         false},
        {"survival_claim", "null orthogonal martingale: survival claim",
         "X, Y = 1{tau>t} exp(-lambda (T-t)) with investor-specific constant intensities",
         {{"lambda_x", 0.1, "> 0"}, {"lambda_y", 0.2, "> 0"}},
         true},
        {"predictable_default_variant", "null orthogonal martingale: predictable default variant",
         "tau predictable for the insider; Y is predictable of finite variation",
         {{"lambda_y", 0.5, "> 0"}, {"barrier", 1.0, "> 0"}, {"sigma", 1.0, "> 0"}},
         true},
        {"insider_defaultable", "similar risk attitudes: insider defaultable asset",
         "payoff 1{tau>T} E(B)_T; the insider knows B_T and tau",
         {{"lambda", 0.1, "> 0"}},
         true},
        {"risk_attitudes", "different risk attitudes in the two markets",
         "X = X0 + B, Y = E^{Q^Y}[X_T | G_t] with an Ornstein-Uhlenbeck market price of risk",
         {{"rho", -0.5, "[-1, 1]"}, {"x0", 1.0, "> 0"}},
         false},
        {"filtering", "filtering model with vanishing noise",
         "Y = Kalman-Bucy estimate of a Brownian X, revealed exactly at T",
         {{"x0", 0.0, "real"}},
         true},
        {"deterministic_h", "null orthogonal martingale: deterministic h example",
         "Y = Y0 + int M f d<M> + int h dM with h = 1 + exp(rt) - exp(rT)",
         {{"r", 1.0, "> 0"}, {"x0", 1.0, "> 0"}, {"y0", 1.0, "real"}},
         false},
    };
    return catalog;
}

const ModelInfo& model_info(std::string_view name) {
    for (const auto& m : model_catalog()) {
        if (m.name == name) return m;
    }
    std::string known;
    for (const auto& m : model_catalog()) known += (known.empty() ? "" : ", ") + m.name;
    throw DomainError("unknown model '" + std::string(name) + "'; catalog: " + known);
}

std::map<std::string, double> resolve_params(const ModelConfig& cfg) {
    const ModelInfo& info = model_info(cfg.name);
    if (!(cfg.grid.horizon > 0.0) || !std::isfinite(cfg.grid.horizon)) throw DomainError("grid horizon must be > 0");
    if (cfg.grid.n_steps < 1) throw DomainError("grid n_steps must be >= 1");
    std::map<std::string, double> out;
    for (const auto& p : info.params) out[p.name] = p.default_value;
    for (const auto& [k, v] : cfg.params) {
        if (!out.contains(k)) throw DomainError("model " + cfg.name + " has no parameter '" + k + "'");
        if (!std::isfinite(v)) throw DomainError("parameter " + k + " must be finite");
        out[k] = v;
    }
    for (const auto& p : info.params) {
        const double v = out[p.name];
        if (p.domain == "> 0" && !(v > 0.0)) throw DomainError("parameter " + p.name + " must be > 0");
        if (p.domain == "[-1, 1]" && !(v >= -1.0 && v <= 1.0)) throw DomainError("parameter " + p.name + " must lie in [-1, 1]");
    }
    return out;
}

DecomposedPath simulate(const ModelConfig& cfg, std::uint64_t path_index) {
    using detail::param;
    const auto p = resolve_params(cfg);
    const std::uint64_t seed = derive_seed(cfg.seed, path_index);
    if (cfg.name == "two_defaults") {
        return model_two_defaults({param(p, "sigma1"), param(p, "sigma2"), param(p, "barrier1"), param(p, "barrier2")},
                                  cfg.grid, seed, cfg.mode);
    }
    if (cfg.name == "random_barrier") {
        return model_random_barrier({param(p, "barrier_rate"), param(p, "x0")}, cfg.grid, seed, cfg.mode);
    }
    if (cfg.name == "survival_claim") {
        return model_survival_claim({param(p, "lambda_x"), param(p, "lambda_y")}, cfg.grid, seed, cfg.mode);
    }
    if (cfg.name == "predictable_default_variant") {
        return model_predictable_default_variant({param(p, "lambda_y"), param(p, "barrier"), param(p, "sigma")},
                                                 cfg.grid, seed, cfg.mode);
    }
    if (cfg.name == "insider_defaultable") return model_insider_defaultable({param(p, "lambda")}, cfg.grid, seed);
    if (cfg.name == "risk_attitudes") return model_risk_attitudes({param(p, "rho"), param(p, "x0")}, cfg.grid, seed);
    if (cfg.name == "filtering") return model_filtering({param(p, "x0")}, cfg.grid, seed);
    if (cfg.name == "deterministic_h") {
        return model_deterministic_h({param(p, "r"), param(p, "x0"), param(p, "y0")}, cfg.grid, seed);
    }
    throw DomainError("unknown model '" + cfg.name + "'");
}

}  // namespace convarb
