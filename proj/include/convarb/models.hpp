#pragma once

#include "convarb/measurecalc.hpp"
#include "convarb/simkernel.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace convarb {

/// analytic: event times sampled exactly and inserted into the grid; predictable
/// events get an announcing node carrying the left-limit prices, so the step into
/// the event holds the jump only.
/// euler: events are monitored on the uniform grid; no announcing nodes.
enum class SimulationMode { analytic, euler };

const char* to_string(SimulationMode m);
SimulationMode simulation_mode_from_string(std::string_view s);

/// Martingale increments with marked jumps and brackets.
struct MartingalePart {
    std::vector<double> increments;  // per step, jumps included
    std::vector<Jump> jumps;         // marked jumps, contained in increments
    DiscreteMeasure qv;              // predictable quadratic variation d<M>
    DiscreteMeasure qv_continuous;   // d<M^c>

    explicit MartingalePart(std::size_t n = 0)
        : increments(n, 0.0), qv(n), qv_continuous(n) {}
    std::vector<double> continuous_increments() const;
};

struct NamedEvent {
    std::string name;
    std::size_t point;  // grid index where the event takes effect
};

struct PathMetadata {
    std::string model;
    SimulationMode mode = SimulationMode::analytic;
    bool normal_form_violated = false;  // dA is not absolutely continuous w.r.t. d<M^Y>
    bool single_asset = false;          // Y mirrors X
    bool prices_may_be_negative = false;
    std::vector<NamedEvent> events;
    std::vector<std::size_t> announcing_points;
    std::optional<std::size_t> absorption_point;

    std::optional<std::size_t> event(std::string_view name) const;
};

/// One sampled trajectory of (X, Y) carrying every increment the analyzer needs.
///   X_{i+1} - X_i = dJX_i + dWX_i + dMX_i
///   Y_{i+1} - Y_i = dA_i - da_i + dM1_i + dM2_i,   dM1_i = h_i dMX_i
struct DecomposedPath {
    TimeGrid grid;
    std::vector<double> X, Y;  // per grid point
    DiscreteMeasure dJX;       // singular predictable FV part of X
    DiscreteMeasure dWX;       // absolutely continuous drift of X
    MartingalePart MX;
    std::vector<double> h;     // predictable integrand of M1 against M^X
    MartingalePart M1, M2;
    DiscreteMeasure dA, da;    // Jordan parts of V^Y
    DiscreteMeasure dJY;       // declared singular part of V^Y
    std::vector<double> innovations;  // filtering: observation innovations per pre-reveal step
    bool horizon_is_convergence = false;
    PathMetadata meta;

    std::size_t steps() const { return grid.steps(); }
    DiscreteMeasure qv_MY() const;  // d<M1> + d<M2>
    DiscreteMeasure dVY() const;    // dA - da
};

struct InvariantReport {
    bool ok = true;
    std::vector<std::string> failures;
};

/// Checks every DecomposedPath invariant; tol is relative to each series' scale.
InvariantReport check_invariants(const DecomposedPath& path, double tol = 1e-9);

// ---------------------------------------------------------------------------
// Configuration

struct GridSpec {
    double horizon = 1.0;
    std::size_t n_steps = 200;
};

struct ModelConfig {
    std::string name;
    std::map<std::string, double> params;  // missing entries take the model defaults
    GridSpec grid;
    std::uint64_t seed = 0;
    SimulationMode mode = SimulationMode::analytic;
};

struct ParamDomain {
    std::string name;
    double default_value;
    std::string domain;  // human readable
};

struct ModelInfo {
    std::string name;
    std::string reference;  // where the example economy comes from
    std::string summary;
    std::vector<ParamDomain> params;
    bool converging;
};

/// Stable-ordered catalog of the shipped models.
const std::vector<ModelInfo>& model_catalog();
const ModelInfo& model_info(std::string_view name);

/// Resolves defaults and validates every parameter; throws DomainError.
std::map<std::string, double> resolve_params(const ModelConfig& cfg);

/// Dispatch by name. Path i uses streams derived from (seed, i).
DecomposedPath simulate(const ModelConfig& cfg, std::uint64_t path_index);

// ---------------------------------------------------------------------------
// Individual models

struct TwoDefaultsParams {
    double sigma1 = 1.0, sigma2 = 1.0;    // volatilities of the threshold drivers
    double barrier1 = 1.0, barrier2 = 1.0;
};
DecomposedPath model_two_defaults(const TwoDefaultsParams& p, const GridSpec& g, std::uint64_t seed,
                                  SimulationMode mode);

struct RandomBarrierParams {
    double barrier_rate = 1.0;  // D ~ Exp(barrier_rate)
    double x0 = 1.0;
};
DecomposedPath model_random_barrier(const RandomBarrierParams& p, const GridSpec& g, std::uint64_t seed,
                                    SimulationMode mode);

struct SurvivalClaimParams {
    double lambda_x = 0.1, lambda_y = 0.2;
};
DecomposedPath model_survival_claim(const SurvivalClaimParams& p, const GridSpec& g, std::uint64_t seed,
                                    SimulationMode mode);

struct PredictableDefaultParams {
    double lambda_y = 0.5;
    double barrier = 1.0, sigma = 1.0;  // tau = first hitting of barrier by sigma * B
};
DecomposedPath model_predictable_default_variant(const PredictableDefaultParams& p, const GridSpec& g,
                                                 std::uint64_t seed, SimulationMode mode);

struct InsiderParams {
    double lambda = 0.1;
};
DecomposedPath model_insider_defaultable(const InsiderParams& p, const GridSpec& g, std::uint64_t seed);

struct RiskAttitudesParams {
    double rho = -0.5;
    double x0 = 1.0;
};
DecomposedPath model_risk_attitudes(const RiskAttitudesParams& p, const GridSpec& g, std::uint64_t seed);

struct FilteringParams {
    double x0 = 0.0;
};
DecomposedPath model_filtering(const FilteringParams& p, const GridSpec& g, std::uint64_t seed);

struct DeterministicHParams {
    double r = 1.0;
    double x0 = 1.0, y0 = 1.0;
};
DecomposedPath model_deterministic_h(const DeterministicHParams& p, const GridSpec& g, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Closed forms used by the models, exposed for tests and the tree discretizer

/// P(sup_{[0,t]} sigma B >= b) = erfc(b / (sigma sqrt(2t))).
double hitting_cdf(double t, double barrier, double sigma);
/// P(sup_{[t,T]} sigma B >= b | sigma B_t = u), for u < b.
double hitting_prob_remaining(double u, double t, double horizon, double barrier, double sigma);
/// d/du of hitting_prob_remaining.
double hitting_prob_remaining_du(double u, double t, double horizon, double barrier, double sigma);
/// (1 - C(T)) / (1 - C(s)): conditional survival ratio, also the size of the
/// predictable jump collected at a default time s.
double survival_ratio(double cdf_at_horizon, double cdf_at_s);

/// Random-barrier intensity c(t) for D ~ Exp(kappa), in closed form.
double random_barrier_intensity(double t, double kappa);
/// P(T^D > t) for D ~ Exp(kappa).
double random_barrier_survival(double t, double kappa);

/// Kalman-Bucy gain: RK4 solution of dP/dt = 1 - P^2, P_0 = 0, on the grid.
std::vector<double> riccati_gain(const TimeGrid& grid);

/// discretized integral over [0, T - eps] of ((B_T - B_u)^+ / (T - u))^2 du,
/// left-endpoint rule on the grid; T - eps must be a grid point.
double bridge_integrand_energy(const TimeGrid& grid, std::span<const double> bridge, double eps);

}  // namespace convarb
