#pragma once

#include "convarb/models.hpp"

#include <optional>
#include <span>
#include <vector>

namespace convarb::detail {

/// Gap between an announcing node and its predictable event, relative to the horizon.
inline constexpr double kAnnounceGap = 1e-12;

/// Stream ids used with derive_seed, one per random source of a model.
enum Stream : std::uint64_t {
    kDriver1 = 1,
    kDriver2 = 2,
    kDefault = 3,
    kHittingTime1 = 4,
    kHittingTime2 = 5,
    kBarrier = 6,
    kSecondary = 7,
    kTerminal = 8,
};

/// Lévy-distributed first hitting time of `level` by a standard Brownian motion.
double sample_hitting_time(double level, Engine& eng);

/// Standard Brownian values at `times` (ascending, all <= theta, first = 0) for a
/// path whose first hit of `level` happens exactly at theta (Williams reversal of
/// a 3-d Bessel bridge).
std::vector<double> path_hitting_at(std::span<const double> times, double theta, double level, Engine& eng);

/// Standard Brownian values on the grid conditioned on sup over [0, horizon] < level
/// (continuous monitoring through Brownian-bridge crossing probabilities).
std::vector<double> path_staying_below(const TimeGrid& grid, double level, Engine& eng);

/// Brownian driver with a barrier, sampled per mode.
struct HittingDriver {
    double level = 1.0;                 // barrier in standard-Brownian units
    std::optional<double> hit_time;     // analytic mode: exact hitting time if <= horizon
    std::vector<double> w;              // standard Brownian values per grid point
    std::optional<std::size_t> hit_point;
    std::optional<std::size_t> announcing_point;

    bool alive_at(std::size_t j) const { return !hit_point || j < *hit_point; }
};

/// Event times (announcing node and event) to inject for an analytic hitting time.
std::vector<double> announced_event_times(double theta, double horizon);

/// Fills the driver on an already built grid. Analytic mode expects hit_time set
/// beforehand (nullopt meaning no hit before the horizon).
void realize_driver(HittingDriver& d, const TimeGrid& grid, SimulationMode mode, Engine& eng);

/// Copies, at every announcing node, driver values from the event node that follows.
void apply_left_limits(std::span<HittingDriver*> drivers, std::span<const std::size_t> announcing_points);

/// Fills dA/da with the positive/negative parts of v.
void jordan(std::span<const double> v, DiscreteMeasure& dA, DiscreteMeasure& da);

/// Allocates every per-step series of a path on its grid.
void allocate(DecomposedPath& p);

double param(const std::map<std::string, double>& params, const char* name);

}  // namespace convarb::detail
