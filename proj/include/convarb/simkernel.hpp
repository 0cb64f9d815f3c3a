#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace convarb {

/// Sampling times on [0, horizon]. Strictly increasing, starts at 0, ends at the
/// horizon, and contains every injected event time exactly once.
struct TimeGrid {
    std::vector<double> points;
    std::vector<double> event_times;

    double horizon() const { return points.back(); }
    std::size_t steps() const { return points.size() - 1; }
    double dt(std::size_t step) const { return points[step + 1] - points[step]; }

    /// Index of the grid point equal to t. Throws DomainError if absent.
    std::size_t index_of(double t) const;
    /// Largest index whose time is <= t (clamped to [0, steps()]).
    std::size_t index_at_or_before(double t) const;
};

/// One value per grid step.
struct IncrementPath {
    std::vector<double> values;
};

struct Jump {
    std::size_t step;  // the jump happens at points[step + 1]
    double size;
};

struct JumpMarkedPath {
    IncrementPath continuous_part;
    std::vector<Jump> jumps;
};

// ---------------------------------------------------------------------------
// Seeding

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed for an independent stream, derived from a base seed and a counter
/// (path index, stream id). Pure function of its inputs.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t counter, std::uint64_t stream = 0);

using Engine = std::mt19937_64;

// ---------------------------------------------------------------------------
// Operations

TimeGrid make_grid(double horizon, std::size_t n_steps, std::span<const double> event_times = {});

IncrementPath brownian_increments(const TimeGrid& grid, std::uint64_t seed);

/// Increments of a Brownian path pinned to terminal_value at the horizon.
IncrementPath brownian_bridge_increments(const TimeGrid& grid, double terminal_value,
                                         std::uint64_t seed);

/// Euler scheme W_{i+1} = W_i + drift_coeff * W_i * dt_i + dW_i.
std::vector<double> ou_path(const TimeGrid& grid, double drift_coeff, const IncrementPath& driving,
                            double initial);

/// Doléans-Dade exponential at every grid point:
/// exp(Z^c - <Z^c>/2) * prod (1 + dZ) e^{-dZ}. The continuous part may carry
/// finite-variation increments; qv_continuous is the bracket of its martingale part.
std::vector<double> doleans_exponential(const JumpMarkedPath& z, const IncrementPath& qv_continuous);

/// First jump of an inhomogeneous Poisson clock by inverse transform, or none
/// when the cumulative hazard stays below the exponential draw up to the horizon.
std::optional<double> sample_default_time(const std::function<double(double)>& intensity,
                                          double horizon, std::uint64_t seed);

/// Constant-intensity shortcut (same draw as the general form).
std::optional<double> sample_default_time(double rate, double horizon, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Helpers shared by the models

std::vector<double> cumulative(double initial, std::span<const double> increments);

}  // namespace convarb
