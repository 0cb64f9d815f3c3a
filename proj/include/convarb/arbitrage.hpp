#pragma once

#include "convarb/models.hpp"
#include "convarb/structure.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace convarb {

struct ArbitrageWindow {
    std::vector<bool> mask;  // per grid step
    std::optional<std::size_t> debut_index;
    std::optional<std::size_t> exit_index;

    bool empty() const { return !debut_index.has_value(); }
};

/// mask_i = A2_i > tol and d<M2>_i <= tol.
ArbitrageWindow detect_arbitrage_set(const DecomposedPath& path, const DiscreteMeasure& A2, double tol = kAutoTol);

/// Window from a raw mask: debut = first true cell, exit = first false cell after it (or the step count).
ArbitrageWindow window_from_mask(std::vector<bool> mask);

/// Maximal runs [begin, end) of true cells.
std::vector<std::pair<std::size_t, std::size_t>> maximal_windows(const std::vector<bool>& mask);

enum class HoldPolicy { first_window, all_windows };

struct PortfolioLedger {
    std::vector<double> piC, piX, piY;  // per step: cash, shares of X, shares of Y
    std::vector<double> V;              // per grid point
    std::vector<bool> held;             // per step
    std::size_t clipped_cells = 0;      // cells where -h < 0 was clipped to 0
};

PortfolioLedger build_arbitrage_portfolio(const DecomposedPath& path, const ArbitrageWindow& window,
                                          HoldPolicy policy = HoldPolicy::first_window);

enum class ViolationKind { short_position, value_decrease, not_strict, self_financing };
const char* to_string(ViolationKind k);

struct Violation {
    std::size_t step;
    ViolationKind kind;
};

struct WindowProfit {
    std::size_t begin, end;
    double profit;
};

struct BacktestResult {
    bool admissible = true;
    bool monotone = true;
    bool strict_on_mask = true;
    double terminal_value = 0.0;
    double min_value = 0.0;
    double max_gain_residual = 0.0;  // max |dV - A2| over held mask cells
    std::vector<Violation> violations;
    std::vector<WindowProfit> window_profits;  // per maximal held run
};

BacktestResult backtest(const DecomposedPath& path, const PortfolioLedger& ledger, const ArbitrageWindow& window,
                        const DiscreteMeasure& A2, double tol = 0.0);

enum class Side { X, Y };

/// Unit long position bought one grid point before index and sold at index.
double predictable_jump_harvest(const DecomposedPath& path, std::size_t index, Side side);

}  // namespace convarb
