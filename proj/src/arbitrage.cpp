#include "convarb/arbitrage.hpp"

#include "convarb/error.hpp"

#include <algorithm>
#include <cmath>

namespace convarb {

ArbitrageWindow window_from_mask(std::vector<bool> mask) {
    ArbitrageWindow w;
    w.mask = std::move(mask);
    auto first = std::find(w.mask.begin(), w.mask.end(), true);
    if (first == w.mask.end()) return w;
    w.debut_index = static_cast<std::size_t>(first - w.mask.begin());
    auto after = std::find(first, w.mask.end(), false);
    w.exit_index = static_cast<std::size_t>(after - w.mask.begin());
    return w;
}

ArbitrageWindow detect_arbitrage_set(const DecomposedPath& p, const DiscreteMeasure& A2, double tol) {
    const std::size_t n = p.steps();
    const double ta = tol >= 0.0 ? tol : default_tol(p.dA);
    const double tq = tol >= 0.0 ? tol : default_tol(p.M2.qv);
    std::vector<bool> mask(n, false);
    for (std::size_t i = 0; i < n; ++i) mask[i] = A2[i] > ta && p.M2.qv[i] <= tq;
    return window_from_mask(std::move(mask));
}

std::vector<std::pair<std::size_t, std::size_t>> maximal_windows(const std::vector<bool>& mask) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t i = 0;
    while (i < mask.size()) {
        if (!mask[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < mask.size() && mask[j]) ++j;
        out.emplace_back(i, j);
        i = j;
    }
    return out;
}

PortfolioLedger build_arbitrage_portfolio(const DecomposedPath& p, const ArbitrageWindow& window, HoldPolicy policy) {
    const std::size_t n = p.steps();
    PortfolioLedger L;
    L.piC.assign(n, 0.0);
    L.piX.assign(n, 0.0);
    L.piY.assign(n, 0.0);
    L.V.assign(n + 1, 0.0);
    L.held.assign(n, false);
    if (!window.empty()) {
        if (policy == HoldPolicy::first_window) {
            for (std::size_t i = *window.debut_index; i < *window.exit_index; ++i) L.held[i] = true;
        } else {
            L.held = window.mask;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (L.held[i]) {
            if (p.h[i] > 0.0) ++L.clipped_cells;
            L.piX[i] = std::max(-p.h[i], 0.0);
            L.piY[i] = 1.0;
        }
        L.piC[i] = L.V[i] - L.piX[i] * p.X[i] - L.piY[i] * p.Y[i];
        L.V[i + 1] = L.V[i] + L.piX[i] * (p.X[i + 1] - p.X[i]) + L.piY[i] * (p.Y[i + 1] - p.Y[i]);
    }
    return L;
}

const char* to_string(ViolationKind k) {
    switch (k) {
        case ViolationKind::short_position: return "short_position";
        case ViolationKind::value_decrease: return "value_decrease";
        case ViolationKind::not_strict: return "not_strict";
        case ViolationKind::self_financing: return "self_financing";
    }
    return "?";
}

BacktestResult backtest(const DecomposedPath& p, const PortfolioLedger& L, const ArbitrageWindow& window,
                        const DiscreteMeasure& A2, double tol) {
    const std::size_t n = p.steps();
    if (L.piX.size() != n || L.piY.size() != n || L.piC.size() != n || L.V.size() != n + 1) {
        throw DomainError("backtest: ledger does not match the path grid");
    }
    BacktestResult r;
    r.min_value = L.V[0];
    for (std::size_t i = 0; i < n; ++i) {
        if (L.piX[i] < 0.0 || L.piY[i] < 0.0) {
            r.admissible = false;
            r.violations.push_back({i, ViolationKind::short_position});
        }
        const double dv = L.V[i + 1] - L.V[i];
        if (L.V[i + 1] != L.V[i] + L.piX[i] * (p.X[i + 1] - p.X[i]) + L.piY[i] * (p.Y[i + 1] - p.Y[i]) || L.piC[i] != L.V[i] - L.piX[i] * p.X[i] - L.piY[i] * p.Y[i]) {
            r.violations.push_back({i, ViolationKind::self_financing});
        }
        if (dv < -tol) {
            r.monotone = false;
            r.violations.push_back({i, ViolationKind::value_decrease});
        }
        const bool in_mask = i < window.mask.size() && window.mask[i];
        const bool held = i < L.held.size() && L.held[i];
        if (in_mask && held) {
            if (!(dv > tol)) {
                r.strict_on_mask = false;
                r.violations.push_back({i, ViolationKind::not_strict});
            }
            r.max_gain_residual = std::max(r.max_gain_residual, std::abs(dv - A2[i]));
        }
        r.min_value = std::min(r.min_value, L.V[i + 1]);
    }
    r.terminal_value = L.V.back();
    for (auto [b, e] : maximal_windows(L.held)) r.window_profits.push_back({b, e, L.V[e] - L.V[b]});
    return r;
}

double predictable_jump_harvest(const DecomposedPath& p, std::size_t index, Side side) {
    if (index == 0 || index > p.steps()) {
        throw DomainError("harvest index " + std::to_string(index) + " outside [1, " + std::to_string(p.steps()) + "]");
    }
    const std::vector<double>& z = side == Side::X ? p.X : p.Y;
    return z[index] - z[index - 1];
}

}  // namespace convarb
