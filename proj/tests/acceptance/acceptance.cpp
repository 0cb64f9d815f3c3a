// Acceptance run: prints one PASS/FAIL line per criterion, exits nonzero on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "../common/random_tree.hpp"
#include "convarb/arbitrage.hpp"
#include "convarb/density.hpp"
#include "convarb/experiment.hpp"
#include "convarb/measurecalc.hpp"
#include "convarb/parallel.hpp"
#include "convarb/structure.hpp"
#include "convarb/treeoracle.hpp"

using namespace convarb;
namespace fs = std::filesystem;

namespace {

const std::string kSource = CONVARB_SOURCE_DIR;

struct Outcome {
    bool pass;
    std::string detail;
};

unsigned threads() { return std::max(1u, std::thread::hardware_concurrency()); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

ModelConfig model(const std::string& name, std::size_t steps, double horizon = 1.0, std::uint64_t seed = 1) {
    ModelConfig c;
    c.name = name;
    c.grid = {horizon, steps};
    c.seed = seed;
    return c;
}

struct MeanSe {
    double mean, se;
};

MeanSe mean_se(const std::vector<double>& x) {
    const double n = static_cast<double>(x.size());
    const double m = pairwise_sum(x) / n;
    double v = 0;
    for (double a : x) v += (a - m) * (a - m);
    return {m, std::sqrt(v / (n - 1) / n)};
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
    auto t0 = std::chrono::steady_clock::now();
    auto c = model("predictable_default_variant", 200, 1.0, 101);
    c.params = {{"lambda_y", 0.5}};
    struct R {
        bool monotone, clean, strict, nonempty;
    };
    auto rs = parallel_map<R>(1000, threads(), [&](std::size_t i) {
        auto p = simulate(c, i);
        auto s = analyze_structure(p);
        auto w = detect_arbitrage_set(p, s.split.A2);
        auto L = build_arbitrage_portfolio(p, w);
        auto b = backtest(p, L, w, s.split.A2);
        return R{b.monotone, b.violations.empty(), b.strict_on_mask, !w.empty()};
    });
    double secs = seconds_since(t0);
    std::size_t bad = 0, windows = 0, strict = 0;
    for (const R& r : rs) {
        bad += !(r.monotone && r.clean);
        windows += r.nonempty;
        strict += r.nonempty && r.strict;
    }
    bool pass = bad == 0 && strict == windows && secs < 10.0;
    return {pass, fmt("paths with violations %zu/1000, strictly increasing on %zu/%zu nonempty windows, %.2f s", bad,
                      strict, windows, secs)};
}

Outcome criterion2() {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    for (double rho : {-0.5, 0.8}) {
        auto c = model("risk_attitudes", 400, 2.0, rho < 0 ? 202 : 203);
        c.params = {{"rho", rho}};
        auto cps = default_checkpoints(2.0);
        auto samples = sample_densities(c, 100000, cps, threads());
        auto c3 = verify_C3(samples, 3.0);
        auto sm = verify_supermartingale(samples, cps, 3.0);
        bool ok = c3.verdict == Verdict::pass && std::all_of(sm.begin(), sm.end(), [](auto& s) { return s.pass; });
        pass = pass && ok;
        detail += fmt("rho=%.1f: E[D*_T]=%.5f+-%.5f (%s), X %s, Y %s; ", rho, c3.estimate, c3.stderr_,
                      to_string(c3.verdict), sm[0].pass ? "nonincreasing" : "increasing",
                      sm[1].pass ? "nonincreasing" : "increasing");
    }
    double secs = seconds_since(t0);
    pass = pass && secs < 120.0;
    return {pass, detail + fmt("%.1f s", secs)};
}

Outcome criterion3() {
    struct Count {
        std::size_t fails = 0, total = 0;
    };
    auto c1_fails = [](const ModelConfig& c, const std::function<bool(const DecomposedPath&)>& select) {
        auto rs = parallel_map<int>(1000, threads(), [&](std::size_t i) {
            auto p = simulate(c, i);
            if (!select(p)) return -1;
            return analyze_structure(p).c12.C1 ? 0 : 1;
        });
        Count n;
        for (int r : rs) {
            if (r < 0) continue;
            ++n.total;
            n.fails += r;
        }
        return n;
    };
    auto all = [](const DecomposedPath&) { return true; };
    auto pred = c1_fails(model("predictable_default_variant", 200, 1.0, 301), all);
    auto two = c1_fails(model("two_defaults", 200, 1.0, 302),
                        [](const DecomposedPath& p) { return p.meta.event("theta2").has_value(); });
    auto surv = c1_fails(model("survival_claim", 200, 1.0, 303), all);
    auto rn = model("risk_attitudes", 400, 2.0, 304);
    rn.params = {{"rho", -0.5}};
    auto rp = rn;
    rp.params = {{"rho", 0.8}};
    auto riskn = c1_fails(rn, all), riskp = c1_fails(rp, all);
    bool pass = pred.fails == pred.total && two.total > 0 && two.fails == two.total && surv.fails == 0 &&
                riskn.fails == 0 && riskp.fails == 0;
    return {pass, fmt("C1 fails: predictable %zu/%zu, two_defaults(theta2<=T) %zu/%zu, survival %zu/%zu, "
                      "risk rho=-0.5 %zu/%zu, risk rho=0.8 %zu/%zu",
                      pred.fails, pred.total, two.fails, two.total, surv.fails, surv.total, riskn.fails, riskn.total,
                      riskp.fails, riskp.total)};
}

Outcome criterion4() {
    const double cT = hitting_cdf(1.0, 1.0, 1.0);
    auto c = model("two_defaults", 200, 1.0, 401);
    auto errs = parallel_map<double>(10000, threads(), [&](std::size_t i) {
        auto p = simulate(c, i);
        auto k = p.meta.event("theta2");
        if (!k) return -1.0;
        double expect = survival_ratio(cT, hitting_cdf(p.grid.points[*k], 1.0, 1.0));
        return std::abs(predictable_jump_harvest(p, *k, Side::Y) - expect);
    });
    std::size_t defaulted = 0;
    double max_err = 0;
    for (double e : errs) {
        if (e < 0) continue;
        ++defaulted;
        max_err = std::max(max_err, e);
    }
    auto ce = c;
    ce.mode = SimulationMode::euler;
    ce.seed = 402;
    auto profits = parallel_map<double>(10000, threads(), [&](std::size_t i) {
        auto p = simulate(ce, i);
        auto k = p.meta.event("theta2");
        return k ? predictable_jump_harvest(p, *k, Side::Y) : std::nan("");
    });
    std::vector<double> got;
    for (double x : profits)
        if (!std::isnan(x)) got.push_back(x);
    auto ms = mean_se(got);
    bool pass = defaulted > 0 && max_err <= 1e-10 && ms.mean > 4 * ms.se;
    return {pass, fmt("analytic: max |profit - ratio| = %.2e over %zu defaulting paths; euler: mean profit %.5f, "
                      "stderr %.5f over %zu defaulting of 10000 paths",
                      max_err, defaulted, ms.mean, ms.se, got.size())};
}

Outcome criterion5() {
    auto c = model("random_barrier", 200, 1.0, 501);
    struct R {
        std::size_t windows, positive;
    };
    auto rs = parallel_map<R>(1000, threads(), [&](std::size_t i) {
        auto p = simulate(c, i);
        auto s = analyze_structure(p);
        auto w = detect_arbitrage_set(p, s.split.A2);
        auto L = build_arbitrage_portfolio(p, w, HoldPolicy::all_windows);
        auto b = backtest(p, L, w, s.split.A2);
        R r{b.window_profits.size(), 0};
        for (const auto& wp : b.window_profits) r.positive += wp.profit > 0.0;
        return r;
    });
    std::size_t windows = 0, positive = 0;
    for (const R& r : rs) {
        windows += r.windows;
        positive += r.positive;
    }
    return {windows > 0 && positive == windows,
            fmt("%zu/%zu maximal windows with strictly positive profit over 1000 paths", positive, windows)};
}

Outcome criterion6() {
    const double T = 1.0;
    auto grid = make_grid(T, 1u << 12);
    std::vector<double> eps;
    for (int k = 3; k <= 9; ++k) eps.push_back(std::ldexp(1.0, -k));
    auto energies = parallel_map<std::vector<double>>(10000, threads(), [&](std::size_t i) {
        auto b = cumulative(0.0, brownian_increments(grid, derive_seed(601, i)).values);
        std::vector<double> e;
        for (double x : eps) e.push_back(bridge_integrand_energy(grid, b, x));
        return e;
    });
    std::vector<double> xs, ys;
    for (std::size_t k = 0; k < eps.size(); ++k) {
        std::vector<double> col;
        for (const auto& e : energies) col.push_back(e[k]);
        xs.push_back(std::log(1.0 / eps[k]));
        ys.push_back(pairwise_sum(col) / col.size());
    }
    double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
    double sxy = 0, sxx = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sxy += (xs[k] - mx) * (ys[k] - my);
        sxx += (xs[k] - mx) * (xs[k] - mx);
    }
    double slope = sxy / sxx;
    return {std::abs(slope - 0.5) <= 0.1, fmt("slope %.4f of mean energy on ln(1/eps), eps = 2^-3..2^-9", slope)};
}

Outcome criterion7() {
    auto grid = make_grid(1.0, 1000);
    auto P = riccati_gain(grid);
    double gain_err = 0;
    for (std::size_t i = 0; i < P.size(); ++i) gain_err = std::max(gain_err, std::abs(P[i] - std::tanh(grid.points[i])));

    auto c = model("filtering", 1000, 1.0, 701);
    struct R {
        double sum, sumsq;
        std::size_t count;
        int sign;
    };
    auto rs = parallel_map<R>(10000, threads(), [&](std::size_t i) {
        auto p = simulate(c, i);
        R r{0, 0, 0, 0};
        for (std::size_t k = 0; k < p.innovations.size(); ++k) {
            double dt = p.grid.dt(k);
            if (dt < 1e-9) continue;  // announcing sliver
            double z = p.innovations[k] * p.innovations[k] / dt;
            r.sum += z;
            r.sumsq += z * z;
            ++r.count;
        }
        double j = p.dJY[p.steps() - 1];
        r.sign = (j > 0) - (j < 0);
        return r;
    });
    double s = 0, s2 = 0;
    std::size_t n = 0, up = 0, down = 0;
    for (const R& r : rs) {
        s += r.sum;
        s2 += r.sumsq;
        n += r.count;
        up += r.sign > 0;
        down += r.sign < 0;
    }
    double m = s / n, se = std::sqrt((s2 / n - m * m) / n);
    double fu = up / 10000.0, fd = down / 10000.0;
    bool pass = gain_err <= 1e-6 && std::abs(m - 1.0) <= 4 * se && fu >= 0.05 && fd >= 0.05;
    return {pass, fmt("max |P - tanh| = %.2e; innovation variance / dt = %.5f +- %.5f; terminal jump up %.3f, down %.3f",
                      gain_err, m, se, fu, fd)};
}

Outcome criterion8() {
    std::mt19937_64 rng(801);
    std::size_t disagree = 0, exclusive_bad = 0, feasible = 0;
    for (int k = 0; k < 500; ++k) {
        auto t = convarb::testing::random_tree(rng);
        auto r = solve(t);
        if (r.measure.has_value() == r.certificate.has_value()) ++exclusive_bad;
        if (!verify(t, r)) ++disagree;
        feasible += r.feasible;
    }
    auto long_only = [](const OracleResult& r) {
        if (!r.certificate) return false;
        for (auto& [k, v] : r.certificate->piX)
            if (sgn(v) < 0) return false;
        for (auto& [k, v] : r.certificate->piY)
            if (sgn(v) < 0) return false;
        return true;
    };
    bool shipped = true;
    std::string detail;
    for (const auto& e : fs::directory_iterator(kSource + "/configs")) {
        auto cfg = load_config(e.path().string());
        if (!cfg.oracle) continue;
        const std::string& name = cfg.model.name;
        MarketTree tree = cfg.oracle->tree_file
                              ? load_tree((fs::path(cfg.base_dir) / *cfg.oracle->tree_file).string())
                              : discretize_model(name, resolve_params(cfg.model), cfg.oracle->periods,
                                                 cfg.oracle->branching, cfg.model.grid.horizon);
        auto r = solve(tree);
        bool ok = verify(tree, r);
        if (name == "survival_claim") ok = ok && r.feasible;
        if (name == "predictable_default_variant") ok = ok && !r.feasible && long_only(r);
        shipped = shipped && ok;
        detail += fmt("%s %s%s; ", e.path().filename().c_str(), r.feasible ? "feasible" : "infeasible",
                      ok ? "" : " (unexpected)");
    }
    bool pass = disagree == 0 && exclusive_bad == 0 && shipped;
    return {pass, fmt("random trees: %zu disagreements, %zu non-exclusive outputs, %zu/500 feasible; ", disagree,
                      exclusive_bad, feasible) +
                      detail};
}

Outcome criterion9() {
    std::mt19937_64 rng(901);
    std::normal_distribution<double> nd;
    std::uniform_real_distribution<double> ud(-2.0, 2.0);
    std::bernoulli_distribution null_cell(0.3);
    std::uniform_int_distribution<int> who(0, 2);
    std::size_t round_trip_bad = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        std::size_t n = 1 + trial % 16;
        DiscreteMeasure t(n), r(n);
        for (std::size_t i = 0; i < n; ++i) {
            t[i] = nd(rng) * std::exp(4 * nd(rng));
            r[i] = null_cell(rng) ? 0.0 : std::abs(nd(rng)) * std::exp(4 * nd(rng));
        }
        auto s = lebesgue_decompose(t, r, default_tol(r));
        for (std::size_t i = 0; i < n; ++i)
            if (s.density[i] * r[i] + s.singular[i] != t[i]) {
                ++round_trip_bad;
                break;
            }
    }
    std::size_t accepted = 0, a1b_bad = 0;
    while (accepted < 10000) {
        DiscreteMeasure a(4), b(4);
        for (std::size_t i = 0; i < 4; ++i) {
            int w = who(rng);
            if (w == 0) a[i] = ud(rng);
            else if (w == 1) b[i] = ud(rng);
        }
        if (!is_orthogonal(a, b, 0.0)) continue;
        bool sum_nonneg = true;
        for (std::size_t i = 0; i < 4; ++i) sum_nonneg = sum_nonneg && a[i] + b[i] >= 0.0;
        if (!sum_nonneg) continue;
        ++accepted;
        if (monotone_classify(a, 0.0).kind != Monotonicity::increasing ||
            monotone_classify(b, 0.0).kind != Monotonicity::increasing)
            ++a1b_bad;
    }
    return {round_trip_bad == 0 && a1b_bad == 0,
            fmt("round-trip failures %zu/10000; orthogonal nonnegative-sum pairs with a negative part %zu/10000",
                round_trip_bad, a1b_bad)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome criterion10() {
    fs::path root = fs::temp_directory_path() / "convarb_acceptance_determinism";
    fs::remove_all(root);
    std::size_t configs = 0, identical = 0;
    std::string differing;
    for (const auto& e : fs::directory_iterator(kSource + "/configs")) {
        auto cfg = load_config(e.path().string());
        std::string stem = e.path().stem().string();
        std::vector<std::string> outs;
        for (unsigned th : {1u, 4u, 1u}) {
            fs::path dir = root / (stem + "_" + std::to_string(outs.size()));
            run_experiment(cfg, {dir.string(), std::nullopt, th});
            outs.push_back(slurp(dir / "report.json"));
        }
        ++configs;
        if (outs[0] == outs[1] && outs[0] == outs[2] && !outs[0].empty()) ++identical;
        else differing += stem + " ";
    }
    fs::remove_all(root);
    return {configs > 0 && identical == configs,
            fmt("%zu/%zu shipped configs byte-identical across runs at threads 1, 4, 1", identical, configs) +
                (differing.empty() ? "" : "; differing: " + differing)};
}

}  // namespace

int main() {
    const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                         criterion6, criterion7, criterion8, criterion9, criterion10};
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        auto t0 = std::chrono::steady_clock::now();
        try {
            o = criteria[k]();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("criterion %zu: %s  %s  [%.1f s]\n", k + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str(),
                    seconds_since(t0));
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
