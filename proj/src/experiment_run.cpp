#include "convarb/experiment.hpp"

#include "convarb/arbitrage.hpp"
#include "convarb/density.hpp"
#include "convarb/error.hpp"
#include "convarb/parallel.hpp"
#include "convarb/structure.hpp"
#include "convarb/treeoracle.hpp"
#include "json_util.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

namespace convarb {

using detail::ojson;
namespace fs = std::filesystem;

namespace {

struct PathOutcome {
    std::string invariant_error;
    NormalFormVerdict X = NormalFormVerdict::normal_form, Y = NormalFormVerdict::normal_form;
    bool C1 = true, C2 = true, jump_a1 = true;
    bool window = false;
    std::optional<std::size_t> debut, exit;
    double terminal = 0.0;
    bool monotone = true, strict = true, admissible = true;
    std::size_t violations = 0, clipped = 0;
    double residual = 0.0;
    int covariation = -1;  // -1 skipped, 0 fails, 1 holds
    std::string covariation_reason;
    bool event_after_step1 = true;
};

bool wants(const ExperimentConfig& cfg, const char* a) {
    return std::find(cfg.analyses.begin(), cfg.analyses.end(), a) != cfg.analyses.end();
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << content) || !(out.flush())) throw IoError("cannot write " + path.string());
}

PathOutcome analyze_path(const ExperimentConfig& cfg, std::size_t i) {
    PathOutcome o;
    const DecomposedPath p = simulate(cfg.model, i);
    const InvariantReport inv = check_invariants(p);
    if (!inv.ok) {
        o.invariant_error = inv.failures.front();
        return o;
    }
    if (!p.meta.events.empty()) o.event_after_step1 = p.meta.events.front().point > 1;
    if (wants(cfg, "structure") || wants(cfg, "arbitrage")) {
        const StructureReport s = analyze_structure(p);
        o.X = s.normal_form.X;
        o.Y = s.normal_form.Y;
        o.C1 = s.c12.C1;
        o.C2 = s.c12.C2;
        o.jump_a1 = s.jump_condition_a1;
        if (wants(cfg, "arbitrage")) {
            const ArbitrageWindow w = detect_arbitrage_set(p, s.split.A2);
            const PortfolioLedger L = build_arbitrage_portfolio(p, w);
            const BacktestResult b = backtest(p, L, w, s.split.A2);
            o.window = !w.empty();
            o.debut = w.debut_index;
            o.exit = w.exit_index;
            o.terminal = b.terminal_value;
            o.monotone = b.monotone;
            o.strict = b.strict_on_mask;
            o.admissible = b.admissible;
            o.violations = b.violations.size();
            o.clipped = L.clipped_cells;
            o.residual = b.max_gain_residual;
        }
    }
    if (wants(cfg, "covariation_rule")) {
        try {
            o.covariation = covariation_rule(p).holds ? 1 : 0;
        } catch (const PreconditionError& e) {
            o.covariation_reason = e.what();
        }
    }
    return o;
}

void export_path(const ExperimentConfig& cfg, std::size_t i, const fs::path& dir) {
    const DecomposedPath p = simulate(cfg.model, i);
    std::string prices = "t,X,Y\n";
    for (std::size_t j = 0; j < p.grid.points.size(); ++j) {
        prices += num(p.grid.points[j]) + "," + num(p.X[j]) + "," + num(p.Y[j]) + "\n";
    }
    write_file(dir / ("path_" + std::to_string(i) + "_prices.csv"), prices);

    std::string inc = "t,dt,dJX,dWX,dMX,h,dM1,dM2,dA,da,dQV_MX,dQV_M2,dJY\n";
    for (std::size_t k = 0; k < p.steps(); ++k) {
        inc += num(p.grid.points[k]) + "," + num(p.grid.dt(k)) + "," + num(p.dJX[k]) + "," + num(p.dWX[k]) + "," +
               num(p.MX.increments[k]) + "," + num(p.h[k]) + "," + num(p.M1.increments[k]) + "," +
               num(p.M2.increments[k]) + "," + num(p.dA[k]) + "," + num(p.da[k]) + "," + num(p.MX.qv[k]) + "," +
               num(p.M2.qv[k]) + "," + num(p.dJY[k]) + "\n";
    }
    write_file(dir / ("path_" + std::to_string(i) + "_increments.csv"), inc);

    if (wants(cfg, "arbitrage")) {
        const ASplit s = split_A(p);
        const ArbitrageWindow w = detect_arbitrage_set(p, s.A2);
        const PortfolioLedger L = build_arbitrage_portfolio(p, w);
        std::string ledger = "t,piC,piX,piY,V\n";
        for (std::size_t k = 0; k < p.steps(); ++k) {
            ledger += num(p.grid.points[k]) + "," + num(L.piC[k]) + "," + num(L.piX[k]) + "," + num(L.piY[k]) + "," +
                      num(L.V[k]) + "\n";
        }
        write_file(dir / ("path_" + std::to_string(i) + "_ledger.csv"), ledger);
    }
}

ojson verdict_json(const MCVerdict& v) {
    return {{"estimate", v.estimate},
            {"stderr", v.stderr_},
            {"samples", v.samples},
            {"refused", v.refused},
            {"verdict", to_string(v.verdict)}};
}

ojson counts_json(const std::vector<PathOutcome>& paths, bool x_side) {
    std::map<std::string, std::size_t> c{{"normal_form", 0}, {"J_not_decreasing", 0}, {"singularity_violated", 0}};
    for (const auto& o : paths) ++c[to_string(x_side ? o.X : o.Y)];
    ojson j;
    for (const char* k : {"normal_form", "J_not_decreasing", "singularity_violated"}) j[k] = c[k];
    return j;
}

}  // namespace

RunOutcome run_experiment(ExperimentConfig cfg, const RunOptions& opts) {
    if (opts.seed) cfg.model.seed = *opts.seed;
    const unsigned threads = std::max(1u, opts.threads);
    const fs::path out = opts.out_dir ? fs::path(*opts.out_dir) : fs::path(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(out / "paths", ec);
    if (ec) throw IoError("cannot create output directory " + out.string() + ": " + ec.message());

    const std::string config_json = config_to_json(cfg);
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016" PRIx64, fnv1a64(config_json));

    ojson report;
    report["experiment"] = cfg.experiment;
    report["provenance"] = {{"config_hash", std::string("fnv1a64:") + hash},
                            {"seed", cfg.model.seed},
                            {"grid", {{"horizon", cfg.model.grid.horizon}, {"n_steps", cfg.model.grid.n_steps}}},
                            {"mode", to_string(cfg.model.mode)},
                            {"version", kVersion}};
    report["config"] = ojson::parse(config_json);

    const std::vector<PathOutcome> paths =
        parallel_map<PathOutcome>(cfg.n_paths, threads, [&](std::size_t i) { return analyze_path(cfg, i); });
    for (std::size_t i = 0; i < paths.size(); ++i) {
        if (!paths[i].invariant_error.empty()) {
            throw InvariantViolation("path " + std::to_string(i) + ": " + paths[i].invariant_error);
        }
    }

    ojson analyses = ojson::object();
    const std::size_t n = paths.size();
    if (wants(cfg, "structure") || wants(cfg, "arbitrage")) {
        std::size_t c1 = 0, c2 = 0, ja1 = 0;
        for (const auto& o : paths) {
            c1 += o.C1;
            c2 += o.C2;
            ja1 += o.jump_a1;
        }
        analyses["structure"] = {{"paths", n},
                                 {"normal_form_X", counts_json(paths, true)},
                                 {"normal_form_Y", counts_json(paths, false)},
                                 {"C1_holds", c1},
                                 {"C1_fails", n - c1},
                                 {"C2_holds", c2},
                                 {"jump_condition_a1_holds", ja1}};
    }
    if (wants(cfg, "arbitrage")) {
        std::size_t nonempty = 0, monotone = 0, strict = 0, admissible = 0, positive = 0, violations = 0, clipped = 0;
        std::size_t late = 0, late_positive = 0;
        double residual = 0.0;
        std::vector<double> terminal;
        for (const auto& o : paths) {
            monotone += o.monotone;
            admissible += o.admissible;
            violations += o.violations;
            clipped += o.clipped;
            residual = std::max(residual, o.residual);
            if (!o.window) continue;
            ++nonempty;
            strict += o.strict;
            positive += o.terminal > 0.0;
            terminal.push_back(o.terminal);
            if (o.event_after_step1) {
                ++late;
                late_positive += o.terminal > 0.0;
            }
        }
        const double mean_terminal = terminal.empty() ? 0.0 : pairwise_sum(terminal) / static_cast<double>(terminal.size());
        analyses["arbitrage"] = {{"paths", n},
                                 {"nonempty_windows", nonempty},
                                 {"monotone_paths", monotone},
                                 {"admissible_paths", admissible},
                                 {"strict_on_window_paths", strict},
                                 {"violations_total", violations},
                                 {"clipped_cells", clipped},
                                 {"terminal_value_positive", positive},
                                 {"mean_terminal_value", mean_terminal},
                                 {"max_gain_residual", residual},
                                 {"windows_with_event_after_step1", late},
                                 {"terminal_positive_with_event_after_step1", late_positive}};
    }
    if (wants(cfg, "covariation_rule")) {
        std::size_t holds = 0, fails = 0;
        std::string reason;
        for (const auto& o : paths) {
            if (o.covariation == 1) ++holds;
            if (o.covariation == 0) ++fails;
            if (o.covariation == -1 && reason.empty()) reason = o.covariation_reason;
        }
        if (!reason.empty()) {
            analyses["covariation_rule"] = {{"status", "skipped"}, {"reason", reason}};
        } else {
            analyses["covariation_rule"] = {{"status", "ok"}, {"holds", holds}, {"fails", fails}};
        }
    }
    if (wants(cfg, "density")) {
        const std::vector<double> cps = default_checkpoints(cfg.model.grid.horizon, cfg.density.checkpoints);
        const std::vector<DensitySample> samples = sample_densities(cfg.model, cfg.n_paths, cps, threads);
        const MCVerdict c3 = verify_C3(samples, cfg.density.k_sigma);
        const auto sm = verify_supermartingale(samples, cps, cfg.density.k_sigma);
        ojson smj = ojson::array();
        for (const auto& c : sm) {
            ojson inc = ojson::array();
            for (const auto& v : c.increments) inc.push_back(verdict_json(v));
            smj.push_back({{"asset", c.asset}, {"checkpoints", c.checkpoints}, {"means", c.means}, {"increments", inc},
                           {"pass", c.pass}});
        }
        std::string curve = "t,mean_D,stderr_D,mean_DX,mean_DY\n";
        for (std::size_t k = 0; k < cps.size(); ++k) {
            std::vector<double> col;
            for (const auto& s : samples) {
                if (!s.refused) col.push_back(s.at_checkpoints[k]);
            }
            const MCVerdict m = mc_verdict(col, 1.0, cfg.density.k_sigma, 0);
            curve += num(cps[k]) + "," + num(m.estimate) + "," + num(m.stderr_) + "," + num(sm[0].means[k]) + "," +
                     num(sm[1].means[k]) + "\n";
        }
        write_file(out / "density_curve.csv", curve);
        ojson c3j = verdict_json(c3);
        c3j["k_sigma"] = cfg.density.k_sigma;
        if (c3.samples == 0) {
            analyses["density"] = {{"status", "refused"}, {"reason", "C1 fails"}, {"refused_paths", c3.refused}};
        } else {
            analyses["density"] = {{"status", "ok"}, {"C3", c3j}, {"supermartingale", smj}, {"curve_file", "density_curve.csv"}};
        }
    }
    report["analyses"] = analyses;

    if (cfg.oracle) {
        MarketTree tree;
        std::string source;
        if (cfg.oracle->tree_file) {
            tree = load_tree((fs::path(cfg.base_dir) / *cfg.oracle->tree_file).string());
            source = *cfg.oracle->tree_file;
        } else {
            tree = discretize_model(cfg.model.name, cfg.model.params, cfg.oracle->periods, cfg.oracle->branching,
                                    cfg.model.grid.horizon);
            source = "discretize(" + cfg.model.name + ", periods=" + std::to_string(cfg.oracle->periods) +
                     ", branching=" + std::to_string(cfg.oracle->branching) + ")";
        }
        const OracleResult r = solve(tree);
        const bool ok = verify(tree, r);
        write_file(out / "oracle.json", result_to_json(tree, r, ok));
        report["oracle"] = {{"source", source},
                            {"nodes", tree.size()},
                            {"atoms", tree.atoms().size()},
                            {"feasible", r.feasible},
                            {"optimum", to_string(r.optimum)},
                            {"verified", ok},
                            {"result_file", "oracle.json"}};
        if (!ok) throw InvariantViolation("oracle result failed verification");
    }

    std::string per_path = "path,normal_form_X,normal_form_Y,C1,C2,arbitrage_window,debut,exit,terminal_value,covariation\n";
    for (std::size_t i = 0; i < n; ++i) {
        const auto& o = paths[i];
        per_path += std::to_string(i) + "," + to_string(o.X) + "," + to_string(o.Y) + "," + (o.C1 ? "1" : "0") + "," +
                    (o.C2 ? "1" : "0") + "," + (o.window ? "1" : "0") + "," +
                    (o.debut ? std::to_string(*o.debut) : "") + "," + (o.exit ? std::to_string(*o.exit) : "") + "," +
                    num(o.terminal) + "," + (o.covariation < 0 ? "skipped" : (o.covariation ? "holds" : "fails")) + "\n";
    }
    write_file(out / "per_path.csv", per_path);
    for (std::size_t i = 0; i < std::min(cfg.export_paths, cfg.n_paths); ++i) export_path(cfg, i, out / "paths");

    RunOutcome res;
    res.output_dir = out.string();
    res.report_json = report.dump(2) + "\n";
    write_file(out / "report.json", res.report_json);
    return res;
}

}  // namespace convarb
