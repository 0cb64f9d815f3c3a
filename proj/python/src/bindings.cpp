#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "convarb/arbitrage.hpp"
#include "convarb/density.hpp"
#include "convarb/error.hpp"
#include "convarb/experiment.hpp"
#include "convarb/structure.hpp"
#include "convarb/treeoracle.hpp"

namespace py = pybind11;
using namespace convarb;

namespace {

ModelConfig make_config(const std::string& name, const std::map<std::string, double>& params, double horizon,
                        std::size_t n_steps, std::uint64_t seed, const std::string& mode) {
    ModelConfig c;
    c.name = name;
    c.params = params;
    c.grid = {horizon, n_steps};
    c.seed = seed;
    c.mode = simulation_mode_from_string(mode);
    resolve_params(c);
    return c;
}

py::dict path_dict(const DecomposedPath& p) {
    py::dict d;
    d["t"] = p.grid.points;
    d["X"] = p.X;
    d["Y"] = p.Y;
    d["h"] = p.h;
    d["dJX"] = p.dJX.mass;
    d["dWX"] = p.dWX.mass;
    d["dMX"] = p.MX.increments;
    d["dM1"] = p.M1.increments;
    d["dM2"] = p.M2.increments;
    d["dA"] = p.dA.mass;
    d["da"] = p.da.mass;
    d["dJY"] = p.dJY.mass;
    d["qv_MX"] = p.MX.qv.mass;
    d["qv_M1"] = p.M1.qv.mass;
    d["qv_M2"] = p.M2.qv.mass;
    py::dict events;
    for (const auto& e : p.meta.events) events[py::str(e.name)] = e.point;
    d["events"] = events;
    d["converging"] = p.horizon_is_convergence;
    return d;
}

py::dict verdict_dict(const MCVerdict& v) {
    py::dict d;
    d["estimate"] = v.estimate;
    d["stderr"] = v.stderr_;
    d["samples"] = v.samples;
    d["refused"] = v.refused;
    d["verdict"] = to_string(v.verdict);
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Price-convergence arbitrage analyzer";
    m.attr("__version__") = kVersion;

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
    py::register_exception<InvariantViolation>(m, "InvariantViolation", PyExc_RuntimeError);
    py::register_exception<ConstructionRefused>(m, "ConstructionRefused", PyExc_RuntimeError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    m.def("models_json", &models_json);

    m.def(
        "simulate",
        [](const std::string& name, const std::map<std::string, double>& params, double horizon, std::size_t n_steps,
           std::uint64_t seed, std::uint64_t path_index, const std::string& mode) {
            return path_dict(simulate(make_config(name, params, horizon, n_steps, seed, mode), path_index));
        },
        py::arg("name"), py::arg("params") = std::map<std::string, double>{}, py::arg("horizon") = 1.0,
        py::arg("n_steps") = 200, py::arg("seed") = 0, py::arg("path_index") = 0, py::arg("mode") = "analytic");

    m.def(
        "analyze",
        [](const std::string& name, const std::map<std::string, double>& params, double horizon, std::size_t n_steps,
           std::uint64_t seed, std::uint64_t path_index, const std::string& mode) {
            auto p = simulate(make_config(name, params, horizon, n_steps, seed, mode), path_index);
            auto s = analyze_structure(p);
            auto w = detect_arbitrage_set(p, s.split.A2);
            auto L = build_arbitrage_portfolio(p, w);
            auto b = backtest(p, L, w, s.split.A2);
            py::dict d;
            d["normal_form_X"] = to_string(s.normal_form.X);
            d["normal_form_Y"] = to_string(s.normal_form.Y);
            d["A1"] = s.split.A1.mass;
            d["A2"] = s.split.A2.mass;
            d["a1_tilde"] = s.split.a1_tilde;
            d["a2_tilde"] = s.c12.a2_tilde;
            d["C1"] = s.c12.C1;
            d["C1_cells"] = s.c12.C1_cells;
            d["C2"] = s.c12.C2;
            d["window"] = w.empty() ? py::object(py::none())
                                    : py::object(py::make_tuple(*w.debut_index, *w.exit_index));
            d["V"] = L.V;
            d["monotone"] = b.monotone;
            d["admissible"] = b.admissible;
            d["strict_on_window"] = b.strict_on_mask;
            d["terminal_value"] = b.terminal_value;
            d["violations"] = b.violations.size();
            return d;
        },
        py::arg("name"), py::arg("params") = std::map<std::string, double>{}, py::arg("horizon") = 1.0,
        py::arg("n_steps") = 200, py::arg("seed") = 0, py::arg("path_index") = 0, py::arg("mode") = "analytic");

    m.def(
        "verify_density",
        [](const std::string& name, const std::map<std::string, double>& params, double horizon, std::size_t n_steps,
           std::uint64_t seed, std::size_t n_paths, double k_sigma, unsigned threads) {
            auto c = make_config(name, params, horizon, n_steps, seed, "analytic");
            auto cps = default_checkpoints(horizon);
            std::vector<DensitySample> samples;
            {
                py::gil_scoped_release release;
                samples = sample_densities(c, n_paths, cps, threads);
            }
            py::dict d;
            d["C3"] = verdict_dict(verify_C3(samples, k_sigma));
            py::dict sm;
            for (const auto& chk : verify_supermartingale(samples, cps, k_sigma)) {
                py::dict a;
                a["checkpoints"] = chk.checkpoints;
                a["means"] = chk.means;
                a["pass"] = chk.pass;
                sm[py::str(chk.asset)] = a;
            }
            d["supermartingale"] = sm;
            return d;
        },
        py::arg("name"), py::arg("params") = std::map<std::string, double>{}, py::arg("horizon") = 1.0,
        py::arg("n_steps") = 200, py::arg("seed") = 0, py::arg("n_paths") = 1000, py::arg("k_sigma") = kDefaultKSigma,
        py::arg("threads") = 1);

    m.def("oracle_json", &run_oracle, py::arg("path"), py::arg("out_dir") = py::none());

    m.def(
        "solve_tree_json",
        [](const std::string& tree_json) {
            auto tree = parse_tree(tree_json);
            auto r = solve(tree);
            return result_to_json(tree, r, verify(tree, r));
        },
        py::arg("tree_json"));

    m.def(
        "discretize_json",
        [](const std::string& name, const std::map<std::string, double>& params, int periods, int branching,
           double horizon) {
            ModelConfig c;
            c.name = name;
            c.params = params;
            return tree_to_json(discretize_model(name, resolve_params(c), periods, branching, horizon));
        },
        py::arg("name"), py::arg("params") = std::map<std::string, double>{}, py::arg("periods") = 3,
        py::arg("branching") = 1, py::arg("horizon") = 1.0);

    m.def(
        "validate_config_json", [](const std::string& path) { return config_to_json(load_config(path)); },
        py::arg("path"));

    m.def(
        "run_experiment_json",
        [](const std::string& path, std::optional<std::string> out_dir, std::optional<std::uint64_t> seed,
           unsigned threads) {
            auto cfg = load_config(path);
            py::gil_scoped_release release;
            return run_experiment(cfg, {out_dir, seed, threads}).report_json;
        },
        py::arg("config"), py::arg("out_dir") = py::none(), py::arg("seed") = py::none(), py::arg("threads") = 1);
}
