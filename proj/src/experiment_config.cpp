#include "convarb/experiment.hpp"

#include "convarb/error.hpp"
#include "convarb/treeoracle.hpp"
#include "json_util.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace convarb {

using detail::ojson;
namespace fs = std::filesystem;

namespace {

const std::set<std::string> kAnalyses{"structure", "arbitrage", "density", "covariation_rule"};

void reject_unknown(const ojson& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [k, v] : obj.items()) {
        if (!allowed.contains(k)) throw DomainError(where + ": unknown key '" + k + "'");
    }
}

template <class T>
T field(const ojson& obj, const char* key, const std::string& where) {
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw DomainError(where + ": field '" + key + "' is missing or has the wrong type");
    }
}

template <class T>
T field_or(const ojson& obj, const char* key, T fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    return field<T>(obj, key, where);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

ExperimentConfig parse_config(const std::string& text, const std::string& base_dir) {
    const ojson doc = detail::parse_json(text, "config");
    if (!doc.is_object()) throw DomainError("config must be a JSON object");
    reject_unknown(doc,
                   {"schema_version", "experiment", "model", "n_paths", "seed", "analyses", "density", "oracle",
                    "output_dir", "export_paths"},
                   "config");
    const int version = field<int>(doc, "schema_version", "config");
    if (version != kSchemaVersion) {
        throw DomainError("config: unsupported schema_version " + std::to_string(version) + " (expected " +
                          std::to_string(kSchemaVersion) + ")");
    }
    ExperimentConfig cfg;
    cfg.base_dir = base_dir;
    cfg.experiment = field<std::string>(doc, "experiment", "config");
    if (cfg.experiment.empty()) throw DomainError("config: experiment name is empty");

    if (!doc.contains("model") || !doc["model"].is_object()) throw DomainError("config: 'model' object is required");
    const ojson& m = doc["model"];
    reject_unknown(m, {"name", "params", "grid", "mode"}, "model");
    cfg.model.name = field<std::string>(m, "name", "model");
    model_info(cfg.model.name);
    if (m.contains("params")) {
        if (!m["params"].is_object()) throw DomainError("model: 'params' must be an object");
        for (const auto& [k, v] : m["params"].items()) {
            if (!v.is_number()) throw DomainError("model: parameter '" + k + "' must be a number");
            cfg.model.params[k] = v.get<double>();
        }
    }
    if (m.contains("grid")) {
        const ojson& g = m["grid"];
        reject_unknown(g, {"horizon", "n_steps"}, "grid");
        cfg.model.grid.horizon = field_or<double>(g, "horizon", cfg.model.grid.horizon, "grid");
        const auto steps = field_or<std::int64_t>(g, "n_steps", 200, "grid");
        if (steps < 1) throw DomainError("grid: n_steps must be >= 1");
        cfg.model.grid.n_steps = static_cast<std::size_t>(steps);
    }
    cfg.model.mode = simulation_mode_from_string(field_or<std::string>(m, "mode", "analytic", "model"));

    const auto n_paths = field<std::int64_t>(doc, "n_paths", "config");
    if (n_paths < 1) throw DomainError("config: n_paths must be >= 1");
    cfg.n_paths = static_cast<std::size_t>(n_paths);
    if (!doc.contains("seed") || !doc["seed"].is_number_integer() || (!doc["seed"].is_number_unsigned() && doc["seed"].get<std::int64_t>() < 0)) {
        throw DomainError("config: seed must be a non-negative integer");
    }
    cfg.model.seed = doc["seed"].get<std::uint64_t>();

    const auto analyses = field<std::vector<std::string>>(doc, "analyses", "config");
    if (analyses.empty()) throw DomainError("config: analyses must not be empty");
    for (const auto& a : analyses) {
        if (!kAnalyses.contains(a)) {
            throw DomainError("config: unknown analysis '" + a + "' (expected structure, arbitrage, density, covariation_rule)");
        }
        if (std::find(cfg.analyses.begin(), cfg.analyses.end(), a) == cfg.analyses.end()) cfg.analyses.push_back(a);
    }

    if (doc.contains("density")) {
        const ojson& d = doc["density"];
        reject_unknown(d, {"k_sigma", "checkpoints"}, "density");
        cfg.density.k_sigma = field_or<double>(d, "k_sigma", 3.0, "density");
        const auto cps = field_or<std::int64_t>(d, "checkpoints", 5, "density");
        if (!(cfg.density.k_sigma > 0.0)) throw DomainError("density: k_sigma must be > 0");
        if (cps < 2) throw DomainError("density: checkpoints must be >= 2");
        cfg.density.checkpoints = static_cast<std::size_t>(cps);
    }

    if (doc.contains("oracle") && !doc["oracle"].is_null()) {
        const ojson& o = doc["oracle"];
        reject_unknown(o, {"tree_file", "discretize"}, "oracle");
        OracleSpec spec;
        if (o.contains("tree_file") == o.contains("discretize")) {
            throw DomainError("oracle: give exactly one of tree_file or discretize");
        }
        if (o.contains("tree_file")) {
            const auto file = field<std::string>(o, "tree_file", "oracle");
            spec.tree_file = file;
            const fs::path resolved = fs::path(base_dir) / file;
            if (!fs::exists(resolved)) throw DomainError("oracle: tree file " + resolved.string() + " does not exist");
        } else {
            const ojson& d = o["discretize"];
            reject_unknown(d, {"periods", "branching"}, "oracle.discretize");
            spec.periods = field_or<int>(d, "periods", 3, "oracle.discretize");
            spec.branching = field_or<int>(d, "branching", 1, "oracle.discretize");
            if (spec.periods < 1 || spec.periods > kMaxPeriods) throw DomainError("oracle.discretize: periods must lie in [1, 6]");
            if (spec.branching < 1 || spec.branching > kMaxBranching) {
                throw DomainError("oracle.discretize: branching must lie in [1, 3]");
            }
        }
        cfg.oracle = spec;
    }
    cfg.output_dir = field_or<std::string>(doc, "output_dir", "out/" + cfg.experiment, "config");
    const auto exports = field_or<std::int64_t>(doc, "export_paths", 3, "config");
    if (exports < 0) throw DomainError("config: export_paths must be >= 0");
    cfg.export_paths = static_cast<std::size_t>(exports);

    resolve_params(cfg.model);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    const std::string text = read_file(path);
    const fs::path dir = fs::path(path).parent_path();
    return parse_config(text, dir.empty() ? "." : dir.string());
}

std::string config_to_json(const ExperimentConfig& cfg) {
    ojson doc;
    doc["schema_version"] = kSchemaVersion;
    doc["experiment"] = cfg.experiment;
    ojson params = ojson::object();
    for (const auto& [k, v] : resolve_params(cfg.model)) params[k] = v;
    doc["model"] = {{"name", cfg.model.name},
                    {"params", params},
                    {"grid", {{"horizon", cfg.model.grid.horizon}, {"n_steps", cfg.model.grid.n_steps}}},
                    {"mode", to_string(cfg.model.mode)}};
    doc["n_paths"] = cfg.n_paths;
    doc["seed"] = cfg.model.seed;
    doc["analyses"] = cfg.analyses;
    doc["density"] = {{"k_sigma", cfg.density.k_sigma}, {"checkpoints", cfg.density.checkpoints}};
    if (cfg.oracle) {
        if (cfg.oracle->tree_file) {
            doc["oracle"] = {{"tree_file", *cfg.oracle->tree_file}};
        } else {
            doc["oracle"] = {{"discretize", {{"periods", cfg.oracle->periods}, {"branching", cfg.oracle->branching}}}};
        }
    } else {
        doc["oracle"] = nullptr;
    }
    doc["output_dir"] = cfg.output_dir;
    doc["export_paths"] = cfg.export_paths;
    return doc.dump(2);
}

std::string models_json() {
    ojson list = ojson::array();
    for (const auto& m : model_catalog()) {
        ojson params = ojson::array();
        for (const auto& p : m.params) {
            params.push_back({{"name", p.name}, {"default", p.default_value}, {"domain", p.domain}});
        }
        list.push_back({{"name", m.name},
                        {"reference", m.reference},
                        {"summary", m.summary},
                        {"converging", m.converging},
                        {"params", params}});
    }
    return list.dump(2) + "\n";
}

std::string run_oracle(const std::string& path, const std::optional<std::string>& out_dir) {
    const std::string text = read_file(path);
    const ojson doc = detail::parse_json(text, path);
    MarketTree tree;
    if (doc.is_object() && doc.contains("nodes")) {
        tree = parse_tree(text);
    } else {
        const fs::path dir = fs::path(path).parent_path();
        const ExperimentConfig cfg = parse_config(text, dir.empty() ? "." : dir.string());
        if (!cfg.oracle) throw DomainError("config has no oracle section");
        if (cfg.oracle->tree_file) {
            tree = load_tree((fs::path(cfg.base_dir) / *cfg.oracle->tree_file).string());
        } else {
            tree = discretize_model(cfg.model.name, cfg.model.params, cfg.oracle->periods, cfg.oracle->branching,
                                    cfg.model.grid.horizon);
        }
    }
    const OracleResult result = solve(tree);
    const std::string json = result_to_json(tree, result, verify(tree, result));
    if (out_dir) {
        std::error_code ec;
        fs::create_directories(*out_dir, ec);
        std::ofstream out(fs::path(*out_dir) / "oracle.json", std::ios::binary);
        if (!out || !(out << json)) throw IoError("cannot write oracle.json under " + *out_dir);
    }
    return json;
}

}  // namespace convarb
