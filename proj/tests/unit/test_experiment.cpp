#include <gtest/gtest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "convarb/error.hpp"
#include "convarb/experiment.hpp"

using namespace convarb;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kSource = CONVARB_SOURCE_DIR;
const std::string kCli = CONVARB_CLI;

json base_config() {
    return json::parse(R"({
      "schema_version": 1,
      "experiment": "unit",
      "model": {"name": "survival_claim", "params": {"lambda_x": 0.1, "lambda_y": 0.2},
                "grid": {"horizon": 1.0, "n_steps": 50}, "mode": "analytic"},
      "n_paths": 40,
      "seed": 5,
      "analyses": ["structure", "arbitrage", "density", "covariation_rule"],
      "output_dir": "out/unit",
      "export_paths": 1
    })");
}

std::string read(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("convarb_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int cli(const std::string& args) {
    std::string cmd = kCli + " " + args + " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

void expect_invalid(json j, const std::string& fragment) {
    try {
        parse_config(j.dump());
        FAIL() << "accepted config: " << j.dump();
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
    }
}

}  // namespace

TEST(Config, ParsesBase) {
    auto c = parse_config(base_config().dump());
    EXPECT_EQ(c.experiment, "unit");
    EXPECT_EQ(c.model.name, "survival_claim");
    EXPECT_EQ(c.model.grid.n_steps, 50u);
    EXPECT_EQ(c.model.seed, 5u);
    EXPECT_EQ(c.n_paths, 40u);
    EXPECT_EQ(c.analyses.size(), 4u);
}

TEST(Config, Rejects) {
    auto j = base_config();
    j["bogus"] = 1;
    expect_invalid(j, "unknown key 'bogus'");
    j = base_config();
    j["n_paths"] = 0;
    expect_invalid(j, "n_paths");
    j = base_config();
    j["analyses"] = json::array();
    expect_invalid(j, "analyses");
    j = base_config();
    j["analyses"] = {"magic"};
    expect_invalid(j, "unknown analysis");
    j = base_config();
    j["schema_version"] = 9;
    expect_invalid(j, "schema_version");
    j = base_config();
    j["model"]["name"] = "nope";
    expect_invalid(j, "catalog");
    j = base_config();
    j["model"]["params"]["lambda_x"] = -1;
    expect_invalid(j, "lambda_x");
    j = base_config();
    j["model"]["mode"] = "exact";
    expect_invalid(j, "exact");
    j = base_config();
    j["oracle"] = {{"tree_file", "missing.json"}};
    expect_invalid(j, "does not exist");
    j = base_config();
    j["oracle"] = {{"discretize", {{"periods", 9}, {"branching", 1}}}};
    expect_invalid(j, "periods");
    j = base_config();
    j.erase("model");
    expect_invalid(j, "model");
}

TEST(Config, MalformedJsonHasLineContext) {
    try {
        parse_config("{\n  \"experiment\": \"x\",\n  oops\n}");
        FAIL();
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

TEST(Config, CanonicalJsonStable) {
    auto a = parse_config(base_config().dump());
    auto j = base_config();
    j["model"]["params"] = {{"lambda_y", 0.2}, {"lambda_x", 0.1}};
    auto b = parse_config(j.dump(2));
    EXPECT_EQ(config_to_json(a), config_to_json(b));
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
}

TEST(Config, ShippedConfigsLoad) {
    int n = 0;
    for (const auto& e : fs::directory_iterator(kSource + "/configs")) {
        EXPECT_NO_THROW(load_config(e.path().string())) << e.path();
        ++n;
    }
    EXPECT_GE(n, 8);
    EXPECT_THROW(load_config("/nonexistent/config.json"), IoError);
}

TEST(Models, CatalogJson) {
    auto j = json::parse(models_json());
    ASSERT_TRUE(j.is_array());
    ASSERT_EQ(j.size(), 8u);
    for (const auto& m : j) {
        EXPECT_TRUE(m.contains("name"));
        EXPECT_FALSE(m["reference"].get<std::string>().empty());
    }
}

TEST(Run, ReportEmbedsConfigAndIsDeterministic) {
    auto cfg = parse_config(base_config().dump());
    auto d1 = scratch("run1"), d4 = scratch("run4");
    RunOptions o1{d1.string(), std::nullopt, 1}, o4{d4.string(), std::nullopt, 4};
    run_experiment(cfg, o1);
    run_experiment(cfg, o4);
    for (const char* f : {"report.json", "per_path.csv", "density_curve.csv", "paths/path_0_prices.csv",
                          "paths/path_0_ledger.csv", "paths/path_0_increments.csv"}) {
        ASSERT_TRUE(fs::exists(d1 / f)) << f;
        EXPECT_EQ(read(d1 / f), read(d4 / f)) << f;
    }
    auto r = json::parse(read(d1 / "report.json"));
    EXPECT_EQ(r["config"], json::parse(config_to_json(cfg)));
    EXPECT_EQ(r["provenance"]["seed"], 5);
    EXPECT_EQ(r["provenance"]["config_hash"].get<std::string>().rfind("fnv1a64:", 0), 0u);
    EXPECT_EQ(r["analyses"]["structure"]["C1_fails"], 0);
    EXPECT_EQ(r["analyses"]["arbitrage"]["nonempty_windows"], 0);
    EXPECT_EQ(r["analyses"]["covariation_rule"]["status"], "ok");
}

TEST(Run, SeedOverrideChangesReport) {
    auto cfg = parse_config(base_config().dump());
    auto a = scratch("seed_a"), b = scratch("seed_b");
    run_experiment(cfg, {a.string(), std::nullopt, 1});
    run_experiment(cfg, {b.string(), 77, 1});
    auto ra = json::parse(read(a / "report.json")), rb = json::parse(read(b / "report.json"));
    EXPECT_EQ(rb["provenance"]["seed"], 77);
    EXPECT_NE(ra["analyses"]["density"], rb["analyses"]["density"]);
}

TEST(Run, CovariationSkippedWhenM2Present) {
    auto j = base_config();
    j["model"] = {{"name", "risk_attitudes"}, {"grid", {{"horizon", 2.0}, {"n_steps", 40}}}};
    j["analyses"] = {"covariation_rule"};
    auto d = scratch("skip");
    run_experiment(parse_config(j.dump()), {d.string(), std::nullopt, 1});
    auto r = json::parse(read(d / "report.json"));
    EXPECT_EQ(r["analyses"]["covariation_rule"]["status"], "skipped");
    EXPECT_FALSE(r["analyses"]["covariation_rule"]["reason"].get<std::string>().empty());
}

TEST(Run, PredictableDefaultRefusesDensity) {
    auto j = base_config();
    j["model"] = {{"name", "predictable_default_variant"}, {"grid", {{"horizon", 1.0}, {"n_steps", 50}}}};
    j["analyses"] = {"structure", "arbitrage", "density"};
    auto d = scratch("refuse");
    run_experiment(parse_config(j.dump()), {d.string(), std::nullopt, 1});
    auto r = json::parse(read(d / "report.json"));
    EXPECT_EQ(r["analyses"]["density"]["status"], "refused");
    EXPECT_EQ(r["analyses"]["density"]["reason"], "C1 fails");
    EXPECT_EQ(r["analyses"]["structure"]["C1_fails"], 40);
}

TEST(Oracle, ShippedTrees) {
    auto up = json::parse(run_oracle(kSource + "/data/trees/one_period_up.json", std::nullopt));
    EXPECT_EQ(up["feasible"], false);
    EXPECT_EQ(up["verified"], true);
    EXPECT_FALSE(up["certificate"].is_null());
    auto d = scratch("oracle");
    auto sv = json::parse(run_oracle(kSource + "/data/trees/survival_tree.json", d.string()));
    EXPECT_EQ(sv["feasible"], true);
    EXPECT_EQ(sv["verified"], true);
    EXPECT_FALSE(sv["measure"].is_null());
    EXPECT_TRUE(fs::exists(d / "oracle.json"));
}

TEST(Oracle, CorruptFileHasLineContext) {
    auto d = scratch("corrupt");
    std::ofstream(d / "bad.json") << "{\n  \"nodes\": [\n    {\"id\": 0,,}\n  ]\n}\n";
    try {
        run_oracle((d / "bad.json").string(), std::nullopt);
        FAIL();
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

TEST(Cli, ExitCodes) {
    auto d = scratch("cli");
    EXPECT_EQ(cli("models"), 0);
    EXPECT_EQ(cli("validate --config " + kSource + "/configs/survival_claim.json"), 0);
    EXPECT_EQ(cli("oracle --config " + kSource + "/data/trees/one_period_up.json --out " + d.string()), 0);

    auto bad = base_config();
    bad["n_paths"] = 0;
    std::ofstream(d / "bad.json") << bad.dump();
    EXPECT_EQ(cli("validate --config " + (d / "bad.json").string()), 1);
    EXPECT_EQ(cli("run --config " + (d / "bad.json").string()), 1);
    EXPECT_EQ(cli("run --bogus-flag"), 1);
    EXPECT_EQ(cli("run --config " + (d / "absent.json").string()), 3);

    auto ok = base_config();
    ok["n_paths"] = 5;
    std::ofstream(d / "ok.json") << ok.dump();
    EXPECT_EQ(cli("run --config " + (d / "ok.json").string() + " --out " + (d / "out").string() + " --seed 3 --threads 2"), 0);
    EXPECT_TRUE(fs::exists(d / "out" / "report.json"));
    std::ofstream(d / "blocker") << "x";
    EXPECT_EQ(cli("run --config " + (d / "ok.json").string() + " --out " + (d / "blocker" / "sub").string()), 3);
}
