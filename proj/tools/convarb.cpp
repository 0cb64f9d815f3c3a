#include "convarb/error.hpp"
#include "convarb/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <thread>

namespace {

enum Exit { kOk = 0, kValidation = 1, kInvariant = 2, kIo = 3 };

int report(const char* kind, const std::exception& e, int code) {
    std::cerr << "convarb: " << kind << ": " << e.what() << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Converging-prices arbitrage analyzer"};
    app.require_subcommand(1);

    std::string config;
    std::string out;
    std::uint64_t seed = 0;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());

    auto* run = app.add_subcommand("run", "Run an experiment config and write the report");
    run->add_option("--config", config, "Experiment config (JSON)")->required();
    auto* out_opt = run->add_option("--out", out, "Output directory (overrides the config)");
    auto* seed_opt = run->add_option("--seed", seed, "Seed (overrides the config)");
    run->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

    auto* models = app.add_subcommand("models", "List the model catalog");

    auto* oracle = app.add_subcommand("oracle", "Solve a tree file or the oracle section of a config");
    oracle->add_option("--config", config, "Tree file or experiment config (JSON)")->required();
    auto* oracle_out = oracle->add_option("--out", out, "Directory for oracle.json");

    auto* validate = app.add_subcommand("validate", "Validate an experiment config");
    validate->add_option("--config", config, "Experiment config (JSON)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }

    try {
        if (*run) {
            convarb::RunOptions opts;
            if (*out_opt) opts.out_dir = out;
            if (*seed_opt) opts.seed = seed;
            opts.threads = threads;
            const auto res = convarb::run_experiment(convarb::load_config(config), opts);
            std::cout << "report written to " << res.output_dir << "/report.json\n";
        } else if (*models) {
            std::cout << convarb::models_json();
        } else if (*oracle) {
            std::cout << convarb::run_oracle(config, *oracle_out ? std::optional<std::string>(out) : std::nullopt);
        } else if (*validate) {
            const auto cfg = convarb::load_config(config);
            std::cout << convarb::config_to_json(cfg) << "\nconfig ok\n";
        }
    } catch (const convarb::IoError& e) {
        return report("I/O error", e, kIo);
    } catch (const convarb::InvariantViolation& e) {
        return report("invariant violation", e, kInvariant);
    } catch (const convarb::DomainError& e) {
        return report("validation error", e, kValidation);
    } catch (const convarb::PreconditionError& e) {
        return report("validation error", e, kValidation);
    } catch (const std::exception& e) {
        return report("error", e, kInvariant);
    }
    return kOk;
}
