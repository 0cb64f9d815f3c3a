#pragma once

#include "convarb/models.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace convarb {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

struct OracleSpec {
    std::optional<std::string> tree_file;  // resolved against the config directory
    int periods = 3;
    int branching = 1;
};

struct DensitySpec {
    double k_sigma = 3.0;
    std::size_t checkpoints = 5;
};

struct ExperimentConfig {
    std::string experiment;
    ModelConfig model;
    std::size_t n_paths = 1;
    std::vector<std::string> analyses;  // subset of structure, arbitrage, density, covariation_rule
    DensitySpec density;
    std::optional<OracleSpec> oracle;
    std::string output_dir = "out";
    std::size_t export_paths = 3;  // per-path CSVs written for the first paths
    std::string base_dir = ".";
};

/// Parses and validates; throws DomainError with a readable diagnostic.
ExperimentConfig parse_config(const std::string& json_text, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);
/// Canonical JSON of a config (key order fixed), embedded in every report.
std::string config_to_json(const ExperimentConfig& cfg);

std::uint64_t fnv1a64(const std::string& bytes);

struct RunOptions {
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
};

struct RunOutcome {
    std::string output_dir;
    std::string report_json;
};

/// Runs every requested analysis and writes report.json plus CSVs. Throws
/// InvariantViolation when a simulated path breaks its invariants and IoError on
/// write failures.
RunOutcome run_experiment(ExperimentConfig cfg, const RunOptions& opts);

/// Model catalog as JSON.
std::string models_json();

/// Solves the tree in a tree file, or the oracle section of an experiment config.
/// Returns the result JSON (with its verify() stamp) and writes oracle.json under out_dir when set.
std::string run_oracle(const std::string& path, const std::optional<std::string>& out_dir);

}  // namespace convarb
