#pragma once

#include "convarb/models.hpp"
#include "convarb/structure.hpp"

#include <string>
#include <vector>

namespace convarb {

/// D* = E(-int a1 dM1) E(-int a2 dM2) per grid point.
struct DensityPath {
    std::vector<double> values;
    std::vector<double> factor1, factor2;
    bool positive = true;  // every jump term -a dM > -1
};

/// Throws ConstructionRefused("C1 fails") when a2 is undefined.
DensityPath build_density(const DecomposedPath& path, const std::vector<double>& a1_tilde, const C1C2Result& c12);

/// Single Doléans factor E(-int a dM).
std::vector<double> density_factor(const MartingalePart& m, const std::vector<double>& a);

enum class Verdict { pass, fail, inconclusive };
const char* to_string(Verdict v);

struct MCVerdict {
    double estimate = 0.0;
    double stderr_ = 0.0;
    std::size_t samples = 0;
    std::size_t refused = 0;  // paths where the density could not be built
    Verdict verdict = Verdict::inconclusive;
};

/// pass iff |estimate - target| <= k stderr; inconclusive when stderr > 0.2 |estimate|
/// or no sample survived.
MCVerdict mc_verdict(std::span<const double> samples, double target, double k_sigma, std::size_t refused);

inline constexpr double kDefaultKSigma = 3.0;

struct DensitySample {
    bool refused = false;
    std::vector<double> at_checkpoints;   // D*_t
    std::vector<double> X_weighted, Y_weighted;  // D*_t X_t, D*_t Y_t
};

/// Grid indices of the checkpoint times (largest point <= t).
std::vector<std::size_t> checkpoint_indices(const TimeGrid& grid, const std::vector<double>& times);

/// Simulates path i, builds D* and samples it at the checkpoints.
DensitySample sample_density(const ModelConfig& cfg, std::uint64_t path_index, const std::vector<double>& checkpoints);

std::vector<DensitySample> sample_densities(const ModelConfig& cfg, std::size_t n_paths,
                                            const std::vector<double>& checkpoints, unsigned threads);

MCVerdict verify_C3(const ModelConfig& cfg, std::size_t n_paths, double k_sigma = kDefaultKSigma, unsigned threads = 1);
MCVerdict verify_C3(const std::vector<DensitySample>& samples, double k_sigma = kDefaultKSigma);

struct SupermartingaleCheck {
    std::string asset;
    std::vector<double> checkpoints;
    std::vector<double> means;         // E[D*_t Z_t]
    std::vector<MCVerdict> increments;  // consecutive differences, target <= 0
    bool pass = true;
};

/// Default checkpoints: 5 equally spaced times on [0, horizon].
std::vector<double> default_checkpoints(double horizon, std::size_t count = 5);

std::vector<SupermartingaleCheck> verify_supermartingale(const ModelConfig& cfg, std::size_t n_paths,
                                                         const std::vector<double>& checkpoints,
                                                         double k_sigma = kDefaultKSigma, unsigned threads = 1);
std::vector<SupermartingaleCheck> verify_supermartingale(const std::vector<DensitySample>& samples,
                                                         const std::vector<double>& checkpoints,
                                                         double k_sigma = kDefaultKSigma);

}  // namespace convarb
