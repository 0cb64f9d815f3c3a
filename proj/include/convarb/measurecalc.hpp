#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace convarb {

/// Signed mass per grid step of a finite-variation process.
struct DiscreteMeasure {
    std::vector<double> mass;

    DiscreteMeasure() = default;
    explicit DiscreteMeasure(std::size_t n) : mass(n, 0.0) {}
    explicit DiscreteMeasure(std::vector<double> m) : mass(std::move(m)) {}

    std::size_t size() const { return mass.size(); }
    double operator[](std::size_t i) const { return mass[i]; }
    double& operator[](std::size_t i) { return mass[i]; }
    double total_variation() const;
    double total() const;
};

/// target = density * reference + singular, cellwise.
struct LebesgueSplit {
    std::vector<double> density;
    DiscreteMeasure absolutely_continuous;  // target on cells where the reference is charged
    DiscreteMeasure singular;
    DiscreteMeasure reference;
};

/// Null-mass threshold relative to a measure's total variation.
inline constexpr double kRelativeNullMass = 1e-12;
double default_tol(const DiscreteMeasure& reference);

LebesgueSplit lebesgue_decompose(const DiscreteMeasure& target, const DiscreteMeasure& reference,
                                 double tol);

bool is_orthogonal(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double tol);

struct PositivityVerdict {
    bool ok = true;
    std::vector<std::size_t> violation_cells;
};

/// Cells where mu1 is null but mu2 charges: (mu1 - mu2) cannot be a positive measure there.
PositivityVerdict difference_positivity_check(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                                              double tol);

enum class Monotonicity { increasing, decreasing, neither };

struct MonotoneSplit {
    Monotonicity kind = Monotonicity::increasing;
    DiscreteMeasure increasing_part;  // A
    DiscreteMeasure decreasing_part;  // a, with dA orthogonal to da
};

/// Jordan split v = A - a; the zero measure is reported as increasing.
MonotoneSplit monotone_classify(const DiscreteMeasure& v, double tol);

const char* to_string(Monotonicity m);

}  // namespace convarb
