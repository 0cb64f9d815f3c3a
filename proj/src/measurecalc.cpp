#include "convarb/measurecalc.hpp"

#include "convarb/error.hpp"

#include <cmath>

namespace convarb {

double DiscreteMeasure::total_variation() const {
    double s = 0.0;
    for (double m : mass) s += std::abs(m);
    return s;
}

double DiscreteMeasure::total() const {
    double s = 0.0;
    for (double m : mass) s += m;
    return s;
}

double default_tol(const DiscreteMeasure& reference) {
    return kRelativeNullMass * reference.total_variation();
}

namespace {

void require_same_grid(const DiscreteMeasure& a, const DiscreteMeasure& b, const char* op) {
    if (a.size() != b.size()) throw DomainError(std::string(op) + ": measures live on different grids");
}

// Smallest-magnitude adjustment of t/r so that density * r reproduces t exactly.
double exact_ratio(double t, double r) {
    double d = t / r;
    if (d * r == t) return d;
    double up = d, down = d;
    for (int k = 0; k < 4; ++k) {
        up = std::nextafter(up, INFINITY);
        if (up * r == t) return up;
        down = std::nextafter(down, -INFINITY);
        if (down * r == t) return down;
    }
    return d;
}

}  // namespace

LebesgueSplit lebesgue_decompose(const DiscreteMeasure& target, const DiscreteMeasure& reference,
                                 double tol) {
    require_same_grid(target, reference, "lebesgue_decompose");
    const std::size_t n = target.size();
    LebesgueSplit out;
    out.density.assign(n, 0.0);
    out.absolutely_continuous = DiscreteMeasure(n);
    out.singular = DiscreteMeasure(n);
    out.reference = reference;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = reference[i];
        if (r < 0.0) throw DomainError("lebesgue_decompose: negative reference mass");
        if (r > tol) {
            out.density[i] = exact_ratio(target[i], r);
            out.absolutely_continuous[i] = out.density[i] * r;
            // sub-ulp remainder when no double density reproduces the target
            out.singular[i] = target[i] - out.absolutely_continuous[i];
        } else {
            out.singular[i] = target[i];
        }
    }
    return out;
}

bool is_orthogonal(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double tol) {
    require_same_grid(mu, nu, "is_orthogonal");
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (std::min(std::abs(mu[i]), std::abs(nu[i])) > tol) return false;
    }
    return true;
}

PositivityVerdict difference_positivity_check(const DiscreteMeasure& mu1, const DiscreteMeasure& mu2,
                                              double tol) {
    require_same_grid(mu1, mu2, "difference_positivity_check");
    PositivityVerdict v;
    for (std::size_t i = 0; i < mu1.size(); ++i) {
        if (mu1[i] <= tol && mu2[i] > tol) v.violation_cells.push_back(i);
    }
    v.ok = v.violation_cells.empty();
    return v;
}

MonotoneSplit monotone_classify(const DiscreteMeasure& v, double tol) {
    const std::size_t n = v.size();
    MonotoneSplit out;
    out.increasing_part = DiscreteMeasure(n);
    out.decreasing_part = DiscreteMeasure(n);
    bool up = false, down = false;
    for (std::size_t i = 0; i < n; ++i) {
        if (v[i] > 0.0) out.increasing_part[i] = v[i];
        if (v[i] < 0.0) out.decreasing_part[i] = -v[i];
        up = up || v[i] > tol;
        down = down || v[i] < -tol;
    }
    if (up && down) out.kind = Monotonicity::neither;
    else if (down) out.kind = Monotonicity::decreasing;
    else out.kind = Monotonicity::increasing;
    return out;
}

const char* to_string(Monotonicity m) {
    switch (m) {
        case Monotonicity::increasing: return "increasing";
        case Monotonicity::decreasing: return "decreasing";
        case Monotonicity::neither: return "neither";
    }
    return "?";
}

}  // namespace convarb
