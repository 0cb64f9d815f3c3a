#include "convarb/structure.hpp"

#include "convarb/error.hpp"

#include <algorithm>
#include <cmath>

namespace convarb {

namespace {

double pick(double tol, const DiscreteMeasure& m) { return tol >= 0.0 ? tol : default_tol(m); }

double pick(double tol, const DiscreteMeasure& a, const DiscreteMeasure& b) {
    if (tol >= 0.0) return tol;
    return kRelativeNullMass * std::max(a.total_variation(), b.total_variation());
}

}  // namespace

const char* to_string(NormalFormVerdict v) {
    switch (v) {
        case NormalFormVerdict::normal_form: return "normal_form";
        case NormalFormVerdict::J_not_decreasing: return "J_not_decreasing";
        case NormalFormVerdict::singularity_violated: return "singularity_violated";
    }
    return "?";
}

NormalFormResult check_normal_form(const DecomposedPath& p, double tol) {
    NormalFormResult r;
    const std::size_t n = p.steps();

    const double tx = pick(tol, p.dJX, p.MX.qv);
    const double tqx = tol >= 0.0 ? tol : 0.0;
    if (std::any_of(p.dJX.mass.begin(), p.dJX.mass.end(), [&](double v) { return v > tx; })) {
        r.X = NormalFormVerdict::J_not_decreasing;
    } else if (!is_orthogonal(p.dJX, p.MX.qv, tx)) {
        r.X = NormalFormVerdict::singularity_violated;
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            if (p.MX.qv[i] <= tqx && p.dWX[i] > tx) {
                r.X = NormalFormVerdict::J_not_decreasing;
                break;
            }
        }
    }

    const DiscreteMeasure qv = p.qv_MY();
    const DiscreteMeasure dv = p.dVY();
    const double ty = pick(tol, dv, qv);
    const double tqy = tol >= 0.0 ? tol : 0.0;
    if (std::any_of(p.dJY.mass.begin(), p.dJY.mass.end(), [&](double v) { return v > ty; })) {
        r.Y = NormalFormVerdict::J_not_decreasing;
    } else if (p.meta.normal_form_violated || !is_orthogonal(p.dJY, qv, ty)) {
        r.Y = NormalFormVerdict::singularity_violated;
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            if (qv[i] <= tqy && dv[i] - p.dJY[i] > ty) {
                r.Y = NormalFormVerdict::J_not_decreasing;
                break;
            }
        }
    }
    return r;
}

ASplit split_A(const DecomposedPath& p, double tol) {
    const std::size_t n = p.steps();
    DiscreteMeasure ref(n);
    for (std::size_t i = 0; i < n; ++i) ref[i] = std::max(p.h[i], 0.0) * p.MX.qv[i];
    const double tr = pick(tol, ref);
    const LebesgueSplit s = lebesgue_decompose(p.dA, ref, tr);
    ASplit out;
    out.A1 = DiscreteMeasure(n);
    out.A2 = DiscreteMeasure(n);
    for (std::size_t i = 0; i < n; ++i) (ref[i] > tr ? out.A1 : out.A2)[i] = p.dA[i];
    out.a1_tilde.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (out.A1[i] == 0.0) continue;
        const double a = s.density[i] / p.h[i];
        if (!(a >= 0.0) || !std::isfinite(a)) {
            throw InvariantViolation("split_A: a1 density " + std::to_string(a) + " at step " + std::to_string(i));
        }
        out.a1_tilde[i] = a;
    }
    return out;
}

C1C2Result check_C1_C2(const DecomposedPath& p, const DiscreteMeasure& A2, double tol) {
    const std::size_t n = p.steps();
    const double tq = pick(tol, p.M2.qv);
    const LebesgueSplit s = lebesgue_decompose(A2, p.M2.qv, tq);
    const double mass_tol = pick(tol, p.dA);
    C1C2Result r;
    r.a2_tilde.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (p.M2.qv[i] > tq) r.a2_tilde[i] = s.density[i];
        else if (A2[i] > mass_tol) r.C1_cells.push_back(i);
    }
    r.C1 = r.C1_cells.empty();
    const double jt = tol >= 0.0 ? tol : 0.0;
    for (const Jump& j : p.M2.jumps) {
        if (!(r.a2_tilde[j.step] * j.size < 1.0 - jt)) r.C2_jumps.push_back(j.step);
    }
    r.C2 = r.C2_jumps.empty();
    return r;
}

bool jump_condition_a1(const DecomposedPath& p, const std::vector<double>& a1_tilde, double tol) {
    for (const Jump& j : p.M1.jumps) {
        if (!(a1_tilde[j.step] * j.size < 1.0 - tol)) return false;
    }
    return true;
}

StructureReport analyze_structure(const DecomposedPath& p, double tol) {
    StructureReport r;
    r.normal_form = check_normal_form(p, tol);
    r.split = split_A(p, tol);
    r.c12 = check_C1_C2(p, r.split.A2, tol);
    r.jump_condition_a1 = jump_condition_a1(p, r.split.a1_tilde, tol >= 0.0 ? tol : 0.0);
    return r;
}

CovariationVerdict covariation_rule(const DecomposedPath& p, double tol) {
    const std::size_t n = p.steps();
    for (std::size_t i = 0; i < n; ++i) {
        if (p.M2.increments[i] != 0.0) {
            throw PreconditionError("covariation_rule requires dM2 == 0; step " + std::to_string(i) + " has " +
                                    std::to_string(p.M2.increments[i]));
        }
    }
    DiscreteMeasure cov(n);
    for (std::size_t i = 0; i < n; ++i) cov[i] = p.h[i] * p.MX.qv[i];
    const DiscreteMeasure dv = p.dVY();
    const double tc = pick(tol, cov);
    const double tv = pick(tol, dv);
    CovariationVerdict r;
    for (std::size_t i = 0; i < n; ++i) {
        if (cov[i] <= tc && dv[i] > tv) r.violation_cells.push_back(i);
    }
    r.holds = r.violation_cells.empty();
    return r;
}

}  // namespace convarb
