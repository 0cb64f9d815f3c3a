#pragma once

#include "convarb/models.hpp"

#include <vector>

namespace convarb {

enum class NormalFormVerdict { normal_form, J_not_decreasing, singularity_violated };
const char* to_string(NormalFormVerdict v);

struct NormalFormResult {
    NormalFormVerdict X = NormalFormVerdict::normal_form;
    NormalFormVerdict Y = NormalFormVerdict::normal_form;
};

/// Negative tol selects the automatic threshold kRelativeNullMass * total variation
/// of the measure being compared.
inline constexpr double kAutoTol = -1.0;

NormalFormResult check_normal_form(const DecomposedPath& path, double tol = kAutoTol);

struct ASplit {
    DiscreteMeasure A1, A2;
    std::vector<double> a1_tilde;  // zero where h <= 0
};

/// dA = A1 + A2 with A1 << h+ d<M^X> and A2 singular to it. Throws
/// InvariantViolation on a negative density.
ASplit split_A(const DecomposedPath& path, double tol = kAutoTol);

struct C1C2Result {
    bool C1 = true;
    std::vector<std::size_t> C1_cells;  // cells where A2 charges a d<M2>-null cell
    std::vector<double> a2_tilde;
    bool C2 = true;
    std::vector<std::size_t> C2_jumps;  // steps of M2 jumps with a2 dM2 >= 1
};

C1C2Result check_C1_C2(const DecomposedPath& path, const DiscreteMeasure& A2, double tol = kAutoTol);

/// a1 dM1 < 1 on every marked jump of M1.
bool jump_condition_a1(const DecomposedPath& path, const std::vector<double>& a1_tilde, double tol = 0.0);

struct StructureReport {
    NormalFormResult normal_form;
    ASplit split;
    C1C2Result c12;
    bool jump_condition_a1 = true;
};

StructureReport analyze_structure(const DecomposedPath& path, double tol = kAutoTol);

struct CovariationVerdict {
    bool holds = true;
    std::vector<std::size_t> violation_cells;
};

/// Supermartingale rule for M2 = 0: int 1{d<X,Y> <= 0} dV^Y has no positive cell.
/// Throws PreconditionError when dM2 is not identically zero.
CovariationVerdict covariation_rule(const DecomposedPath& path, double tol = kAutoTol);

}  // namespace convarb
