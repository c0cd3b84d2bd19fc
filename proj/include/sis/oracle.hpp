// Independent membership ground truth: per-cell least-squares projection of
// fibers onto the column span of the generator fiber matrix. Used to
// cross-validate the rank-sum invariance test, and to decide membership in
// the space spanned by the 1/n-translates of a single function via refined
// fibers (one residue class of offsets per refined base point).
#pragma once

#include "sis/invariance.hpp"

#include <vector>

namespace sis {

/// Translation by theta acts on samples as modulation by e^{-2 pi i theta w}.
SampledSpectrum translate(const SampledSpectrum& s, double theta);

struct ProjectionResult {
    double residual = 0.0;             // relative, in [0, 1]
    Eigen::VectorXcd coefficients;     // one per basis column (zero for dropped columns)
};

/// Relative distance of `target` to the column span of `basis`:
/// ||t - proj(t)|| / ||t||, and 0 when ||t|| <= tol. Columns with
/// negligible norm are dropped before the rank-revealing factorization.
ProjectionResult fiber_residual(const FiberVector& target, const FiberMatrix& basis, double tol);

/// Invariance via membership: the family is 1/n-invariant iff at every cell
/// the fiber of every translated-by-1/n generator projects onto the span of
/// the generator fibers with relative residual <= tol. Must agree with
/// rank_sum_test on exact piecewise-constant inputs.
InvarianceVerdict invariance_oracle(const std::vector<SampledSpectrum>& phi, int n,
                                    const FrequencyGrid& grid, double tol);

/// Same check with the per-cell worst residual kept (for CSV export).
struct OracleProfile {
    InvarianceVerdict verdict;
    std::vector<double> residuals;  // per base index
};
OracleProfile invariance_oracle_profile(const std::vector<SampledSpectrum>& phi, int n,
                                        const FrequencyGrid& grid, double tol);

struct MembershipVerdict {
    bool member = false;
    double max_residual = 0.0;
    int worst_base_index = 0;  // base cell i of the worst refined fiber
    int worst_residue = 0;     // residue r of the worst refined fiber
    double tolerance = 0.0;
    /// Discretized periodic multiplier: coefficients[i][r] maps the refined
    /// fiber of f at omega_i + r onto that of g.
    std::vector<std::vector<Complex>> coefficients;
};

/// Membership of g in the space spanned by the 1/n-translates of f.
/// Tested per refined fiber: entries of g at offsets in residue class r must
/// be parallel to those of f. n = 1 is the integer-translate case.
/// Requires K >= n so every residue class is represented in the window.
MembershipVerdict refined_membership(const SampledSpectrum& g, const SampledSpectrum& f, int n,
                                     double tol);

}  // namespace sis
