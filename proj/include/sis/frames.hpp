// Frame bounds of integer-translate systems via the Gramian spectrum, and
// the check that cutoff families inherit the bounds of the original system.
#pragma once

#include "sis/invariance.hpp"

#include <vector>

namespace sis {

struct FrameBounds {
    double lower = 0.0;  // A: min over cells of the smallest counted eigenvalue
    double upper = 0.0;  // B: max over cells of the largest eigenvalue
    int lower_index = -1;  // cells attaining the bounds
    int upper_index = -1;

    bool parseval(double rel_tol) const {
        return std::abs(lower - 1.0) <= 10.0 * rel_tol && std::abs(upper - 1.0) <= 10.0 * rel_tol;
    }
};

/// Optimal frame bounds of the translate system of Phi for its closed span.
/// Eigenvalues below the rank threshold belong to the orthogonal complement
/// of the range and are excluded from A. Throws on an all-zero family.
FrameBounds frame_bounds(const std::vector<SampledSpectrum>& phi, const FrequencyGrid& grid,
                         double rel_tol);

struct CutoffFrameReport {
    int n = 0;
    FrameBounds original;
    double slack = 0.0;  // 10 * rel_tol * B
    struct Family {
        int k = 0;
        bool trivial = false;  // every cutoff in the family is zero
        FrameBounds bounds;    // meaningful only when !trivial
        bool within_slack = false;
    };
    std::vector<Family> per_k;
    FrameBounds union_bounds;  // system of all nonzero cutoffs
    bool union_within_slack = false;
    bool all_within_slack = false;
};

/// For a 1/n-invariant family: bounds of each nonzero cutoff family and of
/// the union system must sit inside [A, B] up to 10*rel_tol*B slack.
/// Refuses non-invariant inputs; zero cutoff families are reported as
/// trivial, not errors.
CutoffFrameReport cutoff_frame_check(const std::vector<SampledSpectrum>& phi, int n,
                                     const FrequencyGrid& grid, double rel_tol);

}  // namespace sis
