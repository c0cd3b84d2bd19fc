#include "sis/frames.hpp"

#include <cmath>

namespace sis {

FrameBounds frame_bounds(const std::vector<SampledSpectrum>& phi, const FrequencyGrid& grid,
                         double rel_tol) {
    require_same_grid(phi, grid);
    const GramianField field = gramian_field(phi, grid);

    FrameBounds bounds;
    bool any = false;
    for (int i = 0; i < grid.base_size(); ++i) {
        const Eigen::VectorXd eigs = hermitian_eigenvalues(field.at(i));  // ascending
        const int rank = gramian_rank(field.at(i), rel_tol);
        if (rank == 0) continue;
        const double smallest_counted = eigs(eigs.size() - rank);
        const double largest = eigs(eigs.size() - 1);
        if (!any || smallest_counted < bounds.lower) {
            bounds.lower = smallest_counted;
            bounds.lower_index = i;
        }
        if (!any || largest > bounds.upper) {
            bounds.upper = largest;
            bounds.upper_index = i;
        }
        any = true;
    }
    if (!any) {
        throw std::invalid_argument("frame_bounds: trivial space (all generators vanish)");
    }
    return bounds;
}

CutoffFrameReport cutoff_frame_check(const std::vector<SampledSpectrum>& phi, int n,
                                     const FrequencyGrid& grid, double rel_tol) {
    const InvarianceVerdict verdict = rank_sum_test(phi, n, grid, rel_tol);
    if (!verdict.invariant) {
        throw std::invalid_argument("cutoff_frame_check: the family is not 1/" +
                                    std::to_string(n) + "-invariant");
    }

    CutoffFrameReport report;
    report.n = n;
    report.original = frame_bounds(phi, grid, rel_tol);
    report.slack = 10.0 * rel_tol * report.original.upper;
    report.all_within_slack = true;

    const CutoffSet cutoffs = make_cutoffs(phi, n);
    std::vector<SampledSpectrum> union_family;
    for (int k = 0; k < n; ++k) {
        CutoffFrameReport::Family family;
        family.k = k;
        std::vector<SampledSpectrum> nonzero;
        for (const auto& s : cutoffs.families[k]) {
            if (!s.is_zero()) nonzero.push_back(s);
        }
        if (nonzero.empty()) {
            family.trivial = true;
            family.within_slack = true;  // nothing to check
        } else {
            family.bounds = frame_bounds(nonzero, grid, rel_tol);
            family.within_slack =
                family.bounds.lower >= report.original.lower - report.slack &&
                family.bounds.upper <= report.original.upper + report.slack;
            for (auto& s : nonzero) union_family.push_back(std::move(s));
        }
        report.all_within_slack = report.all_within_slack && family.within_slack;
        report.per_k.push_back(std::move(family));
    }

    // union_family is nonempty: the original family is not all zero.
    report.union_bounds = frame_bounds(union_family, grid, rel_tol);
    report.union_within_slack =
        report.union_bounds.lower >= report.original.lower - report.slack &&
        report.union_bounds.upper <= report.original.upper + report.slack;
    report.all_within_slack = report.all_within_slack && report.union_within_slack;
    return report;
}

}  // namespace sis
