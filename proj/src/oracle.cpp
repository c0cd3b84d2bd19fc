#include "sis/oracle.hpp"

#include "sis/parallel.hpp"

#include <cmath>
#include <numbers>

namespace sis {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kColumnFloor = 1e-300;

}  // namespace

SampledSpectrum translate(const SampledSpectrum& s, double theta) {
    const FrequencyGrid& grid = s.grid();
    std::vector<Complex> values(s.values().size());
    for (int i = 0; i < grid.base_size(); ++i) {
        for (int k = -grid.fiber_half_width; k < grid.fiber_half_width; ++k) {
            const double w = grid.omega(i) + k;
            values[grid.flat_index(i, k)] =
                s.value(i, k) * std::polar(1.0, -2.0 * kPi * theta * w);
        }
    }
    return SampledSpectrum(grid, std::move(values));
}

ProjectionResult fiber_residual(const FiberVector& target, const FiberMatrix& basis, double tol) {
    if (target.entries.size() != basis.columns.rows()) {
        throw std::invalid_argument("fiber_residual: target and basis shapes disagree");
    }
    const int m = static_cast<int>(basis.columns.cols());
    ProjectionResult out;
    out.coefficients = Eigen::VectorXcd::Zero(m);

    const double target_norm = target.entries.norm();
    if (target_norm <= tol) return out;  // zero target: contained by convention

    std::vector<int> kept;
    for (int j = 0; j < m; ++j) {
        if (basis.columns.col(j).norm() > kColumnFloor) kept.push_back(j);
    }
    if (kept.empty()) {
        out.residual = 1.0;
        return out;
    }

    Eigen::MatrixXcd a(basis.columns.rows(), static_cast<int>(kept.size()));
    for (std::size_t j = 0; j < kept.size(); ++j) {
        a.col(static_cast<int>(j)) = basis.columns.col(kept[j]);
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(a);
    cod.setThreshold(1e-14);
    const Eigen::VectorXcd x = cod.solve(target.entries);
    const double residual = (target.entries - a * x).norm() / target_norm;
    out.residual = std::min(residual, 1.0);
    for (std::size_t j = 0; j < kept.size(); ++j) {
        out.coefficients(kept[j]) = x(static_cast<int>(j));
    }
    return out;
}

OracleProfile invariance_oracle_profile(const std::vector<SampledSpectrum>& phi, int n,
                                        const FrequencyGrid& grid, double tol) {
    if (n < 2) throw std::invalid_argument("invariance_oracle: n must be >= 2");
    require_same_grid(phi, grid);

    // Absolute zero-fiber guard scaled to the family so that rescaling all
    // generators rescales the guard with them.
    double scale = 0.0;
    for (const auto& s : phi) scale = std::max(scale, s.max_abs());
    const double zero_guard = tol * scale;

    std::vector<SampledSpectrum> translated;
    translated.reserve(phi.size());
    const double theta = 1.0 / static_cast<double>(n);
    for (const auto& s : phi) translated.push_back(translate(s, theta));

    OracleProfile profile;
    profile.residuals.assign(grid.base_size(), 0.0);
    detail::parallel_for(grid.base_size(), [&](int i) {
        const FiberMatrix basis = fiber_matrix(phi, i);
        double worst = 0.0;
        for (const auto& t : translated) {
            worst = std::max(worst, fiber_residual(fiber(t, i), basis, zero_guard).residual);
        }
        profile.residuals[i] = worst;
    });

    InvarianceVerdict& verdict = profile.verdict;
    verdict.n = n;
    verdict.tolerance = tol;
    verdict.max_residual = 0.0;
    verdict.worst_index = 0;
    for (int i = 0; i < grid.base_size(); ++i) {
        if (profile.residuals[i] > verdict.max_residual) {
            verdict.max_residual = profile.residuals[i];
            verdict.worst_index = i;
        }
    }
    verdict.invariant = verdict.max_residual <= tol;
    return profile;
}

InvarianceVerdict invariance_oracle(const std::vector<SampledSpectrum>& phi, int n,
                                    const FrequencyGrid& grid, double tol) {
    return invariance_oracle_profile(phi, n, grid, tol).verdict;
}

MembershipVerdict refined_membership(const SampledSpectrum& g, const SampledSpectrum& f, int n,
                                     double tol) {
    if (n < 1) throw std::invalid_argument("refined_membership: n must be >= 1");
    if (!(g.grid() == f.grid())) {
        throw std::invalid_argument("refined_membership: spectra must share the grid");
    }
    const FrequencyGrid& grid = g.grid();
    if (grid.fiber_half_width < n) {
        throw std::invalid_argument(
            "refined_membership: fiber window too small to hold refined fibers (need K >= n)");
    }

    const double zero_guard = tol * std::max(g.max_abs(), 1e-300);
    const Partition partition(n);

    MembershipVerdict verdict;
    verdict.tolerance = tol;
    verdict.coefficients.assign(grid.base_size(), std::vector<Complex>(n, Complex{0.0, 0.0}));
    for (int i = 0; i < grid.base_size(); ++i) {
        for (int r = 0; r < n; ++r) {
            std::vector<int> offsets;
            for (int off = -grid.fiber_half_width; off < grid.fiber_half_width; ++off) {
                if (partition.class_of_offset(off) == r) offsets.push_back(off);
            }
            FiberVector target{i, Eigen::VectorXcd(static_cast<int>(offsets.size()))};
            FiberMatrix basis{i, Eigen::MatrixXcd(static_cast<int>(offsets.size()), 1)};
            for (std::size_t a = 0; a < offsets.size(); ++a) {
                target.entries(static_cast<int>(a)) = g.value(i, offsets[a]);
                basis.columns(static_cast<int>(a), 0) = f.value(i, offsets[a]);
            }
            const ProjectionResult projection = fiber_residual(target, basis, zero_guard);
            verdict.coefficients[i][r] = projection.coefficients(0);
            if (projection.residual > verdict.max_residual) {
                verdict.max_residual = projection.residual;
                verdict.worst_base_index = i;
                verdict.worst_residue = r;
            }
        }
    }
    verdict.member = verdict.max_residual <= tol;
    return verdict;
}

}  // namespace sis
