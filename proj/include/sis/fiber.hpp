// Fibers, fiber matrices, the Gramian field and numerical ranks.
//
// The fiber of a spectrum at base frequency omega_i is the column of its
// values across the integer offsets k = -K..K-1; the fiber matrix stacks the
// fibers of m generators side by side. The Gramian G(omega_i) is the m x m
// matrix of fiber inner products; its rank is the pointwise dimension of the
// discretized fiber space.
#pragma once

#include "sis/spectrum.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <vector>

namespace sis {

struct FiberVector {
    int base_index;
    Eigen::VectorXcd entries;  // length 2K, row r holds offset r - K
};

struct FiberMatrix {
    int base_index;
    Eigen::MatrixXcd columns;  // 2K x m, column j is the fiber of generator j
};

FiberVector fiber(const SampledSpectrum& s, int i);
FiberMatrix fiber_matrix(const std::vector<SampledSpectrum>& phi, int i);

/// The Hermitian PSD Gramian at every base point of the grid.
class GramianField {
public:
    GramianField(FrequencyGrid grid, std::vector<Eigen::MatrixXcd> matrices);

    const FrequencyGrid& grid() const { return grid_; }
    int generator_count() const { return m_; }
    const Eigen::MatrixXcd& at(int i) const { return matrices_.at(i); }

private:
    FrequencyGrid grid_;
    int m_;
    std::vector<Eigen::MatrixXcd> matrices_;
};

/// G_ij(omega) = sum_k conj(phi_i(omega+k)) phi_j(omega+k); exactly Hermitian
/// by construction and equal to F*F for the corresponding fiber matrix.
GramianField gramian_field(const std::vector<SampledSpectrum>& phi, const FrequencyGrid& grid);

/// Ascending eigenvalues of a Hermitian matrix (deterministic ordering).
Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& a);

/// Number of eigenvalues strictly above rel_tol * max(lambda_max, 1e-300).
/// The floor guards the zero matrix. Throws if the input is not Hermitian
/// within 1e-10 relative to its largest entry.
int numerical_rank(const Eigen::MatrixXcd& a, double rel_tol);
int rank_from_eigenvalues(const Eigen::VectorXd& eigenvalues, double rel_tol);

/// Rank of a fiber Gramian. Columns are normalized by their diagonal before
/// thresholding, so the verdict is unchanged when any single generator is
/// rescaled by a nonzero constant.
int gramian_rank(const Eigen::MatrixXcd& g, double rel_tol);

struct RankProfile {
    FrequencyGrid grid;
    std::vector<int> ranks;  // one per base index
    double rel_tol;
};

/// Pointwise dimension of the discretized fiber space: rank of G at each cell.
RankProfile dimension_function(const std::vector<SampledSpectrum>& phi, const FrequencyGrid& grid,
                               double rel_tol);

// CSV export: one row per omega_i.
void write_rank_profile_csv(std::ostream& out, const RankProfile& profile);
void write_gramian_eigenvalues_csv(std::ostream& out, const GramianField& field);

/// Checks that all spectra share `grid`; throws std::invalid_argument if not.
void require_same_grid(const std::vector<SampledSpectrum>& phi, const FrequencyGrid& grid);

}  // namespace sis
