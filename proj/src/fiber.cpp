#include "sis/fiber.hpp"

#include "sis/parallel.hpp"

#include <cmath>
#include <ostream>

namespace sis {

namespace {

constexpr double kZeroFloor = 1e-300;

}  // namespace

void require_same_grid(const std::vector<SampledSpectrum>& phi, const FrequencyGrid& grid) {
    if (phi.empty()) throw std::invalid_argument("generator list must be nonempty");
    for (const auto& s : phi) {
        if (!(s.grid() == grid)) {
            throw std::invalid_argument("grid mismatch: all spectra must share the grid");
        }
    }
}

FiberVector fiber(const SampledSpectrum& s, int i) {
    const auto& grid = s.grid();
    if (i < 0 || i >= grid.base_size()) {
        throw std::invalid_argument("fiber: base index out of range");
    }
    Eigen::VectorXcd entries(grid.fiber_size());
    for (int r = 0; r < grid.fiber_size(); ++r) {
        entries(r) = s.value(i, grid.offset_of_row(r));
    }
    return {i, std::move(entries)};
}

FiberMatrix fiber_matrix(const std::vector<SampledSpectrum>& phi, int i) {
    if (phi.empty()) throw std::invalid_argument("fiber_matrix: generator list must be nonempty");
    const auto& grid = phi.front().grid();
    require_same_grid(phi, grid);
    Eigen::MatrixXcd columns(grid.fiber_size(), static_cast<int>(phi.size()));
    for (std::size_t j = 0; j < phi.size(); ++j) {
        columns.col(static_cast<int>(j)) = fiber(phi[j], i).entries;
    }
    return {i, std::move(columns)};
}

GramianField::GramianField(FrequencyGrid grid, std::vector<Eigen::MatrixXcd> matrices)
    : grid_(grid), m_(matrices.empty() ? 0 : static_cast<int>(matrices.front().rows())),
      matrices_(std::move(matrices)) {
    if (static_cast<int>(matrices_.size()) != grid_.base_size()) {
        throw std::invalid_argument("GramianField: one matrix per base index required");
    }
}

GramianField gramian_field(const std::vector<SampledSpectrum>& phi, const FrequencyGrid& grid) {
    require_same_grid(phi, grid);
    const int m = static_cast<int>(phi.size());
    std::vector<Eigen::MatrixXcd> matrices(grid.base_size());
    detail::parallel_for(grid.base_size(), [&](int i) {
        const Eigen::MatrixXcd f = fiber_matrix(phi, i).columns;
        Eigen::MatrixXcd g(m, m);
        for (int a = 0; a < m; ++a) {
            for (int b = a; b < m; ++b) {
                Complex sum{0.0, 0.0};
                for (int r = 0; r < f.rows(); ++r) sum += std::conj(f(r, a)) * f(r, b);
                g(a, b) = sum;
                g(b, a) = std::conj(sum);  // exactly Hermitian by construction
            }
        }
        matrices[i] = std::move(g);
    });
    return GramianField(grid, std::move(matrices));
}

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("hermitian_eigenvalues: eigensolver failed");
    }
    return solver.eigenvalues();
}

int rank_from_eigenvalues(const Eigen::VectorXd& eigenvalues, double rel_tol) {
    if (eigenvalues.size() == 0) return 0;
    const double lambda_max = std::max(eigenvalues.maxCoeff(), 0.0);
    const double threshold = rel_tol * std::max(lambda_max, kZeroFloor);
    int rank = 0;
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
        if (eigenvalues(i) > threshold) ++rank;
    }
    return rank;
}

int numerical_rank(const Eigen::MatrixXcd& a, double rel_tol) {
    if (a.rows() != a.cols()) throw std::invalid_argument("numerical_rank: matrix must be square");
    if (!(rel_tol > 0.0)) throw std::invalid_argument("numerical_rank: rel_tol must be positive");
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if ((a - a.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
        throw std::invalid_argument("numerical_rank: matrix is not Hermitian within tolerance");
    }
    return rank_from_eigenvalues(hermitian_eigenvalues(a), rel_tol);
}

int gramian_rank(const Eigen::MatrixXcd& g, double rel_tol) {
    const int m = static_cast<int>(g.rows());
    std::vector<int> kept;
    kept.reserve(m);
    for (int j = 0; j < m; ++j) {
        if (g(j, j).real() > kZeroFloor) kept.push_back(j);
    }
    if (kept.empty()) return 0;
    Eigen::MatrixXcd normalized(static_cast<int>(kept.size()), static_cast<int>(kept.size()));
    for (std::size_t a = 0; a < kept.size(); ++a) {
        for (std::size_t b = 0; b < kept.size(); ++b) {
            const double scale =
                std::sqrt(g(kept[a], kept[a]).real()) * std::sqrt(g(kept[b], kept[b]).real());
            normalized(static_cast<int>(a), static_cast<int>(b)) = g(kept[a], kept[b]) / scale;
        }
    }
    return numerical_rank(normalized, rel_tol);
}

RankProfile dimension_function(const std::vector<SampledSpectrum>& phi, const FrequencyGrid& grid,
                               double rel_tol) {
    const GramianField field = gramian_field(phi, grid);
    std::vector<int> ranks(grid.base_size());
    detail::parallel_for(grid.base_size(),
                         [&](int i) { ranks[i] = gramian_rank(field.at(i), rel_tol); });
    return {grid, std::move(ranks), rel_tol};
}

void write_rank_profile_csv(std::ostream& out, const RankProfile& profile) {
    out << "omega,rank\n";
    for (int i = 0; i < profile.grid.base_size(); ++i) {
        out << profile.grid.omega(i) << "," << profile.ranks[i] << "\n";
    }
}

void write_gramian_eigenvalues_csv(std::ostream& out, const GramianField& field) {
    out << "omega";
    for (int j = 1; j <= field.generator_count(); ++j) out << ",lambda_" << j;
    out << "\n";
    for (int i = 0; i < field.grid().base_size(); ++i) {
        const Eigen::VectorXd eigs = hermitian_eigenvalues(field.at(i));
        out << field.grid().omega(i);
        for (Eigen::Index j = 0; j < eigs.size(); ++j) out << "," << eigs(j);
        out << "\n";
    }
}

}  // namespace sis
