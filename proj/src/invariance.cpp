#include "sis/invariance.hpp"

#include "sis/parallel.hpp"

#include <cmath>
#include <numbers>

namespace sis {

namespace {

constexpr double kPi = std::numbers::pi;

int nonneg_mod(long long value, int n) {
    const int r = static_cast<int>(value % n);
    return r < 0 ? r + n : r;
}

void require_modulus(int n, int k) {
    if (n < 1) throw std::invalid_argument("partition modulus n must be >= 1");
    if (k < 0 || k >= n) throw std::invalid_argument("partition cell index k out of range");
}

long long floor_as_integer(double omega) {
    if (!std::isfinite(omega) || std::abs(omega) > 1e15) {
        throw std::invalid_argument("frequency out of representable range");
    }
    return static_cast<long long>(std::floor(omega));
}

/// Ranks of the full Gramian and of each cutoff family at one cell, computed
/// from row restrictions of the fiber matrix (the cutoff Gramian is the
/// Gramian of the class-k rows).
struct CellRanks {
    int full = 0;
    std::vector<int> per_class;
    int sum() const {
        int s = 0;
        for (int r : per_class) s += r;
        return s;
    }
};

Eigen::MatrixXcd gramian_of(const Eigen::MatrixXcd& f) {
    const int m = static_cast<int>(f.cols());
    Eigen::MatrixXcd g(m, m);
    for (int a = 0; a < m; ++a) {
        for (int b = a; b < m; ++b) {
            Complex sum{0.0, 0.0};
            for (int r = 0; r < f.rows(); ++r) sum += std::conj(f(r, a)) * f(r, b);
            g(a, b) = sum;
            g(b, a) = std::conj(sum);
        }
    }
    return g;
}

CellRanks cell_ranks(const std::vector<SampledSpectrum>& phi, int i, int n, double rel_tol) {
    const FrequencyGrid& grid = phi.front().grid();
    const Eigen::MatrixXcd f = fiber_matrix(phi, i).columns;
    CellRanks out;
    out.full = gramian_rank(gramian_of(f), rel_tol);
    out.per_class.resize(n);
    const Partition partition(n);
    for (int k = 0; k < n; ++k) {
        std::vector<int> rows;
        for (int r = 0; r < grid.fiber_size(); ++r) {
            if (partition.class_of_offset(grid.offset_of_row(r)) == k) rows.push_back(r);
        }
        Eigen::MatrixXcd fk(static_cast<int>(rows.size()), f.cols());
        for (std::size_t r = 0; r < rows.size(); ++r) fk.row(static_cast<int>(r)) = f.row(rows[r]);
        out.per_class[k] = gramian_rank(gramian_of(fk), rel_tol);
    }
    return out;
}

}  // namespace

bool in_partition(int n, int k, double omega) {
    require_modulus(n, k);
    return nonneg_mod(floor_as_integer(omega), n) == k;
}

std::complex<double> modulation_h(int n, int k, double omega) {
    require_modulus(n, k);
    // Exactly one indicator in the defining sum is nonzero: the one whose
    // cell contains omega. Its index j satisfies k + j = floor(omega) mod n.
    const int j = nonneg_mod(floor_as_integer(omega), n) - k;
    return std::polar(1.0, -2.0 * kPi * omega / n) *
           std::polar(1.0, 2.0 * kPi * static_cast<double>(j) / n);
}

SampledSpectrum cutoff(const SampledSpectrum& s, int n, int k) {
    require_modulus(n, k);
    const FrequencyGrid& grid = s.grid();
    const Partition partition(n);
    std::vector<Complex> values(s.values().size(), Complex{0.0, 0.0});
    for (int i = 0; i < grid.base_size(); ++i) {
        for (int off = -grid.fiber_half_width; off < grid.fiber_half_width; ++off) {
            // floor(omega_i + off) = off for omega_i in [0,1), so membership
            // in B_k depends only on the fiber offset.
            if (partition.class_of_offset(off) == k) {
                values[grid.flat_index(i, off)] = s.value(i, off);
            }
        }
    }
    return SampledSpectrum(grid, std::move(values));
}

CutoffSet make_cutoffs(const std::vector<SampledSpectrum>& phi, int n) {
    if (n < 1) throw std::invalid_argument("make_cutoffs: n must be >= 1");
    CutoffSet out;
    out.n = n;
    out.families.reserve(n);
    for (int k = 0; k < n; ++k) {
        std::vector<SampledSpectrum> family;
        family.reserve(phi.size());
        for (const auto& s : phi) family.push_back(cutoff(s, n, k));
        out.families.push_back(std::move(family));
    }
    return out;
}

RankSumProfile rank_sum_profile(const std::vector<SampledSpectrum>& phi, int n,
                                const FrequencyGrid& grid, double rel_tol) {
    if (n < 2) throw std::invalid_argument("rank_sum_test: n must be >= 2");
    require_same_grid(phi, grid);

    std::vector<CellRanks> ranks(grid.base_size());
    detail::parallel_for(grid.base_size(),
                         [&](int i) { ranks[i] = cell_ranks(phi, i, n, rel_tol); });

    RankSumProfile profile;
    profile.rank_full.resize(grid.base_size());
    profile.rank_cutoff_sum.resize(grid.base_size());

    InvarianceVerdict& verdict = profile.verdict;
    verdict.n = n;
    verdict.invariant = true;
    verdict.tolerance = rel_tol;
    for (int i = 0; i < grid.base_size(); ++i) {
        const int sum = ranks[i].sum();
        profile.rank_full[i] = ranks[i].full;
        profile.rank_cutoff_sum[i] = sum;
        if (ranks[i].full > sum) verdict.subadditive_ok = false;
        if (ranks[i].full != sum && verdict.worst_index < 0) {
            verdict.invariant = false;
            verdict.worst_index = i;
            verdict.rank_full = ranks[i].full;
            verdict.rank_cutoff_sum = sum;
        }
    }
    if (verdict.invariant) {
        verdict.rank_full = profile.rank_full[0];
        verdict.rank_cutoff_sum = profile.rank_cutoff_sum[0];
    }
    return profile;
}

InvarianceVerdict rank_sum_test(const std::vector<SampledSpectrum>& phi, int n,
                                const FrequencyGrid& grid, double rel_tol) {
    return rank_sum_profile(phi, n, grid, rel_tol).verdict;
}

OrderResult invariance_order(const std::vector<SampledSpectrum>& phi, int n_max,
                             const FrequencyGrid& grid, double rel_tol) {
    if (n_max < 2) throw std::invalid_argument("invariance_order: n_max must be >= 2");
    std::vector<InvarianceVerdict> verdicts;
    verdicts.reserve(n_max - 1);
    for (int n = 2; n <= n_max; ++n) {
        verdicts.push_back(rank_sum_test(phi, n, grid, rel_tol));
    }
    return assemble_order_result(std::move(verdicts), n_max, phi, grid, rel_tol);
}

OrderResult assemble_order_result(std::vector<InvarianceVerdict> verdicts, int n_max,
                                  const std::vector<SampledSpectrum>& phi,
                                  const FrequencyGrid& grid, double rel_tol) {
    if (static_cast<int>(verdicts.size()) != n_max - 1) {
        throw std::invalid_argument("assemble_order_result: need one verdict per n in 2..n_max");
    }
    OrderResult out;
    out.n_max = n_max;
    out.verdicts = std::move(verdicts);

    auto passed = [&](int n) { return n == 1 || out.verdicts[n - 2].invariant; };

    out.ti_candidate = true;
    for (int n = 2; n <= n_max; ++n) {
        if (passed(n)) out.declared_order = n;
        else out.ti_candidate = false;
    }

    // Subgroup law: an invariant modulus forces all of its divisors.
    for (int n = 2; n <= n_max; ++n) {
        if (!passed(n)) continue;
        for (int d = 2; d < n; ++d) {
            if (n % d == 0 && !passed(d)) {
                out.divisor_consistent = false;
                out.flags.push_back("modulus " + std::to_string(n) +
                                    " passed but its divisor " + std::to_string(d) +
                                    " failed; likely a rank-tolerance artifact");
            }
        }
    }

    if (out.ti_candidate) {
        out.ti_certified = ti_check(phi, grid, rel_tol);
    }
    return out;
}

bool ti_check(const std::vector<SampledSpectrum>& phi, const FrequencyGrid& grid, double rel_tol) {
    require_same_grid(phi, grid);
    std::vector<char> ok(grid.base_size(), 1);
    detail::parallel_for(grid.base_size(), [&](int i) {
        const Eigen::MatrixXcd f = fiber_matrix(phi, i).columns;
        double max_row = 0.0;
        for (int r = 0; r < f.rows(); ++r) max_row = std::max(max_row, f.row(r).norm());
        int active = 0;
        for (int r = 0; r < f.rows(); ++r) {
            if (f.row(r).norm() > rel_tol * max_row) ++active;
        }
        if (max_row == 0.0) active = 0;
        const int rank = gramian_rank(gramian_of(f), rel_tol);
        ok[i] = (rank == active) ? 1 : 0;
    });
    for (char c : ok) {
        if (!c) return false;
    }
    return true;
}

std::vector<int> residue_support_profile(const SampledSpectrum& phi, int n, double rel_tol) {
    if (n < 1) throw std::invalid_argument("residue_support_profile: n must be >= 1");
    const FrequencyGrid& grid = phi.grid();
    const double tol = rel_tol * phi.max_abs();
    const Partition partition(n);
    std::vector<int> counts(grid.base_size(), 0);
    for (int i = 0; i < grid.base_size(); ++i) {
        std::vector<char> occupied(n, 0);
        for (int off = -grid.fiber_half_width; off < grid.fiber_half_width; ++off) {
            if (std::abs(phi.value(i, off)) > tol) occupied[partition.class_of_offset(off)] = 1;
        }
        for (char c : occupied) counts[i] += c;
    }
    return counts;
}

SupportBudget rank_level_sets(const std::vector<SampledSpectrum>& phi, const FrequencyGrid& grid,
                              double rel_tol) {
    const RankProfile profile = dimension_function(phi, grid, rel_tol);
    SupportBudget budget;
    budget.cell_width = 1.0 / grid.base_size();
    budget.level_measures.assign(phi.size() + 1, 0.0);
    for (int rank : profile.ranks) budget.level_measures[rank] += budget.cell_width;
    return budget;
}

ZeroSetReport zero_set_bound_check(const std::vector<SampledSpectrum>& phi, int n,
                                   const Rational& interval_lo, const FrequencyGrid& grid,
                                   double rel_tol) {
    if (n < 2) throw std::invalid_argument("zero_set_bound_check: n must be >= 2");
    require_same_grid(phi, grid);

    const InvarianceVerdict verdict = rank_sum_test(phi, n, grid, rel_tol);
    if (!verdict.invariant) {
        throw std::invalid_argument(
            "zero_set_bound_check: the family is not 1/" + std::to_string(n) +
            "-invariant, so the zero-set bound does not apply");
    }

    const int m_grid = grid.base_size();
    const Rational lo = interval_lo;
    const Rational hi = lo + n;
    if ((lo * m_grid).denominator() != 1) {
        throw std::invalid_argument("zero_set_bound_check: interval must start on a grid point");
    }
    if (lo < Rational(-grid.fiber_half_width) || Rational(grid.fiber_half_width) < hi) {
        throw std::invalid_argument(
            "zero_set_bound_check: interval [lo, lo+n) must lie inside the fiber window");
    }

    const SupportBudget budget = rank_level_sets(phi, grid, rel_tol);
    ZeroSetReport report;
    report.n = n;
    report.interval_lo = lo;
    report.slack = 2.0 * n / static_cast<double>(m_grid);
    for (int j = 0; j < n && j < static_cast<int>(budget.level_measures.size()); ++j) {
        report.bound += (n - j) * budget.level_measures[j];
    }
    if (n > static_cast<int>(phi.size())) {
        report.principal_bound = static_cast<double>(n - static_cast<int>(phi.size()));
    }

    // Count grid cells of I = [lo, lo+n) on which the generator vanishes.
    const std::int64_t first_cell = (lo * m_grid).numerator();
    const std::int64_t cell_count = static_cast<std::int64_t>(n) * m_grid;
    report.all_satisfied = true;
    for (const auto& s : phi) {
        const double tol = rel_tol * s.max_abs();
        std::int64_t zero_cells = 0;
        for (std::int64_t c = first_cell; c < first_cell + cell_count; ++c) {
            const int offset = static_cast<int>(c >= 0 ? c / m_grid : (c - m_grid + 1) / m_grid);
            const int i = static_cast<int>(c - static_cast<std::int64_t>(offset) * m_grid);
            if (std::abs(s.value(i, offset)) <= tol) ++zero_cells;
        }
        ZeroSetReport::PerGenerator g;
        g.measured_zero_set = static_cast<double>(zero_cells) / static_cast<double>(m_grid);
        g.satisfied = g.measured_zero_set >= report.bound - report.slack;
        report.all_satisfied = report.all_satisfied && g.satisfied;
        report.generators.push_back(g);
    }
    return report;
}

}  // namespace sis
