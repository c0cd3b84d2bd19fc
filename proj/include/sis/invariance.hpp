// Extra-invariance analysis of finitely generated shift-invariant spaces.
//
// For a modulus n the line splits into the n-periodized unit cells
// B_k = union_j ([k, k+1) + nj), k = 0..n-1. A space generated by Phi is
// invariant under translation by 1/n exactly when, at every base frequency,
// the Gramian rank of Phi equals the summed Gramian ranks of the cutoff
// families Phi^k obtained by masking each generator to B_k. This module
// implements the partition masks, cutoffs, the rank-sum test, the
// invariance-order search, the translation-invariance (coordinate-subspace)
// criterion, rank level sets and the zero-set lower bound they imply.
#pragma once

#include "sis/fiber.hpp"

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace sis {

/// True iff omega lies in the k-th of the n periodized unit cells, i.e.
/// floor(omega) = k (mod n). Half-open convention throughout.
bool in_partition(int n, int k, double omega);

struct Partition {
    int n;
    explicit Partition(int n_) : n(n_) {
        if (n_ < 1) throw std::invalid_argument("Partition: n must be >= 1");
    }
    bool contains(int k, double omega) const { return in_partition(n, k, omega); }
    /// Cell index of an integer fiber offset (nonnegative residue mod n).
    int class_of_offset(int k_offset) const { return ((k_offset % n) + n) % n; }
};

/// Unit-modulus Z-periodic function equal to e^{-2 pi i omega / n} on the
/// k-th cell; the step across cells advances its phase by 2 pi / n.
std::complex<double> modulation_h(int n, int k, double omega);

/// Masks a sampled spectrum to the k-th cell: entries at fiber offsets
/// outside residue class k become exactly zero.
SampledSpectrum cutoff(const SampledSpectrum& s, int n, int k);

struct CutoffSet {
    int n;
    std::vector<std::vector<SampledSpectrum>> families;  // [k][j], same shape as Phi per k
};
CutoffSet make_cutoffs(const std::vector<SampledSpectrum>& phi, int n);

struct InvarianceVerdict {
    int n = 0;
    bool invariant = false;
    int worst_index = -1;      // first failing base index, -1 if none
    int rank_full = -1;        // rank-route diagnostic at the worst cell
    int rank_cutoff_sum = -1;  // (or at cell 0 when no cell fails)
    bool subadditive_ok = true;
    double max_residual = -1.0;  // oracle-route diagnostic, -1 for the rank route
    double tolerance = 0.0;
};

/// Rank-sum invariance test: invariant iff rank G(omega) equals the summed
/// cutoff ranks at every evaluated cell. Requires n >= 2.
InvarianceVerdict rank_sum_test(const std::vector<SampledSpectrum>& phi, int n,
                                const FrequencyGrid& grid, double rel_tol);

/// Same test with the per-cell rank rows kept (for CSV export).
struct RankSumProfile {
    InvarianceVerdict verdict;
    std::vector<int> rank_full;        // per base index
    std::vector<int> rank_cutoff_sum;  // per base index
};
RankSumProfile rank_sum_profile(const std::vector<SampledSpectrum>& phi, int n,
                                const FrequencyGrid& grid, double rel_tol);

struct OrderResult {
    int declared_order = 1;    // largest tested n that passed, 1 if none
    bool ti_candidate = false; // every tested n passed
    bool ti_certified = false; // coordinate-subspace criterion, when candidate
    int n_max = 0;
    std::vector<InvarianceVerdict> verdicts;  // n = 2..n_max in order
    bool divisor_consistent = true;
    std::vector<std::string> flags;  // divisor-law violations (tolerance artifacts)
};

/// Tests n = 2..n_max and declares the largest invariant modulus. Divisor
/// inconsistencies are flagged, never repaired.
OrderResult invariance_order(const std::vector<SampledSpectrum>& phi, int n_max,
                             const FrequencyGrid& grid, double rel_tol);

/// Order assembly from already-computed per-n verdicts (n = 2..n_max).
/// Runs ti_check to certify a candidate when every modulus passed.
OrderResult assemble_order_result(std::vector<InvarianceVerdict> verdicts, int n_max,
                                  const std::vector<SampledSpectrum>& phi,
                                  const FrequencyGrid& grid, double rel_tol);

/// Translation-invariance criterion: at every cell the Gramian rank equals
/// the number of active fiber rows, i.e. the fiber space is a full
/// coordinate subspace.
bool ti_check(const std::vector<SampledSpectrum>& phi, const FrequencyGrid& grid, double rel_tol);

/// Single-generator shortcut: per-cell count of residue classes mod n that
/// carry fiber mass. The space is 1/n-invariant iff every count is <= 1.
std::vector<int> residue_support_profile(const SampledSpectrum& phi, int n, double rel_tol);

struct SupportBudget {
    std::vector<double> level_measures;  // |E_j| for j = 0..m, cell-count / M
    double cell_width = 0.0;             // 1/M, the per-cell resolution
};

/// Measures of the rank level sets E_j = {omega in [0,1) : rank G = j}.
/// The measures sum to 1 exactly by construction.
SupportBudget rank_level_sets(const std::vector<SampledSpectrum>& phi, const FrequencyGrid& grid,
                              double rel_tol);

struct ZeroSetReport {
    int n = 0;
    Rational interval_lo{0};  // I = [lo, lo + n)
    double bound = 0.0;       // sum_{j<n} (n-j) |E_j|
    double slack = 0.0;       // 2n/M discretization allowance
    std::optional<double> principal_bound;  // n - m when n > m
    struct PerGenerator {
        double measured_zero_set = 0.0;  // |{omega in I : |phi_hat| <= tol}|
        bool satisfied = false;          // measured >= bound - slack
    };
    std::vector<PerGenerator> generators;
    bool all_satisfied = false;
};

/// Checks the zero-set lower bound on an interval I = [lo, lo+n) for a
/// 1/n-invariant family. Refuses non-invariant inputs. The interval must be
/// grid-aligned and contained in the fiber window.
ZeroSetReport zero_set_bound_check(const std::vector<SampledSpectrum>& phi, int n,
                                   const Rational& interval_lo, const FrequencyGrid& grid,
                                   double rel_tol);

}  // namespace sis
