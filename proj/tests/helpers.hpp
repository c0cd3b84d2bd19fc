// Shared test utilities: indicator-spectrum builders, exact residue-class
// oracles for principal piecewise-constant cases, a quadrature reference for
// the box transform, and the seeded random family generator used by the
// rank/membership agreement sweep.
#pragma once

#include "sis/analysis.hpp"

#include <algorithm>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

namespace sis::testing {

inline Rational rat(std::int64_t p, std::int64_t q = 1) { return Rational(p, q); }

using Interval = std::pair<Rational, Rational>;

/// Indicator of a finite union of disjoint, sorted half-open intervals.
inline PiecewiseConstantSpectrum chi(const std::vector<Interval>& intervals,
                                     Complex value = {1.0, 0.0}) {
    std::vector<Rational> breakpoints;
    std::vector<Complex> values;
    breakpoints.push_back(intervals.front().first);
    for (std::size_t t = 0; t < intervals.size(); ++t) {
        values.push_back(value);
        breakpoints.push_back(intervals[t].second);
        if (t + 1 < intervals.size() && intervals[t].second != intervals[t + 1].first) {
            values.push_back({0.0, 0.0});
            breakpoints.push_back(intervals[t + 1].first);
        }
    }
    return make_piecewise_constant(breakpoints, values);
}

inline SampledSpectrum eval_chi(const std::vector<Interval>& intervals, int m, int k,
                                Complex value = {1.0, 0.0}) {
    return evaluate(GeneratorSpec::piecewise(chi(intervals, value)), FrequencyGrid(m, k));
}

/// Exact residue-class oracle for a principal piecewise-constant generator:
/// the maximal number of residue classes mod n carrying support on any fiber,
/// found by rational interval lookups only (no sampled spectra, no Gramians).
inline int max_occupied_classes(const PiecewiseConstantSpectrum& spectrum, int n,
                                const FrequencyGrid& grid) {
    int worst = 0;
    for (int i = 0; i < grid.base_size(); ++i) {
        std::vector<char> hit(n, 0);
        for (int off = -grid.fiber_half_width; off < grid.fiber_half_width; ++off) {
            const Rational w = grid.omega_exact(i) + off;
            if (spectrum.value_at(w) != Complex{0.0, 0.0}) hit[((off % n) + n) % n] = 1;
        }
        int count = 0;
        for (char c : hit) count += c;
        worst = std::max(worst, count);
    }
    return worst;
}

/// A principal piecewise-constant space is 1/n-invariant exactly when every
/// fiber support stays inside one residue class mod n.
inline bool classes_invariant(const PiecewiseConstantSpectrum& spectrum, int n,
                              const FrequencyGrid& grid) {
    return max_occupied_classes(spectrum, n, grid) <= 1;
}

/// Composite-Simpson reference for the box transform int_0^1 e^{-2 pi i w x} dx.
inline Complex box_transform_quadrature(double omega, int panels = 4096) {
    auto f = [&](double x) {
        return std::polar(1.0, -2.0 * std::numbers::pi * omega * x);
    };
    const double h = 1.0 / panels;
    Complex sum = f(0.0) + f(1.0);
    for (int i = 1; i < panels; ++i) {
        sum += f(i * h) * ((i % 2 == 1) ? 4.0 : 2.0);
    }
    return sum * (h / 3.0);
}

// ---------------------------------------------------------------------------
// Seeded random piecewise-constant families for the agreement sweep:
// m <= 3 generators, breakpoint denominators <= 8, support inside [-4, 4).

struct RandomFamily {
    std::vector<GeneratorSpec> generators;
};

inline constexpr int kSweepGridM = 840;  // multiple of every denominator <= 8
inline constexpr int kSweepGridK = 8;

inline Complex random_value(std::mt19937_64& rng) {
    static const double levels[] = {-2.0, -1.5, -1.0, -0.5, 0.5, 1.0, 1.5, 2.0};
    std::uniform_int_distribution<int> pick(0, 7);
    return {levels[pick(rng)], levels[pick(rng)]};
}

inline RandomFamily random_family(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> m_dist(1, 3);
    std::uniform_int_distribution<int> q_dist(1, 8);
    std::uniform_int_distribution<int> seg_dist(1, 3);
    std::uniform_int_distribution<int> style_dist(0, 2);

    RandomFamily family;
    const int m = m_dist(rng);
    const int style = style_dist(rng);  // 0: class-aligned (often invariant), else free
    std::uniform_int_distribution<int> n0_dist(2, 4);
    const int n0 = n0_dist(rng);

    for (int j = 0; j < m; ++j) {
        const int q = q_dist(rng);
        const int segments = seg_dist(rng);
        std::vector<Interval> intervals;
        if (style == 0) {
            // every piece inside unit cells congruent to one class mod n0
            std::uniform_int_distribution<int> class_dist(0, n0 - 1);
            const int cls = class_dist(rng);
            std::vector<int> cells;
            for (int cell = -4; cell < 4; ++cell) {
                if (((cell % n0) + n0) % n0 == cls) cells.push_back(cell);
            }
            std::uniform_int_distribution<int> cell_dist(0, static_cast<int>(cells.size()) - 1);
            std::vector<std::pair<std::int64_t, std::int64_t>> raw;  // in units of 1/q
            for (int s = 0; s < segments; ++s) {
                const int cell = cells[cell_dist(rng)];
                std::uniform_int_distribution<int> a_dist(0, q - 1);
                const int a = a_dist(rng);
                std::uniform_int_distribution<int> b_dist(a + 1, q);
                const int b = b_dist(rng);
                raw.push_back({static_cast<std::int64_t>(cell) * q + a,
                               static_cast<std::int64_t>(cell) * q + b});
            }
            std::sort(raw.begin(), raw.end());
            std::int64_t cursor = INT64_MIN;
            for (auto [a, b] : raw) {
                a = std::max(a, cursor);
                if (a >= b) continue;
                intervals.push_back({Rational(a, q), Rational(b, q)});
                cursor = b;
            }
        } else {
            const std::int64_t lim = std::int64_t{4} * q;
            std::uniform_int_distribution<std::int64_t> e_dist(-lim, lim);
            std::vector<std::pair<std::int64_t, std::int64_t>> raw;
            for (int s = 0; s < segments; ++s) {
                std::int64_t a = e_dist(rng);
                std::int64_t b = e_dist(rng);
                if (a == b) b = a + 1;
                if (a > b) std::swap(a, b);
                raw.push_back({a, std::min(b, lim)});
            }
            std::sort(raw.begin(), raw.end());
            std::int64_t cursor = INT64_MIN;
            for (auto [a, b] : raw) {
                a = std::max(a, cursor);
                if (a >= b) continue;
                intervals.push_back({Rational(a, q), Rational(b, q)});
                cursor = b;
            }
        }
        if (intervals.empty()) intervals.push_back({Rational(0), Rational(1, q)});
        family.generators.push_back(GeneratorSpec::piecewise(chi(intervals, random_value(rng))));
    }
    return family;
}

}  // namespace sis::testing
