#pragma once

#include "sis/rational.hpp"

#include <stdexcept>

namespace sis {

/// Frequency discretization: M base samples omega_i = i/M on [0,1) and
/// integer fiber offsets k = -K..K-1, so every evaluated frequency
/// omega_i + k lies in [-K, K).
struct FrequencyGrid {
    int samples_per_unit;  // M
    int fiber_half_width;  // K

    FrequencyGrid(int m, int k) : samples_per_unit(m), fiber_half_width(k) {
        if (m < 2) throw std::invalid_argument("FrequencyGrid: M must be >= 2");
        if (k < 1) throw std::invalid_argument("FrequencyGrid: K must be >= 1");
    }

    int base_size() const { return samples_per_unit; }
    int fiber_size() const { return 2 * fiber_half_width; }

    double omega(int i) const {
        return static_cast<double>(i) / static_cast<double>(samples_per_unit);
    }
    Rational omega_exact(int i) const { return Rational(i, samples_per_unit); }

    /// Row index of fiber offset k in [-K, K).
    int row_of_offset(int k) const { return k + fiber_half_width; }
    int offset_of_row(int row) const { return row - fiber_half_width; }

    /// Flat index of entry (i, k) in a sampled-value array.
    int flat_index(int i, int k) const { return i * fiber_size() + row_of_offset(k); }

    bool operator==(const FrequencyGrid&) const = default;
};

}  // namespace sis
