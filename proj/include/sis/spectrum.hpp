// Generator spectra: exact piecewise-constant transforms with rational
// breakpoints, closed-form families (B-spline, Daubechies, Gaussian), raw
// samples, and their evaluation on a frequency grid.
#pragma once

#include "sis/grid.hpp"
#include "sis/rational.hpp"

#include <complex>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace sis {

using Complex = std::complex<double>;

/// Exact piecewise-constant spectrum. Canonical form: maximal half-open
/// segments [lo, hi) with nonzero value, strictly increasing, touching
/// segments with equal values merged. Value outside all segments is 0.
class PiecewiseConstantSpectrum {
public:
    struct Segment {
        Rational lo;
        Rational hi;
        Complex value;
        bool operator==(const Segment&) const = default;
    };

    PiecewiseConstantSpectrum() = default;  // the zero spectrum

    static PiecewiseConstantSpectrum from_breakpoints(const std::vector<Rational>& breakpoints,
                                                      const std::vector<Complex>& values);

    /// Value at omega with the half-open convention: value of [lo, hi) at lo,
    /// 0 at hi (unless another segment starts there).
    Complex value_at(const Rational& omega) const;

    /// Exact Lebesgue measure of {omega in [a,b) : value != 0}.
    Rational support_measure(const Rational& a, const Rational& b) const;

    /// lcm of the reduced denominators of all segment endpoints (1 if empty).
    std::int64_t breakpoint_denominator() const;

    const std::vector<Segment>& segments() const { return segments_; }
    bool is_zero() const { return segments_.empty(); }

    bool operator==(const PiecewiseConstantSpectrum&) const = default;

private:
    std::vector<Segment> segments_;
};

PiecewiseConstantSpectrum make_piecewise_constant(const std::vector<Rational>& breakpoints,
                                                  const std::vector<Complex>& values);

Rational support_measure(const PiecewiseConstantSpectrum& spec, const Rational& a,
                         const Rational& b);

struct BsplineSpec {
    int order = 0;  // box = order 0; order p is the (p+1)-fold box convolution
    bool operator==(const BsplineSpec&) const = default;
};

struct DaubechiesSpec {
    std::vector<double> taps;  // two-scale filter, sums to sqrt(2)
    int depth = 20;            // truncation depth J of the symbol product
    bool operator==(const DaubechiesSpec&) const = default;
};

struct GaussianSpec {
    double width = 1.0;
    bool operator==(const GaussianSpec&) const = default;
};

struct RawSamplesSpec {
    FrequencyGrid grid;
    std::vector<Complex> values;  // length 2K*M, entry (i,k) at flat_index(i,k)
    bool operator==(const RawSamplesSpec&) const = default;
};

/// Orthonormal Daubechies filter taps for lengths 2, 4, 6, 8.
std::vector<double> daubechies_taps(int length);

/// A generator described by its Fourier transform.
class GeneratorSpec {
public:
    using Variant = std::variant<PiecewiseConstantSpectrum, BsplineSpec, DaubechiesSpec,
                                 GaussianSpec, RawSamplesSpec>;

    static GeneratorSpec piecewise(PiecewiseConstantSpectrum spectrum);
    static GeneratorSpec bspline(int order);
    static GeneratorSpec daubechies(std::vector<double> taps, int depth = 20);
    static GeneratorSpec gaussian(double width);
    static GeneratorSpec samples(FrequencyGrid grid, std::vector<Complex> values);

    const Variant& variant() const { return v_; }
    std::string type_name() const;

    bool operator==(const GeneratorSpec&) const = default;

private:
    explicit GeneratorSpec(Variant v) : v_(std::move(v)) {}
    Variant v_;
};

// Pointwise closed-form transforms.
Complex bspline_transform(int order, double omega);
Complex daubechies_transform(const std::vector<double>& taps, int depth, double omega);
Complex gaussian_transform(double width, double omega);

/// A spectrum sampled on a grid: entry (i,k) = phi_hat(omega_i + k).
class SampledSpectrum {
public:
    SampledSpectrum(FrequencyGrid grid, std::vector<Complex> values);

    const FrequencyGrid& grid() const { return grid_; }
    Complex value(int i, int k) const { return values_[grid_.flat_index(i, k)]; }
    const std::vector<Complex>& values() const { return values_; }
    std::vector<Complex>& mutable_values() { return values_; }

    double max_abs() const;
    /// Riemann sum of |.|^2 over the grid with cell weight 1/M.
    double norm_squared() const;
    bool is_zero() const;

    bool operator==(const SampledSpectrum&) const = default;

private:
    FrequencyGrid grid_;
    std::vector<Complex> values_;
};

/// Samples a generator's transform on the grid. Piecewise-constant spectra
/// are looked up in exact rational arithmetic (M must be a multiple of the
/// breakpoint denominator); closed-form families are evaluated pointwise.
SampledSpectrum evaluate(const GeneratorSpec& spec, const FrequencyGrid& grid);

/// Energy outside the fiber window, estimated by re-evaluating once on a
/// grid widened to 2K. Returns NaN for raw-sample specs (not extendable).
double tail_energy_estimate(const GeneratorSpec& spec, const FrequencyGrid& grid);

// JSON serialization: {"type": ...} discriminated objects, rationals as
// "p/q" strings, complex values as [re, im] pairs.
nlohmann::json generator_to_json(const GeneratorSpec& spec);
GeneratorSpec generator_from_json(const nlohmann::json& j, const std::string& path);

}  // namespace sis
