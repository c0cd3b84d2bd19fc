#include "sis/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace sis {

namespace {

constexpr double kPi = std::numbers::pi;

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

// ---------------------------------------------------------------------------
// PiecewiseConstantSpectrum

PiecewiseConstantSpectrum PiecewiseConstantSpectrum::from_breakpoints(
    const std::vector<Rational>& breakpoints, const std::vector<Complex>& values) {
    if (breakpoints.size() < 2 || values.size() + 1 != breakpoints.size()) {
        throw std::invalid_argument(
            "piecewise spectrum: need |values| = |breakpoints| - 1 >= 1");
    }
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (!(breakpoints[i] < breakpoints[i + 1])) {
            throw std::invalid_argument("piecewise spectrum: breakpoints not strictly increasing");
        }
    }
    for (Complex v : values) {
        if (!finite(v)) {
            throw std::invalid_argument("piecewise spectrum: non-finite value");
        }
    }

    PiecewiseConstantSpectrum out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] == Complex{0.0, 0.0}) continue;
        if (!out.segments_.empty() && out.segments_.back().hi == breakpoints[i] &&
            out.segments_.back().value == values[i]) {
            out.segments_.back().hi = breakpoints[i + 1];  // merge touching equal runs
        } else {
            out.segments_.push_back({breakpoints[i], breakpoints[i + 1], values[i]});
        }
    }
    return out;
}

Complex PiecewiseConstantSpectrum::value_at(const Rational& omega) const {
    // Last segment with lo <= omega, then the half-open test omega < hi.
    auto it = std::upper_bound(segments_.begin(), segments_.end(), omega,
                               [](const Rational& w, const Segment& s) { return w < s.lo; });
    if (it == segments_.begin()) return {0.0, 0.0};
    --it;
    return omega < it->hi ? it->value : Complex{0.0, 0.0};
}

Rational PiecewiseConstantSpectrum::support_measure(const Rational& a, const Rational& b) const {
    if (!(a < b)) throw std::invalid_argument("support_measure: interval requires a < b");
    Rational total(0);
    for (const Segment& s : segments_) {
        const Rational lo = std::max(s.lo, a);
        const Rational hi = std::min(s.hi, b);
        if (lo < hi) total += hi - lo;
    }
    return total;
}

std::int64_t PiecewiseConstantSpectrum::breakpoint_denominator() const {
    std::int64_t d = 1;
    for (const Segment& s : segments_) {
        d = std::lcm(d, s.lo.denominator());
        d = std::lcm(d, s.hi.denominator());
    }
    return d;
}

PiecewiseConstantSpectrum make_piecewise_constant(const std::vector<Rational>& breakpoints,
                                                  const std::vector<Complex>& values) {
    return PiecewiseConstantSpectrum::from_breakpoints(breakpoints, values);
}

Rational support_measure(const PiecewiseConstantSpectrum& spec, const Rational& a,
                         const Rational& b) {
    return spec.support_measure(a, b);
}

// ---------------------------------------------------------------------------
// GeneratorSpec

GeneratorSpec GeneratorSpec::piecewise(PiecewiseConstantSpectrum spectrum) {
    return GeneratorSpec(Variant(std::move(spectrum)));
}

GeneratorSpec GeneratorSpec::bspline(int order) {
    if (order < 0) throw std::invalid_argument("bspline: order must be >= 0");
    return GeneratorSpec(Variant(BsplineSpec{order}));
}

GeneratorSpec GeneratorSpec::daubechies(std::vector<double> taps, int depth) {
    if (taps.size() < 2) throw std::invalid_argument("daubechies: need at least 2 taps");
    if (depth < 1) throw std::invalid_argument("daubechies: depth must be >= 1");
    double sum = 0.0;
    for (double t : taps) {
        if (!std::isfinite(t)) throw std::invalid_argument("daubechies: non-finite tap");
        sum += t;
    }
    if (std::abs(sum - std::numbers::sqrt2) > 1e-12) {
        throw std::invalid_argument("daubechies: taps must sum to sqrt(2) within 1e-12");
    }
    return GeneratorSpec(Variant(DaubechiesSpec{std::move(taps), depth}));
}

GeneratorSpec GeneratorSpec::gaussian(double width) {
    if (!(width > 0.0) || !std::isfinite(width)) {
        throw std::invalid_argument("gaussian: width must be positive");
    }
    return GeneratorSpec(Variant(GaussianSpec{width}));
}

GeneratorSpec GeneratorSpec::samples(FrequencyGrid grid, std::vector<Complex> values) {
    if (static_cast<int>(values.size()) != grid.base_size() * grid.fiber_size()) {
        throw std::invalid_argument("samples: values must have length 2K*M for the declared grid");
    }
    for (Complex v : values) {
        if (!finite(v)) throw std::invalid_argument("samples: non-finite value");
    }
    return GeneratorSpec(Variant(RawSamplesSpec{grid, std::move(values)}));
}

std::string GeneratorSpec::type_name() const {
    switch (v_.index()) {
        case 0: return "piecewise_constant";
        case 1: return "bspline";
        case 2: return "daubechies";
        case 3: return "gaussian";
        default: return "samples";
    }
}

std::vector<double> daubechies_taps(int length) {
    // Orthonormal filters normalized so the taps sum to sqrt(2).
    switch (length) {
        case 2:
            return {0.70710678118654757, 0.70710678118654757};
        case 4:
            return {0.48296291314453421, 0.83651630373780805, 0.22414386804201333,
                    -0.12940952255126045};
        case 6:
            return {0.33267055295008269, 0.80689150931109277, 0.45987750211849171,
                    -0.13501102001025464, -0.085441273882026658, 0.035226291885709568};
        case 8:
            return {0.2303778133088964, 0.71484657055291556, 0.63088076792985903,
                    -0.027983769416859493, -0.18703481171909295, 0.030841381835560674,
                    0.032883011666885162, -0.010597401785069018};
        default:
            throw std::invalid_argument("daubechies_taps: available lengths are 2, 4, 6, 8");
    }
}

// ---------------------------------------------------------------------------
// Closed-form transforms

Complex bspline_transform(int order, double omega) {
    // Transform of the (order+1)-fold convolution power of the unit box:
    // (e^{-i pi w} sin(pi w) / (pi w))^{order+1}.
    const double x = kPi * omega;
    const double s = (omega == 0.0) ? 1.0 : std::sin(x) / x;
    const Complex base = std::polar(s, -x);
    Complex out{1.0, 0.0};
    for (int p = 0; p <= order; ++p) out *= base;
    return out;
}

Complex daubechies_transform(const std::vector<double>& taps, int depth, double omega) {
    Complex product{1.0, 0.0};
    double scale = 0.5;
    for (int j = 1; j <= depth; ++j, scale *= 0.5) {
        const double w = omega * scale;
        Complex symbol{0.0, 0.0};
        for (std::size_t h = 0; h < taps.size(); ++h) {
            symbol += taps[h] * std::polar(1.0, -2.0 * kPi * static_cast<double>(h) * w);
        }
        product *= symbol / std::numbers::sqrt2;
    }
    if (!finite(product)) {
        throw std::runtime_error("daubechies_transform: non-finite symbol product");
    }
    return product;
}

Complex gaussian_transform(double width, double omega) {
    const double t = width * omega;
    return {std::exp(-kPi * t * t), 0.0};
}

// ---------------------------------------------------------------------------
// SampledSpectrum

SampledSpectrum::SampledSpectrum(FrequencyGrid grid, std::vector<Complex> values)
    : grid_(grid), values_(std::move(values)) {
    if (static_cast<int>(values_.size()) != grid_.base_size() * grid_.fiber_size()) {
        throw std::invalid_argument("SampledSpectrum: values length must be 2K*M");
    }
    for (Complex v : values_) {
        if (!finite(v)) throw std::invalid_argument("SampledSpectrum: non-finite entry");
    }
}

double SampledSpectrum::max_abs() const {
    double mx = 0.0;
    for (Complex v : values_) mx = std::max(mx, std::abs(v));
    return mx;
}

double SampledSpectrum::norm_squared() const {
    double sum = 0.0;
    for (Complex v : values_) sum += std::norm(v);
    return sum / static_cast<double>(grid_.base_size());
}

bool SampledSpectrum::is_zero() const {
    return std::all_of(values_.begin(), values_.end(),
                       [](Complex v) { return v == Complex{0.0, 0.0}; });
}

SampledSpectrum evaluate(const GeneratorSpec& spec, const FrequencyGrid& grid) {
    const int m = grid.base_size();
    const int k_lo = -grid.fiber_half_width;
    const int k_hi = grid.fiber_half_width;
    std::vector<Complex> values(static_cast<std::size_t>(m) * grid.fiber_size());

    if (const auto* pcs = std::get_if<PiecewiseConstantSpectrum>(&spec.variant())) {
        const std::int64_t d = pcs->breakpoint_denominator();
        if (m % d != 0) {
            throw std::invalid_argument(
                "evaluate: M must be a multiple of the breakpoint denominator " +
                std::to_string(d) + " so interval edges land on grid points");
        }
        for (int i = 0; i < m; ++i) {
            for (int k = k_lo; k < k_hi; ++k) {
                values[grid.flat_index(i, k)] = pcs->value_at(Rational(i, m) + k);
            }
        }
        return SampledSpectrum(grid, std::move(values));
    }
    if (const auto* raw = std::get_if<RawSamplesSpec>(&spec.variant())) {
        if (!(raw->grid == grid)) {
            throw std::invalid_argument("evaluate: sample spec declared for a different grid");
        }
        return SampledSpectrum(grid, raw->values);
    }

    auto pointwise = [&](double w) -> Complex {
        if (const auto* b = std::get_if<BsplineSpec>(&spec.variant())) {
            return bspline_transform(b->order, w);
        }
        if (const auto* dbv = std::get_if<DaubechiesSpec>(&spec.variant())) {
            return daubechies_transform(dbv->taps, dbv->depth, w);
        }
        return gaussian_transform(std::get<GaussianSpec>(spec.variant()).width, w);
    };
    for (int i = 0; i < m; ++i) {
        for (int k = k_lo; k < k_hi; ++k) {
            const Complex v = pointwise(grid.omega(i) + k);
            if (!finite(v)) throw std::runtime_error("evaluate: non-finite spectrum value");
            values[grid.flat_index(i, k)] = v;
        }
    }
    return SampledSpectrum(grid, std::move(values));
}

double tail_energy_estimate(const GeneratorSpec& spec, const FrequencyGrid& grid) {
    if (std::holds_alternative<RawSamplesSpec>(spec.variant())) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    const FrequencyGrid wide(grid.samples_per_unit, 2 * grid.fiber_half_width);
    const SampledSpectrum s = evaluate(spec, wide);
    double sum = 0.0;
    for (int i = 0; i < wide.base_size(); ++i) {
        for (int k = -wide.fiber_half_width; k < wide.fiber_half_width; ++k) {
            if (k >= -grid.fiber_half_width && k < grid.fiber_half_width) continue;
            sum += std::norm(s.value(i, k));
        }
    }
    return sum / static_cast<double>(grid.base_size());
}

// ---------------------------------------------------------------------------
// JSON

namespace {

nlohmann::json complex_to_json(Complex z) { return nlohmann::json::array({z.real(), z.imag()}); }

Complex complex_from_json(const nlohmann::json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw std::invalid_argument(path + ": complex value must be a [re, im] pair");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

Rational rational_from_json(const nlohmann::json& j, const std::string& path) {
    try {
        if (j.is_string()) return parse_rational(j.get<std::string>());
        if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    } catch (const std::exception& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
    throw std::invalid_argument(path + ": rational must be a \"p/q\" string or integer");
}

FrequencyGrid grid_from_json(const nlohmann::json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("M") || !j.contains("K")) {
        throw std::invalid_argument(path + ": grid must be an object with fields M and K");
    }
    if (!j["M"].is_number_integer() || !j["K"].is_number_integer()) {
        throw std::invalid_argument(path + ": grid M and K must be integers");
    }
    try {
        return FrequencyGrid(j["M"].get<int>(), j["K"].get<int>());
    } catch (const std::exception& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

}  // namespace

nlohmann::json generator_to_json(const GeneratorSpec& spec) {
    nlohmann::json j;
    j["type"] = spec.type_name();
    if (const auto* pcs = std::get_if<PiecewiseConstantSpectrum>(&spec.variant())) {
        auto breakpoints = nlohmann::json::array();
        auto values = nlohmann::json::array();
        const auto& segs = pcs->segments();
        if (segs.empty()) {  // zero spectrum: one explicit zero interval
            breakpoints = {"0", "1"};
            values.push_back(complex_to_json({0.0, 0.0}));
        } else {
            breakpoints.push_back(format_rational(segs[0].lo));
            for (std::size_t s = 0; s < segs.size(); ++s) {
                values.push_back(complex_to_json(segs[s].value));
                breakpoints.push_back(format_rational(segs[s].hi));
                if (s + 1 < segs.size() && segs[s].hi != segs[s + 1].lo) {
                    values.push_back(complex_to_json({0.0, 0.0}));
                    breakpoints.push_back(format_rational(segs[s + 1].lo));
                }
            }
        }
        j["breakpoints"] = breakpoints;
        j["values"] = values;
    } else if (const auto* b = std::get_if<BsplineSpec>(&spec.variant())) {
        j["order"] = b->order;
    } else if (const auto* dbv = std::get_if<DaubechiesSpec>(&spec.variant())) {
        j["taps"] = dbv->taps;
        j["depth"] = dbv->depth;
    } else if (const auto* g = std::get_if<GaussianSpec>(&spec.variant())) {
        j["width"] = g->width;
    } else {
        const auto& raw = std::get<RawSamplesSpec>(spec.variant());
        j["grid"] = {{"M", raw.grid.samples_per_unit}, {"K", raw.grid.fiber_half_width}};
        auto values = nlohmann::json::array();
        for (Complex v : raw.values) values.push_back(complex_to_json(v));
        j["values"] = values;
    }
    return j;
}

GeneratorSpec generator_from_json(const nlohmann::json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
        throw std::invalid_argument(path + ": generator must be an object with a \"type\" field");
    }
    const std::string type = j["type"].get<std::string>();
    auto require = [&](const char* field) -> const nlohmann::json& {
        if (!j.contains(field)) {
            throw std::invalid_argument(path + "." + field + ": missing field");
        }
        return j[field];
    };

    try {
        if (type == "piecewise_constant") {
            const auto& jb = require("breakpoints");
            const auto& jv = require("values");
            if (!jb.is_array() || !jv.is_array()) {
                throw std::invalid_argument(path + ": breakpoints and values must be arrays");
            }
            std::vector<Rational> breakpoints;
            for (std::size_t i = 0; i < jb.size(); ++i) {
                breakpoints.push_back(
                    rational_from_json(jb[i], path + ".breakpoints[" + std::to_string(i) + "]"));
            }
            std::vector<Complex> values;
            for (std::size_t i = 0; i < jv.size(); ++i) {
                values.push_back(
                    complex_from_json(jv[i], path + ".values[" + std::to_string(i) + "]"));
            }
            return GeneratorSpec::piecewise(make_piecewise_constant(breakpoints, values));
        }
        if (type == "bspline") {
            const auto& jo = require("order");
            if (!jo.is_number_integer()) {
                throw std::invalid_argument(path + ".order: must be an integer");
            }
            return GeneratorSpec::bspline(jo.get<int>());
        }
        if (type == "daubechies") {
            std::vector<double> taps;
            if (j.contains("taps")) {
                if (!j["taps"].is_array()) {
                    throw std::invalid_argument(path + ".taps: must be an array of numbers");
                }
                taps = j["taps"].get<std::vector<double>>();
            } else if (j.contains("length")) {
                taps = daubechies_taps(j["length"].get<int>());
            } else {
                throw std::invalid_argument(path + ": daubechies needs \"taps\" or \"length\"");
            }
            const int depth = j.contains("depth") ? j["depth"].get<int>() : 20;
            return GeneratorSpec::daubechies(std::move(taps), depth);
        }
        if (type == "gaussian") {
            const auto& jw = require("width");
            if (!jw.is_number()) throw std::invalid_argument(path + ".width: must be a number");
            return GeneratorSpec::gaussian(jw.get<double>());
        }
        if (type == "samples") {
            const FrequencyGrid grid = grid_from_json(require("grid"), path + ".grid");
            const auto& jv = require("values");
            if (!jv.is_array()) {
                throw std::invalid_argument(path + ".values: must be an array");
            }
            std::vector<Complex> values;
            for (std::size_t i = 0; i < jv.size(); ++i) {
                values.push_back(
                    complex_from_json(jv[i], path + ".values[" + std::to_string(i) + "]"));
            }
            return GeneratorSpec::samples(grid, std::move(values));
        }
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
    throw std::invalid_argument(path + ".type: unknown generator type \"" + type + "\"");
}

}  // namespace sis
