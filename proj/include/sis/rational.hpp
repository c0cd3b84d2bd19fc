// Exact rational arithmetic for breakpoints, grid frequencies and measures.
#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sis {

using Rational = boost::rational<std::int64_t>;

/// Parses "p" or "p/q" (optional leading sign) into a reduced rational.
/// Throws std::invalid_argument on malformed input or q == 0.
Rational parse_rational(const std::string& text);

/// Formats as "p" when the denominator is 1, otherwise "p/q".
std::string format_rational(const Rational& r);

inline double to_double(const Rational& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

}  // namespace sis
