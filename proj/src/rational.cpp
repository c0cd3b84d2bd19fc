#include "sis/rational.hpp"

#include <cctype>
#include <charconv>

namespace sis {

namespace {

std::int64_t parse_integer(const std::string& text, const std::string& original) {
    std::int64_t value = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || first == last) {
        throw std::invalid_argument("invalid rational '" + original + "'");
    }
    return value;
}

}  // namespace

Rational parse_rational(const std::string& text) {
    const auto slash = text.find('/');
    if (slash == std::string::npos) {
        return Rational(parse_integer(text, text));
    }
    const std::int64_t num = parse_integer(text.substr(0, slash), text);
    const std::int64_t den = parse_integer(text.substr(slash + 1), text);
    if (den == 0) {
        throw std::invalid_argument("invalid rational '" + text + "': zero denominator");
    }
    return Rational(num, den);
}

std::string format_rational(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

}  // namespace sis
