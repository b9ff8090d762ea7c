#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace fpplab {

/// Exact rational arithmetic for detour tolerances, masses and support points.
using Rational = boost::rational<std::int64_t>;

/// Parses "3", "-1/4", "0.125" or "1.25e-1" exactly. Throws std::invalid_argument.
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& r);

inline double to_double(const Rational& r) {
  return boost::rational_cast<double>(r);
}

/// floor(r) for possibly negative r.
std::int64_t floor_of(const Rational& r);

std::int64_t ceil_of(const Rational& r);

}  // namespace fpplab
