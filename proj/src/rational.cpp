#include "fpplab/rational.hpp"

#include <charconv>
#include <stdexcept>

namespace fpplab {
namespace {

std::int64_t parse_int(std::string_view s, std::string_view whole) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw std::invalid_argument("malformed rational: '" + std::string(whole) + "'");
  }
  return v;
}

Rational parse_decimal(std::string_view s, std::string_view whole) {
  std::int64_t exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    exponent = parse_int(s.substr(e + 1), whole);
    s = s.substr(0, e);
  }
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  std::string digits;
  auto dot = s.find('.');
  if (dot == std::string_view::npos) {
    digits = std::string(s);
  } else {
    digits = std::string(s.substr(0, dot)) + std::string(s.substr(dot + 1));
    exponent -= static_cast<std::int64_t>(s.size() - dot - 1);
  }
  if (digits.empty() || digits.size() > 18) {
    throw std::invalid_argument("malformed rational: '" + std::string(whole) + "'");
  }
  Rational r(parse_int(digits, whole));
  if (exponent > 18 || exponent < -18) {
    throw std::invalid_argument("rational exponent out of range: '" + std::string(whole) + "'");
  }
  std::int64_t scale = 1;
  for (std::int64_t i = 0; i < (exponent < 0 ? -exponent : exponent); ++i) scale *= 10;
  r = exponent < 0 ? r / scale : r * scale;
  return negative ? -r : r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Rational num = parse_decimal(text.substr(0, slash), text);
    Rational den = parse_decimal(text.substr(slash + 1), text);
    if (den == Rational(0)) throw std::invalid_argument("zero denominator: '" + std::string(text) + "'");
    return num / den;
  }
  return parse_decimal(text, text);
}

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

std::int64_t floor_of(const Rational& r) {
  std::int64_t q = r.numerator() / r.denominator();
  if (r.numerator() % r.denominator() != 0 && r.numerator() < 0) --q;
  return q;
}

std::int64_t ceil_of(const Rational& r) { return -floor_of(-r); }

}  // namespace fpplab
