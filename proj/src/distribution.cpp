#include "fpplab/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fpplab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double parse_bound(const std::string& s) {
  if (s == "inf" || s == "+inf") return kInf;
  return to_double(parse_rational(s));
}

std::string fmt_double(double x) {
  if (std::isinf(x)) return "inf";
  std::ostringstream out;
  out.precision(17);
  out << x;
  return out.str();
}

/// Decimal when the denominator divides a power of ten, a/b otherwise.
std::string fmt_rational(const Rational& r) {
  auto d = r.denominator();
  int twos = 0, fives = 0;
  while (d % 2 == 0) d /= 2, ++twos;
  while (d % 5 == 0) d /= 5, ++fives;
  if (d != 1) return to_string(r);
  int digits = std::max(twos, fives);
  if (digits == 0) return std::to_string(r.numerator());
  std::int64_t scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  std::int64_t scaled = r.numerator() * (scale / r.denominator());
  bool neg = scaled < 0;
  std::string s = std::to_string(neg ? -scaled : scaled);
  if (static_cast<int>(s.size()) <= digits) s.insert(0, static_cast<std::size_t>(digits + 1 - static_cast<int>(s.size())), '0');
  s.insert(s.size() - static_cast<std::size_t>(digits), ".");
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return neg ? "-" + s : s;
}

Rational clamp01(const Rational& r) {
  if (r < 0) return Rational(0);
  if (r > 1) return Rational(1);
  return r;
}

}  // namespace

// ---------------------------------------------------------------- BorelSet

BorelSet BorelSet::interval(double a, double b) {
  BorelSet s;
  if (a < b) s.intervals_.emplace_back(a, b);
  return s;
}

BorelSet BorelSet::point(double p) {
  BorelSet s;
  s.points_.push_back(p);
  return s;
}

BorelSet BorelSet::everything() { return interval(-kInf, kInf); }

BorelSet BorelSet::parse(std::string_view text) {
  BorelSet s;
  std::string t(text);
  std::size_t i = 0;
  auto skip = [&] {
    while (i < t.size() && (t[i] == ' ' || t[i] == '\t' || t[i] == ',')) ++i;
  };
  skip();
  if (t.substr(i) == "empty") return s;
  while (i < t.size()) {
    if (t[i] == '[') {
      auto close = t.find(')', i);
      auto comma = t.find(',', i);
      if (close == std::string::npos || comma == std::string::npos || comma > close) {
        throw std::invalid_argument("malformed interval in '" + t + "'");
      }
      double a = parse_bound(t.substr(i + 1, comma - i - 1));
      double b = parse_bound(t.substr(comma + 1, close - comma - 1));
      if (!(a < b)) throw std::invalid_argument("empty or reversed interval in '" + t + "'");
      s.intervals_.emplace_back(a, b);
      i = close + 1;
    } else if (t[i] == '{') {
      auto close = t.find('}', i);
      if (close == std::string::npos) throw std::invalid_argument("malformed point in '" + t + "'");
      s.points_.push_back(parse_bound(t.substr(i + 1, close - i - 1)));
      i = close + 1;
    } else {
      throw std::invalid_argument("malformed Borel set '" + t + "'; use [a,b) and {p}");
    }
    skip();
  }
  s.normalize();
  return s;
}

void BorelSet::normalize() {
  std::sort(intervals_.begin(), intervals_.end());
  std::vector<std::pair<double, double>> merged;
  for (auto iv : intervals_) {
    if (!merged.empty() && iv.first <= merged.back().second) {
      merged.back().second = std::max(merged.back().second, iv.second);
    } else {
      merged.push_back(iv);
    }
  }
  intervals_ = std::move(merged);
  std::sort(points_.begin(), points_.end());
  points_.erase(std::unique(points_.begin(), points_.end()), points_.end());
  std::vector<double> kept;
  for (double p : points_) {
    bool inside = false;
    for (auto [a, b] : intervals_) inside = inside || (a <= p && p < b);
    if (inside) continue;
    // A point closing an interval's open end extends nothing; keep it separate.
    kept.push_back(p);
  }
  points_ = std::move(kept);
}

BorelSet BorelSet::unite(const BorelSet& other) const {
  BorelSet s = *this;
  s.intervals_.insert(s.intervals_.end(), other.intervals_.begin(), other.intervals_.end());
  s.points_.insert(s.points_.end(), other.points_.begin(), other.points_.end());
  s.normalize();
  return s;
}

BorelSet BorelSet::intersect_interval(double a, double b) const {
  BorelSet s;
  for (auto [lo, hi] : intervals_) {
    double l = std::max(lo, a), h = std::min(hi, b);
    if (l < h) s.intervals_.emplace_back(l, h);
  }
  for (double p : points_) {
    if (a <= p && p < b) s.points_.push_back(p);
  }
  s.normalize();
  return s;
}

bool BorelSet::contains(double x) const {
  for (auto [a, b] : intervals_) {
    if (a <= x && x < b) return true;
  }
  return std::binary_search(points_.begin(), points_.end(), x);
}

std::string BorelSet::to_string() const {
  if (empty()) return "empty";
  std::string out;
  for (auto [a, b] : intervals_) {
    if (!out.empty()) out += ' ';
    out += "[" + fmt_double(a) + "," + fmt_double(b) + ")";
  }
  for (double p : points_) {
    if (!out.empty()) out += ' ';
    out += "{" + fmt_double(p) + "}";
  }
  return out;
}

// ---------------------------------------------------------------- Distribution

Distribution Distribution::atom(Rational v) {
  Distribution d;
  d.add(AtomPiece{v, 1});
  d.validate();
  return d;
}

Distribution Distribution::uniform(Rational lo, Rational hi) {
  Distribution d;
  d.add(UniformPiece{lo, hi, 1});
  d.validate();
  return d;
}

Distribution Distribution::exponential(Rational rate, Rational shift) {
  Distribution d;
  d.add(ExpPiece{rate, shift, 1});
  d.validate();
  return d;
}

Distribution Distribution::parse(std::string_view text) {
  Distribution d;
  std::string t(text);
  std::replace(t.begin(), t.end(), ';', '\n');
  std::istringstream lines(t);
  std::string line;
  while (std::getline(lines, line)) {
    std::istringstream in(line);
    std::string kind;
    if (!(in >> kind)) continue;
    std::vector<std::string> args;
    for (std::string a; in >> a;) args.push_back(a);
    auto need = [&](std::size_t n) {
      if (args.size() != n) {
        throw std::invalid_argument("'" + kind + "' takes " + std::to_string(n) + " numbers: '" + line + "'");
      }
    };
    if (kind == "atom") {
      need(2);
      d.add(AtomPiece{parse_rational(args[0]), parse_rational(args[1])});
    } else if (kind == "unif") {
      need(3);
      d.add(UniformPiece{parse_rational(args[0]), parse_rational(args[1]), parse_rational(args[2])});
    } else if (kind == "exp") {
      need(3);
      d.add(ExpPiece{parse_rational(args[0]), parse_rational(args[1]), parse_rational(args[2])});
    } else {
      throw std::invalid_argument("unknown distribution piece '" + kind + "'");
    }
  }
  d.validate();
  return d;
}

void Distribution::validate() const {
  Rational total = 0;
  auto positive = [](const Rational& m) {
    if (m <= 0) throw std::invalid_argument("piece masses must be positive");
  };
  for (const auto& a : atoms_) {
    positive(a.mass);
    if (a.value < 0) throw std::invalid_argument("atom below zero");
    total += a.mass;
  }
  for (const auto& u : uniforms_) {
    positive(u.mass);
    if (u.lo < 0 || !(u.lo < u.hi)) throw std::invalid_argument("uniform piece needs 0 <= lo < hi");
    total += u.mass;
  }
  if (exps_.size() > 1) throw std::invalid_argument("at most one exponential piece");
  for (const auto& e : exps_) {
    positive(e.mass);
    if (e.rate <= 0 || e.shift < 0) throw std::invalid_argument("exponential piece needs rate > 0 and shift >= 0");
    total += e.mass;
  }
  if (total != Rational(1)) throw std::invalid_argument("masses sum to " + to_string(total) + ", not 1");
}

std::string Distribution::literal() const {
  std::string out;
  auto sep = [&] {
    if (!out.empty()) out += "; ";
  };
  for (const auto& a : atoms_) {
    sep();
    out += "atom " + fmt_rational(a.value) + " " + fmt_rational(a.mass);
  }
  for (const auto& u : uniforms_) {
    sep();
    out += "unif " + fmt_rational(u.lo) + " " + fmt_rational(u.hi) + " " + fmt_rational(u.mass);
  }
  for (const auto& e : exps_) {
    sep();
    out += "exp " + fmt_rational(e.rate) + " " + fmt_rational(e.shift) + " " + fmt_rational(e.mass);
  }
  return out;
}

std::optional<Rational> Distribution::exact_mean() const {
  Rational m = 0;
  for (const auto& a : atoms_) m += a.value * a.mass;
  for (const auto& u : uniforms_) m += (u.lo + u.hi) / 2 * u.mass;
  for (const auto& e : exps_) m += (e.shift + Rational(1) / e.rate) * e.mass;
  return m;
}

double Distribution::mean() const { return to_double(*exact_mean()); }

double Distribution::inf_support() const {
  double m = kInf;
  for (const auto& a : atoms_) m = std::min(m, to_double(a.value));
  for (const auto& u : uniforms_) m = std::min(m, to_double(u.lo));
  for (const auto& e : exps_) m = std::min(m, to_double(e.shift));
  return m;
}

double Distribution::sup_support() const {
  if (has_exp()) return kInf;
  double m = 0;
  for (const auto& a : atoms_) m = std::max(m, to_double(a.value));
  for (const auto& u : uniforms_) m = std::max(m, to_double(u.hi));
  return m;
}

double Distribution::cdf(double x) const {
  double f = 0;
  for (const auto& a : atoms_) {
    if (to_double(a.value) <= x) f += to_double(a.mass);
  }
  for (const auto& u : uniforms_) {
    double lo = to_double(u.lo), hi = to_double(u.hi);
    if (x >= hi) {
      f += to_double(u.mass);
    } else if (x > lo) {
      f += to_double(u.mass) * (x - lo) / (hi - lo);
    }
  }
  for (const auto& e : exps_) {
    double s = to_double(e.shift);
    if (x > s) f += to_double(e.mass) * -std::expm1(-to_double(e.rate) * (x - s));
  }
  return std::min(f, 1.0);
}

double Distribution::cdf_left(double x) const {
  double f = cdf(x);
  for (const auto& a : atoms_) {
    if (to_double(a.value) == x) f -= to_double(a.mass);
  }
  return std::max(f, 0.0);
}

std::optional<Rational> Distribution::cdf_exact(const Rational& x) const {
  if (has_exp()) return std::nullopt;
  Rational f = 0;
  for (const auto& a : atoms_) {
    if (a.value <= x) f += a.mass;
  }
  for (const auto& u : uniforms_) f += u.mass * clamp01((x - u.lo) / (u.hi - u.lo));
  return f;
}

std::optional<Rational> Distribution::cdf_left_exact(const Rational& x) const {
  auto f = cdf_exact(x);
  if (!f) return f;
  for (const auto& a : atoms_) {
    if (a.value == x) *f -= a.mass;
  }
  return f;
}

std::vector<Rational> Distribution::breakpoints() const {
  std::vector<Rational> b;
  for (const auto& a : atoms_) b.push_back(a.value);
  for (const auto& u : uniforms_) {
    b.push_back(u.lo);
    b.push_back(u.hi);
  }
  for (const auto& e : exps_) b.push_back(e.shift);
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

double Distribution::quantile(double u) const {
  if (!(u > 0 && u < 1)) throw std::invalid_argument("quantile needs u in (0, 1)");
  auto bps = breakpoints();
  std::vector<double> b;
  for (const auto& r : bps) b.push_back(to_double(r));
  // Density sum on (b[k], b[k+1]) for the uniform pieces.
  auto slope = [&](double x0, double x1) {
    double s = 0;
    for (const auto& p : uniforms_) {
      if (to_double(p.lo) <= x0 && x1 <= to_double(p.hi)) s += to_double(p.mass) / to_double(p.hi - p.lo);
    }
    return s;
  };
  const double exp_start = has_exp() ? to_double(exps_[0].shift) : kInf;
  for (std::size_t k = 0; k < b.size(); ++k) {
    double right = cdf(b[k]);
    if (u <= right) return b[k];
    if (k + 1 == b.size()) break;
    double next_left = cdf_left(b[k + 1]);
    if (u <= next_left) {
      if (b[k] < exp_start) return b[k] + (u - right) / slope(b[k], b[k + 1]);
      // Exponential density present: bisect the continuous, increasing CDF.
      double lo = b[k], hi = b[k + 1];
      for (int it = 0; it < 200 && lo < hi; ++it) {
        double mid = lo + (hi - lo) / 2;
        if (mid <= lo || mid >= hi) break;
        (cdf(mid) >= u ? hi : lo) = mid;
      }
      return hi;
    }
  }
  if (has_exp()) {
    // Only the exponential tail remains beyond the last breakpoint.
    const auto& e = exps_[0];
    double last = b.back();
    double rate = to_double(e.rate), s = to_double(e.shift), m = to_double(e.mass);
    double rem = std::exp(-rate * (last - s)) - (u - cdf(last)) / m;
    if (rem <= 0) return std::numeric_limits<double>::max();
    return s - std::log(rem) / rate;
  }
  return b.back();
}

double Distribution::expected_min(double t) const {
  double r = 0;
  for (const auto& a : atoms_) r += to_double(a.mass) * std::min(to_double(a.value), t);
  for (const auto& u : uniforms_) {
    double lo = to_double(u.lo), hi = to_double(u.hi), m = to_double(u.mass);
    if (t <= lo) {
      r += m * t;
    } else if (t >= hi) {
      r += m * (lo + hi) / 2;
    } else {
      r += m * ((t * t - lo * lo) / 2 + t * (hi - t)) / (hi - lo);
    }
  }
  for (const auto& e : exps_) {
    double s = to_double(e.shift), rate = to_double(e.rate), m = to_double(e.mass);
    r += m * (t <= s ? t : s - std::expm1(-rate * (t - s)) / rate);
  }
  return r;
}

double Distribution::interval_mass(double a, double b) const {
  if (!(a < b)) return 0;
  double hi = std::isinf(b) ? 1.0 : cdf_left(b);
  double lo = std::isinf(a) ? 0.0 : cdf_left(a);
  return std::max(hi - lo, 0.0);
}

double Distribution::mass_of(const BorelSet& A) const {
  double m = 0;
  for (auto [a, b] : A.intervals()) m += interval_mass(a, b);
  for (double p : A.points()) m += cdf(p) - cdf_left(p);
  return m;
}

Distribution Distribution::shifted(const Rational& delta, const Rational& scale) const {
  Distribution d;
  for (const auto& a : atoms_) d.atoms_.push_back({a.value + delta, a.mass * scale});
  for (const auto& u : uniforms_) d.uniforms_.push_back({u.lo + delta, u.hi + delta, u.mass * scale});
  for (const auto& e : exps_) d.exps_.push_back({e.rate, e.shift + delta, e.mass * scale});
  return d;
}

Distribution& Distribution::merge(const Distribution& other) {
  atoms_.insert(atoms_.end(), other.atoms_.begin(), other.atoms_.end());
  uniforms_.insert(uniforms_.end(), other.uniforms_.begin(), other.uniforms_.end());
  exps_.insert(exps_.end(), other.exps_.begin(), other.exps_.end());
  return *this;
}

namespace {

std::vector<Rational> joint_breakpoints(const Distribution& a, const Distribution& b) {
  auto pa = a.breakpoints();
  auto pb = b.breakpoints();
  pa.insert(pa.end(), pb.begin(), pb.end());
  std::sort(pa.begin(), pa.end());
  pa.erase(std::unique(pa.begin(), pa.end()), pa.end());
  return pa;
}

std::vector<double> numeric_grid(const Distribution& a, const Distribution& b) {
  std::vector<double> xs;
  double top = 0;
  for (const auto& r : joint_breakpoints(a, b)) {
    xs.push_back(to_double(r));
    top = std::max(top, to_double(r));
  }
  double slow = 1;
  for (const auto* d : {&a, &b}) {
    for (const auto& e : d->exps()) slow = std::max(slow, 1 / to_double(e.rate));
  }
  top += 40 * slow;
  for (int i = 0; i <= 4000; ++i) xs.push_back(top * i / 4000);
  return xs;
}

}  // namespace

bool same_law(const Distribution& a, const Distribution& b) {
  if (!a.has_exp() && !b.has_exp()) {
    for (const auto& x : joint_breakpoints(a, b)) {
      if (*a.cdf_exact(x) != *b.cdf_exact(x) || *a.cdf_left_exact(x) != *b.cdf_left_exact(x)) return false;
    }
    return true;
  }
  for (double x : numeric_grid(a, b)) {
    if (std::abs(a.cdf(x) - b.cdf(x)) > 1e-12 || std::abs(a.cdf_left(x) - b.cdf_left(x)) > 1e-12) return false;
  }
  return true;
}

bool stochastically_below(const Distribution& lower, const Distribution& upper) {
  if (!lower.has_exp() && !upper.has_exp()) {
    for (const auto& x : joint_breakpoints(lower, upper)) {
      if (*lower.cdf_exact(x) < *upper.cdf_exact(x)) return false;
      if (*lower.cdf_left_exact(x) < *upper.cdf_left_exact(x)) return false;
    }
    return true;
  }
  for (double x : numeric_grid(lower, upper)) {
    if (lower.cdf(x) < upper.cdf(x) - 1e-12) return false;
  }
  return true;
}

// ---------------------------------------------------------------- Coupling

std::string to_string(CouplingKind k) {
  switch (k) {
    case CouplingKind::Independent: return "independent";
    case CouplingKind::Quantile: return "quantile";
    case CouplingKind::Kernel: return "kernel";
  }
  return "?";
}

Coupling Coupling::independent(Distribution nu, Distribution nu_tilde) {
  nu.validate();
  nu_tilde.validate();
  Coupling c;
  c.kind_ = CouplingKind::Independent;
  c.nu_ = std::move(nu);
  c.nu_tilde_ = std::move(nu_tilde);
  c.martingale_ = false;
  return c;
}

Coupling Coupling::quantile(Distribution nu, Distribution nu_tilde) {
  nu.validate();
  nu_tilde.validate();
  Coupling c;
  c.kind_ = CouplingKind::Quantile;
  c.nu_ = std::move(nu);
  c.nu_tilde_ = std::move(nu_tilde);
  c.martingale_ = stochastically_below(c.nu_tilde_, c.nu_);
  return c;
}

Coupling Coupling::kernel(Distribution nu, std::vector<KernelShift> shifts, const std::optional<Distribution>& declared) {
  nu.validate();
  if (shifts.empty()) throw std::invalid_argument("kernel needs at least one shift");
  Rational total = 0, drift = 0;
  Rational lowest = shifts.front().delta;
  for (const auto& s : shifts) {
    if (s.prob <= 0) throw std::invalid_argument("kernel shift probabilities must be positive");
    total += s.prob;
    drift += s.prob * s.delta;
    lowest = std::min(lowest, s.delta);
  }
  if (total != Rational(1)) throw std::invalid_argument("kernel shift probabilities sum to " + to_string(total));
  Rational inf = nu.breakpoints().front();
  if (inf + lowest < 0) throw std::invalid_argument("kernel would produce negative weights");
  Coupling c;
  c.kind_ = CouplingKind::Kernel;
  for (const auto& s : shifts) c.nu_tilde_.merge(nu.shifted(s.delta, s.prob));
  c.nu_tilde_.validate();
  if (declared && !same_law(*declared, c.nu_tilde_)) {
    throw std::invalid_argument("kernel marginal " + c.nu_tilde_.literal() + " differs from declared " +
                                declared->literal());
  }
  c.nu_ = std::move(nu);
  c.shifts_ = std::move(shifts);
  c.martingale_ = drift <= 0;
  return c;
}

bool Coupling::pointwise_below() const {
  switch (kind_) {
    case CouplingKind::Quantile: return stochastically_below(nu_tilde_, nu_);
    case CouplingKind::Kernel:
      return std::all_of(shifts_.begin(), shifts_.end(), [](const KernelShift& s) { return s.delta <= 0; });
    case CouplingKind::Independent: return nu_tilde_.sup_support() <= nu_.inf_support();
  }
  return false;
}

std::pair<double, double> Coupling::draw(double u1, double u2) const {
  double w = nu_.quantile(u1);
  switch (kind_) {
    case CouplingKind::Independent: return {w, nu_tilde_.quantile(u2)};
    case CouplingKind::Quantile: return {w, nu_tilde_.quantile(u1)};
    case CouplingKind::Kernel: {
      double acc = 0;
      for (std::size_t j = 0; j + 1 < shifts_.size(); ++j) {
        acc += to_double(shifts_[j].prob);
        if (u2 < acc) return {w, w + to_double(shifts_[j].delta)};
      }
      return {w, w + to_double(shifts_.back().delta)};
    }
  }
  return {w, w};
}

std::string Coupling::describe() const {
  std::string out = to_string(kind_) + " nu=[" + nu_.literal() + "] nu_tilde=[" + nu_tilde_.literal() + "]";
  if (kind_ == CouplingKind::Kernel) {
    out += " shifts=";
    for (std::size_t i = 0; i < shifts_.size(); ++i) {
      if (i) out += ",";
      out += fmt_rational(shifts_[i].delta) + ":" + fmt_rational(shifts_[i].prob);
    }
  }
  return out;
}

}  // namespace fpplab
