#include "fpplab/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace fpplab {

void CompensatedSum::add(double x) {
  double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

Estimate estimate_mean(std::span<const double> xs) {
  Estimate e;
  e.n = xs.size();
  if (xs.empty()) return e;
  CompensatedSum s;
  for (double x : xs) s.add(x);
  e.mean = s.value() / static_cast<double>(e.n);
  if (e.n < 2) return e;
  CompensatedSum sq;
  for (double x : xs) sq.add((x - e.mean) * (x - e.mean));
  double var = sq.value() / static_cast<double>(e.n - 1);
  e.se = std::sqrt(var / static_cast<double>(e.n));
  return e;
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t n, double z) {
  if (n == 0) return {0, 1};
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double center = (p + z2 / (2 * nn)) / (1 + z2 / nn);
  const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / (1 + z2 / nn);
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

LinearFit weighted_linear_fit(std::span<const double> x, std::span<const double> y, std::span<const double> w) {
  if (x.size() != y.size() || x.size() != w.size() || x.size() < 2) {
    throw std::invalid_argument("weighted_linear_fit needs matching inputs with at least two points");
  }
  CompensatedSum sw, sx, sy, sxx, sxy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw.add(w[i]);
    sx.add(w[i] * x[i]);
    sy.add(w[i] * y[i]);
    sxx.add(w[i] * x[i] * x[i]);
    sxy.add(w[i] * x[i] * y[i]);
  }
  const double det = sw.value() * sxx.value() - sx.value() * sx.value();
  if (det <= 0) throw std::invalid_argument("degenerate design in weighted_linear_fit");
  LinearFit f;
  f.slope = (sw.value() * sxy.value() - sx.value() * sy.value()) / det;
  f.intercept = (sy.value() - f.slope * sx.value()) / sw.value();
  f.slope_se = std::sqrt(sw.value() / det);
  f.slope_ci = {f.slope - 1.959963984540054 * f.slope_se, f.slope + 1.959963984540054 * f.slope_se};
  return f;
}

}  // namespace fpplab
