#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

namespace fpplab {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0, comp_ = 0;
};

struct Estimate {
  double mean = 0;
  double se = 0;  // standard error of the mean
  std::size_t n = 0;
};

/// Sample mean and standard error; values are consumed in the given order.
Estimate estimate_mean(std::span<const double> xs);

struct Interval {
  double lo = 0, hi = 0;
};

/// Wilson score interval for a binomial proportion at confidence z.
Interval wilson_interval(std::uint64_t successes, std::uint64_t n, double z = 1.959963984540054);

struct LinearFit {
  double slope = 0, intercept = 0;
  double slope_se = 0;
  Interval slope_ci;  // 95%
};

/// Weighted least squares y ≈ intercept + slope·x. Weights are inverse
/// variances; the slope SE comes from them directly.
LinearFit weighted_linear_fit(std::span<const double> x, std::span<const double> y, std::span<const double> w);

}  // namespace fpplab
