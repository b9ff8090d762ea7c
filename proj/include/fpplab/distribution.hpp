#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fpplab/rational.hpp"

namespace fpplab {

/// Finite union of half-open intervals [a, b) plus isolated points, kept in
/// normalized form (sorted, disjoint, points outside the intervals).
class BorelSet {
 public:
  BorelSet() = default;
  static BorelSet interval(double a, double b);
  static BorelSet point(double p);
  static BorelSet everything();
  /// "[0.4,0.6) {1} [2,inf)"; whitespace separated pieces.
  static BorelSet parse(std::string_view text);

  BorelSet unite(const BorelSet& other) const;
  BorelSet intersect_interval(double a, double b) const;
  bool contains(double x) const;
  bool empty() const { return intervals_.empty() && points_.empty(); }
  const std::vector<std::pair<double, double>>& intervals() const { return intervals_; }
  const std::vector<double>& points() const { return points_; }
  std::string to_string() const;

 private:
  void normalize();
  std::vector<std::pair<double, double>> intervals_;
  std::vector<double> points_;
};

struct AtomPiece {
  Rational value;
  Rational mass;
};
struct UniformPiece {
  Rational lo, hi;
  Rational mass;
};
/// shift + Exp(rate), carrying `mass`.
struct ExpPiece {
  Rational rate, shift;
  Rational mass;
};

/// Mixture of atoms, uniform intervals and at most one shifted exponential on
/// [0, ∞). Masses are exact and sum to 1.
class Distribution {
 public:
  Distribution() = default;
  static Distribution atom(Rational v);
  static Distribution uniform(Rational lo, Rational hi);
  static Distribution exponential(Rational rate, Rational shift = 0);
  /// Pieces "atom v m", "unif lo hi m", "exp rate shift m" separated by ';' or newlines.
  static Distribution parse(std::string_view text);

  /// Unvalidated construction; call validate() when done.
  void add(const AtomPiece& a) { atoms_.push_back(a); }
  void add(const UniformPiece& u) { uniforms_.push_back(u); }
  void add(const ExpPiece& e) { exps_.push_back(e); }
  /// Throws std::invalid_argument unless masses are positive and sum to 1,
  /// support lies in [0, ∞) and there is at most one exponential piece.
  void validate() const;

  const std::vector<AtomPiece>& atoms() const { return atoms_; }
  const std::vector<UniformPiece>& uniforms() const { return uniforms_; }
  const std::vector<ExpPiece>& exps() const { return exps_; }
  bool has_exp() const { return !exps_.empty(); }
  std::string literal() const;

  double mean() const;
  std::optional<Rational> exact_mean() const;
  double inf_support() const;
  /// +inf with an exponential piece.
  double sup_support() const;

  double cdf(double x) const;       // P(X <= x)
  double cdf_left(double x) const;  // P(X < x)
  /// Exact values; empty when an exponential piece is present.
  std::optional<Rational> cdf_exact(const Rational& x) const;
  std::optional<Rational> cdf_left_exact(const Rational& x) const;
  /// inf { x : F(x) >= u } for u in (0, 1).
  double quantile(double u) const;
  /// E min(X, t).
  double expected_min(double t) const;
  /// P(a <= X < b).
  double interval_mass(double a, double b) const;
  double mass_of(const BorelSet& A) const;

  /// Sorted distinct points where the law has an atom or its density changes.
  std::vector<Rational> breakpoints() const;
  /// Law of X + delta with all masses scaled by `scale`; not normalized.
  Distribution shifted(const Rational& delta, const Rational& scale) const;
  /// Concatenation of pieces; caller is responsible for total mass.
  Distribution& merge(const Distribution& other);

 private:
  std::vector<AtomPiece> atoms_;
  std::vector<UniformPiece> uniforms_;
  std::vector<ExpPiece> exps_;
};

/// Equality of laws: exact CDF comparison at breakpoints for atom/uniform
/// mixtures, a dense numeric comparison otherwise.
bool same_law(const Distribution& a, const Distribution& b);

/// CDF of `lower` >= CDF of `upper` everywhere, i.e. `upper` stochastically dominates `lower`.
bool stochastically_below(const Distribution& lower, const Distribution& upper);

enum class CouplingKind { Independent, Quantile, Kernel };
std::string to_string(CouplingKind k);

/// One branch of a kernel: w̃ = w + delta with probability prob.
struct KernelShift {
  Rational delta;
  Rational prob;
};

/// Joint law of (w, w̃) on one edge, driven by two uniforms.
///  INDEPENDENT: w = F⁻¹(u₁), w̃ = F̃⁻¹(u₂).
///  QUANTILE:    w = F⁻¹(u₁), w̃ = F̃⁻¹(u₁).
///  KERNEL:      w = F⁻¹(u₁), w̃ = w + δ_j with j chosen by u₂.
class Coupling {
 public:
  static Coupling independent(Distribution nu, Distribution nu_tilde);
  static Coupling quantile(Distribution nu, Distribution nu_tilde);
  /// The w̃ marginal is derived from the shifts. When `declared` is given it
  /// must equal the derived marginal. Throws std::invalid_argument otherwise,
  /// or when w̃ could go negative.
  static Coupling kernel(Distribution nu, std::vector<KernelShift> shifts,
                         const std::optional<Distribution>& declared = std::nullopt);

  CouplingKind kind() const { return kind_; }
  const Distribution& nu() const { return nu_; }
  const Distribution& nu_tilde() const { return nu_tilde_; }
  const std::vector<KernelShift>& shifts() const { return shifts_; }
  /// Σ p δ <= 0 for kernels, checked exactly; i.e. E[w̃ | w] <= w.
  bool certifies_martingale() const { return martingale_; }
  /// w̃ <= w almost surely.
  bool pointwise_below() const;

  /// (w, w̃).
  std::pair<double, double> draw(double u1, double u2) const;
  std::string describe() const;

 private:
  CouplingKind kind_ = CouplingKind::Independent;
  Distribution nu_, nu_tilde_;
  std::vector<KernelShift> shifts_;
  bool martingale_ = false;
};

}  // namespace fpplab
