#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <boost/container_hash/hash.hpp>

namespace fpplab {

/// Group element in a backend-specific canonical encoding.
using Element = std::vector<std::int64_t>;

struct ElementHash {
  std::size_t operator()(const Element& e) const { return boost::hash_range(e.begin(), e.end()); }
};

/// Canonical-form group arithmetic. Backends keep every returned element in
/// canonical form, so plain vector equality is group equality.
class GroupBackend {
 public:
  virtual ~GroupBackend() = default;

  virtual std::string name() const = 0;
  virtual Element identity() const = 0;
  virtual Element multiply(const Element& g, const Element& h) const = 0;
  virtual Element inverse(const Element& g) const = 0;
  /// Brings an arbitrary encoding into canonical form. Idempotent.
  virtual Element canonical(const Element& g) const { return g; }
  virtual std::string format(const Element& g) const;
  /// Throws std::invalid_argument on malformed text.
  virtual Element parse(std::string_view text) const;

  bool equal(const Element& g, const Element& h) const { return canonical(g) == canonical(h); }
  bool is_identity(const Element& g) const { return canonical(g) == identity(); }
  Element power(const Element& g, std::int64_t n) const;
  /// h^{-1} g h.
  Element conjugate(const Element& g, const Element& h) const;
};

/// ℤ^d with coordinatewise addition.
class IntegerLattice final : public GroupBackend {
 public:
  explicit IntegerLattice(int dimension);
  std::string name() const override;
  Element identity() const override { return Element(static_cast<std::size_t>(d_), 0); }
  Element multiply(const Element& g, const Element& h) const override;
  Element inverse(const Element& g) const override;
  Element unit(int axis, std::int64_t sign = 1) const;

 private:
  int d_;
};

/// Free group on k letters. Elements are reduced words; letter i+1 is the
/// i-th generator and -(i+1) its inverse. Printed as a, b, ... with
/// upper case for inverses, "1" for the empty word.
class FreeGroup final : public GroupBackend {
 public:
  explicit FreeGroup(int rank);
  std::string name() const override;
  Element identity() const override { return {}; }
  Element multiply(const Element& g, const Element& h) const override;
  Element inverse(const Element& g) const override;
  Element canonical(const Element& g) const override;
  std::string format(const Element& g) const override;
  Element parse(std::string_view text) const override;
  int rank() const { return rank_; }

 private:
  int rank_;
};

/// ℤ/2 ∗ ℤ/2 as (n, flip) with (n,f)(m,g) = (n + (-1)^f m, f xor g).
class InfiniteDihedral final : public GroupBackend {
 public:
  std::string name() const override { return "dihedral"; }
  Element identity() const override { return {0, 0}; }
  Element multiply(const Element& g, const Element& h) const override;
  Element inverse(const Element& g) const override;
  Element canonical(const Element& g) const override;
};

/// Discrete Heisenberg group: (a,b,c) is the unipotent matrix [[1,a,c],[0,1,b],[0,0,1]].
class Heisenberg final : public GroupBackend {
 public:
  std::string name() const override { return "heisenberg"; }
  Element identity() const override { return {0, 0, 0}; }
  Element multiply(const Element& g, const Element& h) const override;
  Element inverse(const Element& g) const override;
};

/// Finite group given by a multiplication table over {0..n-1}; 0 is the identity.
class FiniteGroup final : public GroupBackend {
 public:
  /// Validates closure, identity, inverses and associativity.
  explicit FiniteGroup(std::vector<std::vector<int>> table);
  static FiniteGroup cyclic(int order);

  std::string name() const override;
  Element identity() const override { return {0}; }
  Element multiply(const Element& g, const Element& h) const override;
  Element inverse(const Element& g) const override;
  Element canonical(const Element& g) const override;
  int order() const { return static_cast<int>(table_.size()); }
  int mul(int a, int b) const { return table_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]; }
  int inv(int a) const { return inverse_[static_cast<std::size_t>(a)]; }
  /// True iff the permutation respects the table.
  bool is_automorphism(const std::vector<int>& perm) const;

 private:
  std::vector<std::vector<int>> table_;
  std::vector<int> inverse_;
};

/// F ⋊_σ ℤ^d, where the first ℤ coordinate acts on F by a fixed automorphism σ
/// (given as a permutation of F) and the remaining coordinates act trivially.
/// Elements are (f, z_1, ..., z_d); (f,z)(f',z') = (f σ^{z_1}(f'), z + z').
/// With σ the identity this is the direct product F × ℤ^d.
class FiniteByLattice final : public GroupBackend {
 public:
  FiniteByLattice(FiniteGroup fiber, int dimension, std::vector<int> automorphism = {});

  std::string name() const override;
  Element identity() const override;
  Element multiply(const Element& g, const Element& h) const override;
  Element inverse(const Element& g) const override;
  Element canonical(const Element& g) const override;

  const FiniteGroup& fiber() const { return fiber_; }
  /// The normal subgroup F × {0}.
  std::vector<Element> fiber_elements() const;

 private:
  int act(int f, std::int64_t times) const;

  FiniteGroup fiber_;
  int d_;
  std::vector<int> sigma_;
  std::int64_t sigma_order_ = 1;
};

/// G × H for arbitrary backends. Encoding: [size of G part, G part..., H part...].
class DirectProduct final : public GroupBackend {
 public:
  DirectProduct(std::shared_ptr<const GroupBackend> left, std::shared_ptr<const GroupBackend> right);

  std::string name() const override;
  Element identity() const override;
  Element multiply(const Element& g, const Element& h) const override;
  Element inverse(const Element& g) const override;
  Element canonical(const Element& g) const override;
  std::string format(const Element& g) const override;
  Element parse(std::string_view text) const override;

  Element pair(const Element& g, const Element& h) const;
  std::pair<Element, Element> split(const Element& g) const;

 private:
  std::shared_ptr<const GroupBackend> left_;
  std::shared_ptr<const GroupBackend> right_;
};

/// Builds a backend from a config description such as "zd 2", "free 2",
/// "dihedral", "heisenberg", "cyclic 5", "finite-by-lattice 3 1 0,2,1".
std::shared_ptr<const GroupBackend> make_backend(std::string_view description);

}  // namespace fpplab
