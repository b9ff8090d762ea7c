#include "fpplab/groups.hpp"

#include <charconv>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace fpplab {

namespace {

std::vector<std::int64_t> parse_tuple(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (!text.empty() && text.front() == '(') {
    if (text.back() != ')') throw std::invalid_argument("unbalanced parentheses in '" + std::string(text) + "'");
    text = text.substr(1, text.size() - 2);
  }
  std::vector<std::int64_t> out;
  if (text.empty()) return out;
  std::size_t pos = 0;
  while (true) {
    auto comma = text.find(',', pos);
    auto field = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
    while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
      throw std::invalid_argument("malformed group element '" + std::string(text) + "'");
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

void require_size(const Element& g, std::size_t n, const char* who) {
  if (g.size() != n) throw std::invalid_argument(std::string(who) + ": element has wrong arity");
}

std::int64_t mod(std::int64_t a, std::int64_t m) {
  auto r = a % m;
  return r < 0 ? r + m : r;
}

}  // namespace

std::string GroupBackend::format(const Element& g) const {
  std::string out = "(";
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(g[i]);
  }
  return out + ")";
}

Element GroupBackend::parse(std::string_view text) const {
  auto g = parse_tuple(text);
  if (g.size() != identity().size()) throw std::invalid_argument("wrong arity for " + name() + " element");
  return canonical(g);
}

Element GroupBackend::power(const Element& g, std::int64_t n) const {
  Element base = n < 0 ? inverse(g) : g;
  std::uint64_t k = n < 0 ? static_cast<std::uint64_t>(-n) : static_cast<std::uint64_t>(n);
  Element acc = identity();
  while (k) {
    if (k & 1) acc = multiply(acc, base);
    k >>= 1;
    if (k) base = multiply(base, base);
  }
  return acc;
}

Element GroupBackend::conjugate(const Element& g, const Element& h) const {
  return multiply(multiply(inverse(h), g), h);
}

// ---------------------------------------------------------------- ℤ^d

IntegerLattice::IntegerLattice(int dimension) : d_(dimension) {
  if (dimension < 1) throw std::invalid_argument("lattice dimension must be >= 1");
}

std::string IntegerLattice::name() const { return "zd " + std::to_string(d_); }

Element IntegerLattice::multiply(const Element& g, const Element& h) const {
  require_size(g, static_cast<std::size_t>(d_), "zd");
  require_size(h, static_cast<std::size_t>(d_), "zd");
  Element out(g);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += h[i];
  return out;
}

Element IntegerLattice::inverse(const Element& g) const {
  Element out(g);
  for (auto& x : out) x = -x;
  return out;
}

Element IntegerLattice::unit(int axis, std::int64_t sign) const {
  Element e = identity();
  e[static_cast<std::size_t>(axis)] = sign;
  return e;
}

// ---------------------------------------------------------------- free group

FreeGroup::FreeGroup(int rank) : rank_(rank) {
  if (rank < 1 || rank > 26) throw std::invalid_argument("free group rank must be in 1..26");
}

std::string FreeGroup::name() const { return "free " + std::to_string(rank_); }

Element FreeGroup::canonical(const Element& g) const {
  Element out;
  out.reserve(g.size());
  for (auto x : g) {
    if (x == 0 || x > rank_ || x < -rank_) throw std::invalid_argument("free group letter out of range");
    if (!out.empty() && out.back() == -x) {
      out.pop_back();
    } else {
      out.push_back(x);
    }
  }
  return out;
}

Element FreeGroup::multiply(const Element& g, const Element& h) const {
  Element out(g);
  for (auto x : h) {
    if (!out.empty() && out.back() == -x) {
      out.pop_back();
    } else {
      out.push_back(x);
    }
  }
  return out;
}

Element FreeGroup::inverse(const Element& g) const {
  Element out(g.rbegin(), g.rend());
  for (auto& x : out) x = -x;
  return out;
}

std::string FreeGroup::format(const Element& g) const {
  if (g.empty()) return "1";
  std::string out;
  for (auto x : g) out += x > 0 ? static_cast<char>('a' + x - 1) : static_cast<char>('A' - x - 1);
  return out;
}

Element FreeGroup::parse(std::string_view text) const {
  Element word;
  for (char c : text) {
    if (c == ' ' || c == '1') continue;
    if (c >= 'a' && c < 'a' + rank_) {
      word.push_back(c - 'a' + 1);
    } else if (c >= 'A' && c < 'A' + rank_) {
      word.push_back(-(c - 'A' + 1));
    } else {
      throw std::invalid_argument("bad free group letter '" + std::string(1, c) + "'");
    }
  }
  return canonical(word);
}

// ---------------------------------------------------------------- dihedral

Element InfiniteDihedral::canonical(const Element& g) const {
  require_size(g, 2, "dihedral");
  return {g[0], mod(g[1], 2)};
}

Element InfiniteDihedral::multiply(const Element& g, const Element& h) const {
  require_size(g, 2, "dihedral");
  require_size(h, 2, "dihedral");
  return {g[0] + (g[1] ? -h[0] : h[0]), g[1] ^ h[1]};
}

Element InfiniteDihedral::inverse(const Element& g) const {
  require_size(g, 2, "dihedral");
  // (n,0)^-1 = (-n,0); reflections are involutions.
  return g[1] ? g : Element{-g[0], 0};
}

// ---------------------------------------------------------------- Heisenberg

Element Heisenberg::multiply(const Element& g, const Element& h) const {
  require_size(g, 3, "heisenberg");
  require_size(h, 3, "heisenberg");
  return {g[0] + h[0], g[1] + h[1], g[2] + h[2] + g[0] * h[1]};
}

Element Heisenberg::inverse(const Element& g) const {
  require_size(g, 3, "heisenberg");
  return {-g[0], -g[1], -g[2] + g[0] * g[1]};
}

// ---------------------------------------------------------------- finite

FiniteGroup::FiniteGroup(std::vector<std::vector<int>> table) : table_(std::move(table)) {
  const int n = static_cast<int>(table_.size());
  if (n == 0) throw std::invalid_argument("empty multiplication table");
  for (const auto& row : table_) {
    if (static_cast<int>(row.size()) != n) throw std::invalid_argument("multiplication table is not square");
    for (int x : row) {
      if (x < 0 || x >= n) throw std::invalid_argument("multiplication table entry out of range");
    }
  }
  for (int a = 0; a < n; ++a) {
    if (mul(0, a) != a || mul(a, 0) != a) throw std::invalid_argument("element 0 is not the identity");
  }
  inverse_.assign(static_cast<std::size_t>(n), -1);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (mul(a, b) == 0) {
        if (mul(b, a) != 0) throw std::invalid_argument("one-sided inverse in table");
        inverse_[static_cast<std::size_t>(a)] = b;
      }
    }
    if (inverse_[static_cast<std::size_t>(a)] < 0) throw std::invalid_argument("element without inverse");
  }
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        if (mul(mul(a, b), c) != mul(a, mul(b, c))) throw std::invalid_argument("table is not associative");
      }
    }
  }
}

FiniteGroup FiniteGroup::cyclic(int order) {
  if (order < 1) throw std::invalid_argument("cyclic order must be >= 1");
  std::vector<std::vector<int>> t(static_cast<std::size_t>(order), std::vector<int>(static_cast<std::size_t>(order)));
  for (int a = 0; a < order; ++a) {
    for (int b = 0; b < order; ++b) t[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = (a + b) % order;
  }
  return FiniteGroup(std::move(t));
}

std::string FiniteGroup::name() const { return "finite " + std::to_string(order()); }

Element FiniteGroup::canonical(const Element& g) const {
  require_size(g, 1, "finite");
  if (g[0] < 0 || g[0] >= order()) throw std::invalid_argument("finite group element out of range");
  return g;
}

Element FiniteGroup::multiply(const Element& g, const Element& h) const {
  return {mul(static_cast<int>(canonical(g)[0]), static_cast<int>(canonical(h)[0]))};
}

Element FiniteGroup::inverse(const Element& g) const { return {inv(static_cast<int>(canonical(g)[0]))}; }

bool FiniteGroup::is_automorphism(const std::vector<int>& perm) const {
  const int n = order();
  if (static_cast<int>(perm.size()) != n) return false;
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (int x : perm) {
    if (x < 0 || x >= n || seen[static_cast<std::size_t>(x)]) return false;
    seen[static_cast<std::size_t>(x)] = 1;
  }
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (perm[static_cast<std::size_t>(mul(a, b))] !=
          mul(perm[static_cast<std::size_t>(a)], perm[static_cast<std::size_t>(b)])) {
        return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------- F ⋊ ℤ^d

FiniteByLattice::FiniteByLattice(FiniteGroup fiber, int dimension, std::vector<int> automorphism)
    : fiber_(std::move(fiber)), d_(dimension), sigma_(std::move(automorphism)) {
  if (dimension < 1) throw std::invalid_argument("lattice dimension must be >= 1");
  if (sigma_.empty()) {
    sigma_.resize(static_cast<std::size_t>(fiber_.order()));
    std::iota(sigma_.begin(), sigma_.end(), 0);
  }
  if (!fiber_.is_automorphism(sigma_)) throw std::invalid_argument("action is not an automorphism of the fiber");
  // Order of σ, so that powers reduce modulo it.
  std::vector<int> cur(sigma_);
  auto is_identity = [&] {
    for (std::size_t i = 0; i < cur.size(); ++i) {
      if (cur[i] != static_cast<int>(i)) return false;
    }
    return true;
  };
  while (!is_identity()) {
    for (auto& c : cur) c = sigma_[static_cast<std::size_t>(c)];
    ++sigma_order_;
  }
}

std::string FiniteByLattice::name() const {
  return "finite-by-lattice " + std::to_string(fiber_.order()) + " " + std::to_string(d_);
}

Element FiniteByLattice::identity() const { return Element(static_cast<std::size_t>(d_) + 1, 0); }

int FiniteByLattice::act(int f, std::int64_t times) const {
  auto k = mod(times, sigma_order_);
  for (std::int64_t r = 0; r < k; ++r) f = sigma_[static_cast<std::size_t>(f)];
  return f;
}

Element FiniteByLattice::canonical(const Element& g) const {
  require_size(g, static_cast<std::size_t>(d_) + 1, "finite-by-lattice");
  if (g[0] < 0 || g[0] >= fiber_.order()) throw std::invalid_argument("fiber element out of range");
  return g;
}

Element FiniteByLattice::multiply(const Element& g, const Element& h) const {
  canonical(g);
  canonical(h);
  Element out(g);
  out[0] = fiber_.mul(static_cast<int>(g[0]), act(static_cast<int>(h[0]), g[1]));
  for (std::size_t i = 1; i < out.size(); ++i) out[i] += h[i];
  return out;
}

Element FiniteByLattice::inverse(const Element& g) const {
  canonical(g);
  // (f,z)^-1 = (σ^{-z_1}(f^-1), -z).
  Element out(g);
  out[0] = act(fiber_.inv(static_cast<int>(g[0])), -g[1]);
  for (std::size_t i = 1; i < out.size(); ++i) out[i] = -out[i];
  return out;
}

std::vector<Element> FiniteByLattice::fiber_elements() const {
  std::vector<Element> out;
  for (int f = 0; f < fiber_.order(); ++f) {
    Element e = identity();
    e[0] = f;
    out.push_back(e);
  }
  return out;
}

// ---------------------------------------------------------------- products

DirectProduct::DirectProduct(std::shared_ptr<const GroupBackend> left, std::shared_ptr<const GroupBackend> right)
    : left_(std::move(left)), right_(std::move(right)) {}

std::string DirectProduct::name() const { return "product(" + left_->name() + " x " + right_->name() + ")"; }

Element DirectProduct::pair(const Element& g, const Element& h) const {
  Element out;
  out.reserve(g.size() + h.size() + 1);
  out.push_back(static_cast<std::int64_t>(g.size()));
  out.insert(out.end(), g.begin(), g.end());
  out.insert(out.end(), h.begin(), h.end());
  return out;
}

std::pair<Element, Element> DirectProduct::split(const Element& g) const {
  if (g.empty() || g[0] < 0 || static_cast<std::size_t>(g[0]) + 1 > g.size()) {
    throw std::invalid_argument("malformed product element");
  }
  auto mid = g.begin() + 1 + g[0];
  return {Element(g.begin() + 1, mid), Element(mid, g.end())};
}

Element DirectProduct::identity() const { return pair(left_->identity(), right_->identity()); }

Element DirectProduct::multiply(const Element& g, const Element& h) const {
  auto [g1, g2] = split(g);
  auto [h1, h2] = split(h);
  return pair(left_->multiply(g1, h1), right_->multiply(g2, h2));
}

Element DirectProduct::inverse(const Element& g) const {
  auto [g1, g2] = split(g);
  return pair(left_->inverse(g1), right_->inverse(g2));
}

Element DirectProduct::canonical(const Element& g) const {
  auto [g1, g2] = split(g);
  return pair(left_->canonical(g1), right_->canonical(g2));
}

std::string DirectProduct::format(const Element& g) const {
  auto [g1, g2] = split(g);
  return "<" + left_->format(g1) + "|" + right_->format(g2) + ">";
}

Element DirectProduct::parse(std::string_view text) const {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.size() < 2 || text.front() != '<' || text.back() != '>') {
    throw std::invalid_argument("product element must look like <g|h>");
  }
  text = text.substr(1, text.size() - 2);
  auto bar = text.find('|');
  if (bar == std::string_view::npos) throw std::invalid_argument("product element must look like <g|h>");
  return pair(left_->parse(text.substr(0, bar)), right_->parse(text.substr(bar + 1)));
}

// ---------------------------------------------------------------- factory

std::shared_ptr<const GroupBackend> make_backend(std::string_view description) {
  std::istringstream in{std::string(description)};
  std::string kind;
  in >> kind;
  auto need_int = [&](const char* what) {
    long long v = 0;
    if (!(in >> v)) throw std::invalid_argument(std::string("group '") + kind + "' needs " + what);
    return static_cast<int>(v);
  };
  if (kind == "zd") return std::make_shared<IntegerLattice>(need_int("a dimension"));
  if (kind == "free") return std::make_shared<FreeGroup>(need_int("a rank"));
  if (kind == "dihedral") return std::make_shared<InfiniteDihedral>();
  if (kind == "heisenberg") return std::make_shared<Heisenberg>();
  if (kind == "cyclic") {
    int n = need_int("an order");
    return std::make_shared<FiniteGroup>(FiniteGroup::cyclic(n));
  }
  if (kind == "finite-by-lattice") {
    int n = need_int("a fiber order");
    int d = need_int("a dimension");
    std::vector<int> perm;
    std::string spec;
    if (in >> spec) {
      for (auto v : parse_tuple(spec)) perm.push_back(static_cast<int>(v));
    }
    return std::make_shared<FiniteByLattice>(FiniteGroup::cyclic(n), d, perm);
  }
  throw std::invalid_argument("unknown group backend '" + kind + "'");
}

}  // namespace fpplab
