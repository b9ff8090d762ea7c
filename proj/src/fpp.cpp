#include "fpplab/fpp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "fpplab/rng.hpp"

namespace fpplab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

bool allowed(const EdgeMask* mask, EdgeId e) {
  return mask == nullptr || mask->empty() || (*mask)[static_cast<std::size_t>(e)];
}
}  // namespace

// ---------------------------------------------------------------- weights

WeightConfig sample_weights(const Graph& g, const Coupling& coupling, std::uint64_t seed, std::uint64_t replicate) {
  WeightConfig out;
  const auto m = static_cast<std::size_t>(g.edge_count());
  out.w.assign(m, 0.0);
  out.w_tilde.assign(m, 0.0);
  std::vector<EdgeId> all(m);
  for (std::size_t e = 0; e < m; ++e) all[e] = static_cast<EdgeId>(e);
  sample_weights_into(out, all, coupling, seed, replicate);
  return out;
}

void sample_weights_into(WeightConfig& out, std::span<const EdgeId> edges, const Coupling& coupling,
                         std::uint64_t seed, std::uint64_t replicate) {
  for (EdgeId e : edges) {
    const auto idx = static_cast<std::uint64_t>(e);
    double u1 = counter_uniform(seed, replicate, idx, kStreamWeight);
    double u2 = counter_uniform(seed, replicate, idx, kStreamKernel);
    auto [w, wt] = coupling.draw(u1, u2);
    out.w[static_cast<std::size_t>(e)] = w;
    out.w_tilde[static_cast<std::size_t>(e)] = wt;
  }
}

// ---------------------------------------------------------------- Dijkstra

void DijkstraWorkspace::prepare(std::size_t vertices) {
  if (stamp_.size() != vertices) {
    dist_.assign(vertices, kInf);
    pred_.assign(vertices, -1);
    stamp_.assign(vertices, 0);
    done_.assign(vertices, 0);
    epoch_ = 0;
  }
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 1;
  }
}

GeodesicResult passage_time_geodesic(const Graph& g, std::span<const double> weights, VertexId x, VertexId y,
                                     const EdgeMask* mask, DijkstraWorkspace* ws) {
  if (weights.size() != static_cast<std::size_t>(g.edge_count())) {
    throw std::invalid_argument("weight vector does not match the edge count");
  }
  return passage_time_geodesic(g, [&](EdgeId e) { return weights[static_cast<std::size_t>(e)]; }, x, y, mask, ws);
}

GeodesicResult passage_time_geodesic(const Graph& g, const std::function<double(EdgeId)>& weight, VertexId x,
                                     VertexId y, const EdgeMask* mask, DijkstraWorkspace* ws) {
  if (!g.valid_vertex(x) || !g.valid_vertex(y)) throw std::invalid_argument("vertex out of range");
  DijkstraWorkspace local;
  DijkstraWorkspace& W = ws ? *ws : local;
  W.prepare(static_cast<std::size_t>(g.vertex_count()));
  auto touch = [&](VertexId v) {
    auto i = static_cast<std::size_t>(v);
    if (W.stamp_[i] != W.epoch_) {
      W.stamp_[i] = W.epoch_;
      W.dist_[i] = kInf;
      W.pred_[i] = -1;
      W.done_[i] = 0;
    }
    return i;
  };
  GeodesicResult res;
  using Item = std::pair<double, VertexId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  W.dist_[touch(x)] = 0;
  pq.emplace(0.0, x);
  while (!pq.empty()) {
    auto [d, v] = pq.top();
    pq.pop();
    auto vi = touch(v);
    if (W.done_[vi] || d > W.dist_[vi]) continue;
    W.done_[vi] = 1;
    if (v == y) break;
    for (EdgeId e : g.incident(v)) {
      if (!allowed(mask, e)) continue;
      VertexId u = g.opposite(e, v);
      auto ui = touch(u);
      if (W.done_[ui]) continue;
      double nd = d + weight(e);
      if (nd < W.dist_[ui]) {
        W.dist_[ui] = nd;
        W.pred_[ui] = e;
        pq.emplace(nd, u);
      } else if (nd == W.dist_[ui] && e != W.pred_[ui]) {
        res.tie_broken = true;
        if (e < W.pred_[ui]) W.pred_[ui] = e;
      }
    }
  }
  auto yi = touch(y);
  if (!W.done_[yi]) throw std::invalid_argument("target unreachable in passage_time_geodesic");
  std::vector<EdgeId> rev;
  for (VertexId v = y; v != x;) {
    EdgeId e = W.pred_[static_cast<std::size_t>(v)];
    rev.push_back(e);
    v = g.opposite(e, v);
  }
  std::reverse(rev.begin(), rev.end());
  res.path = Path::from_edges(g, x, std::move(rev));
  res.time = W.dist_[yi];
  for (VertexId v : res.path.vertices()) res.touched_frontier = res.touched_frontier || g.is_frontier(v);
  return res;
}

double brute_force_passage_time(const Graph& g, std::span<const double> weights, VertexId x, VertexId y) {
  double best = kInf;
  enumerate_self_avoiding_paths(g, x, y, {.max_len = g.vertex_count()}, [&](const Path& p) {
    double t = 0;
    for (EdgeId e : p.edges()) t += weights[static_cast<std::size_t>(e)];
    best = std::min(best, t);
    return true;
  });
  return best;
}

// ---------------------------------------------------------------- variability

VariabilityCheck is_more_variable(const Distribution& nu_tilde, const Distribution& nu, std::span<const double> t_grid) {
  VariabilityCheck c;
  c.mean_tilde = nu_tilde.mean();
  c.mean = nu.mean();
  constexpr double tol = 1e-12;
  c.grid.assign(t_grid.begin(), t_grid.end());
  for (const auto* d : {&nu_tilde, &nu}) {
    for (const auto& b : d->breakpoints()) c.grid.push_back(to_double(b));
  }
  std::sort(c.grid.begin(), c.grid.end());
  c.grid.erase(std::unique(c.grid.begin(), c.grid.end()), c.grid.end());
  c.holds = c.mean_tilde <= c.mean + tol;
  for (double t : c.grid) {
    if (nu_tilde.expected_min(t) > nu.expected_min(t) + tol) {
      c.holds = false;
      c.witness = t;
      break;
    }
  }
  return c;
}

// ---------------------------------------------------------------- technical constants

TechnicalConstants derive_technical_constants(const Coupling& coupling, int k_max, std::uint64_t seed) {
  if (coupling.kind() != CouplingKind::Kernel) {
    if (coupling.pointwise_below()) {
      throw ConstantsUnavailable("P(w~ > w) = 0 for this coupling; the modified weights needed in that case are not constructed");
    }
    throw ConstantsUnavailable("constants need the conditional law of w~ given w, i.e. a kernel coupling");
  }
  Rational top = coupling.shifts().front().delta;
  for (const auto& s : coupling.shifts()) top = std::max(top, s.delta);
  if (top <= 0) {
    throw ConstantsUnavailable("P(w~ > w) = 0 for this coupling; the modified weights needed in that case are not constructed");
  }
  TechnicalConstants t;
  t.k_max = k_max;
  t.a = top * Rational(4, 5);
  t.b = 0;
  for (const auto& s : coupling.shifts()) {
    if (s.delta > t.a) t.b += s.prob;
  }
  const auto& nu = coupling.nu();
  if (!nu.uniforms().empty()) {
    t.y0 = (nu.uniforms().front().lo + nu.uniforms().front().hi) / 2;
  } else if (!nu.atoms().empty()) {
    t.y0 = nu.atoms().front().value;
  } else {
    t.y0 = nu.exps().front().shift + 1;
  }
  t.epsilon = t.y0 > 0 ? t.a / (2 * t.y0) : Rational(1);
  t.delta0 = (t.a - t.epsilon * t.y0) / (2 * (2 + t.epsilon));
  const Rational used = t.epsilon * t.y0 + 2 * t.delta0 + t.epsilon * t.delta0;
  t.g = (t.a - used) / 2;
  const Rational lo = t.y0 - t.delta0 / 2, hi = t.y0 + t.delta0 / 2;
  t.I0 = BorelSet::interval(to_double(lo), to_double(hi));

  // Bullet 1: positive mass near y₀ at every scale examined.
  t.bullet1 = true;
  for (int j = 1; j <= 30; ++j) {
    double d = to_double(t.delta0) / std::pow(2.0, j);
    double y0 = to_double(t.y0);
    if (!(nu.mass_of(t.I0.intersect_interval(y0 - d, y0 + d)) > 0)) t.bullet1 = false;
  }
  // Bullet 2: the kernel does not depend on y, so the bound is the same on I₀.
  Rational p = 0;
  for (const auto& s : coupling.shifts()) {
    if (s.delta > t.a) p += s.prob;
  }
  t.bullet2 = t.b > 0 && p >= t.b;
  // Bullet 3: worst case exactly, then random points of I₀.
  t.bullet3 = t.g > 0;
  std::uint64_t counter = 0;
  for (int k = 1; k <= k_max; ++k) {
    const auto kk = static_cast<std::int64_t>(k);
    const std::int64_t kp = floor_of((1 + t.epsilon) * kk);
    if (!(kk * (lo + t.a) - kp * hi > kk * t.g)) t.bullet3 = false;
    for (int trial = 0; trial < 200; ++trial) {
      double sum = 0;
      for (int i = 0; i < k; ++i) {
        sum += to_double(lo) + to_double(t.delta0) * counter_uniform(seed, 0, counter++, 7) + to_double(t.a);
      }
      for (std::int64_t i = 0; i < kp; ++i) {
        sum -= to_double(lo) + to_double(t.delta0) * counter_uniform(seed, 0, counter++, 7);
      }
      if (!(sum > k * to_double(t.g))) t.bullet3 = false;
    }
  }
  return t;
}

// ---------------------------------------------------------------- feasible pairs

namespace {

bool symmetric_difference_in(const Path& alpha, const Path& gamma, std::span<const double> w, const BorelSet& I0) {
  auto a = alpha.edge_set();
  auto c = gamma.edge_set();
  std::vector<EdgeId> diff;
  std::set_symmetric_difference(a.begin(), a.end(), c.begin(), c.end(), std::back_inserter(diff));
  return std::all_of(diff.begin(), diff.end(), [&](EdgeId e) { return I0.contains(w[static_cast<std::size_t>(e)]); });
}

int gamma_cap(const FeasibleParams& p) { return static_cast<int>(floor_of(Rational(p.C) * (1 + p.epsilon))); }

}  // namespace

bool is_feasible_pair(const Path& geodesic, const FeasiblePair& fp, std::span<const double> w,
                      const FeasibleParams& params) {
  if (fp.alpha_length == 0 || fp.alpha_first + fp.alpha_length > geodesic.length()) return false;
  if (!(geodesic.subpath(fp.alpha_first, fp.alpha_length) == fp.alpha)) return false;
  if (static_cast<int>(fp.alpha.length()) > params.C) return false;
  if (!fp.alpha.self_avoiding() || !fp.gamma.self_avoiding()) return false;
  if (static_cast<int>(fp.gamma.length()) > gamma_cap(params)) return false;
  if (!is_epsilon_detour(fp.alpha, fp.gamma, params.epsilon)) return false;
  return symmetric_difference_in(fp.alpha, fp.gamma, w, params.I0);
}

std::vector<RegionScan> scan_feasible_pairs(const Graph& g, std::span<const double> w, const GeodesicResult& geo,
                                            std::span<const EdgeMask> regions, const FeasibleParams& params) {
  std::vector<RegionScan> out(regions.size());
  const auto& pi = geo.path;
  const int cap = gamma_cap(params);
  auto edges = pi.edges();
  for (std::size_t r = 0; r < regions.size(); ++r) {
    const EdgeMask& mask = regions[r];
    if (params.I0.empty()) continue;
    try {
      for (std::size_t i = 0; i < edges.size() && !out[r].pair; ++i) {
        for (std::size_t len = 1; static_cast<int>(len) <= params.C && i + len <= edges.size(); ++len) {
          if (!allowed(&mask, edges[i + len - 1])) break;
          Path alpha = pi.subpath(i, len);
          const auto alen = static_cast<std::int64_t>(len);
          int max_len = std::min<int>(cap, static_cast<int>(alen + floor_of(params.epsilon * alen)));
          std::optional<Path> found;
          enumerate_self_avoiding_paths(g, alpha.start(), alpha.end(), {max_len, params.budget, &mask},
                                        [&](const Path& gamma) {
                                          if (!is_epsilon_detour(alpha, gamma, params.epsilon)) return true;
                                          if (!symmetric_difference_in(alpha, gamma, w, params.I0)) return true;
                                          found = gamma;
                                          return false;
                                        });
          if (found) {
            out[r].pair = FeasiblePair{i, len, alpha, *found, r};
            break;
          }
        }
      }
    } catch (const BudgetExceeded&) {
      out[r].budget_hit = true;
    }
  }
  return out;
}

EdgeMeasure empirical_edge_measure(const GeodesicResult& geo, std::span<const double> w, const BorelSet& A,
                                   int graph_distance) {
  if (graph_distance <= 0) throw std::invalid_argument("graph distance must be positive");
  EdgeMeasure m;
  for (EdgeId e : geo.path.edges()) {
    if (A.contains(w[static_cast<std::size_t>(e)])) ++m.count;
  }
  m.fraction = static_cast<double>(m.count) / graph_distance;
  return m;
}

// ---------------------------------------------------------------- resampling

Rational resamplable_mass(const Distribution& nu, const Rational& delta, const Rational& eta) {
  if (delta <= 0 || eta < 0) throw std::invalid_argument("resamplable_mass needs delta > 0 and eta >= 0");
  if (nu.has_exp()) throw std::invalid_argument("resamplable_mass is exact only for atom/uniform mixtures");
  auto F = [&](const Rational& x) { return *nu.cdf_left_exact(x); };
  auto h = [&](const Rational& p) { return F(p + delta) - F(p); };
  auto continuous_mass = [&](const Rational& a, const Rational& b) {
    Rational m = 0;
    for (const auto& u : nu.uniforms()) {
      Rational lo = std::max(a, u.lo), hi = std::min(b, u.hi);
      if (lo < hi) m += u.mass * (hi - lo) / (u.hi - u.lo);
    }
    return m;
  };
  std::vector<Rational> crit;
  for (const auto& b : nu.breakpoints()) {
    crit.push_back(b);
    crit.push_back(b - delta);
  }
  std::sort(crit.begin(), crit.end());
  crit.erase(std::unique(crit.begin(), crit.end()), crit.end());

  Rational total = 0;
  for (const auto& c : crit) {
    if (h(c) < eta) continue;
    for (const auto& a : nu.atoms()) {
      if (a.value == c) total += a.mass;
    }
  }
  for (std::size_t j = 0; j + 1 < crit.size(); ++j) {
    const Rational c0 = crit[j], c1 = crit[j + 1];
    const Rational p1 = c0 + (c1 - c0) / 3, p2 = c0 + 2 * (c1 - c0) / 3;
    const Rational h1 = h(p1), s = (h(p2) - h1) / (p2 - p1);
    Rational lo = c0, hi = c1;
    if (s == Rational(0)) {
      if (h1 < eta) continue;
    } else {
      Rational root = p1 + (eta - h1) / s;
      if (s > 0) {
        lo = std::max(lo, root);
      } else {
        hi = std::min(hi, root);
      }
      if (!(lo < hi)) continue;
    }
    total += continuous_mass(lo, hi);
  }
  return total;
}

std::vector<int> disjointify(std::span<const std::vector<EdgeId>> regions) {
  std::unordered_map<EdgeId, std::vector<int>> owners;
  for (std::size_t r = 0; r < regions.size(); ++r) {
    for (EdgeId e : regions[r]) owners[e].push_back(static_cast<int>(r));
  }
  std::vector<std::set<int>> adj(regions.size());
  for (const auto& [e, rs] : owners) {
    for (int a : rs) {
      for (int b : rs) {
        if (a != b) adj[static_cast<std::size_t>(a)].insert(b);
      }
    }
  }
  std::vector<int> color(regions.size(), -1);
  for (std::size_t r = 0; r < regions.size(); ++r) {
    std::set<int> used;
    for (int n : adj[r]) {
      if (color[static_cast<std::size_t>(n)] >= 0) used.insert(color[static_cast<std::size_t>(n)]);
    }
    int c = 0;
    while (used.count(c)) ++c;
    color[r] = c;
  }
  return color;
}

}  // namespace fpplab
