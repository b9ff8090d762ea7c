#include "fpplab/detours.hpp"

#include <algorithm>
#include <map>

namespace fpplab {

bool is_epsilon_detour(const Path& pi, const Path& detour, const Rational& epsilon) {
  if (epsilon < 0) return false;
  if (pi.start() != detour.start() || pi.end() != detour.end()) return false;
  if (pi.edge_set() == detour.edge_set()) return false;
  auto s = path_set_difference_sizes(pi, detour);
  // ε = p/q: |π'\π| q <= (p+q) |π\π'|.
  const auto p = epsilon.numerator();
  const auto q = epsilon.denominator();
  return static_cast<std::int64_t>(s.only_second) * q <= (p + q) * static_cast<std::int64_t>(s.only_first);
}

std::optional<Rational> tight_epsilon(const Path& pi, const Path& detour) {
  auto s = path_set_difference_sizes(pi, detour);
  if (s.only_first == 0) return std::nullopt;
  Rational r(static_cast<std::int64_t>(s.only_second), static_cast<std::int64_t>(s.only_first));
  r -= 1;
  return r < 0 ? Rational(0) : r;
}

DetourVerdict find_epsilon_detour(const Graph& g, const Path& pi, const Rational& epsilon, std::uint64_t budget,
                                  const EdgeMask* mask) {
  if (epsilon < 0) throw std::invalid_argument("epsilon must be non-negative");
  if (!pi.self_avoiding()) throw std::invalid_argument("find_epsilon_detour needs a self-avoiding path");
  DetourVerdict verdict;
  verdict.epsilon = epsilon;
  const auto len = static_cast<std::int64_t>(pi.length());
  const int max_len = static_cast<int>(len + floor_of(epsilon * Rational(len)));
  try {
    auto stats = enumerate_self_avoiding_paths(g, pi.start(), pi.end(), {max_len, budget, mask},
                                               [&](const Path& cand) {
                                                 if (!is_epsilon_detour(pi, cand, epsilon)) return true;
                                                 verdict.detour = cand;
                                                 return false;
                                               });
    verdict.expansions = stats.expansions;
  } catch (const BudgetExceeded& e) {
    verdict.exhaustive = false;
    verdict.expansions = e.expansions();
  }
  return verdict;
}

std::string to_string(CertificateOutcome o) {
  switch (o) {
    case CertificateOutcome::Certified: return "CERTIFIED";
    case CertificateOutcome::Refuted: return "REFUTED";
    case CertificateOutcome::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

int certification_margin(const Rational& epsilon, int C) {
  return C + static_cast<int>(floor_of(epsilon * Rational(C)));
}

namespace {

// The unique geodesic into y: every vertex on it has exactly one predecessor
// with a positive count.
Path unique_geodesic_into(const Graph& g, VertexId x, VertexId y, const GeodesicCounts& counts) {
  std::vector<EdgeId> rev;
  VertexId cur = y;
  while (cur != x) {
    int d = counts.distance[static_cast<std::size_t>(cur)];
    EdgeId pick = -1;
    for (auto e : g.incident(cur)) {
      VertexId w = g.opposite(e, cur);
      if (counts.distance[static_cast<std::size_t>(w)] == d - 1 && counts.count[static_cast<std::size_t>(w)] > 0) {
        pick = e;
        break;
      }
    }
    rev.push_back(pick);
    cur = g.opposite(pick, cur);
  }
  std::reverse(rev.begin(), rev.end());
  return Path::from_edges(g, x, std::move(rev));
}

}  // namespace

DetourCertificate certify_admits_detours(const Graph& g, const Rational& epsilon, int C,
                                         const std::vector<VertexId>& bases, std::uint64_t budget) {
  if (C < 1) throw std::invalid_argument("C must be >= 1");
  if (epsilon < 0) throw std::invalid_argument("epsilon must be non-negative");
  DetourCertificate cert;
  cert.epsilon = epsilon;
  cert.C = C;
  cert.bases = bases;

  const int margin = certification_margin(epsilon, C);
  std::vector<int> to_frontier;
  if (!g.frontier().empty()) {
    // Multi-source BFS from the frontier.
    to_frontier.assign(static_cast<std::size_t>(g.vertex_count()), -1);
    std::vector<VertexId> queue(g.frontier().begin(), g.frontier().end());
    for (auto v : queue) to_frontier[static_cast<std::size_t>(v)] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      VertexId v = queue[head];
      if (to_frontier[static_cast<std::size_t>(v)] >= margin) continue;
      for (auto e : g.incident(v)) {
        VertexId w = g.opposite(e, v);
        if (to_frontier[static_cast<std::size_t>(w)] < 0) {
          to_frontier[static_cast<std::size_t>(w)] = to_frontier[static_cast<std::size_t>(v)] + 1;
          queue.push_back(w);
        }
      }
    }
  }

  for (VertexId x : bases) {
    if (!g.valid_vertex(x)) throw std::invalid_argument("base vertex out of range");
    if (!to_frontier.empty()) {
      int d = to_frontier[static_cast<std::size_t>(x)];
      if (d >= 0 && d < margin) {
        cert.outcome = CertificateOutcome::Inconclusive;
        cert.reason = "base " + std::to_string(x) + " is " + std::to_string(d) +
                      " from the frontier; exact search needs " + std::to_string(margin);
        return cert;
      }
    }
    auto counts = geodesic_counts_from(g, x, C);
    for (VertexId y = 0; y < g.vertex_count(); ++y) {
      if (counts.distance[static_cast<std::size_t>(y)] != C) continue;
      if (counts.count[static_cast<std::size_t>(y)] != 1 || counts.saturated[static_cast<std::size_t>(y)]) {
        ++cert.non_unique_targets;
        continue;
      }
      ++cert.unique_geodesics;
      Path pi = unique_geodesic_into(g, x, y, counts);
      auto verdict = find_epsilon_detour(g, pi, epsilon, budget);
      cert.expansions += verdict.expansions;
      if (verdict.detour) {
        cert.witnesses.push_back({pi, *verdict.detour});
      } else if (!verdict.exhaustive) {
        cert.outcome = CertificateOutcome::Inconclusive;
        cert.budget_hit = true;
        cert.reason = "search budget exhausted on " + format_path(pi);
        return cert;
      } else {
        cert.outcome = CertificateOutcome::Refuted;
        cert.counterexample = pi;
        cert.reason = "unique geodesic without a self-avoiding detour";
        return cert;
      }
    }
  }
  cert.outcome = CertificateOutcome::Certified;
  cert.reason = cert.unique_geodesics == 0 ? "no unique geodesics of this length" : "every unique geodesic has a detour";
  return cert;
}

Path loop_erase_detour(const Graph& g, const Path& pi) {
  auto dist = graph_distance(g, pi.start(), pi.end());
  if (!dist) throw std::invalid_argument("endpoints are not connected");
  auto to_end = bfs_distances(g, pi.end());
  if (static_cast<int>(pi.length()) > *dist) return lexicographic_geodesic(g, pi.start(), pi.end(), to_end);
  std::optional<Path> other;
  enumerate_self_avoiding_paths(g, pi.start(), pi.end(), {.max_len = *dist}, [&](const Path& p) {
    if (p.edge_set() == pi.edge_set()) return true;
    other = p;
    return false;
  });
  if (!other) throw std::invalid_argument("path is a unique geodesic; use find_epsilon_detour");
  return *other;
}

// ---------------------------------------------------------------- word graphs

namespace {

Element edge_key(const Element& a, const Element& b, std::int64_t tag) {
  Element k;
  k.push_back(static_cast<std::int64_t>(a.size()));
  k.insert(k.end(), a.begin(), a.end());
  k.push_back(static_cast<std::int64_t>(b.size()));
  k.insert(k.end(), b.begin(), b.end());
  k.push_back(tag);
  return k;
}

}  // namespace

WordGraph::WordGraph(const CayleyBall& cb, const std::vector<Word>& words) {
  const auto& G = cb.backend();
  const bool reduced = cb.generators().reduced;
  std::map<Element, VertexId> vertex;
  std::map<Element, EdgeId> edge;
  std::vector<std::pair<VertexId, VertexId>> ends;
  auto vid = [&](const Element& g) {
    auto [it, fresh] = vertex.emplace(g, static_cast<VertexId>(elements_.size()));
    if (fresh) elements_.push_back(g);
    return it->second;
  };
  std::vector<std::pair<VertexId, std::vector<EdgeId>>> raw;
  for (const auto& w : words) {
    Element g = G.identity();
    VertexId start = vid(g);
    std::vector<EdgeId> es;
    for (int l : w) {
      const auto& letter = cb.alphabet().at(static_cast<std::size_t>(l));
      Element next = G.multiply(g, letter.value);
      Element key;
      if (reduced) {
        key = g < next ? edge_key(g, next, -1) : edge_key(next, g, -1);
      } else {
        key = edge_key(letter.inverted ? next : g, {}, letter.symbol);
      }
      auto [it, fresh] = edge.emplace(key, static_cast<EdgeId>(ends.size()));
      if (fresh) ends.emplace_back(vid(g), vid(next));
      es.push_back(it->second);
      g = std::move(next);
    }
    raw.emplace_back(start, std::move(es));
  }
  Graph::Builder b(static_cast<std::int32_t>(elements_.size()));
  for (auto [u, v] : ends) b.add_edge(u, v);
  graph_ = std::move(b).build();
  for (auto& [s, es] : raw) paths_.push_back(Path::from_edges(graph_, s, std::move(es)));
}

Word formal_inverse(const CayleyBall& cb, const Word& w) {
  Word out;
  for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(cb.inverse_letter(*it));
  return out;
}

std::optional<Word> geodesic_word(const CayleyBall& cb, const Element& g) {
  auto target = cb.find(cb.backend().canonical(g));
  if (!target) return std::nullopt;
  auto dist = bfs_distances(cb.graph(), *target);
  Word w;
  VertexId cur = cb.identity_vertex();
  while (cur != *target) {
    int d = dist[static_cast<std::size_t>(cur)];
    int chosen = -1;
    for (std::size_t l = 0; l < cb.alphabet().size(); ++l) {
      EdgeId e = cb.step_edge(cur, static_cast<int>(l));
      if (e >= 0 && dist[static_cast<std::size_t>(cb.graph().opposite(e, cur))] == d - 1) {
        chosen = static_cast<int>(l);
        break;
      }
    }
    if (chosen < 0) return std::nullopt;
    w.push_back(chosen);
    cur = cb.graph().opposite(cb.step_edge(cur, chosen), cur);
  }
  return w;
}

bool Construction::sound() const {
  if (!endpoints_match || !bounds_hold) return false;
  return proof_epsilon ? valid_at_proof_epsilon : tight.has_value();
}

namespace {

Word concat(std::initializer_list<const Word*> parts) {
  Word out;
  for (const auto* p : parts) out.insert(out.end(), p->begin(), p->end());
  return out;
}

Word repeat(const Word& w, int times) {
  Word out;
  for (int i = 0; i < times; ++i) out.insert(out.end(), w.begin(), w.end());
  return out;
}

Construction finish(const CayleyBall& cb, std::string kind, const Word& pi, const Word& detour,
                    Rational proven_increase, Rational proven_difference) {
  Construction c;
  c.kind = std::move(kind);
  c.original = pi;
  c.detour = detour;
  WordGraph wg(cb, {pi, detour});
  Path P = wg.path(0);
  Path D = wg.path(1);
  auto s = path_set_difference_sizes(P, D);
  c.only_original = s.only_first;
  c.only_detour = s.only_second;
  c.length_increase = static_cast<std::int64_t>(detour.size()) - static_cast<std::int64_t>(pi.size());
  c.proven_increase = proven_increase;
  c.proven_difference = proven_difference;
  c.endpoints_match = cb.backend().equal(cb.evaluate(pi), cb.evaluate(detour)) && P.end() == D.end();
  c.bounds_hold = Rational(c.length_increase) <= proven_increase &&
                  Rational(static_cast<std::int64_t>(c.only_original)) >= proven_difference;
  if (proven_difference > 0) {
    Rational eps = proven_increase / proven_difference;
    if (eps < 0) eps = 0;
    c.proof_epsilon = eps;
    c.valid_at_proof_epsilon = is_epsilon_detour(P, D, eps);
  }
  c.tight = tight_epsilon(P, D);
  c.self_avoiding = D.self_avoiding();
  return c;
}

bool word_contains(const Word& w, const Word& factor) {
  return std::search(w.begin(), w.end(), factor.begin(), factor.end()) != w.end();
}

bool uses_letter(const Word& w, int l) { return std::find(w.begin(), w.end(), l) != w.end(); }

}  // namespace

Construction z_detour(const CayleyBall& cb, const Word& pi) {
  if (cb.backend().name() != "zd 1") throw HypothesisViolation("z_detour needs a Cayley graph of the integers");
  if (cb.alphabet().size() <= 2) {
    throw HypothesisViolation("alphabet has only one generator pair; the graph is the standard line");
  }
  for (std::size_t s = 0; s < cb.alphabet().size(); ++s) {
    int l = static_cast<int>(s);
    if (uses_letter(pi, l) || uses_letter(pi, cb.inverse_letter(l))) continue;
    Word a{l}, ainv{cb.inverse_letter(l)};
    auto n = static_cast<std::int64_t>(pi.size());
    return finish(cb, "z-conjugation", pi, concat({&a, &pi, &ainv}), Rational(2), Rational(n, 2) - 2);
  }
  throw HypothesisViolation("every generator letter occurs in the path");
}

Construction dihedral_detour(const CayleyBall& cb, const Word& pi) {
  const auto& G = cb.backend();
  if (G.name() != "dihedral") throw HypothesisViolation("dihedral_detour needs the infinite dihedral group");
  if (!cb.generators().reduced) throw HypothesisViolation("dihedral_detour needs the reduced Cayley graph");
  std::vector<int> involutions;
  for (std::size_t l = 0; l < cb.alphabet().size(); ++l) {
    const auto& v = cb.alphabet()[l].value;
    if (G.is_identity(G.multiply(v, v))) involutions.push_back(static_cast<int>(l));
  }
  if (involutions.size() < 3) throw HypothesisViolation("need at least three distinct involutions");
  if (pi.empty()) throw HypothesisViolation("empty path");
  const auto n = static_cast<std::int64_t>(pi.size());
  const bool even = n % 2 == 0;

  // Alternating two letters: (ac) π (ca)^{±1} with c unused by π.
  bool alternating = pi.size() >= 2 && pi[0] != pi[1];
  for (std::size_t i = 2; i < pi.size() && alternating; ++i) alternating = pi[i] == pi[i - 2];
  if (alternating) {
    int a = pi[0];
    for (int c : involutions) {
      if (uses_letter(pi, c)) continue;
      Word pre{a, c};
      Word post = even ? Word{c, a} : formal_inverse(cb, Word{c, a});
      auto con = finish(cb, "dihedral-ac", pi, concat({&pre, &pi, &post}), Rational(4), Rational(n - 3));
      if (con.sound()) return con;
    }
  }
  // (ab) π (ba)^{±1} for a pair whose products do not occur in π.
  for (int a : involutions) {
    for (int b : involutions) {
      if (a == b || word_contains(pi, Word{a, b}) || word_contains(pi, Word{b, a})) continue;
      Word pre{a, b};
      Word post = even ? Word{b, a} : formal_inverse(cb, Word{b, a});
      auto con = finish(cb, "dihedral-ab", pi, concat({&pre, &pi, &post}), Rational(4), Rational(n, 2) - 3);
      if (con.sound()) return con;
    }
  }
  throw HypothesisViolation("no involution pair yields a detour for this path");
}

ConjugationResult conjugation_detour(const CayleyBall& cb, const ConjugationData& data, const Word& pi) {
  const auto& G = cb.backend();
  if (data.conjugate_words.empty() || data.conjugate_words.front().first != G.canonical(data.z)) {
    throw HypothesisViolation("first conjugate word must be the word for z");
  }
  if (G.is_identity(data.z)) throw HypothesisViolation("z must be nontrivial");
  const auto wlen = data.conjugate_words.front().second.size();
  for (const auto& [h, w] : data.conjugate_words) {
    if (G.canonical(cb.evaluate(w)) != G.canonical(h)) throw HypothesisViolation("conjugate word does not evaluate to its element");
    if (w.size() != wlen) throw HypothesisViolation("conjugates of z must have equal word length");
  }
  ConjugationResult out;
  // Factor form: a subword of length |w| evaluating to a conjugate of z^{±1}.
  for (std::size_t i = 0; i + wlen <= pi.size(); ++i) {
    Word sub(pi.begin() + static_cast<std::ptrdiff_t>(i), pi.begin() + static_cast<std::ptrdiff_t>(i + wlen));
    auto val = G.canonical(cb.evaluate(sub));
    for (const auto& [h, w] : data.conjugate_words) {
      if (val == G.canonical(h) || val == G.canonical(G.inverse(h))) {
        out.factor_form = true;
        out.factor_position = i;
        return out;
      }
    }
  }
  auto rho = cb.evaluate(pi);
  auto zc = G.canonical(G.conjugate(data.z, rho));
  const Word* wc = nullptr;
  for (const auto& [h, w] : data.conjugate_words) {
    if (G.canonical(h) == zc) wc = &w;
  }
  if (!wc) throw HypothesisViolation("conjugate z^rho(pi) is not in the supplied list");
  const Word& w = data.conjugate_words.front().second;
  Word tail = formal_inverse(cb, *wc);
  auto n = static_cast<std::int64_t>(pi.size());
  auto wl = static_cast<std::int64_t>(wlen);
  out.construction = finish(cb, "conjugation", pi, concat({&w, &pi, &tail}), Rational(2 * wl),
                            Rational(n + 1, 2) - wl - 1);
  return out;
}

Construction power_case_detour(const CayleyBall& cb, const Word& eta, int M, const Word& alpha, int max_power) {
  const auto& G = cb.backend();
  if (eta.empty() || M < 1) throw HypothesisViolation("need a nonempty eta and M >= 1");
  auto h = cb.evaluate(eta);
  auto central = [&](const Element& g) {
    for (const auto& l : cb.alphabet()) {
      if (G.multiply(g, l.value) != G.multiply(l.value, g)) return false;
    }
    return true;
  };
  int l = 0;
  for (int k = 1; k <= max_power; ++k) {
    if (central(G.power(h, k))) {
      l = k;
      break;
    }
  }
  if (l == 0) {
    throw HypothesisViolation("no power rho(eta)^l with l <= " + std::to_string(max_power) + " is central");
  }
  auto a = G.canonical(cb.evaluate(alpha));
  const std::int64_t reach = 4LL * max_power * static_cast<std::int64_t>((alpha.size() + 1) * (alpha.size() + 1));
  for (std::int64_t k = -reach; k <= reach; ++k) {
    if (G.canonical(G.power(h, k)) == a) throw HypothesisViolation("alpha evaluates into the cyclic group of eta");
  }
  int r = (l - M % l) % l;
  Word pi = repeat(eta, M);
  Word mid = repeat(eta, M + r);
  Word ainv = formal_inverse(cb, alpha);
  Word back = repeat(formal_inverse(cb, eta), r);
  Word detour = concat({&alpha, &mid, &ainv, &back});
  auto n = static_cast<std::int64_t>(pi.size());
  auto al = static_cast<std::int64_t>(alpha.size());
  auto wl = static_cast<std::int64_t>(l) * static_cast<std::int64_t>(eta.size());
  auto con = finish(cb, "power", pi, detour, Rational(2 * (al + wl)), Rational(n + 1, 2) - al - wl - 1);
  con.note = "l=" + std::to_string(l) + " r=" + std::to_string(r);
  return con;
}

Construction normal_subgroup_detour(const CayleyBall& cb, const std::vector<Element>& F, const Word& pi) {
  const auto& G = cb.backend();
  std::vector<Element> fs;
  for (const auto& f : F) fs.push_back(G.canonical(f));
  auto in_F = [&](const Element& g) { return std::find(fs.begin(), fs.end(), G.canonical(g)) != fs.end(); };
  if (!in_F(G.identity())) throw HypothesisViolation("F must contain the identity");
  if (fs.size() < 2) throw HypothesisViolation("F is trivial");
  for (const auto& f : fs) {
    for (const auto& l : cb.alphabet()) {
      if (!in_F(G.conjugate(f, l.value))) throw HypothesisViolation("F is not normal");
    }
  }
  std::int64_t ell = 0;
  std::vector<Word> words;
  for (const auto& f : fs) {
    auto w = geodesic_word(cb, f);
    if (!w) throw std::invalid_argument("Cayley ball too small to reach every element of F");
    ell = std::max<std::int64_t>(ell, static_cast<std::int64_t>(w->size()));
    words.push_back(*w);
  }
  const auto n = static_cast<std::int64_t>(pi.size());
  if (n < ell) throw HypothesisViolation("path shorter than max |f|; the bound is vacuous");

  // Loop erasure of the image path in Γ/F; cosets keyed by their least element.
  auto key = [&](const Element& g) {
    Element best;
    bool first = true;
    for (const auto& f : fs) {
      auto gf = G.multiply(g, f);
      if (first || gf < best) best = gf;
      first = false;
    }
    return best;
  };
  std::vector<Element> stack_keys{key(G.identity())};
  std::vector<std::size_t> kept;  // letter positions surviving the erasure
  Element g = G.identity();
  for (std::size_t i = 0; i < pi.size(); ++i) {
    g = G.multiply(g, cb.alphabet()[static_cast<std::size_t>(pi[i])].value);
    auto k = key(g);
    auto it = std::find(stack_keys.begin(), stack_keys.end(), k);
    if (it != stack_keys.end()) {
      auto keep = static_cast<std::size_t>(it - stack_keys.begin()) + 1;
      stack_keys.resize(keep);
      kept.resize(keep - 1);
    } else {
      stack_keys.push_back(k);
      kept.push_back(i);
    }
  }
  // Longest run of consecutive positions.
  std::size_t best_start = 0, best_len = 0;
  for (std::size_t i = 0; i < kept.size();) {
    std::size_t j = i + 1;
    while (j < kept.size() && kept[j] == kept[j - 1] + 1) ++j;
    if (j - i > best_len) {
      best_len = j - i;
      best_start = kept[i];
    }
    i = j;
  }
  Word head(pi.begin(), pi.begin() + static_cast<std::ptrdiff_t>(best_start));
  Word core(pi.begin() + static_cast<std::ptrdiff_t>(best_start),
            pi.begin() + static_cast<std::ptrdiff_t>(best_start + best_len));
  Word rest(pi.begin() + static_cast<std::ptrdiff_t>(best_start + best_len), pi.end());

  std::size_t fi = 0;
  while (fi < fs.size() && G.is_identity(fs[fi])) ++fi;
  const Element& f = fs[fi];
  const Word& gamma1 = words[fi];
  auto conj = G.conjugate(f, cb.evaluate(core));
  auto gamma2 = geodesic_word(cb, G.inverse(conj));
  if (!gamma2) throw std::invalid_argument("Cayley ball too small for the closing word");
  Word detour = concat({&head, &gamma1, &core, &*gamma2, &rest});
  auto con = finish(cb, "finite-normal", pi, detour, Rational(2 * ell),
                    Rational(n - ell, ell + 1) - 2 * ell);
  con.note = "ell=" + std::to_string(ell) + " core=" + std::to_string(best_len);
  return con;
}

}  // namespace fpplab
