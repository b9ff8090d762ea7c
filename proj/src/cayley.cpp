#include "fpplab/cayley.hpp"

#include <sstream>
#include <stdexcept>

namespace fpplab {

GeneratorSpec parse_generators(const GroupBackend& backend, std::string_view symbols, bool reduced) {
  GeneratorSpec spec;
  spec.reduced = reduced;
  std::istringstream in{std::string(symbols)};
  std::string tok;
  while (in >> tok) {
    // "name=element" or just the element text.
    auto eq = tok.find('=');
    spec.symbols.push_back(eq == std::string::npos ? tok : tok.substr(0, eq));
    spec.images.push_back(backend.parse(eq == std::string::npos ? tok : tok.substr(eq + 1)));
  }
  if (spec.symbols.empty()) throw std::invalid_argument("empty generating set");
  return spec;
}

std::optional<VertexId> CayleyBall::find(const Element& g) const {
  auto it = index_.find(g);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int CayleyBall::letter_of(EdgeId e, VertexId from) const {
  const auto i = static_cast<std::size_t>(e);
  if (from == edge_tail_[i]) return edge_letter_[i];
  if (!graph_.endpoints(e).contains(from)) throw std::invalid_argument("edge not incident to vertex");
  return inverse_letter(edge_letter_[i]);
}

Element CayleyBall::evaluate(std::span<const int> word) const {
  Element g = backend_->identity();
  for (int l : word) g = backend_->multiply(g, alphabet_[static_cast<std::size_t>(l)].value);
  return g;
}

Path CayleyBall::word_path(VertexId start, std::span<const int> word) const {
  std::vector<EdgeId> edges;
  edges.reserve(word.size());
  VertexId cur = start;
  for (int l : word) {
    if (l < 0 || static_cast<std::size_t>(l) >= alphabet_.size()) throw std::invalid_argument("letter out of range");
    EdgeId e = step_edge(cur, l);
    if (e < 0) throw std::out_of_range("word leaves the Cayley ball");
    edges.push_back(e);
    cur = graph_.opposite(e, cur);
  }
  return Path::from_edges(graph_, start, std::move(edges));
}

Word CayleyBall::path_word(const Path& p) const {
  Word w;
  auto vs = p.vertices();
  auto es = p.edges();
  for (std::size_t i = 0; i < es.size(); ++i) w.push_back(letter_of(es[i], vs[i]));
  return w;
}

Word CayleyBall::parse_word(std::string_view text) const {
  Word w;
  std::istringstream in{std::string(text)};
  std::string tok;
  auto lookup = [&](const std::string& name) -> int {
    for (std::size_t i = 0; i < alphabet_.size(); ++i) {
      if (alphabet_[i].name == name) return static_cast<int>(i);
    }
    return -1;
  };
  while (in >> tok) {
    if (tok == "1") continue;
    int l = lookup(tok);
    if (l < 0 && tok.size() > 3 && tok.ends_with("^-1")) {
      int base = lookup(tok.substr(0, tok.size() - 3));
      if (base >= 0) l = inverse_letter(base);
    }
    if (l < 0) throw std::invalid_argument("unknown letter '" + tok + "'");
    w.push_back(l);
  }
  return w;
}

std::string CayleyBall::format_word(std::span<const int> word) const {
  if (word.empty()) return "1";
  std::string out;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i) out += ' ';
    out += alphabet_[static_cast<std::size_t>(word[i])].name;
  }
  return out;
}

std::string CayleyBall::element_table() const {
  std::string out;
  for (VertexId v = 0; v < graph_.vertex_count(); ++v) {
    out += "vertex " + std::to_string(v) + " element " + backend_->format(element(v)) + "\n";
  }
  return out;
}

CayleyBall build_cayley_ball(std::shared_ptr<const GroupBackend> backend, const GeneratorSpec& gens, int radius,
                             std::size_t max_vertices) {
  if (radius < 0) throw std::invalid_argument("Cayley ball radius must be non-negative");
  if (gens.symbols.size() != gens.images.size() || gens.symbols.empty()) {
    throw std::invalid_argument("generator symbols and images must match and be non-empty");
  }
  CayleyBall cb;
  cb.backend_ = backend;
  cb.spec_ = gens;
  cb.radius_ = radius;
  const auto& G = *backend;
  for (std::size_t i = 0; i < gens.images.size(); ++i) {
    cb.spec_.images[i] = G.canonical(gens.images[i]);
    if (G.is_identity(cb.spec_.images[i])) {
      throw std::invalid_argument("generator '" + gens.symbols[i] + "' evaluates to the identity");
    }
  }

  // Alphabet.
  if (!gens.reduced) {
    for (std::size_t i = 0; i < gens.images.size(); ++i) {
      cb.alphabet_.push_back({cb.spec_.images[i], gens.symbols[i], static_cast<int>(i), false});
      cb.alphabet_.push_back({G.inverse(cb.spec_.images[i]), gens.symbols[i] + "^-1", static_cast<int>(i), true});
      cb.inverse_letter_.push_back(static_cast<int>(2 * i + 1));
      cb.inverse_letter_.push_back(static_cast<int>(2 * i));
    }
  } else {
    auto add = [&](const Element& g, const std::string& name, int sym, bool inv) {
      for (const auto& l : cb.alphabet_) {
        if (l.value == g) return;
      }
      cb.alphabet_.push_back({g, name, sym, inv});
    };
    for (std::size_t i = 0; i < gens.images.size(); ++i) {
      add(cb.spec_.images[i], gens.symbols[i], static_cast<int>(i), false);
      add(G.inverse(cb.spec_.images[i]), gens.symbols[i] + "^-1", static_cast<int>(i), true);
    }
    for (const auto& l : cb.alphabet_) {
      auto inv = G.inverse(l.value);
      for (std::size_t j = 0; j < cb.alphabet_.size(); ++j) {
        if (cb.alphabet_[j].value == inv) cb.inverse_letter_.push_back(static_cast<int>(j));
      }
    }
  }
  const std::size_t A = cb.alphabet_.size();

  // Vertices: BFS from the identity, letters in alphabet order.
  cb.elements_.push_back(G.identity());
  cb.depth_.push_back(0);
  cb.index_.emplace(G.identity(), 0);
  std::size_t layer_start = 0;
  for (int r = 0; r < radius; ++r) {
    std::size_t layer_end = cb.elements_.size();
    if (layer_start == layer_end) {
      cb.stopped_growing_ = true;
      break;
    }
    for (std::size_t i = layer_start; i < layer_end; ++i) {
      for (std::size_t l = 0; l < A; ++l) {
        Element h = G.multiply(cb.elements_[i], cb.alphabet_[l].value);
        if (cb.index_.contains(h)) continue;
        if (cb.elements_.size() >= max_vertices) {
          throw SizeLimitExceeded("Cayley ball of radius " + std::to_string(radius) + " exceeds " +
                                  std::to_string(max_vertices) + " vertices");
        }
        cb.index_.emplace(h, static_cast<VertexId>(cb.elements_.size()));
        cb.elements_.push_back(std::move(h));
        cb.depth_.push_back(r + 1);
      }
    }
    layer_start = layer_end;
  }
  if (!cb.stopped_growing_ && layer_start == cb.elements_.size() && radius > 0) cb.stopped_growing_ = true;

  const auto n = cb.elements_.size();
  Graph::Builder b(static_cast<std::int32_t>(n));
  cb.step_edge_.assign(n * A, -1);
  std::vector<VertexId> target(n * A, -1);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t l = 0; l < A; ++l) {
      auto it = cb.index_.find(G.multiply(cb.elements_[v], cb.alphabet_[l].value));
      if (it != cb.index_.end()) target[v * A + l] = it->second;
    }
  }
  if (!gens.reduced) {
    // One edge per (g, s); the inverse letter from gs walks back along it.
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t i = 0; i < gens.images.size(); ++i) {
        VertexId h = target[v * A + 2 * i];
        if (h < 0) continue;
        EdgeId e = b.add_edge(static_cast<VertexId>(v), h);
        cb.edge_tail_.push_back(static_cast<VertexId>(v));
        cb.edge_letter_.push_back(static_cast<int>(2 * i));
        cb.step_edge_[v * A + 2 * i] = e;
        cb.step_edge_[static_cast<std::size_t>(h) * A + 2 * i + 1] = e;
      }
    }
  } else {
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t l = 0; l < A; ++l) {
        VertexId h = target[v * A + l];
        if (h < 0 || static_cast<std::size_t>(h) < v) continue;
        EdgeId e = b.add_edge(static_cast<VertexId>(v), h);
        cb.edge_tail_.push_back(static_cast<VertexId>(v));
        cb.edge_letter_.push_back(static_cast<int>(l));
        cb.step_edge_[v * A + l] = e;
        cb.step_edge_[static_cast<std::size_t>(h) * A + static_cast<std::size_t>(cb.inverse_letter(static_cast<int>(l)))] = e;
      }
    }
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (cb.depth_[v] == radius) b.mark_frontier(static_cast<VertexId>(v));
  }
  cb.graph_ = std::move(b).build();
  return cb;
}

}  // namespace fpplab
