// Copyright 2026 The hamlift Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HAMLIFT_BASE_GRAPH_HPP
#define HAMLIFT_BASE_GRAPH_HPP

#include <algorithm>
#include <deque>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hamlift {

/// Thrown for malformed input files / instances (order arrays that are not
/// permutations, edge references out of range, ...). Distinct from hypothesis
/// failures, which are reported per-condition by validate().
class StructuralError : public std::runtime_error {
 public:
  explicit StructuralError(const std::string& what) : std::runtime_error(what) {}
};

/// Simple undirected graph as adjacency sets, used for derived graphs
/// (cycle unions, residuals, fully revealed lifts) and brute-force checks.
struct ExplicitGraph {
  int vertex_count = 0;
  std::vector<std::vector<int>> adj;  // sorted, no duplicates

  explicit ExplicitGraph(int n = 0) : vertex_count(n), adj(n) {}

  void add_edge(int u, int v) {
    if (u == v) throw StructuralError("loop edge " + std::to_string(u));
    if (u < 0 || v < 0 || u >= vertex_count || v >= vertex_count)
      throw StructuralError("edge endpoint out of range");
    auto insert_sorted = [](std::vector<int>& a, int x) {
      auto it = std::lower_bound(a.begin(), a.end(), x);
      if (it == a.end() || *it != x) a.insert(it, x);
    };
    insert_sorted(adj[u], v);
    insert_sorted(adj[v], u);
  }

  bool has_edge(int u, int v) const {
    const auto& a = adj[u];
    return std::binary_search(a.begin(), a.end(), v);
  }

  int degree(int v) const { return static_cast<int>(adj[v].size()); }

  std::size_t edge_count() const {
    std::size_t twice = 0;
    for (const auto& a : adj) twice += a.size();
    return twice / 2;
  }

  /// 2-coloring search; nullopt when the graph is not bipartite.
  std::optional<std::vector<int>> bipartition() const {
    std::vector<int> color(vertex_count, -1);
    for (int s = 0; s < vertex_count; ++s) {
      if (color[s] != -1) continue;
      color[s] = 0;
      std::deque<int> queue{s};
      while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (int w : adj[v]) {
          if (color[w] == -1) {
            color[w] = color[v] ^ 1;
            queue.push_back(w);
          } else if (color[w] == color[v]) {
            return std::nullopt;
          }
        }
      }
    }
    return color;
  }
};

/// Base graph G with two distinguished Hamilton cycle orders.
/// h2_order starts at the same vertex as h1_order (the parser rotates it).
/// has_h2 is false for instances that only carry one cycle (H1-lift
/// experiments on cycle bases); such instances fail validate().
struct BaseInstance {
  int k = 0;
  std::vector<std::pair<int, int>> edges;  // canonical: first < second, sorted
  std::vector<int> h1_order;
  std::vector<int> h2_order;
  bool has_h2 = true;

  std::string name;  // optional label carried into reports
};

struct ValidationReport {
  bool structural_ok = false;
  std::vector<std::string> structural_errors;
  // Theorem hypotheses, independently checked:
  bool min_degree_ok = false;    // delta(G) >= required floor
  bool disjoint_cycles_ok = false;  // h1/h2 are edge-disjoint Hamilton cycles
  bool non_bipartite_ok = false;    // H1 union H2 is not bipartite
  int min_degree_required = 5;
  int min_degree_found = 0;

  bool pass() const {
    return structural_ok && min_degree_ok && disjoint_cycles_ok &&
           non_bipartite_ok;
  }
};

namespace detail {

inline bool is_permutation_of_range(const std::vector<int>& order, int k) {
  if (static_cast<int>(order.size()) != k) return false;
  std::vector<char> seen(k, 0);
  for (int v : order) {
    if (v < 0 || v >= k || seen[v]) return false;
    seen[v] = 1;
  }
  return true;
}

inline std::pair<int, int> canon_edge(int u, int v) {
  return u < v ? std::pair{u, v} : std::pair{v, u};
}

}  // namespace detail

/// Structural well-formedness alone: fields consistent, orders are
/// permutations, all referenced edges in range, the graph simple.
inline std::vector<std::string> structural_errors(const BaseInstance& inst) {
  std::vector<std::string> errs;
  if (inst.k < 3) errs.push_back("k must be at least 3");
  for (auto [u, v] : inst.edges) {
    if (u < 0 || v < 0 || u >= inst.k || v >= inst.k)
      errs.push_back("edge endpoint out of range: " + std::to_string(u) + " " +
                     std::to_string(v));
    if (u == v) errs.push_back("loop edge at " + std::to_string(u));
  }
  auto sorted = inst.edges;
  for (auto& e : sorted) e = detail::canon_edge(e.first, e.second);
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    errs.push_back("duplicate edge");
  if (!detail::is_permutation_of_range(inst.h1_order, inst.k))
    errs.push_back("h1 order is not a permutation of 0..k-1");
  if (!detail::is_permutation_of_range(inst.h2_order, inst.k))
    errs.push_back("h2 order is not a permutation of 0..k-1");
  if (errs.empty() && !inst.h1_order.empty() && !inst.h2_order.empty() &&
      inst.h1_order[0] != inst.h2_order[0])
    errs.push_back("h2 order does not start at h1's starting vertex");
  return errs;
}

inline ExplicitGraph to_explicit(const BaseInstance& inst) {
  ExplicitGraph g(inst.k);
  for (auto [u, v] : inst.edges) g.add_edge(u, v);
  return g;
}

namespace detail {

/// Edge set {order[i], order[i+1]} cyclically; nullopt unless every
/// consecutive pair is an edge of g.
inline std::optional<std::vector<std::pair<int, int>>> cycle_edges(
    const std::vector<int>& order, const ExplicitGraph& g) {
  std::vector<std::pair<int, int>> es;
  const int k = static_cast<int>(order.size());
  for (int i = 0; i < k; ++i) {
    int u = order[i];
    int v = order[(i + 1) % k];
    if (!g.has_edge(u, v)) return std::nullopt;
    es.push_back(canon_edge(u, v));
  }
  std::sort(es.begin(), es.end());
  return es;
}

}  // namespace detail

/// Per-condition hypothesis check. min_degree_required defaults to the
/// theorem's 5; the harness may lower it (--allow-min-degree) to experiment
/// with smaller bases, since the search itself only uses degrees in G - H1.
inline ValidationReport validate(const BaseInstance& inst,
                                 int min_degree_required = 5) {
  ValidationReport rep;
  rep.min_degree_required = min_degree_required;
  rep.structural_errors = structural_errors(inst);
  rep.structural_ok = rep.structural_errors.empty();
  if (!rep.structural_ok) return rep;

  ExplicitGraph g = to_explicit(inst);
  rep.min_degree_found = inst.k == 0 ? 0 : g.degree(0);
  for (int v = 0; v < inst.k; ++v)
    rep.min_degree_found = std::min(rep.min_degree_found, g.degree(v));
  rep.min_degree_ok = rep.min_degree_found >= min_degree_required;

  auto e1 = detail::cycle_edges(inst.h1_order, g);
  auto e2 = detail::cycle_edges(inst.h2_order, g);
  if (e1 && e2 && inst.has_h2) {
    std::vector<std::pair<int, int>> common;
    std::set_intersection(e1->begin(), e1->end(), e2->begin(), e2->end(),
                          std::back_inserter(common));
    rep.disjoint_cycles_ok = common.empty();
  } else {
    rep.disjoint_cycles_ok = false;
  }

  if (e1 && e2) {
    ExplicitGraph h(inst.k);
    for (auto [u, v] : *e1) h.add_edge(u, v);
    for (auto [u, v] : *e2) if (!h.has_edge(u, v)) h.add_edge(u, v);
    rep.non_bipartite_ok = !h.bipartition().has_value();
  }
  return rep;
}

/// H = H1 union H2. On a valid instance: 4-regular with 2k edges.
inline ExplicitGraph union_subgraph(const BaseInstance& inst) {
  ExplicitGraph h(inst.k);
  const int k = inst.k;
  for (int i = 0; i < k; ++i) {
    h.add_edge(inst.h1_order[i], inst.h1_order[(i + 1) % k]);
    int u = inst.h2_order[i], v = inst.h2_order[(i + 1) % k];
    if (!h.has_edge(u, v)) h.add_edge(u, v);
  }
  return h;
}

/// G1 = G - H1 (the graph the search reveals lazily).
inline ExplicitGraph residual_graph(const BaseInstance& inst) {
  ExplicitGraph g1(inst.k);
  ExplicitGraph h1(inst.k);
  const int k = inst.k;
  for (int i = 0; i < k; ++i)
    h1.add_edge(inst.h1_order[i], inst.h1_order[(i + 1) % k]);
  for (auto [u, v] : inst.edges)
    if (!h1.has_edge(u, v)) g1.add_edge(u, v);
  return g1;
}

/// Compiled topology shared by every trial on the same instance: canonical
/// edge ids, H1 successor/predecessor maps, per-vertex G1 incidence.
/// Immutable after construction; safe to share across concurrent trials.
class BaseGraph {
 public:
  explicit BaseGraph(BaseInstance inst) : inst_(std::move(inst)) {
    auto errs = structural_errors(inst_);
    if (!errs.empty()) throw StructuralError(errs.front());
    const int k = inst_.k;
    edges_ = inst_.edges;
    for (auto& e : edges_) e = detail::canon_edge(e.first, e.second);
    std::sort(edges_.begin(), edges_.end());
    edge_id_.clear();
    for (std::size_t i = 0; i < edges_.size(); ++i) edge_id_[edges_[i]] = static_cast<int>(i);

    h1_succ_.assign(k, -1);
    h1_pred_.assign(k, -1);
    for (int i = 0; i < k; ++i) {
      int u = inst_.h1_order[i];
      int v = inst_.h1_order[(i + 1) % k];
      h1_succ_[u] = v;
      h1_pred_[v] = u;
    }
    in_h1_.assign(edges_.size(), false);
    in_h2_.assign(edges_.size(), false);
    for (int i = 0; i < k; ++i) {
      int id1 = require_edge(inst_.h1_order[i], inst_.h1_order[(i + 1) % k],
                             "h1 step missing from edge list");
      in_h1_[static_cast<std::size_t>(id1)] = true;
      if (inst_.has_h2) {
        int id2 = require_edge(inst_.h2_order[i], inst_.h2_order[(i + 1) % k],
                               "h2 step missing from edge list");
        in_h2_[static_cast<std::size_t>(id2)] = true;
      }
    }

    neighbors_.assign(k, {});
    g1_neighbors_.assign(k, {});
    for (std::size_t id = 0; id < edges_.size(); ++id) {
      auto [u, v] = edges_[id];
      neighbors_[u].push_back(v);
      neighbors_[v].push_back(u);
      if (!in_h1_[id]) {
        g1_neighbors_[u].push_back(v);
        g1_neighbors_[v].push_back(u);
      }
    }
    for (auto& a : neighbors_) std::sort(a.begin(), a.end());
    for (auto& a : g1_neighbors_) std::sort(a.begin(), a.end());
  }

  const BaseInstance& instance() const { return inst_; }
  int k() const { return inst_.k; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  int edge_id(int u, int v) const {
    auto it = edge_id_.find(detail::canon_edge(u, v));
    return it == edge_id_.end() ? -1 : it->second;
  }
  std::pair<int, int> edge(int id) const { return edges_[static_cast<std::size_t>(id)]; }
  bool edge_in_h1(int id) const { return in_h1_[static_cast<std::size_t>(id)]; }
  bool edge_in_h2(int id) const { return in_h2_[static_cast<std::size_t>(id)]; }

  int h1_succ(int v) const { return h1_succ_[v]; }
  int h1_pred(int v) const { return h1_pred_[v]; }

  const std::vector<int>& neighbors(int v) const { return neighbors_[v]; }
  /// Neighbors of v in G1 = G - H1, ascending (the fixed revelation order).
  const std::vector<int>& g1_neighbors(int v) const { return g1_neighbors_[v]; }

  /// First edge of G - H1 - H2 in lexicographic order, if any.
  std::optional<std::pair<int, int>> first_extra_edge() const {
    for (std::size_t id = 0; id < edges_.size(); ++id)
      if (!in_h1_[id] && !in_h2_[id]) return edges_[id];
    return std::nullopt;
  }
  /// First H2 edge in lexicographic order (Phase-6 fallback target).
  std::pair<int, int> first_h2_edge() const {
    for (std::size_t id = 0; id < edges_.size(); ++id)
      if (in_h2_[id]) return edges_[id];
    throw StructuralError("instance has no h2 edges");
  }

 private:
  int require_edge(int u, int v, const char* what) const {
    int id = edge_id(u, v);
    if (id < 0) throw StructuralError(what);
    return id;
  }

  BaseInstance inst_;
  std::vector<std::pair<int, int>> edges_;
  std::map<std::pair<int, int>, int> edge_id_;
  std::vector<int> h1_succ_, h1_pred_;
  std::vector<bool> in_h1_, in_h2_;
  std::vector<std::vector<int>> neighbors_;
  std::vector<std::vector<int>> g1_neighbors_;
};

// ---------------------------------------------------------------------------
// Instance file format (line oriented, '#' starts a comment):
//   k <int>
//   edges
//   <u> <v>        (one pair per line)
//   h1 <k space-separated ints>
//   h2 <k ints>    (optional; omit for single-cycle bases)
// ---------------------------------------------------------------------------

inline BaseInstance parse_instance(std::istream& in) {
  BaseInstance inst;
  inst.has_h2 = false;
  std::string line;
  bool in_edges = false;
  bool have_k = false, have_h1 = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    auto fail = [&](const std::string& msg) {
      throw StructuralError("line " + std::to_string(lineno) + ": " + msg);
    };
    if (tok == "k") {
      if (!(ls >> inst.k)) fail("expected integer after 'k'");
      have_k = true;
      in_edges = false;
    } else if (tok == "edges") {
      in_edges = true;
    } else if (tok == "h1" || tok == "h2") {
      if (!have_k) fail("'" + tok + "' before 'k'");
      in_edges = false;
      std::vector<int> order;
      int v;
      while (ls >> v) order.push_back(v);
      if (static_cast<int>(order.size()) != inst.k)
        fail("'" + tok + "' must list exactly k vertices");
      if (tok == "h1") {
        inst.h1_order = std::move(order);
        have_h1 = true;
      } else {
        inst.h2_order = std::move(order);
        inst.has_h2 = true;
      }
    } else if (in_edges) {
      int u, v;
      std::istringstream es(line);
      if (!(es >> u >> v)) fail("expected 'u v' edge pair");
      inst.edges.emplace_back(u, v);
    } else {
      fail("unexpected token '" + tok + "'");
    }
  }
  if (!have_k) throw StructuralError("missing 'k' line");
  if (!have_h1) throw StructuralError("missing 'h1' line");
  if (!inst.has_h2) inst.h2_order = inst.h1_order;

  // Rotate h2 so it starts at h1's starting vertex; the rotated order is the
  // same cycle.
  if (inst.has_h2 && !inst.h1_order.empty() &&
      detail::is_permutation_of_range(inst.h2_order, inst.k)) {
    auto it =
        std::find(inst.h2_order.begin(), inst.h2_order.end(), inst.h1_order[0]);
    if (it != inst.h2_order.end())
      std::rotate(inst.h2_order.begin(), it, inst.h2_order.end());
  }
  auto errs = structural_errors(inst);
  if (!errs.empty()) throw StructuralError(errs.front());
  return inst;
}

inline void write_instance(const BaseInstance& inst, std::ostream& out) {
  out << "k " << inst.k << "\n";
  out << "edges\n";
  for (auto [u, v] : inst.edges) out << u << " " << v << "\n";
  out << "h1";
  for (int v : inst.h1_order) out << " " << v;
  out << "\n";
  if (inst.has_h2) {
    out << "h2";
    for (int v : inst.h2_order) out << " " << v;
    out << "\n";
  }
}

}  // namespace hamlift

#endif  // HAMLIFT_BASE_GRAPH_HPP
