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

#ifndef HAMLIFT_ORACLE_HPP
#define HAMLIFT_ORACLE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "hamlift/lift.hpp"
#include "hamlift/rng.hpp"

namespace hamlift {

struct VerifyResult {
  bool ok = false;
  std::string reason;  // first violation when !ok
};

/// Full Hamilton-cycle check against the revealed lift: the sequence visits
/// each of the k*n lift vertices exactly once and every consecutive (and
/// wraparound) pair is a revealed lift edge over a base edge.
inline VerifyResult verify_hamilton_cycle(const LiftState& state,
                                          std::span<const LiftVertex> cycle) {
  VerifyResult res;
  const int total = state.total_vertices();
  if (static_cast<int>(cycle.size()) != total) {
    res.reason = "cycle has " + std::to_string(cycle.size()) +
                 " vertices, expected " + std::to_string(total);
    return res;
  }
  std::vector<char> seen(static_cast<std::size_t>(total), 0);
  for (LiftVertex v : cycle) {
    if (v.base < 0 || v.base >= state.base().k() || v.fiber < 0 ||
        v.fiber >= state.n()) {
      res.reason = "vertex out of range";
      return res;
    }
    auto& s = seen[static_cast<std::size_t>(state.vid(v))];
    if (s) {
      std::ostringstream os;
      os << "vertex " << v << " repeated";
      res.reason = os.str();
      return res;
    }
    s = 1;
  }
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    LiftVertex a = cycle[i];
    LiftVertex b = cycle[(i + 1) % cycle.size()];
    if (state.base().edge_id(a.base, b.base) < 0) {
      std::ostringstream os;
      os << "pair " << a << " - " << b << " projects to a non-edge";
      res.reason = os.str();
      return res;
    }
    auto p = state.partner(a, b.base);
    if (!p || !(*p == b)) {
      std::ostringstream os;
      os << "pair " << a << " - " << b << " is not a revealed matching entry";
      res.reason = os.str();
      return res;
    }
  }
  res.ok = true;
  return res;
}

/// The revealed lift as a plain graph on vids (base * n + fiber).
inline ExplicitGraph explicit_lift(const LiftState& state) {
  ExplicitGraph g(state.total_vertices());
  const BaseGraph& base = state.base();
  const int n = state.n();
  for (int id = 0; id < base.edge_count(); ++id) {
    auto [u, v] = base.edge(id);
    for (int i = 0; i < n; ++i) {
      LiftVertex a{u, i};
      if (auto w = state.partner(a, v)) g.add_edge(state.vid(a), state.vid(*w));
    }
  }
  return g;
}

namespace detail {

inline bool ham_extend(const ExplicitGraph& g, std::vector<int>& path,
                       std::vector<char>& used, int start) {
  if (static_cast<int>(path.size()) == g.vertex_count)
    return g.has_edge(path.back(), start);
  int cur = path.back();
  for (int w : g.adj[static_cast<std::size_t>(cur)]) {
    if (used[static_cast<std::size_t>(w)]) continue;
    // A non-final vertex must keep an exit: at least one unused neighbor or
    // the start (as final closure).
    used[static_cast<std::size_t>(w)] = 1;
    path.push_back(w);
    if (ham_extend(g, path, used, start)) return true;
    path.pop_back();
    used[static_cast<std::size_t>(w)] = 0;
  }
  return false;
}

}  // namespace detail

/// Exact backtracking Hamiltonicity for small graphs (|V| <= cap). Degree
/// pruning: any vertex of degree < 2 settles it immediately.
inline bool is_hamiltonian_bruteforce(const ExplicitGraph& g, int cap = 24) {
  if (g.vertex_count > cap)
    throw std::logic_error("brute-force Hamiltonicity capped at " +
                           std::to_string(cap) + " vertices");
  if (g.vertex_count < 3) return false;
  for (int v = 0; v < g.vertex_count; ++v)
    if (g.degree(v) < 2) return false;
  // Start from a minimum-degree vertex; exactness is unaffected.
  int start = 0;
  for (int v = 1; v < g.vertex_count; ++v)
    if (g.degree(v) < g.degree(start)) start = v;
  std::vector<int> path{start};
  std::vector<char> used(static_cast<std::size_t>(g.vertex_count), 0);
  used[static_cast<std::size_t>(start)] = 1;
  return detail::ham_extend(g, path, used, start);
}

inline int permutation_cycle_count(std::span<const int> perm) {
  std::vector<char> seen(perm.size(), 0);
  int cycles = 0;
  for (std::size_t s = 0; s < perm.size(); ++s) {
    if (seen[s]) continue;
    ++cycles;
    std::size_t cur = s;
    while (!seen[cur]) {
      seen[cur] = 1;
      cur = static_cast<std::size_t>(perm[cur]);
    }
  }
  return cycles;
}

/// Composition of the revealed H1 matchings around the base cycle: the fiber
/// permutation at h1_order[0] induced by walking one full H1 period. The
/// cycles of this permutation are exactly the basic cycles of the lifted H1.
inline std::vector<int> compose_h1_permutation(const LiftState& state) {
  const auto& order = state.base().instance().h1_order;
  const int k = state.base().k();
  const int n = state.n();
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int f = 0; f < n; ++f) {
    LiftVertex cur{order[0], f};
    for (int i = 0; i < k; ++i) {
      auto w = state.partner(cur, state.base().h1_succ(cur.base));
      if (!w) throw std::logic_error("compose_h1_permutation: H1 not revealed");
      cur = *w;
    }
    perm[static_cast<std::size_t>(f)] = cur.fiber;
  }
  return perm;
}

inline std::vector<int> random_permutation(int n, Rng& rng) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(perm);
  return perm;
}

struct CycleCountStats {
  int n = 0;
  int trials = 0;
  std::uint64_t seed = 0;
  double mean = 0.0;
  int min = 0, max = 0;
  double p25 = 0, median = 0, p75 = 0, p90 = 0;
  double frac_gt_2ln = 0.0;  // fraction of trials above 2 ln n
};

/// Cycle-count statistics over seeded uniform random permutations.
inline CycleCountStats cycle_count_stats(int n, int trials, std::uint64_t seed) {
  CycleCountStats st;
  st.n = n;
  st.trials = trials;
  st.seed = seed;
  std::vector<int> counts;
  counts.reserve(static_cast<std::size_t>(trials));
  double sum = 0;
  const double threshold = 2.0 * std::log(static_cast<double>(n));
  int above = 0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(t)));
    auto perm = random_permutation(n, rng);
    int c = permutation_cycle_count(perm);
    counts.push_back(c);
    sum += c;
    if (c > threshold) ++above;
  }
  std::sort(counts.begin(), counts.end());
  auto quantile = [&](double q) {
    if (counts.empty()) return 0.0;
    double idx = q * (counts.size() - 1);
    auto lo = static_cast<std::size_t>(idx);
    auto hi = std::min(lo + 1, counts.size() - 1);
    double frac = idx - static_cast<double>(lo);
    return counts[lo] * (1 - frac) + counts[hi] * frac;
  };
  st.mean = trials ? sum / trials : 0;
  st.min = counts.empty() ? 0 : counts.front();
  st.max = counts.empty() ? 0 : counts.back();
  st.p25 = quantile(0.25);
  st.median = quantile(0.5);
  st.p75 = quantile(0.75);
  st.p90 = quantile(0.9);
  st.frac_gt_2ln = trials ? static_cast<double>(above) / trials : 0;
  return st;
}

inline double harmonic_number(int n) {
  double h = 0;
  for (int i = 1; i <= n; ++i) h += 1.0 / i;
  return h;
}

// ---------------------------------------------------------------------------
// File loading for the standalone `verify` interface: a lift dump ("u i v j"
// lines) and a cycle file ("base fiber" lines), both with '#' comments.
// ---------------------------------------------------------------------------

inline std::vector<std::array<int, 4>> load_lift_dump(std::istream& in) {
  std::vector<std::array<int, 4>> edges;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    int u, i, v, j;
    if (!(ls >> u)) continue;
    if (!(ls >> i >> v >> j))
      throw StructuralError("lift dump line " + std::to_string(lineno) +
                            ": expected 'u i v j'");
    edges.push_back({u, i, v, j});
  }
  return edges;
}

inline std::vector<std::pair<int, int>> load_cycle_file(std::istream& in) {
  std::vector<std::pair<int, int>> cyc;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    int b, f;
    if (!(ls >> b)) continue;
    if (!(ls >> f))
      throw StructuralError("cycle line " + std::to_string(lineno) +
                            ": expected 'base fiber'");
    cyc.emplace_back(b, f);
  }
  return cyc;
}

/// Self-contained verification of a dumped cycle against a dumped lift:
/// the cycle must visit every vertex present in the dump exactly once and
/// every consecutive (and wraparound) pair must be an edge of the dump.
inline VerifyResult verify_dumped_cycle(
    const std::vector<std::array<int, 4>>& lift_edges,
    const std::vector<std::pair<int, int>>& cycle) {
  VerifyResult res;
  std::map<std::pair<int, int>, int> vid;
  auto intern = [&](int b, int f) {
    auto [it, _] = vid.try_emplace({b, f}, static_cast<int>(vid.size()));
    return it->second;
  };
  std::vector<std::pair<int, int>> edge_keys;
  for (const auto& e : lift_edges) {
    int a = intern(e[0], e[1]);
    int b = intern(e[2], e[3]);
    edge_keys.push_back(a < b ? std::pair{a, b} : std::pair{b, a});
  }
  std::sort(edge_keys.begin(), edge_keys.end());
  auto has_edge = [&](int a, int b) {
    auto key = a < b ? std::pair{a, b} : std::pair{b, a};
    return std::binary_search(edge_keys.begin(), edge_keys.end(), key);
  };

  if (cycle.size() != vid.size()) {
    res.reason = "cycle covers " + std::to_string(cycle.size()) +
                 " vertices, lift has " + std::to_string(vid.size());
    return res;
  }
  std::vector<char> seen(vid.size(), 0);
  std::vector<int> ids;
  for (auto [b, f] : cycle) {
    auto it = vid.find({b, f});
    if (it == vid.end()) {
      res.reason = "cycle vertex " + std::to_string(b) + ":" +
                   std::to_string(f) + " not in the lift";
      return res;
    }
    if (seen[static_cast<std::size_t>(it->second)]) {
      res.reason = "cycle vertex " + std::to_string(b) + ":" +
                   std::to_string(f) + " repeated";
      return res;
    }
    seen[static_cast<std::size_t>(it->second)] = 1;
    ids.push_back(it->second);
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!has_edge(ids[i], ids[(i + 1) % ids.size()])) {
      auto [b1, f1] = cycle[i];
      auto [b2, f2] = cycle[(i + 1) % ids.size()];
      res.reason = "pair " + std::to_string(b1) + ":" + std::to_string(f1) +
                   " - " + std::to_string(b2) + ":" + std::to_string(f2) +
                   " is not a lift edge";
      return res;
    }
  }
  res.ok = true;
  return res;
}

}  // namespace hamlift

#endif  // HAMLIFT_ORACLE_HPP
