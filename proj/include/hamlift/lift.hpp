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

#ifndef HAMLIFT_LIFT_HPP
#define HAMLIFT_LIFT_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "hamlift/base_graph.hpp"
#include "hamlift/rng.hpp"

namespace hamlift {

/// A vertex of the lift: (base vertex, fiber index).
struct LiftVertex {
  std::int32_t base = -1;
  std::int32_t fiber = -1;

  friend bool operator==(LiftVertex a, LiftVertex b) {
    return a.base == b.base && a.fiber == b.fiber;
  }
  friend bool operator!=(LiftVertex a, LiftVertex b) { return !(a == b); }
  friend bool operator<(LiftVertex a, LiftVertex b) {
    return a.base != b.base ? a.base < b.base : a.fiber < b.fiber;
  }
  bool valid() const { return base >= 0 && fiber >= 0; }
};

inline std::ostream& operator<<(std::ostream& os, LiftVertex v) {
  return os << v.base << ":" << v.fiber;
}

namespace detail {

/// Partial injective map between the two fibers of one base edge, with
/// free lists on both sides for O(1) uniform sampling of unmatched partners.
/// Orientation: "lo" is the smaller base endpoint.
class PartialMatching {
 public:
  void init(int n) {
    fwd_.assign(n, -1);
    bwd_.assign(n, -1);
    free_lo_.resize(n);
    free_hi_.resize(n);
    pos_lo_.resize(n);
    pos_hi_.resize(n);
    for (int i = 0; i < n; ++i) {
      free_lo_[i] = free_hi_[i] = i;
      pos_lo_[i] = pos_hi_[i] = i;
    }
    revealed_ = 0;
  }

  int image(int i) const { return fwd_[i]; }    // lo -> hi
  int preimage(int j) const { return bwd_[j]; } // hi -> lo
  int revealed() const { return revealed_; }
  bool complete() const { return revealed_ == static_cast<int>(fwd_.size()); }

  /// Reveals the partner of index i on the lo side, uniform over unmatched
  /// hi indices.
  int reveal_from_lo(int i, Rng& rng) {
    if (fwd_[i] != -1) throw std::logic_error("matching entry already revealed");
    int j = free_hi_[static_cast<std::size_t>(rng.below(free_hi_.size()))];
    bind(i, j);
    return j;
  }
  int reveal_from_hi(int j, Rng& rng) {
    if (bwd_[j] != -1) throw std::logic_error("matching entry already revealed");
    int i = free_lo_[static_cast<std::size_t>(rng.below(free_lo_.size()))];
    bind(i, j);
    return i;
  }

  /// Completes to a bijection, uniform over completions consistent with the
  /// revealed pairs.
  void complete_uniform(Rng& rng) {
    std::vector<int> lo = free_lo_;
    std::vector<int> hi = free_hi_;
    rng.shuffle(hi);
    for (std::size_t t = 0; t < lo.size(); ++t) bind(lo[t], hi[t]);
  }

  /// Records a specific pair (test fixtures, loading dumped lifts).
  void force(int i, int j) {
    if (fwd_[i] != -1 || bwd_[j] != -1)
      throw std::logic_error("force_pair conflicts with revealed entry");
    bind(i, j);
  }

 private:
  void bind(int i, int j) {
    fwd_[i] = j;
    bwd_[j] = i;
    remove_free(free_lo_, pos_lo_, i);
    remove_free(free_hi_, pos_hi_, j);
    ++revealed_;
  }
  static void remove_free(std::vector<int>& list, std::vector<int>& pos, int x) {
    int p = pos[x];
    int last = list.back();
    list[p] = last;
    pos[last] = p;
    list.pop_back();
  }

  std::vector<int> fwd_, bwd_;
  std::vector<int> free_lo_, free_hi_;  // unmatched indices per side
  std::vector<int> pos_lo_, pos_hi_;    // index of each value inside the free list
  int revealed_ = 0;
};

}  // namespace detail

/// The lazily revealed random n-lift. Single source of truth for revealed
/// randomness: per-edge partial matchings plus the inactive set D. A vertex
/// becomes inactive exactly when one of its G1 edges is revealed through
/// reveal_neighbor; H1 reveals and bulk completions never deactivate.
/// Confined to one trial; distinct trials with distinct states may run
/// concurrently.
class LiftState {
 public:
  LiftState(const BaseGraph& base, int n, std::uint64_t seed)
      : base_(&base), n_(n), rng_(seed), seed_(seed) {
    if (n < 1) throw StructuralError("fiber size must be positive");
    match_.resize(static_cast<std::size_t>(base.edge_count()));
    for (auto& m : match_) m.init(n);
    inactive_.assign(static_cast<std::size_t>(total_vertices()), 0);
  }

  const BaseGraph& base() const { return *base_; }
  int n() const { return n_; }
  int total_vertices() const { return base_->k() * n_; }
  Rng& rng() { return rng_; }
  std::uint64_t seed() const { return seed_; }

  int vid(LiftVertex v) const { return v.base * n_ + v.fiber; }
  LiftVertex vertex(int vid) const {
    return LiftVertex{static_cast<std::int32_t>(vid / n_),
                      static_cast<std::int32_t>(vid % n_)};
  }

  /// Revealed partner of v along the base edge {v.base, base_neighbor}.
  std::optional<LiftVertex> partner(LiftVertex v, int base_neighbor) const {
    int id = base_->edge_id(v.base, base_neighbor);
    if (id < 0) throw std::logic_error("partner: not a base edge");
    const auto& m = match_[static_cast<std::size_t>(id)];
    auto [lo, hi] = base_->edge(id);
    int other = v.base == lo ? m.image(v.fiber) : m.preimage(v.fiber);
    if (other < 0) return std::nullopt;
    return LiftVertex{static_cast<std::int32_t>(base_neighbor), other};
  }

  bool edge_revealed(LiftVertex v, int base_neighbor) const {
    return partner(v, base_neighbor).has_value();
  }

  /// Reveals v's neighbor along {v.base, base_neighbor}: the partner fiber
  /// index is uniform over the unmatched indices on the far side. Both
  /// endpoints are deactivated when the edge lies in G1. Calling this on an
  /// already revealed entry is a logic error; consult partner() first.
  LiftVertex reveal_neighbor(LiftVertex v, int base_neighbor) {
    int id = base_->edge_id(v.base, base_neighbor);
    if (id < 0) throw std::logic_error("reveal_neighbor: not a base edge");
    auto& m = match_[static_cast<std::size_t>(id)];
    auto [lo, hi] = base_->edge(id);
    int other = v.base == lo ? m.reveal_from_lo(v.fiber, rng_)
                             : m.reveal_from_hi(v.fiber, rng_);
    LiftVertex w{static_cast<std::int32_t>(base_neighbor), other};
    ++reveal_count_;
    if (!base_->edge_in_h1(id)) {
      ++g1_reveal_count_;
      deactivate(v);
      deactivate(w);
    }
    return w;
  }

  /// Reveals every not-yet-revealed G1 edge at v, in ascending base-neighbor
  /// order. Returns the (base_neighbor, partner) pairs actually revealed.
  std::vector<std::pair<int, LiftVertex>> reveal_all_g1_neighbors(LiftVertex v) {
    std::vector<std::pair<int, LiftVertex>> out;
    for (int b : base_->g1_neighbors(v.base))
      if (!edge_revealed(v, b)) out.emplace_back(b, reveal_neighbor(v, b));
    return out;
  }

  /// Completes the matching on base edge {u, v} to a bijection, uniformly
  /// over completions consistent with what is already revealed.
  void reveal_full_edge(int u, int v) {
    int id = base_->edge_id(u, v);
    if (id < 0) throw std::logic_error("reveal_full_edge: not a base edge");
    auto& m = match_[static_cast<std::size_t>(id)];
    int before = m.revealed();
    if (!m.complete()) m.complete_uniform(rng_);
    reveal_count_ += static_cast<std::uint64_t>(m.revealed() - before);
  }

  bool edge_complete(int u, int v) const {
    int id = base_->edge_id(u, v);
    return id >= 0 && match_[static_cast<std::size_t>(id)].complete();
  }

  /// Records a specific pair on {u, v}: fiber i on the smaller endpoint's
  /// side maps to fiber j. For fixtures and for loading dumped lifts.
  void force_pair(int u, int v, int i, int j) {
    int id = base_->edge_id(u, v);
    if (id < 0) throw std::logic_error("force_pair: not a base edge");
    match_[static_cast<std::size_t>(id)].force(i, j);
    ++reveal_count_;
  }

  bool is_active(LiftVertex v) const { return !inactive_[static_cast<std::size_t>(vid(v))]; }
  int inactive_count() const { return inactive_count_; }

  /// All currently revealed neighbors of v (over every incident base edge).
  void revealed_neighbors(LiftVertex v, std::vector<LiftVertex>& out) const {
    out.clear();
    for (int b : base_->neighbors(v.base))
      if (auto w = partner(v, b)) out.push_back(*w);
  }

  bool distance2_clear(LiftVertex v) const {
    return distance2_clear(v, std::span<const LiftVertex>{});
  }

  /// True iff v is active and no inactive vertex lies within distance 2 of v
  /// in the currently revealed lift. Vertices in `exclude` are treated as
  /// active (used by the engine to evaluate the condition as of just before
  /// the reveal that produced them).
  bool distance2_clear(LiftVertex v, std::span<const LiftVertex> exclude) const {
    auto counts = [&](LiftVertex w) {
      if (!inactive_[static_cast<std::size_t>(vid(w))]) return false;
      for (LiftVertex e : exclude)
        if (e == w) return false;
      return true;
    };
    if (counts(v)) return false;
    std::vector<LiftVertex> n1;
    revealed_neighbors(v, n1);
    std::vector<LiftVertex> n2;
    for (LiftVertex w : n1) {
      if (counts(w)) return false;
      revealed_neighbors(w, n2);
      for (LiftVertex x : n2)
        if (!(x == v) && counts(x)) return false;
    }
    return true;
  }

  /// True iff v is at distance >= 2 from every inactive vertex (v active and
  /// no inactive revealed neighbor), modulo `exclude`. The pivot filter.
  bool clear_radius1(LiftVertex v, std::span<const LiftVertex> exclude) const {
    auto counts = [&](LiftVertex w) {
      if (!inactive_[static_cast<std::size_t>(vid(w))]) return false;
      for (LiftVertex e : exclude)
        if (e == w) return false;
      return true;
    };
    if (counts(v)) return false;
    std::vector<LiftVertex> n1;
    revealed_neighbors(v, n1);
    for (LiftVertex w : n1)
      if (counts(w)) return false;
    return true;
  }

  /// Reveals all of H1's base edges and walks the lifted H1 into its disjoint
  /// cycles. Each cycle starts in the fiber of h1_order[0] at its smallest
  /// fiber index and follows H1-successor order, so fibers appear in the
  /// base cycle's period. These vertices are not deactivated.
  std::vector<std::vector<LiftVertex>> lift_h1() {
    const auto& order = base_->instance().h1_order;
    const int k = base_->k();
    for (int i = 0; i < k; ++i) reveal_full_edge(order[i], order[(i + 1) % k]);
    int start_base = order[0];
    std::vector<char> used(static_cast<std::size_t>(n_), 0);
    std::vector<std::vector<LiftVertex>> cycles;
    for (int f = 0; f < n_; ++f) {
      if (used[static_cast<std::size_t>(f)]) continue;
      std::vector<LiftVertex> cyc;
      LiftVertex cur{static_cast<std::int32_t>(start_base),
                     static_cast<std::int32_t>(f)};
      do {
        if (cur.base == start_base) used[static_cast<std::size_t>(cur.fiber)] = 1;
        cyc.push_back(cur);
        cur = *partner(cur, base_->h1_succ(cur.base));
      } while (!(cur.base == start_base && cur.fiber == f));
      cycles.push_back(std::move(cyc));
    }
    return cycles;
  }

  std::uint64_t reveal_count() const { return reveal_count_; }
  std::uint64_t g1_reveal_count() const { return g1_reveal_count_; }

  /// Edge-list dump of every revealed lift edge, one "u i v j" line each.
  void dump_edges(std::ostream& os) const {
    os << "# k " << base_->k() << " n " << n_ << "\n";
    for (int id = 0; id < base_->edge_count(); ++id) {
      auto [u, v] = base_->edge(id);
      const auto& m = match_[static_cast<std::size_t>(id)];
      for (int i = 0; i < n_; ++i)
        if (m.image(i) >= 0)
          os << u << " " << i << " " << v << " " << m.image(i) << "\n";
    }
  }

  /// DOT rendering for small instances (k*n <= 200).
  void dump_dot(std::ostream& os) const {
    if (total_vertices() > 200)
      throw std::logic_error("dot dump capped at 200 lift vertices");
    os << "graph lift {\n";
    for (int id = 0; id < base_->edge_count(); ++id) {
      auto [u, v] = base_->edge(id);
      const auto& m = match_[static_cast<std::size_t>(id)];
      for (int i = 0; i < n_; ++i)
        if (m.image(i) >= 0)
          os << "  \"" << u << ":" << i << "\" -- \"" << v << ":" << m.image(i)
             << "\";\n";
    }
    os << "}\n";
  }

 private:
  void deactivate(LiftVertex v) {
    auto& flag = inactive_[static_cast<std::size_t>(vid(v))];
    if (!flag) {
      flag = 1;
      ++inactive_count_;
    }
  }

  const BaseGraph* base_;
  int n_;
  std::vector<detail::PartialMatching> match_;
  std::vector<char> inactive_;
  int inactive_count_ = 0;
  Rng rng_;
  std::uint64_t seed_;
  std::uint64_t reveal_count_ = 0;
  std::uint64_t g1_reveal_count_ = 0;
};

}  // namespace hamlift

#endif  // HAMLIFT_LIFT_HPP
