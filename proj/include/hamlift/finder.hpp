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

#ifndef HAMLIFT_FINDER_HPP
#define HAMLIFT_FINDER_HPP

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "hamlift/alternating.hpp"
#include "hamlift/lift.hpp"
#include "hamlift/oracle.hpp"
#include "hamlift/rotation.hpp"

namespace hamlift {

/// Phase-engine tuning. The exponents mirror the asymptotic analysis; the
/// defaults scale them down where the raw formulas degenerate at practical n
/// (endset/clone growth would otherwise deactivate more vertices than the
/// lift has). Everything is overridable from the CLI.
struct Thresholds {
  int small_remainder = 1;    // Phase 2 case A vs B cutoff (n^{9/10})
  int probe_batch = 1;        // Phase 2B batch size (n^{1/3})
  int clone_count = 1;        // Phase 4 cloned paths
  int endset_target = 1;      // Phase 5 target |S1|, |S2|
  int adjusted_target = 1;    // Phase 6 surviving-set floor
  std::int64_t rotation_budget = 1;  // reveals+rotations per phase invocation
  int deactivation_budget = 1;       // soft cap on |D| (n^{5/6}), reported only
  int max_restarts = 5;

  static Thresholds defaults_for(int n) {
    Thresholds t;
    double dn = static_cast<double>(n);
    double ln = std::log(std::max(2.0, dn));
    t.small_remainder = static_cast<int>(std::ceil(std::pow(dn, 0.9)));
    t.probe_batch = static_cast<int>(std::ceil(std::cbrt(dn)));
    t.clone_count = static_cast<int>(std::ceil(ln));
    t.endset_target = static_cast<int>(std::ceil(std::pow(dn, 0.6) * ln));
    t.adjusted_target =
        static_cast<int>(std::max(1.0, std::ceil(std::pow(dn, 0.6) / ln)));
    t.rotation_budget = 50LL * std::max(1, n);
    t.deactivation_budget = static_cast<int>(std::ceil(std::pow(dn, 5.0 / 6.0)));
    t.max_restarts = 5;
    t.clamp(n);
    return t;
  }

  /// Clamps the vertex-count-like thresholds to [1, n] and keeps the budget
  /// and restart cap merely positive (the default budget 50n deliberately
  /// exceeds n: it counts operations, not vertices).
  void clamp(int n) {
    auto c = [n](int& v) { v = std::min(std::max(v, 1), std::max(1, n)); };
    c(small_remainder);
    c(probe_batch);
    c(clone_count);
    c(endset_target);
    c(adjusted_target);
    c(deactivation_budget);
    if (endset_target < adjusted_target) endset_target = adjusted_target;
    if (rotation_budget < 1) rotation_budget = 1;
    if (max_restarts < 0) max_restarts = 0;
  }

  /// Applies "key=value" overrides (CLI --thresholds).
  void apply_override(const std::string& key, const std::string& value) {
    auto as_int = [&] { return std::stoi(value); };
    if (key == "small_remainder") small_remainder = as_int();
    else if (key == "probe_batch") probe_batch = as_int();
    else if (key == "clone_count") clone_count = as_int();
    else if (key == "endset_target") endset_target = as_int();
    else if (key == "adjusted_target") adjusted_target = as_int();
    else if (key == "rotation_budget") rotation_budget = std::stoll(value);
    else if (key == "deactivation_budget") deactivation_budget = as_int();
    else if (key == "max_restarts") max_restarts = as_int();
    else throw StructuralError("unknown threshold key '" + key + "'");
  }
};

enum class Outcome { Hamilton, Failure };

struct TrialReport {
  std::uint64_t seed = 0;
  int n = 0;
  Outcome outcome = Outcome::Failure;
  std::vector<LiftVertex> cycle;  // present when outcome == Hamilton

  // Metrics of the final attempt (restarts discard earlier lifts entirely).
  std::uint64_t reveals = 0;
  std::uint64_t g1_reveals = 0;
  int inactive_count = 0;
  int restarts = 0;
  int basic_cycles_initial = 0;
  std::uint64_t rotations = 0;
  int merges = 0;  // completed Phase-2 + Phase-3 cycle absorptions
  std::array<std::int64_t, 7> phase_micros{};
  bool fallback_h2 = false;     // Phase 6 had to target an H2 edge
  int activity_violations = 0;  // max inactive-outside-path count seen
  int pxy_spotchecks = 0;       // validated end-pair path reconstructions
  bool verified = false;
  std::string restart_reasons;  // "phase:reason" entries, ';'-separated

  static std::string csv_header() {
    return "seed,outcome,n,reveals,inactive_count,restarts,"
           "basic_cycles_initial,phase1_micros,phase2_micros,phase3_micros,"
           "phase4_micros,phase5_micros,phase6_micros,phase7_micros,"
           "g1_reveals,rotations,merges,fallback_h2,activity_violations,"
           "pxy_spotchecks,verified,restart_reasons";
  }

  std::string csv_row() const {
    std::ostringstream os;
    os << seed << "," << (outcome == Outcome::Hamilton ? "hamilton" : "failure")
       << "," << n << "," << reveals << "," << inactive_count << ","
       << restarts << "," << basic_cycles_initial;
    for (auto us : phase_micros) os << "," << us;
    os << "," << g1_reveals << "," << rotations << "," << merges << ","
       << (fallback_h2 ? 1 : 0) << "," << activity_violations << ","
       << pxy_spotchecks << "," << (verified ? 1 : 0) << ","
       << (restart_reasons.empty() ? "-" : restart_reasons);
    return os.str();
  }

  /// Deterministic serialization: everything except wall-clock timings.
  /// Byte-identical across runs for identical (instance, n, thresholds, seed).
  std::string canonical() const {
    std::ostringstream os;
    os << seed << "," << (outcome == Outcome::Hamilton ? "hamilton" : "failure")
       << "," << n << "," << reveals << "," << inactive_count << ","
       << restarts << "," << basic_cycles_initial << "," << g1_reveals << ","
       << rotations << "," << merges << "," << (fallback_h2 ? 1 : 0) << ","
       << activity_violations << "," << pxy_spotchecks << ","
       << (verified ? 1 : 0) << ","
       << (restart_reasons.empty() ? "-" : restart_reasons);
    os << ";cycle=";
    for (LiftVertex v : cycle) os << v.base << ":" << v.fiber << " ";
    return os.str();
  }
};

namespace detail {

struct RestartSignal {
  int phase;
  const char* reason;
};

struct JumpToPhase2 {
  std::vector<LiftVertex> cycle;
};

struct JumpToPhase3 {
  RotationPath full_path;   // a full-length current path
  LiftVertex path_end;      // the end of full_path that the edge leaves from
  LiftVertex cycle_vertex;  // the basic-cycle vertex the edge reaches
};

}  // namespace detail

/// One attempt's mutable state: the lazily revealed lift, the current cycle
/// or working path, the not-yet-absorbed basic cycles, and the per-phase
/// work budget. Phase methods are public so tests and drivers can exercise
/// them individually; run() orchestrates attempts and restarts.
class SearchState {
 public:
  SearchState(const BaseGraph& base, int n, const Thresholds& th,
              std::uint64_t attempt_seed)
      : base_(base),
        th_(th),
        lift_(std::make_unique<LiftState>(base, n, attempt_seed)),
        fresh_mark_(static_cast<std::size_t>(base.k()) * static_cast<std::size_t>(n),
                    0),
        location_(static_cast<std::size_t>(base.k()) * static_cast<std::size_t>(n),
                  -1) {}

  LiftState& lift() { return *lift_; }
  const LiftState& lift() const { return *lift_; }
  const BaseGraph& base() const { return base_; }
  const std::vector<std::vector<LiftVertex>>& remaining() const {
    return remaining_;
  }
  const std::vector<LiftVertex>& cycle() const { return cycle_; }
  const RotationPath& path() const { return path_; }
  TrialReport& report() { return rep_; }

  // -------------------------------------------------------------- Phase 1
  /// Reveals the lifted H1, stores its basic cycles, and assigns the longest
  /// one as the current cycle C.
  void phase1_cycle_lift() {
    PhaseClock clock(*this, 1);
    auto cycles = lift_->lift_h1();
    rep_.basic_cycles_initial = static_cast<int>(cycles.size());
    std::size_t longest = 0;
    for (std::size_t i = 1; i < cycles.size(); ++i)
      if (cycles[i].size() > cycles[longest].size()) longest = i;
    cycle_ = std::move(cycles[longest]);
    remaining_.clear();
    mass_ = 0;
    for (std::size_t i = 0; i < cycles.size(); ++i) {
      if (i == longest) continue;
      place_cycle(std::move(cycles[i]));
    }
    assert_partition();
  }

  // -------------------------------------------------------------- Phase 2
  /// Merges the current cycle C with one remaining basic cycle through a
  /// freshly revealed G1 edge, producing the working path P. Case A probes
  /// vertices of a small leftover cycle; case B probes clear vertices of C.
  void phase2_cycle_merge() {
    PhaseClock clock(*this, 2);
    begin_phase(2);
    if (remaining_.empty()) return;  // nothing to merge; C already spans
    note_activity();
    if (mass_ < th_.small_remainder)
      phase2_case_a();
    else
      phase2_case_b();
    assert_partition();
  }

  // -------------------------------------------------------------- Phase 3
  /// Absorbs the basic cycle holding `u` into P through the revealed edge
  /// {end, u}. P's far end on the broken cycle is chosen clear-first.
  void phase3_path_merge(LiftVertex end, LiftVertex u) {
    PhaseClock clock(*this, 3);
    if (!(path_.back() == end)) {
      if (!(path_.front() == end))
        throw std::logic_error("phase3: edge is not at a path end");
      path_.reverse();
    }
    int ci = location_[static_cast<std::size_t>(lift_->vid(u))];
    if (ci < 0) throw std::logic_error("phase3: vertex not on a basic cycle");
    auto cyc = extract_cycle(static_cast<std::size_t>(ci));
    const int len = static_cast<int>(cyc.size());
    int j = 0;
    while (!(cyc[static_cast<std::size_t>(j)] == u)) ++j;
    mark_fresh(end);
    mark_fresh(u);
    auto side_score = [&](int dir) {
      LiftVertex far = cyc[static_cast<std::size_t>(((j - dir) % len + len) % len)];
      if (lift_->distance2_clear(far, fresh_list_)) return 2;
      return lift_->is_active(far) ? 1 : 0;
    };
    int s_fwd = side_score(+1);  // walk j+1, j+2, ... far end = cyc[j-1]...
    int s_bwd = side_score(-1);
    int dir;
    if (s_fwd != s_bwd)
      dir = s_fwd > s_bwd ? +1 : -1;
    else
      dir = lift_->rng().below(2) == 0 ? +1 : -1;
    for (int t = 0; t < len; ++t)
      path_.append(cyc[static_cast<std::size_t>(((j + dir * t) % len + len) % len)]);
    ++rep_.merges;
    assert_partition();
  }

  // -------------------------------------------------------------- Phase 4
  /// Clones P into up to clone_count paths on the same vertex set whose ends
  /// are pairwise distinct and active, or jumps to Phase 3 when a revealed
  /// edge reaches a remaining basic cycle.
  std::vector<RotationPath> phase4_clone() {
    PhaseClock clock(*this, 4);
    begin_phase(4);
    note_activity();
    RotationPath start = path_;
    // Work from the end with more unrevealed G1 entries (RNG on ties).
    int unrev_front = unrevealed_g1(start.front());
    int unrev_back = unrevealed_g1(start.back());
    if (unrev_front > unrev_back ||
        (unrev_front == unrev_back && lift_->rng().below(2) == 0))
      start.reverse();

    const int t = start.size();
    const int r_eff = std::min(th_.clone_count, std::max(1, t - 2));

    // Stage 1: rotation tree preserving start.front(); collect distinct ends.
    std::vector<RotationPath> found;
    std::vector<char> end_seen(location_.size(), 0);
    std::deque<RotationPath> frontier;
    frontier.push_back(start);
    auto full_identity = [](const RotationPath& p) { return p; };
    while (static_cast<int>(found.size()) < r_eff && !frontier.empty()) {
      RotationPath cur = std::move(frontier.front());
      frontier.pop_front();
      jump_if_connected(cur, full_identity);
      reveal_at_end(cur, full_identity, nullptr);
      mark_fresh(cur.back());
      auto cands = rotation_candidates(cur, *lift_, fresh_list_);
      lift_->rng().shuffle(cands);
      for (int piv : cands) {
        LiftVertex ne = cur.at(piv + 1);
        auto slot = static_cast<std::size_t>(lift_->vid(ne));
        if (end_seen[slot]) continue;
        end_seen[slot] = 1;
        spend(4);
        ++rep_.rotations;
        RotationPath rp = cur;
        rp.rotate(piv);
        found.push_back(rp);
        frontier.push_back(std::move(rp));
        if (static_cast<int>(found.size()) >= r_eff) break;
      }
    }
    std::erase_if(found,
                  [&](const RotationPath& p) { return !lift_->is_active(p.back()); });
    if (found.empty()) throw detail::RestartSignal{4, "no-rotatable-ends"};

    // Stage 2: reverse each clone and move the shared original end off to a
    // fresh end, keeping all 2r ends pairwise distinct and active.
    std::vector<char> used(location_.size(), 0);
    for (const auto& p : found)
      used[static_cast<std::size_t>(lift_->vid(p.back()))] = 1;
    std::vector<RotationPath> clones;
    for (const auto& p : found) {
      RotationPath seed = hamlift::reverse(p);
      std::deque<RotationPath> fr;
      fr.push_back(seed);
      std::vector<char> seen_here(location_.size(), 0);
      std::optional<RotationPath> picked;
      while (!picked && !fr.empty()) {
        RotationPath cur = std::move(fr.front());
        fr.pop_front();
        jump_if_connected(cur, full_identity);
        reveal_at_end(cur, full_identity, nullptr);
        mark_fresh(cur.back());
        auto cands = rotation_candidates(cur, *lift_, fresh_list_);
        lift_->rng().shuffle(cands);
        for (int piv : cands) {
          LiftVertex ne = cur.at(piv + 1);
          auto slot = static_cast<std::size_t>(lift_->vid(ne));
          if (seen_here[slot]) continue;
          seen_here[slot] = 1;
          spend(4);
          ++rep_.rotations;
          RotationPath rp = cur;
          rp.rotate(piv);
          if (!used[slot] && lift_->is_active(ne)) {
            used[slot] = 1;
            picked = std::move(rp);
            break;
          }
          fr.push_back(std::move(rp));
        }
      }
      if (picked) clones.push_back(std::move(*picked));
    }
    if (clones.empty()) throw detail::RestartSignal{4, "no-distinct-ends"};
    return clones;
  }

  // -------------------------------------------------------------- Phase 5
  /// Rotation-tree state for one half of a split path: base path with the
  /// preserved end at position 0, nodes of (parent, pivot) forming realized
  /// end variants, and the discovered distinct ends.
  struct HalfSearch {
    RotationPath base;
    struct Node {
      int parent;
      int pivot;
      LiftVertex end;
    };
    std::vector<Node> nodes;
    std::deque<int> frontier;
    std::vector<int> end_node;  // vid -> node realizing that end, or -1
    std::vector<LiftVertex> ends;

    void init(const LiftState& state, const RotationPath& half,
              std::size_t vid_space) {
      base = half;
      nodes.assign(1, Node{-1, -1, half.back()});
      frontier.assign(1, 0);
      end_node.assign(vid_space, -1);
      end_node[static_cast<std::size_t>(state.vid(half.back()))] = 0;
      ends.assign(1, half.back());
    }
    bool exhausted() const { return frontier.empty(); }

    RotationPath reconstruct(int node_id, std::uint64_t* replayed) const {
      std::vector<int> pivots;
      for (int i = node_id; nodes[static_cast<std::size_t>(i)].parent >= 0;
           i = nodes[static_cast<std::size_t>(i)].parent)
        pivots.push_back(nodes[static_cast<std::size_t>(i)].pivot);
      RotationPath p = base;
      for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) p.rotate(*it);
      if (replayed) *replayed += pivots.size();
      return p;
    }

    /// Node of the most recently discovered end that is still active; any
    /// variant makes a valid full path, and handing back one with a live end
    /// keeps the merged path workable after a jump.
    int best_node(const LiftState& state) const {
      for (auto it = ends.rbegin(); it != ends.rend(); ++it)
        if (state.is_active(*it))
          return end_node[static_cast<std::size_t>(state.vid(*it))];
      return 0;
    }
  };

  struct EndSets {
    HalfSearch half1, half2;
    int target_eff = 0;
  };

  /// Splits each clone into halves, multiplies feasible ends on both halves
  /// with alternating rotations, and stops when one pair reaches the end-set
  /// target (or jumps to Phase 2/3 on a closing/connecting edge).
  EndSets phase5_multiply_ends(std::vector<RotationPath> clones) {
    PhaseClock clock(*this, 5);
    begin_phase(5);
    note_activity();
    struct Pair {
      HalfSearch h1, h2;
      int target = 0;
      bool alive = true;
    };
    std::vector<Pair> pairs;
    for (auto& clone : clones) {
      // Closing edge at split time is taken before any rotation.
      if (auto cyc = close_cycle(clone, *lift_))
        throw detail::JumpToPhase2{std::move(*cyc)};
      const int t = clone.size();
      if (t < 4) continue;
      const int i1 = (t + 1) / 2;  // |V1| = ceil(t/2)
      std::vector<LiftVertex> v1(clone.verts().begin(),
                                 clone.verts().begin() + i1);
      std::vector<LiftVertex> v2(clone.verts().begin() + i1,
                                 clone.verts().end());
      std::reverse(v1.begin(), v1.end());  // preserved end w_i at position 0
      Pair pr;
      pr.h1.init(*lift_, RotationPath(*lift_, std::move(v1)), location_.size());
      pr.h2.init(*lift_, RotationPath(*lift_, std::move(v2)), location_.size());
      pr.target = std::min(th_.endset_target, (t - 1) / 2);
      pairs.push_back(std::move(pr));
    }
    if (pairs.empty()) throw detail::RestartSignal{5, "paths-too-short"};

    auto pair_done = [&](const Pair& pr) {
      return static_cast<int>(pr.h1.ends.size()) >= pr.target &&
             static_cast<int>(pr.h2.ends.size()) >= pr.target;
    };

    while (true) {
      bool any_alive = false;
      for (auto& pr : pairs) {
        if (!pr.alive) continue;
        if (pair_done(pr)) return finish_phase5(pr.h1, pr.h2, pr.target);
        half_step(pr.h1, pr.h2);
        half_step(pr.h2, pr.h1);
        if (pair_done(pr)) return finish_phase5(pr.h1, pr.h2, pr.target);
        if (pr.h1.exhausted() && pr.h2.exhausted() && !pair_done(pr))
          pr.alive = false;
        any_alive = any_alive || pr.alive;
      }
      if (!any_alive) throw detail::RestartSignal{5, "all-pairs-stalled"};
    }
  }

  // -------------------------------------------------------------- Phase 6
  struct AdjustedSets {
    std::pair<int, int> target_edge;
    std::vector<RotationPath> survivors1;  // ends on the fiber of target x
    std::vector<RotationPath> survivors2;  // ends on the fiber of target y
    HalfSearch half1, half2;  // retained so jumps can pick a live variant
  };

  /// Moves enough S1/S2 ends onto the fibers of a target base edge {x, y}
  /// using alternating-path walks (kept ends that already sit there count).
  AdjustedSets phase6_adjust(EndSets& es) {
    PhaseClock clock(*this, 6);
    begin_phase(6);
    note_activity();
    auto extra = base_.first_extra_edge();
    std::pair<int, int> xy = extra ? *extra : base_.first_h2_edge();
    rep_.fallback_h2 = !extra.has_value();

    AdjustedSets out;
    out.target_edge = xy;
    const int adjusted_eff = std::min(th_.adjusted_target, es.target_eff);
    out.survivors1 = adjust_half(es.half1, es.half2, xy.first);
    if (static_cast<int>(out.survivors1.size()) < adjusted_eff)
      throw detail::RestartSignal{6, "too-few-survivors-s1"};
    out.survivors2 = adjust_half(es.half2, es.half1, xy.second);
    if (static_cast<int>(out.survivors2.size()) < adjusted_eff)
      throw detail::RestartSignal{6, "too-few-survivors-s2"};
    out.half1 = std::move(es.half1);
    out.half2 = std::move(es.half2);
    return out;
  }

  // -------------------------------------------------------------- Phase 7
  /// Reveals target-edge matching entries at the survivor ends until one
  /// lands on the opposite survivor set, closing a full-length cycle.
  std::vector<LiftVertex> phase7_close(AdjustedSets& as) {
    PhaseClock clock(*this, 7);
    begin_phase(7);
    note_activity();
    auto [x, y] = as.target_edge;
    std::vector<int> end2_index(location_.size(), -1);
    for (std::size_t i = 0; i < as.survivors2.size(); ++i)
      end2_index[static_cast<std::size_t>(
          lift_->vid(as.survivors2[i].back()))] = static_cast<int>(i);

    std::vector<int> order(as.survivors1.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    lift_->rng().shuffle(order);
    for (int idx : order) {
      RotationPath& p1 = as.survivors1[static_cast<std::size_t>(idx)];
      LiftVertex u = p1.back();
      int far_base = u.base == x ? y : x;
      std::optional<LiftVertex> q = lift_->partner(u, far_base);
      if (!q) {
        spend(7);
        q = reveal_tracked(u, far_base);
        if (location_[static_cast<std::size_t>(lift_->vid(*q))] >= 0) {
          RotationPath full = make_full(
              p1, as.half2.reconstruct(as.half2.best_node(*lift_),
                                       &replayed_rotations_));
          throw detail::JumpToPhase3{std::move(full), u, *q};
        }
      }
      int j = end2_index[static_cast<std::size_t>(lift_->vid(*q))];
      if (j < 0) continue;
      RotationPath full = make_full(p1, as.survivors2[static_cast<std::size_t>(j)]);
      return full.verts();
    }
    throw detail::RestartSignal{7, "no-closing-edge"};
  }

  // ------------------------------------------------------------- orchestration
  /// Runs one full attempt to completion. Returns the Hamilton cycle.
  /// Throws detail::RestartSignal when a phase gives up.
  std::vector<LiftVertex> run_attempt() {
    phase1_cycle_lift();
    while (true) {
      if (remaining_.empty()) {
        finish_cycle();
        return cycle_;
      }
      phase2_cycle_merge();
      if (path_loop()) {
        // path_loop installed a new cycle C; loop to merge or finish.
        continue;
      }
    }
  }

  /// Count of inactive vertices currently sitting on remaining basic cycles
  /// (the working path/cycle excluded). Zero in the analysis's ideal run.
  int activity_violations() const {
    int count = 0;
    for (const auto& cyc : remaining_)
      for (LiftVertex v : cyc)
        if (!lift_->is_active(v)) ++count;
    return count;
  }

 private:
  friend struct PhaseClock;
  struct PhaseClock {
    PhaseClock(SearchState& s, int phase)
        : state(s), idx(phase - 1),
          start(std::chrono::steady_clock::now()) {}
    ~PhaseClock() {
      auto us = std::chrono::duration_cast<std::chrono::microseconds>(
                    std::chrono::steady_clock::now() - start)
                    .count();
      state.rep_.phase_micros[static_cast<std::size_t>(idx)] += us;
    }
    SearchState& state;
    int idx;
    std::chrono::steady_clock::time_point start;
  };

  void begin_phase(int phase) {
    phase_ = phase;
    budget_ = th_.rotation_budget;
    for (LiftVertex v : fresh_list_)
      fresh_mark_[static_cast<std::size_t>(lift_->vid(v))] = 0;
    fresh_list_.clear();
  }
  void spend(int phase) {
    if (--budget_ < 0) throw detail::RestartSignal{phase, "budget-exhausted"};
  }

  void mark_fresh(LiftVertex v) {
    auto& m = fresh_mark_[static_cast<std::size_t>(lift_->vid(v))];
    if (!m) {
      m = 1;
      fresh_list_.push_back(v);
    }
  }

  /// All engine reveals go through here: the endpoints join the phase's
  /// fresh set, so clearness filters can be evaluated as of phase entry
  /// (the per-phase failure analysis is against that snapshot; a freshly
  /// revealed pivot would otherwise always reject itself). End activity is
  /// still checked against the live state wherever the contracts demand it.
  LiftVertex reveal_tracked(LiftVertex v, int base_neighbor) {
    LiftVertex w = lift_->reveal_neighbor(v, base_neighbor);
    mark_fresh(v);
    mark_fresh(w);
    return w;
  }

  void note_activity() {
    rep_.activity_violations =
        std::max(rep_.activity_violations, activity_violations());
  }

  void place_cycle(std::vector<LiftVertex> cyc) {
    int idx = static_cast<int>(remaining_.size());
    mass_ += static_cast<int>(cyc.size());
    for (LiftVertex v : cyc)
      location_[static_cast<std::size_t>(lift_->vid(v))] = idx;
    remaining_.push_back(std::move(cyc));
  }

  /// Detaches the basic cycle at index ci from the remaining set, keeping
  /// mass and location bookkeeping consistent.
  std::vector<LiftVertex> extract_cycle(std::size_t ci) {
    std::vector<LiftVertex> cyc = std::move(remaining_[ci]);
    mass_ -= static_cast<int>(cyc.size());
    for (LiftVertex v : cyc)
      location_[static_cast<std::size_t>(lift_->vid(v))] = -1;
    if (ci + 1 != remaining_.size()) {
      remaining_[ci] = std::move(remaining_.back());
      for (LiftVertex v : remaining_[ci])
        location_[static_cast<std::size_t>(lift_->vid(v))] = static_cast<int>(ci);
    }
    remaining_.pop_back();
    return cyc;
  }

  void assert_partition() const {
    int covered = mass_;
    covered += path_.empty() ? static_cast<int>(cycle_.size()) : path_.size();
    if (covered != lift_->total_vertices())
      throw std::logic_error("partition invariant violated");
  }

  int unrevealed_g1(LiftVertex v) const {
    int c = 0;
    for (int b : base_.g1_neighbors(v.base))
      if (!lift_->edge_revealed(v, b)) ++c;
    return c;
  }

  /// Path over a broken cycle: starts at cyc[j], walks dir (+1/-1), len verts.
  static std::vector<LiftVertex> path_from_break(
      const std::vector<LiftVertex>& cyc, int j, int dir) {
    const int len = static_cast<int>(cyc.size());
    std::vector<LiftVertex> out;
    out.reserve(static_cast<std::size_t>(len));
    for (int t = 0; t < len; ++t)
      out.push_back(cyc[static_cast<std::size_t>(((j + dir * t) % len + len) % len)]);
    return out;
  }

  /// Builds P from C broken at u and basic cycle `ci` broken at v, joined by
  /// the revealed edge {u, v}. Far-end sides are chosen clear-first.
  void merge_into_path(LiftVertex u, std::size_t ci, LiftVertex v) {
    auto cyc = extract_cycle(ci);
    int iu = 0;
    while (!(cycle_[static_cast<std::size_t>(iu)] == u)) ++iu;
    int iv = 0;
    while (!(cyc[static_cast<std::size_t>(iv)] == v)) ++iv;
    mark_fresh(u);
    mark_fresh(v);
    auto score = [&](const std::vector<LiftVertex>& seq, int j, int dir) {
      const int len = static_cast<int>(seq.size());
      LiftVertex far = seq[static_cast<std::size_t>(((j + dir * (len - 1)) % len + len) % len)];
      if (lift_->distance2_clear(far, fresh_list_)) return 2;
      return lift_->is_active(far) ? 1 : 0;
    };
    auto pick_dir = [&](const std::vector<LiftVertex>& seq, int j) {
      int sf = score(seq, j, +1), sb = score(seq, j, -1);
      if (sf != sb) return sf > sb ? +1 : -1;
      return lift_->rng().below(2) == 0 ? +1 : -1;
    };
    auto c_part = path_from_break(cycle_, iu, pick_dir(cycle_, iu));
    auto v_part = path_from_break(cyc, iv, pick_dir(cyc, iv));
    std::reverse(c_part.begin(), c_part.end());  // ends at u
    c_part.insert(c_part.end(), v_part.begin(), v_part.end());
    path_ = RotationPath(*lift_, std::move(c_part));
    cycle_.clear();
    ++rep_.merges;
    assert_partition();
  }

  void phase2_case_a() {
    // Probe vertices of one small leftover cycle until a revealed edge lands
    // on a clear vertex of C.
    std::size_t ci = static_cast<std::size_t>(lift_->rng().below(remaining_.size()));
    std::vector<LiftVertex> order = remaining_[ci];
    lift_->rng().shuffle(order);
    for (LiftVertex v : order) {
      for (int b : base_.g1_neighbors(v.base)) {
        if (lift_->edge_revealed(v, b)) continue;
        spend(2);
        LiftVertex u = reveal_tracked(v, b);
        if (location_[static_cast<std::size_t>(lift_->vid(u))] != -1) continue;
        if (!lift_->distance2_clear(u, fresh_list_)) continue;
        merge_into_path(u, ci, v);
        return;
      }
    }
    throw detail::RestartSignal{2, "case-a-exhausted"};
  }

  void phase2_case_b() {
    while (true) {
      // A fresh batch of clear probe vertices on C.
      std::vector<LiftVertex> shuffled = cycle_;
      lift_->rng().shuffle(shuffled);
      std::vector<LiftVertex> batch;
      for (LiftVertex v : shuffled) {
        if (static_cast<int>(batch.size()) >= th_.probe_batch) break;
        if (lift_->distance2_clear(v)) batch.push_back(v);
      }
      if (batch.empty()) throw detail::RestartSignal{2, "no-clear-probes"};
      bool revealed_any = false;
      for (LiftVertex p : batch) {
        if (!lift_->distance2_clear(p)) continue;  // dirtied by earlier probes
        for (int b : base_.g1_neighbors(p.base)) {
          if (lift_->edge_revealed(p, b)) continue;
          spend(2);
          revealed_any = true;
          LiftVertex u = reveal_tracked(p, b);
          int ci = location_[static_cast<std::size_t>(lift_->vid(u))];
          if (ci < 0) continue;  // landed back on C
          merge_into_path(p, static_cast<std::size_t>(ci), u);
          return;
        }
      }
      if (!revealed_any) throw detail::RestartSignal{2, "no-fresh-edges"};
    }
  }

  /// Revealed edge from either end of `p` to a remaining basic cycle.
  std::optional<std::pair<LiftVertex, LiftVertex>> find_end_connection(
      const RotationPath& p) const {
    std::vector<LiftVertex> nbrs;
    for (LiftVertex end : {p.front(), p.back()}) {
      lift_->revealed_neighbors(end, nbrs);
      for (LiftVertex w : nbrs)
        if (location_[static_cast<std::size_t>(lift_->vid(w))] >= 0)
          return std::pair{end, w};
    }
    return std::nullopt;
  }

  using FullFn = std::function<RotationPath(const RotationPath&)>;
  using ClosingHook = std::function<void(const RotationPath&, LiftVertex)>;

  void jump_if_connected(const RotationPath& cur, const FullFn& to_full,
                         const ClosingHook& closing = nullptr) {
    std::vector<LiftVertex> nbrs;
    lift_->revealed_neighbors(cur.back(), nbrs);
    for (LiftVertex w : nbrs) {
      if (closing) closing(cur, w);
      if (location_[static_cast<std::size_t>(lift_->vid(w))] >= 0)
        throw detail::JumpToPhase3{to_full(cur), cur.back(), w};
    }
  }

  /// Reveals all unrevealed G1 edges at the current end; each fresh partner
  /// goes through the closing hook (Phase 2 jump) and the basic-cycle check
  /// (Phase 3 jump). The endpoints join the phase's fresh set.
  void reveal_at_end(const RotationPath& cur, const FullFn& to_full,
                     const ClosingHook& closing) {
    LiftVertex e = cur.back();
    for (int b : base_.g1_neighbors(e.base)) {
      if (lift_->edge_revealed(e, b)) continue;
      spend(phase_);
      LiftVertex u = reveal_tracked(e, b);
      if (closing) closing(cur, u);
      if (location_[static_cast<std::size_t>(lift_->vid(u))] >= 0)
        throw detail::JumpToPhase3{to_full(cur), e, u};
    }
  }

  /// Full-length path from one half's current variant plus a path over the
  /// other half: reverse(a) ++ b, joined by the original split edge.
  RotationPath make_full(const RotationPath& a, const RotationPath& b) const {
    std::vector<LiftVertex> verts(a.verts().rbegin(), a.verts().rend());
    verts.insert(verts.end(), b.verts().begin(), b.verts().end());
    return RotationPath(*lift_, std::move(verts));
  }

  /// One expansion step of a half-path rotation tree (Phase 5).
  void half_step(HalfSearch& hs, HalfSearch& other) {
    if (hs.frontier.empty()) return;
    int node = hs.frontier.front();
    hs.frontier.pop_front();
    RotationPath cur = hs.reconstruct(node, &replayed_rotations_);
    auto to_full = [&](const RotationPath& c) {
      return make_full(c,
                       other.reconstruct(other.best_node(*lift_), &replayed_rotations_));
    };
    auto closing = [&](const RotationPath& c, LiftVertex w) {
      int onode = other.end_node[static_cast<std::size_t>(lift_->vid(w))];
      if (onode < 0) return;
      RotationPath ob = other.reconstruct(onode, &replayed_rotations_);
      RotationPath full = make_full(c, ob);
      throw detail::JumpToPhase2{full.verts()};
    };
    jump_if_connected(cur, to_full, closing);
    reveal_at_end(cur, to_full, closing);
    mark_fresh(cur.back());
    auto cands = rotation_candidates(cur, *lift_, fresh_list_);
    lift_->rng().shuffle(cands);
    for (int piv : cands) {
      LiftVertex ne = cur.at(piv + 1);
      auto slot = static_cast<std::size_t>(lift_->vid(ne));
      if (hs.end_node[slot] >= 0) continue;
      spend(phase_);
      ++rep_.rotations;
      int id = static_cast<int>(hs.nodes.size());
      hs.nodes.push_back(HalfSearch::Node{node, piv, ne});
      hs.end_node[slot] = id;
      hs.ends.push_back(ne);
      hs.frontier.push_back(id);
    }
  }

  /// Phase-5 success: spot-check a few (x, y) end pairs by replaying their
  /// rotation histories into a full path and validating it.
  EndSets finish_phase5(HalfSearch& h1, HalfSearch& h2, int target) {
    const int checks = static_cast<int>(
        std::min<std::size_t>(3, std::min(h1.ends.size(), h2.ends.size())));
    for (int c = 0; c < checks; ++c) {
      LiftVertex x = h1.ends[static_cast<std::size_t>(lift_->rng().below(h1.ends.size()))];
      LiftVertex y = h2.ends[static_cast<std::size_t>(lift_->rng().below(h2.ends.size()))];
      RotationPath px = h1.reconstruct(
          h1.end_node[static_cast<std::size_t>(lift_->vid(x))], &replayed_rotations_);
      RotationPath py = h2.reconstruct(
          h2.end_node[static_cast<std::size_t>(lift_->vid(y))], &replayed_rotations_);
      RotationPath full = make_full(px, py);
      if (!(full.front() == x) || !(full.back() == y))
        throw std::logic_error("P_xy reconstruction has wrong ends");
      if (auto err = validate_path(*lift_, full.verts()))
        throw std::logic_error("P_xy reconstruction invalid: " + *err);
      ++rep_.pxy_spotchecks;
    }
    EndSets es;
    es.half1 = std::move(h1);
    es.half2 = std::move(h2);
    es.target_eff = target;
    return es;
  }

  // ---- Phase 6 internals ----

  struct SectionMap {
    int sign = +1;  // majority run orientation: +1 follows h1_succ
    struct Run {
      int start, end;  // vertex positions, inclusive; end > start
      int section;     // 1..k-1; section 1 holds the largest positions
    };
    std::vector<Run> runs;  // ascending by start

    const Run* run_at(int pos) const {
      int lo = 0, hi = static_cast<int>(runs.size()) - 1;
      while (lo <= hi) {
        int mid = (lo + hi) / 2;
        const Run& r = runs[static_cast<std::size_t>(mid)];
        if (pos < r.start)
          hi = mid - 1;
        else if (pos > r.end)
          lo = mid + 1;
        else
          return &r;
      }
      return nullptr;
    }
  };

  /// Scans a path for maximal runs of consecutive vertices whose bases
  /// follow H1 order, keeps the majority orientation, and splits those runs
  /// into k-1 contiguous sections (section 1 nearest the moving end).
  std::optional<SectionMap> build_section_map(const RotationPath& p) const {
    const int m = p.size();
    std::vector<std::pair<std::pair<int, int>, int>> raw;  // ((start,end),sign)
    int i = 0;
    while (i + 1 < m) {
      int s;
      if (p.at(i + 1).base == base_.h1_succ(p.at(i).base))
        s = +1;
      else if (p.at(i + 1).base == base_.h1_pred(p.at(i).base))
        s = -1;
      else {
        ++i;
        continue;
      }
      int j = i + 1;
      while (j + 1 < m) {
        int nb = s > 0 ? base_.h1_succ(p.at(j).base) : base_.h1_pred(p.at(j).base);
        if (p.at(j + 1).base != nb) break;
        ++j;
      }
      raw.push_back({{i, j}, s});
      i = j;
    }
    int plus = 0, minus = 0;
    for (auto& r : raw) (r.second > 0 ? plus : minus)++;
    const int sign = plus >= minus ? +1 : -1;
    SectionMap sm;
    sm.sign = sign;
    for (auto& r : raw)
      if (r.second == sign)
        sm.runs.push_back(SectionMap::Run{r.first.first, r.first.second, 0});
    const int sections = base_.k() - 1;
    const int count = static_cast<int>(sm.runs.size());
    if (count < sections) return std::nullopt;
    // Even contiguous grouping; ascending group g maps to section k-1-g so
    // that section 1 sits at the largest positions (pivots walk toward the
    // preserved end).
    int q = count / sections, rem = count % sections;
    int idx = 0;
    for (int g = 0; g < sections; ++g) {
      int size = q + (g < rem ? 1 : 0);
      for (int t = 0; t < size; ++t)
        sm.runs[static_cast<std::size_t>(idx++)].section = sections - g;
    }
    return sm;
  }

  const AltPath* alt_path_cached(int from, int to, RedDir dir) {
    auto key = std::tuple{from, to, dir == RedDir::Forward};
    auto it = alt_cache_.find(key);
    if (it == alt_cache_.end()) {
      auto p = find_alternating_path(base_, from, to, dir);
      it = alt_cache_.emplace(key, std::move(p)).first;
    }
    return it->second ? &*it->second : nullptr;
  }

  /// For each discovered end of `hs`, either keep it (already on the target
  /// fiber) or walk an alternating base path, revealing the lifted H2 edge at
  /// the end and pivoting on the H1 edge inside the next oriented section,
  /// until the end reaches the target fiber. Failures just drop the end.
  std::vector<RotationPath> adjust_half(HalfSearch& hs, HalfSearch& other,
                                        int target_base) {
    std::vector<RotationPath> out;
    auto closing = [&](const RotationPath& c, LiftVertex w) {
      int onode = other.end_node[static_cast<std::size_t>(lift_->vid(w))];
      if (onode < 0) return;
      RotationPath ob = other.reconstruct(onode, &replayed_rotations_);
      throw detail::JumpToPhase2{make_full(c, ob).verts()};
    };
    for (LiftVertex end : hs.ends) {
      int node = hs.end_node[static_cast<std::size_t>(lift_->vid(end))];
      RotationPath p = hs.reconstruct(node, &replayed_rotations_);
      if (end.base == target_base) {
        out.push_back(std::move(p));
        continue;
      }
      auto sm = build_section_map(p);
      if (!sm) continue;  // path too mangled for oriented sections
      RedDir dir = sm->sign > 0 ? RedDir::Forward : RedDir::Backward;
      const AltPath* route = alt_path_cached(end.base, target_base, dir);
      if (!route) continue;  // hypotheses overridden (bipartite union)
      const int steps = route->length() / 2;
      bool ok = true;
      int prev_pivot = p.size();  // pivots must strictly decrease
      for (int s = 0; s < steps && ok; ++s) {
        int blue_base = route->verts[static_cast<std::size_t>(2 * s + 1)];
        int red_base = route->verts[static_cast<std::size_t>(2 * s + 2)];
        LiftVertex e = p.back();
        std::optional<LiftVertex> q = lift_->partner(e, blue_base);
        if (!q) {
          spend(6);
          q = reveal_tracked(e, blue_base);
          closing(p, *q);
          if (location_[static_cast<std::size_t>(lift_->vid(*q))] >= 0)
            throw detail::JumpToPhase3{
                make_full(p, other.reconstruct(other.best_node(*lift_),
                                               &replayed_rotations_)),
                e, *q};
        }
        int pos = p.position(*q);
        const int m = p.size() - 1;
        if (pos < 1 || pos > m - 2 || pos >= prev_pivot) {
          ok = false;
          break;
        }
        const SectionMap::Run* run = sm->run_at(pos);
        if (!run || run->section != s + 1 || pos >= run->end) {
          ok = false;
          break;
        }
        if (p.at(pos + 1).base != red_base)
          throw std::logic_error("oriented run does not follow H1 order");
        spend(6);
        ++rep_.rotations;
        p.rotate(pos);
        prev_pivot = pos;
      }
      if (!ok) continue;
      if (p.back().base != target_base)
        throw std::logic_error("alternating walk ended off the target fiber");
      if (p.size() != hs.base.size())
        throw std::logic_error("adjusted path lost vertices");
      out.push_back(std::move(p));
    }
    return out;
  }

  /// Inner loop between merges: absorb known connections, then clone /
  /// multiply / adjust / close. Returns true when a new cycle C was
  /// installed (closing happened); the caller re-enters the outer loop.
  bool path_loop() {
    while (true) {
      try {
        while (auto conn = find_end_connection(path_))
          phase3_path_merge(conn->first, conn->second);
        if (remaining_.empty() && path_.size() == lift_->total_vertices()) {
          // Spanning path: closing still needs Phases 4-7.
        }
        auto clones = phase4_clone();
        auto ends = phase5_multiply_ends(std::move(clones));
        auto adjusted = phase6_adjust(ends);
        auto cyc = phase7_close(adjusted);
        install_cycle(std::move(cyc));
        return true;
      } catch (detail::JumpToPhase3& jump) {
        path_ = std::move(jump.full_path);
        phase3_path_merge(jump.path_end, jump.cycle_vertex);
        continue;
      } catch (detail::JumpToPhase2& jump) {
        install_cycle(std::move(jump.cycle));
        return true;
      }
    }
  }

  void install_cycle(std::vector<LiftVertex> cyc) {
    cycle_ = std::move(cyc);
    path_ = RotationPath();
    assert_partition();
  }

  /// Terminal state: C spans every lift vertex; verify before reporting.
  void finish_cycle() {
    if (static_cast<int>(cycle_.size()) != lift_->total_vertices())
      throw std::logic_error("spanning cycle has wrong length");
    auto res = verify_hamilton_cycle(*lift_, cycle_);
    if (!res.ok)
      throw std::logic_error("internal verification failed: " + res.reason);
    rep_.verified = true;
  }

  const BaseGraph& base_;
  Thresholds th_;
  std::unique_ptr<LiftState> lift_;
  std::vector<char> fresh_mark_;         // per-phase reveal snapshot
  std::vector<LiftVertex> fresh_list_;
  std::vector<int> location_;  // vid -> remaining-cycle index, or -1
  std::vector<std::vector<LiftVertex>> remaining_;
  int mass_ = 0;  // total vertices on remaining cycles
  std::vector<LiftVertex> cycle_;
  RotationPath path_;
  TrialReport rep_;
  int phase_ = 1;
  std::int64_t budget_ = 0;
  std::uint64_t replayed_rotations_ = 0;  // reconstruction replays (not budgeted)
  std::map<std::tuple<int, int, bool>, std::optional<AltPath>> alt_cache_;
};

/// Runs one seeded trial: up to max_restarts+1 attempts, each with a fresh
/// lift (partial reveals are never reused across restarts). On success the
/// cycle is verified internally before being reported; failures are data.
inline TrialReport run(const BaseGraph& base, int n, Thresholds th,
                       std::uint64_t seed) {
  th.clamp(n);
  TrialReport rep;
  rep.seed = seed;
  rep.n = n;
  std::string reasons;
  std::array<std::int64_t, 7> micros_acc{};
  for (int attempt = 0; attempt <= th.max_restarts; ++attempt) {
    SearchState state(base, n, th, mix_seed(seed, static_cast<std::uint64_t>(attempt)));
    try {
      auto cycle = state.run_attempt();
      rep = state.report();
      rep.seed = seed;
      rep.n = n;
      rep.outcome = Outcome::Hamilton;
      rep.cycle = std::move(cycle);
      rep.restarts = attempt;
      rep.reveals = state.lift().reveal_count();
      rep.g1_reveals = state.lift().g1_reveal_count();
      rep.inactive_count = state.lift().inactive_count();
      for (std::size_t i = 0; i < 7; ++i) rep.phase_micros[i] += micros_acc[i];
      rep.restart_reasons = reasons;
      return rep;
    } catch (detail::RestartSignal& rs) {
      if (!reasons.empty()) reasons += ";";
      reasons += "p" + std::to_string(rs.phase) + ":" + rs.reason;
      rep = state.report();
      rep.seed = seed;
      rep.n = n;
      rep.outcome = Outcome::Failure;
      rep.cycle.clear();
      rep.restarts = attempt;
      rep.reveals = state.lift().reveal_count();
      rep.g1_reveals = state.lift().g1_reveal_count();
      rep.inactive_count = state.lift().inactive_count();
      for (std::size_t i = 0; i < 7; ++i) {
        micros_acc[i] += rep.phase_micros[i];
        rep.phase_micros[i] = micros_acc[i];
      }
      rep.restart_reasons = reasons;
    }
  }
  return rep;
}

inline TrialReport run(const BaseInstance& inst, int n, Thresholds th,
                       std::uint64_t seed) {
  BaseGraph base(inst);
  return run(base, n, th, seed);
}

}  // namespace hamlift

#endif  // HAMLIFT_FINDER_HPP
