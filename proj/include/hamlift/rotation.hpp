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

#ifndef HAMLIFT_ROTATION_HPP
#define HAMLIFT_ROTATION_HPP

#include <algorithm>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hamlift/lift.hpp"

namespace hamlift {

/// Ordered sequence of distinct lift vertices with a position index.
/// Rotations reverse a suffix in place (contiguous storage beats balanced
/// sequences at the path lengths this project runs). Paths read the LiftState
/// but never mutate it; revelation is the phase engine's job.
class RotationPath {
 public:
  RotationPath() = default;

  RotationPath(const LiftState& state, std::vector<LiftVertex> verts)
      : n_(state.n()),
        pos_(static_cast<std::size_t>(state.total_vertices()), -1),
        verts_(std::move(verts)) {
    for (std::size_t i = 0; i < verts_.size(); ++i) {
      auto& p = pos_[slot(verts_[i])];
      if (p != -1) throw std::logic_error("path vertices must be distinct");
      p = static_cast<std::int32_t>(i);
    }
  }

  int size() const { return static_cast<int>(verts_.size()); }
  bool empty() const { return verts_.empty(); }
  const std::vector<LiftVertex>& verts() const { return verts_; }
  LiftVertex at(int i) const { return verts_[static_cast<std::size_t>(i)]; }
  LiftVertex front() const { return verts_.front(); }
  LiftVertex back() const { return verts_.back(); }

  /// Position of v on the path, or -1.
  int position(LiftVertex v) const {
    if (pos_.empty()) return -1;
    return pos_[slot(v)];
  }
  bool contains(LiftVertex v) const { return position(v) >= 0; }

  /// Posa rotation at interior pivot position i (0-indexed, 1 <= i <= m-2
  /// where m is the last position): v0..vi vm vm-1..vi+1. The caller is
  /// responsible for {vm, vi} being a revealed lift edge. Self-inverse:
  /// rotating the result at the same position restores the original path.
  void rotate(int pivot) {
    const int m = size() - 1;
    if (pivot < 1 || pivot > m - 2) throw std::logic_error("pivot out of range");
    std::reverse(verts_.begin() + pivot + 1, verts_.end());
    for (int i = pivot + 1; i <= m; ++i)
      pos_[slot(verts_[static_cast<std::size_t>(i)])] = i;
  }

  void reverse() {
    std::reverse(verts_.begin(), verts_.end());
    for (std::size_t i = 0; i < verts_.size(); ++i)
      pos_[slot(verts_[i])] = static_cast<std::int32_t>(i);
  }

  void append(LiftVertex v) {
    auto& p = pos_[slot(v)];
    if (p != -1) throw std::logic_error("append would duplicate a vertex");
    p = static_cast<std::int32_t>(verts_.size());
    verts_.push_back(v);
  }

  std::string pretty() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < verts_.size(); ++i)
      os << (i ? " " : "") << verts_[i];
    return os.str();
  }

 private:
  std::size_t slot(LiftVertex v) const {
    return static_cast<std::size_t>(v.base) * static_cast<std::size_t>(n_) +
           static_cast<std::size_t>(v.fiber);
  }

  int n_ = 0;
  std::vector<std::int32_t> pos_;
  std::vector<LiftVertex> verts_;
};

/// Value-returning forms of the two path transformations.
inline RotationPath rotate(const RotationPath& path, int pivot) {
  RotationPath out = path;
  out.rotate(pivot);
  return out;
}
inline RotationPath reverse(const RotationPath& path) {
  RotationPath out = path;
  out.reverse();
  return out;
}

/// Pivot positions i such that {vm, vi} is a revealed lift edge, the new end
/// v(i+1) would be active, and the pivot vi is at distance >= 2 from every
/// inactive vertex. `exclude` lets the engine evaluate activity as of just
/// before the reveals made at the current end (a freshly revealed pivot is
/// inactive by construction and would otherwise always reject itself).
inline std::vector<int> rotation_candidates(
    const RotationPath& path, const LiftState& state,
    std::span<const LiftVertex> exclude = {}) {
  std::vector<int> out;
  const int m = path.size() - 1;
  if (m < 3) return out;
  LiftVertex end = path.back();
  std::vector<LiftVertex> nbrs;
  state.revealed_neighbors(end, nbrs);
  for (LiftVertex w : nbrs) {
    int i = path.position(w);
    if (i < 1 || i > m - 2) continue;
    LiftVertex new_end = path.at(i + 1);
    if (!state.is_active(new_end)) continue;
    if (!state.clear_radius1(w, exclude)) continue;
    out.push_back(i);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Closes the path into a cycle when {v0, vm} is a revealed lift edge.
inline std::optional<std::vector<LiftVertex>> close_cycle(
    const RotationPath& path, const LiftState& state) {
  if (path.size() < 3) return std::nullopt;
  LiftVertex a = path.front(), b = path.back();
  if (state.base().edge_id(a.base, b.base) < 0) return std::nullopt;
  auto p = state.partner(a, b.base);
  if (!p || !(*p == b)) return std::nullopt;
  return path.verts();
}

/// Path validator: distinct vertices, every consecutive pair a revealed lift
/// edge. Returns the first violation, or nullopt when valid.
inline std::optional<std::string> validate_path(const LiftState& state,
                                                std::span<const LiftVertex> verts) {
  if (verts.empty()) return "empty path";
  std::vector<char> seen(static_cast<std::size_t>(state.total_vertices()), 0);
  for (LiftVertex v : verts) {
    if (v.base < 0 || v.base >= state.base().k() || v.fiber < 0 ||
        v.fiber >= state.n())
      return "vertex out of range";
    auto& s = seen[static_cast<std::size_t>(state.vid(v))];
    if (s) {
      std::ostringstream os;
      os << "repeated vertex " << v;
      return os.str();
    }
    s = 1;
  }
  for (std::size_t i = 0; i + 1 < verts.size(); ++i) {
    LiftVertex a = verts[i], b = verts[i + 1];
    if (state.base().edge_id(a.base, b.base) < 0) {
      std::ostringstream os;
      os << "pair " << a << " - " << b << " has no base edge";
      return os.str();
    }
    auto p = state.partner(a, b.base);
    if (!p || !(*p == b)) {
      std::ostringstream os;
      os << "pair " << a << " - " << b << " not a revealed lift edge";
      return os.str();
    }
  }
  return std::nullopt;
}

/// Cycle validator: a valid path whose wraparound pair is also revealed.
inline std::optional<std::string> validate_cycle(const LiftState& state,
                                                 std::span<const LiftVertex> verts) {
  if (verts.size() < 3) return "cycle needs at least 3 vertices";
  if (auto err = validate_path(state, verts)) return err;
  LiftVertex a = verts.back(), b = verts.front();
  if (state.base().edge_id(a.base, b.base) < 0)
    return "wraparound pair has no base edge";
  auto p = state.partner(a, b.base);
  if (!p || !(*p == b)) return "wraparound pair not a revealed lift edge";
  return std::nullopt;
}

}  // namespace hamlift

#endif  // HAMLIFT_ROTATION_HPP
