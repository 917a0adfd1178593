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

#ifndef HAMLIFT_RNG_HPP
#define HAMLIFT_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace hamlift {

/// Mixes two 64-bit values into one (splitmix64 finalizer). Used to derive
/// per-trial and per-restart seeds from a base seed so that batches are
/// reproducible and parallelizable.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seeded deterministic random stream. One stream per trial; all draws the
/// trial makes (matching reveals, tie-breaking) come from it. Bounded draws
/// use rejection sampling on raw engine output rather than
/// std::uniform_int_distribution, whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform draw from {0, 1, ..., bound-1}. bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    // Rejection sampling: top of the largest multiple of `bound` that fits.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  int index(std::size_t size) { return static_cast<int>(below(size)); }

  /// Fisher-Yates shuffle, deterministic for a given stream state.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(below(v.size()))];
  }

  /// Derives an independent child stream; `tag` distinguishes siblings.
  Rng derive(std::uint64_t tag) { return Rng(mix_seed(engine_(), tag)); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hamlift

#endif  // HAMLIFT_RNG_HPP
