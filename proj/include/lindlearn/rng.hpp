// Copyright 2026 The lindlearn Authors
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

#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>

namespace lindlearn {

// Deterministic splitmix64 stream. Hand-rolled so that seeded outputs are
// byte-identical across standard libraries; std:: distributions are not.
class RngStream {
 public:
  explicit RngStream(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /** Uniform double in [0, 1). */
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /** Uniform double in [-bound, bound]. */
  double uniform_symmetric(double bound) { return bound * (2.0 * uniform() - 1.0); }

  /** Uniform integer in [0, m). */
  uint64_t uniform_int(uint64_t m) { return next_u64() % m; }

  /** Standard normal via Box-Muller. */
  double gaussian() {
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  template <typename Vec>
  void shuffle(Vec& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  uint64_t state_;
};

/** FNV-1a over raw bytes; used to derive per-query substream keys. */
inline uint64_t hash_combine(uint64_t h, uint64_t v) {
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

inline uint64_t hash_double_bits(double x) {
  uint64_t bits;
  std::memcpy(&bits, &x, sizeof(bits));
  return bits;
}

/**
 * Derive a deterministic per-query stream from (seed, t, probe id). Queries
 * therefore do not depend on evaluation order, so parallel execution
 * reproduces serial results exactly.
 */
inline RngStream derive_stream(uint64_t seed, double t, uint64_t probe_id, uint64_t salt = 0) {
  uint64_t h = 0xcbf29ce484222325ULL;
  h = hash_combine(h, seed);
  h = hash_combine(h, hash_double_bits(t));
  h = hash_combine(h, probe_id);
  h = hash_combine(h, salt);
  return RngStream(h);
}

}  // namespace lindlearn
