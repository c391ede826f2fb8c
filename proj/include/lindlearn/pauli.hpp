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

#include <bit>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "lindlearn/errors.hpp"

namespace lindlearn {

/**
 * An n-qubit Pauli string in the symplectic bit-pair representation: qubit q
 * carries the letter encoded by (x_bit, z_bit) with I=(0,0), X=(1,0),
 * Z=(0,1), Y=(1,1).  The Hermitian operator is prod_q i^{x_q z_q} X^x Z^z.
 * Immutable value type; at most 64 qubits.
 */
class PauliString {
 public:
  PauliString() = default;
  PauliString(unsigned n, uint64_t x_bits, uint64_t z_bits) : n_(n), x_(x_bits), z_(z_bits) {
    if (n > 64) throw InvalidInputError("PauliString supports at most 64 qubits");
    if (n < 64) {
      uint64_t mask = (n == 0) ? 0 : ((uint64_t{1} << n) - 1);
      x_ &= mask;
      z_ &= mask;
    }
  }

  /** Identity on n qubits. */
  static PauliString identity(unsigned n) { return PauliString(n, 0, 0); }

  /** Parse canonical text form, qubit 0 leftmost. Accepts only {I,X,Y,Z}. */
  static PauliString from_text(const std::string& text);

  /**
   * Decode the 2n-bit integer with per-qubit 2-bit code I=00, X=01, Z=10,
   * Y=11, qubit 0 least significant.  This is the index convention of the
   * symplectic Walsh-Hadamard transform.
   */
  static PauliString from_code(unsigned n, uint64_t code);

  unsigned n() const { return n_; }
  uint64_t x_bits() const { return x_; }
  uint64_t z_bits() const { return z_; }

  bool is_identity() const { return x_ == 0 && z_ == 0; }
  unsigned weight() const { return static_cast<unsigned>(std::popcount(x_ | z_)); }
  uint64_t support_mask() const { return x_ | z_; }

  /** Per-qubit letter as a character in {I,X,Y,Z}. */
  char letter(unsigned q) const {
    bool x = (x_ >> q) & 1, z = (z_ >> q) & 1;
    return x ? (z ? 'Y' : 'X') : (z ? 'Z' : 'I');
  }

  std::string text() const {
    std::string s(n_, 'I');
    for (unsigned q = 0; q < n_; ++q) s[q] = letter(q);
    return s;
  }

  uint64_t code() const {
    uint64_t c = 0;
    for (unsigned q = 0; q < n_; ++q) {
      c |= (((x_ >> q) & 1) | (((z_ >> q) & 1) << 1)) << (2 * q);
    }
    return c;
  }

  friend bool operator==(const PauliString& a, const PauliString& b) {
    return a.n_ == b.n_ && a.x_ == b.x_ && a.z_ == b.z_;
  }
  friend bool operator!=(const PauliString& a, const PauliString& b) { return !(a == b); }
  /** Orders by text form (I < X < Y < Z, qubit 0 most significant). */
  friend bool operator<(const PauliString& a, const PauliString& b);

 private:
  unsigned n_ = 0;
  uint64_t x_ = 0;
  uint64_t z_ = 0;
};

struct PauliHash {
  size_t operator()(const PauliString& p) const {
    uint64_t h = 0xcbf29ce484222325ULL ^ p.n();
    h = (h ^ p.x_bits()) * 0x100000001b3ULL;
    h = (h ^ p.z_bits()) * 0x100000001b3ULL;
    return static_cast<size_t>(h);
  }
};

/** A Pauli string together with a phase i^phase_pow, phase_pow mod 4. */
struct PhasedPauli {
  PauliString pauli;
  int phase_pow = 0;  // product phase is i^phase_pow

  PhasedPauli() = default;
  PhasedPauli(PauliString p, int pow) : pauli(std::move(p)), phase_pow(((pow % 4) + 4) % 4) {}

  std::complex<double> phase() const {
    static const std::complex<double> table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return table[phase_pow];
  }
  bool is_hermitian() const { return phase_pow == 0 || phase_pow == 2; }
  /** +1 or -1; requires a Hermitian phase. */
  int sign() const {
    if (!is_hermitian()) throw InvalidInputError("phase is not real");
    return phase_pow == 0 ? 1 : -1;
  }
};

/** Exact product a*b with the accumulated i-power phase. */
PhasedPauli multiply(const PhasedPauli& a, const PhasedPauli& b);
PhasedPauli multiply(const PauliString& a, const PauliString& b);

/** Symplectic inner product mod 2: 0 if the strings commute, 1 otherwise. */
int symplectic_product(const PauliString& a, const PauliString& b);
bool commutes(const PauliString& a, const PauliString& b);

/** A subset of qubit sites, stored as a bitmask. */
class Patch {
 public:
  Patch() = default;
  explicit Patch(uint64_t mask) : mask_(mask) {}
  static Patch from_sites(const std::vector<unsigned>& sites) {
    uint64_t m = 0;
    for (unsigned s : sites) m |= uint64_t{1} << s;
    return Patch(m);
  }
  static Patch support_of(const PauliString& p) { return Patch(p.support_mask()); }

  uint64_t mask() const { return mask_; }
  unsigned size() const { return static_cast<unsigned>(std::popcount(mask_)); }
  bool contains(const Patch& other) const { return (other.mask_ & ~mask_) == 0; }
  bool intersects(const Patch& other) const { return (mask_ & other.mask_) != 0; }
  Patch united(const Patch& other) const { return Patch(mask_ | other.mask_); }
  std::vector<unsigned> sites() const {
    std::vector<unsigned> out;
    for (unsigned q = 0; q < 64; ++q)
      if ((mask_ >> q) & 1) out.push_back(q);
    return out;
  }

  friend bool operator==(const Patch& a, const Patch& b) { return a.mask_ == b.mask_; }
  friend bool operator<(const Patch& a, const Patch& b) { return a.mask_ < b.mask_; }

 private:
  uint64_t mask_ = 0;
};

/**
 * All 4^|T| Pauli strings supported inside the patch, in lexicographic text
 * order (I < X < Y < Z, qubit 0 leftmost).
 */
std::vector<PauliString> enumerate_patch_paulis(const Patch& patch, unsigned n);

}  // namespace lindlearn
