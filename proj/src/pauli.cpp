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

#include "lindlearn/pauli.hpp"

namespace lindlearn {

PauliString PauliString::from_text(const std::string& text) {
  if (text.size() > 64) throw InvalidInputError("Pauli text longer than 64 qubits");
  uint64_t x = 0, z = 0;
  for (size_t q = 0; q < text.size(); ++q) {
    switch (text[q]) {
      case 'I':
        break;
      case 'X':
        x |= uint64_t{1} << q;
        break;
      case 'Y':
        x |= uint64_t{1} << q;
        z |= uint64_t{1} << q;
        break;
      case 'Z':
        z |= uint64_t{1} << q;
        break;
      default:
        // Lowercase is rejected deliberately to avoid silent aliasing.
        throw InvalidInputError("invalid Pauli character '" + std::string(1, text[q]) +
                                "' in \"" + text + "\" (only I, X, Y, Z)");
    }
  }
  return PauliString(static_cast<unsigned>(text.size()), x, z);
}

PauliString PauliString::from_code(unsigned n, uint64_t code) {
  uint64_t x = 0, z = 0;
  for (unsigned q = 0; q < n; ++q) {
    uint64_t c = (code >> (2 * q)) & 3;
    x |= (c & 1) << q;
    z |= ((c >> 1) & 1) << q;
  }
  return PauliString(n, x, z);
}

bool operator<(const PauliString& a, const PauliString& b) {
  if (a.n_ != b.n_) return a.n_ < b.n_;
  for (unsigned q = 0; q < a.n_; ++q) {
    char la = a.letter(q), lb = b.letter(q);
    if (la != lb) return la < lb;
  }
  return false;
}

PhasedPauli multiply(const PhasedPauli& a, const PhasedPauli& b) {
  const PauliString &p = a.pauli, &q = b.pauli;
  if (p.n() != q.n()) throw SizeMismatchError("Pauli size mismatch in multiply");
  uint64_t xr = p.x_bits() ^ q.x_bits();
  uint64_t zr = p.z_bits() ^ q.z_bits();
  // Write each string as i^{#Y} X^x Z^z; commuting X^{x_b} past Z^{z_a}
  // contributes (-1)^{|z_a & x_b|}.
  int mu_a = std::popcount(p.x_bits() & p.z_bits());
  int mu_b = std::popcount(q.x_bits() & q.z_bits());
  int mu_r = std::popcount(xr & zr);
  int pow = a.phase_pow + b.phase_pow + mu_a + mu_b - mu_r +
            2 * std::popcount(p.z_bits() & q.x_bits());
  return PhasedPauli(PauliString(p.n(), xr, zr), pow);
}

PhasedPauli multiply(const PauliString& a, const PauliString& b) {
  return multiply(PhasedPauli(a, 0), PhasedPauli(b, 0));
}

int symplectic_product(const PauliString& a, const PauliString& b) {
  if (a.n() != b.n()) throw SizeMismatchError("Pauli size mismatch in symplectic_product");
  return (std::popcount(a.x_bits() & b.z_bits()) + std::popcount(a.z_bits() & b.x_bits())) & 1;
}

bool commutes(const PauliString& a, const PauliString& b) {
  return symplectic_product(a, b) == 0;
}

std::vector<PauliString> enumerate_patch_paulis(const Patch& patch, unsigned n) {
  if (patch.mask() >> n) throw InvalidInputError("patch sites outside [0, n)");
  std::vector<unsigned> sites = patch.sites();
  // Letter rank I<X<Y<Z with qubit 0 most significant gives text order.
  const char letters[4] = {'I', 'X', 'Y', 'Z'};
  size_t count = size_t{1} << (2 * sites.size());
  std::vector<PauliString> out;
  out.reserve(count);
  for (size_t idx = 0; idx < count; ++idx) {
    uint64_t x = 0, z = 0;
    size_t rest = idx;
    for (size_t pos = 0; pos < sites.size(); ++pos) {
      // most significant digit selects the smallest-index site
      size_t shift = 2 * (sites.size() - 1 - pos);
      char l = letters[(rest >> shift) & 3];
      unsigned q = sites[pos];
      if (l == 'X' || l == 'Y') x |= uint64_t{1} << q;
      if (l == 'Z' || l == 'Y') z |= uint64_t{1} << q;
    }
    out.emplace_back(n, x, z);
  }
  return out;
}

}  // namespace lindlearn
