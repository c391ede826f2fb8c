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

#include "lindlearn/lowerbound.hpp"

#include <algorithm>
#include <cmath>

namespace lindlearn {

namespace {
double binomial(unsigned n, unsigned k) {
  if (k > n) return 0.0;
  double acc = 1.0;
  for (unsigned i = 0; i < k; ++i) acc = acc * (n - i) / (i + 1);
  return acc;
}
}  // namespace

size_t BalancedPauliSet::full_count(unsigned n, unsigned kappa) {
  return static_cast<size_t>(std::llround(std::pow(3.0, kappa) * binomial(n, kappa)));
}

BalancedPauliSet BalancedPauliSet::build(unsigned n, unsigned kappa,
                                         std::optional<PauliString> excluded) {
  if (kappa < 2 || kappa > n) throw KappaOutOfRangeError("need 2 <= kappa <= n");
  BalancedPauliSet set;
  set.n = n;
  set.kappa = kappa;
  set.excluded = excluded;
  for (const auto& p : enumerate_patch_paulis(Patch((uint64_t{1} << n) - 1), n)) {
    if (p.weight() != kappa) continue;
    if (excluded && p == *excluded) continue;
    set.members.push_back(p);
  }
  return set;
}

Lindbladian build_lowerbound_lindbladian(unsigned n, unsigned kappa,
                                         const LowerBoundVariant& variant) {
  std::optional<PauliString> excluded;
  if (variant.kind == LowerBoundVariant::Kind::Alternative) {
    if (variant.excluded) {
      excluded = variant.excluded;
    } else {
      BalancedPauliSet full = BalancedPauliSet::build(n, kappa);
      excluded = full.members.front();
    }
  }
  BalancedPauliSet set = BalancedPauliSet::build(n, kappa, excluded);
  Lindbladian model;
  model.n = n;
  model.diss_support = set.members;
  model.kossakowski = CMatrix::Identity(static_cast<Eigen::Index>(set.members.size()),
                                        static_cast<Eigen::Index>(set.members.size()));
  return model;
}

size_t n_anticommuting(const PauliString& q, const BalancedPauliSet& set) {
  if (q.is_identity()) throw IdentityInputError("Q must be a non-identity Pauli");
  size_t count = 0;
  for (const auto& p : set.members)
    if (!commutes(p, q)) ++count;
  return count;
}

size_t n_anticommuting_closed_form(const PauliString& q, unsigned n, unsigned kappa) {
  if (q.is_identity()) throw IdentityInputError("Q must be a non-identity Pauli");
  unsigned w = q.weight();
  double acc = 0.0;
  for (unsigned r = 1; r <= std::min(w, kappa); ++r) {
    double supports = binomial(w, r) * binomial(n - w, kappa - r);
    double sign = (r % 2 == 0) ? 1.0 : -1.0;
    acc += supports * std::pow(3.0, kappa - r) * (std::pow(3.0, r) - sign) / 2.0;
  }
  return static_cast<size_t>(std::llround(acc));
}

double n_star(unsigned n, unsigned kappa) {
  return 4.0 / 9.0 * std::pow(3.0, kappa) * binomial(n - 1, kappa - 1);
}

double pauli_decay(const BalancedPauliSet& set, const PauliString& q, double t) {
  return std::exp(-2.0 * static_cast<double>(n_anticommuting(q, set)) * t);
}

double t0_kappa(unsigned n, unsigned kappa) {
  if (kappa < 2 || kappa > n) throw KappaOutOfRangeError("need 2 <= kappa <= n");
  double m_kappa = static_cast<double>(BalancedPauliSet::full_count(n, kappa));
  double nn = static_cast<double>(n);
  return 9.0 * nn * (3.0 * nn * std::log(2.0) + 2.0) / (16.0 * kappa * m_kappa - 9.0 * nn);
}

double ProductStateSpec::correlator(const PauliString& q) const {
  double v = 1.0;
  for (unsigned i = 0; i < q.n(); ++i) {
    char lq = q.letter(i);
    if (lq == 'I') continue;
    if (letters[i] != lq) return 0.0;
    v *= signs[i];
  }
  return v;
}

MixingCertificate mixing_certificate(const BalancedPauliSet& set, const ProductStateSpec& input,
                                     double t) {
  unsigned n = set.n;
  if (n > 6) throw CapExceededError("exact l2 mixing certificate runs at n <= 6");
  if (input.letters.size() != n || input.signs.size() != n)
    throw SizeMismatchError("input state spec does not match n");

  // These generators act diagonally in the Pauli coefficient basis, so the
  // Hilbert-Schmidt distance is a plain weighted sum over Q != I.
  double sum_sq = 0.0;
  for (uint64_t code = 1; code < (uint64_t{1} << (2 * n)); ++code) {
    PauliString q = PauliString::from_code(n, code);
    double c0 = input.correlator(q);
    if (c0 == 0.0) continue;
    double ct = c0 * pauli_decay(set, q, t);
    sum_sq += ct * ct;
  }
  MixingCertificate cert;
  cert.l2_dist = std::sqrt(sum_sq / std::ldexp(1.0, static_cast<int>(n)));
  // Excluding one member can lower the worst-case anticommuting count by 1.
  double ns = n_star(n, set.kappa) - (set.excluded ? 1.0 : 0.0);
  cert.l2_bound = std::exp(-2.0 * ns * t);
  cert.l1_bound = std::ldexp(1.0, static_cast<int>(n) / 2) *
                  std::pow(2.0, (n % 2) * 0.5) * cert.l2_bound;
  if (cert.l2_dist > cert.l2_bound * (1.0 + 1e-9) + 1e-12)
    throw NumericError("l2 mixing distance exceeds the analytic bound");
  return cert;
}

}  // namespace lindlearn
