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

#include <optional>

#include "lindlearn/model.hpp"

namespace lindlearn {

/**
 * The balanced weight-kappa Pauli set: all Paulis of weight exactly kappa
 * whose support letters lie in {X,Y,Z}, optionally with one designated
 * member excluded (the alternative-hypothesis set).
 */
struct BalancedPauliSet {
  unsigned n = 0;
  unsigned kappa = 0;
  std::vector<PauliString> members;      // lexicographic text order
  std::optional<PauliString> excluded;

  static BalancedPauliSet build(unsigned n, unsigned kappa,
                                std::optional<PauliString> excluded = std::nullopt);
  /** 3^kappa * C(n, kappa), before any exclusion. */
  static size_t full_count(unsigned n, unsigned kappa);
};

struct LowerBoundVariant {
  enum class Kind { Null, Alternative };
  Kind kind = Kind::Null;
  /** Alternative only; defaults to the lexicographically first member, which
   * keeps the construction non-vacuous for kappa < n. */
  std::optional<PauliString> excluded;
};

/** Unit diagonal Kossakowski over the balanced set; no Hamiltonian. */
Lindbladian build_lowerbound_lindbladian(unsigned n, unsigned kappa,
                                         const LowerBoundVariant& variant = {});

/** Count of members anticommuting with Q, by brute force. */
size_t n_anticommuting(const PauliString& q, const BalancedPauliSet& set);

/** The support-sum closed form
 * sum_r C(w,r) C(n-w, kappa-r) 3^{kappa-r} (3^r - (-1)^r)/2 with w = w(Q). */
size_t n_anticommuting_closed_form(const PauliString& q, unsigned n, unsigned kappa);

/** Uniform lower bound N* = (4/9) 3^kappa C(n-1, kappa-1). */
double n_star(unsigned n, unsigned kappa);

/** Exact decay <Q>_t / <Q>_0 = e^{-2 N_ac t} under the balanced-set model. */
double pauli_decay(const BalancedPauliSet& set, const PauliString& q, double t);

/** Threshold time t_0 = 9n(3n ln2 + 2) / (16 kappa M_kappa - 9n). */
double t0_kappa(unsigned n, unsigned kappa);

/** Product-Pauli-eigenstate input: per-qubit letter in {I,X,Y,Z} with a sign
 * (letter I means the maximally mixed qubit). */
struct ProductStateSpec {
  std::string letters;      // length n
  std::vector<int> signs;   // +-1 per qubit; ignored where letter is I

  /** <Q>_0 for the product state; 0 unless Q's letters match. */
  double correlator(const PauliString& q) const;
};

struct MixingCertificate {
  double l2_dist = 0.0;   // exact ||rho(t) - I/2^n||_2 via Pauli coefficients
  double l2_bound = 0.0;  // e^{-2 N* t}
  double l1_bound = 0.0;  // 2^{n/2} e^{-2 N* t}
};

/**
 * Exact Hilbert-Schmidt distance to the maximally mixed state under the
 * balanced-set evolution, with the analytic bounds.  Requires n <= 6 and
 * verifies l2_dist <= l2_bound.
 */
MixingCertificate mixing_certificate(const BalancedPauliSet& set, const ProductStateSpec& input,
                                     double t);

}  // namespace lindlearn
