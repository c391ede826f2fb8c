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

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lindlearn/pauli.hpp"

namespace lindlearn {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

/**
 * A Pauli-basis Lindbladian: Hamiltonian coefficients h_i over ham_terms and
 * a Hermitian PSD Kossakowski matrix over the ordered dissipator support
 * list.  Immutable after validation; safe to share across threads.
 */
struct Lindbladian {
  unsigned n = 0;
  std::vector<std::pair<PauliString, double>> ham_terms;  // (P_i, h_i)
  std::vector<PauliString> diss_support;                  // S_D, ordered
  CMatrix kossakowski;                                    // over diss_support indices

  /** Rescale all coefficients so that max(|h_i|, |a_ij|) = 1. */
  Lindbladian rescaled() const;
};

struct SparsityReport {
  size_t m_h = 0;    // |S_H|
  size_t m_d = 0;    // |S_D|
  size_t m = 0;      // M = M_H + M_D^2
  double eta = 0.0;  // min nonzero |coefficient|
};

/**
 * Checks all model invariants and reports sparsity.  Throws
 * IdentityTermPresentError, NonHermitianKossakowskiError, NotPSDError or
 * NotNormalizedError on violations.  Hermiticity tolerance 1e-12, PSD
 * eigenvalue tolerance -1e-10, zero threshold 1e-14.
 */
SparsityReport validate(const Lindbladian& model);

/** A Hamiltonian or dissipative Pauli component of the adjoint generator. */
struct LindbladComponent {
  enum class Kind { Hamiltonian, Dissipative };
  Kind kind;
  PauliString p_k;
  PauliString p_m;  // Dissipative only; equal to p_k otherwise
  Patch support;

  static LindbladComponent hamiltonian(const PauliString& p) {
    return {Kind::Hamiltonian, p, p, Patch::support_of(p)};
  }
  static LindbladComponent dissipative(const PauliString& pk, const PauliString& pm) {
    return {Kind::Dissipative, pk, pm, Patch::support_of(pk).united(Patch::support_of(pm))};
  }
};

/** Components with nonzero coefficients of a validated model. */
std::vector<LindbladComponent> components_of(const Lindbladian& model);

struct DualGraph {
  std::vector<LindbladComponent> vertices;
  std::vector<std::pair<size_t, size_t>> adjacency;
  unsigned max_degree = 0;  // the smoothness degree of the generator
};

/** Edge iff supports intersect and vertices are distinct. */
DualGraph dual_graph(const std::vector<LindbladComponent>& components);

/**
 * Dual degree of the graph induced by candidate structures: one Hamiltonian
 * component per element of s_h_hat and one dissipative component per ordered
 * pair of s_d_hat.  Upper bounds the true degree when the candidates cover
 * the true supports.
 */
unsigned candidate_dual_degree(const std::vector<PauliString>& s_h_hat,
                               const std::vector<PauliString>& s_d_hat);

/**
 * Smoothness scale Lambda = Delta(H) + 2 sum |a_mn|, with the spectral range
 * Delta(H) computed exactly by dense eigensolve for n <= 10 and replaced by
 * the bound 2 sum |h_k| beyond.  Always <= 2M.
 */
double lambda_bound(const Lindbladian& model);

/** JSON model file round-trip. The loader validates unless told otherwise. */
Lindbladian load_model_json(const std::string& path, bool rescale = false);
void save_model_json(const Lindbladian& model, const std::string& path);
Lindbladian model_from_json_text(const std::string& text, bool rescale = false);
std::string model_to_json_text(const Lindbladian& model);

}  // namespace lindlearn
