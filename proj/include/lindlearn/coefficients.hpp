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

#include <set>

#include "lindlearn/chebyshev.hpp"
#include "lindlearn/evolution.hpp"

namespace lindlearn {

/**
 * Ordered real-parameter blocks of the linear system:
 * x = h (+) a_diag (+) a_Re (+) a_Im, with the off-diagonal blocks running
 * over tracked ordered pairs (i, j), j < i, of the dissipator candidate list.
 * The full index tracks all pairs; restricted indices (used by the
 * conditioning experiments) may track a subset.
 */
struct ParameterIndex {
  std::vector<PauliString> h_terms;                // candidate S_H order
  std::vector<PauliString> d_terms;                // candidate S_D order
  std::vector<std::pair<size_t, size_t>> pairs;    // (i, j) with j < i into d_terms

  static ParameterIndex full(const std::vector<PauliString>& s_h_hat,
                             const std::vector<PauliString>& s_d_hat);

  size_t dim() const { return h_terms.size() + d_terms.size() + 2 * pairs.size(); }
  size_t offset_adiag() const { return h_terms.size(); }
  size_t offset_are() const { return h_terms.size() + d_terms.size(); }
  size_t offset_aim() const { return offset_are() + pairs.size(); }
};

struct Probe {
  ProbeInput input;
  PauliString observable;
  Patch patch;
};

/** Patch family {supp(P) : P in S_H} and pairwise unions over S_D. */
std::set<Patch> patch_family(const std::vector<PauliString>& s_h_hat,
                             const std::vector<PauliString>& s_d_hat);

/**
 * Exact design row of a probe: entries are the integer-valued Pauli-algebra
 * traces tr(i[P_i,O] X) and tr(P_j O P_i X) - 1/2 tr({P_j P_i, O} X),
 * collapsed by the 2^{-n} input normalization and split into real blocks
 * (2 Re, -2 Im factors on the off-diagonal pairs).
 */
std::vector<double> design_row(const Probe& probe, const ParameterIndex& index);

/**
 * One probe per candidate Hamiltonian term P: observable O on supp(P)
 * anticommuting with P (first support site's letter flipped cyclically
 * X->Y->Z->X), input the +1 eigenstate of Q = iOP with the phase absorbed
 * into the eigenstate sign.  In the absence of dissipation each probe's
 * derivative is -2 h_P.
 */
std::vector<Probe> hamiltonian_prepass(const std::vector<PauliString>& s_h_hat, unsigned n,
                                       bool as_pauli_input = false);

struct DesignSystem {
  std::vector<Probe> probes;             // the selected rank-increasing probes
  Eigen::MatrixXd matrix;                // square M-hat x M-hat
  ParameterIndex param_index;
  double nu = 0.0;                       // ||C^{-1}||_{inf->inf}
  std::vector<std::pair<size_t, size_t>> rank_trace;  // (attempt #, rank)
  size_t attempts = 0;
  size_t prepass_rank_misses = 0;        // pre-pass probes that did not add rank
};

struct SelectOptions {
  uint64_t seed = 0;
  /** Acquire every probe in Pauli-input form (exact product SPAM damping). */
  bool pauli_input_only = false;
  bool compute_nu = true;
};

/**
 * Classical probe selection: Hamiltonian pre-pass first, then a budgeted
 * round-robin over (patch, locality-bucket) in increasing locality, keeping
 * only rank-increasing probes until rank M-hat.  Rank is tracked by
 * incremental Gaussian elimination with pivot threshold 1e-9 relative to the
 * largest entry seen.  Throws RankStalledError when every patch-supported
 * probe is exhausted below full rank.
 */
DesignSystem select_probes(const ParameterIndex& index, unsigned n, const SelectOptions& opts);
DesignSystem select_probes(const std::vector<PauliString>& s_h_hat,
                           const std::vector<PauliString>& s_d_hat, unsigned n,
                           const SelectOptions& opts = {});

/** Max absolute row sum of C^{-1}, via LU solves. Throws SingularError. */
double conditioning_factor(const Eigen::MatrixXd& c);

/** Chebyshev-fitted d/dt at 0 of the probe expectation trace. */
double estimate_probe_derivative(const ChannelOracle& oracle, const Probe& probe,
                                 const ChebyshevSchedule& schedule, double delta_s);

/**
 * Removes the known SPAM damping r_prep^{w(Q)} r_meas^{w(O)} from measured
 * probe data.  The factor matches the composed preparation-evolution-
 * measurement channel for Pauli-input probes (verified against the dense
 * sandwich oracle).
 */
double spam_rescale(double raw, const Probe& probe, double r_prep, double r_meas);

enum class AcquisitionMode { ProbeByProbe, Shadow };

/**
 * Simplified shadow process tomography: random product Pauli eigenstate
 * inputs, random per-qubit measurement bases, per-pair inverse-weight
 * 3^{w(O)+w(Q)} estimators, median of means over ceil(8 ln(2 #probes /
 * delta_s)) groups.  All estimates land within eps_s simultaneously with
 * probability >= 1 - delta_s.  Requires probe locality <= locality_cap.
 */
std::vector<double> shadow_estimate_all(const ChannelOracle& oracle,
                                        const std::vector<Probe>& probes, double t, double eps_s,
                                        double delta_s, uint64_t seed = 0,
                                        unsigned locality_cap = 4);

struct CoefficientEstimate {
  std::unordered_map<PauliString, double, PauliHash> h_hat;
  std::vector<PauliString> d_terms;  // row/column order of a_hat
  CMatrix a_hat;                     // Hermitian by construction
  double residual = 0.0;             // max-norm of C x - d
  double deriv_accuracy = 0.0;       // eps_d used
  double nu = 0.0;
  size_t probes_used = 0;
  uint64_t queries_used = 0;
  std::vector<std::pair<size_t, size_t>> rank_trace;
};

struct LearnCoefficientsOptions {
  double eps = 0.05;
  double delta = 0.05;
  AcquisitionMode mode = AcquisitionMode::ProbeByProbe;
  uint64_t seed = 0;
  size_t oversample = 0;      // extra probes; solves by normal equations
  double eps_d_floor = 1e-9;  // guards against degenerate nu
  unsigned threads = 1;
  unsigned locality_cap = 4;  // shadow mode only
};

/**
 * End-to-end coefficient learning: selects probes, computes the conditioning
 * factor, schedules derivative estimation at eps_d = eps / nu with the
 * factorial-bound parameters at Lambda = 2 * candidate dual degree (falling
 * back to 2 M-hat when the candidate graph is degenerate), acquires the
 * derivative data, rescales SPAM damping when the oracle is wrapped, and
 * solves the square system.
 */
CoefficientEstimate learn_coefficients(const ChannelOracle& oracle,
                                       const std::vector<PauliString>& s_h_hat,
                                       const std::vector<PauliString>& s_d_hat,
                                       const LearnCoefficientsOptions& opts = {});

/** Shot-free exact design data for a probe (test oracle). */
double exact_probe_derivative(const Lindbladian& model, const Probe& probe);

}  // namespace lindlearn
