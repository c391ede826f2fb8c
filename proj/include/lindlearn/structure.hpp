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

#include <map>
#include <set>

#include "lindlearn/chebyshev.hpp"
#include "lindlearn/evolution.hpp"

namespace lindlearn {

struct StructureResult {
  std::set<PauliString> s_d_hat;
  std::set<PauliString> s_h_hat;  // always a superset of s_d_hat
  std::map<PauliString, double> chi_deriv1;
  std::map<PauliString, double> chi_deriv2;
  uint64_t queries_used = 0;
  ChebyshevSchedule schedule;  // the second-derivative schedule when both ran
};

struct StructureOptions {
  size_t sparsity_m = 1;   // sparsity bound M used when no Lambda is given
  double eta = 0.1;        // resolution threshold
  double delta = 0.05;     // total failure probability
  double lambda = 0.0;     // smoothness scale; <= 0 means use 2M
};

/**
 * Dissipator structure learning: schedules chi-rate queries at the
 * first-derivative parameters for target accuracy eta/2 and keeps every
 * Pauli whose fitted first derivative exceeds eta/2 (strict).
 */
StructureResult learn_dissipator(const ChannelOracle& oracle, const StructureOptions& opts);

/**
 * Hamiltonian structure learning: second-derivative schedule at accuracy
 * eta^2; keeps Paulis with fitted second derivative > eta^2 or first
 * derivative > eta/2.  The output may contain false positives from
 * second-order dissipative couplings; those are pruned downstream.
 */
StructureResult learn_hamiltonian(const ChannelOracle& oracle, const StructureOptions& opts);

/** Runs both algorithms (delta split evenly) and unions the results so that
 * s_d_hat is contained in s_h_hat. */
StructureResult learn_structure(const ChannelOracle& oracle, const StructureOptions& opts);

/** Per-Pauli report of the short-time derivative identities. */
struct ChiIdentityReport {
  struct Row {
    PauliString pauli;
    double a_ii;        // diagonal Kossakowski entry (0 if absent)
    double h_i;         // Hamiltonian coefficient (0 if absent)
    double fitted_d1;
    double fitted_d2;
  };
  std::vector<Row> rows;
  double max_d1_error = 0.0;       // max |fitted_d1 - a_ii| over a_ii > 0
  double max_d1_zero = 0.0;        // max |fitted_d1| over a_ii = 0
  double min_d2_slack = 0.0;       // min (fitted_d2 - 2 h_i^2) over a_ii = 0
};

/**
 * Fits chi derivatives at t=0 from exact node values on tight schedules and
 * compares them with the generator coefficients: chi'_ii = a_ii when
 * a_ii > 0, and chi'_ii = 0, chi''_ii >= 2 h_i^2 when a_ii = 0.
 */
ChiIdentityReport chi_derivative_identities_check(const Lindbladian& model);

}  // namespace lindlearn
