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

#include <string>

#include "lindlearn/coefficients.hpp"
#include "lindlearn/structure.hpp"

namespace lindlearn {

/**
 * Candidate family for the conditioning experiments on an Lx x Ly periodic
 * lattice: all single-qubit Paulis plus all two-qubit Paulis on nearest,
 * next-nearest and next-next-nearest neighbour pairs in both S_H and S_D,
 * Theta(n) random nonlocal 3- and 4-local terms in S_H, and off-diagonal
 * dissipator pairs tracked over single-qubit Paulis only (covering arbitrary
 * collective jump operators).
 */
struct LatticeCandidates {
  unsigned n = 0;
  std::vector<PauliString> s_h_hat;
  std::vector<PauliString> s_d_hat;
  ParameterIndex index;  // restricted off-diagonal pairs
};

LatticeCandidates lattice_candidate_family(unsigned lx, unsigned ly, uint64_t seed);

struct ConditionSweepRow {
  unsigned n = 0;
  uint64_t seed = 0;
  double nu = 0.0;
  size_t m_hat = 0;
  size_t attempts = 0;
  size_t prepass_rank_misses = 0;
  std::vector<std::pair<size_t, size_t>> rank_trace;
};

/** One lattice seed: build candidates, select probes, record nu and trace. */
ConditionSweepRow run_condition_seed(unsigned lx, unsigned ly, uint64_t seed);

/** Whole sweep over lattice shapes x seeds, fanned out over threads;
 * results are ordered by (n, seed) regardless of scheduling. */
std::vector<ConditionSweepRow> run_condition_sweep(
    const std::vector<std::pair<unsigned, unsigned>>& shapes, unsigned seeds_per_shape,
    unsigned threads);

/**
 * Seeded random Lindbladian for self-tests: n in [1, max_n], up to three
 * Hamiltonian and two dissipator terms, coefficient magnitudes in
 * [eta_min, 1], Kossakowski built from random eigenvectors with eigenvalues
 * in [eta_min, 1] so every diagonal entry is at least eta_min.
 */
Lindbladian random_model(uint64_t seed, unsigned max_n = 3, double eta_min = 0.2);

/** True structures of a model (nonzero h terms / diagonal Kossakowski). */
std::vector<PauliString> true_s_h(const Lindbladian& model);
std::vector<PauliString> true_s_d(const Lindbladian& model);

struct EndToEndReport {
  StructureResult structure;
  CoefficientEstimate coefficients;
  double max_h_error = 0.0;
  double max_a_error = 0.0;
  uint64_t total_queries = 0;
  double wall_seconds = 0.0;
  std::vector<PauliString> pruned;  // candidates dropped by the eta/2 filter
};

/** Structure learning, coefficient learning, threshold pruning at eta/2 and
 * comparison against the ground-truth model. */
EndToEndReport run_end_to_end(const ChannelOracle& oracle, const StructureOptions& sopts,
                              const LearnCoefficientsOptions& copts);

/** Deterministic short-format doubles for CSV output. */
std::string format_double(double v);

}  // namespace lindlearn
