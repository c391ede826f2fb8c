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

#include "lindlearn/experiments.hpp"

#include <cmath>

#include "doctest.h"

using namespace lindlearn;

TEST_CASE("lattice candidate family shape at n = 4 (pinned regression values)") {
  LatticeCandidates fam = lattice_candidate_family(2, 2, 0);
  CHECK(fam.n == 4);
  // 12 single-qubit + 9 x 6 pair Paulis + Theta(n) nonlocal terms
  CHECK(fam.s_h_hat.size() == 72);
  CHECK(fam.s_d_hat.size() == 66);
  CHECK(fam.index.dim() == 270);

  // pinned on first computation
  CHECK(patch_family(fam.s_h_hat, fam.s_d_hat).size() == 15);
  CHECK(candidate_dual_degree(fam.s_h_hat, fam.s_d_hat) == 4427);
}

TEST_CASE("condition sweep seed run reaches full rank (pinned regression values)") {
  ConditionSweepRow row = run_condition_seed(2, 2, 0);
  CHECK(row.m_hat == 270);
  REQUIRE(!row.rank_trace.empty());
  CHECK(row.rank_trace.back().second == row.m_hat);
  CHECK(row.nu == doctest::Approx(3.1875).epsilon(1e-9));
  CHECK(row.attempts == 6100);
  // observed property of the pre-pass; warn rather than fail if it drifts
  WARN(row.prepass_rank_misses == 0);

  // the nu distribution across seeds has spread (recorded, not asserted)
  ConditionSweepRow other = run_condition_seed(2, 2, 1);
  MESSAGE("nu(seed 0) = ", row.nu, ", nu(seed 1) = ", other.nu);
}

TEST_CASE("end-to-end run on the dephasing model") {
  Lindbladian model;
  model.n = 1;
  model.diss_support = {PauliString::from_text("Z")};
  model.kossakowski = CMatrix::Constant(1, 1, 0.5);

  StructureOptions sopts;
  sopts.eta = 0.2;
  sopts.delta = 0.05;
  sopts.sparsity_m = 1;
  sopts.lambda = lambda_bound(model);
  LearnCoefficientsOptions copts;
  copts.eps = 0.05;

  ChannelOracle oracle(model);
  EndToEndReport rep = run_end_to_end(oracle, sopts, copts);
  CHECK(rep.max_h_error <= 1e-6);
  CHECK(rep.max_a_error <= 1e-6);
  CHECK(rep.total_queries > 0);
}

TEST_CASE("end-to-end with bounded noise meets eps and prunes false positives") {
  for (uint64_t seed = 50; seed < 56; ++seed) {
    Lindbladian model = random_model(seed);
    ChannelOracle oracle(model, NoiseBackend{1.0, seed});
    StructureOptions sopts;
    sopts.eta = 0.2;
    sopts.delta = 0.05;
    sopts.sparsity_m = std::max<size_t>(1, validate(model).m);
    sopts.lambda = lambda_bound(model);
    LearnCoefficientsOptions copts;
    copts.eps = 0.1;  // eta / 2: pruning separates true terms from false ones
    copts.seed = seed;

    EndToEndReport rep = run_end_to_end(oracle, sopts, copts);
    CHECK(rep.max_h_error <= copts.eps);
    CHECK(rep.max_a_error <= copts.eps);

    // every surviving h candidate is a true Hamiltonian term
    std::set<PauliString> h_true;
    for (const auto& p : true_s_h(model)) h_true.insert(p);
    for (const auto& [p, v] : rep.coefficients.h_hat) CHECK(h_true.count(p) == 1);
    for (const auto& p : h_true) CHECK(rep.coefficients.h_hat.count(p) == 1);
  }
}
