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

#include "lindlearn/structure.hpp"

#include <cmath>

#include "doctest.h"
#include "lindlearn/experiments.hpp"

using namespace lindlearn;

namespace {
Lindbladian dephasing_half() {
  Lindbladian m;
  m.n = 1;
  m.diss_support = {PauliString::from_text("Z")};
  m.kossakowski = CMatrix::Constant(1, 1, 0.5);
  return m;
}

Lindbladian mixed_two_qubit() {
  // a_{XI,XI} = 0.6, a_{ZZ,ZZ} = 0.5, h_{YI} = 0.7
  Lindbladian m;
  m.n = 2;
  m.ham_terms = {{PauliString::from_text("YI"), 0.7}};
  m.diss_support = {PauliString::from_text("XI"), PauliString::from_text("ZZ")};
  m.kossakowski = CMatrix::Zero(2, 2);
  m.kossakowski(0, 0) = 0.6;
  m.kossakowski(1, 1) = 0.5;
  return m;
}

StructureOptions opts_for(const Lindbladian& model, double eta) {
  StructureOptions o;
  o.eta = eta;
  o.delta = 0.05;
  o.sparsity_m = std::max<size_t>(1, validate(model).m);
  o.lambda = lambda_bound(model);
  return o;
}
}  // namespace

TEST_CASE("dissipator learning on the dephasing model") {
  Lindbladian model = dephasing_half();
  ChannelOracle oracle(model);
  StructureResult res = learn_dissipator(oracle, opts_for(model, 0.4));
  REQUIRE(res.s_d_hat.size() == 1);
  CHECK(res.s_d_hat.count(PauliString::from_text("Z")) == 1);
  CHECK(res.chi_deriv1.at(PauliString::from_text("Z")) == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("pure Hamiltonian models yield an empty dissipator set") {
  Lindbladian model;
  model.n = 1;
  model.ham_terms = {{PauliString::from_text("X"), 0.25}};
  model.kossakowski = CMatrix::Zero(0, 0);
  ChannelOracle oracle(model);
  StructureResult res = learn_dissipator(oracle, opts_for(model, 0.2));
  CHECK(res.s_d_hat.empty());

  // and the Hamiltonian set catches X through the second derivative
  StructureResult ham = learn_hamiltonian(oracle, opts_for(model, 0.2));
  CHECK(ham.s_h_hat.count(PauliString::from_text("X")) == 1);
  CHECK(ham.chi_deriv2.at(PauliString::from_text("X")) >= 2.0 * 0.25 * 0.25 - 1e-4);
}

TEST_CASE("mixed two-qubit model recovers both structures") {
  Lindbladian model = mixed_two_qubit();
  ChannelOracle oracle(model);
  StructureResult diss = learn_dissipator(oracle, opts_for(model, 0.3));
  CHECK(diss.s_d_hat ==
        std::set<PauliString>{PauliString::from_text("XI"), PauliString::from_text("ZZ")});

  StructureResult all = learn_structure(oracle, opts_for(model, 0.3));
  CHECK(all.s_d_hat ==
        std::set<PauliString>{PauliString::from_text("XI"), PauliString::from_text("ZZ")});
  for (const char* text : {"YI", "XI", "ZZ"})
    CHECK(all.s_h_hat.count(PauliString::from_text(text)) == 1);
  // the union rule keeps s_d_hat inside s_h_hat
  for (const auto& p : all.s_d_hat) CHECK(all.s_h_hat.count(p) == 1);
}

TEST_CASE("pure dissipator enters s_h_hat via the first-derivative rule") {
  Lindbladian model = dephasing_half();
  ChannelOracle oracle(model);
  StructureResult res = learn_hamiltonian(oracle, opts_for(model, 0.3));
  CHECK(res.s_h_hat.count(PauliString::from_text("Z")) == 1);
}

TEST_CASE("exact-backend soundness on seeded random models") {
  for (uint64_t seed = 0; seed < 25; ++seed) {
    Lindbladian model = random_model(seed);
    ChannelOracle oracle(model);
    StructureResult res = learn_structure(oracle, opts_for(model, 0.2));

    std::set<PauliString> sd_true;
    for (const auto& p : true_s_d(model)) sd_true.insert(p);
    CHECK(res.s_d_hat == sd_true);
    for (const auto& p : true_s_h(model)) CHECK(res.s_h_hat.count(p) == 1);
  }
}

TEST_CASE("noisy-backend coverage is deterministic under the scheduled eps_s") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    Lindbladian model = random_model(seed);
    ChannelOracle oracle(model, NoiseBackend{0.5, seed * 7 + 1});
    StructureResult res = learn_structure(oracle, opts_for(model, 0.2));
    std::set<PauliString> sd_true;
    for (const auto& p : true_s_d(model)) sd_true.insert(p);
    CHECK(res.s_d_hat == sd_true);
    for (const auto& p : true_s_h(model)) CHECK(res.s_h_hat.count(p) == 1);

    // superset size cap from the sparsification mechanism
    size_t cap = static_cast<size_t>(res.schedule.nodes.size()) *
                 static_cast<size_t>(std::ceil(4.0 / res.schedule.eps_s));
    CHECK(res.s_h_hat.size() <= cap);
  }
}

TEST_CASE("raising eta never adds dissipator candidates") {
  for (uint64_t seed = 30; seed < 36; ++seed) {
    Lindbladian model = random_model(seed);
    ChannelOracle oracle(model);
    StructureResult low = learn_dissipator(oracle, opts_for(model, 0.15));
    StructureResult high = learn_dissipator(oracle, opts_for(model, 0.35));
    for (const auto& p : high.s_d_hat) CHECK(low.s_d_hat.count(p) == 1);
  }
}

TEST_CASE("chi derivative identities on closed-form models") {
  ChiIdentityReport rep = chi_derivative_identities_check(dephasing_half());
  CHECK(rep.max_d1_error < 1e-4);
  for (const auto& row : rep.rows) {
    if (row.pauli == PauliString::from_text("Z"))
      CHECK(row.fitted_d1 == doctest::Approx(0.5).epsilon(1e-6));
  }

  Lindbladian ham;
  ham.n = 1;
  ham.ham_terms = {{PauliString::from_text("X"), 0.25}};
  ham.kossakowski = CMatrix::Zero(0, 0);
  ChiIdentityReport rep2 = chi_derivative_identities_check(ham);
  CHECK(rep2.max_d1_zero < 1e-6);
  CHECK(rep2.min_d2_slack >= -1e-4);
}

TEST_CASE("eta above the true minimum returns the eta-heavy support (smoke)") {
  // a_ZZ = 0.5 dominant, a_XX = 0.04 below the chosen threshold
  Lindbladian model;
  model.n = 1;
  model.diss_support = {PauliString::from_text("Z"), PauliString::from_text("X")};
  model.kossakowski = CMatrix::Zero(2, 2);
  model.kossakowski(0, 0) = 0.5;
  model.kossakowski(1, 1) = 0.04;
  ChannelOracle oracle(model);
  StructureResult res = learn_dissipator(oracle, opts_for(model, 0.3));
  CHECK(res.s_d_hat == std::set<PauliString>{PauliString::from_text("Z")});
}

TEST_CASE("chi derivative identities on a seeded random PSD model") {
  Lindbladian model = random_model(42);
  ChiIdentityReport rep = chi_derivative_identities_check(model);
  CHECK(rep.max_d1_error < 1e-4);
  CHECK(rep.max_d1_zero < 1e-6);
  CHECK(rep.min_d2_slack >= -1e-4);
}
