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

#include <cmath>

#include "doctest.h"
#include "lindlearn/coefficients.hpp"
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

std::vector<Probe> simple_probes(unsigned n) {
  std::vector<Probe> probes;
  auto patch = Patch((uint64_t{1} << n) - 1);
  auto all = enumerate_patch_paulis(patch, n);
  for (size_t i = 1; i < all.size() && probes.size() < 4; i += 2) {
    Probe p;
    p.input = ProbeInput::pauli_input(all[i]);
    p.observable = all[i];
    p.patch = patch;
    probes.push_back(p);
  }
  return probes;
}
}  // namespace

TEST_CASE("shadow estimates at t = 0 recover the identity channel") {
  Lindbladian model = dephasing_half();
  ChannelOracle oracle(model);
  std::vector<Probe> probes = simple_probes(1);
  double eps_s = 0.2;
  std::vector<double> est = shadow_estimate_all(oracle, probes, 0.0, eps_s, 0.05, 7);
  REQUIRE(est.size() == probes.size());
  for (size_t p = 0; p < probes.size(); ++p) {
    // (PauliInput Q, O = Q) at t=0 has exact value 1
    CHECK(std::abs(est[p] - 1.0) <= eps_s);
  }
}

TEST_CASE("shadow estimates agree with exact values in >= 95 of 100 seeded runs") {
  Lindbladian model = dephasing_half();
  std::vector<Probe> probes = simple_probes(1);
  double t = 0.5, eps_s = 0.25, delta_s = 0.05;

  ChannelOracle exact(model);
  std::vector<double> truth;
  for (const auto& p : probes) truth.push_back(exact.expectation(p.input, p.observable, t));

  int good = 0;
  for (uint64_t seed = 0; seed < 100; ++seed) {
    std::vector<double> est = shadow_estimate_all(exact, probes, t, eps_s, delta_s, seed);
    bool all_ok = true;
    for (size_t p = 0; p < probes.size(); ++p)
      if (std::abs(est[p] - truth[p]) > eps_s) all_ok = false;
    if (all_ok) ++good;
  }
  CHECK(good >= 95);
}

TEST_CASE("shadow group means are unbiased within 3 sigma") {
  Lindbladian model = dephasing_half();
  ChannelOracle oracle(model);
  Probe probe;
  probe.input = ProbeInput::pauli_input(PauliString::from_text("X"));
  probe.observable = PauliString::from_text("X");
  probe.patch = Patch::from_sites({0});
  double t = 0.4;
  double truth = oracle.expectation(probe.input, probe.observable, t);

  // Mean over many independent estimates: each call uses a fresh seed; the
  // median-of-means output concentrates near the true value, and a coarse
  // eps_s makes each group a plain mean (estimate distribution stays centred).
  const int reps = 200;
  double acc = 0.0;
  for (int i = 0; i < reps; ++i) {
    std::vector<double> est =
        shadow_estimate_all(oracle, {probe}, t, 0.15, 0.2, 1000 + static_cast<uint64_t>(i));
    acc += est[0];
  }
  double mean = acc / reps;
  // group variance <= 9 / m_g, median has comparable spread; 3 sigma of the
  // rep average
  double sigma = 0.15 / std::sqrt(static_cast<double>(reps));
  CHECK(std::abs(mean - truth) < 3.5 * sigma);
}

TEST_CASE("shadow enforces the locality cap") {
  Lindbladian model;
  model.n = 5;
  model.diss_support = {PauliString::from_text("ZZZZZ")};
  model.kossakowski = CMatrix::Constant(1, 1, 0.5);
  ChannelOracle oracle(model);
  Probe probe;
  probe.input = ProbeInput::pauli_input(PauliString::from_text("XXXXX"));
  probe.observable = PauliString::from_text("XXXXX");
  probe.patch = Patch((uint64_t{1} << 5) - 1);
  CHECK_THROWS_AS(shadow_estimate_all(oracle, {probe}, 0.1, 0.2, 0.05, 0, 4),
                  LocalityCapExceededError);
}

TEST_CASE("learn_coefficients in shadow mode on a tiny model") {
  Lindbladian model = dephasing_half();
  ChannelOracle oracle(model);
  LearnCoefficientsOptions opts;
  opts.mode = AcquisitionMode::Shadow;
  opts.eps = 0.4;  // coarse: shadow sampling is the expensive path
  opts.delta = 0.1;
  CoefficientEstimate est =
      learn_coefficients(oracle, {}, {PauliString::from_text("Z")}, opts);
  CHECK(std::abs(est.a_hat(0, 0).real() - 0.5) <= opts.eps);
}
