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

#include <cmath>

#include "doctest.h"
#include "lindlearn/evolution.hpp"
#include "lindlearn/rng.hpp"

using namespace lindlearn;

TEST_CASE("balanced set sizes") {
  CHECK(BalancedPauliSet::build(2, 2).members.size() == 9);
  CHECK(BalancedPauliSet::build(4, 2).members.size() == 54);

  LowerBoundVariant alt;
  alt.kind = LowerBoundVariant::Kind::Alternative;
  Lindbladian l1 = build_lowerbound_lindbladian(4, 2, alt);
  CHECK(l1.diss_support.size() == 53);

  Lindbladian l0 = build_lowerbound_lindbladian(2, 2);
  CHECK(l0.diss_support.size() == 9);
  CHECK(validate(l0).m_d == 9);
  CHECK_THROWS_AS(build_lowerbound_lindbladian(3, 1), KappaOutOfRangeError);
  CHECK_THROWS_AS(build_lowerbound_lindbladian(3, 4), KappaOutOfRangeError);
}

TEST_CASE("anticommuting counts: examples and closed form") {
  BalancedPauliSet set22 = BalancedPauliSet::build(2, 2);
  CHECK(n_anticommuting(PauliString::from_text("ZI"), set22) == 6);
  CHECK(n_anticommuting(PauliString::from_text("ZZ"), set22) == 4);
  CHECK_THROWS_AS(n_anticommuting(PauliString::identity(2), set22), IdentityInputError);

  for (auto [n, kappa] : std::vector<std::pair<unsigned, unsigned>>{{2, 2}, {3, 2}, {4, 2}, {4, 3}}) {
    BalancedPauliSet set = BalancedPauliSet::build(n, kappa);
    double nstar = n_star(n, kappa);
    for (uint64_t code = 1; code < (uint64_t{1} << (2 * n)); ++code) {
      PauliString q = PauliString::from_code(n, code);
      size_t brute = n_anticommuting(q, set);
      CHECK(brute == n_anticommuting_closed_form(q, n, kappa));
      CHECK(static_cast<double>(brute) >= nstar - 1e-9);
    }
  }
}

TEST_CASE("pauli decay matches the engine exactly") {
  BalancedPauliSet set = BalancedPauliSet::build(2, 2);
  CHECK(pauli_decay(set, PauliString::from_text("ZI"), 0.0) == doctest::Approx(1.0));
  CHECK(pauli_decay(set, PauliString::from_text("ZI"), 0.1) ==
        doctest::Approx(std::exp(-1.2)).epsilon(1e-9));

  for (auto [n, kappa] : std::vector<std::pair<unsigned, unsigned>>{{2, 2}, {4, 2}}) {
    BalancedPauliSet bset = BalancedPauliSet::build(n, kappa);
    Lindbladian model = build_lowerbound_lindbladian(n, kappa);
    AdjointPTM ptm(model);
    RngStream rng(n);
    for (int rep = 0; rep < 8; ++rep) {
      PauliString q =
          PauliString::from_code(n, 1 + rng.uniform_int((uint64_t{1} << (2 * n)) - 1));
      double t = 0.3 * rng.uniform();
      PauliVector v = evolve_observable(ptm, t, q);
      double engine = v.count(q) ? v.at(q).real() : 0.0;
      CHECK(std::abs(engine - pauli_decay(bset, q, t)) < 1e-10);
      // diagonal Heisenberg action: no other component appears
      for (const auto& [p, c] : v)
        if (!(p == q)) CHECK(std::abs(c) < 1e-12);
    }
  }
}

TEST_CASE("t0 values and scaling") {
  CHECK(t0_kappa(4, 2) == doctest::Approx(36.0 * (12.0 * std::log(2.0) + 2.0) /
                                          (16.0 * 2.0 * 54.0 - 36.0)));
  CHECK(t0_kappa(4, 2) == doctest::Approx(0.2195).epsilon(1e-3));
  // positive and O(M^{2/kappa - 1}): the ratio t0 * M^{1 - 2/kappa} stays bounded
  for (unsigned kappa : {2u, 3u}) {
    double first_ratio = 0.0;
    for (unsigned n = 4; n <= 8; ++n) {
      double m = static_cast<double>(BalancedPauliSet::full_count(n, kappa));
      double ratio = t0_kappa(n, kappa) * std::pow(m, 1.0 - 2.0 / kappa);
      CHECK(ratio > 0.0);
      if (first_ratio == 0.0) first_ratio = ratio;
      CHECK(ratio < 3.0 * first_ratio);
      CHECK(ratio > first_ratio / 3.0);
    }
  }
}

TEST_CASE("mixing certificate at the threshold time") {
  unsigned n = 4, kappa = 2;
  BalancedPauliSet set = BalancedPauliSet::build(n, kappa);
  ProductStateSpec input;
  input.letters = "ZZZZ";
  input.signs = {1, 1, 1, 1};

  double t0 = t0_kappa(n, kappa);
  MixingCertificate cert = mixing_certificate(set, input, t0);
  CHECK(cert.l1_bound <= std::ldexp(1.0, -static_cast<int>(n)));
  CHECK(cert.l2_dist <= cert.l2_bound);

  // monotone decrease of the exact l2 distance
  double prev = 1e300;
  for (double t : {0.05, 0.1, 0.2, 0.4, 0.8}) {
    MixingCertificate c = mixing_certificate(set, input, t);
    CHECK(c.l2_dist <= prev + 1e-15);
    prev = c.l2_dist;
  }

  // t -> infinity: full mixing
  CHECK(mixing_certificate(set, input, 50.0).l2_dist < 1e-12);

  BalancedPauliSet big = BalancedPauliSet::build(7, 2);
  ProductStateSpec in7;
  in7.letters = std::string(7, 'X');
  in7.signs.assign(7, 1);
  CHECK_THROWS_AS(mixing_certificate(big, in7, 0.1), CapExceededError);
}

TEST_CASE("null and alternative evolutions are indistinguishable past t0") {
  unsigned n = 4, kappa = 2;
  Lindbladian l0 = build_lowerbound_lindbladian(n, kappa);
  LowerBoundVariant alt;
  alt.kind = LowerBoundVariant::Kind::Alternative;
  Lindbladian l1 = build_lowerbound_lindbladian(n, kappa, alt);
  BalancedPauliSet s0 = BalancedPauliSet::build(n, kappa);
  BalancedPauliSet s1 = BalancedPauliSet::build(n, kappa, s0.members.front());

  double t0 = t0_kappa(n, kappa);
  RngStream rng(4242);
  for (int rep = 0; rep < 20; ++rep) {
    ProductStateSpec input;
    input.letters.clear();
    input.signs.clear();
    const char letters[3] = {'X', 'Y', 'Z'};
    for (unsigned q = 0; q < n; ++q) {
      input.letters.push_back(letters[rng.uniform_int(3)]);
      input.signs.push_back(rng.uniform() < 0.5 ? 1 : -1);
    }
    // l1 distance between the two evolved states via the triangle inequality
    // through the maximally mixed state
    MixingCertificate c0 = mixing_certificate(s0, input, t0);
    MixingCertificate c1 = mixing_certificate(s1, input, t0);
    double l1_each_0 = std::ldexp(1.0, static_cast<int>(n) / 2) * c0.l2_dist;
    double l1_each_1 = std::ldexp(1.0, static_cast<int>(n) / 2) * c1.l2_dist;
    CHECK(l1_each_0 + l1_each_1 <= 2.0 * std::ldexp(1.0, -static_cast<int>(n)) + 1e-12);
  }
}
