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

#include "lindlearn/chebyshev.hpp"

#include <cmath>

#include "doctest.h"
#include "lindlearn/rng.hpp"

using namespace lindlearn;

namespace {
std::vector<double> sample(const ChebyshevSchedule& s, double (*f)(double)) {
  std::vector<double> out;
  for (double t : s.nodes) out.push_back(f(t));
  return out;
}
}  // namespace

TEST_CASE("r = 2 nodes match the closed form") {
  ChebyshevSchedule s = make_schedule(1.0, 2, 0.0);
  REQUIRE(s.nodes.size() == 3);
  CHECK(s.nodes[0] == doctest::Approx(0.933013).epsilon(1e-5));
  CHECK(s.nodes[1] == doctest::Approx(0.5));
  CHECK(s.nodes[2] == doctest::Approx(0.066987).epsilon(1e-4));
}

TEST_CASE("degree bounds are enforced") {
  CHECK_THROWS_AS(make_schedule(1.0, 1, 0.0), DegreeTooSmallError);
  CHECK_THROWS_AS(make_schedule(1.0, 65, 0.0), DegreeCapError);
  CHECK_THROWS_AS(make_schedule(-1.0, 4, 0.0), InvalidInputError);
}

TEST_CASE("two-node first-derivative weights reduce to sqrt(2)(f0 - f1)") {
  auto [w1, w2] = derivative_weights(1.0, 1);
  REQUIRE(w1.size() == 2);
  CHECK(w2.empty());
  CHECK(w1[0] == doctest::Approx(std::sqrt(2.0)));
  CHECK(w1[1] == doctest::Approx(-std::sqrt(2.0)));
  // f(t) = t has derivative exactly 1
  std::vector<double> nodes = chebyshev_nodes(1.0, 1);
  CHECK(w1[0] * nodes[0] + w1[1] * nodes[1] == doctest::Approx(1.0));
}

TEST_CASE("weights differentiate low-degree polynomials exactly") {
  for (unsigned r : {2u, 5u, 12u, 30u}) {
    ChebyshevSchedule s = make_schedule(0.7, r, 0.0);
    // constants
    std::vector<double> ones(s.nodes.size(), 3.7);
    CHECK(estimate_deriv1(s, ones) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(std::abs(estimate_deriv2(s, ones)) < 1e-7);
    // f(t) = t
    std::vector<double> lin(s.nodes.begin(), s.nodes.end());
    CHECK(estimate_deriv1(s, lin) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(estimate_deriv2(s, lin)) < 1e-7);
    // f(t) = t^2
    std::vector<double> quad;
    for (double t : s.nodes) quad.push_back(t * t);
    CHECK(estimate_deriv1(s, quad) == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(estimate_deriv2(s, quad) == doctest::Approx(2.0).epsilon(1e-8));
  }
}

TEST_CASE("degree-r grids differentiate degree-r polynomials exactly") {
  RngStream rng(29);
  for (unsigned r : {3u, 5u, 8u, 12u}) {
    ChebyshevSchedule s = make_schedule(0.9, r, 0.0);
    std::vector<double> coeff(r + 1);
    for (auto& c : coeff) c = 2.0 * rng.uniform() - 1.0;
    std::vector<double> samples;
    for (double t : s.nodes) {
      double acc = 0.0, tp = 1.0;
      for (unsigned k = 0; k <= r; ++k) {
        acc += coeff[k] * tp;
        tp *= t;
      }
      samples.push_back(acc);
    }
    CHECK(estimate_deriv1(s, samples) == doctest::Approx(coeff[1]).epsilon(1e-8));
    CHECK(estimate_deriv2(s, samples) == doctest::Approx(2.0 * coeff[2]).epsilon(1e-8));
  }
}

TEST_CASE("weight norms realize the noise-term bounds") {
  // a +-eps_s perturbation of the samples shifts the estimators by at most
  // 5 r^3 eps_s / (2 tau) and r^5 eps_s / tau^2 respectively
  for (unsigned r = 2; r <= 64; ++r) {
    double tau = 0.41;
    auto [w1, w2] = derivative_weights(tau, r);
    double n1 = 0.0, n2 = 0.0;
    for (double w : w1) n1 += std::abs(w);
    for (double w : w2) n2 += std::abs(w);
    CHECK(n1 <= 5.0 * std::pow(r, 3) / (2.0 * tau) * (1 + 1e-12));
    CHECK(n2 <= std::pow(r, 5) / (tau * tau) * (1 + 1e-12));
  }
}

TEST_CASE("weight sums vanish (derivative of constants)") {
  for (unsigned r = 2; r <= 64; r += 7) {
    auto [w1, w2] = derivative_weights(2.0, r);
    double s1 = 0.0, s2 = 0.0;
    for (double w : w1) s1 += w;
    for (double w : w2) s2 += w;
    CHECK(std::abs(s1) < 1e-7 * r * r);
    CHECK(std::abs(s2) < 1e-5 * r * r * r);
  }
}

TEST_CASE("analytic derivative benchmarks") {
  // f = e^{-t} on tau = 0.25, r = 8
  ChebyshevSchedule s = make_schedule(0.25, 8, 0.0);
  CHECK(estimate_deriv1(s, sample(s, [](double t) { return std::exp(-t); })) ==
        doctest::Approx(-1.0).epsilon(1e-6));

  // f = sin^2(0.25 t) on tau = 1, r = 10: f''(0) = 2 h^2 = 0.125
  ChebyshevSchedule s2 = make_schedule(1.0, 10, 0.0);
  CHECK(estimate_deriv2(s2, sample(s2, [](double t) {
          double v = std::sin(0.25 * t);
          return v * v;
        })) == doctest::Approx(0.125).epsilon(1e-5));
}

TEST_CASE("interpolant error bound holds for exponentials on a fine grid") {
  // |f - p| <= 2 ||f^(r+1)|| (tau/4)^{r+1} / (r+1)!
  const double tau = 0.5, lambda = 2.0;
  const unsigned r = 9;
  std::vector<double> nodes = chebyshev_nodes(tau, r);
  std::vector<double> fv;
  for (double t : nodes) fv.push_back(std::exp(lambda * t));
  // Lagrange evaluation (numerically fine at r = 9)
  auto interp = [&](double t) {
    double acc = 0.0;
    for (size_t m = 0; m < nodes.size(); ++m) {
      double ell = 1.0;
      for (size_t k = 0; k < nodes.size(); ++k)
        if (k != m) ell *= (t - nodes[k]) / (nodes[m] - nodes[k]);
      acc += fv[m] * ell;
    }
    return acc;
  };
  double deriv_bound = std::pow(lambda, r + 1) * std::exp(lambda * tau);
  double fact = 1.0;
  for (unsigned k = 2; k <= r + 1; ++k) fact *= k;
  double bound = 2.0 * deriv_bound * std::pow(tau / 4.0, r + 1) / fact;
  for (int i = 0; i <= 200; ++i) {
    double t = tau * i / 200.0;
    CHECK(std::abs(interp(t) - std::exp(lambda * t)) <= bound * (1 + 1e-9) + 1e-15);
  }
}

TEST_CASE("node spacing obeys the 2 tau / (r+1)^2 resolution bound") {
  for (unsigned r = 1; r <= 64; ++r) {
    double tau = 0.37;
    std::vector<double> nodes = chebyshev_nodes(tau, r);
    double min_gap = tau;
    for (size_t i = 0; i + 1 < nodes.size(); ++i)
      min_gap = std::min(min_gap, nodes[i] - nodes[i + 1]);
    CHECK(min_gap >= 2.0 * tau / ((r + 1.0) * (r + 1.0)) - 1e-15);
  }
}

TEST_CASE("params_first substitutes the schedule formulas") {
  ChebyshevSchedule s = params_first(1.0, 2.0, 0.25);
  CHECK(s.tau_max == doctest::Approx(0.25));
  CHECK(s.r == 8);  // ceil(log2 144)
  CHECK(s.eps_s == doctest::Approx(0.25 / (20.0 * 512.0)));
  // halving eps grows r by at most one
  ChebyshevSchedule s_half = params_first(1.0, 2.0, 0.125);
  CHECK(s_half.r <= s.r + 1);
}

TEST_CASE("params_second substitutes the schedule formulas") {
  ChebyshevSchedule s = params_second(1.0, 2.0, 0.1);
  CHECK(s.tau_max == doctest::Approx(0.25));
  CHECK(s.r == static_cast<unsigned>(std::ceil(std::log2(320.0 * 4.0 / 0.1))));
  double r5 = std::pow(static_cast<double>(s.r), 5);
  CHECK(s.eps_s == doctest::Approx(0.1 / (8.0 * 4.0 * r5)));
  ChebyshevSchedule s_half = params_second(1.0, 2.0, 0.05);
  CHECK(s_half.r <= s.r + 1);
}

TEST_CASE("params_first_factorial substitutes the schedule formulas") {
  ChebyshevSchedule s = params_first_factorial(1.0, 2.0, 0.1);
  CHECK(s.tau_max == doctest::Approx(0.25));
  CHECK(s.r == 30);  // max(16, ceil(4 log2 160))
  CHECK(params_first_factorial(1.0, 1.0, 0.9).r == 16);
}

namespace {
// Worst-case bounded node noise: signs aligned with the estimator weights.
double worst_case_error1(const ChebyshevSchedule& s, const std::vector<double>& exact) {
  std::vector<double> noisy = exact;
  for (size_t m = 0; m < noisy.size(); ++m)
    noisy[m] += (s.weights1[m] >= 0 ? s.eps_s : -s.eps_s);
  return estimate_deriv1(s, noisy);
}
}  // namespace

TEST_CASE("params_first guarantee holds under worst-case node noise") {
  RngStream rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    double lambda = 0.5 + 4.0 * rng.uniform();
    double eps = 0.02 + 0.2 * rng.uniform();
    double rate = lambda * (2.0 * rng.uniform() - 1.0);  // |f^(k)| <= lambda^k
    ChebyshevSchedule s = params_first(1.0, lambda, eps);
    std::vector<double> exact;
    for (double t : s.nodes) exact.push_back(std::exp(rate * t));
    CHECK(std::abs(worst_case_error1(s, exact) - rate) <= eps * (1 + 1e-9));
  }
}

TEST_CASE("params_second guarantee holds under worst-case node noise") {
  RngStream rng(13);
  for (int trial = 0; trial < 40; ++trial) {
    double lambda = 0.5 + 4.0 * rng.uniform();
    double eps = 0.05 + 0.3 * rng.uniform();
    double h = lambda / 2.0 * rng.uniform();  // sin^2(ht): |f^(k)| <= (2h)^k <= lambda^k
    ChebyshevSchedule s = params_second(1.0, lambda, eps);
    std::vector<double> noisy;
    for (size_t m = 0; m < s.nodes.size(); ++m) {
      double v = std::sin(h * s.nodes[m]);
      noisy.push_back(v * v + (s.weights2[m] >= 0 ? s.eps_s : -s.eps_s));
    }
    CHECK(std::abs(estimate_deriv2(s, noisy) - 2.0 * h * h) <= eps * (1 + 1e-9));
  }
}

TEST_CASE("params_first_factorial guarantee holds for factorial-growth functions") {
  RngStream rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    double lambda = 0.5 + 3.0 * rng.uniform();
    double eps = 0.02 + 0.2 * rng.uniform();
    // f = 1 / (1 - 2 lambda' t) with lambda' = lambda/4 has
    // ||f^(k)|| <= lambda^k k! on [0, 1/(2 lambda)].
    double lp = lambda / 4.0;
    ChebyshevSchedule s = params_first_factorial(1.0, lambda, eps);
    std::vector<double> noisy;
    for (size_t m = 0; m < s.nodes.size(); ++m)
      noisy.push_back(1.0 / (1.0 - 2.0 * lp * s.nodes[m]) +
                      (s.weights1[m] >= 0 ? s.eps_s : -s.eps_s));
    CHECK(std::abs(estimate_deriv1(s, noisy) - 2.0 * lp) <= eps * (1 + 1e-9));
  }
}
