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
#include <string>

namespace lindlearn {

namespace {
constexpr double kPi = 3.14159265358979323846;

double log2_pos(double x) { return std::log2(x); }

unsigned clamp_degree(double r_raw, const char* what) {
  if (!(r_raw > 0)) r_raw = 2;
  double r_ceil = std::ceil(r_raw - 1e-12);
  unsigned r = r_ceil < 2 ? 2u : static_cast<unsigned>(r_ceil);
  if (r > kMaxChebyshevDegree)
    throw DegreeCapError(std::string(what) + ": required degree " + std::to_string(r) +
                         " exceeds cap " + std::to_string(kMaxChebyshevDegree));
  return r;
}
}  // namespace

std::vector<double> chebyshev_nodes(double tau_max, unsigned r) {
  if (tau_max <= 0) throw InvalidInputError("tau_max must be positive");
  std::vector<double> nodes(r + 1);
  for (unsigned m = 0; m <= r; ++m) {
    double z = std::cos((2.0 * m + 1.0) * kPi / (2.0 * (r + 1)));
    nodes[m] = (z + 1.0) / 2.0 * tau_max;
  }
  return nodes;
}

std::pair<std::vector<double>, std::vector<double>> derivative_weights(double tau_max,
                                                                       unsigned r) {
  if (tau_max <= 0) throw InvalidInputError("tau_max must be positive");
  if (r < 1) throw DegreeTooSmallError("derivative weights need r >= 1");
  std::vector<double> w1(r + 1, 0.0), w2;
  if (r >= 2) w2.assign(r + 1, 0.0);
  for (unsigned m = 0; m <= r; ++m) {
    double z = std::cos((2.0 * m + 1.0) * kPi / (2.0 * (r + 1)));
    // T_n(z_m) by recurrence
    double t_prev = 1.0, t_cur = z;
    double s1 = 0.0, s2 = 0.0;
    for (unsigned k = 1; k <= r; ++k) {
      double nn = static_cast<double>(k) * k;
      double sign = (k % 2 == 1) ? 1.0 : -1.0;  // (-1)^{k+1}
      s1 += sign * nn * t_cur;
      if (k >= 2) s2 += -sign * nn * (nn - 1.0) * t_cur;  // (-1)^k n^2 (n^2-1)
      double t_next = 2.0 * z * t_cur - t_prev;
      t_prev = t_cur;
      t_cur = t_next;
    }
    w1[m] = 4.0 / (tau_max * (r + 1)) * s1;
    if (r >= 2) w2[m] = 8.0 / (3.0 * tau_max * tau_max * (r + 1)) * s2;
  }
  return {std::move(w1), std::move(w2)};
}

ChebyshevSchedule make_schedule(double tau_max, unsigned r, double eps_s) {
  if (tau_max <= 0) throw InvalidInputError("tau_max must be positive");
  if (r < 2) throw DegreeTooSmallError("schedule needs r >= 2");
  if (r > kMaxChebyshevDegree)
    throw DegreeCapError("schedule degree " + std::to_string(r) + " exceeds cap");
  ChebyshevSchedule s;
  s.tau_max = tau_max;
  s.r = r;
  s.eps_s = eps_s;
  s.nodes = chebyshev_nodes(tau_max, r);
  auto [w1, w2] = derivative_weights(tau_max, r);
  s.weights1 = std::move(w1);
  s.weights2 = std::move(w2);
  return s;
}

double estimate_deriv1(const ChebyshevSchedule& schedule, const std::vector<double>& samples) {
  if (samples.size() != schedule.nodes.size())
    throw SizeMismatchError("sample count does not match schedule nodes");
  double acc = 0.0;
  for (size_t m = 0; m < samples.size(); ++m) acc += schedule.weights1[m] * samples[m];
  return acc;
}

double estimate_deriv2(const ChebyshevSchedule& schedule, const std::vector<double>& samples) {
  if (samples.size() != schedule.nodes.size())
    throw SizeMismatchError("sample count does not match schedule nodes");
  double acc = 0.0;
  for (size_t m = 0; m < samples.size(); ++m) acc += schedule.weights2[m] * samples[m];
  return acc;
}

ChebyshevSchedule params_first(double b, double lambda, double eps) {
  if (b <= 0 || lambda <= 0 || eps <= 0)
    throw InvalidInputError("params_first needs positive B, Lambda, eps");
  double tau_max = 1.0 / (2.0 * lambda);
  unsigned r = clamp_degree(log2_pos(18.0 * b * lambda / eps), "params_first");
  double r3 = static_cast<double>(r) * r * r;
  double eps_s = eps / (10.0 * lambda * r3);
  return make_schedule(tau_max, r, eps_s);
}

ChebyshevSchedule params_second(double b, double lambda, double eps) {
  if (b <= 0 || lambda <= 0 || eps <= 0)
    throw InvalidInputError("params_second needs positive B, Lambda, eps");
  double tau_max = 1.0 / (2.0 * lambda);
  unsigned r = clamp_degree(log2_pos(320.0 * b * lambda * lambda / eps), "params_second");
  double r5 = std::pow(static_cast<double>(r), 5);
  double eps_s = eps / (8.0 * lambda * lambda * r5);
  return make_schedule(tau_max, r, eps_s);
}

ChebyshevSchedule params_first_factorial(double b, double lambda, double eps) {
  if (b <= 0 || lambda <= 0 || eps <= 0)
    throw InvalidInputError("params_first_factorial needs positive B, Lambda, eps");
  double tau_max = 1.0 / (2.0 * lambda);
  double r_raw = 4.0 * log2_pos(8.0 * lambda * b / eps);
  unsigned r = std::max(16u, clamp_degree(r_raw, "params_first_factorial"));
  double r3 = static_cast<double>(r) * r * r;
  double eps_s = eps / (10.0 * lambda * r3);
  return make_schedule(tau_max, r, eps_s);
}

}  // namespace lindlearn
