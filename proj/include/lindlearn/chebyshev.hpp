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

#include <cstddef>
#include <vector>

#include "lindlearn/errors.hpp"

namespace lindlearn {

/**
 * Gauss-Chebyshev sampling schedule on [0, tau_max] with precomputed weights
 * for estimating f'(0) and f''(0) from the r+1 node samples.
 *
 * Nodes are t_m = (z_m + 1)/2 * tau_max with z_m = cos((2m+1)pi / (2(r+1))),
 * listed in descending order.  The weights realize the analytic derivatives
 * of the degree-r interpolant at t=0.
 */
struct ChebyshevSchedule {
  double tau_max = 0.0;
  unsigned r = 0;
  double eps_s = 0.0;            // per-node sample accuracy budget
  std::vector<double> nodes;     // r+1 times, descending
  std::vector<double> weights1;  // alpha^(1)
  std::vector<double> weights2;  // alpha^(2)
};

/** Degrees above this raise DegreeCapError rather than silently truncating. */
constexpr unsigned kMaxChebyshevDegree = 64;

/** Nodes only; valid for any r >= 1. */
std::vector<double> chebyshev_nodes(double tau_max, unsigned r);

/**
 * First/second-derivative weights for the degree-r grid; valid for r >= 1
 * (weights2 requires r >= 2 and is returned empty otherwise).
 */
std::pair<std::vector<double>, std::vector<double>> derivative_weights(double tau_max, unsigned r);

/** Builds the schedule; requires 2 <= r <= kMaxChebyshevDegree, tau_max > 0. */
ChebyshevSchedule make_schedule(double tau_max, unsigned r, double eps_s);

/** Weighted sums over node samples (aligned with schedule.nodes). */
double estimate_deriv1(const ChebyshevSchedule& schedule, const std::vector<double>& samples);
double estimate_deriv2(const ChebyshevSchedule& schedule, const std::vector<double>& samples);

/**
 * Schedule parameters guaranteeing |estimate - f'(0)| <= eps for functions
 * with ||f^(k)|| <= B Lambda^k: tau_max = 1/(2 Lambda),
 * r = ceil(log2(18 B Lambda / eps)), eps_s = eps / (10 Lambda r^3).
 * All schedule logarithms are base 2.
 */
ChebyshevSchedule params_first(double b, double lambda, double eps);

/**
 * Second-derivative analogue: r = ceil(log2(320 B Lambda^2 / eps)),
 * eps_s = eps / (8 Lambda^2 r^5).
 */
ChebyshevSchedule params_second(double b, double lambda, double eps);

/**
 * First derivative under the factorial bound ||f^(k)|| <= B Lambda^k k!:
 * r = max(16, ceil(4 log2(8 Lambda B / eps))), eps_s = eps / (10 Lambda r^3).
 */
ChebyshevSchedule params_first_factorial(double b, double lambda, double eps);

}  // namespace lindlearn
