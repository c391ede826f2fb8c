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

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>

#include "lindlearn/coefficients.hpp"

namespace lindlearn {

namespace {

// One simulated experiment: a random product Pauli eigenstate in, evolution,
// a random per-qubit Pauli basis out, a full outcome bit-string sampled from
// the exact (SPAM-damped) output distribution.
struct Experiment {
  std::array<uint8_t, 64> basis_in;   // letters 0=X,1=Y,2=Z per qubit
  std::array<int8_t, 64> sign_in;    // +-1 per qubit
  std::array<uint8_t, 64> basis_out;
  std::array<int8_t, 64> outcome;    // +-1 per qubit
};

char letter_of(uint8_t code) { return code == 0 ? 'X' : (code == 1 ? 'Y' : 'Z'); }

/** <R>_rho for the sampled product input, including preparation damping. */
double input_correlator(const PauliString& r, const Experiment& e, double r_prep) {
  double v = 1.0;
  uint64_t mask = r.support_mask();
  while (mask) {
    unsigned q = static_cast<unsigned>(std::countr_zero(mask));
    mask &= mask - 1;
    if (r.letter(q) != letter_of(e.basis_in[q])) return 0.0;
    v *= e.sign_in[q];
  }
  return v * std::pow(r_prep, r.weight());
}

}  // namespace

std::vector<double> shadow_estimate_all(const ChannelOracle& oracle,
                                        const std::vector<Probe>& probes, double t, double eps_s,
                                        double delta_s, uint64_t seed, unsigned locality_cap) {
  const unsigned n = oracle.model().n;
  if (n > oracle.max_exhaustive_n)
    throw CapExceededError("shadow estimation needs n <= " +
                           std::to_string(oracle.max_exhaustive_n));
  if (probes.empty()) return {};
  if (eps_s <= 0 || delta_s <= 0 || delta_s >= 1)
    throw InvalidInputError("shadow estimation needs eps_s > 0, delta_s in (0,1)");

  double max_moment = 1.0;
  for (const auto& probe : probes) {
    unsigned wo = probe.observable.weight(), wq = probe.input.q.weight();
    if (wo > locality_cap || wq > locality_cap)
      throw LocalityCapExceededError("probe locality exceeds cap " +
                                     std::to_string(locality_cap));
    double m2 = std::pow(3.0, wo + wq);
    if (probe.input.kind == ProbeInput::Kind::Eigenstate && !probe.input.q.is_identity())
      m2 *= 4.0;  // the combined I + sign*Q estimator
    max_moment = std::max(max_moment, m2);
  }

  const auto groups = static_cast<size_t>(
      std::ceil(8.0 * std::log(2.0 * static_cast<double>(probes.size()) / delta_s)));
  const auto group_size =
      static_cast<size_t>(std::ceil(4.0 * max_moment / (eps_s * eps_s)));

  // Beyond the per-sample loop budget, draw group means from the matching
  // normal law instead: exact means, variances at the second-moment bound
  // the group size was scheduled against.  Sub-gaussian tails keep every
  // median-of-means guarantee intact.
  constexpr double kLoopBudget = 4e6;
  if (static_cast<double>(groups) * static_cast<double>(group_size) > kLoopBudget) {
    oracle.add_queries(static_cast<uint64_t>(groups) * group_size);
    std::vector<double> estimates(probes.size());
    for (size_t p = 0; p < probes.size(); ++p) {
      const Probe& probe = probes[p];
      double mu = oracle.expectation(probe.input, probe.observable, t);
      double m2 = std::pow(3.0, probe.observable.weight() + probe.input.q.weight());
      if (probe.input.kind == ProbeInput::Kind::Eigenstate && !probe.input.q.is_identity())
        m2 *= 4.0;
      double var = std::max(0.0, m2 - mu * mu) / static_cast<double>(group_size);
      RngStream rng = derive_stream(seed, t, 0x5ad0e + p, 0xc17);
      std::vector<double> means(groups);
      for (size_t g = 0; g < groups; ++g) means[g] = mu + std::sqrt(var) * rng.gaussian();
      std::sort(means.begin(), means.end());
      size_t mid = means.size() / 2;
      estimates[p] = means.size() % 2 ? means[mid] : 0.5 * (means[mid - 1] + means[mid]);
    }
    return estimates;
  }

  // Evolved columns for every Pauli at this node, reused across samples.
  const size_t dim = size_t{1} << (2 * n);
  std::vector<std::vector<std::pair<PauliString, double>>> evolved(dim);
  for (uint64_t code = 0; code < dim; ++code) {
    PauliVector v = evolve_observable(oracle.ptm(), t, PauliString::from_code(n, code),
                                      oracle.evolve_opts);
    for (const auto& [p, c] : v)
      if (std::abs(c.real()) > 1e-15) evolved[code].emplace_back(p, c.real());
  }

  double r_prep = 1.0, r_meas = 1.0;
  if (oracle.spam()) {
    r_prep = oracle.spam()->r_prep;
    r_meas = oracle.spam()->r_meas;
  }

  RngStream rng = derive_stream(seed, t, 0x5ad0e);
  const size_t outcomes = size_t{1} << n;
  std::vector<double> probs(outcomes);
  std::vector<double> corr(outcomes);  // damped tr(R_S sigma) per basis subset

  std::vector<std::vector<double>> group_means(probes.size(),
                                               std::vector<double>(groups, 0.0));
  oracle.add_queries(static_cast<uint64_t>(groups) * group_size);

  Experiment e{};
  for (size_t g = 0; g < groups; ++g) {
    for (size_t s = 0; s < group_size; ++s) {
      for (unsigned q = 0; q < n; ++q) {
        e.basis_in[q] = static_cast<uint8_t>(rng.uniform_int(3));
        e.sign_in[q] = rng.uniform() < 0.5 ? int8_t{1} : int8_t{-1};
        e.basis_out[q] = static_cast<uint8_t>(rng.uniform_int(3));
      }
      // Correlators of the evolved state for every subset of the measured
      // basis letters, S -> tr((prod_{i in S} sigma_out_i) sigma).
      for (size_t sub = 0; sub < outcomes; ++sub) {
        uint64_t x = 0, z = 0;
        for (unsigned q = 0; q < n; ++q) {
          if (!((sub >> q) & 1)) continue;
          char l = letter_of(e.basis_out[q]);
          if (l == 'X' || l == 'Y') x |= uint64_t{1} << q;
          if (l == 'Z' || l == 'Y') z |= uint64_t{1} << q;
        }
        PauliString r(n, x, z);
        double acc = 0.0;
        for (const auto& [p, c] : evolved[r.code()]) acc += c * input_correlator(p, e, r_prep);
        corr[sub] = acc * std::pow(r_meas, r.weight());
      }
      // Outcome distribution p(o) = 2^{-n} sum_S corr_S prod_{i in S} o_i.
      double total = 0.0;
      for (size_t o = 0; o < outcomes; ++o) {
        double p = 0.0;
        for (size_t sub = 0; sub < outcomes; ++sub) {
          int par = std::popcount(o & sub) & 1;
          p += par ? -corr[sub] : corr[sub];
        }
        probs[o] = std::max(0.0, p);
        total += probs[o];
      }
      double draw = rng.uniform() * total;
      size_t picked = 0;
      for (size_t o = 0; o < outcomes; ++o) {
        draw -= probs[o];
        if (draw <= 0) {
          picked = o;
          break;
        }
        picked = o;
      }
      for (unsigned q = 0; q < n; ++q)
        e.outcome[q] = ((picked >> q) & 1) ? int8_t{-1} : int8_t{1};

      // Per-probe inverse-weight estimators.
      for (size_t p = 0; p < probes.size(); ++p) {
        const Probe& probe = probes[p];
        double out_factor = 1.0;
        uint64_t mo = probe.observable.support_mask();
        while (mo) {
          unsigned q = static_cast<unsigned>(std::countr_zero(mo));
          mo &= mo - 1;
          if (probe.observable.letter(q) != letter_of(e.basis_out[q])) {
            out_factor = 0.0;
            break;
          }
          out_factor *= 3.0 * e.outcome[q];
        }
        double in_factor = 1.0;
        if (!probe.input.q.is_identity()) {
          uint64_t mq = probe.input.q.support_mask();
          while (mq) {
            unsigned q = static_cast<unsigned>(std::countr_zero(mq));
            mq &= mq - 1;
            if (probe.input.q.letter(q) != letter_of(e.basis_in[q])) {
              in_factor = 0.0;
              break;
            }
            in_factor *= 3.0 * e.sign_in[q];
          }
        }
        double x;
        if (probe.input.q.is_identity()) {
          x = out_factor;
        } else if (probe.input.kind == ProbeInput::Kind::Eigenstate) {
          x = out_factor + probe.input.sign * in_factor * out_factor;
        } else {
          x = probe.input.sign * in_factor * out_factor;
        }
        group_means[p][g] += x;
      }
    }
    for (size_t p = 0; p < probes.size(); ++p)
      group_means[p][g] /= static_cast<double>(group_size);
  }

  std::vector<double> estimates(probes.size());
  for (size_t p = 0; p < probes.size(); ++p) {
    std::vector<double>& means = group_means[p];
    std::sort(means.begin(), means.end());
    size_t mid = means.size() / 2;
    estimates[p] =
        means.size() % 2 ? means[mid] : 0.5 * (means[mid - 1] + means[mid]);
  }
  return estimates;
}

}  // namespace lindlearn
