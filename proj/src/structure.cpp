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
#include <limits>

namespace lindlearn {

namespace {

double lambda_or_sparsity(const StructureOptions& opts) {
  if (opts.lambda > 0) return opts.lambda;
  if (opts.sparsity_m < 1) throw InvalidInputError("sparsity M must be >= 1");
  return 2.0 * static_cast<double>(opts.sparsity_m);
}

struct NodeData {
  std::vector<ChiDiagonal> per_node;      // aligned with schedule.nodes
  std::set<PauliString> candidates;       // union of sparse hypotheses
};

NodeData query_all_nodes(const ChannelOracle& oracle, const ChebyshevSchedule& schedule,
                         double delta) {
  NodeData data;
  double delta_s = delta / static_cast<double>(schedule.nodes.size());
  for (double t : schedule.nodes) {
    ChiDiagonal chi = oracle.query_chi_rates(t, schedule.eps_s, delta_s);
    for (const auto& [p, v] : chi.entries) data.candidates.insert(p);
    data.per_node.push_back(std::move(chi));
  }
  return data;
}

std::vector<double> node_samples(const NodeData& data, const PauliString& p) {
  std::vector<double> samples;
  samples.reserve(data.per_node.size());
  for (const auto& chi : data.per_node) samples.push_back(chi.at(p));
  return samples;
}

}  // namespace

StructureResult learn_dissipator(const ChannelOracle& oracle, const StructureOptions& opts) {
  if (opts.eta <= 0 || opts.eta > 1) throw InvalidInputError("eta must be in (0,1]");
  double lambda = lambda_or_sparsity(opts);
  ChebyshevSchedule schedule = params_first(1.0, lambda, opts.eta / 2.0);

  uint64_t q0 = oracle.queries_used();
  NodeData data = query_all_nodes(oracle, schedule, opts.delta);

  StructureResult result;
  result.schedule = schedule;
  for (const auto& p : data.candidates) {
    if (p.is_identity()) continue;
    double d1 = estimate_deriv1(schedule, node_samples(data, p));
    result.chi_deriv1[p] = d1;
    if (d1 > opts.eta / 2.0) result.s_d_hat.insert(p);
  }
  result.s_h_hat = result.s_d_hat;
  result.queries_used = oracle.queries_used() - q0;
  return result;
}

StructureResult learn_hamiltonian(const ChannelOracle& oracle, const StructureOptions& opts) {
  if (opts.eta <= 0 || opts.eta > 1) throw InvalidInputError("eta must be in (0,1]");
  double lambda = lambda_or_sparsity(opts);
  ChebyshevSchedule schedule = params_second(1.0, lambda, opts.eta * opts.eta);

  uint64_t q0 = oracle.queries_used();
  NodeData data = query_all_nodes(oracle, schedule, opts.delta);

  StructureResult result;
  result.schedule = schedule;
  for (const auto& p : data.candidates) {
    if (p.is_identity()) continue;
    std::vector<double> samples = node_samples(data, p);
    double d1 = estimate_deriv1(schedule, samples);
    double d2 = estimate_deriv2(schedule, samples);
    result.chi_deriv1[p] = d1;
    result.chi_deriv2[p] = d2;
    if (d2 > opts.eta * opts.eta || d1 > opts.eta / 2.0) result.s_h_hat.insert(p);
  }
  result.queries_used = oracle.queries_used() - q0;
  return result;
}

StructureResult learn_structure(const ChannelOracle& oracle, const StructureOptions& opts) {
  StructureOptions half = opts;
  half.delta = opts.delta / 2.0;
  StructureResult diss = learn_dissipator(oracle, half);
  StructureResult ham = learn_hamiltonian(oracle, half);

  StructureResult result;
  result.s_d_hat = diss.s_d_hat;
  result.s_h_hat = ham.s_h_hat;
  for (const auto& p : diss.s_d_hat) result.s_h_hat.insert(p);
  result.chi_deriv1 = diss.chi_deriv1;
  result.chi_deriv2 = ham.chi_deriv2;
  result.queries_used = diss.queries_used + ham.queries_used;
  result.schedule = ham.schedule;
  return result;
}

ChiIdentityReport chi_derivative_identities_check(const Lindbladian& model) {
  if (model.n > 3) throw CapExceededError("identities check runs at n <= 3");
  validate(model);
  double lambda = std::max(lambda_bound(model), 1e-6);
  // Exact node values: only interpolation bias remains, so tight targets are
  // affordable.
  ChebyshevSchedule sched1 = params_first(1.0, lambda, 2e-7);
  ChebyshevSchedule sched2 = params_second(1.0, lambda, 1e-5);

  ChannelOracle oracle(model);
  auto fit = [&oracle](const ChebyshevSchedule& schedule) {
    std::vector<ChiDiagonal> per_node;
    for (double t : schedule.nodes)
      per_node.push_back(chi_diagonal_exact(oracle.ptm(), t, oracle.max_exhaustive_n,
                                            oracle.evolve_opts));
    return per_node;
  };
  std::vector<ChiDiagonal> nodes1 = fit(sched1);
  std::vector<ChiDiagonal> nodes2 = fit(sched2);

  std::unordered_map<PauliString, double, PauliHash> diag_a;
  for (size_t i = 0; i < model.diss_support.size(); ++i)
    diag_a[model.diss_support[i]] = model.kossakowski(static_cast<Eigen::Index>(i),
                                                      static_cast<Eigen::Index>(i)).real();
  std::unordered_map<PauliString, double, PauliHash> ham_h;
  for (const auto& [p, h] : model.ham_terms) ham_h[p] = h;

  ChiIdentityReport report;
  report.min_d2_slack = std::numeric_limits<double>::infinity();
  bool any_zero_diag = false;
  for (uint64_t code = 1; code < (uint64_t{1} << (2 * model.n)); ++code) {
    PauliString p = PauliString::from_code(model.n, code);
    std::vector<double> s1, s2;
    for (const auto& chi : nodes1) s1.push_back(chi.at(p));
    for (const auto& chi : nodes2) s2.push_back(chi.at(p));
    ChiIdentityReport::Row row;
    row.pauli = p;
    row.a_ii = diag_a.count(p) ? diag_a.at(p) : 0.0;
    row.h_i = ham_h.count(p) ? ham_h.at(p) : 0.0;
    row.fitted_d1 = estimate_deriv1(sched1, s1);
    row.fitted_d2 = estimate_deriv2(sched2, s2);
    if (row.a_ii > 0) {
      report.max_d1_error = std::max(report.max_d1_error, std::abs(row.fitted_d1 - row.a_ii));
    } else {
      any_zero_diag = true;
      report.max_d1_zero = std::max(report.max_d1_zero, std::abs(row.fitted_d1));
      report.min_d2_slack =
          std::min(report.min_d2_slack, row.fitted_d2 - 2.0 * row.h_i * row.h_i);
    }
    report.rows.push_back(std::move(row));
  }
  if (!any_zero_diag) report.min_d2_slack = 0.0;
  return report;
}

}  // namespace lindlearn
