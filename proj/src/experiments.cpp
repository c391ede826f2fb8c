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

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <future>
#include <set>

namespace lindlearn {

namespace {

PauliString single_site(unsigned n, unsigned site, char letter) {
  uint64_t bit = uint64_t{1} << site;
  uint64_t x = (letter == 'X' || letter == 'Y') ? bit : 0;
  uint64_t z = (letter == 'Z' || letter == 'Y') ? bit : 0;
  return PauliString(n, x, z);
}

PauliString on_sites(unsigned n, const std::vector<unsigned>& sites,
                     const std::vector<char>& letters) {
  uint64_t x = 0, z = 0;
  for (size_t i = 0; i < sites.size(); ++i) {
    uint64_t bit = uint64_t{1} << sites[i];
    if (letters[i] == 'X' || letters[i] == 'Y') x |= bit;
    if (letters[i] == 'Z' || letters[i] == 'Y') z |= bit;
  }
  return PauliString(n, x, z);
}

const char kLetters[3] = {'X', 'Y', 'Z'};

}  // namespace

LatticeCandidates lattice_candidate_family(unsigned lx, unsigned ly, uint64_t seed) {
  const unsigned n = lx * ly;
  auto site = [lx](unsigned x, unsigned y) { return y * lx + x; };

  // NN / NNN / NNNN pairs on the periodic lattice, deduplicated; wraparound
  // self-pairs on tiny lattices are dropped.
  std::set<std::pair<unsigned, unsigned>> pairs;
  auto add_pair = [&pairs](unsigned a, unsigned b) {
    if (a == b) return;
    pairs.emplace(std::min(a, b), std::max(a, b));
  };
  for (unsigned y = 0; y < ly; ++y) {
    for (unsigned x = 0; x < lx; ++x) {
      unsigned s = site(x, y);
      add_pair(s, site((x + 1) % lx, y));
      add_pair(s, site(x, (y + 1) % ly));
      add_pair(s, site((x + 1) % lx, (y + 1) % ly));
      add_pair(s, site((x + 1) % lx, (y + ly - 1) % ly));
      add_pair(s, site((x + 2) % lx, y));
      add_pair(s, site(x, (y + 2) % ly));
    }
  }

  LatticeCandidates fam;
  fam.n = n;
  for (unsigned q = 0; q < n; ++q)
    for (char l : kLetters) fam.s_h_hat.push_back(single_site(n, q, l));
  for (const auto& [a, b] : pairs)
    for (char la : kLetters)
      for (char lb : kLetters) fam.s_h_hat.push_back(on_sites(n, {a, b}, {la, lb}));

  // Theta(n) random nonlocal terms, scaled to ~50 three-local and ~10
  // four-local at n = 42.
  RngStream rng = derive_stream(seed, 0.0, 0x1a77);
  auto random_term = [&](unsigned locality) {
    std::vector<unsigned> sites;
    while (sites.size() < locality) {
      unsigned q = static_cast<unsigned>(rng.uniform_int(n));
      if (std::find(sites.begin(), sites.end(), q) == sites.end()) sites.push_back(q);
    }
    std::vector<char> letters;
    for (size_t i = 0; i < sites.size(); ++i)
      letters.push_back(kLetters[rng.uniform_int(3)]);
    return on_sites(n, sites, letters);
  };
  std::set<PauliString> nonlocal;
  size_t want3 = std::max<size_t>(1, (50 * n + 21) / 42);
  size_t want4 = n >= 4 ? std::max<size_t>(1, (10 * n + 21) / 42) : 0;
  while (nonlocal.size() < want3) nonlocal.insert(random_term(3));
  size_t have3 = nonlocal.size();
  while (nonlocal.size() < have3 + want4) nonlocal.insert(random_term(4));
  for (const auto& p : nonlocal) fam.s_h_hat.push_back(p);

  for (unsigned q = 0; q < n; ++q)
    for (char l : kLetters) fam.s_d_hat.push_back(single_site(n, q, l));
  for (const auto& [a, b] : pairs)
    for (char la : kLetters)
      for (char lb : kLetters) fam.s_d_hat.push_back(on_sites(n, {a, b}, {la, lb}));

  // Restricted parameter index: every diagonal, off-diagonals only over
  // single-qubit Pauli pairs (the collective-jump couplings).
  fam.index.h_terms = fam.s_h_hat;
  fam.index.d_terms = fam.s_d_hat;
  size_t single_count = 3 * static_cast<size_t>(n);
  for (size_t i = 0; i < single_count; ++i)
    for (size_t j = 0; j < i; ++j) fam.index.pairs.emplace_back(i, j);
  return fam;
}

ConditionSweepRow run_condition_seed(unsigned lx, unsigned ly, uint64_t seed) {
  LatticeCandidates fam = lattice_candidate_family(lx, ly, seed);
  SelectOptions opts;
  opts.seed = seed;
  DesignSystem design = select_probes(fam.index, fam.n, opts);
  ConditionSweepRow row;
  row.n = fam.n;
  row.seed = seed;
  row.nu = design.nu;
  row.m_hat = fam.index.dim();
  row.attempts = design.attempts;
  row.prepass_rank_misses = design.prepass_rank_misses;
  row.rank_trace = std::move(design.rank_trace);
  return row;
}

std::vector<ConditionSweepRow> run_condition_sweep(
    const std::vector<std::pair<unsigned, unsigned>>& shapes, unsigned seeds_per_shape,
    unsigned threads) {
  struct Job {
    unsigned lx, ly;
    uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& [lx, ly] : shapes)
    for (unsigned s = 0; s < seeds_per_shape; ++s) jobs.push_back({lx, ly, s});

  std::vector<ConditionSweepRow> rows(jobs.size());
  unsigned workers = std::max(1u, threads);
  std::atomic<size_t> cursor{0};
  auto work = [&]() {
    while (true) {
      size_t i = cursor.fetch_add(1);
      if (i >= jobs.size()) break;
      rows[i] = run_condition_seed(jobs[i].lx, jobs[i].ly, jobs[i].seed);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::future<void>> futures;
    for (unsigned w = 0; w < workers; ++w)
      futures.push_back(std::async(std::launch::async, work));
    for (auto& f : futures) f.get();
  }
  return rows;  // already in (shape, seed) order
}

Lindbladian random_model(uint64_t seed, unsigned max_n, double eta_min) {
  RngStream rng = derive_stream(seed, 0.0, 0x30de1);
  unsigned n = 1 + static_cast<unsigned>(rng.uniform_int(max_n));
  size_t dim = size_t{1} << (2 * n);

  auto random_nonid = [&]() {
    uint64_t code = 1 + rng.uniform_int(dim - 1);
    return PauliString::from_code(n, code);
  };

  size_t m_h = rng.uniform_int(4);      // 0..3 Hamiltonian terms
  size_t m_d = 1 + rng.uniform_int(2);  // 1..2 dissipator terms

  std::set<PauliString> h_set;
  while (h_set.size() < m_h && h_set.size() < dim - 1) h_set.insert(random_nonid());
  std::set<PauliString> d_set;
  while (d_set.size() < m_d && d_set.size() < dim - 1) d_set.insert(random_nonid());

  Lindbladian model;
  model.n = n;
  for (const auto& p : h_set) {
    double mag = eta_min + (1.0 - eta_min) * rng.uniform();
    double sign = rng.uniform() < 0.5 ? 1.0 : -1.0;
    model.ham_terms.emplace_back(p, sign * mag);
  }
  model.diss_support.assign(d_set.begin(), d_set.end());

  // Kossakowski from a random unitary and eigenvalues in [eta_min, 1]; the
  // unitary rows are unit vectors, so every diagonal entry is >= eta_min.
  const auto md = static_cast<Eigen::Index>(model.diss_support.size());
  CMatrix g(md, md);
  for (Eigen::Index i = 0; i < md; ++i)
    for (Eigen::Index j = 0; j < md; ++j) g(i, j) = Complex(rng.gaussian(), rng.gaussian());
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix u = qr.householderQ();
  Eigen::VectorXd evals(md);
  for (Eigen::Index i = 0; i < md; ++i) evals[i] = eta_min + (1.0 - eta_min) * rng.uniform();
  model.kossakowski = u * evals.asDiagonal() * u.adjoint();
  // symmetrize away eigensolver rounding
  model.kossakowski = (model.kossakowski + model.kossakowski.adjoint()) / 2.0;
  validate(model);
  return model;
}

std::vector<PauliString> true_s_h(const Lindbladian& model) {
  std::vector<PauliString> out;
  for (const auto& [p, h] : model.ham_terms)
    if (std::abs(h) > 1e-14) out.push_back(p);
  return out;
}

std::vector<PauliString> true_s_d(const Lindbladian& model) {
  std::vector<PauliString> out;
  for (size_t i = 0; i < model.diss_support.size(); ++i)
    if (model.kossakowski(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real() >
        1e-14)
      out.push_back(model.diss_support[i]);
  return out;
}

EndToEndReport run_end_to_end(const ChannelOracle& oracle, const StructureOptions& sopts,
                              const LearnCoefficientsOptions& copts) {
  auto start = std::chrono::steady_clock::now();
  EndToEndReport report;
  report.structure = learn_structure(oracle, sopts);

  std::vector<PauliString> s_h(report.structure.s_h_hat.begin(), report.structure.s_h_hat.end());
  std::vector<PauliString> s_d(report.structure.s_d_hat.begin(), report.structure.s_d_hat.end());
  report.coefficients = learn_coefficients(oracle, s_h, s_d, copts);

  // Threshold pruning: estimates below eta/2 are treated as false positives.
  double prune = sopts.eta / 2.0;
  for (auto it = report.coefficients.h_hat.begin(); it != report.coefficients.h_hat.end();) {
    if (std::abs(it->second) <= prune) {
      report.pruned.push_back(it->first);
      it = report.coefficients.h_hat.erase(it);
    } else {
      ++it;
    }
  }

  // Compare against ground truth.
  const Lindbladian& model = oracle.model();
  std::unordered_map<PauliString, double, PauliHash> h_true;
  for (const auto& [p, h] : model.ham_terms) h_true[p] = h;
  std::set<PauliString> h_keys;
  for (const auto& [p, h] : h_true) h_keys.insert(p);
  for (const auto& [p, h] : report.coefficients.h_hat) h_keys.insert(p);
  for (const auto& p : h_keys) {
    double t = h_true.count(p) ? h_true.at(p) : 0.0;
    double e = report.coefficients.h_hat.count(p) ? report.coefficients.h_hat.at(p) : 0.0;
    report.max_h_error = std::max(report.max_h_error, std::abs(t - e));
  }

  std::unordered_map<PauliString, size_t, PauliHash> true_idx;
  for (size_t i = 0; i < model.diss_support.size(); ++i) true_idx[model.diss_support[i]] = i;
  const auto& d_terms = report.coefficients.d_terms;
  for (size_t i = 0; i < d_terms.size(); ++i) {
    for (size_t j = 0; j < d_terms.size(); ++j) {
      Complex est = report.coefficients.a_hat(static_cast<Eigen::Index>(i),
                                              static_cast<Eigen::Index>(j));
      Complex truth(0, 0);
      auto it_i = true_idx.find(d_terms[i]);
      auto it_j = true_idx.find(d_terms[j]);
      if (it_i != true_idx.end() && it_j != true_idx.end())
        truth = model.kossakowski(static_cast<Eigen::Index>(it_i->second),
                                  static_cast<Eigen::Index>(it_j->second));
      report.max_a_error = std::max(report.max_a_error, std::abs(est - truth));
    }
  }

  report.total_queries = report.structure.queries_used + report.coefficients.queries_used;
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace lindlearn
