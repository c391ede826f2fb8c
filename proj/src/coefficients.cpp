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

#include "lindlearn/coefficients.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <future>
#include <map>

namespace lindlearn {

namespace {

const Complex kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

inline double diss_factor(int c_k, int c_m) {
  static const double f[2][2] = {{0.0, 1.0}, {-1.0, -2.0}};
  return f[c_k][c_m];
}

/** 2^{-n} tr(R X) for the probe input X; the only nonzero cases are R = I
 * and R = Q. */
double input_overlap(const ProbeInput& input, const PauliString& r) {
  bool is_id = r.is_identity();
  switch (input.kind) {
    case ProbeInput::Kind::Eigenstate:
      if (input.q.is_identity()) return is_id ? 1.0 : 0.0;
      return (is_id ? 1.0 : 0.0) + (r == input.q ? static_cast<double>(input.sign) : 0.0);
    case ProbeInput::Kind::PauliInput:
    default:
      if (input.q.is_identity()) return is_id ? 1.0 : 0.0;
      return r == input.q ? static_cast<double>(input.sign) : 0.0;
  }
}

char flip_letter(char l) {
  switch (l) {
    case 'X': return 'Y';
    case 'Y': return 'Z';
    default: return 'X';
  }
}

double spam_damp_factor(const Probe& probe, const SpamParams& spam) {
  return std::pow(spam.r_prep, probe.input.q.weight()) *
         std::pow(spam.r_meas, probe.observable.weight());
}

/** Incremental Gaussian elimination with partial pivoting over floats.
 * Entries are exact small integers, so the 1e-9 relative pivot threshold sits
 * safely below any true pivot. */
class RankTracker {
 public:
  explicit RankTracker(size_t dim) : dim_(dim) {
    basis_.reserve(std::min<size_t>(dim, 1024) * dim);
  }

  size_t rank() const { return pivots_.size(); }

  bool try_add(const Eigen::RowVectorXd& raw) {
    double raw_max = raw.cwiseAbs().maxCoeff();
    if (raw_max == 0.0) return false;  // empty rows cannot add rank
    scale_ = std::max(scale_, raw_max);
    Eigen::RowVectorXd v = raw;
    const auto dim = static_cast<Eigen::Index>(dim_);
    for (size_t k = 0; k < pivots_.size(); ++k) {
      double c = v[static_cast<Eigen::Index>(pivots_[k])];
      if (c != 0.0) {
        Eigen::Map<const Eigen::RowVectorXd> row(basis_.data() + k * dim_, dim);
        v.noalias() -= (c / pivot_vals_[k]) * row;
      }
    }
    Eigen::Index pivot_col;
    double max_abs = v.cwiseAbs().maxCoeff(&pivot_col);
    if (max_abs <= 1e-9 * std::max(scale_, 1.0)) return false;
    basis_.insert(basis_.end(), v.data(), v.data() + dim_);
    pivots_.push_back(static_cast<size_t>(pivot_col));
    pivot_vals_.push_back(v[pivot_col]);
    return true;
  }

 private:
  size_t dim_;
  std::vector<double> basis_;  // row-major reduced rows
  std::vector<size_t> pivots_;
  std::vector<double> pivot_vals_;
  double scale_ = 0.0;
};

struct Bucket {
  Patch patch;
  unsigned k1 = 0;  // |supp(O)|
  unsigned k2 = 0;  // |supp(Q)|
  std::vector<std::pair<PauliString, PauliString>> pool;  // (O, Q), shuffled
  size_t next = 0;
  bool materialized = false;
};

std::vector<PauliString> weight_k_paulis_on(const Patch& patch, unsigned k, unsigned n) {
  std::vector<PauliString> out;
  for (const auto& p : enumerate_patch_paulis(patch, n))
    if (p.weight() == k) out.push_back(p);
  return out;
}

void materialize_bucket(Bucket& b, unsigned n, RngStream& rng) {
  std::vector<PauliString> os = weight_k_paulis_on(b.patch, b.k1, n);
  std::vector<PauliString> qs = weight_k_paulis_on(b.patch, b.k2, n);
  b.pool.reserve(os.size() * qs.size());
  for (const auto& o : os)
    for (const auto& q : qs) b.pool.emplace_back(o, q);
  rng.shuffle(b.pool);
  b.materialized = true;
}

}  // namespace

ParameterIndex ParameterIndex::full(const std::vector<PauliString>& s_h_hat,
                                    const std::vector<PauliString>& s_d_hat) {
  ParameterIndex index;
  index.h_terms = s_h_hat;
  index.d_terms = s_d_hat;
  for (size_t i = 0; i < s_d_hat.size(); ++i)
    for (size_t j = 0; j < i; ++j) index.pairs.emplace_back(i, j);
  return index;
}

std::set<Patch> patch_family(const std::vector<PauliString>& s_h_hat,
                             const std::vector<PauliString>& s_d_hat) {
  std::set<Patch> patches;
  for (const auto& p : s_h_hat) patches.insert(Patch::support_of(p));
  for (const auto& pi : s_d_hat)
    for (const auto& pj : s_d_hat)
      patches.insert(Patch::support_of(pi).united(Patch::support_of(pj)));
  return patches;
}

std::vector<double> design_row(const Probe& probe, const ParameterIndex& index) {
  const PauliString& o = probe.observable;
  std::vector<double> row(index.dim(), 0.0);

  for (size_t i = 0; i < index.h_terms.size(); ++i) {
    const PauliString& p = index.h_terms[i];
    if (commutes(p, o)) continue;
    PhasedPauli r = multiply(p, o);  // i [P,O] = 2 i^{p+1} R, real by anticommutation
    double c = 2.0 * kIPow[(r.phase_pow + 1) & 3].real();
    row[i] = c * input_overlap(probe.input, r.pauli);
  }

  std::vector<int> sp_with_o(index.d_terms.size());
  for (size_t k = 0; k < index.d_terms.size(); ++k)
    sp_with_o[k] = symplectic_product(index.d_terms[k], o);

  for (size_t k = 0; k < index.d_terms.size(); ++k) {
    double f = diss_factor(sp_with_o[k], sp_with_o[k]);
    if (f == 0.0) continue;
    // P_k O P_k - O = f * O for the diagonal
    row[index.offset_adiag() + k] = f * input_overlap(probe.input, o);
  }

  for (size_t pi = 0; pi < index.pairs.size(); ++pi) {
    auto [i, j] = index.pairs[pi];  // j < i by the ParameterIndex invariant
    // coefficient of a_ij (i > j): P_j O P_i - 1/2 {P_j P_i, O}
    double f = diss_factor(sp_with_o[i], sp_with_o[j]);
    if (f == 0.0) continue;
    PhasedPauli pji = multiply(index.d_terms[j], index.d_terms[i]);
    PhasedPauli r = multiply(pji, PhasedPauli(o, 0));
    Complex c = f * kIPow[r.phase_pow & 3] * input_overlap(probe.input, r.pauli);
    row[index.offset_are() + pi] = 2.0 * c.real();
    row[index.offset_aim() + pi] = -2.0 * c.imag();
  }
  return row;
}

std::vector<Probe> hamiltonian_prepass(const std::vector<PauliString>& s_h_hat, unsigned n,
                                       bool as_pauli_input) {
  std::vector<Probe> probes;
  probes.reserve(s_h_hat.size());
  for (const auto& p : s_h_hat) {
    if (p.is_identity()) throw IdentityTermPresentError("identity in candidate set");
    unsigned q0 = static_cast<unsigned>(std::countr_zero(p.support_mask()));
    // flip the first support site's letter cyclically; O anticommutes with P
    char flipped = flip_letter(p.letter(q0));
    uint64_t bit = uint64_t{1} << q0;
    uint64_t x = p.x_bits(), z = p.z_bits();
    x &= ~bit;
    z &= ~bit;
    if (flipped == 'X' || flipped == 'Y') x |= bit;
    if (flipped == 'Z' || flipped == 'Y') z |= bit;
    PauliString o(n, x, z);
    // Q = i O P is Hermitian since {O, P} = 0; fold the phase into the sign.
    PhasedPauli q = multiply(PhasedPauli(o, 1), PhasedPauli(p, 0));
    int sign = q.sign();
    Probe probe;
    probe.input = as_pauli_input ? ProbeInput::pauli_input(q.pauli, sign)
                                 : ProbeInput::eigenstate(q.pauli, sign);
    probe.observable = o;
    probe.patch = Patch::support_of(p);
    probes.push_back(std::move(probe));
  }
  return probes;
}

DesignSystem select_probes(const ParameterIndex& index, unsigned n, const SelectOptions& opts) {
  const size_t m_hat = index.dim();
  if (m_hat < 1) throw InvalidInputError("empty parameter index");

  // Patch family induced by the tracked parameters.
  std::set<Patch> patch_set;
  for (const auto& p : index.h_terms) patch_set.insert(Patch::support_of(p));
  for (const auto& p : index.d_terms) patch_set.insert(Patch::support_of(p));
  for (const auto& [i, j] : index.pairs)
    patch_set.insert(
        Patch::support_of(index.d_terms[i]).united(Patch::support_of(index.d_terms[j])));
  std::vector<Patch> patches(patch_set.begin(), patch_set.end());
  std::sort(patches.begin(), patches.end(), [](const Patch& a, const Patch& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a.mask() < b.mask();
  });

  DesignSystem design;
  design.param_index = index;
  RankTracker tracker(m_hat);
  std::vector<Eigen::RowVectorXd> kept_rows;

  auto attempt = [&](const Probe& probe) {
    std::vector<double> row = design_row(probe, index);
    Eigen::RowVectorXd v =
        Eigen::Map<const Eigen::RowVectorXd>(row.data(), static_cast<Eigen::Index>(row.size()));
    ++design.attempts;
    bool added = tracker.try_add(v);
    if (added) {
      kept_rows.push_back(v);
      design.probes.push_back(probe);
    }
    design.rank_trace.emplace_back(design.attempts, tracker.rank());
    return added;
  };

  // Hamiltonian pre-pass. On generic candidates every probe here should add
  // rank; misses are recorded as a warning, not a failure.
  for (const Probe& probe : hamiltonian_prepass(index.h_terms, n, opts.pauli_input_only)) {
    if (tracker.rank() == m_hat) break;
    if (!attempt(probe)) ++design.prepass_rank_misses;
  }

  // Patchwise augmentation: budgeted round-robin over (patch, k1, k2)
  // buckets, levels visited in increasing k1 + k2.
  if (tracker.rank() < m_hat) {
    unsigned max_size = 0;
    for (const auto& t : patches) max_size = std::max(max_size, t.size());
    RngStream scheduler_rng = derive_stream(opts.seed, 0.0, 0x5e1ec7);
    bool done = false;
    for (unsigned level = 1; level <= 2 * max_size && !done; ++level) {
      std::vector<Bucket> buckets;
      for (const auto& t : patches) {
        for (unsigned k1 = 1; k1 <= std::min(t.size(), level); ++k1) {
          unsigned k2 = level - k1;
          if (k2 > t.size()) continue;
          Bucket b;
          b.patch = t;
          b.k1 = k1;
          b.k2 = k2;
          buckets.push_back(std::move(b));
        }
      }
      bool level_exhausted = false;
      while (!level_exhausted && !done) {
        level_exhausted = true;
        for (auto& b : buckets) {
          if (!b.materialized) materialize_bucket(b, n, scheduler_rng);
          if (b.next >= b.pool.size()) continue;
          level_exhausted = false;
          const auto& [o, q] = b.pool[b.next++];
          Probe probe;
          probe.input = ProbeInput::pauli_input(q, +1);
          probe.observable = o;
          probe.patch = b.patch;
          attempt(probe);
          if (tracker.rank() == m_hat) {
            done = true;
            break;
          }
        }
      }
    }
    if (tracker.rank() < m_hat)
      throw RankStalledError("probe pool exhausted at rank " + std::to_string(tracker.rank()) +
                             " of " + std::to_string(m_hat) +
                             "; candidate structures are inconsistent");
  }

  design.matrix.resize(static_cast<Eigen::Index>(kept_rows.size()),
                       static_cast<Eigen::Index>(m_hat));
  for (size_t i = 0; i < kept_rows.size(); ++i)
    design.matrix.row(static_cast<Eigen::Index>(i)) = kept_rows[i];
  if (opts.compute_nu) design.nu = conditioning_factor(design.matrix);
  return design;
}

DesignSystem select_probes(const std::vector<PauliString>& s_h_hat,
                           const std::vector<PauliString>& s_d_hat, unsigned n,
                           const SelectOptions& opts) {
  return select_probes(ParameterIndex::full(s_h_hat, s_d_hat), n, opts);
}

double conditioning_factor(const Eigen::MatrixXd& c) {
  if (c.rows() != c.cols()) throw SingularError("conditioning factor needs a square matrix");
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(c);
  double max_u = lu.matrixLU().diagonal().cwiseAbs().maxCoeff();
  double min_u = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(min_u > 1e-12 * std::max(max_u, 1.0)))
    throw SingularError("design matrix is numerically singular");
  Eigen::MatrixXd inv = lu.inverse();
  return inv.cwiseAbs().rowwise().sum().maxCoeff();
}

double estimate_probe_derivative(const ChannelOracle& oracle, const Probe& probe,
                                 const ChebyshevSchedule& schedule, double delta_s) {
  std::vector<double> samples;
  samples.reserve(schedule.nodes.size());
  for (double t : schedule.nodes)
    samples.push_back(
        oracle.estimate_expectation(probe.input, probe.observable, t, schedule.eps_s, delta_s));
  return estimate_deriv1(schedule, samples);
}

double spam_rescale(double raw, const Probe& probe, double r_prep, double r_meas) {
  if (r_prep <= 0 || r_prep > 1 || r_meas <= 0 || r_meas > 1)
    throw ZeroRetentionError("retentions must be in (0,1]");
  double factor = spam_damp_factor(probe, SpamParams{r_prep, r_meas});
  return raw / factor;
}

double exact_probe_derivative(const Lindbladian& model, const Probe& probe) {
  AdjointPTM ptm(model);
  double acc = 0.0;
  for (const auto& e : ptm.column(probe.observable))
    acc += e.coeff.real() * input_overlap(probe.input, e.pauli);
  return acc;
}

CoefficientEstimate learn_coefficients(const ChannelOracle& oracle,
                                       const std::vector<PauliString>& s_h_hat,
                                       const std::vector<PauliString>& s_d_hat,
                                       const LearnCoefficientsOptions& opts) {
  if (s_h_hat.empty() && s_d_hat.empty())
    throw InvalidInputError("need at least one candidate term");
  const unsigned n = oracle.model().n;
  const bool spam_active = oracle.spam().has_value();

  SelectOptions select_opts;
  select_opts.seed = opts.seed;
  select_opts.pauli_input_only = spam_active;  // keeps the damping a pure product
  DesignSystem design = select_probes(ParameterIndex::full(s_h_hat, s_d_hat), n, select_opts);

  // Schedule from the candidate dual degree; fall back to the sparsity bound
  // when the candidate graph is degenerate.
  unsigned d_hat = candidate_dual_degree(s_h_hat, s_d_hat);
  double lambda = d_hat > 0 ? 2.0 * static_cast<double>(d_hat)
                            : 2.0 * static_cast<double>(design.param_index.dim());
  double eps_d = std::max(opts.eps / design.nu, opts.eps_d_floor);
  ChebyshevSchedule schedule = params_first_factorial(1.0, lambda, eps_d);

  std::vector<Probe> probes = design.probes;
  size_t base_probes = probes.size();

  if (opts.oversample > 0) {
    // Extra rank-redundant probes for the normal-equations path.
    RngStream rng = derive_stream(opts.seed, 0.0, 0x0E52);
    std::set<Patch> pf = patch_family(s_h_hat, s_d_hat);
    std::vector<Patch> patches(pf.begin(), pf.end());
    for (size_t k = 0; k < opts.oversample && !patches.empty(); ++k) {
      const Patch& t = patches[rng.uniform_int(patches.size())];
      auto pool = enumerate_patch_paulis(t, n);
      PauliString o = pool[1 + rng.uniform_int(pool.size() - 1)];  // skip identity
      PauliString q = pool[rng.uniform_int(pool.size())];
      Probe probe;
      probe.input = ProbeInput::pauli_input(q, +1);
      probe.observable = o;
      probe.patch = t;
      probes.push_back(std::move(probe));
    }
  }

  uint64_t q0 = oracle.queries_used();
  double delta_s = opts.delta / (static_cast<double>(probes.size()) *
                                 static_cast<double>(schedule.nodes.size()));

  std::vector<double> data(probes.size(), 0.0);
  if (opts.mode == AcquisitionMode::Shadow) {
    for (const auto& probe : probes) {
      if (probe.observable.weight() > opts.locality_cap ||
          probe.input.q.weight() > opts.locality_cap)
        throw LocalityCapExceededError("shadow mode requires probes up to locality " +
                                       std::to_string(opts.locality_cap));
    }
    double min_damp = 1.0;
    if (spam_active)
      for (const auto& probe : probes)
        min_damp = std::min(min_damp, spam_damp_factor(probe, *oracle.spam()));
    double node_delta = opts.delta / static_cast<double>(schedule.nodes.size());
    std::vector<std::vector<double>> node_estimates;
    for (double t : schedule.nodes)
      node_estimates.push_back(shadow_estimate_all(oracle, probes, t, schedule.eps_s * min_damp,
                                                   node_delta, opts.seed, opts.locality_cap));
    for (size_t p = 0; p < probes.size(); ++p) {
      std::vector<double> samples(schedule.nodes.size());
      for (size_t m = 0; m < schedule.nodes.size(); ++m) samples[m] = node_estimates[m][p];
      data[p] = estimate_deriv1(schedule, samples);
    }
  } else {
    auto run_range = [&](size_t lo, size_t hi) {
      for (size_t p = lo; p < hi; ++p) {
        double eps_node = schedule.eps_s;
        if (spam_active) eps_node *= spam_damp_factor(probes[p], *oracle.spam());
        std::vector<double> samples;
        samples.reserve(schedule.nodes.size());
        for (double t : schedule.nodes)
          samples.push_back(oracle.estimate_expectation(probes[p].input, probes[p].observable, t,
                                                        eps_node, delta_s));
        data[p] = estimate_deriv1(schedule, samples);
      }
    };
    unsigned workers = std::max(1u, opts.threads);
    if (workers == 1 || probes.size() < 2) {
      run_range(0, probes.size());
    } else {
      std::vector<std::future<void>> futures;
      size_t chunk = (probes.size() + workers - 1) / workers;
      for (unsigned w = 0; w < workers; ++w) {
        size_t lo = w * chunk, hi = std::min(probes.size(), lo + chunk);
        if (lo >= hi) break;
        futures.push_back(std::async(std::launch::async, run_range, lo, hi));
      }
      for (auto& f : futures) f.get();
    }
  }

  if (spam_active) {
    const SpamParams& spam = *oracle.spam();
    for (size_t p = 0; p < probes.size(); ++p)
      data[p] = spam_rescale(data[p], probes[p], spam.r_prep, spam.r_meas);
  }

  const auto m_hat = static_cast<Eigen::Index>(design.param_index.dim());
  Eigen::VectorXd x_hat;
  Eigen::MatrixXd c_used;
  Eigen::VectorXd d_used;
  if (opts.oversample == 0) {
    c_used = design.matrix;
    d_used = Eigen::Map<const Eigen::VectorXd>(data.data(), m_hat);
    x_hat = Eigen::PartialPivLU<Eigen::MatrixXd>(c_used).solve(d_used);
  } else {
    c_used.resize(static_cast<Eigen::Index>(probes.size()), m_hat);
    c_used.topRows(static_cast<Eigen::Index>(base_probes)) = design.matrix;
    for (size_t p = base_probes; p < probes.size(); ++p) {
      std::vector<double> row = design_row(probes[p], design.param_index);
      c_used.row(static_cast<Eigen::Index>(p)) =
          Eigen::Map<const Eigen::RowVectorXd>(row.data(), m_hat);
    }
    d_used = Eigen::Map<const Eigen::VectorXd>(data.data(),
                                               static_cast<Eigen::Index>(data.size()));
    x_hat = (c_used.transpose() * c_used)
                .ldlt()
                .solve(c_used.transpose() * d_used);
  }

  CoefficientEstimate est;
  est.nu = design.nu;
  est.deriv_accuracy = eps_d;
  est.probes_used = probes.size();
  est.queries_used = oracle.queries_used() - q0;
  est.rank_trace = design.rank_trace;
  est.residual = (c_used * x_hat - d_used).cwiseAbs().maxCoeff();

  const ParameterIndex& index = design.param_index;
  for (size_t i = 0; i < index.h_terms.size(); ++i)
    est.h_hat[index.h_terms[i]] = x_hat[static_cast<Eigen::Index>(i)];
  est.d_terms = index.d_terms;
  const auto m_d = static_cast<Eigen::Index>(index.d_terms.size());
  est.a_hat = CMatrix::Zero(m_d, m_d);
  for (size_t k = 0; k < index.d_terms.size(); ++k)
    est.a_hat(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) =
        x_hat[static_cast<Eigen::Index>(index.offset_adiag() + k)];
  for (size_t pi = 0; pi < index.pairs.size(); ++pi) {
    auto [i, j] = index.pairs[pi];
    double re = x_hat[static_cast<Eigen::Index>(index.offset_are() + pi)];
    double im = x_hat[static_cast<Eigen::Index>(index.offset_aim() + pi)];
    est.a_hat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = Complex(re, im);
    est.a_hat(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = Complex(re, -im);
  }
  return est;
}

}  // namespace lindlearn
