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

#include "lindlearn/evolution.hpp"

#include <algorithm>
#include <cmath>

namespace lindlearn {

namespace {
constexpr double kZeroThreshold = 1e-14;

const Complex kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

double l1_norm(const PauliVector& v) {
  double s = 0.0;
  for (const auto& [p, c] : v) s += std::abs(c);
  return s;
}

/**
 * Collapsed dissipative action on a Pauli: with c_k = <P_k,O>, c_m = <P_m,O>
 * symplectic products, P_m O P_k - 1/2 {P_m P_k, O} = f(c_k, c_m) P_m P_k O
 * with f(0,0)=0, f(1,0)=-1, f(0,1)=+1, f(1,1)=-2.
 */
inline double diss_factor(int c_k, int c_m) {
  static const double f[2][2] = {{0.0, 1.0}, {-1.0, -2.0}};
  return f[c_k][c_m];
}
}  // namespace

AdjointPTM::AdjointPTM(const Lindbladian& model) : n_(model.n) {
  for (const auto& [p, h] : model.ham_terms) {
    if (std::abs(h) > kZeroThreshold) ham_.push_back({p, h});
  }
  const auto m_d = static_cast<Eigen::Index>(model.diss_support.size());
  for (Eigen::Index k = 0; k < m_d; ++k) {
    for (Eigen::Index m = 0; m < m_d; ++m) {
      Complex a = model.kossakowski(k, m);
      if (std::abs(a) <= kZeroThreshold) continue;
      const PauliString& pk = model.diss_support[static_cast<size_t>(k)];
      const PauliString& pm = model.diss_support[static_cast<size_t>(m)];
      diss_.push_back({pk, pm, multiply(pm, pk), a});
    }
  }
  for (const auto& t : ham_) l1_bound_ += 2.0 * std::abs(t.h);
  for (const auto& t : diss_) l1_bound_ += 2.0 * std::abs(t.a);

  if (n_ <= kDenseCap) {
    dense_cols_.resize(size_t{1} << (2 * n_));
    for (uint64_t code = 0; code < dense_cols_.size(); ++code) {
      for (const auto& e : column(PauliString::from_code(n_, code)))
        dense_cols_[code].push_back({static_cast<uint32_t>(e.pauli.code()), e.coeff});
    }
  }
}

std::vector<AdjointPTM::Entry> AdjointPTM::column(const PauliString& o) const {
  PauliVector acc;
  for (const auto& term : ham_) {
    if (commutes(term.p, o)) continue;
    // i h [P, O] = 2 i h (P O)
    PhasedPauli r = multiply(term.p, o);
    acc[r.pauli] += 2.0 * term.h * kIPow[(r.phase_pow + 1) & 3];
  }
  for (const auto& term : diss_) {
    int c_k = symplectic_product(term.p_k, o);
    int c_m = symplectic_product(term.p_m, o);
    double f = diss_factor(c_k, c_m);
    if (f == 0.0) continue;
    PhasedPauli r = multiply(term.p_mk, PhasedPauli(o, 0));
    acc[r.pauli] += term.a * f * kIPow[r.phase_pow & 3];
  }
  std::vector<Entry> out;
  out.reserve(acc.size());
  for (const auto& [p, c] : acc) {
    if (std::abs(c) > 0.0) out.push_back({p, c});
  }
  return out;
}

PauliVector AdjointPTM::apply(const PauliVector& v) const {
  PauliVector out;
  for (const auto& [p, c] : v) {
    for (const auto& e : column(p)) out[e.pauli] += c * e.coeff;
  }
  return out;
}

namespace {

unsigned scaling_steps(const AdjointPTM& ptm, double t, const EvolveOptions& opts) {
  double g = ptm.column_l1_bound();
  auto steps_needed = std::ceil(t * g);
  if (steps_needed > static_cast<double>(opts.max_steps))
    throw NonConvergentError("evolution needs " + std::to_string(steps_needed) +
                             " scaling steps, budget " + std::to_string(opts.max_steps));
  return std::max(1u, static_cast<unsigned>(steps_needed));
}

PauliVector evolve_sparse(const AdjointPTM& ptm, double t, const PauliVector& v0,
                          const EvolveOptions& opts) {
  unsigned steps = scaling_steps(ptm, t, opts);
  double tau = t / steps;
  PauliVector y = v0;
  for (unsigned s = 0; s < steps; ++s) {
    PauliVector acc = y;
    PauliVector term = y;
    bool converged = false;
    for (unsigned j = 1; j <= 60; ++j) {
      PauliVector next = ptm.apply(term);
      double scale = tau / j;
      for (auto& [p, c] : next) c *= scale;
      term = std::move(next);
      for (const auto& [p, c] : term) acc[p] += c;
      if (l1_norm(term) <= opts.rel_tol * std::max(1.0, l1_norm(acc))) {
        converged = true;
        break;
      }
    }
    if (!converged) throw NonConvergentError("Taylor series did not converge within 60 terms");
    y = std::move(acc);
  }
  return y;
}

void evolve_dense_inplace(const AdjointPTM& ptm, double t, std::vector<Complex>& y,
                          const EvolveOptions& opts) {
  const auto& cols = ptm.dense_columns();
  const size_t dim = cols.size();
  unsigned steps = scaling_steps(ptm, t, opts);
  double tau = t / steps;
  std::vector<Complex> acc(dim), term(dim), next(dim);
  for (unsigned s = 0; s < steps; ++s) {
    acc = y;
    term = y;
    bool converged = false;
    for (unsigned j = 1; j <= 60; ++j) {
      std::fill(next.begin(), next.end(), Complex(0, 0));
      double scale = tau / j;
      for (size_t in = 0; in < dim; ++in) {
        Complex c = term[in];
        if (c.real() == 0.0 && c.imag() == 0.0) continue;
        c *= scale;
        for (const auto& e : cols[in]) next[e.out_code] += e.coeff * c;
      }
      term.swap(next);
      double term_l1 = 0.0, acc_l1 = 0.0;
      for (size_t i = 0; i < dim; ++i) {
        acc[i] += term[i];
        term_l1 += std::abs(term[i]);
        acc_l1 += std::abs(acc[i]);
      }
      if (term_l1 <= opts.rel_tol * std::max(1.0, acc_l1)) {
        converged = true;
        break;
      }
    }
    if (!converged) throw NonConvergentError("Taylor series did not converge within 60 terms");
    y = acc;
  }
}

}  // namespace

PauliVector evolve_vector(const AdjointPTM& ptm, double t, const PauliVector& v0,
                          const EvolveOptions& opts) {
  if (t < 0) throw InvalidInputError("evolution time must be >= 0");
  if (t == 0.0 || v0.empty()) return v0;
  if (!ptm.has_dense()) return evolve_sparse(ptm, t, v0, opts);

  std::vector<Complex> y(size_t{1} << (2 * ptm.n()), Complex(0, 0));
  for (const auto& [p, c] : v0) y[p.code()] += c;
  evolve_dense_inplace(ptm, t, y, opts);
  PauliVector out;
  for (uint64_t code = 0; code < y.size(); ++code) {
    if (std::abs(y[code]) > 0.0) out[PauliString::from_code(ptm.n(), code)] = y[code];
  }
  return out;
}

PauliVector evolve_observable(const AdjointPTM& ptm, double t, const PauliString& o,
                              const EvolveOptions& opts) {
  PauliVector v0;
  v0[o] = Complex(1, 0);
  return evolve_vector(ptm, t, v0, opts);
}

void symplectic_wht_inplace(std::vector<double>& a, unsigned n) {
  // Single-qubit kernel K[c1][c2] = (-1)^{<c1, c2>} over codes I,X,Z,Y.
  static const double kKernel[4][4] = {
      {1, 1, 1, 1}, {1, 1, -1, -1}, {1, -1, 1, -1}, {1, -1, -1, 1}};
  for (unsigned q = 0; q < n; ++q) {
    size_t stride = size_t{1} << (2 * q);
    for (size_t base = 0; base < a.size(); base += stride * 4) {
      for (size_t off = 0; off < stride; ++off) {
        double v[4];
        for (int c = 0; c < 4; ++c) v[c] = a[base + off + stride * static_cast<size_t>(c)];
        for (int c1 = 0; c1 < 4; ++c1) {
          double s = 0.0;
          for (int c2 = 0; c2 < 4; ++c2) s += kKernel[c1][c2] * v[c2];
          a[base + off + stride * static_cast<size_t>(c1)] = s;
        }
      }
    }
  }
}

std::vector<double> pauli_fidelities(const AdjointPTM& ptm, double t, unsigned max_exhaustive_n,
                                     const EvolveOptions& opts) {
  unsigned n = ptm.n();
  if (n > max_exhaustive_n)
    throw CapExceededError("fidelity enumeration needs n <= " + std::to_string(max_exhaustive_n));
  std::vector<double> lambda(size_t{1} << (2 * n), 0.0);
  lambda[0] = 1.0;  // identity is preserved exactly
  if (ptm.has_dense() && t > 0.0) {
    std::vector<Complex> y(lambda.size());
    for (uint64_t code = 1; code < lambda.size(); ++code) {
      std::fill(y.begin(), y.end(), Complex(0, 0));
      y[code] = 1.0;
      evolve_dense_inplace(ptm, t, y, opts);
      lambda[code] = y[code].real();
    }
    return lambda;
  }
  for (uint64_t code = 1; code < lambda.size(); ++code) {
    PauliString q = PauliString::from_code(n, code);
    PauliVector v = evolve_observable(ptm, t, q, opts);
    auto it = v.find(q);
    lambda[code] = it == v.end() ? 0.0 : it->second.real();
  }
  return lambda;
}

ChiDiagonal chi_diagonal_exact(const AdjointPTM& ptm, double t, unsigned max_exhaustive_n,
                               const EvolveOptions& opts) {
  unsigned n = ptm.n();
  std::vector<double> chi = pauli_fidelities(ptm, t, max_exhaustive_n, opts);
  symplectic_wht_inplace(chi, n);
  double norm = std::ldexp(1.0, -2 * static_cast<int>(n));  // 4^{-n}
  ChiDiagonal out;
  out.t = t;
  out.n = n;
  for (uint64_t code = 0; code < chi.size(); ++code)
    out.entries[PauliString::from_code(n, code)] = chi[code] * norm;
  return out;
}

double damp_fidelity(double lambda_q, const PauliString& q, const SpamParams& spam) {
  if (spam.r_prep <= 0 || spam.r_meas <= 0) throw ZeroRetentionError("retentions must be in (0,1]");
  return lambda_q * std::pow(spam.r_prep * spam.r_meas, q.weight());
}

uint64_t probe_stream_id(const ProbeInput& input, const PauliString& o) {
  uint64_t h = 0x9e3779b97f4a7c15ULL;
  h = hash_combine(h, static_cast<uint64_t>(input.kind == ProbeInput::Kind::Eigenstate));
  h = hash_combine(h, input.q.x_bits());
  h = hash_combine(h, input.q.z_bits());
  h = hash_combine(h, static_cast<uint64_t>(input.sign + 2));
  h = hash_combine(h, o.x_bits());
  h = hash_combine(h, o.z_bits());
  return h;
}

std::pair<double, double> ChannelOracle::damped_components(const ProbeInput& input,
                                                           const PauliString& o, double t) const {
  PauliVector v = evolve_observable(ptm_, t, o, evolve_opts);
  const PauliString id = PauliString::identity(model_.n);
  double c_i = 0.0, c_q = 0.0;
  if (auto it = v.find(id); it != v.end()) c_i = it->second.real();
  if (!input.q.is_identity()) {
    if (auto it = v.find(input.q); it != v.end()) c_q = it->second.real();
  }
  double damp_i = 1.0, damp_q = 1.0;
  if (spam_) {
    double r_m = std::pow(spam_->r_meas, o.weight());
    damp_i = r_m;
    damp_q = r_m * std::pow(spam_->r_prep, input.q.weight());
  }
  return {damp_i * c_i, damp_q * c_q};
}

double ChannelOracle::expectation(const ProbeInput& input, const PauliString& o, double t) const {
  if (o.n() != model_.n || input.q.n() != model_.n)
    throw InvalidInputError("probe Paulis must act on the model's qubits");
  auto [a, b] = damped_components(input, o, t);
  add_queries(1);
  if (input.q.is_identity()) return a;
  return input.kind == ProbeInput::Kind::Eigenstate ? a + input.sign * b : input.sign * b;
}

double ChannelOracle::sample_expectation(const ProbeInput& input, const PauliString& o, double t,
                                         uint64_t shots, uint64_t stream_salt) const {
  const auto* sampled = std::get_if<SampledBackend>(&backend_);
  uint64_t seed = sampled ? sampled->seed : 0;
  if (shots == 0 && sampled) shots = sampled->shots_default;
  auto [a, b] = damped_components(input, o, t);
  auto sample_mean = [&](double mean, uint64_t m, uint64_t salt) {
    mean = std::clamp(mean, -1.0, 1.0);
    RngStream rng = derive_stream(seed, t, probe_stream_id(input, o), salt);
    if (m == 0) return mean;
    if (m <= 65536) {
      double p = (1.0 + mean) / 2.0;
      int64_t up = 0;
      for (uint64_t i = 0; i < m; ++i) up += rng.uniform() < p ? 1 : -1;
      return static_cast<double>(up) / static_cast<double>(m);
    }
    // Large-m sample means are drawn from the matching normal; its tails are
    // dominated by the Hoeffding bound used in the shot formulas.
    double var = std::max(0.0, (1.0 - mean * mean) / static_cast<double>(m));
    return std::clamp(mean + std::sqrt(var) * rng.gaussian(), -1.0, 1.0);
  };

  add_queries(shots);
  if (input.q.is_identity()) return sample_mean(a, shots, stream_salt);
  if (input.kind == ProbeInput::Kind::Eigenstate)
    return sample_mean(a + input.sign * b, shots, stream_salt);
  // Pauli input: difference of the two eigenstate experiments, half the
  // budget each.
  uint64_t half = shots / 2;
  double plus = sample_mean(a + b, half, hash_combine(stream_salt, 1));
  double minus = sample_mean(a - b, half, hash_combine(stream_salt, 2));
  return input.sign * (plus - minus) / 2.0;
}

double ChannelOracle::estimate_expectation(const ProbeInput& input, const PauliString& o, double t,
                                           double eps_s, double delta_s) const {
  if (std::holds_alternative<ExactBackend>(backend_)) return expectation(input, o, t);
  if (const auto* noise = std::get_if<NoiseBackend>(&backend_)) {
    double exact = expectation(input, o, t);
    double bound = eps_s > 0 ? eps_s : noise->eps_default;
    RngStream rng = derive_stream(noise->seed, t, probe_stream_id(input, o), 0x9a);
    return exact + rng.uniform_symmetric(bound);
  }
  if (eps_s <= 0 || delta_s <= 0 || delta_s >= 1)
    throw InvalidInputError("sampled estimate needs eps_s > 0 and delta_s in (0,1)");
  bool split = input.kind == ProbeInput::Kind::PauliInput && !input.q.is_identity();
  double per_side_delta = split ? delta_s / 2.0 : delta_s;
  auto shots_f = std::ceil(2.0 * std::log(2.0 / per_side_delta) / (eps_s * eps_s));
  const auto& sampled = std::get<SampledBackend>(backend_);
  if (shots_f > static_cast<double>(sampled.shot_budget))
    throw ShotBudgetOverflowError("needs " + std::to_string(shots_f) + " shots per experiment");
  auto shots = static_cast<uint64_t>(shots_f);
  return sample_expectation(input, o, t, split ? 2 * shots : shots, 0x51);
}

ChiDiagonal ChannelOracle::query_chi_rates(double t, double eps_s, double delta_s) const {
  unsigned n = model_.n;
  if (n > max_exhaustive_n)
    throw CapExceededError("chi query needs n <= " + std::to_string(max_exhaustive_n));
  if (eps_s <= 0) throw InvalidInputError("eps_s must be positive");

  size_t dim = size_t{1} << (2 * n);
  std::vector<double> lambda;

  if (std::holds_alternative<SampledBackend>(backend_)) {
    const auto& sampled = std::get<SampledBackend>(backend_);
    if (delta_s <= 0 || delta_s >= 1) throw InvalidInputError("delta_s must be in (0,1)");
    // Half the accuracy budget goes to estimation and half to truncation:
    // every lambda_Q within eps_s/2 jointly makes the transformed rates
    // eps_s/2-accurate, and zeroing estimates below eps_s/2 then keeps the
    // entrywise error of the sparse hypothesis at eps_s even for the
    // truncated entries.
    double eps_est = eps_s / 2.0;
    double per_exp_delta = delta_s / (2.0 * static_cast<double>(dim - 1));
    auto per_side_f = std::ceil(2.0 * std::log(2.0 / per_exp_delta) / (eps_est * eps_est));
    double total = per_side_f * 2.0 * static_cast<double>(dim - 1);
    if (total > static_cast<double>(sampled.shot_budget))
      throw ShotBudgetOverflowError("chi query needs " + std::to_string(total) + " shots");
    auto per_side = static_cast<uint64_t>(per_side_f);
    lambda.assign(dim, 0.0);
    lambda[0] = 1.0;
    for (uint64_t code = 1; code < dim; ++code) {
      PauliString q = PauliString::from_code(n, code);
      lambda[code] =
          sample_expectation(ProbeInput::pauli_input(q), q, t, 2 * per_side, 0xc1 + code);
    }
  } else {
    lambda = pauli_fidelities(ptm_, t, max_exhaustive_n, evolve_opts);
    // The noise backend emulates the imported SPAM-robust recovery: it
    // returns rates of the bare channel (plus bounded noise) even when the
    // access model is damped.  The exact backend reports the raw damped
    // access instead.
    if (spam_ && !std::holds_alternative<NoiseBackend>(backend_)) {
      double r = spam_->r_prep * spam_->r_meas;
      for (uint64_t code = 1; code < dim; ++code)
        lambda[code] *= std::pow(r, PauliString::from_code(n, code).weight());
    }
    add_queries(1);
  }

  std::vector<double> chi = lambda;
  symplectic_wht_inplace(chi, n);
  double norm = std::ldexp(1.0, -2 * static_cast<int>(n));
  for (auto& v : chi) v *= norm;

  ChiDiagonal out;
  out.t = t;
  out.n = n;

  if (std::holds_alternative<ExactBackend>(backend_)) {
    for (uint64_t code = 0; code < dim; ++code)
      out.entries[PauliString::from_code(n, code)] = chi[code];
    return out;
  }

  // Sparsify like the population-recovery hypothesis: zero small entries,
  // keep at most ceil(4/eps_s) largest, never letting a truncation push an
  // entry further than eps_s from the truth.
  std::vector<std::pair<double, uint64_t>> kept;
  if (const auto* noise = std::get_if<NoiseBackend>(&backend_)) {
    double bound = eps_s > 0 ? eps_s : noise->eps_default;
    for (uint64_t code = 0; code < dim; ++code) {
      double truth = chi[code];
      RngStream rng = derive_stream(noise->seed, t, code, 0x7e);
      double noisy = truth + rng.uniform_symmetric(bound);
      // an entry may be treated as zero only when the true rate is below
      // the resolution, which is exactly the imported guarantee surface
      if (noisy >= bound || truth >= bound) kept.emplace_back(noisy, code);
    }
  } else {
    for (uint64_t code = 0; code < dim; ++code)
      if (chi[code] >= eps_s / 2.0) kept.emplace_back(chi[code], code);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  auto cap = static_cast<size_t>(std::ceil(4.0 / eps_s));
  if (kept.size() > cap) kept.resize(cap);
  for (const auto& [v, code] : kept) out.entries[PauliString::from_code(n, code)] = v;
  return out;
}

ChannelOracle wrap_oracle(const ChannelOracle& oracle, const SpamParams& spam) {
  if (spam.r_prep <= 0 || spam.r_prep > 1 || spam.r_meas <= 0 || spam.r_meas > 1)
    throw ZeroRetentionError("retentions must be in (0,1]");
  ChannelOracle out(oracle);
  SpamParams composed = spam;
  if (oracle.spam_) {
    composed.r_prep *= oracle.spam_->r_prep;
    composed.r_meas *= oracle.spam_->r_meas;
  }
  out.spam_ = composed;
  return out;
}

}  // namespace lindlearn
