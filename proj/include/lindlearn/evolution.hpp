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

#include <atomic>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <variant>
#include <vector>

#include "lindlearn/model.hpp"
#include "lindlearn/rng.hpp"

namespace lindlearn {

/** Sparse Pauli-coefficient vector: operator A = sum coeff(P) * P. */
using PauliVector = std::unordered_map<PauliString, Complex, PauliHash>;

/**
 * Sparse superoperator of the adjoint generator in the Pauli coefficient
 * basis.  A column for observable O lists the Pauli expansion of
 *   L+(O) = i sum_k h_k [P_k, O]
 *         + sum_{k,m} a_km (P_m O P_k - 1/2 {P_m P_k, O}).
 * Components whose support is disjoint from O contribute nothing, so each
 * column has at most one entry per component.  Immutable after build;
 * column() is pure and thread-safe.
 */
class AdjointPTM {
 public:
  struct Entry {
    PauliString pauli;
    Complex coeff;
  };
  struct DenseEntry {
    uint32_t out_code;
    Complex coeff;
  };

  /** Code-indexed column tables are precomputed up to this qubit count; the
   * hash-map path handles anything larger. */
  static constexpr unsigned kDenseCap = 8;

  explicit AdjointPTM(const Lindbladian& model);

  unsigned n() const { return n_; }
  /** l1 bound on any column: 2 sum|h| + 2 sum|a|; controls step scaling. */
  double column_l1_bound() const { return l1_bound_; }

  std::vector<Entry> column(const PauliString& o) const;

  /** Apply L+ to a sparse coefficient vector. */
  PauliVector apply(const PauliVector& v) const;

  bool has_dense() const { return !dense_cols_.empty(); }
  const std::vector<std::vector<DenseEntry>>& dense_columns() const { return dense_cols_; }

 private:
  struct HamTerm {
    PauliString p;
    double h;
  };
  struct DissTerm {
    PauliString p_k, p_m;
    PhasedPauli p_mk;  // P_m * P_k precomputed
    Complex a;
  };
  unsigned n_ = 0;
  std::vector<HamTerm> ham_;
  std::vector<DissTerm> diss_;
  double l1_bound_ = 0.0;
  std::vector<std::vector<DenseEntry>> dense_cols_;
};

struct EvolveOptions {
  double rel_tol = 1e-13;      // a-priori Taylor remainder target per step
  unsigned max_steps = 100000;  // scaling-step budget; breach raises
};

/**
 * Heisenberg evolution e^{t L+}(O) for a sparse initial vector, by truncated
 * Taylor series with step scaling.  Throws NonConvergentError when the step
 * budget is exhausted (Lambda * t too large for the configured budget).
 */
PauliVector evolve_vector(const AdjointPTM& ptm, double t, const PauliVector& v0,
                          const EvolveOptions& opts = {});
PauliVector evolve_observable(const AdjointPTM& ptm, double t, const PauliString& o,
                              const EvolveOptions& opts = {});

/**
 * Signed Walsh-Hadamard transform with the symplectic character kernel
 * (-1)^{<P_i, Q>}; self-inverse up to the factor 4^n.  Arrays are indexed by
 * the 2-bit-per-qubit Pauli code.
 */
void symplectic_wht_inplace(std::vector<double>& a, unsigned n);

/** All Pauli fidelities lambda_Q(t), indexed by Pauli code; lambda_I = 1. */
std::vector<double> pauli_fidelities(const AdjointPTM& ptm, double t, unsigned max_exhaustive_n = 7,
                                     const EvolveOptions& opts = {});

/** Pauli error rates chi_ii(t); a probability vector on the exact backend. */
struct ChiDiagonal {
  double t = 0.0;
  unsigned n = 0;
  /** Sparse map; entries not present are zero. */
  std::unordered_map<PauliString, double, PauliHash> entries;

  double at(const PauliString& p) const {
    auto it = entries.find(p);
    return it == entries.end() ? 0.0 : it->second;
  }
  double sum() const {
    double s = 0.0;
    for (const auto& [p, v] : entries) s += v;
    return s;
  }
};

ChiDiagonal chi_diagonal_exact(const AdjointPTM& ptm, double t, unsigned max_exhaustive_n = 7,
                               const EvolveOptions& opts = {});

/** Known depolarizing SPAM retentions; r = r_prep * r_meas in (0, 1]. */
struct SpamParams {
  double r_prep = 1.0;
  double r_meas = 1.0;
};

/** Fidelity damping under the SPAM sandwich: multiply by (rP*rM)^{w(Q)}. */
double damp_fidelity(double lambda_q, const PauliString& q, const SpamParams& spam);

/** Probe input: a Pauli eigenstate (I + sign*Q)/2^n or the normalized Pauli
 * input 2^{-n} * sign * Q (realized as a difference of two eigenstate
 * experiments; Q = I means the maximally mixed state for either kind). */
struct ProbeInput {
  enum class Kind { PauliInput, Eigenstate };
  Kind kind = Kind::PauliInput;
  PauliString q;
  int sign = +1;

  static ProbeInput pauli_input(PauliString q, int sign = +1) {
    return {Kind::PauliInput, std::move(q), sign};
  }
  static ProbeInput eigenstate(PauliString q, int sign) {
    return {Kind::Eigenstate, std::move(q), sign};
  }
};

struct ExactBackend {};
struct NoiseBackend {
  double eps_default = 0.01;  // used when a query carries no scheduled eps_s
  uint64_t seed = 0;
};
struct SampledBackend {
  uint64_t shots_default = 10000;  // per-expectation shots for raw queries
  uint64_t seed = 0;
  uint64_t shot_budget = uint64_t{1} << 62;  // total-shot cap per chi query
};
using Backend = std::variant<ExactBackend, NoiseBackend, SampledBackend>;

/**
 * Black-box query access to e^{tL}.  The Exact backend is deterministic; the
 * noisy backends are deterministic given their seed, with per-query RNG
 * streams derived from (seed, t, probe id) so results are independent of
 * query order.
 */
class ChannelOracle {
 public:
  ChannelOracle(const Lindbladian& model, Backend backend = ExactBackend{},
                std::optional<SpamParams> spam = std::nullopt)
      : model_(model), ptm_(model), backend_(std::move(backend)), spam_(std::move(spam)) {}

  ChannelOracle(const ChannelOracle& other)
      : model_(other.model_),
        ptm_(other.ptm_),
        backend_(other.backend_),
        spam_(other.spam_),
        max_exhaustive_n(other.max_exhaustive_n),
        evolve_opts(other.evolve_opts),
        queries_(other.queries_.load()) {}

  const Lindbladian& model() const { return model_; }
  const AdjointPTM& ptm() const { return ptm_; }
  const Backend& backend() const { return backend_; }
  const std::optional<SpamParams>& spam() const { return spam_; }

  unsigned max_exhaustive_n = 7;
  EvolveOptions evolve_opts{};

  bool is_exact() const { return std::holds_alternative<ExactBackend>(backend_); }

  /**
   * Pauli error rate estimates at time t (a sparse hypothesis).  Exact:
   * the full diagonal.  Noise: exact plus independent uniform noise in
   * [-eps_s, eps_s], entries below eps_s zeroed, at most ceil(4/eps_s)
   * largest kept.  Sampled: Monte Carlo eigenstate experiments with enough
   * shots that the transformed chi error is <= eps_s w.p. >= 1-delta_s,
   * then the same sparsification.
   */
  ChiDiagonal query_chi_rates(double t, double eps_s, double delta_s) const;

  /** Expectation tr(O e^{tL}(X)) for the probe input X; exact value. */
  double expectation(const ProbeInput& input, const PauliString& o, double t) const;

  /**
   * Backend-dependent estimate of the same expectation with per-node accuracy
   * target eps_s at confidence 1-delta_s (Hoeffding-scheduled shots on the
   * Sampled backend; adversarial bounded noise on the Noise backend).
   */
  double estimate_expectation(const ProbeInput& input, const PauliString& o, double t,
                              double eps_s, double delta_s) const;

  /** Raw sampled estimate; shots = 0 uses the backend's shots_default. */
  double sample_expectation(const ProbeInput& input, const PauliString& o, double t,
                            uint64_t shots = 0, uint64_t stream_salt = 0) const;

  uint64_t queries_used() const { return queries_.load(); }
  void reset_queries() const { queries_.store(0); }
  void add_queries(uint64_t k) const { queries_.fetch_add(k); }

 private:
  friend ChannelOracle wrap_oracle(const ChannelOracle& oracle, const SpamParams& spam);

  /** Coefficients (c_I, c_Q) of e^{tL+}(O), spam-damped as observed. */
  std::pair<double, double> damped_components(const ProbeInput& input, const PauliString& o,
                                              double t) const;

  Lindbladian model_;
  AdjointPTM ptm_;
  Backend backend_;
  std::optional<SpamParams> spam_;
  mutable std::atomic<uint64_t> queries_{0};
};

/** Oracle whose every query passes through the depolarizing SPAM sandwich;
 * wrapping twice composes retentions multiplicatively. */
ChannelOracle wrap_oracle(const ChannelOracle& oracle, const SpamParams& spam);

/** Stable 64-bit id for probe RNG streams. */
uint64_t probe_stream_id(const ProbeInput& input, const PauliString& o);

}  // namespace lindlearn
