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

#include "lindlearn/model.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace lindlearn {

namespace {

constexpr double kZeroThreshold = 1e-14;
constexpr double kHermTol = 1e-12;
constexpr double kPsdTol = -1e-10;

double max_abs_coefficient(const Lindbladian& model) {
  double m = 0.0;
  for (const auto& [p, h] : model.ham_terms) m = std::max(m, std::abs(h));
  for (Eigen::Index i = 0; i < model.kossakowski.rows(); ++i)
    for (Eigen::Index j = 0; j < model.kossakowski.cols(); ++j)
      m = std::max(m, std::abs(model.kossakowski(i, j)));
  return m;
}

/** Dense matrix of a Pauli string, used only for the n <= 10 spectral range. */
CMatrix dense_pauli(const PauliString& p) {
  const Complex I(0, 1);
  CMatrix m = CMatrix::Identity(1, 1);
  for (unsigned q = 0; q < p.n(); ++q) {
    CMatrix s(2, 2);
    switch (p.letter(q)) {
      case 'I': s << 1, 0, 0, 1; break;
      case 'X': s << 0, 1, 1, 0; break;
      case 'Y': s << 0, -I, I, 0; break;
      default:  s << 1, 0, 0, -1; break;
    }
    CMatrix out(m.rows() * 2, m.cols() * 2);
    // qubit 0 is the leftmost tensor factor
    out.block(0, 0, m.rows(), m.cols()) = m * s(0, 0);
    out.block(0, m.cols(), m.rows(), m.cols()) = m * s(0, 1);
    out.block(m.rows(), 0, m.rows(), m.cols()) = m * s(1, 0);
    out.block(m.rows(), m.cols(), m.rows(), m.cols()) = m * s(1, 1);
    m = std::move(out);
  }
  return m;
}

}  // namespace

Lindbladian Lindbladian::rescaled() const {
  double m = max_abs_coefficient(*this);
  if (m <= kZeroThreshold) return *this;
  Lindbladian out = *this;
  for (auto& [p, h] : out.ham_terms) h /= m;
  out.kossakowski /= m;
  return out;
}

SparsityReport validate(const Lindbladian& model) {
  for (const auto& [p, h] : model.ham_terms) {
    if (p.n() != model.n) throw SizeMismatchError("Hamiltonian term size mismatch");
    if (p.is_identity()) throw IdentityTermPresentError("identity Pauli in ham_terms");
  }
  for (const auto& p : model.diss_support) {
    if (p.n() != model.n) throw SizeMismatchError("dissipator support size mismatch");
    if (p.is_identity()) throw IdentityTermPresentError("identity Pauli in diss_support");
  }
  const auto m_d = static_cast<Eigen::Index>(model.diss_support.size());
  if (model.kossakowski.rows() != m_d || model.kossakowski.cols() != m_d)
    throw SizeMismatchError("Kossakowski shape does not match diss_support");

  if (m_d > 0) {
    double herm = (model.kossakowski - model.kossakowski.adjoint()).cwiseAbs().maxCoeff();
    if (herm > kHermTol)
      throw NonHermitianKossakowskiError("Kossakowski deviates from Hermitian by " +
                                         std::to_string(herm));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(model.kossakowski, Eigen::EigenvaluesOnly);
    double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < kPsdTol)
      throw NotPSDError("Kossakowski min eigenvalue " + std::to_string(min_eig));
    // PSD consequence: a zero diagonal forces its whole row/column to zero.
    for (Eigen::Index i = 0; i < m_d; ++i) {
      if (std::abs(model.kossakowski(i, i)) <= kZeroThreshold) {
        for (Eigen::Index j = 0; j < m_d; ++j) {
          if (std::abs(model.kossakowski(i, j)) > 1e-7 || std::abs(model.kossakowski(j, i)) > 1e-7)
            throw NotPSDError("zero diagonal with nonzero off-diagonal at row " +
                              std::to_string(i));
        }
      }
    }
  }

  double max_coeff = max_abs_coefficient(model);
  if (max_coeff > 1.0 + kHermTol)
    throw NotNormalizedError("max |coefficient| = " + std::to_string(max_coeff) +
                             " > 1; rescale the model first");

  SparsityReport rep;
  rep.m_h = model.ham_terms.size();
  rep.m_d = model.diss_support.size();
  rep.m = rep.m_h + rep.m_d * rep.m_d;
  double eta = 0.0;
  auto update = [&eta](double v) {
    if (v > kZeroThreshold && (eta == 0.0 || v < eta)) eta = v;
  };
  for (const auto& [p, h] : model.ham_terms) update(std::abs(h));
  for (Eigen::Index i = 0; i < m_d; ++i)
    for (Eigen::Index j = 0; j < m_d; ++j) update(std::abs(model.kossakowski(i, j)));
  rep.eta = eta;
  return rep;
}

std::vector<LindbladComponent> components_of(const Lindbladian& model) {
  std::vector<LindbladComponent> comps;
  for (const auto& [p, h] : model.ham_terms)
    if (std::abs(h) > kZeroThreshold) comps.push_back(LindbladComponent::hamiltonian(p));
  const auto m_d = static_cast<Eigen::Index>(model.diss_support.size());
  for (Eigen::Index k = 0; k < m_d; ++k)
    for (Eigen::Index m = 0; m < m_d; ++m)
      if (std::abs(model.kossakowski(k, m)) > kZeroThreshold)
        comps.push_back(LindbladComponent::dissipative(
            model.diss_support[static_cast<size_t>(k)], model.diss_support[static_cast<size_t>(m)]));
  return comps;
}

DualGraph dual_graph(const std::vector<LindbladComponent>& components) {
  if (components.empty()) throw InvalidInputError("dual_graph needs a nonempty component list");
  DualGraph g;
  g.vertices = components;
  std::vector<unsigned> degree(components.size(), 0);
  for (size_t i = 0; i < components.size(); ++i) {
    for (size_t j = i + 1; j < components.size(); ++j) {
      if (components[i].support.intersects(components[j].support)) {
        g.adjacency.emplace_back(i, j);
        ++degree[i];
        ++degree[j];
      }
    }
  }
  for (unsigned d : degree) g.max_degree = std::max(g.max_degree, d);
  return g;
}

unsigned candidate_dual_degree(const std::vector<PauliString>& s_h_hat,
                               const std::vector<PauliString>& s_d_hat) {
  if (s_h_hat.empty() && s_d_hat.empty())
    throw InvalidInputError("candidate_dual_degree needs nonempty candidates");
  std::vector<Patch> supports;
  supports.reserve(s_h_hat.size() + s_d_hat.size() * s_d_hat.size());
  for (const auto& p : s_h_hat) supports.push_back(Patch::support_of(p));
  for (const auto& pk : s_d_hat)
    for (const auto& pm : s_d_hat)
      supports.push_back(Patch::support_of(pk).united(Patch::support_of(pm)));
  unsigned max_deg = 0;
  for (size_t i = 0; i < supports.size(); ++i) {
    unsigned deg = 0;
    for (size_t j = 0; j < supports.size(); ++j)
      if (i != j && supports[i].intersects(supports[j])) ++deg;
    max_deg = std::max(max_deg, deg);
  }
  return max_deg;
}

double lambda_bound(const Lindbladian& model) {
  double diss = 0.0;
  for (Eigen::Index i = 0; i < model.kossakowski.rows(); ++i)
    for (Eigen::Index j = 0; j < model.kossakowski.cols(); ++j)
      diss += std::abs(model.kossakowski(i, j));

  double ham_part = 0.0;
  if (!model.ham_terms.empty()) {
    if (model.n <= 10) {
      CMatrix h = CMatrix::Zero(Eigen::Index{1} << model.n, Eigen::Index{1} << model.n);
      for (const auto& [p, c] : model.ham_terms) h += c * dense_pauli(p);
      Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
      ham_part = es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff();
    } else {
      for (const auto& [p, c] : model.ham_terms) ham_part += 2.0 * std::abs(c);
    }
  }
  return ham_part + 2.0 * diss;
}

Lindbladian model_from_json_text(const std::string& text, bool rescale) {
  nlohmann::json j = nlohmann::json::parse(text);
  Lindbladian model;
  model.n = j.at("n").get<unsigned>();
  if (j.contains("hamiltonian")) {
    for (const auto& term : j.at("hamiltonian")) {
      PauliString p = PauliString::from_text(term.at("pauli").get<std::string>());
      model.ham_terms.emplace_back(p, term.at("coeff").get<double>());
    }
  }
  if (j.contains("dissipator")) {
    const auto& d = j.at("dissipator");
    for (const auto& s : d.at("support"))
      model.diss_support.push_back(PauliString::from_text(s.get<std::string>()));
    const auto m_d = static_cast<Eigen::Index>(model.diss_support.size());
    model.kossakowski = CMatrix::Zero(m_d, m_d);
    const auto& re = d.at("kossakowski_re");
    for (Eigen::Index i = 0; i < m_d; ++i)
      for (Eigen::Index k = 0; k < m_d; ++k)
        model.kossakowski(i, k) = re.at(i).at(k).get<double>();
    if (d.contains("kossakowski_im")) {
      const auto& im = d.at("kossakowski_im");
      for (Eigen::Index i = 0; i < m_d; ++i)
        for (Eigen::Index k = 0; k < m_d; ++k)
          model.kossakowski(i, k) += Complex(0, im.at(i).at(k).get<double>());
    }
  } else {
    model.kossakowski = CMatrix::Zero(0, 0);
  }
  if (rescale) model = model.rescaled();
  validate(model);
  return model;
}

Lindbladian load_model_json(const std::string& path, bool rescale) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot open model file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json_text(ss.str(), rescale);
}

std::string model_to_json_text(const Lindbladian& model) {
  nlohmann::json j;
  j["n"] = model.n;
  j["hamiltonian"] = nlohmann::json::array();
  for (const auto& [p, h] : model.ham_terms)
    j["hamiltonian"].push_back({{"pauli", p.text()}, {"coeff", h}});
  nlohmann::json d;
  d["support"] = nlohmann::json::array();
  for (const auto& p : model.diss_support) d["support"].push_back(p.text());
  const auto m_d = model.kossakowski.rows();
  nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m_d; ++i) {
    nlohmann::json row_re = nlohmann::json::array(), row_im = nlohmann::json::array();
    for (Eigen::Index k = 0; k < m_d; ++k) {
      row_re.push_back(model.kossakowski(i, k).real());
      row_im.push_back(model.kossakowski(i, k).imag());
    }
    re.push_back(row_re);
    im.push_back(row_im);
  }
  d["kossakowski_re"] = re;
  d["kossakowski_im"] = im;
  j["dissipator"] = d;
  return j.dump(2);
}

void save_model_json(const Lindbladian& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInputError("cannot write model file " + path);
  out << model_to_json_text(model) << "\n";
}

}  // namespace lindlearn
