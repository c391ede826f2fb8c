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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "lindlearn/experiments.hpp"
#include "lindlearn/lowerbound.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using namespace lindlearn;
using nlohmann::json;

struct GlobalConfig {
  uint64_t seed = 0;
  std::string backend = "exact";
  std::string spam;     // "rP,rM" or empty
  std::string out = ".";
  unsigned threads = 1;
  bool rescale = false;  // rescale loaded models so max |coefficient| = 1
};

uint64_t fnv1a(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Backend parse_backend(const std::string& text, uint64_t seed) {
  if (text == "exact") return ExactBackend{};
  if (text.rfind("noise:", 0) == 0) {
    NoiseBackend b;
    b.eps_default = std::stod(text.substr(6));
    b.seed = seed;
    return b;
  }
  if (text.rfind("sampled:", 0) == 0) {
    SampledBackend b;
    b.shots_default = std::stoull(text.substr(8));
    b.seed = seed;
    return b;
  }
  throw CLI::ValidationError("--backend must be exact, noise:EPS or sampled:SHOTS");
}

std::optional<SpamParams> parse_spam(const std::string& text) {
  if (text.empty()) return std::nullopt;
  auto comma = text.find(',');
  if (comma == std::string::npos)
    throw CLI::ValidationError("--spam expects rP,rM");
  SpamParams s;
  s.r_prep = std::stod(text.substr(0, comma));
  s.r_meas = std::stod(text.substr(comma + 1));
  return s;
}

struct RunContext {
  GlobalConfig global;
  std::string command;
  json config;  // resolved parameters, embedded in every output
  uint64_t config_hash = 0;

  void finalize() {
    config["command"] = command;
    config["seed"] = global.seed;
    config["backend"] = global.backend;
    config["spam"] = global.spam;
    config["rescale"] = global.rescale;
    config_hash = fnv1a(config.dump());
  }

  json meta() const {
    return {{"tool_version", kVersion},
            {"config_hash", config_hash},
            {"seed", global.seed},
            {"command", command},
            {"config", config}};
  }

  std::string csv_header() const {
    std::ostringstream os;
    os << "# tool_version=" << kVersion << "\n";
    os << "# command=" << command << "\n";
    os << "# config_hash=" << config_hash << "\n";
    os << "# seed=" << global.seed << "\n";
    return os.str();
  }

  std::filesystem::path out_path(const std::string& name) const {
    std::filesystem::create_directories(global.out);
    return std::filesystem::path(global.out) / name;
  }

  void write_json(const std::string& name, json payload) const {
    payload["meta"] = meta();
    std::ofstream f(out_path(name));
    f << payload.dump(2) << "\n";
  }

  Lindbladian load_model(const std::string& path) const {
    return load_model_json(path, global.rescale);
  }

  ChannelOracle make_oracle(const Lindbladian& model) const {
    return ChannelOracle(model, parse_backend(global.backend, global.seed),
                         parse_spam(global.spam));
  }
};

json schedule_json(const ChebyshevSchedule& s) {
  return {{"tau_max", s.tau_max}, {"r", s.r}, {"eps_s", s.eps_s}, {"nodes", s.nodes}};
}

json pauli_map_json(const std::map<PauliString, double>& m) {
  json out = json::object();
  for (const auto& [p, v] : m) out[p.text()] = v;
  return out;
}

std::string input_kind_text(const ProbeInput& in) {
  if (in.kind == ProbeInput::Kind::Eigenstate) return "eigenstate";
  return "pauli_input";
}

int cmd_simulate(const RunContext& ctx, const std::string& model_path, double t_max,
                 unsigned steps, double eps_s) {
  Lindbladian model = ctx.load_model(model_path);
  ChannelOracle oracle = ctx.make_oracle(model);

  std::ofstream chi_csv(ctx.out_path("chi_series.csv"));
  chi_csv << ctx.csv_header() << "t,pauli,rate,eps_s\n";
  std::ofstream fid_csv(ctx.out_path("fidelity_series.csv"));
  fid_csv << ctx.csv_header() << "t,pauli,fidelity\n";

  for (unsigned k = 0; k <= steps; ++k) {
    double t = t_max * k / std::max(1u, steps);
    ChiDiagonal chi = oracle.query_chi_rates(t, eps_s, 0.05);
    std::map<PauliString, double> sorted(chi.entries.begin(), chi.entries.end());
    for (const auto& [p, v] : sorted)
      chi_csv << format_double(t) << "," << p.text() << "," << format_double(v) << ","
              << format_double(eps_s) << "\n";
    std::vector<double> lambda = pauli_fidelities(oracle.ptm(), t, oracle.max_exhaustive_n);
    if (oracle.spam()) {
      for (uint64_t code = 0; code < lambda.size(); ++code)
        lambda[code] =
            damp_fidelity(lambda[code], PauliString::from_code(model.n, code), *oracle.spam());
    }
    for (uint64_t code = 0; code < lambda.size(); ++code)
      fid_csv << format_double(t) << "," << PauliString::from_code(model.n, code).text() << ","
              << format_double(lambda[code]) << "\n";
  }
  std::cout << "simulate: wrote chi_series.csv, fidelity_series.csv\n";
  return 0;
}

int cmd_learn_structure(const RunContext& ctx, const std::string& model_path, double eta,
                        double delta, bool use_2m) {
  Lindbladian model = ctx.load_model(model_path);
  SparsityReport rep = validate(model);
  ChannelOracle oracle = ctx.make_oracle(model);

  StructureOptions opts;
  opts.eta = eta;
  opts.delta = delta;
  opts.sparsity_m = std::max<size_t>(1, rep.m);
  opts.lambda = use_2m ? 0.0 : lambda_bound(model);
  StructureResult result = learn_structure(oracle, opts);

  json out;
  out["s_d_hat"] = json::array();
  for (const auto& p : result.s_d_hat) out["s_d_hat"].push_back(p.text());
  out["s_h_hat"] = json::array();
  for (const auto& p : result.s_h_hat) out["s_h_hat"].push_back(p.text());
  out["chi_deriv1"] = pauli_map_json(result.chi_deriv1);
  out["chi_deriv2"] = pauli_map_json(result.chi_deriv2);
  out["queries_used"] = result.queries_used;
  out["schedule"] = schedule_json(result.schedule);
  ctx.write_json("structure_result.json", out);
  std::cout << "learn-structure: |S_D| = " << result.s_d_hat.size()
            << ", |S_H| = " << result.s_h_hat.size() << ", queries = " << result.queries_used
            << "\n";
  return 0;
}

std::vector<PauliString> parse_pauli_list(const json& arr) {
  std::vector<PauliString> out;
  for (const auto& s : arr) out.push_back(PauliString::from_text(s.get<std::string>()));
  return out;
}

int cmd_learn_coefficients(const RunContext& ctx, const std::string& model_path,
                           const std::string& candidates_path, double eps, double delta,
                           const std::string& mode, size_t oversample) {
  Lindbladian model = ctx.load_model(model_path);
  ChannelOracle oracle = ctx.make_oracle(model);

  std::vector<PauliString> s_h, s_d;
  if (!candidates_path.empty()) {
    std::ifstream f(candidates_path);
    if (!f) throw InvalidInputError("cannot open candidates file " + candidates_path);
    json cand = json::parse(f);
    s_h = parse_pauli_list(cand.at("s_h_hat"));
    s_d = parse_pauli_list(cand.at("s_d_hat"));
  } else {
    s_h = true_s_h(model);
    s_d = true_s_d(model);
  }

  LearnCoefficientsOptions opts;
  opts.eps = eps;
  opts.delta = delta;
  opts.mode = mode == "shadow" ? AcquisitionMode::Shadow : AcquisitionMode::ProbeByProbe;
  opts.seed = ctx.global.seed;
  opts.oversample = oversample;
  opts.threads = ctx.global.threads;
  CoefficientEstimate est = learn_coefficients(oracle, s_h, s_d, opts);

  json out;
  json h = json::object();
  std::map<PauliString, double> h_sorted(est.h_hat.begin(), est.h_hat.end());
  for (const auto& [p, v] : h_sorted) h[p.text()] = v;
  out["h_hat"] = h;
  out["diss_support"] = json::array();
  for (const auto& p : est.d_terms) out["diss_support"].push_back(p.text());
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < est.a_hat.rows(); ++i) {
    json row_re = json::array(), row_im = json::array();
    for (Eigen::Index j = 0; j < est.a_hat.cols(); ++j) {
      row_re.push_back(est.a_hat(i, j).real());
      row_im.push_back(est.a_hat(i, j).imag());
    }
    re.push_back(row_re);
    im.push_back(row_im);
  }
  out["a_hat_re"] = re;
  out["a_hat_im"] = im;
  out["nu"] = est.nu;
  out["residual"] = est.residual;
  out["eps_d"] = est.deriv_accuracy;
  out["probes_used"] = est.probes_used;
  out["queries_used"] = est.queries_used;
  ctx.write_json("coefficients.json", out);

  std::ofstream rank_csv(ctx.out_path("rank_growth.csv"));
  rank_csv << ctx.csv_header() << "attempt,rank\n";
  for (const auto& [attempt, rank] : est.rank_trace) rank_csv << attempt << "," << rank << "\n";

  std::cout << "learn-coefficients: nu = " << est.nu << ", probes = " << est.probes_used
            << ", residual = " << est.residual << "\n";
  return 0;
}

int cmd_end_to_end(const RunContext& ctx, const std::string& model_path, double eta, double eps,
                   double delta) {
  Lindbladian model = ctx.load_model(model_path);
  SparsityReport rep = validate(model);
  ChannelOracle oracle = ctx.make_oracle(model);

  StructureOptions sopts;
  sopts.eta = eta;
  sopts.delta = delta / 2;
  sopts.sparsity_m = std::max<size_t>(1, rep.m);
  sopts.lambda = lambda_bound(model);
  LearnCoefficientsOptions copts;
  copts.eps = eps;
  copts.delta = delta / 2;
  copts.seed = ctx.global.seed;
  copts.threads = ctx.global.threads;

  EndToEndReport report = run_end_to_end(oracle, sopts, copts);

  json out;
  out["max_h_error"] = report.max_h_error;
  out["max_a_error"] = report.max_a_error;
  out["structure_queries"] = report.structure.queries_used;
  out["coefficient_queries"] = report.coefficients.queries_used;
  out["total_queries"] = report.total_queries;
  out["nu"] = report.coefficients.nu;
  out["s_d_hat"] = json::array();
  for (const auto& p : report.structure.s_d_hat) out["s_d_hat"].push_back(p.text());
  out["s_h_hat"] = json::array();
  for (const auto& p : report.structure.s_h_hat) out["s_h_hat"].push_back(p.text());
  out["pruned"] = json::array();
  for (const auto& p : report.pruned) out["pruned"].push_back(p.text());
  ctx.write_json("end_to_end_report.json", out);
  std::cout << "end-to-end: max |h error| = " << report.max_h_error
            << ", max |a error| = " << report.max_a_error
            << ", queries = " << report.total_queries << ", wall = " << report.wall_seconds
            << " s\n";
  return 0;
}

int cmd_condition_sweep(const RunContext& ctx, const std::vector<std::string>& shapes_text,
                        unsigned seeds) {
  std::vector<std::pair<unsigned, unsigned>> shapes;
  for (const auto& s : shapes_text) {
    auto x = s.find('x');
    if (x == std::string::npos) throw CLI::ValidationError("--shapes expects LxW entries");
    shapes.emplace_back(std::stoul(s.substr(0, x)), std::stoul(s.substr(x + 1)));
  }
  std::vector<ConditionSweepRow> rows = run_condition_sweep(shapes, seeds, ctx.global.threads);

  std::ofstream nu_csv(ctx.out_path("nu_sweep.csv"));
  nu_csv << ctx.csv_header() << "n,seed,nu\n";
  std::ofstream rank_csv(ctx.out_path("rank_growth.csv"));
  rank_csv << ctx.csv_header() << "n,seed,attempt,rank\n";
  for (const auto& row : rows) {
    nu_csv << row.n << "," << row.seed << "," << format_double(row.nu) << "\n";
    for (const auto& [attempt, rank] : row.rank_trace)
      rank_csv << row.n << "," << row.seed << "," << attempt << "," << rank << "\n";
    if (row.prepass_rank_misses > 0)
      std::cerr << "warning: n=" << row.n << " seed=" << row.seed << ": "
                << row.prepass_rank_misses << " pre-pass probes did not increase rank\n";
  }
  std::cout << "condition-sweep: " << rows.size() << " runs";
  double lo = 1e300, hi = 0;
  for (const auto& row : rows) {
    lo = std::min(lo, row.nu);
    hi = std::max(hi, row.nu);
  }
  if (!rows.empty()) std::cout << ", nu in [" << lo << ", " << hi << "]";
  std::cout << "\n";
  return 0;
}

int cmd_chi_spectroscopy(const RunContext& ctx, const std::string& model_path, double eta,
                         double delta) {
  Lindbladian model = ctx.load_model(model_path);
  SparsityReport rep = validate(model);
  ChannelOracle oracle = ctx.make_oracle(model);

  StructureOptions opts;
  opts.eta = eta;
  opts.delta = delta;
  opts.sparsity_m = std::max<size_t>(1, rep.m);
  opts.lambda = lambda_bound(model);
  ChebyshevSchedule schedule = params_second(1.0, opts.lambda, eta * eta);

  std::ofstream chi_csv(ctx.out_path("chi_series.csv"));
  chi_csv << ctx.csv_header() << "t,pauli,rate,eps_s\n";
  std::vector<ChiDiagonal> per_node;
  double delta_s = delta / static_cast<double>(schedule.nodes.size());
  for (double t : schedule.nodes) {
    ChiDiagonal chi = oracle.query_chi_rates(t, schedule.eps_s, delta_s);
    std::map<PauliString, double> sorted(chi.entries.begin(), chi.entries.end());
    for (const auto& [p, v] : sorted)
      chi_csv << format_double(t) << "," << p.text() << "," << format_double(v) << ","
              << format_double(schedule.eps_s) << "\n";
    per_node.push_back(std::move(chi));
  }

  std::set<PauliString> candidates;
  for (const auto& chi : per_node)
    for (const auto& [p, v] : chi.entries) candidates.insert(p);

  std::ofstream deriv_csv(ctx.out_path("chi_derivatives.csv"));
  deriv_csv << ctx.csv_header() << "pauli,deriv1,deriv2,classification\n";
  for (const auto& p : candidates) {
    if (p.is_identity()) continue;
    std::vector<double> samples;
    for (const auto& chi : per_node) samples.push_back(chi.at(p));
    double d1 = estimate_deriv1(schedule, samples);
    double d2 = estimate_deriv2(schedule, samples);
    std::string cls = d1 > eta / 2 ? "dissipator" : (d2 > eta * eta ? "hamiltonian" : "none");
    deriv_csv << p.text() << "," << format_double(d1) << "," << format_double(d2) << "," << cls
              << "\n";
  }
  std::cout << "chi-spectroscopy: " << per_node.size() << " nodes, " << candidates.size()
            << " traced rates\n";
  return 0;
}

int cmd_lowerbound(const RunContext& ctx, unsigned n, unsigned kappa, unsigned grid) {
  BalancedPauliSet null_set = BalancedPauliSet::build(n, kappa);
  Lindbladian null_model = build_lowerbound_lindbladian(n, kappa);
  LowerBoundVariant alt;
  alt.kind = LowerBoundVariant::Kind::Alternative;
  Lindbladian alt_model = build_lowerbound_lindbladian(n, kappa, alt);

  double t0 = t0_kappa(n, kappa);
  double nstar = n_star(n, kappa);

  size_t min_count = SIZE_MAX;
  json per_q = json::array();
  for (uint64_t code = 1; code < (uint64_t{1} << (2 * n)); ++code) {
    PauliString q = PauliString::from_code(n, code);
    size_t count = n_anticommuting(q, null_set);
    min_count = std::min(min_count, count);
    if (n <= 3) per_q.push_back({{"pauli", q.text()}, {"n_ac", count}});
  }

  ProductStateSpec all_z;
  all_z.letters = std::string(n, 'Z');
  all_z.signs.assign(n, 1);

  json mixing = json::array();
  std::ofstream decay_csv(ctx.out_path("decay_curves.csv"));
  decay_csv << ctx.csv_header() << "t,pauli,n_ac,closed_form,engine_lambda\n";
  AdjointPTM ptm(null_model);
  std::vector<PauliString> tracked;
  for (uint64_t code = 1; code < (uint64_t{1} << (2 * n)) && tracked.size() < 6; code += 7)
    tracked.push_back(PauliString::from_code(n, code));
  for (unsigned k = 0; k <= grid; ++k) {
    double t = 2.0 * t0 * k / std::max(1u, grid);
    MixingCertificate cert = mixing_certificate(null_set, all_z, t);
    mixing.push_back({{"t", t},
                      {"l2_dist", cert.l2_dist},
                      {"l2_bound", cert.l2_bound},
                      {"l1_bound", cert.l1_bound}});
    for (const auto& q : tracked) {
      double closed = pauli_decay(null_set, q, t);
      PauliVector evolved = evolve_observable(ptm, t, q);
      auto it = evolved.find(q);
      double engine = it == evolved.end() ? 0.0 : it->second.real();
      decay_csv << format_double(t) << "," << q.text() << "," << n_anticommuting(q, null_set)
                << "," << format_double(closed) << "," << format_double(engine) << "\n";
    }
  }

  json out;
  out["n"] = n;
  out["kappa"] = kappa;
  out["m_kappa"] = null_set.members.size();
  out["m_kappa_alt"] = alt_model.diss_support.size();
  out["n_star"] = nstar;
  out["t0"] = t0;
  out["min_n_ac"] = min_count;
  out["per_q_counts"] = per_q;
  out["mixing"] = mixing;
  ctx.write_json("lowerbound_report.json", out);
  std::cout << "lowerbound: M_kappa = " << null_set.members.size() << ", N* = " << nstar
            << ", t0 = " << t0 << ", min N_ac = " << min_count << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ansatz-free learning of sparse Pauli Lindbladians from time-evolution data"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalConfig global;
  app.add_option("--seed", global.seed, "RNG seed");
  app.add_option("--backend", global.backend, "exact | noise:EPS | sampled:SHOTS");
  app.add_option("--spam", global.spam, "SPAM retentions rP,rM");
  app.add_option("--out", global.out, "output directory");
  app.add_option("--threads", global.threads, "worker threads");
  app.add_flag("--rescale", global.rescale,
               "rescale the loaded model so that max |coefficient| = 1");

  std::string model_path, candidates_path, mode = "probe";
  double eta = 0.2, eps = 0.05, delta = 0.05, t_max = 1.0, sim_eps = 0.01;
  unsigned steps = 20, seeds = 16, lb_n = 4, lb_kappa = 2, lb_grid = 8;
  size_t oversample = 0;
  bool use_2m = false;
  std::vector<std::string> shapes = {"2x2", "2x3", "3x3", "3x4"};

  auto* sim = app.add_subcommand("simulate", "emit chi and fidelity time series");
  sim->add_option("--model", model_path)->required();
  sim->add_option("--t-max", t_max);
  sim->add_option("--steps", steps);
  sim->add_option("--eps-s", sim_eps);

  auto* ls = app.add_subcommand("learn-structure", "recover dissipator and Hamiltonian supports");
  ls->add_option("--model", model_path)->required();
  ls->add_option("--eta", eta);
  ls->add_option("--delta", delta);
  ls->add_flag("--use-2m", use_2m, "schedule with Lambda = 2M instead of the tight bound");

  auto* lc = app.add_subcommand("learn-coefficients", "recover coefficients on candidate supports");
  lc->add_option("--model", model_path)->required();
  lc->add_option("--candidates", candidates_path, "structure_result.json (defaults to the truth)");
  lc->add_option("--eps", eps);
  lc->add_option("--delta", delta);
  lc->add_option("--mode", mode, "probe | shadow");
  lc->add_option("--oversample", oversample, "extra probes, solved by normal equations");

  auto* e2e = app.add_subcommand("end-to-end", "structure learning then coefficient learning");
  e2e->add_option("--model", model_path)->required();
  e2e->add_option("--eta", eta);
  e2e->add_option("--eps", eps);
  e2e->add_option("--delta", delta);

  auto* cs = app.add_subcommand("condition-sweep", "conditioning factors on the lattice family");
  cs->add_option("--shapes", shapes, "lattice shapes LxW");
  cs->add_option("--seeds", seeds, "seeds per shape");

  auto* spec = app.add_subcommand("chi-spectroscopy", "chi traces and fitted derivatives");
  spec->add_option("--model", model_path)->required();
  spec->add_option("--eta", eta);
  spec->add_option("--delta", delta);

  auto* lb = app.add_subcommand("lowerbound", "balanced-set constructions and mixing certificates");
  lb->add_option("--n", lb_n);
  lb->add_option("--kappa", lb_kappa);
  lb->add_option("--grid", lb_grid);

  CLI11_PARSE(app, argc, argv);

  RunContext ctx;
  ctx.global = global;
  try {
    if (sim->parsed()) {
      ctx.command = "simulate";
      ctx.config = {{"model", model_path}, {"t_max", t_max}, {"steps", steps},
                    {"eps_s", sim_eps}};
      ctx.finalize();
      return cmd_simulate(ctx, model_path, t_max, steps, sim_eps);
    }
    if (ls->parsed()) {
      ctx.command = "learn-structure";
      ctx.config = {{"model", model_path}, {"eta", eta}, {"delta", delta}, {"use_2m", use_2m}};
      ctx.finalize();
      return cmd_learn_structure(ctx, model_path, eta, delta, use_2m);
    }
    if (lc->parsed()) {
      ctx.command = "learn-coefficients";
      ctx.config = {{"model", model_path}, {"candidates", candidates_path}, {"eps", eps},
                    {"delta", delta},      {"mode", mode},                  {"oversample", oversample}};
      ctx.finalize();
      return cmd_learn_coefficients(ctx, model_path, candidates_path, eps, delta, mode,
                                    oversample);
    }
    if (e2e->parsed()) {
      ctx.command = "end-to-end";
      ctx.config = {{"model", model_path}, {"eta", eta}, {"eps", eps}, {"delta", delta}};
      ctx.finalize();
      return cmd_end_to_end(ctx, model_path, eta, eps, delta);
    }
    if (cs->parsed()) {
      ctx.command = "condition-sweep";
      ctx.config = {{"shapes", shapes}, {"seeds", seeds}};
      ctx.finalize();
      return cmd_condition_sweep(ctx, shapes, seeds);
    }
    if (spec->parsed()) {
      ctx.command = "chi-spectroscopy";
      ctx.config = {{"model", model_path}, {"eta", eta}, {"delta", delta}};
      ctx.finalize();
      return cmd_chi_spectroscopy(ctx, model_path, eta, delta);
    }
    if (lb->parsed()) {
      ctx.command = "lowerbound";
      ctx.config = {{"n", lb_n}, {"kappa", lb_kappa}, {"grid", lb_grid}};
      ctx.finalize();
      return cmd_lowerbound(ctx, lb_n, lb_kappa, lb_grid);
    }
  } catch (const CapError& e) {
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return 4;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const InvalidInputError& e) {
    std::cerr << "invalid config: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
