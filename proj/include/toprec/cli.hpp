#pragma once

#include <future>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "toprec/chain.hpp"
#include "toprec/engine.hpp"
#include "toprec/io/json.hpp"
#include "toprec/loop_equations.hpp"
#include "toprec/observables.hpp"
#include "toprec/one_matrix.hpp"
#include "toprec/oracle.hpp"

namespace toprec::cli {

using io::Json;

enum ExitCode : int { kOk = 0, kValidation = 1, kComputation = 2 };

struct RunConfig {
  std::string subcommand;
  std::string curve_path;
  std::string model_path;
  std::string tensor_path;
  std::string output_path;
  std::vector<int> omega;  // {h, n}
  std::optional<int> free_energy;
  bool build_curve = false;
  std::optional<int> expand;
  std::string suite = "all";
  int max_chi = 4;
  std::vector<int> powers;
  std::string t = "1";
};

/// Curve (and, when given a model, the model) a run operates on.
struct Inputs {
  std::optional<io::Model> model;
  std::optional<SpectralCurve> curve;
  std::optional<OneCutSeries> series;
  std::optional<GaussianChainCurve> gaussian_chain;
};

inline bool is_gaussian_chain(const ChainModel& m) {
  if (m.lambdas.size() != 1 || !is_zero(m.lambdas[0])) return false;
  for (const auto& v : m.potentials)
    if (v.degree() != 2 || !is_zero(v.coefficient(1))) return false;
  return true;
}

inline Inputs load_inputs(const RunConfig& cfg, bool need_curve) {
  Inputs in;
  if (!cfg.curve_path.empty()) {
    in.curve = validate_curve(io::curve_spec_from_json(io::read_json_file(cfg.curve_path)));
    return in;
  }
  in.model = io::model_from_json(io::read_json_file(cfg.model_path));
  if (const auto* om = std::get_if<OneMatrixModel>(&*in.model)) {
    if (std::holds_alternative<Scalar>(om->t)) in.curve = one_cut_curve(*om);
    else in.series = one_cut_series(*om);
  } else {
    const auto& cm = std::get<ChainModel>(*in.model);
    if (is_gaussian_chain(cm)) {
      in.gaussian_chain = gaussian_chain_curve(cm);
      if (in.gaussian_chain->gamma) in.curve = in.gaussian_chain->to_spectral_curve();
    }
  }
  if (need_curve && !in.curve)
    throw ComputationError("the model does not yield an exact rational spectral curve (series-mode or irrational data); use --build-curve");
  return in;
}

inline void emit(const RunConfig& cfg, const Json& j) {
  const std::string text = io::canonical(j);
  if (cfg.output_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.output_path, std::ios::binary);
  if (!out) throw ComputationError("cannot write " + cfg.output_path);
  out << text;
}

/// Engine with the optional on-disk memo table attached.
struct CachedEngine {
  Engine engine;
  std::optional<io::MemoCache> cache;
  explicit CachedEngine(const SpectralCurve& c) : engine(c), cache(io::MemoCache::from_environment()) {
    if (cache) cache->load(engine);
  }
  void persist() {
    if (cache) cache->store(engine);
  }
};

inline Json build_curve_json(const Inputs& in) {
  Json j;
  if (in.curve) j["curve"] = io::curve_to_json(*in.curve);
  if (in.series) j["series_curve"] = io::one_cut_series_to_json(*in.series);
  if (in.gaussian_chain) {
    const auto& g = *in.gaussian_chain;
    Json gc{{"A1", io::scalar_to_json(g.A1)}, {"gamma2", io::scalar_to_json(g.gamma2)}};
    if (g.gamma) gc["gamma"] = io::scalar_to_json(*g.gamma);
    Json mom = Json::array();
    for (const auto& v : g.planar_moments(8)) mom.push_back(io::scalar_to_json(v));
    gc["planar_moments"] = mom;
    j["gaussian_chain"] = gc;
  }
  if (in.model)
    if (const auto* cm = std::get_if<ChainModel>(&*in.model)) {
      const SaddleCount sc = saddle_count(*cm);
      j["saddle_count"] = {{"degree", sc.degree}, {"polynomial", io::poly_to_json(sc.polynomial)}};
    }
  return j;
}

inline int cmd_compute(const RunConfig& cfg) {
  const bool need_engine = !cfg.omega.empty() || cfg.free_energy.has_value();
  const Inputs in = load_inputs(cfg, need_engine);
  Json out = Json::object();
  if (cfg.build_curve || !need_engine) {
    const Json built = build_curve_json(in);
    for (const auto& [k, v] : built.items()) out[k] = v;
  }
  if (need_engine) {
    CachedEngine ce(*in.curve);
    if (!cfg.omega.empty()) {
      const Multidifferential& w = ce.engine.omega(cfg.omega[0], cfg.omega[1]);
      out["omega"] = io::tensor_to_json(w);
      if (cfg.expand) out["expansion"] = io::expansion_to_json(expand_observable(ce.engine.curve(), w, {*cfg.expand}));
    }
    if (cfg.free_energy) {
      const Scalar f = ce.engine.free_energy(*cfg.free_energy);
      out["free_energy"] = {{"h", *cfg.free_energy}, {"value", io::scalar_to_json(f)}};
    }
    ce.persist();
  }
  emit(cfg, out);
  return kOk;
}

// --- verify -------------------------------------------------------------------

struct SuiteResult {
  std::string name;
  bool skipped = false;
  std::string reason;
  Json checks = Json::array();
  std::optional<Json> counterexample;

  void add(Json check, bool pass) {
    if (!pass && !counterexample) counterexample = check;
    checks.push_back(std::move(check));
  }
  bool pass() const { return !counterexample; }
  Json to_json() const {
    Json j{{"pass", pass()}, {"checks", checks}};
    if (skipped) j = Json{{"pass", true}, {"skipped", reason}};
    if (counterexample) j["counterexample"] = *counterexample;
    return j;
  }
};

/// (h, n) with n >= 1 and 1 <= 2h + n - 2 <= max_chi.
inline std::vector<std::pair<int, int>> stable_range(int max_chi, int min_n = 1) {
  std::vector<std::pair<int, int>> out;
  for (int h = 0; 2 * h - 1 <= max_chi; ++h)
    for (int n = std::max(1, min_n); 2 * h + n - 2 <= max_chi; ++n)
      if (2 * h + n - 2 >= 1) out.emplace_back(h, n);
  return out;
}

inline SuiteResult suite_symmetry(Engine& e, int max_chi) {
  SuiteResult r{"symmetry"};
  for (auto [h, n] : stable_range(max_chi, 2)) {
    const CheckResult c = check_symmetry(e.omega(h, n));
    r.add(Json{{"h", h}, {"n", n}, {"pass", c.pass}, {"detail", c.detail}}, c.pass);
  }
  return r;
}

inline SuiteResult suite_residue(Engine& e, int max_chi) {
  SuiteResult r{"residue"};
  for (auto [h, n] : stable_range(max_chi)) {
    const CheckResult c = check_residue_free(e.omega(h, n));
    r.add(Json{{"h", h}, {"n", n}, {"pass", c.pass}, {"detail", c.detail}}, c.pass);
  }
  return r;
}

inline SuiteResult suite_phi(Engine& e, int max_chi) {
  SuiteResult r{"phi"};
  for (auto [h, n] : stable_range(max_chi - 1)) {
    if (2 - 2 * h - n >= 0) continue;
    const CheckResult c = e.phi_operator_check(h, n);
    r.add(Json{{"h", h}, {"n", n}, {"pass", c.pass}, {"detail", c.detail}}, c.pass);
  }
  return r;
}

/// Loop equations for (h, n) with 2h + n - 2 <= max_chi, n counting the
/// frozen variables; pairs are evaluated concurrently on one engine.
inline SuiteResult suite_loop(Engine& e, const Inputs& in, int max_chi) {
  SuiteResult r{"loop"};
  const OneMatrixModel* om = in.model ? std::get_if<OneMatrixModel>(&*in.model) : nullptr;
  if (!om || !std::holds_alternative<Scalar>(om->t)) {
    r.skipped = true;
    r.reason = "needs a one-matrix model with rational t";
    return r;
  }
  const Scalar t = std::get<Scalar>(om->t);
  check_curve_matches_potential(e.curve(), om->V, t);
  std::vector<std::pair<int, int>> pairs;
  for (int h = 0; 2 * h - 2 <= max_chi; ++h)
    for (int n = 0; 2 * h + n - 2 <= max_chi; ++n)
      if (2 * h + n - 2 >= -1 && !(h == 0 && n == 0)) pairs.emplace_back(h, n);
  std::vector<std::future<LoopResidual>> jobs;
  for (auto [h, n] : pairs)
    jobs.push_back(std::async(std::launch::async, [&e, om, t, h = h, n = n] { return loop_equation_residual(e, om->V, t, h, n); }));
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const LoopResidual res = jobs[i].get();
    Json c{{"h", pairs[i].first}, {"n", pairs[i].second}, {"pass", res.pass()}, {"degree_bound", res.degree_bound}};
    if (res.is_polynomial) c["polynomial"] = io::poly_to_json(res.polynomial);
    if (!res.detail.empty()) c["detail"] = res.detail;
    r.add(c, res.pass());
  }
  return r;
}

inline SuiteResult suite_oracle(Engine& e, const Inputs& in, int max_chi) {
  SuiteResult r{"oracle"};
  const OneMatrixModel* om = in.model ? std::get_if<OneMatrixModel>(&*in.model) : nullptr;
  if (!om || !std::holds_alternative<Scalar>(om->t) || om->V.degree() != 2) {
    r.skipped = true;
    r.reason = "needs a Gaussian one-matrix model with rational t";
    return r;
  }
  struct Job {
    int h, n, order;
  };
  std::vector<Job> jobs{{0, 1, 12}, {1, 1, 8}, {0, 2, 4}, {2, 1, 8}, {0, 3, 3}, {1, 2, 3}};
  for (const Job& j : jobs) {
    if (2 * j.h + j.n - 2 > max_chi) continue;
    const ComparisonReport rep = compare_with_engine(e, *om, j.h, j.n, {j.order});
    Json c{{"h", j.h}, {"n", j.n}, {"order", j.order}, {"pass", rep.pass()}, {"compared", rep.entries.size()}};
    if (auto m = rep.first_mismatch()) {
      std::string key;
      for (std::size_t i = 0; i < m->index.size(); ++i) key += (i ? "," : "") + std::to_string(m->index[i]);
      c["first_mismatch"] = {{"index", key}, {"engine", io::scalar_to_json(m->engine)}, {"oracle", io::scalar_to_json(m->oracle)}};
    }
    r.add(c, rep.pass());
  }
  return r;
}

inline int cmd_verify(const RunConfig& cfg) {
  static const std::vector<std::string> known{"loop", "symmetry", "phi", "oracle", "residue", "all"};
  if (std::find(known.begin(), known.end(), cfg.suite) == known.end())
    throw ValidationError("suite", "unknown suite '" + cfg.suite + "' (expected loop, symmetry, phi, oracle, residue or all)");
  if (cfg.max_chi < 1) throw ValidationError("max-chi", "--max-chi must be >= 1");
  const Inputs in = load_inputs(cfg, true);
  CachedEngine ce(*in.curve);
  Json report = Json::object();
  bool all_pass = true;
  std::optional<Json> first;
  auto record = [&](const SuiteResult& s) {
    report[s.name] = s.to_json();
    if (!s.pass()) {
      all_pass = false;
      if (!first) first = Json{{"suite", s.name}, {"check", *s.counterexample}};
    }
  };

  if (!cfg.tensor_path.empty()) {
    const Multidifferential w = io::tensor_from_json(io::read_json_file(cfg.tensor_path), ce.engine.curve().branch_points());
    SuiteResult s{"tensor"};
    const CheckResult sym = check_symmetry(w);
    s.add(Json{{"check", "symmetry"}, {"h", w.h()}, {"n", w.n()}, {"pass", sym.pass}, {"detail", sym.detail}}, sym.pass);
    const CheckResult res = check_residue_free(w);
    s.add(Json{{"check", "residue"}, {"h", w.h()}, {"n", w.n()}, {"pass", res.pass}, {"detail", res.detail}}, res.pass);
    record(s);
  } else {
    const bool all = cfg.suite == "all";
    if (all || cfg.suite == "symmetry") record(suite_symmetry(ce.engine, cfg.max_chi));
    if (all || cfg.suite == "residue") record(suite_residue(ce.engine, cfg.max_chi));
    if (all || cfg.suite == "phi") record(suite_phi(ce.engine, cfg.max_chi));
    if (all || cfg.suite == "loop") record(suite_loop(ce.engine, in, cfg.max_chi));
    if (all || cfg.suite == "oracle") record(suite_oracle(ce.engine, in, cfg.max_chi));
  }
  ce.persist();
  Json out{{"pass", all_pass}, {"max_chi", cfg.max_chi}, {"suites", report}};
  if (first) out["counterexample"] = *first;
  emit(cfg, out);
  if (!all_pass) {
    std::cerr << "verify: failed; first counterexample: " << first->dump() << "\n";
    return kValidation;
  }
  return kOk;
}

inline int cmd_oracle(const RunConfig& cfg) {
  if (cfg.powers.empty()) throw ValidationError("powers", "--powers needs at least one trace power");
  Scalar t;
  try {
    t = parse_scalar(cfg.t);
  } catch (const Error& e) {
    throw ValidationError("t", e.what());
  }
  const MomentResult m = gaussian_mixed_moment(WickModel{t, {}}, cfg.powers);
  Json by_genus = Json::object(), full = Json::object();
  const int n = static_cast<int>(cfg.powers.size());
  for (const auto& [p, c] : m.connected) {
    const int twice_h = 2 - n - p;
    if (twice_h >= 0 && twice_h % 2 == 0) by_genus[std::to_string(twice_h / 2)] = io::scalar_to_json(c);
  }
  for (const auto& [p, c] : m.full) full[std::to_string(p)] = io::scalar_to_json(c);
  emit(cfg, Json{{"powers", cfg.powers}, {"t", io::scalar_to_json(t)}, {"by_genus", by_genus}, {"full_by_N_power", full}});
  return kOk;
}

/// Entry point; returns the process exit status.
inline int run(int argc, char** argv) {
  CLI::App app{"Topological recursion on genus-0 spectral curves"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_inputs = [&](CLI::App* sub) {
    auto* c = sub->add_option("--curve", cfg.curve_path, "curve spec JSON")->check(CLI::ExistingFile);
    auto* m = sub->add_option("--model", cfg.model_path, "model spec JSON")->check(CLI::ExistingFile);
    c->excludes(m);
    m->excludes(c);
    return std::pair{c, m};
  };

  CLI::App* compute = app.add_subcommand("compute", "compute correlators, free energies or curves");
  auto [cc, cm] = add_inputs(compute);
  compute->add_option("--omega", cfg.omega, "h n")->expected(2);
  compute->add_option("--free-energy", cfg.free_energy, "genus h >= 2");
  compute->add_flag("--build-curve", cfg.build_curve, "emit the spectral curve built from the model");
  compute->add_option("--expand", cfg.expand, "expansion order at the physical pole (needs --omega)")->check(CLI::NonNegativeNumber);
  compute->add_option("--output,-o", cfg.output_path, "output file (default stdout)");

  CLI::App* verify = app.add_subcommand("verify", "run property suites");
  add_inputs(verify);
  verify->add_option("--suite", cfg.suite, "loop | symmetry | phi | oracle | residue | all");
  verify->add_option("--max-chi", cfg.max_chi, "bound on 2h + n - 2");
  verify->add_option("--tensor", cfg.tensor_path, "check a stored correlator instead")->check(CLI::ExistingFile);
  verify->add_option("--output,-o", cfg.output_path, "report file (default stdout)");

  CLI::App* oracle = app.add_subcommand("oracle", "Gaussian Wick moments by fatgraph enumeration");
  oracle->add_option("--powers", cfg.powers, "trace powers")->required();
  oracle->add_option("--t", cfg.t, "'t Hooft parameter");
  oracle->add_option("--output,-o", cfg.output_path, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidation;
  }

  try {
    if (compute->parsed()) {
      cfg.subcommand = "compute";
      if (cfg.curve_path.empty() && cfg.model_path.empty()) throw ValidationError("inputs", "compute needs --curve or --model");
      if (cfg.expand && cfg.omega.empty()) throw ValidationError("inputs", "--expand needs --omega");
      if (!cfg.curve_path.empty() && cfg.omega.empty() && !cfg.free_energy && !cfg.build_curve)
        throw ValidationError("inputs", "nothing to compute: pass --omega, --free-energy or --build-curve");
      return cmd_compute(cfg);
    }
    if (verify->parsed()) {
      cfg.subcommand = "verify";
      if (cfg.curve_path.empty() && cfg.model_path.empty()) throw ValidationError("inputs", "verify needs --curve or --model");
      return cmd_verify(cfg);
    }
    cfg.subcommand = "oracle";
    return cmd_oracle(cfg);
  } catch (const ValidationError& e) {
    std::cerr << "error: invalid input (" << e.invariant() << "): " << e.what() << "\n";
    return kValidation;
  } catch (const ParseError& e) {
    std::cerr << "error: invalid input: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kComputation;
  }
}

}  // namespace toprec::cli
