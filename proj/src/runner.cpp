#include "corrsim/runner.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "corrsim/errors.hpp"
#include "corrsim/unfold.hpp"

namespace corrsim {

namespace {

using ordered_json = nlohmann::ordered_json;

double qtrace_distance(const Qubit& x, const Qubit& y) {
  const Qubit d{x[0] - y[0], x[1] - y[1], x[2] - y[2], x[3] - y[3]};
  const double m = 0.5 * (d[0].real() + d[3].real());
  const double h = 0.5 * (d[0].real() - d[3].real());
  const double r = std::sqrt(h * h + std::norm(d[1]));
  return 0.5 * (std::abs(m + r) + std::abs(m - r));
}

std::string format_cell(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12e", v);
  return buf;
}

}  // namespace

void RunConfig::validate() const {
  if (num_modes < 1) throw ConfigError("config: num_modes must be >= 1");
  if (delta_omega <= 0.0) throw ConfigError("config: delta_omega must be > 0");
  if (delta_tau <= 0.0) throw ConfigError("config: delta_tau must be > 0");
  if (tau_final < delta_tau)
    throw ConfigError("config: tau_final must be >= delta_tau");
  if (methods.empty()) throw ConfigError("config: methods must be non-empty");
  if (sample_stride < 1) throw ConfigError("config: sample_stride must be >= 1");
}

RunConfig RunConfig::preset(const std::string& name) {
  RunConfig cfg;
  if (name == "fig1") {
    cfg.j = SpectralDensity::make_ohmic(1.0, 10.0);
    cfg.delta_omega = 0.1;
  } else if (name == "fig2") {
    // lambda/Gamma = 0.2; the absolute scale puts the strongly non-Markovian
    // window (where the memory-kernel techniques misbehave) inside the
    // default horizon.
    cfg.j = SpectralDensity::make_lorentzian(2.5, 0.5);
    cfg.delta_omega = 0.05;
  } else {
    throw ConfigError("unknown preset '" + name + "' (expected fig1 or fig2)");
  }
  return cfg;
}

void RunConfig::apply_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  static const std::vector<std::string> allowed = {
      "spectral_density", "num_modes",    "delta_omega", "omega0",
      "delta_tau",        "tau_final",    "b_width",     "methods",
      "exact_scheme",     "output_dir",   "sample_stride", "seed"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError("config: unknown key '" + key + "'");
  }
  try {
    if (j.contains("spectral_density")) {
      const auto& sj = j.at("spectral_density");
      const std::string kind = sj.at("kind").get<std::string>();
      if (kind == "ohmic") {
        this->j = SpectralDensity::make_ohmic(
            sj.at("eta").get<double>(), sj.at("omega_c").get<double>());
      } else if (kind == "lorentzian") {
        this->j = SpectralDensity::make_lorentzian(
            sj.at("gamma").get<double>(), sj.at("lambda").get<double>());
      } else {
        throw ConfigError("config: spectral_density.kind must be ohmic or "
                          "lorentzian");
      }
    }
    if (j.contains("num_modes")) num_modes = j.at("num_modes").get<std::size_t>();
    if (j.contains("delta_omega")) delta_omega = j.at("delta_omega").get<double>();
    if (j.contains("omega0")) omega0 = j.at("omega0").get<double>();
    if (j.contains("delta_tau")) delta_tau = j.at("delta_tau").get<double>();
    if (j.contains("tau_final")) tau_final = j.at("tau_final").get<double>();
    if (j.contains("b_width")) b_width = j.at("b_width").get<double>();
    if (j.contains("methods")) {
      methods.clear();
      for (const auto& name : j.at("methods")) {
        const auto m = method_from_string(name.get<std::string>());
        if (!m) throw ConfigError("config: unknown method '" +
                                  name.get<std::string>() + "'");
        methods.push_back(*m);
      }
    }
    if (j.contains("exact_scheme")) {
      const std::string s = j.at("exact_scheme").get<std::string>();
      if (s == "eigenprop") scheme = ExactScheme::eigenprop;
      else if (s == "rk4") scheme = ExactScheme::rk4;
      else throw ConfigError("config: exact_scheme must be eigenprop or rk4");
    }
    if (j.contains("output_dir")) output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("sample_stride"))
      sample_stride = j.at("sample_stride").get<std::size_t>();
    if (j.contains("seed")) seed = j.at("seed").get<long>();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

std::string RunConfig::to_json_string() const {
  ordered_json sj;
  if (j.kind == SpectralDensity::Kind::ohmic) {
    sj = {{"kind", "ohmic"}, {"eta", j.eta}, {"omega_c", j.omega_c}};
  } else {
    sj = {{"kind", "lorentzian"}, {"gamma", j.gamma}, {"lambda", j.lambda}};
  }
  ordered_json out{{"spectral_density", sj},
                   {"num_modes", num_modes},
                   {"delta_omega", delta_omega},
                   {"omega0", omega0},
                   {"delta_tau", delta_tau},
                   {"tau_final", tau_final},
                   {"b_width", b_width},
                   {"methods", ordered_json::array()},
                   {"exact_scheme",
                    scheme == ExactScheme::eigenprop ? "eigenprop" : "rk4"},
                   {"output_dir", output_dir},
                   {"sample_stride", sample_stride},
                   {"seed", seed}};
  for (MethodId m : methods) out["methods"].push_back(to_string(m));
  return out.dump(2);
}

namespace {

// Everything one method pass needs to compare itself against the exact
// trajectory on the full grid.
struct MetricObserver {
  const ModeSet* modes = nullptr;
  TruncatedBasis basis;
  const std::vector<PureState>* exact_traj = nullptr;
  double dtau = 0.0;
  double b_width = 0.0;
  std::size_t stride = 1;
  MethodId method{};
  Qubit rho0{};

  ComplexMatrix chi_buf, chi_ex, chi_r0;
  ComplexMatrix vacuum;
  MethodResult* res = nullptr;

  double prev_dhs = 0.0, prev_td = 0.0, acc_dhs = 0.0, acc_td = 0.0;

  void init(std::size_t nb) {
    chi_buf = ComplexMatrix(2 * nb);
    chi_ex = ComplexMatrix(2 * nb);
    vacuum = ComplexMatrix(nb);
    vacuum(0, 0) = 1.0;
    if (method == MethodId::CR) {
      chi_r0 = ComplexMatrix(2 * nb);
      chi_redfield_into(chi_r0, rho0, *modes, 0.0, b_width);
    }
  }

  const ComplexMatrix* method_chi(const StepView& view) {
    if (view.chi) return view.chi;
    switch (method) {
      case MethodId::TCL2:
        chi_tcl2_into(chi_buf, view.rho_s, *modes, view.tau);
        break;
      case MethodId::REDFIELD:
        chi_redfield_into(chi_buf, view.rho_s, *modes, view.tau, b_width);
        break;
      case MethodId::CR:
        chi_cr_into(chi_buf, view.rho_s, chi_r0, *modes, view.tau, b_width);
        break;
      case MethodId::LINDBLAD:
        chi_lindblad_sum_into(chi_buf, view.rho_s, *modes, view.tau, b_width);
        break;
      case MethodId::MLL:
        chi_mll_into(chi_buf, view.rho_s, vacuum, *modes, view.tau);
        break;
      default:
        chi_buf.set_zero();
        break;
    }
    return &chi_buf;
  }

  void operator()(const StepView& view) {
    const PureState psi =
        to_interaction_picture((*exact_traj)[view.step], *modes);
    Qubit rho_ex{};
    chi_exact_into(psi, basis, chi_ex, &rho_ex);

    const ComplexMatrix* chi_m = method_chi(view);
    const double dhs = hs_distance(*chi_m, chi_ex);
    const double td = qtrace_distance(view.rho_s, rho_ex);
    if (view.step > 0) {
      acc_dhs += 0.5 * dtau * (prev_dhs + dhs);
      acc_td += 0.5 * dtau * (prev_td + td);
    }
    prev_dhs = dhs;
    prev_td = td;
    if (view.step % stride == 0) {
      res->chi_norm.push_back(hs_norm(*chi_m));
      res->dhs_chi.push_back(dhs);
      res->acc_dhs_chi.push_back(acc_dhs);
      res->td_state.push_back(td);
      res->acc_td_state.push_back(acc_td);
    }
  }
};

std::vector<std::string> ranking(const std::vector<const MethodResult*>& rs,
                                 std::size_t idx, bool by_norm_gap,
                                 const double chi_norm_ex) {
  std::vector<std::pair<double, std::string>> keyed;
  for (const MethodResult* r : rs) {
    const double key = by_norm_gap
                           ? std::abs(r->chi_norm[idx] - chi_norm_ex)
                           : r->dhs_chi[idx];
    keyed.emplace_back(key, to_string(r->method));
  }
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::string> names;
  for (auto& [_, n] : keyed) names.push_back(n);
  return names;
}

InconsistencyReport detect_inconsistency(const ScenarioResult& out) {
  InconsistencyReport rep;
  std::vector<const MethodResult*> rs;
  for (const auto& m : out.methods) rs.push_back(&m);
  if (rs.size() < 2) return rep;
  const std::size_t n = out.exact.times.size();
  bool in_window = false;
  for (std::size_t i = 0; i < n; ++i) {
    const auto by_norm = ranking(rs, i, true, out.exact.chi_norm[i]);
    const auto by_dist = ranking(rs, i, false, 0.0);
    const bool differ = by_norm != by_dist;
    if (differ) {
      ++rep.num_samples;
      if (!rep.found) {
        rep.found = true;
        rep.first_start = out.exact.times[i];
        rep.first_end = out.exact.times[i];
        rep.example_time = out.exact.times[i];
        rep.ranking_by_norm_gap = by_norm;
        rep.ranking_by_distance = by_dist;
        in_window = true;
      } else if (in_window) {
        rep.first_end = out.exact.times[i];
      }
    } else if (in_window) {
      in_window = false;
    }
  }
  return rep;
}

}  // namespace

ScenarioResult run_scenario(const RunConfig& config) {
  config.validate();
  return run_scenario(
      config, discretize(config.j, config.num_modes, config.delta_omega,
                         config.omega0));
}

ScenarioResult run_scenario(const RunConfig& config, const ModeSet& modes) {
  config.validate();
  if (modes.count != config.num_modes)
    throw ConfigError("run_scenario: mode set does not match config");
  const TruncatedBasis basis = modes.basis();
  const double b = config.effective_b_width();
  const std::size_t stride = config.sample_stride;

  ScenarioResult out;
  out.config = config;

  const PureState psi0 = initial_plus_state(config.num_modes);
  const std::vector<PureState> traj =
      evolve_exact(modes, psi0, config.delta_tau, config.tau_final,
                   config.scheme);

  // Exact time series and the accumulated bath deviation from its initial
  // state (the constant-bath approximation error of the reduced methods).
  {
    ComplexMatrix chi_ex(basis.dim());
    double acc = 0.0, prev = 0.0;
    for (std::size_t n = 0; n < traj.size(); ++n) {
      const PureState psi = to_interaction_picture(traj[n], modes);
      const double bath_td = bath_trace_distance_from_vacuum(psi);
      if (n > 0) acc += 0.5 * config.delta_tau * (prev + bath_td);
      prev = bath_td;
      if (n % stride == 0) {
        Qubit rho_ex{};
        chi_exact_into(psi, basis, chi_ex, &rho_ex);
        out.exact.times.push_back(psi.time);
        out.exact.rho11.push_back(rho_ex[3].real());
        out.exact.coherence.push_back(std::abs(rho_ex[1]));
        out.exact.chi_norm.push_back(hs_norm(chi_ex));
        out.exact.acc_bath_td.push_back(acc);
      }
    }
  }

  const ComplexMatrix rho_s0 = [] {
    ComplexMatrix r(2);
    r(0, 0) = r(0, 1) = r(1, 0) = r(1, 1) = 0.5;
    return r;
  }();

  for (MethodId m : config.methods) {
    MethodResult res;
    res.method = m;
    MetricObserver obs;
    obs.modes = &modes;
    obs.basis = basis;
    obs.exact_traj = &traj;
    obs.dtau = config.delta_tau;
    obs.b_width = b;
    obs.stride = stride;
    obs.method = m;
    obs.rho0 = qubit_from(rho_s0);
    obs.res = &res;
    obs.init(basis.bath_dim());

    SolverOptions opts;
    opts.sample_stride = stride;
    opts.observer = [&obs](const StepView& v) { obs(v); };
    try {
      MethodResult solved = solve(m, modes, basis, rho_s0, config.delta_tau,
                                  config.tau_final, b, opts);
      // merge: solver fills times/rho11/coherence/flags, observer the rest
      solved.chi_norm = std::move(res.chi_norm);
      solved.dhs_chi = std::move(res.dhs_chi);
      solved.acc_dhs_chi = std::move(res.acc_dhs_chi);
      solved.td_state = std::move(res.td_state);
      solved.acc_td_state = std::move(res.acc_td_state);
      out.methods.push_back(std::move(solved));
    } catch (const std::exception& e) {
      out.errors.emplace(to_string(m), e.what());
      std::cerr << to_string(m) << ": " << e.what() << "\n";
    }
    std::cerr << to_string(m) << " done\n";
  }

  out.norm_vs_distance = detect_inconsistency(out);
  return out;
}

namespace {

void write_method_csv(const std::filesystem::path& path,
                      const MethodResult& r) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << "t,rho11,coherence,chi_norm,dhs_chi,acc_dhs_chi,td_state,acc_td_state,"
       "neg_pop_flag\n";
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    f << format_cell(r.times[i]) << ',' << format_cell(r.rho11[i]) << ','
      << format_cell(r.coherence[i]) << ',' << format_cell(r.chi_norm[i])
      << ',' << format_cell(r.dhs_chi[i]) << ','
      << format_cell(r.acc_dhs_chi[i]) << ',' << format_cell(r.td_state[i])
      << ',' << format_cell(r.acc_td_state[i]) << ','
      << format_cell(static_cast<double>(r.neg_pop_flag[i])) << '\n';
  }
}

}  // namespace

void emit(const ScenarioResult& result, const RunConfig& config) {
  namespace fs = std::filesystem;
  const fs::path dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);

  for (const MethodResult& r : result.methods)
    write_method_csv(dir / (to_string(r.method) + ".csv"), r);

  {
    std::ofstream f(dir / "exact.csv", std::ios::binary);
    if (!f) throw ConfigError("cannot write exact.csv");
    f << "t,rho11,coherence,chi_norm,bath_td_from_initial\n";
    const ExactSeries& e = result.exact;
    for (std::size_t i = 0; i < e.times.size(); ++i) {
      f << format_cell(e.times[i]) << ',' << format_cell(e.rho11[i]) << ','
        << format_cell(e.coherence[i]) << ',' << format_cell(e.chi_norm[i])
        << ',' << format_cell(e.acc_bath_td[i]) << '\n';
    }
  }

  ordered_json summary;
  summary["config"] = ordered_json::parse(config.to_json_string());
  ordered_json methods_json;
  for (const MethodResult& r : result.methods) {
    methods_json[to_string(r.method)] = {
        {"final_acc_dhs_chi", r.acc_dhs_chi.back()},
        {"final_acc_td_state", r.acc_td_state.back()},
        {"final_chi_norm", r.chi_norm.back()},
        {"wall_seconds", r.wall_seconds},
        {"neg_pop_flag", r.neg_pop_any}};
  }
  summary["methods"] = methods_json;
  const InconsistencyReport& rep = result.norm_vs_distance;
  summary["norm_vs_distance"] = {
      {"inconsistency_found", rep.found},
      {"num_inconsistent_samples", rep.num_samples},
      {"first_window", {{"t_start", rep.first_start}, {"t_end", rep.first_end}}},
      {"example_time", rep.example_time},
      {"ranking_by_norm_gap", rep.ranking_by_norm_gap},
      {"ranking_by_distance", rep.ranking_by_distance}};
  if (!result.errors.empty()) {
    ordered_json errs;
    for (const auto& [m, msg] : result.errors) errs[m] = msg;
    summary["errors"] = errs;
  }
  std::ofstream f(dir / "summary.json", std::ios::binary);
  if (!f) throw ConfigError("cannot write summary.json");
  f << summary.dump(2) << '\n';
}

int cli(const std::vector<std::string>& args) {
  CLI::App app{"correlation-operator dynamics for a qubit in a bath of "
               "two-level systems"};
  std::string config_path, preset_name, methods_csv, out_dir;
  bool small = false;
  long seed = 0;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--preset", preset_name, "parameter preset (fig1 or fig2)");
  app.add_option("--methods", methods_csv,
                 "comma-separated method list overriding the preset");
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--small", small, "reduce to M=16 modes (smoke mode)");
  app.add_option("--seed", seed, "reserved; the dynamics is deterministic");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    std::cerr << app.help() << "\n";
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  RunConfig cfg;
  try {
    if (preset_name.empty() && config_path.empty())
      throw ConfigError("need --preset or --config");
    if (!preset_name.empty()) cfg = RunConfig::preset(preset_name);
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw ConfigError("cannot read config file " + config_path);
      std::stringstream ss;
      ss << f.rdbuf();
      cfg.apply_json(ss.str());
    }
    if (!methods_csv.empty()) {
      cfg.methods.clear();
      std::stringstream ss(methods_csv);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        const auto m = method_from_string(tok);
        if (!m) throw ConfigError("unknown method '" + tok + "'");
        cfg.methods.push_back(*m);
      }
    }
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (small) cfg.num_modes = 16;
    cfg.seed = seed;
    cfg.validate();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n" << app.help() << "\n";
    return 2;
  }

  try {
    const ScenarioResult result = run_scenario(cfg);
    emit(result, cfg);
    if (!result.errors.empty()) return 3;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace corrsim
