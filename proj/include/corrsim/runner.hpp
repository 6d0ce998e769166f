#pragma once

#include <map>
#include <string>
#include <vector>

#include "corrsim/exact.hpp"
#include "corrsim/mesolve.hpp"
#include "corrsim/model.hpp"

namespace corrsim {

struct RunConfig {
  SpectralDensity j = SpectralDensity::make_ohmic(1.0, 10.0);
  std::size_t num_modes = 255;
  double delta_omega = 0.1;
  double omega0 = 1.0;
  double delta_tau = 0.0005;
  double tau_final = 3.0;
  double b_width = 0.0;  // <= 0 means delta_omega
  std::vector<MethodId> methods{kAllMethods.begin(), kAllMethods.end()};
  ExactScheme scheme = ExactScheme::eigenprop;
  std::string output_dir = "out";
  std::size_t sample_stride = 20;
  long seed = 0;  // reserved; the dynamics is deterministic

  double effective_b_width() const {
    return b_width > 0.0 ? b_width : delta_omega;
  }
  void validate() const;  // throws ConfigError

  static RunConfig preset(const std::string& name);  // "fig1" or "fig2"
  // Applies the keys present in the JSON text on top of *this.
  void apply_json(const std::string& text);
  std::string to_json_string() const;
};

struct ExactSeries {
  std::vector<double> times;
  std::vector<double> rho11;
  std::vector<double> coherence;
  std::vector<double> chi_norm;
  std::vector<double> acc_bath_td;  // integral of D(rho_B(s), rho_B(0))
};

struct InconsistencyReport {
  bool found = false;
  std::size_t num_samples = 0;       // sampled times with discordant rankings
  double first_start = 0.0, first_end = 0.0;
  double example_time = 0.0;
  std::vector<std::string> ranking_by_norm_gap;  // at example_time
  std::vector<std::string> ranking_by_distance;
};

struct ScenarioResult {
  RunConfig config;
  std::vector<MethodResult> methods;
  ExactSeries exact;
  InconsistencyReport norm_vs_distance;
  std::map<std::string, std::string> errors;  // method -> failure message
};

ScenarioResult run_scenario(const RunConfig& config);
// Same, with the discretized bath supplied by the caller (degenerate test
// baths included); config's spectral density fields are ignored.
ScenarioResult run_scenario(const RunConfig& config, const ModeSet& modes);

// One CSV per method, one for the exact reference, and summary.json.
void emit(const ScenarioResult& result, const RunConfig& config);

int cli(const std::vector<std::string>& args);

}  // namespace corrsim
