#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "lrgeom/measurement.hpp"
#include "lrgeom/solver.hpp"

namespace lrgeom {

inline constexpr int kSchemaVersion = 1;

/// Build identifier baked in at configure time (git describe).
const char* build_id();

struct ExperimentConfig {
  std::string experiment = "scaling";  // scaling | instability | stability | checks
  std::string problem = "deconv";      // deconv | completion
  std::vector<std::uint64_t> seeds;
  std::vector<std::array<Index, 3>> deconv_grid;      // (K, N, L)
  std::vector<std::array<Index, 4>> completion_grid;  // (n1, n2, r, m)
  std::vector<double> t_grid{0.1, 0.5, 1.0};
  std::vector<double> tau_grid;  // relative to ||X0||_F
  SignalKind signal = SignalKind::kGaussian;
  std::string frame = "tetris";
  SolverConfig solver;
  Index pz_trials = 100000;
  Index projection_trials = 10000;
  Index lemma_samples = 200;
  Index width_trials = 2000;
  int jobs = 1;
};

/// Defaults for one experiment kind (desk-scale points).
ExperimentConfig default_config(const std::string& experiment);

/// Reads a JSON config; unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const;
  Index column(const std::string& name) const;  // throws if absent
  double number(size_t row, const std::string& name) const;  // NaN for empty cells
  const std::string& cell(size_t row, const std::string& name) const;
};

struct ExperimentOutput {
  Table table;
  nlohmann::json summary;
};

ExperimentOutput run_scaling_sweep(const ExperimentConfig& cfg);
ExperimentOutput run_instability(const ExperimentConfig& cfg);
ExperimentOutput run_stability_sweep(const ExperimentConfig& cfg);
nlohmann::json run_checks(const ExperimentConfig& cfg);

/// Least-squares fit y = slope * x + intercept.
struct LineFit {
  double slope = 0, intercept = 0;
  Index points = 0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Runs fn(i) for i < n on `jobs` threads; fn must only write to slot i.
void parallel_for(Index n, int jobs, const std::function<void(Index)>& fn);

}  // namespace lrgeom
