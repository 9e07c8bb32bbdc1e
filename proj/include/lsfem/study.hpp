#pragma once

#include <map>
#include <string>
#include <vector>

#include "lsfem/analysis.hpp"

namespace lsfem {

/// Everything needed to run one convergence study.
struct StudyConfig {
  std::string problem = "smooth1";
  std::string flux = "RT0";
  std::string scalar = "P1";
  double omega = 1.0;
  std::vector<int> levels = {4, 8, 16, 32, 64};  // structured n values
  std::string mesh_file;  // alternative to `levels`: refine an imported mesh
  int refinements = 4;    // used with mesh_file
  int quad_degree = -1;
  int error_quad_degree = -1;
  int singular_levels = 20;
  double solver_tol = 1e-11;
  std::string out_dir;
  bool gate = true;
  bool sequential = false;
  bool with_postprocess = false;
  bool write_vtk = false;
  bool write_gnuplot = false;
  bool dump_matrix = false;
  double slack = 0.2;          // smooth gating: observed >= gate - slack
  double singular_tol = 0.15;  // singular gating: |observed - printed| <= tol
  double paren_slack = 0.1;    // parenthesized entries: observed >= printed - 0.1
  std::map<std::string, double> expected_override;  // norm -> gate rate
};

struct NormSeries {
  std::string name;
  std::vector<double> values;  // per level
  std::vector<double> rates;   // between consecutive levels (size = levels-1)
  double expected = 0.0;       // printed / table rate
  double gate = 0.0;           // enforced rate (starred fallback)
  bool starred = false;
  bool paren = false;
  bool gated = false;
  bool passed = true;
  double final_rate() const { return rates.empty() ? 0.0 : rates.back(); }
};

struct ConvergenceReport {
  StudyConfig config;
  std::vector<ErrorReport> levels;
  std::vector<NormSeries> norms;
  bool postprocess_gain_gated = false;
  bool postprocess_gain_passed = true;
  double postprocess_gain = 0.0;
  bool all_passed = true;

  const NormSeries* series(const std::string& name) const;
  std::string to_csv() const;
  std::string to_markdown() const;
};

ConvergenceReport run_study(const StudyConfig& config);

/// Per-level solve driver used by run_study and the single-solve command.
struct LevelResult {
  Solution solution;
  ErrorReport errors;
};

/// VTK legacy output: u_h (and u*_h when present) sampled at vertices,
/// elementwise div q_h as cell data.
void write_vtk_legacy(const std::string& path, const FluxSpace& flux,
                      const ScalarSpace& scalar, const Solution& sol,
                      const PiecewisePoly* postprocessed = nullptr);

/// Gnuplot script for log-log rate plots from the study CSV.
std::string gnuplot_script(const ConvergenceReport& report,
                           const std::string& csv_path);

}  // namespace lsfem
