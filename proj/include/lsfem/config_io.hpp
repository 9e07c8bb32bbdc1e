#pragma once

#include <cstdlib>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "lsfem/study.hpp"

namespace lsfem {

inline StudyConfig config_from_json(const nlohmann::json& j) {
  StudyConfig c;
  try {
    c.problem = j.value("problem", c.problem);
    c.flux = j.value("flux", c.flux);
    c.scalar = j.value("scalar", c.scalar);
    c.omega = j.value("omega", c.omega);
    if (j.contains("levels")) c.levels = j.at("levels").get<std::vector<int>>();
    c.mesh_file = j.value("mesh", c.mesh_file);
    c.refinements = j.value("refinements", c.refinements);
    c.quad_degree = j.value("quad_degree", c.quad_degree);
    c.error_quad_degree = j.value("error_quad_degree", c.error_quad_degree);
    c.singular_levels = j.value("singular_levels", c.singular_levels);
    c.solver_tol = j.value("tol", c.solver_tol);
    c.out_dir = j.value("out", c.out_dir);
    c.gate = j.value("gate", c.gate);
    c.sequential = j.value("sequential", c.sequential);
    c.with_postprocess = j.value("postprocess", c.with_postprocess);
    c.write_vtk = j.value("vtk", c.write_vtk);
    c.write_gnuplot = j.value("gnuplot", c.write_gnuplot);
    c.dump_matrix = j.value("dump_matrix", c.dump_matrix);
    c.slack = j.value("slack", c.slack);
    c.singular_tol = j.value("singular_tol", c.singular_tol);
    c.paren_slack = j.value("paren_slack", c.paren_slack);
    if (j.contains("expected_override"))
      for (const auto& [key, val] : j.at("expected_override").items())
        c.expected_override[key] = val.get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad config: ") + e.what());
  }
  return c;
}

inline nlohmann::json config_to_json(const StudyConfig& c) {
  nlohmann::json j;
  j["problem"] = c.problem;
  j["flux"] = c.flux;
  j["scalar"] = c.scalar;
  j["omega"] = c.omega;
  j["levels"] = c.levels;
  if (!c.mesh_file.empty()) j["mesh"] = c.mesh_file;
  j["refinements"] = c.refinements;
  j["quad_degree"] = c.quad_degree;
  j["error_quad_degree"] = c.error_quad_degree;
  j["singular_levels"] = c.singular_levels;
  j["tol"] = c.solver_tol;
  if (!c.out_dir.empty()) j["out"] = c.out_dir;
  j["gate"] = c.gate;
  j["sequential"] = c.sequential;
  j["postprocess"] = c.with_postprocess;
  j["vtk"] = c.write_vtk;
  j["gnuplot"] = c.write_gnuplot;
  j["dump_matrix"] = c.dump_matrix;
  j["slack"] = c.slack;
  j["singular_tol"] = c.singular_tol;
  j["paren_slack"] = c.paren_slack;
  if (!c.expected_override.empty()) j["expected_override"] = c.expected_override;
  return j;
}

/// Validate a config up front so usage errors can be reported before any
/// numerics run. Throws std::invalid_argument.
inline void validate_config(const StudyConfig& c) {
  SpaceDescriptor fd, sd;
  try {
    fd = parse_space(c.flux);
    sd = parse_space(c.scalar);
  } catch (const std::exception& e) {
    throw std::invalid_argument(e.what());
  }
  if (!fd.is_flux)
    throw std::invalid_argument("--flux must be one of RT0 RT1 RT2 BDM1 BDM2");
  if (sd.is_flux)
    throw std::invalid_argument("--scalar must be one of P1 P2 P3");
  if (std::abs(sd.order - fd.order) > 1)
    throw std::invalid_argument("unsupported pair " + c.flux + "/" + c.scalar +
                                ": need |m - k| <= 1");
  if (c.problem != "smooth1" && c.problem != "smooth-var" && c.problem != "singular")
    throw std::invalid_argument("unknown problem '" + c.problem +
                                "' (smooth1, smooth-var, singular)");
  if (c.mesh_file.empty()) {
    if (c.levels.empty()) throw std::invalid_argument("empty level list");
    for (std::size_t i = 0; i < c.levels.size(); ++i) {
      if (c.levels[i] < 1) throw std::invalid_argument("levels must be >= 1");
      if (i > 0 && c.levels[i] <= c.levels[i - 1])
        throw std::invalid_argument("levels must be strictly increasing");
    }
  } else if (c.refinements < 1) {
    throw std::invalid_argument("refinements must be >= 1");
  }
  if (c.solver_tol <= 0) throw std::invalid_argument("tol must be positive");
}

}  // namespace lsfem
