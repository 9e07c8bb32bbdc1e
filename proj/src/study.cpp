#include "lsfem/study.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace lsfem {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12e", v);
  return buf;
}

std::string fmt_rate(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

const NormSeries* ConvergenceReport::series(const std::string& name) const {
  for (const auto& s : norms)
    if (s.name == name) return &s;
  return nullptr;
}

std::string ConvergenceReport::to_csv() const {
  std::ostringstream os;
  os << "level,h,ndof_flux,ndof_scalar";
  for (const auto& s : norms) os << "," << s.name << "," << s.name << "_rate";
  os << "\n";
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const ErrorReport& e = levels[i];
    os << e.level << "," << fmt(e.h) << "," << e.ndof_flux << "," << e.ndof_scalar;
    for (const auto& s : norms) {
      os << "," << fmt(s.values[i]) << ",";
      if (i > 0 && std::isfinite(s.rates[i - 1])) os << fmt_rate(s.rates[i - 1]);
    }
    os << "\n";
  }
  return os.str();
}

std::string ConvergenceReport::to_markdown() const {
  std::ostringstream os;
  os << "## " << config.problem << " " << config.flux << "/" << config.scalar
     << " omega=" << config.omega << "\n\n";
  os << "| level | h |";
  for (const auto& s : norms) os << " " << s.name << " | rate |";
  os << "\n|---|---|";
  for (std::size_t i = 0; i < norms.size(); ++i) os << "---|---|";
  os << "\n";
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const ErrorReport& e = levels[i];
    char hbuf[32];
    std::snprintf(hbuf, sizeof(hbuf), "%.4e", e.h);
    os << "| " << e.level << " | " << hbuf << " |";
    for (const auto& s : norms) {
      char vbuf[32];
      std::snprintf(vbuf, sizeof(vbuf), "%.3e", s.values[i]);
      os << " " << vbuf << " | ";
      if (i > 0 && std::isfinite(s.rates[i - 1])) os << fmt_rate(s.rates[i - 1]);
      else os << "-";
      os << " |";
    }
    os << "\n";
  }
  os << "\nexpected rates:";
  for (const auto& s : norms) {
    if (!s.gated) continue;
    os << " " << s.name << "=" << fmt_rate(s.expected);
    if (s.starred) os << "*";
    if (s.paren) os << " (paren)";
    os << " [" << (s.passed ? "ok" : "FAIL") << "]";
  }
  os << "\n";
  return os.str();
}

ConvergenceReport run_study(const StudyConfig& config) {
  const SpaceDescriptor fd = parse_space(config.flux);
  const SpaceDescriptor sd = parse_space(config.scalar);
  if (!fd.is_flux || sd.is_flux)
    throw std::runtime_error("study: flux space must be RT/BDM, scalar must be Pm");
  if (std::abs(sd.order - fd.order) > 1)
    throw std::runtime_error("study: unsupported pair " + config.flux + "/" +
                             config.scalar);

  const Problem problem = builtin_problem(config.problem, config.omega);

  ConvergenceReport report;
  report.config = config;

  std::vector<Mesh> meshes;
  if (!config.mesh_file.empty()) {
    meshes.push_back(load_mesh(config.mesh_file));
    for (int r = 1; r < config.refinements; ++r)
      meshes.push_back(refine_uniform(meshes.back()));
  } else {
    for (int n : config.levels) meshes.push_back(build_structured(n));
  }

  std::filesystem::path out_dir;
  if (!config.out_dir.empty()) {
    out_dir = config.out_dir;
    std::filesystem::create_directories(out_dir);
  }

  AssemblyOptions aopts;
  aopts.quad_degree = config.quad_degree;
  aopts.singular_levels = config.singular_levels;
  aopts.sequential = config.sequential;

  ErrorOptions eopts;
  eopts.quad_degree = config.error_quad_degree;
  eopts.singular_levels = config.singular_levels;

  for (std::size_t lvl = 0; lvl < meshes.size(); ++lvl) {
    const Mesh& mesh = meshes[lvl];
    FluxSpace flux(mesh, fd.family, fd.order);
    ScalarSpace scalar(mesh, sd.order);

    Solution sol = solve_lsfem(flux, scalar, problem, aopts, config.solver_tol);

    Eigen::VectorXd pi_q, pi_u;
    if (problem.has_exact) {
      pi_q = hdiv_interpolate(flux, problem.exact_q, 20, problem.singular_line_x0,
                              config.singular_levels);
      pi_u = elliptic_project(scalar, problem.exact_grad_u, problem.sigma, 1e-12,
                              -1, problem.singular_line_x0, config.singular_levels);
    } else {
      pi_q = Eigen::VectorXd::Zero(flux.dim());
      pi_u = Eigen::VectorXd::Zero(scalar.dim_full());
    }

    PiecewisePoly post;
    const PiecewisePoly* post_ptr = nullptr;
    if (config.with_postprocess) {
      post = postprocess(flux, scalar, sol, problem.sigma);
      post_ptr = &post;
    }

    ErrorReport errors =
        compute_errors(flux, scalar, sol, pi_q, pi_u, problem, post_ptr, eopts);
    errors.level = !config.mesh_file.empty() ? static_cast<int>(lvl)
                                             : config.levels[lvl];
    report.levels.push_back(errors);

    if (!out_dir.empty()) {
      if (config.write_vtk) {
        write_vtk_legacy((out_dir / ("solution_" + std::to_string(errors.level) +
                                     ".vtk")).string(),
                         flux, scalar, sol, post_ptr);
      }
      if (config.dump_matrix) {
        SparseSystem sys = assemble(flux, scalar, problem, aopts);
        write_matrix_market(sys.matrix,
                            (out_dir / ("matrix_" + std::to_string(errors.level) +
                                        ".mtx")).string());
      }
    }
  }

  const double reg_t = regularity_hint(problem);
  const bool singular = std::isfinite(reg_t);
  const ExpectedRates expected =
      expected_rates(fd.family, fd.order, sd.order, reg_t, problem.omega);
  const ExpectedRates smooth_rates =
      expected_rates(fd.family, fd.order, sd.order,
                     std::numeric_limits<double>::infinity(), problem.omega);
  // omega in the non-coercivity regime: rates are reported but not enforced.
  const bool omega_gated = !(problem.omega == 6.0 || problem.omega == 8.0);

  for (const std::string& name : ErrorReport::norm_names()) {
    if (name == "post_grad" && !config.with_postprocess) continue;
    NormSeries s;
    s.name = name;
    for (const auto& e : report.levels) s.values.push_back(e.norm(name));
    for (std::size_t i = 1; i < s.values.size(); ++i) {
      const double h0 = report.levels[i - 1].h, h1 = report.levels[i].h;
      const double e0 = s.values[i - 1], e1 = s.values[i];
      s.rates.push_back(e0 > 0 && e1 > 0 ? std::log(e0 / e1) / std::log(h0 / h1)
                                         : std::numeric_limits<double>::quiet_NaN());
    }

    const RateEntry* entry = expected.entry(name);
    auto ov = config.expected_override.find(name);
    if (ov != config.expected_override.end()) {
      s.expected = s.gate = ov->second;
      s.gated = config.gate && omega_gated;
    } else if (entry && entry->rate > 0) {
      s.expected = entry->rate;
      s.gate = entry->gate;
      s.starred = entry->starred;
      s.paren = entry->paren;
      s.gated = config.gate && omega_gated && problem.has_exact;
      // the singular tables print only the supercloseness norms; the plain
      // norms are reported but not enforced
      if (singular && name.rfind("sc_", 0) != 0) s.gated = false;
    }

    if (s.gated && s.rates.size() >= 1) {
      // Skip the gate when the errors have hit the solver noise floor.
      const double floor = 10.0 * config.solver_tol;
      const double r = s.final_rate();
      if (s.values.back() <= floor || !std::isfinite(r)) {
        s.gated = false;
      } else if (singular) {
        // Entries observed better than the printed theoretical rate are
        // accepted up to the smooth-data rate of the pair: the tables mark
        // this with parentheses, but not exhaustively (per their captions,
        // only RT1/P2 aligns fully with the theory).
        const RateEntry* sm = smooth_rates.entry(name);
        const double lo =
            s.expected - (s.paren ? config.paren_slack : config.singular_tol);
        // parenthesized entries carry no upper bound
        const double hi = s.paren
                              ? std::numeric_limits<double>::infinity()
                              : std::max(s.expected + config.singular_tol,
                                         (sm ? sm->rate : s.expected) + config.slack);
        s.passed = r >= lo && r <= hi;
      } else {
        s.passed = r >= s.gate - config.slack;
      }
    }
    if (s.gated && !s.passed) report.all_passed = false;
    report.norms.push_back(std::move(s));
  }

  if (config.with_postprocess) {
    const NormSeries* pg = report.series("post_grad");
    const NormSeries* gu = report.series("grad_u_l2");
    if (pg && gu && !pg->rates.empty()) {
      report.postprocess_gain = pg->final_rate() - gu->final_rate();
      if (config.gate && omega_gated && !singular) {
        report.postprocess_gain_gated = true;
        report.postprocess_gain_passed = report.postprocess_gain >= 0.8;
        if (!report.postprocess_gain_passed) report.all_passed = false;
      }
    }
  }

  if (!out_dir.empty()) {
    const std::filesystem::path csv_path = out_dir / "study.csv";
    std::ofstream(csv_path) << report.to_csv();
    std::ofstream(out_dir / "study.md") << report.to_markdown();
    if (config.write_gnuplot)
      std::ofstream(out_dir / "study.gp") << gnuplot_script(report, "study.csv");
  }

  return report;
}

void write_vtk_legacy(const std::string& path, const FluxSpace& flux,
                      const ScalarSpace& scalar, const Solution& sol,
                      const PiecewisePoly* postprocessed) {
  const Mesh& mesh = scalar.mesh();
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write '" + path + "'");
  os << "# vtk DataFile Version 3.0\nlsfem solution\nASCII\n";
  os << "DATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.num_vertices() << " double\n";
  for (const auto& v : mesh.vertices)
    os << fmt(v.x()) << " " << fmt(v.y()) << " 0\n";
  os << "CELLS " << mesh.num_triangles() << " " << 4 * mesh.num_triangles() << "\n";
  for (const auto& tri : mesh.triangles)
    os << "3 " << tri[0] << " " << tri[1] << " " << tri[2] << "\n";
  os << "CELL_TYPES " << mesh.num_triangles() << "\n";
  for (int t = 0; t < mesh.num_triangles(); ++t) os << "5\n";

  // u_h is vertex-nodal by construction (vertex DOFs come first).
  os << "POINT_DATA " << mesh.num_vertices() << "\n";
  os << "SCALARS u_h double 1\nLOOKUP_TABLE default\n";
  for (int v = 0; v < mesh.num_vertices(); ++v) os << fmt(sol.scalar_full[v]) << "\n";

  os << "CELL_DATA " << mesh.num_triangles() << "\n";
  os << "SCALARS div_q_h double 1\nLOOKUP_TABLE default\n";
  const Eigen::Vector2d center(1.0 / 3.0, 1.0 / 3.0);
  Eigen::Matrix<double, Eigen::Dynamic, 2> fv;
  Eigen::VectorXd fdiv;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    flux.eval_basis(t, center, fv, fdiv);
    double d = 0.0;
    const auto& dofs = flux.element_dofs(t);
    for (std::size_t i = 0; i < dofs.size(); ++i) d += sol.flux[dofs[i]] * fdiv[i];
    os << fmt(d) << "\n";
  }
  os << "VECTORS q_h double\n";
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    flux.eval_basis(t, center, fv, fdiv);
    Eigen::Vector2d q = Eigen::Vector2d::Zero();
    const auto& dofs = flux.element_dofs(t);
    for (std::size_t i = 0; i < dofs.size(); ++i)
      q += sol.flux[dofs[i]] * fv.row(i).transpose();
    os << fmt(q.x()) << " " << fmt(q.y()) << " 0\n";
  }
  if (postprocessed) {
    os << "SCALARS u_star double 1\nLOOKUP_TABLE default\n";
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      const ElementGeometry g = element_geometry(mesh, t);
      os << fmt(postprocessed->eval(mesh, t, g.centroid)) << "\n";
    }
  }
}

std::string gnuplot_script(const ConvergenceReport& report,
                           const std::string& csv_path) {
  std::ostringstream os;
  os << "set datafile separator ','\n";
  os << "set logscale xy\n";
  os << "set xlabel 'h'\nset ylabel 'error'\n";
  os << "set key bottom right\n";
  os << "set title '" << report.config.problem << " " << report.config.flux << "/"
     << report.config.scalar << "'\n";
  os << "plot ";
  // column 2 is h; norms start at column 5, two columns each.
  for (std::size_t i = 0; i < report.norms.size(); ++i) {
    if (i) os << ", \\\n     ";
    os << "'" << csv_path << "' using 2:" << (5 + 2 * i)
       << " with linespoints title '" << report.norms[i].name << "'";
  }
  os << "\n";
  return os.str();
}

}  // namespace lsfem
