// Command-line front end: single solves, convergence studies, and the
// encoded expected-rate tables.
//
// Exit codes: 0 success, 1 rate gate failure, 2 usage/config error,
// 3 numerical failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lsfem/config_io.hpp"
#include "lsfem/study.hpp"

namespace {

using namespace lsfem;

std::vector<int> parse_levels(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::size_t pos = 0;
    int v = std::stoi(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("bad level '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

struct Flags {
  std::string config_file, problem, flux, scalar, levels, mesh, out;
  double omega = std::numeric_limits<double>::quiet_NaN();
  double tol = -1.0;
  int refinements = -1;
  bool no_gate = false, sequential = false, postprocess = false;
  bool vtk = false, gnuplot = false, dump_matrix = false, dump_config = false;
};

void add_common_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("-c,--config", f.config_file, "JSON config file");
  cmd->add_option("--problem", f.problem, "smooth1 | smooth-var | singular");
  cmd->add_option("--flux", f.flux, "RT0|RT1|RT2|BDM1|BDM2");
  cmd->add_option("--scalar", f.scalar, "P1|P2|P3");
  cmd->add_option("--omega", f.omega, "frequency omega");
  cmd->add_option("--levels", f.levels, "structured mesh sizes, e.g. 4,8,16,32,64");
  cmd->add_option("--mesh", f.mesh, "mesh file (uniformly refined instead of levels)");
  cmd->add_option("--refinements", f.refinements, "refinement count with --mesh");
  cmd->add_option("--tol", f.tol, "linear solver tolerance");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_flag("--no-gate", f.no_gate, "report rates without enforcing them");
  cmd->add_flag("--sequential", f.sequential, "single-threaded assembly");
  cmd->add_flag("--postprocess", f.postprocess, "element-local scalar reconstruction");
  cmd->add_flag("--vtk", f.vtk, "write VTK legacy files");
  cmd->add_flag("--gnuplot", f.gnuplot, "write a gnuplot script");
  cmd->add_flag("--dump-matrix", f.dump_matrix, "write MatrixMarket system dumps");
  cmd->add_flag("--dump-config", f.dump_config, "write the resolved config JSON");
}

StudyConfig resolve_config(const Flags& f) {
  StudyConfig c;
  if (!f.config_file.empty()) {
    std::ifstream is(f.config_file);
    if (!is) throw std::invalid_argument("cannot open config '" + f.config_file + "'");
    nlohmann::json j;
    try {
      is >> j;
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
    c = config_from_json(j);
  }
  // flags win over the config file
  if (!f.problem.empty()) c.problem = f.problem;
  if (!f.flux.empty()) c.flux = f.flux;
  if (!f.scalar.empty()) c.scalar = f.scalar;
  if (f.omega == f.omega) c.omega = f.omega;
  if (!f.levels.empty()) c.levels = parse_levels(f.levels);
  if (!f.mesh.empty()) c.mesh_file = f.mesh;
  if (f.refinements > 0) c.refinements = f.refinements;
  if (f.tol > 0) c.solver_tol = f.tol;
  if (!f.out.empty()) c.out_dir = f.out;
  if (f.no_gate) c.gate = false;
  if (f.sequential) c.sequential = true;
  if (f.postprocess) c.with_postprocess = true;
  if (f.vtk) c.write_vtk = true;
  if (f.gnuplot) c.write_gnuplot = true;
  if (f.dump_matrix) c.dump_matrix = true;
  validate_config(c);
  return c;
}

void maybe_dump_config(const Flags& f, const StudyConfig& c) {
  if (!f.dump_config) return;
  if (c.out_dir.empty()) {
    std::cout << config_to_json(c).dump(2) << "\n";
  } else {
    std::filesystem::create_directories(c.out_dir);
    std::ofstream(std::filesystem::path(c.out_dir) / "config.json")
        << config_to_json(c).dump(2) << "\n";
  }
}

int cmd_solve(const Flags& flags) {
  StudyConfig c = resolve_config(flags);
  const SpaceDescriptor fd = parse_space(c.flux);
  const SpaceDescriptor sd = parse_space(c.scalar);
  const Problem problem = builtin_problem(c.problem, c.omega);

  // Mesh and space construction failures (bad mesh file, P1 with no
  // interior DOFs on n=1, ...) are configuration errors.
  Mesh mesh;
  std::unique_ptr<FluxSpace> flux;
  std::unique_ptr<ScalarSpace> scalar;
  try {
    mesh = c.mesh_file.empty() ? build_structured(c.levels.front())
                               : load_mesh(c.mesh_file);
    flux = std::make_unique<FluxSpace>(mesh, fd.family, fd.order);
    scalar = std::make_unique<ScalarSpace>(mesh, sd.order);
  } catch (const std::exception& e) {
    throw std::invalid_argument(e.what());
  }
  maybe_dump_config(flags, c);

  AssemblyOptions aopts;
  aopts.quad_degree = c.quad_degree;
  aopts.singular_levels = c.singular_levels;
  aopts.sequential = c.sequential;
  Solution sol = solve_lsfem(*flux, *scalar, problem, aopts, c.solver_tol);

  std::printf("problem=%s pair=%s/%s omega=%g\n", c.problem.c_str(), c.flux.c_str(),
              c.scalar.c_str(), c.omega);
  std::printf("dofs: flux=%d scalar=%d (free %d)\n", flux->dim(),
              scalar->dim_full(), scalar->dim_free());
  std::printf("solver: %s iters=%d rel_residual=%.3e\n", sol.report.method.c_str(),
              sol.report.iterations, sol.report.rel_residual);

  if (problem.has_exact) {
    Eigen::VectorXd pi_q = hdiv_interpolate(*flux, problem.exact_q);
    Eigen::VectorXd pi_u = elliptic_project(*scalar, problem.exact_grad_u, problem.sigma);
    ErrorOptions eopts;
    eopts.quad_degree = c.error_quad_degree;
    eopts.singular_levels = c.singular_levels;
    PiecewisePoly post;
    const PiecewisePoly* post_ptr = nullptr;
    if (c.with_postprocess) {
      post = postprocess(*flux, *scalar, sol, problem.sigma);
      post_ptr = &post;
    }
    ErrorReport e = compute_errors(*flux, *scalar, sol, pi_q, pi_u, problem,
                                   post_ptr, eopts);
    for (const auto& name : ErrorReport::norm_names()) {
      if (name == "post_grad" && !c.with_postprocess) continue;
      std::printf("%-14s %.6e\n", name.c_str(), e.norm(name));
    }
  }

  if (!c.out_dir.empty()) {
    std::filesystem::create_directories(c.out_dir);
    if (c.write_vtk)
      write_vtk_legacy((std::filesystem::path(c.out_dir) / "solution.vtk").string(),
                       *flux, *scalar, sol);
    if (c.dump_matrix) {
      SparseSystem sys = assemble(*flux, *scalar, problem, aopts);
      write_matrix_market(sys.matrix,
                          (std::filesystem::path(c.out_dir) / "matrix.mtx").string());
    }
  }
  return sol.report.success ? 0 : 3;
}

int cmd_study(const Flags& flags) {
  StudyConfig c = resolve_config(flags);
  maybe_dump_config(flags, c);
  ConvergenceReport report = run_study(c);
  std::cout << report.to_markdown();
  if (c.out_dir.empty()) std::cout << "\n" << report.to_csv();
  for (const auto& s : report.norms) {
    if (!s.gated) continue;
    std::printf("gate %-14s observed %.2f expected %.2f%s -> %s\n", s.name.c_str(),
                s.final_rate(), s.expected, s.starred ? "*" : "",
                s.passed ? "pass" : "FAIL");
  }
  if (report.postprocess_gain_gated)
    std::printf("gate postprocess gain %.2f (need >= 0.8) -> %s\n",
                report.postprocess_gain,
                report.postprocess_gain_passed ? "pass" : "FAIL");
  return report.all_passed ? 0 : 1;
}

struct PairId {
  FluxFamily family;
  int k, m;
};

int cmd_tables() {
  const std::vector<PairId> pairs = {
      {FluxFamily::RT, 0, 1},  {FluxFamily::RT, 1, 1},  {FluxFamily::RT, 1, 2},
      {FluxFamily::RT, 2, 1},  {FluxFamily::RT, 2, 2},  {FluxFamily::RT, 2, 3},
      {FluxFamily::BDM, 1, 1}, {FluxFamily::BDM, 1, 2}, {FluxFamily::BDM, 2, 1},
      {FluxFamily::BDM, 2, 2}, {FluxFamily::BDM, 2, 3}};
  const double inf = std::numeric_limits<double>::infinity();
  auto cell = [](const RateEntry& e) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g%s", e.rate, e.starred ? "*" : "");
    return std::string(buf);
  };
  std::printf("Expected rates (smooth data; * = needs extra elliptic regularity,\n");
  std::printf("gated at the unstarred fallback). k1=min(k-2,1), k2=min(k,2),\n");
  std::printf("k3=min(k,1) expansions are already applied per pair.\n\n");
  std::printf("%-9s | %-5s %-7s %-5s %-7s | %-5s %-9s %-5s %-10s\n", "pair", "q",
              "div_q", "u", "grad_u", "sc_q", "sc_div_q", "sc_u", "sc_grad_u");
  for (const auto& p : pairs) {
    for (double omega : {0.0, 1.0}) {
      const ExpectedRates r = expected_rates(p.family, p.k, p.m, inf, omega);
      char name[32];
      std::snprintf(name, sizeof(name), "%s%d/P%d",
                    p.family == FluxFamily::RT ? "RT" : "BDM", p.k, p.m);
      std::printf("%-9s | %-5s %-7s %-5s %-7s | %-5s %-9s %-5s %-10s (omega=%g)\n",
                  name, cell(r.q).c_str(), cell(r.div_q).c_str(), cell(r.u).c_str(),
                  cell(r.grad_u).c_str(), cell(r.sc_q).c_str(),
                  cell(r.sc_div_q).c_str(), cell(r.sc_u).c_str(),
                  cell(r.sc_grad_u).c_str(), omega);
      // omega only changes the BDM_k/P_{k+1} div-supercloseness entry
      if (!(p.family == FluxFamily::BDM && p.m == p.k + 1)) break;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"div least-squares FEM solver and convergence-study harness"};
  app.require_subcommand(1);

  Flags solve_flags, study_flags;
  CLI::App* solve = app.add_subcommand("solve", "assemble and solve one level");
  add_common_flags(solve, solve_flags);
  CLI::App* study = app.add_subcommand("study", "run a convergence study");
  add_common_flags(study, study_flags);
  CLI::App* tables = app.add_subcommand("tables", "print expected-rate tables");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // --help exits 0, parse errors exit 2
  }

  try {
    if (solve->parsed()) return cmd_solve(solve_flags);
    if (study->parsed()) return cmd_study(study_flags);
    if (tables->parsed()) return cmd_tables();
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
