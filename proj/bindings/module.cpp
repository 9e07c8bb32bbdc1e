// Python bindings for the main operations: mesh construction, single
// solves, convergence studies, and the expected-rate tables.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lsfem/analysis.hpp"
#include "lsfem/assembly.hpp"
#include "lsfem/config_io.hpp"
#include "lsfem/mesh.hpp"
#include "lsfem/problems.hpp"
#include "lsfem/projections.hpp"
#include "lsfem/spaces.hpp"
#include "lsfem/study.hpp"

namespace py = pybind11;
using namespace lsfem;

namespace {

py::dict rate_entry_dict(const RateEntry& e) {
  py::dict d;
  d["rate"] = e.rate;
  d["gate"] = e.gate;
  d["starred"] = e.starred;
  d["paren"] = e.paren;
  return d;
}

py::dict solve_one(const std::string& problem, const std::string& flux_name,
                   const std::string& scalar_name, int n, double omega,
                   double tol) {
  const Problem p = builtin_problem(problem, omega);
  const Mesh mesh = build_structured(n);
  const SpaceDescriptor fd = parse_space(flux_name);
  const SpaceDescriptor sd = parse_space(scalar_name);
  if (!fd.is_flux || sd.is_flux)
    throw std::invalid_argument("expected a flux/scalar descriptor pair");
  const FluxSpace flux(mesh, fd.family, fd.order);
  const ScalarSpace scalar(mesh, sd.order);

  AssemblyOptions opts;
  const Solution sol = solve_lsfem(flux, scalar, p, opts, tol);
  const Eigen::VectorXd pi_q = hdiv_interpolate(
      flux, p.exact_q, 20, p.singular_line_x0, 20);
  const Eigen::VectorXd pi_u = elliptic_project(
      scalar, p.exact_grad_u, p.sigma, 1e-12, -1, p.singular_line_x0, 20);
  const ErrorReport err = compute_errors(flux, scalar, sol, pi_q, pi_u, p);

  py::dict errors;
  for (const std::string& name : ErrorReport::norm_names())
    if (name != "post_grad") errors[name.c_str()] = err.norm(name);
  py::dict d;
  d["iterations"] = sol.report.iterations;
  d["residual"] = sol.report.rel_residual;
  d["method"] = sol.report.method;
  d["h"] = mesh.h;
  d["ndof_flux"] = flux.dim();
  d["ndof_scalar"] = scalar.dim_free();
  d["errors"] = errors;
  return d;
}

py::dict study_from_kwargs(const py::kwargs& kwargs) {
  nlohmann::json j;
  for (const auto& item : kwargs) {
    const std::string key = py::cast<std::string>(item.first);
    const py::handle v = item.second;
    if (py::isinstance<py::bool_>(v))
      j[key] = py::cast<bool>(v);
    else if (py::isinstance<py::int_>(v))
      j[key] = py::cast<long>(v);
    else if (py::isinstance<py::float_>(v))
      j[key] = py::cast<double>(v);
    else if (py::isinstance<py::str>(v))
      j[key] = py::cast<std::string>(v);
    else if (py::isinstance<py::list>(v) || py::isinstance<py::tuple>(v))
      j[key] = py::cast<std::vector<int>>(v);
    else if (py::isinstance<py::dict>(v))
      j[key] = py::cast<std::map<std::string, double>>(v);
    else
      throw std::invalid_argument("unsupported config value for '" + key + "'");
  }
  const StudyConfig config = config_from_json(j);
  validate_config(config);
  const ConvergenceReport rep = run_study(config);

  py::dict norms;
  for (const NormSeries& s : rep.norms) {
    py::dict nd;
    nd["values"] = s.values;
    nd["rates"] = s.rates;
    nd["expected"] = s.expected;
    nd["gate"] = s.gate;
    nd["gated"] = s.gated;
    nd["passed"] = s.passed;
    norms[s.name.c_str()] = nd;
  }
  py::list levels;
  for (const ErrorReport& e : rep.levels) {
    py::dict ld;
    ld["level"] = e.level;
    ld["h"] = e.h;
    ld["ndof_flux"] = e.ndof_flux;
    ld["ndof_scalar"] = e.ndof_scalar;
    levels.append(ld);
  }
  py::dict d;
  d["levels"] = levels;
  d["norms"] = norms;
  d["all_passed"] = rep.all_passed;
  d["postprocess_gain"] = rep.postprocess_gain;
  d["csv"] = rep.to_csv();
  d["markdown"] = rep.to_markdown();
  return d;
}

}  // namespace

PYBIND11_MODULE(_lsfem, m) {
  m.doc() = "div least-squares finite element solver";

  py::class_<Mesh>(m, "Mesh")
      .def_property_readonly("num_vertices", &Mesh::num_vertices)
      .def_property_readonly("num_triangles", &Mesh::num_triangles)
      .def_property_readonly("num_edges", &Mesh::num_edges)
      .def_readonly("h", &Mesh::h)
      .def("triangle_area", &Mesh::triangle_area)
      .def("refine", [](const Mesh& mesh) { return refine_uniform(mesh); });

  m.def("structured_mesh", &build_structured, py::arg("n"),
        "Uniform n x n triangulation of (-1,1)^2");
  m.def("load_mesh", &load_mesh, py::arg("path"));

  m.def("solve", &solve_one, py::arg("problem"), py::arg("flux"),
        py::arg("scalar"), py::arg("n"), py::arg("omega") = 1.0,
        py::arg("tol") = 1e-11,
        "Single least-squares solve on a structured mesh; returns the "
        "solver report and error norms");

  m.def("study", &study_from_kwargs,
        "Convergence study; accepts the JSON config keys as keyword "
        "arguments (problem, flux, scalar, omega, levels, ...)");

  m.def(
      "expected_rates",
      [](const std::string& flux_name, int scalar_order, double regularity_t,
         double omega) {
        const SpaceDescriptor fd = parse_space(flux_name);
        if (!fd.is_flux) throw std::invalid_argument("flux descriptor expected");
        const ExpectedRates r =
            expected_rates(fd.family, fd.order, scalar_order, regularity_t, omega);
        py::dict d;
        d["q_l2"] = rate_entry_dict(r.q);
        d["div_q_l2"] = rate_entry_dict(r.div_q);
        d["u_l2"] = rate_entry_dict(r.u);
        d["grad_u_l2"] = rate_entry_dict(r.grad_u);
        d["sc_q_l2"] = rate_entry_dict(r.sc_q);
        d["sc_div_q_l2"] = rate_entry_dict(r.sc_div_q);
        d["sc_u_l2"] = rate_entry_dict(r.sc_u);
        d["sc_grad_u_l2"] = rate_entry_dict(r.sc_grad_u);
        return d;
      },
      py::arg("flux"), py::arg("scalar_order"),
      py::arg("regularity_t") = std::numeric_limits<double>::infinity(),
      py::arg("omega") = 1.0);
}
