#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "codingtree/bench.hpp"
#include "codingtree/codes.hpp"
#include "codingtree/dsem.hpp"
#include "codingtree/fdb.hpp"
#include "codingtree/mc.hpp"
#include "codingtree/tree.hpp"

namespace py = pybind11;
using namespace codingtree;

namespace {

std::vector<double> points_of(const std::optional<std::vector<double>>& x, const std::optional<std::string>& grid) {
  if (grid) return parse_grid(*grid).points();
  if (x) return *x;
  return {0.0};
}

Report to_report(const std::string& name, const std::vector<std::vector<RunStatistics>>& stats,
                 const std::vector<double>& xs, double t) {
  Report r;
  r.preset = name;
  r.rows = build_rows(stats, xs, t, {});
  return r;
}

DDCode parse_dd_code(const std::string& s) {
  if (s == "Id") return DDCode::identity();
  if (s.size() >= 2 && (s[0] == 'F' || s[0] == 'G')) {
    std::size_t used = 0;
    const int k = std::stoi(s.substr(1), &used);
    if (used == s.size() - 1 && k >= 0) return s[0] == 'F' ? DDCode::fderiv(k) : DDCode::grad(k);
  }
  throw std::invalid_argument("bad code '" + s + "'; expected Id, F<k> or G<i>");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Monte Carlo coding-tree solvers for nonlinear parabolic PDEs";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ResidualError>(m, "ResidualError", PyExc_RuntimeError);
  py::register_exception<ResourceError>(m, "ResourceError", PyExc_RuntimeError);

  py::class_<ReportRow>(m, "ReportRow")
      .def_readonly("run", &ReportRow::run)
      .def_readonly("t", &ReportRow::t)
      .def_readonly("x", &ReportRow::x)
      .def_readonly("estimate", &ReportRow::estimate)
      .def_readonly("std_error", &ReportRow::std_error)
      .def_readonly("samples", &ReportRow::samples)
      .def_readonly("failed", &ReportRow::failed)
      .def_readonly("mean_nodes", &ReportRow::mean_nodes)
      .def_readonly("exact", &ReportRow::exact)
      .def_readonly("abs_error", &ReportRow::abs_error)
      .def_readonly("rel_error", &ReportRow::rel_error)
      .def("__repr__", [](const ReportRow& r) {
        std::ostringstream os;
        os << "ReportRow(run=" << r.run << ", x=" << r.x << ", estimate=" << r.estimate << ", std_error=" << r.std_error
           << ")";
        return os.str();
      });

  py::class_<Report>(m, "Report")
      .def_readonly("preset", &Report::preset)
      .def_readonly("config", &Report::config)
      .def_readonly("rows", &Report::rows)
      .def("ok", &Report::ok, "True when no sample failed")
      .def("max_rel_error", &Report::max_rel_error)
      .def("to_csv",
           [](const Report& r) {
             std::ostringstream os;
             write_csv(r, os);
             return os.str();
           })
      .def("to_json", [](const Report& r) {
        std::ostringstream os;
        write_json(r, os);
        return os.str();
      });

  m.def(
      "solve",
      [](const std::string& f, const std::string& phi, int n, double T, std::optional<std::vector<double>> x,
         std::optional<std::string> grid, std::optional<double> t, double t0, const std::string& code,
         std::uint64_t samples, std::uint64_t seed, unsigned threads, unsigned runs, double rho_rate) {
        const auto xs = points_of(x, grid);
        RunConfig cfg;
        cfg.spec = make_problem(f, phi, n, T, t0, rho_rate);
        cfg.code = parse_code(code);
        const double te = t.value_or(t0);
        cfg.eval_points.clear();
        for (double v : xs) cfg.eval_points.push_back({te, v});
        cfg.samples = samples;
        cfg.seed = seed;
        cfg.threads = threads;
        cfg.runs = runs;
        cfg.strict_failures = false;
        std::vector<std::vector<RunStatistics>> stats;
        {
          py::gil_scoped_release release;
          stats = run_repeated(cfg);
        }
        return to_report("solve", stats, xs, te);
      },
      "Estimate u(t, x) for u_t + u_xx/2 + f(z0..zn) = 0, u(T) = phi.", py::arg("f"), py::arg("phi"),
      py::arg("n") = 0, py::arg("T") = 1.0, py::arg("x") = py::none(), py::arg("grid") = py::none(),
      py::arg("t") = py::none(), py::arg("t0") = 0.0, py::arg("code") = "Id", py::arg("samples") = 100'000,
      py::arg("seed") = 1, py::arg("threads") = default_threads(), py::arg("runs") = 1, py::arg("rho_rate") = 1.0);

  m.def(
      "solve_dd",
      [](const std::string& f, const std::string& phi, const std::string& phi_form, int dim, double mu, double sigma,
         double T, std::optional<std::vector<double>> x, std::optional<std::string> grid, std::optional<double> t,
         double t0, const std::string& code, std::uint64_t samples, std::uint64_t seed, unsigned threads,
         unsigned runs, double rho_rate) {
        const auto xs = points_of(x, grid);
        DDRunConfig cfg;
        cfg.spec = make_dd_problem(f, phi, parse_phi_form(phi_form), dim, mu, sigma, T, t0, rho_rate);
        cfg.code = parse_dd_code(code);
        const double te = t.value_or(t0);
        for (double v : xs) cfg.eval_points.push_back({te, diagonal_point(v, dim)});
        cfg.samples = samples;
        cfg.seed = seed;
        cfg.threads = threads;
        cfg.runs = runs;
        cfg.strict_failures = false;
        std::vector<std::vector<RunStatistics>> stats;
        {
          py::gil_scoped_release release;
          stats = dd_run_repeated(cfg);
        }
        return to_report("solve_dd", stats, xs, te);
      },
      "Estimate u at the points (v/d, ..., v/d) for u_t + mu sum u_i + sigma^2/2 Lap u + f(u) = 0.", py::arg("f"),
      py::arg("phi"), py::arg("phi_form") = "ridge", py::arg("dim") = 1, py::arg("mu") = 0.0,
      py::arg("sigma") = 1.0, py::arg("T") = 1.0, py::arg("x") = py::none(), py::arg("grid") = py::none(),
      py::arg("t") = py::none(), py::arg("t0") = 0.0, py::arg("code") = "Id", py::arg("samples") = 100'000,
      py::arg("seed") = 1, py::arg("threads") = default_threads(), py::arg("runs") = 1, py::arg("rho_rate") = 1.0);

  m.def("preset_names", &preset_names);

  m.def(
      "preset_info",
      [](const std::string& name) {
        const Preset p = make_preset(name);
        py::dict d;
        d["name"] = p.name;
        d["description"] = p.description;
        d["engine"] = to_string(p.engine);
        d["f"] = p.f;
        d["phi"] = p.phi;
        d["n"] = p.n;
        d["d"] = p.d;
        d["T"] = p.T;
        d["exact"] = p.exact;
        d["reference"] = p.reference;
        d["grid"] = py::make_tuple(p.grid.lo, p.grid.hi, p.grid.steps);
        d["samples"] = p.samples;
        return d;
      },
      py::arg("name"));

  m.def(
      "run_preset",
      [](const std::string& name, std::optional<std::uint64_t> samples, std::optional<std::vector<double>> x,
         std::optional<std::string> grid, double t, std::optional<double> T, std::optional<double> alpha,
         std::optional<int> d, std::optional<double> phi0, std::optional<double> rho_rate, std::uint64_t seed,
         unsigned threads, unsigned runs) {
        RunOptions o;
        o.overrides = {T, alpha, d, phi0, rho_rate};
        o.points = x;
        if (grid) o.grid = parse_grid(*grid);
        o.t = t;
        o.samples = samples;
        o.seed = seed;
        o.threads = threads;
        o.runs = runs;
        py::gil_scoped_release release;
        return run_preset(name, o);
      },
      py::arg("name"), py::arg("samples") = py::none(), py::arg("x") = py::none(), py::arg("grid") = py::none(),
      py::arg("t") = 0.0, py::arg("T") = py::none(), py::arg("alpha") = py::none(), py::arg("d") = py::none(),
      py::arg("phi0") = py::none(), py::arg("rho_rate") = py::none(), py::arg("seed") = 1,
      py::arg("threads") = default_threads(), py::arg("runs") = 1);

  m.def(
      "cole_hopf_oracle",
      [](const std::string& phi, double horizon, double x, std::uint64_t samples, std::uint64_t seed) {
        const auto o = cole_hopf_oracle(parse(phi, {"x"}), horizon, x, samples, seed);
        return py::make_tuple(o.value, o.std_error);
      },
      "(value, std_error) of -log E[exp(-phi(x + sqrt(2) W_horizon))].", py::arg("phi"), py::arg("horizon"),
      py::arg("x"), py::arg("samples"), py::arg("seed") = 1);

  m.def(
      "fdb_terms",
      [](int mvars, int k) {
        py::list out;
        for (const auto& t : enumerate_fdb(mvars, k)) {
          py::dict d;
          d["coefficient"] = t.weight;
          d["lambda"] = t.lambda;
          d["k_matrix"] = t.k_matrix;
          d["parts"] = t.parts;
          out.append(d);
        }
        return out;
      },
      py::arg("m"), py::arg("k"));

  m.def(
      "mechanism",
      [](const std::string& code, int n) {
        py::list out;
        for (const auto& o : mechanism(parse_code(code), n).outcomes) {
          std::vector<std::string> children;
          for (const auto& c : o.children) children.push_back(to_string(c));
          out.append(py::make_tuple(o.weight, children));
        }
        return out;
      },
      "Weighted child-code tuples of a 1-D code.", py::arg("code"), py::arg("n"));

  m.def(
      "check_bounds",
      [](double K, double rho_rate, double T, int n, int order_cap) {
        return to_string(check_bounds(K, rho_rate, T, n, order_cap));
      },
      py::arg("K"), py::arg("rho_rate"), py::arg("T"), py::arg("n") = 0, py::arg("order_cap") = 12);
}
