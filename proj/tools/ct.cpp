// ct: command-line front end for the coding-tree solvers.

#include <CLI11.hpp>

#include <cstdlib>
#include <functional>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "codingtree/bench.hpp"
#include "codingtree/codes.hpp"
#include "codingtree/dsem.hpp"
#include "codingtree/fdb.hpp"
#include "codingtree/mc.hpp"
#include "codingtree/tree.hpp"

using namespace codingtree;

namespace {

struct Output {
  std::string path;
  std::string format = "csv";

  void add(CLI::App* app) {
    app->add_option("--out", path, "Output file (default stdout)");
    app->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  }

  void write(const Report& r) const {
    std::ofstream file;
    if (!path.empty()) {
      file.open(path);
      if (!file) throw std::runtime_error("cannot open " + path);
    }
    std::ostream& os = path.empty() ? std::cout : file;
    if (format == "json")
      write_json(r, os);
    else
      write_csv(r, os);
  }
};

struct Sampling {
  std::uint64_t samples = 100'000;
  std::uint64_t seed = 1;
  unsigned threads = default_threads();
  unsigned runs = 1;
  std::optional<std::size_t> max_nodes;
  std::size_t trace = 0;

  void add(CLI::App* app, bool general = true) {
    if (general) app->add_option("--samples", samples, "Monte Carlo samples per point and run");
    app->add_option("--seed", seed, "Random seed");
    app->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    app->add_option("--runs", runs, "Independent repetitions")->check(CLI::PositiveNumber);
    app->add_option("--max-nodes", max_nodes, "Node budget per sample");
    if (general)
      app->add_option("--trace", trace, "Print the trees of the first N samples of the first point to stderr");
  }
};

std::vector<double> points_from(const std::vector<double>& xs, const std::string& grid) {
  if (!grid.empty()) return parse_grid(grid).points();
  if (!xs.empty()) return xs;
  return {0.0};
}

std::optional<DDCode> parse_dd_code(const std::string& s) {
  if (s == "Id") return DDCode::identity();
  if (s.size() >= 2 && (s[0] == 'F' || s[0] == 'G')) {
    std::size_t used = 0;
    const int k = std::stoi(s.substr(1), &used);
    if (used == s.size() - 1 && k >= 0) return s[0] == 'F' ? DDCode::fderiv(k) : DDCode::grad(k);
  }
  return std::nullopt;
}

Report solve_report(const std::string& name, std::vector<std::vector<RunStatistics>> stats,
                    const std::vector<double>& xs, double t, const std::string& exact_text,
                    const std::string& exact_var) {
  Report r;
  r.preset = name;
  std::function<std::optional<double>(double)> exact;
  if (!exact_text.empty()) {
    const Expr e = parse(exact_text, {"t", exact_var});
    exact = [e, t, exact_var](double x) -> std::optional<double> {
      const Evaluation v = evaluate(e, {{"t", t}, {exact_var, x}});
      return v.finite ? std::optional<double>(v.value) : std::nullopt;
    };
  }
  r.rows = build_rows(stats, xs, t, exact);
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo coding-tree solver for nonlinear parabolic PDEs"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "1-D problem u_t + u_xx/2 + f(u, u_x, ..., d^n u) = 0, u(T) = phi");
  std::string f_text, phi_text, code_text = "Id", exact_text, grid_text;
  int n = 0;
  double t0 = 0.0, T = 1.0, rho = 1.0;
  std::optional<double> t_eval;
  std::vector<double> xs;
  Sampling sampling;
  Output output;
  solve->add_option("--f", f_text, "Nonlinearity over z0..zn")->required();
  solve->add_option("--phi", phi_text, "Terminal condition over x")->required();
  solve->add_option("--n", n, "Highest derivative order in f");
  solve->add_option("--t0", t0, "Start of the time interval");
  solve->add_option("--T", T, "Terminal time");
  solve->add_option("--t", t_eval, "Evaluation time (default t0)");
  solve->add_option("--x", xs, "Evaluation points")->delimiter(',');
  solve->add_option("--grid", grid_text, "Evaluation grid lo:hi:steps");
  solve->add_option("--rho-rate", rho, "Rate of the exponential lifetimes");
  solve->add_option("--code", code_text, "Root code: Id, D<k> or F[l0,...,ln]");
  solve->add_option("--exact", exact_text, "Reference solution over t and x");
  sampling.add(solve);
  output.add(solve);

  // solve-dd
  auto* solve_dd = app.add_subcommand("solve-dd", "d-dimensional u_t + mu sum u_i + sigma^2/2 Lap u + f(u) = 0");
  std::string phi_form = "ridge";
  int dim = 1;
  double mu = 0.0, sigma = 1.0;
  solve_dd->add_option("--f", f_text, "Nonlinearity over z0")->required();
  solve_dd->add_option("--phi", phi_text, "Terminal profile over s (ridge) or q (radial)")->required();
  solve_dd->add_option("--phi-form", phi_form, "ridge or radial")->check(CLI::IsMember({"ridge", "radial"}));
  solve_dd->add_option("--dim", dim, "Dimension d")->check(CLI::PositiveNumber);
  solve_dd->add_option("--mu", mu, "Drift per coordinate");
  solve_dd->add_option("--sigma", sigma, "Diffusion per coordinate");
  solve_dd->add_option("--t0", t0, "Start of the time interval");
  solve_dd->add_option("--T", T, "Terminal time");
  solve_dd->add_option("--t", t_eval, "Evaluation time (default t0)");
  solve_dd->add_option("--x", xs, "Evaluation coordinates v, each meaning the point (v/d, ..., v/d)")
      ->delimiter(',');
  solve_dd->add_option("--grid", grid_text, "Evaluation grid lo:hi:steps");
  solve_dd->add_option("--rho-rate", rho, "Rate of the exponential lifetimes");
  solve_dd->add_option("--code", code_text, "Root code: Id, F<k> or G<i>");
  solve_dd->add_option("--exact", exact_text, "Reference solution over t and s (ridge)");
  sampling.add(solve_dd);
  output.add(solve_dd);

  // preset
  auto* preset = app.add_subcommand("preset", "Run a catalog problem");
  std::string preset_name;
  PresetOverrides overrides;
  std::optional<std::uint64_t> preset_samples;
  preset->add_option("name", preset_name, "Preset name (see list-presets)")->required();
  preset->add_option("--T", overrides.T, "Terminal time");
  preset->add_option("--alpha", overrides.alpha, "Wave speed parameter");
  preset->add_option("--d", overrides.d, "Dimension (d-dimensional presets)");
  preset->add_option("--phi0", overrides.phi0, "Constant terminal value (allen_cahn_flat)");
  preset->add_option("--rho-rate", overrides.rho_rate, "Rate of the exponential lifetimes");
  preset->add_option("--samples", preset_samples, "Samples per point and run (default: the preset's)");
  preset->add_option("--t", t_eval, "Evaluation time (default 0)");
  preset->add_option("--x", xs, "Evaluation points")->delimiter(',');
  preset->add_option("--grid", grid_text, "Evaluation grid lo:hi:steps, or 'default' for the preset's grid");
  sampling.add(preset, false);
  output.add(preset);

  app.add_subcommand("list-presets", "List catalog problems");

  // table
  auto* table = app.add_subcommand("table", "Reproduce a published table");
  std::string table_name, table_format = "text";
  TableOptions table_options;
  table_options.threads = default_threads();
  table->add_option("name", table_name, "table2, table3 or table4")
      ->required()
      ->check(CLI::IsMember({"table2", "table3", "table4"}));
  table->add_option("--samples", table_options.samples, "Samples per run");
  table->add_option("--seed", table_options.seed, "Random seed");
  table->add_option("--threads", table_options.threads, "Worker threads")->check(CLI::PositiveNumber);
  table->add_option("--runs", table_options.runs, "Repetitions (table2)")->check(CLI::PositiveNumber);
  table->add_option("--format", table_format, "text, csv or json")->check(CLI::IsMember({"text", "csv", "json"}));

  // check-bounds
  auto* bounds = app.add_subcommand("check-bounds", "Test the sufficient condition for |H| <= 1");
  double K = 1.0;
  int order_cap = 12;
  bounds->add_option("--K", K, "Bound on every code value")->required();
  bounds->add_option("--rho-rate", rho, "Rate of the exponential lifetimes");
  bounds->add_option("--T", T, "Horizon")->required();
  bounds->add_option("--n", n, "Highest derivative order in f");
  bounds->add_option("--order-cap", order_cap, "Largest derivative order explored");

  // fdb-dump
  auto* fdb = app.add_subcommand("fdb-dump", "Faa di Bruno terms for m variables and order k as CSV");
  int fdb_m = 1, fdb_k = 1;
  fdb->add_option("m", fdb_m, "Number of variables")->required()->check(CLI::PositiveNumber);
  fdb->add_option("k", fdb_k, "Derivative order")->required()->check(CLI::NonNegativeNumber);

  // mech-dump
  auto* mech = app.add_subcommand("mech-dump", "Print the branching mechanism of a code");
  std::optional<int> mech_dim;
  mech->add_option("--code", code_text, "Code (1-D: Id, D<k>, F[...]; with --dim: Id, F<k>, G<i>)")->required();
  mech->add_option("--n", n, "Highest derivative order in f (1-D)");
  mech->add_option("--dim", mech_dim, "Use the d-dimensional mechanism in this dimension");
  mech->add_option("--sigma", sigma, "Diffusion per coordinate (with --dim)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      ProblemSpec spec = make_problem(f_text, phi_text, n, T, t0, rho);
      if (sampling.max_nodes) spec.max_nodes = *sampling.max_nodes;
      const Code code = parse_code(code_text);
      const double t = t_eval.value_or(t0);
      const auto points = points_from(xs, grid_text);
      if (sampling.trace > 0) {
        TreeSampler sampler(spec);
        for (std::size_t i = 0; i < sampling.trace; ++i) {
          SampleRng rng(sampling.seed, 0, 0, i);
          std::cerr << "# sample " << i << '\n';
          const auto o = sampler.sample(t, points.front(), code, rng, &std::cerr);
          std::cerr << "# value " << o.value << " status " << to_string(o.status) << '\n';
        }
      }
      RunConfig cfg;
      cfg.spec = spec;
      cfg.code = code;
      cfg.eval_points.clear();
      for (double x : points) cfg.eval_points.push_back({t, x});
      cfg.samples = sampling.samples;
      cfg.seed = sampling.seed;
      cfg.threads = sampling.threads;
      cfg.runs = sampling.runs;
      cfg.strict_failures = false;
      const Report r = solve_report("solve", run_repeated(cfg), points, t, exact_text, "x");
      output.write(r);
      return r.ok() ? 0 : 1;
    }
    if (solve_dd->parsed()) {
      DDProblemSpec spec = make_dd_problem(f_text, phi_text, parse_phi_form(phi_form), dim, mu, sigma, T, t0, rho);
      if (sampling.max_nodes) spec.max_nodes = *sampling.max_nodes;
      const auto code = parse_dd_code(code_text);
      if (!code) throw std::invalid_argument("bad code '" + code_text + "'; expected Id, F<k> or G<i>");
      const double t = t_eval.value_or(t0);
      const auto points = points_from(xs, grid_text);
      if (sampling.trace > 0) {
        DDTreeSampler sampler(spec);
        for (std::size_t i = 0; i < sampling.trace; ++i) {
          SampleRng rng(sampling.seed, 0, 0, i);
          std::cerr << "# sample " << i << '\n';
          const auto o = sampler.sample(t, diagonal_point(points.front(), dim), *code, rng, &std::cerr);
          std::cerr << "# value " << o.value << " status " << to_string(o.status) << '\n';
        }
      }
      DDRunConfig cfg;
      cfg.spec = spec;
      cfg.code = *code;
      for (double x : points) cfg.eval_points.push_back({t, diagonal_point(x, dim)});
      cfg.samples = sampling.samples;
      cfg.seed = sampling.seed;
      cfg.threads = sampling.threads;
      cfg.runs = sampling.runs;
      cfg.strict_failures = false;
      const Report r = solve_report("solve-dd", dd_run_repeated(cfg), points, t, exact_text, "s");
      output.write(r);
      return r.ok() ? 0 : 1;
    }
    if (preset->parsed()) {
      RunOptions o;
      o.overrides = overrides;
      if (!xs.empty()) o.points = xs;
      if (grid_text == "default")
        o.grid = make_preset(preset_name, overrides).grid;
      else if (!grid_text.empty())
        o.grid = parse_grid(grid_text);
      o.t = t_eval.value_or(0.0);
      o.samples = preset_samples;
      o.seed = sampling.seed;
      o.threads = sampling.threads;
      o.runs = sampling.runs;
      o.max_nodes = sampling.max_nodes;
      const Report r = run_preset(preset_name, o);
      output.write(r);
      return r.ok() ? 0 : 1;
    }
    if (app.got_subcommand("list-presets")) {
      for (const auto& p : preset_catalog()) {
        std::cout << p.name << "  [" << to_string(p.engine) << "]  " << p.description << "\n    f = " << p.f
                  << "\n    phi = " << p.phi;
        if (!p.exact.empty()) std::cout << "\n    exact = " << p.exact;
        std::cout << "\n    T = " << p.T << ", grid " << p.grid.lo << ":" << p.grid.hi << ":" << p.grid.steps
                  << ", samples " << p.samples << '\n';
      }
      return 0;
    }
    if (table->parsed()) {
      write_table(reproduce_table(table_name, table_options), std::cout, table_format);
      return 0;
    }
    if (bounds->parsed()) {
      const BoundsReport b = check_bounds_report(K, rho, T, n, order_cap);
      std::cout << "verdict " << to_string(b.verdict) << "\nmin_probability " << b.min_probability << "\nrho_T "
                << b.rho_T << "\ntail_T " << b.tail_T << "\nmax_deriv_order " << b.max_deriv_order << '\n';
      return 0;
    }
    if (fdb->parsed()) {
      std::cout << fdb_csv(fdb_m, fdb_k);
      return 0;
    }
    if (mech->parsed()) {
      if (mech_dim) {
        const auto code = parse_dd_code(code_text);
        if (!code) throw std::invalid_argument("bad code '" + code_text + "'; expected Id, F<k> or G<i>");
        for (const auto& o : dd_mechanism(*code, *mech_dim, sigma)) {
          std::cout << o.weight << '\t' << o.probability << '\t';
          for (std::size_t i = 0; i < o.children.size(); ++i) std::cout << (i ? " " : "") << to_string(o.children[i]);
          std::cout << '\n';
        }
      } else {
        std::cout << mechanism_dump(parse_code(code_text), n);
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "ct: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
