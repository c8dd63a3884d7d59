#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "codingtree/dsem.hpp"
#include "codingtree/mc.hpp"
#include "codingtree/tree.hpp"

namespace codingtree {

enum class Engine { general1d, dsem };

std::string to_string(Engine e);

/// Evaluation grid `lo:hi:steps`, steps >= 1 points including both ends.
struct Grid {
  double lo = 0.0;
  double hi = 0.0;
  int steps = 1;

  std::vector<double> points() const;
};

/// Throws std::invalid_argument on malformed text.
Grid parse_grid(const std::string& text);

/// Parameters a preset may be instantiated with. Unset fields take the
/// preset's published defaults.
struct PresetOverrides {
  std::optional<double> T;
  std::optional<double> alpha;
  std::optional<int> d;
  std::optional<double> phi0;  // allen_cahn_flat only
  std::optional<double> rho_rate;
};

/// A benchmark problem with everything needed to run it. Formula fields hold
/// expression text with all parameters already substituted. `exact` is an
/// expression of (t, x) for the 1-D engine or of (t, s) for ridge problems
/// of the d-dimensional engine; empty when no closed form is known. For the
/// d-dimensional engine an evaluation coordinate v stands for the point with
/// every component v/d.
struct Preset {
  std::string name;
  std::string description;
  Engine engine = Engine::general1d;
  std::string f;
  std::string phi;  // over x (general1d) or over s / q (dsem)
  int n = 0;
  PhiForm form = PhiForm::ridge;
  int d = 1;
  double mu = 0.0;
  double sigma = 1.0;
  double T = 1.0;
  double alpha = 0.0;
  double rho_rate = 1.0;
  std::string exact;
  std::optional<double> reference;  // published value of u(0, 0), if any
  Grid grid;
  std::uint64_t samples = 100'000;

  ProblemSpec problem() const;
  DDProblemSpec dd_problem() const;
  std::optional<double> exact_value(double t, double x) const;
};

/// Names of all presets in catalog order.
std::vector<std::string> preset_names();

/// Builds a preset and verifies its exact solution against the PDE.
/// Throws std::invalid_argument for unknown names or overrides the preset
/// does not take, and ResidualError when the self-check fails.
Preset make_preset(const std::string& name, const PresetOverrides& overrides = {});

/// Every preset at its defaults.
std::vector<Preset> preset_catalog();

class ResidualError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// PDE residual of the exact solution at (t, x), from symbolic derivatives.
/// `scale` receives the sum of the magnitudes of the residual's terms.
double exact_residual(const Preset& p, double t, double x, double* scale = nullptr);

/// Evaluates the residual at `points` pseudo-random (t, x) in [0, T] x grid
/// range and throws ResidualError naming the first point where
/// |residual| > tol * (1 + scale).
void check_residual(const Preset& p, int points = 20, double tol = 1e-6, std::uint64_t seed = 2024);

struct OracleEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo solution of ∂ₜu + Δu = |∇u|², u(T, ·) = φ, at (t, x) with
/// horizon s = T - t: u = -log E[exp(-φ(x + √2 W_s))]. The standard error
/// comes from the delta method.
OracleEstimate cole_hopf_oracle(const std::function<double(std::span<const double>)>& phi, double horizon,
                                std::span<const double> x, std::uint64_t samples, std::uint64_t seed = 1);

/// One-dimensional form with φ an expression over x.
OracleEstimate cole_hopf_oracle(const Expr& phi, double horizon, double x, std::uint64_t samples,
                                std::uint64_t seed = 1);

struct RunOptions {
  PresetOverrides overrides;
  std::optional<std::vector<double>> points;  // evaluation coordinates
  std::optional<Grid> grid;                   // used when points is empty
  double t = 0.0;
  std::optional<std::uint64_t> samples;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  unsigned runs = 1;
  std::optional<std::size_t> max_nodes;
};

struct ReportRow {
  unsigned run = 0;
  double t = 0.0;
  double x = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t failed = 0;
  double mean_nodes = 0.0;
  std::optional<double> exact;
  std::optional<double> abs_error;
  std::optional<double> rel_error;  // absent when |exact| < 1e-12
};

struct Report {
  std::string preset;
  std::vector<std::pair<std::string, std::string>> config;  // echoed settings
  std::vector<ReportRow> rows;

  bool ok() const;  // no failed samples
  double max_rel_error() const;  // absolute error where rel_error is absent
};

/// Rows for stats[run][point] evaluated at (t, xs[point]); `exact` may be
/// empty.
std::vector<ReportRow> build_rows(const std::vector<std::vector<RunStatistics>>& stats, const std::vector<double>& xs,
                                  double t, const std::function<std::optional<double>(double)>& exact);

/// Runs a preset on a point list or grid. Failed samples are counted, not
/// thrown. With neither points nor grid, the single point x = 0 is used.
Report run_preset(const std::string& name, const RunOptions& options);

/// Fixed CSV columns:
/// run,t,x,estimate,std_error,samples,failed,mean_nodes,exact,abs_error,rel_error
/// Doubles are written in shortest round-trip form and missing values as
/// empty cells, so read_csv(write_csv(r)) reproduces every row exactly.
void write_csv(const Report& r, std::ostream& os);
std::vector<ReportRow> read_csv(std::istream& is);
/// JSON object {"preset", "config", "rows"} with the CSV fields per row.
void write_json(const Report& r, std::ostream& os);

/// A reproduced table: column names, numeric cells (NaN for empty).
struct Table {
  std::string title;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct TableOptions {
  std::optional<std::uint64_t> samples;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  unsigned runs = 5;
};

/// "table2" (Allen-Cahn, d = 100), "table3" (flat Allen-Cahn over φ(0)),
/// "table4" (Allen-Cahn in 1-D over T).
Table reproduce_table(const std::string& name, const TableOptions& options);

void write_table(const Table& t, std::ostream& os, const std::string& format);

}  // namespace codingtree
