#include "codingtree/bench.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace codingtree {

std::string to_string(Engine e) { return e == Engine::general1d ? "general1d" : "dsem"; }

std::vector<double> Grid::points() const {
  if (steps < 1) throw std::invalid_argument("grid needs at least one point");
  if (steps == 1) return {lo};
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) out.push_back(lo + (hi - lo) * i / (steps - 1));
  return out;
}

namespace {

double parse_number(const std::string& s, const std::string& what) {
  try {
    // Accept anything the expression grammar accepts as a constant, e.g. "-pi".
    const Evaluation e = evaluate(parse(s, {}), {});
    if (!e.finite) throw std::invalid_argument("");
    return e.value;
  } catch (const std::exception&) {
    throw std::invalid_argument("bad " + what + ": '" + s + "'");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

Grid parse_grid(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw std::invalid_argument("grid must be lo:hi:steps, got '" + text + "'");
  Grid g;
  g.lo = parse_number(parts[0], "grid bound");
  g.hi = parse_number(parts[1], "grid bound");
  std::size_t used = 0;
  try {
    g.steps = std::stoi(parts[2], &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != parts[2].size() || g.steps < 1)
    throw std::invalid_argument("grid steps must be a positive integer, got '" + parts[2] + "'");
  if (g.steps > 1 && !(g.hi > g.lo)) throw std::invalid_argument("grid needs lo < hi");
  return g;
}

ProblemSpec Preset::problem() const {
  if (engine != Engine::general1d) throw std::logic_error(name + " is not a one-dimensional preset");
  return make_problem(f, phi, n, T, 0.0, rho_rate);
}

DDProblemSpec Preset::dd_problem() const {
  if (engine != Engine::dsem) throw std::logic_error(name + " is not a d-dimensional preset");
  return make_dd_problem(f, phi, form, d, mu, sigma, T, 0.0, rho_rate);
}

namespace {

// Shortest text that parses back to exactly `v`.
std::string shortest(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string num(double v) { return "(" + shortest(v) + ")"; }

// Replaces every standalone identifier `key` in `text` with `replacement`.
std::string replace_identifier(const std::string& text, const std::string& key, const std::string& replacement) {
  auto word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
  std::string out;
  for (std::size_t i = 0; i < text.size();) {
    const std::size_t end = i + key.size();
    if ((i == 0 || !word(text[i - 1])) && (end >= text.size() || !word(text[end])) &&
        text.compare(i, key.size(), key) == 0) {
      out += replacement;
      i = end;
    } else {
      out += text[i++];
    }
  }
  return out;
}

std::string subst(std::string text, const std::map<std::string, double>& values) {
  for (const auto& [key, v] : values) text = replace_identifier(text, key, num(v));
  return text;
}

std::string exact_variable(const Preset& p) { return p.engine == Engine::general1d ? "x" : "s"; }

void reject(const std::optional<double>& v, const char* what, const std::string& name) {
  if (v) throw std::invalid_argument(std::string("preset ") + name + " takes no " + what + " override");
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"allen_cahn_1d", "allen_cahn_flat", "allen_cahn_dd", "exp_nonlin_dd", "dym_1d",
          "tan_1d",        "hjb_1d",          "quartic4_1d",   "coslog_1d"};
}

Preset make_preset(const std::string& name, const PresetOverrides& o) {
  Preset p;
  p.name = name;
  const auto names = preset_names();
  if (std::find(names.begin(), names.end(), name) == names.end())
    throw std::invalid_argument("unknown preset '" + name + "'");
  const bool has_alpha = name == "exp_nonlin_dd" || name == "dym_1d" || name == "tan_1d" || name == "quartic4_1d" ||
                         name == "coslog_1d";
  if (!has_alpha) reject(o.alpha, "alpha", name);
  if (name != "allen_cahn_flat") reject(o.phi0, "phi0", name);
  if (o.d && name != "allen_cahn_dd" && name != "exp_nonlin_dd")
    throw std::invalid_argument("preset " + name + " takes no d override");
  if (o.d && *o.d < 1) throw std::invalid_argument("d must be >= 1");
  if (o.rho_rate) p.rho_rate = *o.rho_rate;

  // Default horizons and parameters are the ones the published experiments use.
  auto T_or = [&](double def) { return o.T.value_or(def); };
  auto alpha_or = [&](double def) { return o.alpha.value_or(def); };

  if (name == "allen_cahn_1d") {
    p.description = "Allen-Cahn traveling wave, u_t + u_xx/2 + u - u^3 = 0";
    p.T = T_or(0.3);
    p.f = "z0 - z0^3";
    p.phi = "-0.5 - 0.5*tanh(-x/2)";
    p.exact = subst("-0.5 - 0.5*tanh(0.75*(T - t) - x/2)", {{"T", p.T}});
    if (p.T == 0.3) p.reference = -0.610639;
    p.grid = {-4.0, 4.0, 21};
  } else if (name == "allen_cahn_flat") {
    p.description = "Allen-Cahn with constant terminal value phi0";
    p.T = T_or(1.0);
    const double phi0 = o.phi0.value_or(0.2);
    if (!(phi0 > 0.0)) throw std::invalid_argument("phi0 must be positive");
    p.f = "z0 - z0^3";
    p.phi = num(phi0);
    p.exact = subst("1/sqrt(1 + c*exp(-2*(T - t)))", {{"T", p.T}, {"c", 1.0 / (phi0 * phi0) - 1.0}});
    if (p.T == 1.0 && phi0 == 0.2) p.reference = 0.485183;
    p.grid = {0.0, 0.0, 1};
  } else if (name == "allen_cahn_dd") {
    p.description = "Allen-Cahn in d dimensions, sigma^2 = 2, radial terminal condition";
    p.engine = Engine::dsem;
    p.T = T_or(0.3);
    p.d = o.d.value_or(100);
    p.sigma = std::sqrt(2.0);
    p.form = PhiForm::radial;
    p.f = "z0 - z0^3";
    p.phi = "1/(2 + 2*q/5)";
    if (p.T == 0.3 && p.d == 100) p.reference = 0.0528;
    p.grid = {-1.0, 1.0, 5};
    p.samples = 4000;
  } else if (name == "exp_nonlin_dd") {
    p.description = "functional nonlinearity exp(-u)(1 - 2exp(-u))d with drift alpha/d";
    p.engine = Engine::dsem;
    p.T = T_or(0.05);
    p.alpha = alpha_or(10.0);
    p.d = o.d.value_or(10);
    p.mu = p.alpha / p.d;
    p.form = PhiForm::ridge;
    p.f = subst("exp(-z0)*(1 - 2*exp(-z0))*d", {{"d", static_cast<double>(p.d)}});
    p.phi = "log(1 + s^2)";
    p.exact = subst("log(1 + (alpha*(T - t) + s)^2)", {{"alpha", p.alpha}, {"T", p.T}});
    p.grid = {-2.0, 2.0, 21};
  } else if (name == "dym_1d") {
    p.description = "Dym equation u_t + u^3 u_xxx = 0";
    p.T = T_or(0.01);
    p.alpha = alpha_or(2.0);
    if (!(p.alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    p.n = 3;
    p.f = "z0^3*z3 - z2/2";
    p.phi = subst("((3*alpha*x)^2)^(1/3)", {{"alpha", p.alpha}});
    p.exact = subst("((3*alpha*(4*alpha^2*(T - t) + x))^2)^(1/3)", {{"alpha", p.alpha}, {"T", p.T}});
    p.grid = {-1.0, 1.0, 21};
  } else if (name == "tan_1d") {
    p.description = "quasilinear u_t + alpha u_x + u_xx/(1+u^2) - 2u = 0";
    p.T = T_or(0.01);
    p.alpha = alpha_or(10.0);
    p.n = 2;
    p.f = subst("alpha*z1 + z2/(1 + z0^2) - 2*z0 - z2/2", {{"alpha", p.alpha}});
    p.phi = "tan(x)";
    p.exact = subst("tan(x + alpha*(T - t))", {{"alpha", p.alpha}, {"T", p.T}});
    p.grid = {-1.0, 1.0, 21};
  } else if (name == "hjb_1d") {
    p.description = "Hamilton-Jacobi-Bellman u_t + u_xx = (u_x)^2";
    p.T = T_or(0.3);
    p.n = 2;
    p.f = "z2/2 - z1^2";
    p.phi = "log((1 + x^2)/2)";
    p.grid = {-1.0, 1.0, 21};
  } else if (name == "quartic4_1d") {
    p.description = "fully nonlinear fourth-order u_t + alpha u_x + u - (u_xx/12)^2 + cos(pi u_xxxx/24) = 0";
    p.T = T_or(0.04);
    p.alpha = alpha_or(10.0);
    p.n = 4;
    p.f = subst("-z2/2 + alpha*z1 + z0 - z2^2/144 + cos(pi*z4/24)", {{"alpha", p.alpha}});
    // u = (u''/12)^2 + 1 along the wave forces b = 3/8, c = b/6, d = 1 + b^2/36.
    const std::string quartic = "y^4 + y^3 + 0.375*y^2 + 0.0625*y + 1.00390625";
    p.phi = replace_identifier(quartic, "y", "x");
    p.exact = replace_identifier(quartic, "y", subst("(x + alpha*(T - t))", {{"alpha", p.alpha}, {"T", p.T}}));
    p.grid = {-5.0, 5.0, 21};
    p.samples = 10'000;
  } else if (name == "coslog_1d") {
    p.description = "fully nonlinear u_t + alpha u_x + log(u_xx^2 + u_xxx^2) = 0";
    p.T = T_or(0.02);
    p.alpha = alpha_or(5.0);
    p.n = 3;
    p.f = subst("alpha*z1 - z2/2 + log(z2^2 + z3^2)", {{"alpha", p.alpha}});
    p.phi = "cos(x)";
    p.exact = subst("cos(x + alpha*(T - t))", {{"alpha", p.alpha}, {"T", p.T}});
    p.grid = {-std::numbers::pi, std::numbers::pi, 21};
  }
  if (!(p.T > 0.0)) throw std::invalid_argument("T must be positive");
  if (!(p.rho_rate > 0.0)) throw std::invalid_argument("rho rate must be positive");
  if (p.engine == Engine::general1d)
    (void)p.problem();
  else
    (void)p.dd_problem();
  if (!p.exact.empty()) check_residual(p);
  return p;
}

std::vector<Preset> preset_catalog() {
  std::vector<Preset> out;
  for (const auto& n : preset_names()) out.push_back(make_preset(n));
  return out;
}

std::optional<double> Preset::exact_value(double t, double x) const {
  if (exact.empty()) return std::nullopt;
  const std::string v = exact_variable(*this);
  const Evaluation e = evaluate(parse(exact, {"t", v}), {{"t", t}, {v, x}});
  return e.finite ? std::optional<double>(e.value) : std::nullopt;
}

double exact_residual(const Preset& p, double t, double x, double* scale) {
  if (p.exact.empty()) throw std::invalid_argument("preset " + p.name + " has no exact solution");
  const std::string v = exact_variable(p);
  const Expr u = parse(p.exact, {"t", v});
  const Bindings at{{"t", t}, {v, x}};
  auto value = [&](const Expr& e) {
    const Evaluation r = evaluate(e, at);
    return r.finite ? r.value : std::numeric_limits<double>::quiet_NaN();
  };
  const double ut = value(differentiate(u, "t"));
  const double uxx = value(differentiate(u, v, 2));
  double drift = 0.0, diffusion = 0.0, nonlinear = 0.0;
  if (p.engine == Engine::general1d) {
    diffusion = 0.5 * uxx;
    std::vector<std::string> z;
    Bindings zb;
    for (int q = 0; q <= p.n; ++q) {
      z.push_back("z" + std::to_string(q));
      zb[z.back()] = value(differentiate(u, v, q));
    }
    const Evaluation r = evaluate(parse(p.f, z), zb);
    nonlinear = r.finite ? r.value : std::numeric_limits<double>::quiet_NaN();
  } else {
    if (p.form != PhiForm::ridge) throw std::invalid_argument("residual needs a ridge problem");
    // u(t, x) = U(t, Σx): ∇u = U_s 𝟙 and Δu = d U_ss.
    drift = p.mu * p.d * value(differentiate(u, v));
    diffusion = 0.5 * p.sigma * p.sigma * p.d * uxx;
    const Evaluation r = evaluate(parse(p.f, {"z0"}), {{"z0", value(u)}});
    nonlinear = r.finite ? r.value : std::numeric_limits<double>::quiet_NaN();
  }
  if (scale) *scale = std::fabs(ut) + std::fabs(drift) + std::fabs(diffusion) + std::fabs(nonlinear);
  return ut + drift + diffusion + nonlinear;
}

void check_residual(const Preset& p, int points, double tol, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> ut(0.0, p.T);
  const double lo = p.grid.steps > 1 ? p.grid.lo : p.grid.lo - 1.0;
  const double hi = p.grid.steps > 1 ? p.grid.hi : p.grid.lo + 1.0;
  std::uniform_real_distribution<double> ux(lo, hi);
  for (int i = 0; i < points; ++i) {
    const double t = ut(gen), x = ux(gen);
    double scale = 0.0;
    const double r = exact_residual(p, t, x, &scale);
    if (!(std::fabs(r) <= tol * (1.0 + scale))) {
      std::ostringstream os;
      os << std::setprecision(10) << "exact solution of preset " << p.name << " fails its PDE at t=" << t
         << ", x=" << x << ": residual " << r;
      throw ResidualError(os.str());
    }
  }
}

OracleEstimate cole_hopf_oracle(const std::function<double(std::span<const double>)>& phi, double horizon,
                                std::span<const double> x, std::uint64_t samples, std::uint64_t seed) {
  if (!(horizon >= 0.0)) throw std::invalid_argument("horizon must be >= 0");
  if (samples < 2) throw std::invalid_argument("the oracle needs at least two samples");
  RunStatistics s;
  std::vector<double> X(x.size());
  const double scale = std::sqrt(2.0 * horizon);
  for (std::uint64_t i = 0; i < samples; ++i) {
    SampleRng rng(seed, 0, 0, i);
    for (std::size_t k = 0; k < x.size(); ++k) X[k] = x[k] + scale * rng.normal();
    s.add(std::exp(-phi(X)));
  }
  return {-std::log(s.mean), s.standard_error() / s.mean};
}

OracleEstimate cole_hopf_oracle(const Expr& phi, double horizon, double x, std::uint64_t samples,
                                std::uint64_t seed) {
  const Tape tape(phi, {"x"});
  return cole_hopf_oracle([&](std::span<const double> p) { return tape.eval(p); }, horizon,
                          std::span<const double>(&x, 1), samples, seed);
}

bool Report::ok() const {
  return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.failed == 0; });
}

double Report::max_rel_error() const {
  double m = 0.0;
  for (const auto& r : rows) {
    if (r.rel_error)
      m = std::max(m, *r.rel_error);
    else if (r.abs_error)
      m = std::max(m, *r.abs_error);
  }
  return m;
}

namespace {
// Exact values below this are roundoff zeros; relative error is undefined there.
constexpr double kZeroExact = 1e-12;
}  // namespace

std::vector<ReportRow> build_rows(const std::vector<std::vector<RunStatistics>>& stats, const std::vector<double>& xs,
                                  double t, const std::function<std::optional<double>(double)>& exact) {
  std::vector<ReportRow> rows;
  for (unsigned r = 0; r < stats.size(); ++r) {
    if (stats[r].size() != xs.size()) throw std::invalid_argument("statistics and points differ in length");
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const RunStatistics& s = stats[r][i];
      ReportRow row;
      row.run = r;
      row.t = t;
      row.x = xs[i];
      row.estimate = s.mean;
      row.std_error = s.standard_error();
      row.samples = s.count + s.failed;
      row.failed = s.failed;
      row.mean_nodes = row.samples > 0 ? static_cast<double>(s.total_nodes) / static_cast<double>(row.samples) : 0.0;
      if (exact) row.exact = exact(xs[i]);
      if (row.exact) {
        row.abs_error = std::fabs(row.estimate - *row.exact);
        if (std::fabs(*row.exact) >= kZeroExact) row.rel_error = *row.abs_error / std::fabs(*row.exact);
      }
      rows.push_back(row);
    }
  }
  return rows;
}

Report run_preset(const std::string& name, const RunOptions& options) {
  const Preset p = make_preset(name, options.overrides);
  std::vector<double> xs;
  if (options.points && !options.points->empty())
    xs = *options.points;
  else if (options.grid)
    xs = options.grid->points();
  else
    xs = {0.0};
  const std::uint64_t samples = options.samples.value_or(p.samples);

  Report report;
  report.preset = p.name;
  auto echo = [&](const std::string& k, const std::string& v) { report.config.emplace_back(k, v); };
  auto fmt = [](double v) { return shortest(v); };
  echo("engine", to_string(p.engine));
  echo("f", p.f);
  echo("phi", p.phi);
  if (p.engine == Engine::general1d) {
    echo("n", std::to_string(p.n));
  } else {
    echo("phi_form", to_string(p.form));
    echo("d", std::to_string(p.d));
    echo("mu", fmt(p.mu));
    echo("sigma", fmt(p.sigma));
  }
  echo("T", fmt(p.T));
  echo("alpha", fmt(p.alpha));
  echo("rho_rate", fmt(p.rho_rate));
  echo("t", fmt(options.t));
  echo("samples", std::to_string(samples));
  echo("seed", std::to_string(options.seed));
  echo("runs", std::to_string(options.runs));
  echo("exact", p.exact);

  std::vector<std::vector<RunStatistics>> stats;
  if (p.engine == Engine::general1d) {
    RunConfig cfg;
    cfg.spec = p.problem();
    if (options.max_nodes) cfg.spec.max_nodes = *options.max_nodes;
    cfg.eval_points.clear();
    for (double x : xs) cfg.eval_points.push_back({options.t, x});
    cfg.samples = samples;
    cfg.seed = options.seed;
    cfg.threads = options.threads;
    cfg.runs = options.runs;
    cfg.strict_failures = false;
    stats = run_repeated(cfg);
  } else {
    DDRunConfig cfg;
    cfg.spec = p.dd_problem();
    if (options.max_nodes) cfg.spec.max_nodes = *options.max_nodes;
    for (double x : xs) cfg.eval_points.push_back({options.t, diagonal_point(x, p.d)});
    cfg.samples = samples;
    cfg.seed = options.seed;
    cfg.threads = options.threads;
    cfg.runs = options.runs;
    cfg.strict_failures = false;
    stats = dd_run_repeated(cfg);
  }

  report.rows = build_rows(stats, xs, options.t, [&p, &options](double x) { return p.exact_value(options.t, x); });
  return report;
}

namespace {

constexpr const char* kCsvHeader = "run,t,x,estimate,std_error,samples,failed,mean_nodes,exact,abs_error,rel_error";

std::string cell(double v) { return shortest(v); }

std::string cell(const std::optional<double>& v) { return v ? cell(*v) : std::string(); }

double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    // stod rejects "nan"/"inf" spellings on some platforms only when malformed.
    if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
    throw std::invalid_argument("bad number in CSV: '" + s + "'");
  }
  return v;
}

std::optional<double> parse_optional(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_double(s);
}

}  // namespace

void write_csv(const Report& r, std::ostream& os) {
  os << kCsvHeader << '\n';
  for (const auto& row : r.rows) {
    os << row.run << ',' << cell(row.t) << ',' << cell(row.x) << ',' << cell(row.estimate) << ','
       << cell(row.std_error) << ',' << row.samples << ',' << row.failed << ',' << cell(row.mean_nodes) << ','
       << cell(row.exact) << ',' << cell(row.abs_error) << ',' << cell(row.rel_error) << '\n';
  }
}

std::vector<ReportRow> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) throw std::invalid_argument("unexpected CSV header");
  std::vector<ReportRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto c = split(line, ',');
    if (c.size() != 11) throw std::invalid_argument("CSV row has " + std::to_string(c.size()) + " fields");
    ReportRow row;
    row.run = static_cast<unsigned>(std::stoul(c[0]));
    row.t = parse_double(c[1]);
    row.x = parse_double(c[2]);
    row.estimate = parse_double(c[3]);
    row.std_error = parse_double(c[4]);
    row.samples = std::stoull(c[5]);
    row.failed = std::stoull(c[6]);
    row.mean_nodes = parse_double(c[7]);
    row.exact = parse_optional(c[8]);
    row.abs_error = parse_optional(c[9]);
    row.rel_error = parse_optional(c[10]);
    rows.push_back(row);
  }
  return rows;
}

void write_json(const Report& r, std::ostream& os) {
  using nlohmann::json;
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json j;
  j["preset"] = r.preset;
  json config = json::object();
  for (const auto& [k, v] : r.config) config[k] = v;
  j["config"] = config;
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"run", row.run},
                    {"t", row.t},
                    {"x", row.x},
                    {"estimate", row.estimate},
                    {"std_error", row.std_error},
                    {"samples", row.samples},
                    {"failed", row.failed},
                    {"mean_nodes", row.mean_nodes},
                    {"exact", opt(row.exact)},
                    {"abs_error", opt(row.abs_error)},
                    {"rel_error", opt(row.rel_error)}});
  }
  j["rows"] = rows;
  os << j.dump(2) << '\n';
}

Table reproduce_table(const std::string& name, const TableOptions& options) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Table t;
  if (name == "table2") {
    t.title = "Allen-Cahn, d = 100, T = 0.3: u(0, 0) over repeated runs (reference 0.0528)";
    t.columns = {"source", "mean", "sd", "mean_rel_l1", "sd_rel_l1"};
    RunOptions ro;
    ro.samples = options.samples.value_or(4000);
    ro.seed = options.seed;
    ro.threads = options.threads;
    ro.runs = options.runs;
    const Report rep = run_preset("allen_cahn_dd", ro);
    std::vector<double> est;
    for (const auto& row : rep.rows) est.push_back(row.estimate);
    const ErrorReport e = error_report(est, 0.0528);
    // source 0: this run, 1: published coding trees, 2: published BSDE.
    t.rows.push_back({0, e.mean, e.sd, e.mean_rel_l1, e.sd_rel_l1});
    t.rows.push_back({1, 0.052754, 0.000364, 0.005916, 0.003661});
    t.rows.push_back({2, 0.0528, 0.0002, 0.0030, 0.0022});
  } else if (name == "table3") {
    t.title = "Allen-Cahn with constant terminal value, T = 1: u(0, 0)";
    t.columns = {"phi0", "exact", "estimate", "std_error", "published"};
    const std::vector<std::pair<double, double>> published = {
        {0.1, 0.247403}, {0.2, 0.472720}, {0.3, 0.723543}, {0.4, 0.866281}, {0.5, 0.932852},
        {0.6, 0.968213}, {0.7, 1.005440}, {0.8, 0.950816}, {0.9, 0.944715}, {1.0, 1.000164},
        {1.1, 1.182766}, {1.2, 1.576551}, {1.5, 5.182978}, {2.0, 30.006351}};
    for (const auto& [phi0, pub] : published) {
      RunOptions ro;
      ro.overrides.phi0 = phi0;
      ro.samples = options.samples.value_or(100'000);
      ro.seed = options.seed;
      ro.threads = options.threads;
      const Report rep = run_preset("allen_cahn_flat", ro);
      const auto& row = rep.rows.front();
      t.rows.push_back({phi0, row.exact.value_or(nan), row.estimate, row.std_error, pub});
    }
  } else if (name == "table4") {
    t.title = "Allen-Cahn traveling wave, d = 1: u(0, 0) over the horizon T";
    t.columns = {"T", "exact", "estimate", "std_error", "published"};
    const std::vector<std::pair<double, double>> published = {
        {0.1, -0.537451}, {0.2, -0.574662}, {0.3, -0.611628}, {0.4, -0.648401}, {0.5, -0.685096},
        {0.6, -0.721866}, {0.7, -0.758880}, {0.8, -0.796317}, {0.9, -0.842476}, {1.0, -0.884167},
        {1.2, -0.945912}, {1.4, -1.023799}, {1.6, -1.104303}, {1.8, -1.155304}, {2.0, -1.193363}};
    for (const auto& [T, pub] : published) {
      RunOptions ro;
      ro.overrides.T = T;
      ro.samples = options.samples.value_or(100'000);
      ro.seed = options.seed;
      ro.threads = options.threads;
      const Report rep = run_preset("allen_cahn_1d", ro);
      const auto& row = rep.rows.front();
      t.rows.push_back({T, row.exact.value_or(nan), row.estimate, row.std_error, pub});
    }
  } else {
    throw std::invalid_argument("unknown table '" + name + "'; expected table2, table3 or table4");
  }
  return t;
}

void write_table(const Table& t, std::ostream& os, const std::string& format) {
  if (format == "csv") {
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << (std::isnan(row[i]) ? "" : cell(row[i]));
      os << '\n';
    }
  } else if (format == "json") {
    nlohmann::json j;
    j["title"] = t.title;
    j["columns"] = t.columns;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : t.rows) {
      nlohmann::json r = nlohmann::json::array();
      for (double v : row) r.push_back(std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v));
      rows.push_back(r);
    }
    j["rows"] = rows;
    os << j.dump(2) << '\n';
  } else if (format == "text") {
    os << t.title << '\n';
    for (const auto& c : t.columns) os << std::setw(14) << c;
    os << '\n';
    for (const auto& row : t.rows) {
      for (double v : row) {
        if (std::isnan(v))
          os << std::setw(14) << "";
        else
          os << std::setw(14) << std::setprecision(6) << v;
      }
      os << '\n';
    }
  } else {
    throw std::invalid_argument("format must be text, csv or json");
  }
}

}  // namespace codingtree
