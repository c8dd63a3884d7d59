#include "codingtree/dsem.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace codingtree {

std::string to_string(PhiForm f) { return f == PhiForm::ridge ? "ridge" : "radial"; }

PhiForm parse_phi_form(const std::string& s) {
  if (s == "ridge") return PhiForm::ridge;
  if (s == "radial") return PhiForm::radial;
  throw std::invalid_argument("phi form must be ridge or radial, got '" + s + "'");
}

namespace {
const char* phi_variable(PhiForm f) { return f == PhiForm::ridge ? "s" : "q"; }
}  // namespace

void DDProblemSpec::validate() const {
  if (d < 1) throw std::invalid_argument("d must be >= 1");
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  if (!std::isfinite(mu)) throw std::invalid_argument("mu must be finite");
  if (!(t0 >= 0.0)) throw std::invalid_argument("t0 must be >= 0");
  if (!(T > t0)) throw std::invalid_argument("T must exceed t0");
  if (!(rho_rate > 0.0)) throw std::invalid_argument("rho rate must be positive");
  if (max_nodes < 1) throw std::invalid_argument("max_nodes must be >= 1");
  for (const auto& v : free_variables(f))
    if (v != "z0") throw std::invalid_argument("f uses variable '" + v + "'; only z0 is allowed");
  const std::string pv = phi_variable(form);
  for (const auto& v : free_variables(Phi))
    if (v != pv) throw std::invalid_argument("Phi uses variable '" + v + "'; only " + pv + " is allowed");
}

DDProblemSpec make_dd_problem(const std::string& f, const std::string& Phi, PhiForm form, int d, double mu,
                              double sigma, double T, double t0, double rho_rate) {
  DDProblemSpec s;
  s.f = parse(f, {"z0"});
  s.Phi = parse(Phi, {phi_variable(form)});
  s.form = form;
  s.d = d;
  s.mu = mu;
  s.sigma = sigma;
  s.T = T;
  s.t0 = t0;
  s.rho_rate = rho_rate;
  s.validate();
  return s;
}

std::string to_string(const DDCode& c) {
  switch (c.kind) {
    case DDCode::Kind::identity: return "Id";
    case DDCode::Kind::fderiv: return "F" + std::to_string(c.index);
    case DDCode::Kind::grad: return "G" + std::to_string(c.index);
  }
  return "?";
}

std::vector<DDOutcome> dd_mechanism(const DDCode& c, int d, double sigma) {
  if (d < 1) throw std::invalid_argument("d must be >= 1");
  switch (c.kind) {
    case DDCode::Kind::identity:
      return {{1.0, 1.0, {DDCode::fderiv(0)}}};
    case DDCode::Kind::grad:
      if (c.index < 0 || c.index >= d) throw std::invalid_argument("gradient index out of range");
      return {{1.0, 1.0, {DDCode::fderiv(1), c}}};
    case DDCode::Kind::fderiv: {
      if (c.index < 0) throw std::invalid_argument("FDeriv order must be >= 0");
      std::vector<DDOutcome> out;
      out.reserve(static_cast<std::size_t>(d) + 1);
      out.push_back({1.0, 0.5, {DDCode::fderiv(0), DDCode::fderiv(c.index + 1)}});
      const double p = 0.5 / d;
      for (int i = 0; i < d; ++i)
        out.push_back({-0.5 * sigma * sigma, p, {DDCode::grad(i), DDCode::grad(i), DDCode::fderiv(c.index + 2)}});
      return out;
    }
  }
  return {};
}

std::size_t dd_select(const DDCode& c, int d, double uniform) {
  if (c.kind != DDCode::Kind::fderiv || uniform < 0.5) return 0;
  const auto i = static_cast<std::size_t>((uniform - 0.5) * 2.0 * d);
  return 1 + std::min(i, static_cast<std::size_t>(d) - 1);
}

DDTerminal::DDTerminal(const DDProblemSpec& spec)
    : form_(spec.form), f_(spec.f, {"z0"}), Phi_(spec.Phi, {phi_variable(spec.form)}) {}

double DDTerminal::argument(std::span<const double> x) const {
  double a = 0.0;
  if (form_ == PhiForm::ridge)
    for (double v : x) a += v;
  else
    for (double v : x) a += v * v;
  return a;
}

double DDTerminal::phi(std::span<const double> x) const {
  const double a = argument(x);
  return Phi_.eval(std::span<const double>(&a, 1));
}

double DDTerminal::grad(int i, std::span<const double> x) const {
  const double a = argument(x);
  const double dPhi = Phi_.derivatives(0, 1, std::span<const double>(&a, 1))[1];
  return form_ == PhiForm::ridge ? dPhi : 2.0 * x[static_cast<std::size_t>(i)] * dPhi;
}

double DDTerminal::value(const DDCode& c, std::span<const double> x) const {
  switch (c.kind) {
    case DDCode::Kind::identity: return phi(x);
    case DDCode::Kind::grad: return grad(c.index, x);
    case DDCode::Kind::fderiv: {
      const double u = phi(x);
      if (c.index == 0) return f_.eval(std::span<const double>(&u, 1));
      return f_.derivatives(0, c.index, std::span<const double>(&u, 1))[static_cast<std::size_t>(c.index)];
    }
  }
  return std::nan("");
}

DDTreeSampler::DDTreeSampler(DDProblemSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  terminal_ = DDTerminal(spec_);
}

bool DDTreeSampler::vanishes(int k) {
  const auto idx = static_cast<std::size_t>(k);
  if (vanish_.size() <= idx) vanish_.resize(idx + 1, -1);
  if (vanish_[idx] < 0) {
    const int orders[1] = {k};
    vanish_[idx] = derivative_vanishes(spec_.f, {"z0"}, orders) ? 1 : 0;
  }
  return vanish_[idx] == 1;
}

SampleOutcome DDTreeSampler::sample(double t, std::span<const double> x, const DDCode& c, SampleRng& rng,
                                    std::ostream* trace) {
  const auto d = static_cast<std::size_t>(spec_.d);
  if (x.size() != d) throw std::invalid_argument("point dimension must equal d");
  if (t < spec_.t0 || t > spec_.T) throw std::invalid_argument("t must lie in [t0, T]");
  if (c.kind == DDCode::Kind::grad && (c.index < 0 || c.index >= spec_.d))
    throw std::invalid_argument("gradient index out of range");
  if (c.kind == DDCode::Kind::fderiv && c.index < 0) throw std::invalid_argument("FDeriv order must be >= 0");
  const double T = spec_.T;
  const double theta = spec_.rho_rate;
  SampleOutcome out;

  if (t == T) {
    out.value = terminal_.value(c, x);
    out.nodes = 1;
    if (!std::isfinite(out.value)) out.status = SampleStatus::non_finite;
    return out;
  }
  if (c.kind == DDCode::Kind::fderiv && vanishes(c.index)) {
    out.nodes = 1;
    return out;
  }

  positions_.assign(x.begin(), x.end());
  stack_.clear();
  stack_.push_back({t, 0, c, 0});
  std::vector<double> X(d);
  double product = 1.0;
  while (!stack_.empty()) {
    const Frame frame = stack_.back();
    stack_.pop_back();
    if (++out.nodes > spec_.max_nodes) {
      out.status = SampleStatus::node_budget;
      break;
    }
    if (frame.depth > spec_.max_depth) {
      out.status = SampleStatus::depth_limit;
      break;
    }
    out.max_depth = std::max(out.max_depth, frame.depth);

    const double tau = sample_lifetime(rng, theta);
    const bool leaf = frame.t + tau >= T;
    const double dt = leaf ? T - frame.t : tau;
    const double scale = spec_.sigma * std::sqrt(dt);
    for (std::size_t i = 0; i < d; ++i) X[i] = positions_[frame.pos + i] + spec_.mu * dt + scale * rng.normal();

    if (leaf) {
      const double v = terminal_.value(frame.code, X);
      const double factor = v * std::exp(theta * dt);
      if (trace)
        *trace << std::string(2 * frame.depth, ' ') << to_string(frame.code) << " birth=" << frame.t
               << " death=" << T << " leaf=" << v << " factor=" << factor << '\n';
      if (!std::isfinite(v)) {
        out.status = SampleStatus::non_finite;
        break;
      }
      product *= factor;
    } else {
      const double u = rng.uniform();
      double factor_w = 1.0;
      DDCode kids[3];
      std::size_t n_kids = 0;
      switch (frame.code.kind) {
        case DDCode::Kind::identity:
          kids[n_kids++] = DDCode::fderiv(0);
          break;
        case DDCode::Kind::grad:
          kids[n_kids++] = DDCode::fderiv(1);
          kids[n_kids++] = frame.code;
          break;
        case DDCode::Kind::fderiv: {
          const std::size_t pick = dd_select(frame.code, spec_.d, u);
          const int k = frame.code.index;
          if (pick == 0) {
            factor_w = 2.0;
            kids[n_kids++] = DDCode::fderiv(0);
            kids[n_kids++] = DDCode::fderiv(k + 1);
          } else {
            factor_w = -static_cast<double>(spec_.d) * spec_.sigma * spec_.sigma;
            const int i = static_cast<int>(pick - 1);
            kids[n_kids++] = DDCode::grad(i);
            kids[n_kids++] = DDCode::grad(i);
            kids[n_kids++] = DDCode::fderiv(k + 2);
          }
          break;
        }
      }
      const double factor = factor_w / (theta * std::exp(-theta * tau));
      if (trace) {
        *trace << std::string(2 * frame.depth, ' ') << to_string(frame.code) << " birth=" << frame.t
               << " death=" << frame.t + tau << " factor=" << factor << " ->";
        for (std::size_t j = 0; j < n_kids; ++j) *trace << ' ' << to_string(kids[j]);
        *trace << '\n';
      }
      bool zero = false;
      for (std::size_t j = 0; j < n_kids; ++j)
        if (kids[j].kind == DDCode::Kind::fderiv && vanishes(kids[j].index)) zero = true;
      if (zero) {
        product = 0.0;
      } else {
        product *= factor;
        // Children share the parent's death position; store it once.
        const std::size_t pos = positions_.size();
        positions_.insert(positions_.end(), X.begin(), X.end());
        for (std::size_t j = n_kids; j-- > 0;) stack_.push_back({frame.t + tau, pos, kids[j], frame.depth + 1});
      }
    }
    if (product == 0.0) break;
  }
  if (!out.failed() && !std::isfinite(product)) out.status = SampleStatus::non_finite;
  out.value = out.failed() ? std::nan("") : product;
  return out;
}

SampleOutcome dd_sample_H(const DDProblemSpec& spec, double t, std::span<const double> x, const DDCode& c,
                          SampleRng& rng) {
  return DDTreeSampler(spec).sample(t, x, c, rng);
}

std::vector<RunStatistics> dd_run_estimate(const DDRunConfig& config, std::uint64_t run) {
  config.spec.validate();
  for (const auto& p : config.eval_points) {
    if (p.t < config.spec.t0 || p.t > config.spec.T) throw std::invalid_argument("evaluation time outside [t0, T]");
    if (p.x.size() != static_cast<std::size_t>(config.spec.d))
      throw std::invalid_argument("evaluation point dimension must equal d");
  }
  SamplingPlan plan;
  plan.points = config.eval_points.size();
  plan.samples = config.samples;
  plan.seed = config.seed;
  plan.run = run;
  plan.threads = config.threads;
  plan.strict_failures = config.strict_failures;
  return run_samples(plan, [&config]() -> SampleFn {
    auto sampler = std::make_shared<DDTreeSampler>(config.spec);
    return [sampler, &config](std::size_t point, SampleRng& rng) {
      const auto& p = config.eval_points[point];
      return sampler->sample(p.t, p.x, config.code, rng);
    };
  });
}

std::vector<std::vector<RunStatistics>> dd_run_repeated(const DDRunConfig& config) {
  if (config.runs < 1) throw std::invalid_argument("runs must be >= 1");
  std::vector<std::vector<RunStatistics>> out;
  for (unsigned r = 0; r < config.runs; ++r) out.push_back(dd_run_estimate(config, r));
  return out;
}

std::vector<double> diagonal_point(double v, int d) {
  if (d < 1) throw std::invalid_argument("d must be >= 1");
  return std::vector<double>(static_cast<std::size_t>(d), v / d);
}

}  // namespace codingtree
