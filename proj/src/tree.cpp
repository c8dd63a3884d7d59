#include "codingtree/tree.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

namespace codingtree {

void ProblemSpec::validate() const {
  if (n < 0) throw std::invalid_argument("n must be >= 0");
  if (!(t0 >= 0.0)) throw std::invalid_argument("t0 must be >= 0");
  if (!(T > t0)) throw std::invalid_argument("T must exceed t0");
  if (!(rho_rate > 0.0)) throw std::invalid_argument("rho rate must be positive");
  if (max_nodes < 1) throw std::invalid_argument("max_nodes must be >= 1");
  for (const auto& v : free_variables(f)) {
    bool ok = v.size() >= 2 && v[0] == 'z';
    if (ok) {
      try {
        std::size_t used = 0;
        const int q = std::stoi(v.substr(1), &used);
        ok = used == v.size() - 1 && q >= 0 && q <= n;
      } catch (const std::exception&) {
        ok = false;
      }
    }
    if (!ok) throw std::invalid_argument("f uses variable '" + v + "' outside z0..z" + std::to_string(n));
  }
  for (const auto& v : free_variables(phi))
    if (v != "x") throw std::invalid_argument("phi uses variable '" + v + "'; only x is allowed");
}

ProblemSpec make_problem(const std::string& f, const std::string& phi, int n, double T, double t0,
                         double rho_rate) {
  std::vector<std::string> z;
  for (int q = 0; q <= n; ++q) z.push_back("z" + std::to_string(q));
  ProblemSpec s;
  s.f = parse(f, z);
  s.phi = parse(phi, {"x"});
  s.n = n;
  s.T = T;
  s.t0 = t0;
  s.rho_rate = rho_rate;
  s.validate();
  return s;
}

std::string to_string(SampleStatus s) {
  switch (s) {
    case SampleStatus::ok: return "ok";
    case SampleStatus::node_budget: return "node budget exceeded";
    case SampleStatus::depth_limit: return "depth limit exceeded";
    case SampleStatus::non_finite: return "non-finite value";
  }
  return "?";
}

double sample_lifetime(SampleRng& rng, double rho_rate) { return rng.exponential(rho_rate); }

struct TreeSampler::Cache {
  struct Atom {
    double factor = 0.0;  // weight / probability
    std::vector<int> children;
    bool zero = false;
  };
  struct Entry {
    Code code;
    bool zero = false;
    bool expanded = false;
    std::vector<Atom> atoms;
  };

  TerminalEvaluator terminal;
  std::vector<std::string> zvars;
  std::vector<Entry> entries;
  std::unordered_map<Code, int, CodeHash> ids;

  struct Frame {
    double t;
    double x;
    int code;
    std::size_t depth;
  };
  std::vector<Frame> stack;

  int intern(const Code& c, const Expr& f) {
    if (auto it = ids.find(c); it != ids.end()) return it->second;
    Entry e;
    e.code = c;
    e.zero = c.kind == Code::Kind::fderiv && derivative_vanishes(f, zvars, c.lambda);
    const int id = static_cast<int>(entries.size());
    entries.push_back(std::move(e));
    ids.emplace(c, id);
    return id;
  }

  const Entry& expand(int id, const ProblemSpec& spec) {
    if (!entries[static_cast<std::size_t>(id)].expanded) {
      const MechanismTable& m = mechanism(entries[static_cast<std::size_t>(id)].code, spec.n);
      std::vector<Atom> atoms;
      atoms.reserve(m.atom_count);
      for (const auto& o : m.outcomes) {
        Atom a;
        a.factor = o.weight / m.probability;
        for (const auto& child : o.children) {
          const int cid = intern(child, spec.f);
          a.children.push_back(cid);
          a.zero = a.zero || entries[static_cast<std::size_t>(cid)].zero;
        }
        atoms.push_back(std::move(a));
      }
      Entry& e = entries[static_cast<std::size_t>(id)];
      e.atoms = std::move(atoms);
      e.expanded = true;
    }
    return entries[static_cast<std::size_t>(id)];
  }
};

TreeSampler::TreeSampler(ProblemSpec spec) : spec_(std::move(spec)), cache_(std::make_unique<Cache>()) {
  spec_.validate();
  cache_->terminal = TerminalEvaluator(spec_.f, spec_.phi, spec_.n);
  for (int q = 0; q <= spec_.n; ++q) cache_->zvars.push_back("z" + std::to_string(q));
}

TreeSampler::~TreeSampler() = default;
TreeSampler::TreeSampler(TreeSampler&&) noexcept = default;
TreeSampler& TreeSampler::operator=(TreeSampler&&) noexcept = default;

SampleOutcome TreeSampler::sample(double t, double x, const Code& c, SampleRng& rng, std::ostream* trace) {
  if (c.kind == Code::Kind::fderiv && c.lambda.size() != static_cast<std::size_t>(spec_.n) + 1)
    throw std::invalid_argument("FDeriv code length must be n+1");
  if (t < spec_.t0 || t > spec_.T) throw std::invalid_argument("t must lie in [t0, T]");
  Cache& cache = *cache_;
  const double T = spec_.T;
  const double theta = spec_.rho_rate;
  SampleOutcome out;

  if (t == T) {
    out.value = cache.terminal.value(c, x);
    out.nodes = 1;
    if (!std::isfinite(out.value)) out.status = SampleStatus::non_finite;
    if (trace) *trace << to_string(c) << " t=" << t << " x=" << x << " terminal=" << out.value << '\n';
    return out;
  }

  const int root = cache.intern(c, spec_.f);
  if (cache.entries[static_cast<std::size_t>(root)].zero) {
    out.value = 0.0;
    out.nodes = 1;
    if (trace) *trace << to_string(c) << " vanishes identically\n";
    return out;
  }

  auto& stack = cache.stack;
  stack.clear();
  stack.push_back({t, x, root, 0});
  double product = 1.0;
  while (!stack.empty()) {
    const auto frame = stack.back();
    stack.pop_back();
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
    if (frame.t + tau >= T) {
      const double dt = T - frame.t;
      const double X = frame.x + std::sqrt(dt) * rng.normal();
      const Code& code = cache.entries[static_cast<std::size_t>(frame.code)].code;
      const double v = cache.terminal.value(code, X);
      const double factor = v * std::exp(theta * dt);
      if (trace)
        *trace << std::string(2 * frame.depth, ' ') << to_string(code) << " birth=" << frame.t << " death=" << T
               << " x=" << frame.x << " X=" << X << " leaf=" << v << " factor=" << factor << '\n';
      if (!std::isfinite(v)) {
        out.status = SampleStatus::non_finite;
        break;
      }
      product *= factor;
    } else {
      const double X = frame.x + std::sqrt(tau) * rng.normal();
      const auto& entry = cache.expand(frame.code, spec_);
      const std::size_t n_atoms = entry.atoms.size();
      auto i = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n_atoms));
      i = std::min(i, n_atoms - 1);
      const auto& atom = entry.atoms[i];
      const double factor = atom.factor / (theta * std::exp(-theta * tau));
      if (trace) {
        *trace << std::string(2 * frame.depth, ' ') << to_string(entry.code) << " birth=" << frame.t
               << " death=" << frame.t + tau << " x=" << frame.x << " X=" << X << " atom=" << i
               << " factor=" << factor << " ->";
        for (int ch : atom.children) *trace << ' ' << to_string(cache.entries[static_cast<std::size_t>(ch)].code);
        *trace << '\n';
      }
      if (atom.zero) {
        product = 0.0;
      } else {
        product *= factor;
        for (auto it = atom.children.rbegin(); it != atom.children.rend(); ++it)
          stack.push_back({frame.t + tau, X, *it, frame.depth + 1});
      }
    }
    if (product == 0.0) break;
  }
  if (!out.failed() && !std::isfinite(product)) out.status = SampleStatus::non_finite;
  out.value = out.failed() ? std::nan("") : product;
  return out;
}

SampleOutcome sample_H(const ProblemSpec& spec, double t, double x, const Code& c, SampleRng& rng) {
  return TreeSampler(spec).sample(t, x, c, rng);
}

}  // namespace codingtree
