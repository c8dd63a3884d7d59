#include "codingtree/codes.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "codingtree/fdb.hpp"

namespace codingtree {

Code Code::deriv(int k) {
  if (k < 1) throw std::invalid_argument("Deriv order must be >= 1");
  Code c;
  c.kind = Kind::deriv;
  c.order = k;
  return c;
}

Code Code::fderiv(std::vector<int> lambda) {
  if (lambda.empty()) throw std::invalid_argument("FDeriv needs a non-empty lambda");
  for (int v : lambda)
    if (v < 0) throw std::invalid_argument("FDeriv lambda entries must be >= 0");
  Code c;
  c.kind = Kind::fderiv;
  c.lambda = std::move(lambda);
  return c;
}

std::size_t CodeHash::operator()(const Code& c) const {
  std::size_t h = static_cast<std::size_t>(c.kind) * 1000003u + static_cast<std::size_t>(c.order);
  for (int v : c.lambda) h = h * 1315423911u + static_cast<std::size_t>(v) + 1;
  return h;
}

std::string to_string(const Code& c) {
  switch (c.kind) {
    case Code::Kind::identity: return "Id";
    case Code::Kind::deriv: return "D" + std::to_string(c.order);
    case Code::Kind::fderiv: {
      std::string s = "F[";
      for (std::size_t i = 0; i < c.lambda.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(c.lambda[i]);
      }
      return s + "]";
    }
  }
  return "?";
}

Code parse_code(const std::string& text) {
  auto bad = [&] { return std::invalid_argument("malformed code '" + text + "'"); };
  if (text == "Id") return Code::identity();
  if (text.size() >= 2 && text[0] == 'D') {
    std::size_t used = 0;
    const int k = std::stoi(text.substr(1), &used);
    if (used != text.size() - 1) throw bad();
    return Code::deriv(k);
  }
  if (text.size() >= 3 && text.rfind("F[", 0) == 0 && text.back() == ']') {
    std::vector<int> lambda;
    std::stringstream ss(text.substr(2, text.size() - 3));
    std::string item;
    while (std::getline(ss, item, ',')) {
      std::size_t used = 0;
      lambda.push_back(std::stoi(item, &used));
      if (used != item.size()) throw bad();
    }
    return Code::fderiv(std::move(lambda));
  }
  throw bad();
}

namespace {

void append_deriv_children(const FdbTerm& t, int n, std::vector<Code>& children) {
  for (int j = 0; j < t.s; ++j)
    for (int q = 0; q <= n; ++q)
      for (int r = 0; r < t.k_matrix[j][q]; ++r) children.push_back(Code::deriv(q + t.parts[j]));
}

MechanismTable build_mechanism(const Code& c, int n) {
  MechanismTable m;
  const std::size_t width = static_cast<std::size_t>(n) + 1;
  switch (c.kind) {
    case Code::Kind::identity: m.outcomes.push_back({1.0, {Code::f(n)}}); break;
    case Code::Kind::deriv:
      for (const auto& t : enumerate_fdb(n + 1, c.order)) {
        BranchOutcome o{t.weight, {Code::fderiv(t.lambda)}};
        append_deriv_children(t, n, o.children);
        m.outcomes.push_back(std::move(o));
      }
      break;
    case Code::Kind::fderiv: {
      if (c.lambda.size() != width) throw std::invalid_argument("FDeriv lambda length must be n+1");
      auto shifted = [&](std::initializer_list<int> idx) {
        std::vector<int> l = c.lambda;
        for (int i : idx) ++l[static_cast<std::size_t>(i)];
        return Code::fderiv(std::move(l));
      };
      m.outcomes.push_back({1.0, {Code::f(n), shifted({0})}});
      for (int j = 0; j <= n; ++j)
        for (int l = 0; l <= n; ++l)
          m.outcomes.push_back({-0.5, {Code::deriv(j + 1), Code::deriv(l + 1), shifted({j, l})}});
      for (int k = 1; k <= n; ++k) {
        for (const auto& t : enumerate_fdb(n + 1, k)) {
          BranchOutcome o{t.weight, {Code::fderiv(t.lambda), shifted({k})}};
          append_deriv_children(t, n, o.children);
          m.outcomes.push_back(std::move(o));
        }
      }
      break;
    }
  }
  m.atom_count = m.outcomes.size();
  m.probability = 1.0 / static_cast<double>(m.atom_count);
  return m;
}

struct MechanismMemo {
  std::mutex mutex;
  std::unordered_map<std::pair<int, Code>, std::unique_ptr<const MechanismTable>,
                     decltype([](const std::pair<int, Code>& k) { return CodeHash()(k.second) * 31u + k.first; })>
      tables;
};

MechanismMemo& mechanism_memo() {
  static MechanismMemo memo;
  return memo;
}

}  // namespace

const MechanismTable& mechanism(const Code& c, int n) {
  if (n < 0) throw std::invalid_argument("n must be >= 0");
  auto& memo = mechanism_memo();
  std::lock_guard lock(memo.mutex);
  auto& slot = memo.tables[{n, c}];
  if (!slot) {
    try {
      slot = std::make_unique<const MechanismTable>(build_mechanism(c, n));
    } catch (...) {
      memo.tables.erase({n, c});
      throw;
    }
  }
  return *slot;
}

std::pair<const BranchOutcome*, double> sample_branch(const Code& c, int n, SampleRng& rng) {
  const MechanismTable& m = mechanism(c, n);
  auto i = static_cast<std::size_t>(rng.uniform() * static_cast<double>(m.atom_count));
  i = std::min(i, m.atom_count - 1);
  return {&m.outcomes[i], m.probability};
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> z_names(int n) {
  std::vector<std::string> z;
  for (int q = 0; q <= n; ++q) z.push_back("z" + std::to_string(q));
  return z;
}

}  // namespace

TerminalEvaluator::TerminalEvaluator(const Expr& f, const Expr& phi, int n)
    : n_(n), f_(f, z_names(n)), phi_(phi, {"x"}) {}

double TerminalEvaluator::identity(double x) const { return phi_.eval(std::span<const double>(&x, 1)); }

double TerminalEvaluator::deriv(int k, double x) const {
  return phi_.derivatives(0, k, std::span<const double>(&x, 1))[static_cast<std::size_t>(k)];
}

double TerminalEvaluator::fderiv(std::span<const int> lambda, double x) const {
  const auto jet = phi_.derivatives(0, n_, std::span<const double>(&x, 1));
  return f_.partial(lambda, jet);
}

double TerminalEvaluator::value(const Code& c, double x) const {
  switch (c.kind) {
    case Code::Kind::identity: return identity(x);
    case Code::Kind::deriv: return deriv(c.order, x);
    case Code::Kind::fderiv: return fderiv(c.lambda, x);
  }
  return 0.0;
}

void TerminalEvaluator::values(std::span<const Code* const> codes, double x, std::span<double> out) const {
  int order = n_;
  for (const Code* c : codes)
    if (c->kind == Code::Kind::deriv) order = std::max(order, c->order);
  const auto jet = phi_.derivatives(0, order, std::span<const double>(&x, 1));
  const std::span<const double> z(jet.data(), static_cast<std::size_t>(n_) + 1);
  for (std::size_t i = 0; i < codes.size(); ++i) {
    const Code& c = *codes[i];
    switch (c.kind) {
      case Code::Kind::identity: out[i] = jet[0]; break;
      case Code::Kind::deriv: out[i] = jet[static_cast<std::size_t>(c.order)]; break;
      case Code::Kind::fderiv: out[i] = f_.partial(c.lambda, z); break;
    }
  }
}

Evaluation terminal_value(const Code& c, double x, const Expr& phi, const Expr& f, int n) {
  const double v = TerminalEvaluator(f, phi, n).value(c, x);
  return {v, std::isfinite(v)};
}

// ---------------------------------------------------------------------------

std::string to_string(BoundsVerdict v) {
  switch (v) {
    case BoundsVerdict::holds: return "holds";
    case BoundsVerdict::fails: return "fails";
    case BoundsVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

BoundsReport check_bounds_report(double K, double rho_rate, double T, int n, int order_cap) {
  if (!(K > 0.0 && K < 1.0)) throw std::invalid_argument("K must lie in (0, 1)");
  if (!(rho_rate > 0.0)) throw std::invalid_argument("rho rate must be positive");
  BoundsReport r;
  r.rho_T = rho_rate * std::exp(-rho_rate * T);
  r.tail_T = std::exp(-rho_rate * T);

  // Every FDeriv code has the same atom count and the same Deriv children, so
  // one representative stands for the whole class.
  std::set<Code> seen;
  std::vector<Code> queue{Code::identity()};
  double min_q = 1.0;
  bool escaped = false;
  while (!queue.empty()) {
    Code c = queue.back();
    queue.pop_back();
    if (c.kind == Code::Kind::fderiv) c = Code::f(n);
    if (!seen.insert(c).second) continue;
    if (c.kind == Code::Kind::deriv) {
      r.max_deriv_order = std::max(r.max_deriv_order, c.order);
      if (c.order > order_cap) {
        escaped = true;
        continue;
      }
    }
    const MechanismTable& m = mechanism(c, n);
    min_q = std::min(min_q, m.probability);
    for (const auto& o : m.outcomes)
      for (const auto& child : o.children) queue.push_back(child);
  }
  r.min_probability = min_q;
  if (escaped) {
    r.verdict = BoundsVerdict::inconclusive;
    return r;
  }
  const bool ok = r.rho_T >= 1.0 / min_q && K <= r.tail_T;
  r.verdict = ok ? BoundsVerdict::holds : BoundsVerdict::fails;
  return r;
}

BoundsVerdict check_bounds(double K, double rho_rate, double T, int n, int order_cap) {
  return check_bounds_report(K, rho_rate, T, n, order_cap).verdict;
}

std::string mechanism_dump(const Code& c, int n) {
  const MechanismTable& m = mechanism(c, n);
  std::ostringstream os;
  os << "code " << to_string(c) << " n=" << n << " atoms=" << m.atom_count << '\n';
  for (const auto& o : m.outcomes) {
    os << o.weight << '\t';
    for (std::size_t i = 0; i < o.children.size(); ++i) os << (i ? " " : "") << to_string(o.children[i]);
    os << '\n';
  }
  return os.str();
}

}  // namespace codingtree
