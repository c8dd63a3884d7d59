// Flattened expression evaluation and truncated Taylor arithmetic.
//
// A jet over active variables v_1..v_r with per-variable orders o_1..o_r is
// the dense array of Taylor coefficients c[a] for multi-indices a <= o
// (componentwise). Products drop every term whose index leaves that box, so
// the coefficient at o, times o_1!...o_r!, is exactly the mixed partial
// derivative of the evaluated expression.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

#include "codingtree/expr.hpp"

namespace codingtree {

namespace {

class JetSpace {
 public:
  explicit JetSpace(std::vector<int> orders) : orders_(std::move(orders)) {
    strides_.resize(orders_.size());
    std::size_t size = 1;
    for (std::size_t d = 0; d < orders_.size(); ++d) {
      strides_[d] = size;
      size *= static_cast<std::size_t>(orders_[d] + 1);
    }
    size_ = size;
    degree_ = std::accumulate(orders_.begin(), orders_.end(), 0);
    std::vector<std::vector<int>> digits(size_);
    for (std::size_t i = 0; i < size_; ++i) {
      digits[i].resize(orders_.size());
      std::size_t rest = i;
      for (std::size_t d = 0; d < orders_.size(); ++d) {
        digits[i][d] = static_cast<int>(rest % static_cast<std::size_t>(orders_[d] + 1));
        rest /= static_cast<std::size_t>(orders_[d] + 1);
      }
    }
    for (std::size_t i = 0; i < size_; ++i) {
      for (std::size_t j = 0; j < size_; ++j) {
        bool ok = true;
        for (std::size_t d = 0; d < orders_.size() && ok; ++d) ok = digits[i][d] + digits[j][d] <= orders_[d];
        if (ok) products_.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                                     static_cast<std::uint32_t>(i + j)});
      }
    }
  }

  std::size_t size() const { return size_; }
  int degree() const { return degree_; }
  std::size_t stride(std::size_t d) const { return strides_[d]; }

  void multiply(const std::vector<double>& a, const std::vector<double>& b, std::vector<double>& out) const {
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& p : products_) out[p.k] += a[p.i] * b[p.j];
  }

 private:
  struct Triple {
    std::uint32_t i, j, k;
  };
  std::vector<int> orders_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 1;
  int degree_ = 0;
  std::vector<Triple> products_;
};

const JetSpace& jet_space(const std::vector<int>& orders) {
  thread_local std::map<std::vector<int>, JetSpace> cache;
  auto it = cache.find(orders);
  if (it == cache.end()) it = cache.emplace(orders, JetSpace(orders)).first;
  return it->second;
}

using Jet = std::vector<double>;

bool is_constant_jet(const Jet& a) {
  for (std::size_t i = 1; i < a.size(); ++i)
    if (a[i] != 0.0) return false;
  return true;
}

// out = sum_j coeffs[j] * (a - a[0])^j, evaluated by Horner's rule.
void compose(const JetSpace& space, const Jet& a, const std::vector<double>& coeffs, Jet& out) {
  if (is_constant_jet(a)) {
    std::fill(out.begin(), out.end(), 0.0);
    out[0] = coeffs[0];
    return;
  }
  Jet shifted = a;
  shifted[0] = 0.0;
  Jet acc(space.size(), 0.0), tmp(space.size(), 0.0);
  acc[0] = coeffs.back();
  for (int j = static_cast<int>(coeffs.size()) - 2; j >= 0; --j) {
    space.multiply(acc, shifted, tmp);
    tmp[0] += coeffs[static_cast<std::size_t>(j)];
    std::swap(acc, tmp);
  }
  out = std::move(acc);
}

// Taylor coefficients f^(j)(x0)/j!, j = 0..degree.
std::vector<double> unary_coefficients(Tape::Op op, double x0, int degree, double c0, double c1) {
  std::vector<double> c(static_cast<std::size_t>(degree) + 1, 0.0);
  double inv_fact = 1.0;
  switch (op) {
    case Tape::Op::exp: {
      const double e = std::exp(x0);
      for (int j = 0; j <= degree; ++j) {
        if (j > 0) inv_fact /= j;
        c[j] = e * inv_fact;
      }
      break;
    }
    case Tape::Op::log: {
      c[0] = std::log(x0);
      double p = 1.0;
      for (int j = 1; j <= degree; ++j) {
        p /= x0;
        c[j] = ((j % 2) ? 1.0 : -1.0) * p / j;
      }
      break;
    }
    case Tape::Op::sin:
    case Tape::Op::cos: {
      const double s = std::sin(x0), k = std::cos(x0);
      // derivative cycle of sin: s, k, -s, -k ; of cos: k, -s, -k, s
      const double sin_cycle[4] = {s, k, -s, -k};
      const double cos_cycle[4] = {k, -s, -k, s};
      const double* cycle = op == Tape::Op::sin ? sin_cycle : cos_cycle;
      for (int j = 0; j <= degree; ++j) {
        if (j > 0) inv_fact /= j;
        c[j] = cycle[j % 4] * inv_fact;
      }
      break;
    }
    case Tape::Op::tan:
    case Tape::Op::tanh: {
      // t' = 1 + t^2 (tan) or 1 - t^2 (tanh)
      const double sign = op == Tape::Op::tan ? 1.0 : -1.0;
      c[0] = op == Tape::Op::tan ? std::tan(x0) : std::tanh(x0);
      for (int m = 0; m < degree; ++m) {
        double conv = 0.0;
        for (int i = 0; i <= m; ++i) conv += c[i] * c[m - i];
        c[m + 1] = ((m == 0 ? 1.0 : 0.0) + sign * conv) / (m + 1);
      }
      break;
    }
    case Tape::Op::sqrt: {
      // binom(1/2, j) x0^(1/2 - j)
      double binom = 1.0;
      for (int j = 0; j <= degree; ++j) {
        if (j > 0) binom *= (0.5 - (j - 1)) / j;
        c[j] = binom * std::pow(x0, 0.5 - j);
      }
      break;
    }
    case Tape::Op::powi: {
      const int p = static_cast<int>(c0);
      double binom = 1.0;
      for (int j = 0; j <= std::min(degree, p); ++j) {
        if (j > 0) binom *= static_cast<double>(p - j + 1) / j;
        c[j] = binom * std::pow(x0, p - j);
      }
      break;
    }
    case Tape::Op::clamp:
      if (c0 < x0 && x0 < c1) {
        c[0] = x0;
        if (degree >= 1) c[1] = 1.0;
      } else {
        c[0] = std::clamp(x0, c0, c1);
      }
      break;
    case Tape::Op::indicator: c[0] = (c0 < x0 && x0 < c1) ? 1.0 : 0.0; break;
    default: break;
  }
  return c;
}

// 1/x expansion.
std::vector<double> reciprocal_coefficients(double x0, int degree) {
  std::vector<double> c(static_cast<std::size_t>(degree) + 1);
  double p = 1.0 / x0;
  for (int j = 0; j <= degree; ++j) {
    c[j] = ((j % 2) ? -1.0 : 1.0) * p;
    p /= x0;
  }
  return c;
}

}  // namespace

Tape::Tape(const Expr& e, std::vector<std::string> vars) : vars_(std::move(vars)) {
  std::unordered_map<const Node*, int> reg;
  // Iterative post-order over the DAG.
  std::vector<std::pair<Expr, bool>> stack{{e, false}};
  while (!stack.empty()) {
    auto [node, expanded] = stack.back();
    stack.pop_back();
    if (reg.count(node.id())) continue;
    if (!expanded) {
      stack.push_back({node, true});
      for (std::size_t i = node.arity(); i-- > 0;)
        if (!reg.count(node.child(i).id())) stack.push_back({node.child(i), false});
      continue;
    }
    Instr ins{};
    auto child_reg = [&](std::size_t i) { return reg.at(node.child(i).id()); };
    switch (node.kind()) {
      case NodeKind::constant:
        ins.op = Op::constant;
        ins.c0 = node.value();
        break;
      case NodeKind::variable: {
        auto it = std::find(vars_.begin(), vars_.end(), node.name());
        if (it == vars_.end()) throw ExprError("variable '" + node.name() + "' has no slot");
        ins.op = Op::variable;
        ins.slot = static_cast<int>(it - vars_.begin());
        break;
      }
      case NodeKind::unary:
        switch (node.unary_op()) {
          case UnaryOp::neg: ins.op = Op::neg; break;
          case UnaryOp::exp: ins.op = Op::exp; break;
          case UnaryOp::log: ins.op = Op::log; break;
          case UnaryOp::sin: ins.op = Op::sin; break;
          case UnaryOp::cos: ins.op = Op::cos; break;
          case UnaryOp::tan: ins.op = Op::tan; break;
          case UnaryOp::tanh: ins.op = Op::tanh; break;
          case UnaryOp::sqrt: ins.op = Op::sqrt; break;
        }
        ins.a = child_reg(0);
        break;
      case NodeKind::binary:
        ins.a = child_reg(0);
        switch (node.binary_op()) {
          case BinaryOp::add: ins.op = Op::add; break;
          case BinaryOp::sub: ins.op = Op::sub; break;
          case BinaryOp::mul: ins.op = Op::mul; break;
          case BinaryOp::div: ins.op = Op::div; break;
          case BinaryOp::pow:
            ins.op = Op::powi;
            ins.c0 = node.exponent();
            break;
        }
        if (ins.op != Op::powi) ins.b = child_reg(1);
        break;
      case NodeKind::clamp:
      case NodeKind::indicator:
        ins.op = node.kind() == NodeKind::clamp ? Op::clamp : Op::indicator;
        ins.a = child_reg(0);
        ins.c0 = node.lo();
        ins.c1 = node.hi();
        break;
    }
    reg.emplace(node.id(), static_cast<int>(code_.size()));
    code_.push_back(ins);
  }
}

double Tape::eval(std::span<const double> point) const {
  if (point.size() != vars_.size()) throw ExprError("point dimension does not match tape variables");
  thread_local std::vector<double> r;
  r.resize(code_.size());
  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Instr& in = code_[i];
    double v = 0.0;
    switch (in.op) {
      case Op::constant: v = in.c0; break;
      case Op::variable: v = point[static_cast<std::size_t>(in.slot)]; break;
      case Op::neg: v = -r[in.a]; break;
      case Op::exp: v = std::exp(r[in.a]); break;
      case Op::log: v = std::log(r[in.a]); break;
      case Op::sin: v = std::sin(r[in.a]); break;
      case Op::cos: v = std::cos(r[in.a]); break;
      case Op::tan: v = std::tan(r[in.a]); break;
      case Op::tanh: v = std::tanh(r[in.a]); break;
      case Op::sqrt: v = std::sqrt(r[in.a]); break;
      case Op::add: v = r[in.a] + r[in.b]; break;
      case Op::sub: v = r[in.a] - r[in.b]; break;
      case Op::mul: v = r[in.a] * r[in.b]; break;
      case Op::div: v = r[in.a] / r[in.b]; break;
      case Op::powi: v = std::pow(r[in.a], static_cast<int>(in.c0)); break;
      case Op::clamp: v = std::clamp(r[in.a], in.c0, in.c1); break;
      case Op::indicator: v = (in.c0 < r[in.a] && r[in.a] < in.c1) ? 1.0 : 0.0; break;
    }
    r[i] = v;
  }
  return r.back();
}

double Tape::partial(std::span<const int> orders, std::span<const double> point) const {
  if (orders.size() != vars_.size() || point.size() != vars_.size())
    throw ExprError("derivative orders do not match tape variables");
  std::vector<int> active_orders;
  std::vector<int> active_slot(vars_.size(), -1);
  double factorials = 1.0;
  for (std::size_t i = 0; i < orders.size(); ++i) {
    if (orders[i] < 0) throw ExprError("negative derivative order");
    if (orders[i] == 0) continue;
    active_slot[i] = static_cast<int>(active_orders.size());
    active_orders.push_back(orders[i]);
    for (int j = 2; j <= orders[i]; ++j) factorials *= j;
  }
  if (active_orders.empty()) return eval(point);

  const JetSpace& space = jet_space(active_orders);
  const std::size_t n = space.size();
  const int degree = space.degree();
  std::vector<Jet> r(code_.size(), Jet(n, 0.0));
  Jet tmp(n, 0.0);
  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Instr& in = code_[i];
    Jet& out = r[i];
    switch (in.op) {
      case Op::constant: out[0] = in.c0; break;
      case Op::variable:
        out[0] = point[static_cast<std::size_t>(in.slot)];
        if (int s = active_slot[static_cast<std::size_t>(in.slot)]; s >= 0) out[space.stride(static_cast<std::size_t>(s))] = 1.0;
        break;
      case Op::neg:
        for (std::size_t k = 0; k < n; ++k) out[k] = -r[in.a][k];
        break;
      case Op::add:
        for (std::size_t k = 0; k < n; ++k) out[k] = r[in.a][k] + r[in.b][k];
        break;
      case Op::sub:
        for (std::size_t k = 0; k < n; ++k) out[k] = r[in.a][k] - r[in.b][k];
        break;
      case Op::mul: space.multiply(r[in.a], r[in.b], out); break;
      case Op::div:
        compose(space, r[in.b], reciprocal_coefficients(r[in.b][0], degree), tmp);
        space.multiply(r[in.a], tmp, out);
        break;
      default:
        compose(space, r[in.a], unary_coefficients(in.op, r[in.a][0], degree, in.c0, in.c1), out);
        break;
    }
  }
  return r.back()[n - 1] * factorials;
}

std::vector<double> Tape::derivatives(std::size_t slot, int max_order, std::span<const double> point) const {
  if (slot >= vars_.size()) throw ExprError("variable slot out of range");
  std::vector<int> orders(vars_.size(), 0);
  std::vector<double> out(static_cast<std::size_t>(max_order) + 1);
  if (max_order == 0) {
    out[0] = eval(point);
    return out;
  }
  // One univariate jet of order max_order yields every lower order as well.
  const JetSpace& space = jet_space({max_order});
  const std::size_t n = space.size();
  std::vector<Jet> r(code_.size(), Jet(n, 0.0));
  Jet tmp(n, 0.0);
  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Instr& in = code_[i];
    Jet& o = r[i];
    switch (in.op) {
      case Op::constant: o[0] = in.c0; break;
      case Op::variable:
        o[0] = point[static_cast<std::size_t>(in.slot)];
        if (static_cast<std::size_t>(in.slot) == slot) o[1] = 1.0;
        break;
      case Op::neg:
        for (std::size_t k = 0; k < n; ++k) o[k] = -r[in.a][k];
        break;
      case Op::add:
        for (std::size_t k = 0; k < n; ++k) o[k] = r[in.a][k] + r[in.b][k];
        break;
      case Op::sub:
        for (std::size_t k = 0; k < n; ++k) o[k] = r[in.a][k] - r[in.b][k];
        break;
      case Op::mul: space.multiply(r[in.a], r[in.b], o); break;
      case Op::div:
        compose(space, r[in.b], reciprocal_coefficients(r[in.b][0], max_order), tmp);
        space.multiply(r[in.a], tmp, o);
        break;
      default: compose(space, r[in.a], unary_coefficients(in.op, r[in.a][0], max_order, in.c0, in.c1), o); break;
    }
  }
  double fact = 1.0;
  for (int j = 0; j <= max_order; ++j) {
    if (j > 0) fact *= j;
    out[static_cast<std::size_t>(j)] = r.back()[static_cast<std::size_t>(j)] * fact;
  }
  return out;
}

}  // namespace codingtree
