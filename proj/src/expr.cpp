#include "codingtree/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <mutex>
#include <numbers>
#include <set>
#include <unordered_map>

namespace codingtree {

struct Node {
  NodeKind kind = NodeKind::constant;
  double value = 0.0;
  std::string name;
  UnaryOp uop = UnaryOp::neg;
  BinaryOp bop = BinaryOp::add;
  int exponent = 0;
  double lo = 0.0;
  double hi = 0.0;
  std::shared_ptr<const Node> a;
  std::shared_ptr<const Node> b;
};

ParseError::ParseError(const std::string& what, std::size_t offset)
    : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

namespace {

std::shared_ptr<const Node> make_constant_node(double v) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::constant;
  n->value = v;
  return n;
}

const std::shared_ptr<const Node>& zero_node() {
  static const std::shared_ptr<const Node> zero = make_constant_node(0.0);
  return zero;
}

double apply_unary(UnaryOp op, double x) {
  switch (op) {
    case UnaryOp::neg: return -x;
    case UnaryOp::exp: return std::exp(x);
    case UnaryOp::log: return std::log(x);
    case UnaryOp::sin: return std::sin(x);
    case UnaryOp::cos: return std::cos(x);
    case UnaryOp::tan: return std::tan(x);
    case UnaryOp::tanh: return std::tanh(x);
    case UnaryOp::sqrt: return std::sqrt(x);
  }
  return 0.0;
}

double apply_binary(BinaryOp op, double x, double y) {
  switch (op) {
    case BinaryOp::add: return x + y;
    case BinaryOp::sub: return x - y;
    case BinaryOp::mul: return x * y;
    case BinaryOp::div: return x / y;
    case BinaryOp::pow: return std::pow(x, y);
  }
  return 0.0;
}

const char* unary_name(UnaryOp op) {
  switch (op) {
    case UnaryOp::neg: return "-";
    case UnaryOp::exp: return "exp";
    case UnaryOp::log: return "log";
    case UnaryOp::sin: return "sin";
    case UnaryOp::cos: return "cos";
    case UnaryOp::tan: return "tan";
    case UnaryOp::tanh: return "tanh";
    case UnaryOp::sqrt: return "sqrt";
  }
  return "?";
}

char binary_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::add: return '+';
    case BinaryOp::sub: return '-';
    case BinaryOp::mul: return '*';
    case BinaryOp::div: return '/';
    case BinaryOp::pow: return '^';
  }
  return '?';
}

bool as_power_exponent(const Expr& e, int& out) {
  if (!e.is_constant()) return false;
  const double v = e.value();
  if (!(v >= 0.0) || v > 1e6 || std::floor(v) != v) return false;
  out = static_cast<int>(v);
  return true;
}

}  // namespace

Expr::Expr() : node_(zero_node()) {}

Expr Expr::constant(double value) {
  if (value == 0.0 && !std::signbit(value)) return Expr();
  return Expr(make_constant_node(value));
}

Expr Expr::variable(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::variable;
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::unary(UnaryOp op, Expr child) {
  if (child.is_constant()) {
    const double v = apply_unary(op, child.value());
    if (std::isfinite(v)) return constant(v);
  }
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::unary;
  n->uop = op;
  n->a = std::move(child.node_);
  return Expr(std::move(n));
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
  if (op == BinaryOp::pow) {
    int k = 0;
    if (as_power_exponent(rhs, k)) return power(std::move(lhs), k);
    return unary(UnaryOp::exp, binary(BinaryOp::mul, std::move(rhs), unary(UnaryOp::log, std::move(lhs))));
  }
  if (lhs.is_constant() && rhs.is_constant()) {
    const double v = apply_binary(op, lhs.value(), rhs.value());
    if (std::isfinite(v)) return constant(v);
  }
  switch (op) {
    case BinaryOp::add:
      if (lhs.is_constant(0.0)) return rhs;
      if (rhs.is_constant(0.0)) return lhs;
      break;
    case BinaryOp::sub:
      if (rhs.is_constant(0.0)) return lhs;
      if (lhs.is_constant(0.0)) return unary(UnaryOp::neg, std::move(rhs));
      break;
    case BinaryOp::mul:
      if (lhs.is_constant(0.0) || rhs.is_constant(0.0)) return Expr();
      if (lhs.is_constant(1.0)) return rhs;
      if (rhs.is_constant(1.0)) return lhs;
      break;
    case BinaryOp::div:
      if (rhs.is_constant(1.0)) return lhs;
      if (lhs.is_constant(0.0) && !rhs.is_constant(0.0)) return Expr();
      break;
    case BinaryOp::pow:
      break;
  }
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::binary;
  n->bop = op;
  n->a = std::move(lhs.node_);
  n->b = std::move(rhs.node_);
  return Expr(std::move(n));
}

Expr Expr::power(Expr base, int exponent) {
  if (exponent < 0) throw ExprError("pow node requires a non-negative integer exponent");
  if (exponent == 0) return constant(1.0);
  if (exponent == 1) return base;
  if (base.is_constant()) {
    const double v = std::pow(base.value(), exponent);
    if (std::isfinite(v)) return constant(v);
  }
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::binary;
  n->bop = BinaryOp::pow;
  n->exponent = exponent;
  n->a = std::move(base.node_);
  n->b = constant(exponent).node_;
  return Expr(std::move(n));
}

Expr Expr::clamp(Expr child, double lo, double hi) {
  if (!(lo <= hi)) throw ExprError("clamp requires lo <= hi");
  if (child.is_constant()) return constant(std::clamp(child.value(), lo, hi));
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::clamp;
  n->lo = lo;
  n->hi = hi;
  n->a = std::move(child.node_);
  return Expr(std::move(n));
}

Expr Expr::indicator(Expr child, double lo, double hi) {
  if (child.is_constant()) {
    const double v = child.value();
    return constant(lo < v && v < hi ? 1.0 : 0.0);
  }
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::indicator;
  n->lo = lo;
  n->hi = hi;
  n->a = std::move(child.node_);
  return Expr(std::move(n));
}

NodeKind Expr::kind() const { return node_->kind; }
bool Expr::is_constant(double v) const { return is_constant() && node_->value == v; }
double Expr::value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
UnaryOp Expr::unary_op() const { return node_->uop; }
BinaryOp Expr::binary_op() const { return node_->bop; }
int Expr::exponent() const { return node_->exponent; }
double Expr::lo() const { return node_->lo; }
double Expr::hi() const { return node_->hi; }

std::size_t Expr::arity() const {
  switch (node_->kind) {
    case NodeKind::constant:
    case NodeKind::variable: return 0;
    case NodeKind::unary:
    case NodeKind::clamp:
    case NodeKind::indicator: return 1;
    case NodeKind::binary: return node_->bop == BinaryOp::pow ? 1 : 2;
  }
  return 0;
}

Expr Expr::child(std::size_t i) const { return Expr(i == 0 ? node_->a : node_->b); }

Expr operator+(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::div, a, b); }
Expr operator-(const Expr& a) { return Expr::unary(UnaryOp::neg, a); }

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.id() == b.id()) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case NodeKind::constant: return a.value() == b.value();
    case NodeKind::variable: return a.name() == b.name();
    case NodeKind::unary:
      return a.unary_op() == b.unary_op() && structurally_equal(a.child(0), b.child(0));
    case NodeKind::binary:
      if (a.binary_op() != b.binary_op()) return false;
      if (a.binary_op() == BinaryOp::pow)
        return a.exponent() == b.exponent() && structurally_equal(a.child(0), b.child(0));
      return structurally_equal(a.child(0), b.child(0)) && structurally_equal(a.child(1), b.child(1));
    case NodeKind::clamp:
    case NodeKind::indicator:
      return a.lo() == b.lo() && a.hi() == b.hi() && structurally_equal(a.child(0), b.child(0));
  }
  return false;
}

Expr fold_constants(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::constant: return Expr::constant(e.value());
    case NodeKind::variable: return e;
    case NodeKind::unary: return Expr::unary(e.unary_op(), fold_constants(e.child(0)));
    case NodeKind::binary:
      if (e.binary_op() == BinaryOp::pow) return Expr::power(fold_constants(e.child(0)), e.exponent());
      return Expr::binary(e.binary_op(), fold_constants(e.child(0)), fold_constants(e.child(1)));
    case NodeKind::clamp: return Expr::clamp(fold_constants(e.child(0)), e.lo(), e.hi());
    case NodeKind::indicator: return Expr::indicator(fold_constants(e.child(0)), e.lo(), e.hi());
  }
  return e;
}

namespace {

void collect(const Expr& e, std::set<const Node*>& seen, std::set<std::string>* names) {
  if (!seen.insert(e.id()).second) return;
  if (e.kind() == NodeKind::variable && names) names->insert(e.name());
  for (std::size_t i = 0; i < e.arity(); ++i) collect(e.child(i), seen, names);
}

}  // namespace

std::size_t dag_size(const Expr& e) {
  std::set<const Node*> seen;
  collect(e, seen, nullptr);
  return seen.size();
}

std::vector<std::string> free_variables(const Expr& e) {
  std::set<const Node*> seen;
  std::set<std::string> names;
  collect(e, seen, &names);
  return {names.begin(), names.end()};
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& vars) : text_(text), vars_(vars) {}

  Expr run() {
    Expr e = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (accept('+')) lhs = lhs + term();
      else if (accept('-')) lhs = lhs - term();
      else return lhs;
    }
  }

  Expr term() {
    Expr lhs = factor();
    for (;;) {
      if (accept('*')) lhs = lhs * factor();
      else if (accept('/')) lhs = lhs / factor();
      else return lhs;
    }
  }

  Expr factor() {
    Expr base = unary();
    if (accept('^')) return Expr::binary(BinaryOp::pow, base, factor());
    return base;
  }

  Expr unary() {
    if (accept('-')) return -unary();
    return atom();
  }

  Expr atom() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail(std::string("unexpected '") + c + "'");
  }

  Expr number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
        pos_ = p;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    const auto* first = text_.data() + start;
    const auto* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
      pos_ = start;
      fail("malformed number");
    }
    return Expr::constant(v);
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string id(text_.substr(start, pos_ - start));
    skip_ws();
    const bool call = pos_ < text_.size() && text_[pos_] == '(';
    if (!call) {
      if (std::find(vars_.begin(), vars_.end(), id) != vars_.end()) return Expr::variable(id);
      if (id == "pi") return Expr::constant(std::numbers::pi);
      pos_ = start;
      fail("unknown identifier '" + id + "'");
    }
    static const std::pair<const char*, UnaryOp> unary_fns[] = {
        {"exp", UnaryOp::exp}, {"log", UnaryOp::log},   {"sin", UnaryOp::sin},  {"cos", UnaryOp::cos},
        {"tan", UnaryOp::tan}, {"tanh", UnaryOp::tanh}, {"sqrt", UnaryOp::sqrt}};
    const std::size_t call_pos = start;
    ++pos_;  // '('
    std::vector<Expr> args;
    if (!accept(')')) {
      args.push_back(expr());
      while (accept(',')) args.push_back(expr());
      expect(')');
    }
    for (const auto& [fname, op] : unary_fns) {
      if (id == fname) {
        if (args.size() != 1) throw ParseError(id + " expects 1 argument, got " + std::to_string(args.size()), call_pos);
        return Expr::unary(op, args[0]);
      }
    }
    if (id == "clamp" || id == "indicator") {
      if (args.size() != 3) throw ParseError(id + " expects 3 arguments, got " + std::to_string(args.size()), call_pos);
      if (!args[1].is_constant() || !args[2].is_constant())
        throw ParseError(id + " bounds must be constant", call_pos);
      if (id == "clamp") {
        if (!(args[1].value() <= args[2].value())) throw ParseError("clamp requires lo <= hi", call_pos);
        return Expr::clamp(args[0], args[1].value(), args[2].value());
      }
      return Expr::indicator(args[0], args[1].value(), args[2].value());
    }
    throw ParseError("unknown function '" + id + "'", call_pos);
  }

  std::string_view text_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, std::fabs(v));
  std::string s(buf, ptr);
  if (std::signbit(v)) return "(-" + s + ")";
  return s;
}

}  // namespace

Expr parse(std::string_view text, const std::vector<std::string>& allowed_vars) {
  return Parser(text, allowed_vars).run();
}

std::string to_string(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::binary:
      if (e.binary_op() == BinaryOp::pow)
        return "(" + to_string(e.child(0)) + ")^(" + std::to_string(e.exponent()) + ")";
      return "(" + to_string(e.child(0)) + " " + binary_symbol(e.binary_op()) + " " + to_string(e.child(1)) + ")";
    case NodeKind::unary:
      if (e.unary_op() == UnaryOp::neg) return "(-(" + to_string(e.child(0)) + "))";
      return std::string(unary_name(e.unary_op())) + "(" + to_string(e.child(0)) + ")";
    case NodeKind::clamp:
    case NodeKind::indicator:
      return std::string(e.kind() == NodeKind::clamp ? "clamp(" : "indicator(") + to_string(e.child(0)) + ", " +
             format_number(e.lo()) + ", " + format_number(e.hi()) + ")";
    case NodeKind::constant: return format_number(e.value());
    case NodeKind::variable: return e.name();
  }
  return {};
}

// ---------------------------------------------------------------------------
// Differentiation

namespace {

struct MemoKey {
  const Node* node;
  std::string var;
  bool operator==(const MemoKey&) const = default;
};

struct MemoKeyHash {
  std::size_t operator()(const MemoKey& k) const {
    return std::hash<const void*>()(k.node) * 31u + std::hash<std::string>()(k.var);
  }
};

struct DerivativeMemo {
  std::mutex mutex;
  // The source expression is kept alive so its node address cannot be reused.
  std::unordered_map<MemoKey, std::pair<Expr, Expr>, MemoKeyHash> table;
};

DerivativeMemo& derivative_memo() {
  static DerivativeMemo memo;
  return memo;
}

Expr derive(const Expr& e, const std::string& var);

Expr derive_uncached(const Expr& e, const std::string& var) {
  switch (e.kind()) {
    case NodeKind::constant: return Expr();
    case NodeKind::variable: return Expr::constant(e.name() == var ? 1.0 : 0.0);
    case NodeKind::unary: {
      const Expr a = e.child(0);
      const Expr da = derive(a, var);
      if (da.is_constant(0.0)) return Expr();
      switch (e.unary_op()) {
        case UnaryOp::neg: return -da;
        case UnaryOp::exp: return e * da;
        case UnaryOp::log: return da / a;
        case UnaryOp::sin: return Expr::unary(UnaryOp::cos, a) * da;
        case UnaryOp::cos: return -Expr::unary(UnaryOp::sin, a) * da;
        case UnaryOp::tan: return (Expr::constant(1.0) + Expr::power(e, 2)) * da;
        case UnaryOp::tanh: return (Expr::constant(1.0) - Expr::power(e, 2)) * da;
        case UnaryOp::sqrt: return da / (Expr::constant(2.0) * e);
      }
      return Expr();
    }
    case NodeKind::binary: {
      const Expr a = e.child(0);
      const Expr da = derive(a, var);
      if (e.binary_op() == BinaryOp::pow) {
        const int k = e.exponent();
        return Expr::constant(k) * Expr::power(a, k - 1) * da;
      }
      const Expr b = e.child(1);
      const Expr db = derive(b, var);
      switch (e.binary_op()) {
        case BinaryOp::add: return da + db;
        case BinaryOp::sub: return da - db;
        case BinaryOp::mul: return da * b + a * db;
        case BinaryOp::div: return (da * b - a * db) / Expr::power(b, 2);
        case BinaryOp::pow: break;
      }
      return Expr();
    }
    case NodeKind::clamp: {
      const Expr da = derive(e.child(0), var);
      return Expr::indicator(e.child(0), e.lo(), e.hi()) * da;
    }
    case NodeKind::indicator: return Expr();
  }
  return Expr();
}

Expr derive(const Expr& e, const std::string& var) {
  if (e.kind() == NodeKind::constant) return Expr();
  auto& memo = derivative_memo();
  MemoKey key{e.id(), var};
  {
    std::lock_guard lock(memo.mutex);
    auto it = memo.table.find(key);
    if (it != memo.table.end()) return it->second.second;
  }
  Expr d = derive_uncached(e, var);
  std::lock_guard lock(memo.mutex);
  // Another thread may have inserted the same key; both values are equal.
  memo.table.try_emplace(std::move(key), e, d);
  return d;
}

}  // namespace

Expr differentiate(const Expr& e, const std::string& var) { return derive(e, var); }

Expr differentiate(const Expr& e, const std::string& var, int order) {
  if (order < 0) throw ExprError("negative derivative order");
  Expr out = e;
  for (int i = 0; i < order; ++i) out = derive(out, var);
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

double eval_node(const Expr& e, const Bindings& b, std::unordered_map<const Node*, double>& cache) {
  if (auto it = cache.find(e.id()); it != cache.end()) return it->second;
  double v = 0.0;
  switch (e.kind()) {
    case NodeKind::constant: v = e.value(); break;
    case NodeKind::variable: {
      auto it = b.find(e.name());
      if (it == b.end()) throw ExprError("unbound variable '" + e.name() + "'");
      v = it->second;
      break;
    }
    case NodeKind::unary: v = apply_unary(e.unary_op(), eval_node(e.child(0), b, cache)); break;
    case NodeKind::binary:
      if (e.binary_op() == BinaryOp::pow) v = std::pow(eval_node(e.child(0), b, cache), e.exponent());
      else v = apply_binary(e.binary_op(), eval_node(e.child(0), b, cache), eval_node(e.child(1), b, cache));
      break;
    case NodeKind::clamp: v = std::clamp(eval_node(e.child(0), b, cache), e.lo(), e.hi()); break;
    case NodeKind::indicator: {
      const double a = eval_node(e.child(0), b, cache);
      v = (e.lo() < a && a < e.hi()) ? 1.0 : 0.0;
      break;
    }
  }
  cache.emplace(e.id(), v);
  return v;
}

}  // namespace

Evaluation evaluate(const Expr& e, const Bindings& bindings) {
  std::unordered_map<const Node*, double> cache;
  const double v = eval_node(e, bindings, cache);
  return {v, std::isfinite(v)};
}

// ---------------------------------------------------------------------------
// Structural degree analysis

std::vector<int> polynomial_degrees(const Expr& e, const std::vector<std::string>& vars) {
  const std::size_t m = vars.size();
  switch (e.kind()) {
    case NodeKind::constant: return std::vector<int>(m, 0);
    case NodeKind::variable: {
      std::vector<int> d(m, 0);
      for (std::size_t i = 0; i < m; ++i)
        if (vars[i] == e.name()) d[i] = 1;
      return d;
    }
    case NodeKind::unary: {
      auto d = polynomial_degrees(e.child(0), vars);
      if (e.unary_op() == UnaryOp::neg) return d;
      for (auto& x : d) x = (x == 0) ? 0 : -1;
      return d;
    }
    case NodeKind::clamp:
    case NodeKind::indicator: {
      auto d = polynomial_degrees(e.child(0), vars);
      for (auto& x : d) x = (x == 0) ? 0 : -1;
      return d;
    }
    case NodeKind::binary: {
      auto da = polynomial_degrees(e.child(0), vars);
      if (e.binary_op() == BinaryOp::pow) {
        for (auto& x : da) x = x < 0 ? -1 : x * e.exponent();
        return da;
      }
      const auto db = polynomial_degrees(e.child(1), vars);
      for (std::size_t i = 0; i < m; ++i) {
        const int a = da[i], b = db[i];
        switch (e.binary_op()) {
          case BinaryOp::add:
          case BinaryOp::sub: da[i] = (a < 0 || b < 0) ? -1 : std::max(a, b); break;
          case BinaryOp::mul: da[i] = (a < 0 || b < 0) ? -1 : a + b; break;
          case BinaryOp::div: da[i] = (b != 0) ? -1 : a; break;
          case BinaryOp::pow: break;
        }
      }
      return da;
    }
  }
  return std::vector<int>(m, -1);
}

bool derivative_vanishes(const Expr& e, const std::vector<std::string>& vars, std::span<const int> orders) {
  bool any = false;
  for (int o : orders) any = any || o > 0;
  if (!any) return e.is_constant(0.0);
  if (e.kind() == NodeKind::binary && (e.binary_op() == BinaryOp::add || e.binary_op() == BinaryOp::sub))
    return derivative_vanishes(e.child(0), vars, orders) && derivative_vanishes(e.child(1), vars, orders);
  if (e.kind() == NodeKind::unary && e.unary_op() == UnaryOp::neg)
    return derivative_vanishes(e.child(0), vars, orders);
  const auto deg = polynomial_degrees(e, vars);
  for (std::size_t i = 0; i < orders.size(); ++i)
    if (orders[i] > 0 && deg[i] >= 0 && orders[i] > deg[i]) return true;
  return false;
}

}  // namespace codingtree
