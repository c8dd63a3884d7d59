#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace codingtree {

/// Raised for malformed formulas. `offset()` is the byte position where
/// parsing stopped.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Raised for semantic problems: unbound variables, unknown slots.
class ExprError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class UnaryOp { neg, exp, log, sin, cos, tan, tanh, sqrt };
enum class BinaryOp { add, sub, mul, div, pow };
enum class NodeKind { constant, variable, unary, binary, clamp, indicator };

struct Node;

/// Immutable expression tree. Copies share structure, so an Expr is cheap to
/// pass by value and safe to read from many threads.
///
/// `pow` nodes only ever carry a constant non-negative integer exponent; the
/// parser rewrites any other power as exp(b*log(a)). `indicator(a, lo, hi)`
/// is 1 on the open interval lo < a < hi and 0 elsewhere; it appears as the
/// derivative of `clamp`.
class Expr {
 public:
  Expr();  // constant zero

  static Expr constant(double value);
  static Expr variable(std::string name);

  // Smart constructors: fold constants and apply 0/1 identities, nothing more.
  static Expr unary(UnaryOp op, Expr child);
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs);
  static Expr power(Expr base, int exponent);
  static Expr clamp(Expr child, double lo, double hi);
  static Expr indicator(Expr child, double lo, double hi);

  NodeKind kind() const;
  bool is_constant() const { return kind() == NodeKind::constant; }
  bool is_constant(double v) const;
  double value() const;                ///< constant nodes only
  const std::string& name() const;     ///< variable nodes only
  UnaryOp unary_op() const;
  BinaryOp binary_op() const;
  int exponent() const;                ///< pow nodes only
  double lo() const;                   ///< clamp / indicator
  double hi() const;                   ///< clamp / indicator
  Expr child(std::size_t i) const;
  std::size_t arity() const;

  const Node* id() const { return node_.get(); }

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Structural equality; constants compare with ==.
bool structurally_equal(const Expr& a, const Expr& b);

/// Rebuilds `e` bottom-up through the smart constructors.
Expr fold_constants(const Expr& e);

/// Number of distinct nodes reachable from `e` (shared subtrees count once).
std::size_t dag_size(const Expr& e);

/// Names of variables occurring in `e`, sorted.
std::vector<std::string> free_variables(const Expr& e);

/// Parses `text` against the grammar
///   expr := term (('+'|'-') term)* ; term := factor (('*'|'/') factor)* ;
///   factor := unary ('^' factor)? ; unary := '-' unary | atom ;
///   atom := number | ident | ident '(' args ')' | '(' expr ')'
/// Identifiers other than `allowed_vars`, the function names and `pi` are
/// rejected.
Expr parse(std::string_view text, const std::vector<std::string>& allowed_vars);

/// Prints a fully parenthesised form that `parse` maps back to the same tree.
std::string to_string(const Expr& e);

Expr differentiate(const Expr& e, const std::string& var);
Expr differentiate(const Expr& e, const std::string& var, int order);

using Bindings = std::map<std::string, double, std::less<>>;

/// Result of a point evaluation. Domain violations (log of a negative, a
/// division by zero) come back with `finite == false` instead of throwing.
struct Evaluation {
  double value = 0.0;
  bool finite = true;
};

/// Throws ExprError on an unbound variable.
Evaluation evaluate(const Expr& e, const Bindings& bindings);

/// Polynomial degree of `e` in each of `vars`; a negative entry means the
/// dependence is not polynomial. Used as a cheap sufficient test for
/// vanishing partial derivatives.
std::vector<int> polynomial_degrees(const Expr& e, const std::vector<std::string>& vars);

/// True when ∂^orders e is identically zero by a structural argument
/// (sums are split, each summand is tested against its degree bound). A
/// `false` answer does not prove the derivative is non-zero.
bool derivative_vanishes(const Expr& e, const std::vector<std::string>& vars,
                         std::span<const int> orders);

/// Flattened, variable-resolved form of an expression for repeated
/// evaluation. Shared subexpressions are evaluated once.
class Tape {
 public:
  Tape() = default;
  Tape(const Expr& e, std::vector<std::string> vars);

  const std::vector<std::string>& variables() const { return vars_; }
  std::size_t size() const { return code_.size(); }

  double eval(std::span<const double> point) const;

  /// ∂^orders at `point` by truncated multivariate Taylor arithmetic.
  /// `orders.size()` must equal the number of variables.
  double partial(std::span<const int> orders, std::span<const double> point) const;

  /// Derivatives of order 0..max_order in variable `slot`, the other
  /// variables held at `point`. Entry j is the j-th derivative.
  std::vector<double> derivatives(std::size_t slot, int max_order,
                                  std::span<const double> point) const;

  enum class Op {
    constant, variable, neg, exp, log, sin, cos, tan, tanh, sqrt,
    add, sub, mul, div, powi, clamp, indicator
  };
  struct Instr {
    Op op;
    int a = -1;  // operand registers
    int b = -1;
    int slot = -1;  // variable slot
    double c0 = 0.0;  // constant, integer exponent, or lower bound
    double c1 = 0.0;  // upper bound
  };
  const std::vector<Instr>& instructions() const { return code_; }

 private:
  std::vector<std::string> vars_;
  std::vector<Instr> code_;
};

}  // namespace codingtree
