#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "codingtree/expr.hpp"
#include "codingtree/rng.hpp"

namespace codingtree {

/// Branch label. FDeriv(lambda) stands for (∂_{z0}^{λ0} ... ∂_{zn}^{λn} f)
/// composed with the jet (u, ∂ₓu, ..., ∂ₓⁿu); Deriv(k) for ∂ₓᵏu.
struct Code {
  enum class Kind : std::uint8_t { identity, deriv, fderiv };

  Kind kind = Kind::identity;
  int order = 0;            // Deriv only
  std::vector<int> lambda;  // FDeriv only

  static Code identity() { return {}; }
  static Code deriv(int k);
  static Code fderiv(std::vector<int> lambda);
  static Code f(int n) { return fderiv(std::vector<int>(static_cast<std::size_t>(n) + 1, 0)); }

  friend bool operator==(const Code&, const Code&) = default;
  friend auto operator<=>(const Code&, const Code&) = default;
};

struct CodeHash {
  std::size_t operator()(const Code& c) const;
};

/// "Id", "D3", "F[0,1,2]".
std::string to_string(const Code& c);

/// Inverse of to_string.
Code parse_code(const std::string& text);

struct BranchOutcome {
  double weight = 0.0;
  std::vector<Code> children;
};

struct MechanismTable {
  std::vector<BranchOutcome> outcomes;
  std::size_t atom_count = 0;
  double probability = 0.0;  // of each outcome
};

/// ℳ(c) for a nonlinearity in (z0, ..., zn). Memoized per (c, n); the
/// returned reference stays valid for the life of the process.
const MechanismTable& mechanism(const Code& c, int n);

/// Draws one outcome uniformly with a single uniform from `rng`.
std::pair<const BranchOutcome*, double> sample_branch(const Code& c, int n, SampleRng& rng);

/// Evaluates codes on the terminal condition: Identity -> φ(x),
/// Deriv(k) -> φ^(k)(x), FDeriv(λ) -> (∂^λ f)(φ(x), ..., φ^(n)(x)).
/// Reusable across calls and cheap to copy.
class TerminalEvaluator {
 public:
  TerminalEvaluator() = default;
  TerminalEvaluator(const Expr& f, const Expr& phi, int n);

  int n() const { return n_; }

  /// May return a non-finite value on a domain violation.
  double value(const Code& c, double x) const;
  double identity(double x) const;
  double deriv(int k, double x) const;
  double fderiv(std::span<const int> lambda, double x) const;

  /// Values of all requested codes at one point, sharing one jet of φ.
  void values(std::span<const Code* const> codes, double x, std::span<double> out) const;

 private:
  int n_ = 0;
  Tape f_;
  Tape phi_;
};

Evaluation terminal_value(const Code& c, double x, const Expr& phi, const Expr& f, int n);

enum class BoundsVerdict { holds, fails, inconclusive };

std::string to_string(BoundsVerdict v);

struct BoundsReport {
  BoundsVerdict verdict = BoundsVerdict::inconclusive;
  double min_probability = 0.0;  // min over the reachable codes of q_c
  double rho_T = 0.0;
  double tail_T = 0.0;
  int max_deriv_order = 0;       // largest Deriv order seen in the closure
};

/// Sufficient condition for |ℋ| <= 1 almost surely: with every code value on
/// φ bounded by K and every branch weight bounded by 1 in absolute value,
/// ρ(T) >= 1/min q and K <= F̄(T) give interior factors and leaf factors of
/// modulus at most one. Returns inconclusive when the Deriv orders reachable
/// from Identity exceed `order_cap`.
BoundsReport check_bounds_report(double K, double rho_rate, double T, int n, int order_cap);
BoundsVerdict check_bounds(double K, double rho_rate, double T, int n, int order_cap);

/// Debug rendering of ℳ(c): one atom per line, `weight<TAB>children`.
std::string mechanism_dump(const Code& c, int n);

}  // namespace codingtree
