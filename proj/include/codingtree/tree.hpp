#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "codingtree/codes.hpp"
#include "codingtree/expr.hpp"
#include "codingtree/rng.hpp"

namespace codingtree {

/// ∂ₜu + ½∂ₓ²u + f(u, ∂ₓu, ..., ∂ₓⁿu) = 0 on [t0, T), u(T, x) = φ(x).
/// f is an expression over z0..zn, φ over x. Lifetimes are exponential with
/// rate `rho_rate`.
struct ProblemSpec {
  Expr f;
  Expr phi;
  int n = 0;
  double t0 = 0.0;
  double T = 1.0;
  double rho_rate = 1.0;
  std::size_t max_nodes = 10'000'000;
  std::size_t max_depth = 100'000;

  /// Throws std::invalid_argument on inconsistent fields or free variables
  /// outside z0..zn / x.
  void validate() const;
};

/// Builds a spec from formula text.
ProblemSpec make_problem(const std::string& f, const std::string& phi, int n, double T, double t0 = 0.0,
                         double rho_rate = 1.0);

enum class SampleStatus { ok, node_budget, depth_limit, non_finite };

std::string to_string(SampleStatus s);

struct SampleOutcome {
  double value = 0.0;
  std::size_t nodes = 0;
  std::size_t max_depth = 0;
  SampleStatus status = SampleStatus::ok;

  bool failed() const { return status != SampleStatus::ok; }
};

/// Exponential variate with the given rate; one uniform.
double sample_lifetime(SampleRng& rng, double rho_rate);

/// Samples coding trees for one problem. Holds private caches (interned
/// codes, mechanism tables, compiled terminal evaluators), so each thread
/// should own its sampler.
///
/// Per node the draws are: lifetime, then the Gaussian increment, then (if
/// the node branches) the branch uniform; children follow depth-first, left
/// to right. ℋ is a product of per-node factors, so the tree is walked with
/// an explicit stack while the product accumulates. Codes whose
/// f-derivative vanishes identically contribute an exact zero, and a sample
/// stops as soon as its running product is exactly zero.
class TreeSampler {
 public:
  explicit TreeSampler(ProblemSpec spec);
  ~TreeSampler();
  TreeSampler(TreeSampler&&) noexcept;
  TreeSampler& operator=(TreeSampler&&) noexcept;

  const ProblemSpec& spec() const { return spec_; }

  /// One realisation of ℋ(𝒯_{t,x,c}). With `trace` set, every node is
  /// written as an indented line.
  SampleOutcome sample(double t, double x, const Code& c, SampleRng& rng, std::ostream* trace = nullptr);

 private:
  struct Cache;
  ProblemSpec spec_;
  std::unique_ptr<Cache> cache_;
};

/// Convenience form; builds a fresh sampler per call.
SampleOutcome sample_H(const ProblemSpec& spec, double t, double x, const Code& c, SampleRng& rng);

}  // namespace codingtree
