#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "codingtree/expr.hpp"
#include "codingtree/mc.hpp"
#include "codingtree/rng.hpp"
#include "codingtree/tree.hpp"

namespace codingtree {

/// φ(x) = Φ(s) with s = Σ xᵢ (ridge) or Φ(q) with q = ‖x‖² (radial).
enum class PhiForm { ridge, radial };

std::string to_string(PhiForm f);
PhiForm parse_phi_form(const std::string& s);

/// ∂ₜu + μ Σ ∂ᵢu + ½σ² Δu + f(u) = 0, u(T, x) = φ(x), x ∈ ℝᵈ.
struct DDProblemSpec {
  Expr f;    // over z0
  Expr Phi;  // over s (ridge) or q (radial)
  PhiForm form = PhiForm::ridge;
  int d = 1;
  double mu = 0.0;
  double sigma = 1.0;
  double t0 = 0.0;
  double T = 1.0;
  double rho_rate = 1.0;
  std::size_t max_nodes = 10'000'000;
  std::size_t max_depth = 100'000;

  void validate() const;
};

DDProblemSpec make_dd_problem(const std::string& f, const std::string& Phi, PhiForm form, int d, double mu,
                              double sigma, double T, double t0 = 0.0, double rho_rate = 1.0);

/// Codes of the semilinear engine: Identity, FDeriv(k) = f^(k)(u) and
/// Grad(i) = ∂_{x_i} u (i is 0-based).
struct DDCode {
  enum class Kind : std::uint8_t { identity, fderiv, grad };
  Kind kind = Kind::identity;
  int index = 0;  // k for FDeriv, i for Grad

  static DDCode identity() { return {}; }
  static DDCode fderiv(int k) { return {Kind::fderiv, k}; }
  static DDCode grad(int i) { return {Kind::grad, i}; }

  friend bool operator==(const DDCode&, const DDCode&) = default;
};

std::string to_string(const DDCode& c);

/// One atom with its own selection probability; `weight / probability` is
/// the factor it contributes.
struct DDOutcome {
  double weight = 0.0;
  double probability = 0.0;
  std::vector<DDCode> children;

  double factor() const { return weight / probability; }
};

/// ℳ(c) in d dimensions. FDeriv(k) has the outcome (1, [f, f^(k+1)]) with
/// probability ½ and, for each coordinate i, (-½σ², [Grad(i), Grad(i),
/// f^(k+2)]) with probability 1/(2d).
std::vector<DDOutcome> dd_mechanism(const DDCode& c, int d, double sigma);

/// Index into dd_mechanism(c, ...) chosen from one uniform: below ½ the first
/// outcome, otherwise coordinate ⌊(U - ½)·2d⌋.
std::size_t dd_select(const DDCode& c, int d, double uniform);

/// Terminal values: Identity -> φ(x); Grad(i) -> Φ'(s) (ridge) or
/// 2xᵢΦ'(q) (radial); FDeriv(k) -> f^(k)(φ(x)).
class DDTerminal {
 public:
  DDTerminal() = default;
  explicit DDTerminal(const DDProblemSpec& spec);

  double value(const DDCode& c, std::span<const double> x) const;
  double phi(std::span<const double> x) const;
  double grad(int i, std::span<const double> x) const;

 private:
  PhiForm form_ = PhiForm::ridge;
  Tape f_;
  Tape Phi_;
  double argument(std::span<const double> x) const;
};

/// Per-thread sampler for the d-dimensional engine. Draw order per node:
/// lifetime, then d Gaussians in coordinate order, then one branch uniform.
class DDTreeSampler {
 public:
  explicit DDTreeSampler(DDProblemSpec spec);

  SampleOutcome sample(double t, std::span<const double> x, const DDCode& c, SampleRng& rng,
                       std::ostream* trace = nullptr);

 private:
  struct Frame {
    double t;
    std::size_t pos;  // offset into positions_
    DDCode code;
    std::size_t depth;
  };
  bool vanishes(int k);

  DDProblemSpec spec_;
  DDTerminal terminal_;
  std::vector<signed char> vanish_;  // -1 unknown
  std::vector<Frame> stack_;
  std::vector<double> positions_;
};

SampleOutcome dd_sample_H(const DDProblemSpec& spec, double t, std::span<const double> x, const DDCode& c,
                          SampleRng& rng);

struct DDEvalPoint {
  double t = 0.0;
  std::vector<double> x;
};

struct DDRunConfig {
  DDProblemSpec spec;
  DDCode code = DDCode::identity();
  std::vector<DDEvalPoint> eval_points;
  std::uint64_t samples = 100'000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  unsigned runs = 5;
  bool strict_failures = true;
};

std::vector<RunStatistics> dd_run_estimate(const DDRunConfig& config, std::uint64_t run = 0);
std::vector<std::vector<RunStatistics>> dd_run_repeated(const DDRunConfig& config);

/// Point with every coordinate equal to v/d, so that Σxᵢ = v.
std::vector<double> diagonal_point(double v, int d);

}  // namespace codingtree
