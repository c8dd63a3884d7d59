#include <doctest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "codingtree/codes.hpp"
#include "codingtree/fdb.hpp"

using namespace codingtree;

namespace {

std::vector<std::string> zvars(int n) {
  std::vector<std::string> z;
  for (int q = 0; q <= n; ++q) z.push_back("z" + std::to_string(q));
  return z;
}

Expr substitute(const Expr& e, const std::map<std::string, Expr>& sub) {
  switch (e.kind()) {
    case NodeKind::constant: return e;
    case NodeKind::variable: {
      auto it = sub.find(e.name());
      return it == sub.end() ? e : it->second;
    }
    case NodeKind::unary: return Expr::unary(e.unary_op(), substitute(e.child(0), sub));
    case NodeKind::binary:
      if (e.binary_op() == BinaryOp::pow) return Expr::power(substitute(e.child(0), sub), e.exponent());
      return Expr::binary(e.binary_op(), substitute(e.child(0), sub), substitute(e.child(1), sub));
    case NodeKind::clamp: return Expr::clamp(substitute(e.child(0), sub), e.lo(), e.hi());
    case NodeKind::indicator: return Expr::indicator(substitute(e.child(0), sub), e.lo(), e.hi());
  }
  return e;
}

Expr partial(Expr e, const std::vector<std::string>& z, const std::vector<int>& lambda) {
  for (std::size_t q = 0; q < lambda.size(); ++q) e = differentiate(e, z[q], lambda[q]);
  return e;
}

// Value of a code on a known function u(t, x): FDeriv via the symbolic
// partial of f on the jet of u, Deriv as the x-derivative of u.
double code_on(const Code& c, const Expr& f, const Expr& u, int n, const Bindings& at) {
  const auto z = zvars(n);
  switch (c.kind) {
    case Code::Kind::identity: return evaluate(u, at).value;
    case Code::Kind::deriv: return evaluate(differentiate(u, "x", c.order), at).value;
    case Code::Kind::fderiv: {
      Bindings zb;
      for (int q = 0; q <= n; ++q) zb[z[q]] = evaluate(differentiate(u, "x", q), at).value;
      return evaluate(partial(f, z, c.lambda), zb).value;
    }
  }
  return 0;
}

double outcome_sum(const Code& c, const Expr& f, const Expr& u, int n, const Bindings& at) {
  double total = 0;
  for (const auto& o : mechanism(c, n).outcomes) {
    double prod = o.weight;
    for (const auto& child : o.children) prod *= code_on(child, f, u, n, at);
    total += prod;
  }
  return total;
}

}  // namespace

TEST_CASE("code printing round trip") {
  for (const Code& c : {Code::identity(), Code::deriv(3), Code::fderiv({0, 2, 1})}) {
    CHECK(parse_code(to_string(c)) == c);
  }
  CHECK(to_string(Code::fderiv({0, 2, 1})) == "F[0,2,1]");
  CHECK_THROWS(parse_code("D"));
  CHECK_THROWS(parse_code("F[1,x]"));
  CHECK_THROWS(Code::deriv(0));
}

TEST_CASE("identity mechanism") {
  const auto& m = mechanism(Code::identity(), 2);
  REQUIRE(m.atom_count == 1);
  CHECK(m.outcomes[0].weight == 1.0);
  CHECK(m.outcomes[0].children == std::vector<Code>{Code::fderiv({0, 0, 0})});
}

TEST_CASE("semilinear mechanism") {
  for (int k = 0; k < 4; ++k) {
    const auto& m = mechanism(Code::fderiv({k}), 0);
    REQUIRE(m.atom_count == 2);
    CHECK(m.probability == 0.5);
    CHECK(m.outcomes[0].weight == 1.0);
    CHECK(m.outcomes[0].children == std::vector<Code>{Code::fderiv({0}), Code::fderiv({k + 1})});
    CHECK(m.outcomes[1].weight == -0.5);
    CHECK(m.outcomes[1].children == std::vector<Code>{Code::deriv(1), Code::deriv(1), Code::fderiv({k + 2})});
  }
  const auto& d = mechanism(Code::deriv(1), 0);
  REQUIRE(d.atom_count == 1);
  CHECK(d.outcomes[0].children == std::vector<Code>{Code::fderiv({1}), Code::deriv(1)});
}

TEST_CASE("atom counts") {
  for (int n = 0; n <= 4; ++n) {
    std::size_t expected = 1 + (n + 1) * (n + 1);
    for (int k = 1; k <= n; ++k) expected += enumerate_fdb(n + 1, k).size();
    CHECK(mechanism(Code::f(n), n).atom_count == expected);
    for (int k = 1; k <= 4; ++k) CHECK(mechanism(Code::deriv(k), n).atom_count == enumerate_fdb(n + 1, k).size());
  }
  CHECK(mechanism(Code::f(1), 1).atom_count == 7);
  CHECK(mechanism(Code::fderiv({1, 0}), 1).atom_count == 7);
  CHECK(mechanism(Code::f(2), 2).atom_count == 22);
}

TEST_CASE("mechanism structural properties") {
  for (int n = 0; n <= 3; ++n) {
    std::vector<Code> codes{Code::identity(), Code::f(n)};
    std::vector<int> lam(static_cast<std::size_t>(n) + 1, 0);
    lam[0] = 1;
    lam[static_cast<std::size_t>(n)] += 2;
    codes.push_back(Code::fderiv(lam));
    for (int k = 1; k <= 4; ++k) codes.push_back(Code::deriv(k));
    for (const auto& c : codes) {
      const auto& m = mechanism(c, n);
      CHECK(m.probability * static_cast<double>(m.atom_count) == doctest::Approx(1.0));
      for (const auto& o : m.outcomes) {
        CHECK(o.weight != 0.0);
        // In ℳ(FDeriv(λ)) each atom has one child λ' >= λ with |λ'| <= |λ| + 2;
        // the Faà di Bruno family adds a child τ.λ with |τ.λ| <= n.
        bool has_shift = false;
        for (const auto& child : o.children) {
          if (c.kind == Code::Kind::deriv && child.kind == Code::Kind::deriv) CHECK(child.order <= n + c.order);
          if (c.kind == Code::Kind::fderiv && child.kind == Code::Kind::fderiv) {
            const int a = std::accumulate(c.lambda.begin(), c.lambda.end(), 0);
            const int b = std::accumulate(child.lambda.begin(), child.lambda.end(), 0);
            CHECK(b <= std::max(a + 2, n));
            bool dominates = true;
            for (std::size_t q = 0; q < c.lambda.size(); ++q) dominates = dominates && child.lambda[q] >= c.lambda[q];
            if (dominates && b > a && b <= a + 2) has_shift = true;
          }
        }
        if (c.kind == Code::Kind::fderiv) CHECK(has_shift);
      }
    }
  }
  CHECK(&mechanism(Code::f(2), 2) == &mechanism(Code::f(2), 2));
}

TEST_CASE("Deriv mechanisms reproduce x-derivatives of f along a function") {
  const Expr x = Expr::variable("x");
  const char* fs[] = {"z0 - z0^3", "z0*z1 + z1^2/2 - z0^2*z1", "z2*z0^2 - z1*z2 + 3*z0*z1^2 + z2^2"};
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pt(-1.0, 1.0);
  for (int n = 0; n <= 2; ++n) {
    const auto z = zvars(n);
    const Expr f = parse(fs[n], z);
    const Expr u = parse("0.3 + x - 0.4*x^2 + 0.2*x^3 - 0.05*x^5 + 0.1*x^6", {"x"});
    std::map<std::string, Expr> sub;
    for (int q = 0; q <= n; ++q) sub[z[q]] = differentiate(u, "x", q);
    const Expr composite = substitute(f, sub);
    for (int k = 1; k <= 4; ++k) {
      const Expr target = differentiate(composite, "x", k);
      for (int i = 0; i < 10; ++i) {
        const Bindings at{{"x", pt(rng)}};
        const double ref = evaluate(target, at).value;
        const double got = outcome_sum(Code::deriv(k), f, u, n, at);
        INFO("n=", n, " k=", k);
        CHECK(std::fabs(got - ref) <= 1e-8 * std::max(1.0, std::fabs(ref)));
      }
    }
  }
}

TEST_CASE("FDeriv mechanisms close the equation along exact solutions") {
  // For a solution u of ∂ₜu + ½∂ₓ²u + f(jet u) = 0 and g = ∂^λ f composed with
  // the jet, (∂ₜ + ½∂ₓ²) g + Σ weight·∏ children = 0.
  struct Case {
    int n;
    const char* f;
    const char* u;
  };
  const Case cases[] = {
      {0, "z0 - z0^3", "-0.5 - 0.5*tanh(0.75*(0.3 - t) - x/2)"},
      {2, "10*z1 + z2/(1+z0^2) - 2*z0 - z2/2", "tan(x + 10*(0.01 - t))"},
      {1, "z1^2 - 2*z1 + z1*z0 - z0", "x + t + 1"},
      {4, "-z2/2 + 10*z1 + z0 - z2^2/144 + cos(pi*z4/24)",
       "(x + 10*(0.04-t))^4 + (x + 10*(0.04-t))^3 + 0.375*(x + 10*(0.04-t))^2 + 0.0625*(x + 10*(0.04-t)) + 257/256"},
      {3, "5*z1 - z2/2 + log(z2^2 + z3^2)", "cos(x + 5*(0.02 - t))"},
  };
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> pt(-0.4, 0.4);
  for (const auto& c : cases) {
    const auto z = zvars(c.n);
    const Expr f = parse(c.f, z);
    const Expr u = parse(c.u, {"t", "x"});
    std::map<std::string, Expr> sub;
    for (int q = 0; q <= c.n; ++q) sub[z[q]] = differentiate(u, "x", q);
    // the solution really solves the equation
    const Expr residual = differentiate(u, "t") + Expr::constant(0.5) * differentiate(u, "x", 2) + substitute(f, sub);
    std::vector<std::vector<int>> lambdas{std::vector<int>(static_cast<std::size_t>(c.n) + 1, 0)};
    lambdas.push_back(lambdas[0]);
    lambdas.back()[0] = 1;
    lambdas.push_back(lambdas[0]);
    lambdas.back()[static_cast<std::size_t>(c.n)] = 1;
    for (const auto& lam : lambdas) {
      const Expr g = substitute(partial(f, z, lam), sub);
      const Expr lhs = differentiate(g, "t") + Expr::constant(0.5) * differentiate(g, "x", 2);
      for (int i = 0; i < 8; ++i) {
        const Bindings at{{"t", 0.004 + pt(rng) * 0.01}, {"x", pt(rng)}};
        CHECK(std::fabs(evaluate(residual, at).value) < 1e-10);
        const double l = evaluate(lhs, at).value;
        const double r = outcome_sum(Code::fderiv(lam), f, u, c.n, at);
        INFO(std::string(c.f), " ", to_string(Code::fderiv(lam)));
        CHECK(std::fabs(l + r) <= 1e-8 * std::max(1.0, std::fabs(l)));
      }
    }
    // Identity: (∂ₜ + ½∂ₓ²) u + f = 0 is the residual above; Deriv(1) follows by differentiation.
    const Expr ux = differentiate(u, "x");
    const Expr lhs1 = differentiate(ux, "t") + Expr::constant(0.5) * differentiate(ux, "x", 2);
    const Bindings at{{"t", 0.001}, {"x", 0.13}};
    CHECK(evaluate(lhs1, at).value + outcome_sum(Code::deriv(1), f, u, c.n, at) ==
          doctest::Approx(0.0).scale(1.0).epsilon(1e-8));
  }
}

TEST_CASE("sample_branch draws uniformly with one uniform") {
  SampleRng rng(1, 0, 0, 0);
  auto [o, p] = sample_branch(Code::identity(), 0, rng);
  CHECK(p == 1.0);
  CHECK(o == &mechanism(Code::identity(), 0).outcomes[0]);
  CHECK(rng.draws() == 1);

  const auto& m = mechanism(Code::f(0), 0);
  std::vector<int> hits(2, 0);
  for (int i = 0; i < 100000; ++i) {
    auto [oc, pr] = sample_branch(Code::f(0), 0, rng);
    CHECK(pr == 0.5);
    ++hits[static_cast<std::size_t>(oc - m.outcomes.data())];
  }
  CHECK(std::fabs(hits[0] / 1e5 - 0.5) < 0.01);
  CHECK(std::fabs(hits[1] / 1e5 - 0.5) < 0.01);
  CHECK(rng.draws() == 100001);

  CHECK(sample_branch(Code::deriv(1), 1, rng).second == 0.5);
}

TEST_CASE("terminal values") {
  const Expr cosx = parse("cos(x)", {"x"});
  const Expr f0 = parse("z0 - z0^3", {"z0"});
  CHECK(terminal_value(Code::identity(), 0.0, cosx, f0, 0).value == 1.0);
  CHECK(terminal_value(Code::deriv(1), 0.0, cosx, f0, 0).value == 0.0);
  CHECK(terminal_value(Code::deriv(2), 0.0, cosx, f0, 0).value == doctest::Approx(-1.0));
  CHECK(terminal_value(Code::fderiv({0}), 2.0, parse("x", {"x"}), f0, 0).value == -6.0);
  CHECK(terminal_value(Code::fderiv({1}), 2.0, parse("x", {"x"}), f0, 0).value == doctest::Approx(-11.0));
  const auto bad = terminal_value(Code::fderiv({0}), -1.0, parse("x", {"x"}), parse("log(z0)", {"z0"}), 0);
  CHECK_FALSE(bad.finite);

  // shared-jet batch evaluation agrees with single evaluations
  const Expr f2 = parse("z0*z2 - z1^2 + sin(z1)", {"z0", "z1", "z2"});
  const TerminalEvaluator ev(f2, cosx, 2);
  const Code a = Code::deriv(5), b = Code::fderiv({1, 1, 0}), c = Code::identity();
  const Code* codes[] = {&a, &b, &c};
  double out[3];
  ev.values(codes, 0.4, out);
  CHECK(out[0] == doctest::Approx(-std::sin(0.4)));
  CHECK(out[1] == doctest::Approx(ev.value(b, 0.4)));
  CHECK(out[2] == doctest::Approx(std::cos(0.4)));
}

TEST_CASE("check_bounds") {
  CHECK(check_bounds(0.5, 3.0, 0.1, 0, 10) == BoundsVerdict::holds);
  CHECK(check_bounds(0.5, 1.0, 0.1, 0, 10) == BoundsVerdict::fails);
  CHECK(check_bounds(0.9, 3.0, 0.1, 0, 10) == BoundsVerdict::fails);
  const auto r = check_bounds_report(0.5, 3.0, 0.1, 2, 3);
  CHECK(r.verdict == BoundsVerdict::inconclusive);
  CHECK(r.max_deriv_order >= 4);
  CHECK(check_bounds_report(0.5, 3.0, 0.1, 0, 10).min_probability == 0.5);
}
