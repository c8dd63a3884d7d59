#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>
#include <thread>

#include "codingtree/expr.hpp"

using namespace codingtree;

namespace {

const std::vector<std::string> kZ1{"z0"};
const std::vector<std::string> kX{"x"};

double eval_at(const Expr& e, double x, const std::string& var = "x") {
  return evaluate(e, Bindings{{var, x}}).value;
}

double central_difference(const Expr& e, double x, double h) {
  return (eval_at(e, x + h) - eval_at(e, x - h)) / (2 * h);
}

// Random smooth expressions in x: polynomials, sin, cos, exp of bounded
// arguments, products and sums.
Expr random_smooth(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 7);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  const Expr x = Expr::variable("x");
  switch (pick(rng)) {
    case 0: return x;
    case 1: return Expr::constant(std::round(coef(rng) * 100) / 100);
    case 2: return random_smooth(rng, depth - 1) + random_smooth(rng, depth - 1);
    case 3: return random_smooth(rng, depth - 1) * random_smooth(rng, depth - 1);
    case 4: return Expr::unary(UnaryOp::sin, random_smooth(rng, depth - 1));
    case 5: return Expr::unary(UnaryOp::cos, random_smooth(rng, depth - 1));
    case 6: return Expr::power(random_smooth(rng, depth - 1), std::uniform_int_distribution<int>(2, 3)(rng));
    default: return Expr::unary(UnaryOp::exp, Expr::unary(UnaryOp::sin, random_smooth(rng, depth - 1)));
  }
}

// Arbitrary expressions over every node kind, for printing round trips.
Expr random_any(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 9);
  std::uniform_real_distribution<double> coef(-5.0, 5.0);
  static const char* vars[] = {"z0", "z1", "x"};
  switch (pick(rng)) {
    case 0: return Expr::variable(vars[std::uniform_int_distribution<int>(0, 2)(rng)]);
    case 1: return Expr::constant(coef(rng));
    case 2: return Expr::constant(std::uniform_int_distribution<int>(-3, 3)(rng));
    case 3: {
      const auto op = static_cast<UnaryOp>(std::uniform_int_distribution<int>(0, 7)(rng));
      return Expr::unary(op, random_any(rng, depth - 1));
    }
    case 4:
    case 5:
    case 6: {
      const auto op = static_cast<BinaryOp>(std::uniform_int_distribution<int>(0, 3)(rng));
      return Expr::binary(op, random_any(rng, depth - 1), random_any(rng, depth - 1));
    }
    case 7: return Expr::power(random_any(rng, depth - 1), std::uniform_int_distribution<int>(0, 4)(rng));
    case 8: {
      const double lo = coef(rng);
      return Expr::clamp(random_any(rng, depth - 1), lo, lo + std::fabs(coef(rng)));
    }
    default: {
      const double lo = coef(rng);
      return Expr::indicator(random_any(rng, depth - 1), lo, lo + 1.0);
    }
  }
}

// k-th derivative by the symmetric k-point stencil, Richardson-extrapolated,
// in long double.
long double stencil(const std::function<long double(long double)>& g, long double x, int k, long double h) {
  long double sum = 0, binom = 1;
  for (int i = 0; i <= k; ++i) {
    if (i > 0) binom = binom * (k - i + 1) / i;
    const long double sign = (i % 2) ? -1 : 1;
    sum += sign * binom * g(x + (k / 2.0L - i) * h);
  }
  return sum / std::pow(h, static_cast<long double>(k));
}

long double finite_derivative(const std::function<long double(long double)>& g, long double x, int k) {
  const long double h = 0.05L;
  const long double d1 = stencil(g, x, k, h), d2 = stencil(g, x, k, h / 2), d3 = stencil(g, x, k, h / 4);
  const long double r1 = (4 * d2 - d1) / 3, r2 = (4 * d3 - d2) / 3;
  return (16 * r2 - r1) / 15;
}

}  // namespace

TEST_CASE("parse builds the expected trees") {
  const Expr e = parse("z0 - z0^3", kZ1);
  REQUIRE(e.kind() == NodeKind::binary);
  CHECK(e.binary_op() == BinaryOp::sub);
  CHECK(e.child(0).name() == "z0");
  CHECK(e.child(1).binary_op() == BinaryOp::pow);
  CHECK(e.child(1).exponent() == 3);

  const Expr c = parse("cos(x)", kX);
  CHECK(c.kind() == NodeKind::unary);
  CHECK(c.unary_op() == UnaryOp::cos);
  CHECK(c.child(0).name() == "x");

  CHECK(parse("2*pi", kX).value() == doctest::Approx(2 * M_PI));
  CHECK(parse("1.5e-3", kX).value() == 1.5e-3);
}

TEST_CASE("parse reports errors with offsets") {
  try {
    parse("z0 +", kZ1);
    FAIL("expected a parse error");
  } catch (const ParseError& err) {
    CHECK(err.offset() == 4);
  }
  try {
    parse("z0 + y", kZ1);
    FAIL("expected a parse error");
  } catch (const ParseError& err) {
    CHECK(err.offset() == 5);
    CHECK(std::string(err.what()).find("unknown identifier") != std::string::npos);
  }
  CHECK_THROWS_AS(parse("sin(x, x)", kX), ParseError);
  CHECK_THROWS_AS(parse("clamp(x, 1)", kX), ParseError);
  CHECK_THROWS_AS(parse("clamp(x, x, 1)", kX), ParseError);
  CHECK_THROWS_AS(parse("foo(x)", kX), ParseError);
  CHECK_THROWS_AS(parse("(x", kX), ParseError);
  CHECK_THROWS_AS(parse("x)", kX), ParseError);
}

TEST_CASE("non-integer powers are rewritten through exp and log") {
  const Expr e = parse("x^(1/3)", kX);
  CHECK(e.kind() == NodeKind::unary);
  CHECK(e.unary_op() == UnaryOp::exp);
  CHECK(eval_at(e, 8.0) == doctest::Approx(2.0));
  CHECK(parse("x^2.0", kX).binary_op() == BinaryOp::pow);
  CHECK(parse("x^(-1)", kX).unary_op() == UnaryOp::exp);
}

TEST_CASE("unary minus binds tighter than power") {
  CHECK(eval_at(parse("-x^2", kX), 3.0) == 9.0);
  CHECK(eval_at(parse("-(x^2)", kX), 3.0) == -9.0);
  CHECK(eval_at(parse("2^3^2", kX), 0.0) == 512.0);
}

TEST_CASE("evaluate") {
  CHECK(evaluate(parse("z0 - z0^3", kZ1), {{"z0", 0.0}}).value == 0.0);
  const auto bad = evaluate(parse("log(z0)", kZ1), {{"z0", -1.0}});
  CHECK_FALSE(bad.finite);
  CHECK_FALSE(evaluate(parse("1/z0", kZ1), {{"z0", 0.0}}).finite);
  CHECK(evaluate(parse("clamp(z0, -4, 4)", kZ1), {{"z0", 7.0}}).value == 4.0);
  CHECK(evaluate(parse("clamp(z0, -4, 4)", kZ1), {{"z0", -7.0}}).value == -4.0);
  CHECK_THROWS_AS(evaluate(parse("z0", kZ1), {}), ExprError);
}

TEST_CASE("differentiate simple cases") {
  const Expr e = parse("exp(z0)", kZ1);
  CHECK(structurally_equal(differentiate(e, "z0"), e));
  const Expr p = parse("z0 - z0^3", kZ1);
  CHECK(structurally_equal(differentiate(p, "z0"), parse("1 - 3*z0^2", kZ1)));
  CHECK(differentiate(parse("3.5", kZ1), "z0").is_constant(0.0));
  CHECK(differentiate(parse("z0", kZ1), "z1").is_constant(0.0));
  // memoized: the same node comes back
  CHECK(differentiate(p, "z0").id() == differentiate(p, "z0").id());
}

TEST_CASE("clamp differentiates to an indicator") {
  const Expr e = parse("clamp(x^2, -1, 4)", kX);
  const Expr d = differentiate(e, "x");
  CHECK(eval_at(d, 1.0) == doctest::Approx(2.0));
  CHECK(eval_at(d, 3.0) == 0.0);
  CHECK(eval_at(d, 2.0) == 0.0);  // breakpoint
  CHECK(differentiate(d, "x", 3).kind() != NodeKind::clamp);
}

TEST_CASE("derivatives agree with central differences on random expressions") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pt(-1.5, 1.5);
  int checked = 0;
  while (checked < 20) {
    const Expr e = random_smooth(rng, 4);
    if (free_variables(e).empty()) continue;
    const Expr d = differentiate(e, "x");
    for (int i = 0; i < 5; ++i) {
      const double x = pt(rng);
      const double exact = eval_at(d, x);
      const double fd = central_difference(e, x, 1e-5);
      CHECK(std::fabs(exact - fd) <= 1e-6 * (1 + std::fabs(exact)));
    }
    ++checked;
  }
}

TEST_CASE("differentiation is linear") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> pt(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const Expr e1 = random_smooth(rng, 3), e2 = random_smooth(rng, 3);
    const double a = pt(rng) * 3;
    const Expr lhs = differentiate(Expr::constant(a) * e1 + e2, "x");
    const Expr rhs = Expr::constant(a) * differentiate(e1, "x") + differentiate(e2, "x");
    for (int i = 0; i < 100; ++i) {
      const double x = pt(rng);
      const double l = eval_at(lhs, x), r = eval_at(rhs, x);
      CHECK(std::fabs(l - r) <= 1e-10 * std::max(1.0, std::fabs(r)));
    }
  }
}

TEST_CASE("higher orders agree with iterated differences") {
  struct Case {
    const char* text;
    std::function<long double(long double)> g;
  };
  const std::vector<Case> cases{
      {"sin(x)*exp(x/3)", [](long double x) { return std::sin(x) * std::exp(x / 3); }},
      {"tanh(x/2)", [](long double x) { return std::tanh(x / 2); }},
      {"log(1+x^2)", [](long double x) { return std::log(1 + x * x); }},
      {"1/(2+x^2)", [](long double x) { return 1 / (2 + x * x); }},
      {"sqrt(3+x)", [](long double x) { return std::sqrt(3 + x); }},
      {"tan(x/4)", [](long double x) { return std::tan(x / 4); }},
  };
  for (const auto& c : cases) {
    const Expr e = parse(c.text, kX);
    for (int k = 1; k <= 6; ++k) {
      const Expr d = differentiate(e, "x", k);
      for (double x : {-0.7, 0.3, 1.1}) {
        const double exact = eval_at(d, x);
        const double fd = static_cast<double>(finite_derivative(c.g, x, k));
        INFO(std::string(c.text), " order ", k, " at ", x);
        CHECK(std::fabs(exact - fd) <= 1e-4 * std::max(1.0, std::fabs(exact)));
      }
    }
  }
}

TEST_CASE("printing round-trips through the parser") {
  std::mt19937_64 rng(3);
  const std::vector<std::string> vars{"z0", "z1", "x"};
  for (int i = 0; i < 500; ++i) {
    const Expr e = random_any(rng, 6);
    const std::string text = to_string(e);
    INFO(text);
    const Expr back = parse(text, vars);
    CHECK(structurally_equal(back, fold_constants(e)));
    CHECK(to_string(back) == text);
  }
}

TEST_CASE("degree analysis") {
  const std::vector<std::string> z{"z0", "z1", "z2", "z3"};
  const Expr dym = parse("z0^3*z3 - z2/2", z);
  CHECK(polynomial_degrees(dym, z) == std::vector<int>{3, 0, 1, 1});
  const int a[] = {0, 0, 0, 2};
  CHECK(derivative_vanishes(dym, z, a));
  const int b[] = {1, 0, 0, 1};
  CHECK_FALSE(derivative_vanishes(dym, z, b));
  const int c[] = {4, 0, 0, 0};
  CHECK(derivative_vanishes(dym, z, c));
  const int d[] = {0, 1, 0, 0};
  CHECK(derivative_vanishes(dym, z, d));
  const Expr cl = parse("log(z2^2+z3^2)", z);
  const int e[] = {0, 0, 5, 0};
  CHECK_FALSE(derivative_vanishes(cl, z, e));
  CHECK(derivative_vanishes(cl, z, d));
}

TEST_CASE("tape evaluation matches the tree evaluator") {
  const std::vector<std::string> z{"z0", "z1", "z2"};
  const Expr e = parse("z1*exp(-z0) + z2/(1+z0^2) - clamp(z2, -1, 1) + sqrt(2+z1^2)", z);
  const Tape tape(e, z);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> pt(-2, 2);
  for (int i = 0; i < 50; ++i) {
    const double p[] = {pt(rng), pt(rng), pt(rng)};
    const double ref = evaluate(e, {{"z0", p[0]}, {"z1", p[1]}, {"z2", p[2]}}).value;
    CHECK(tape.eval(p) == doctest::Approx(ref).epsilon(1e-14));
  }
}

TEST_CASE("taylor-mode partials match symbolic derivatives") {
  const std::vector<std::string> z{"z0", "z1", "z2", "z3"};
  const char* texts[] = {
      "z0 - z0^3",
      "z0^3*z3 - z2/2",
      "5*z1 - z2/2 + log(z2^2 + z3^2)",
      "10*z1 + z2/(1+z0^2) - 2*z0 - z2/2",
      "exp(-z0)*(1-2*exp(-z0))*3",
      "sin(z0*z1) + cos(z2)*tan(z3/3) + tanh(z0 - z2) + sqrt(4 + z1^2)",
      "z1^2*z0^(1/3) - clamp(z3, -1, 1)*z2",
  };
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> pt(0.2, 1.2);
  std::uniform_int_distribution<int> ord(0, 3);
  for (const char* text : texts) {
    const Expr e = parse(text, z);
    const Tape tape(e, z);
    for (int trial = 0; trial < 30; ++trial) {
      int orders[4];
      for (int& o : orders) o = ord(rng);
      const double p[] = {pt(rng), pt(rng), pt(rng), pt(rng) * 0.8};
      Expr d = e;
      for (int v = 0; v < 4; ++v) d = differentiate(d, z[v], orders[v]);
      const double ref = evaluate(d, {{"z0", p[0]}, {"z1", p[1]}, {"z2", p[2]}, {"z3", p[3]}}).value;
      const double got = tape.partial(orders, p);
      INFO(std::string(text), " orders ", orders[0], orders[1], orders[2], orders[3]);
      CHECK(got == doctest::Approx(ref).epsilon(1e-9).scale(1.0));
      CHECK(derivative_vanishes(e, z, orders) <= (ref == 0.0));
    }
  }
}

TEST_CASE("univariate jets give all orders at once") {
  const Expr e = parse("log((1+x^2)/2)", kX);
  const Tape tape(e, kX);
  const double p[] = {0.37};
  const auto ds = tape.derivatives(0, 6, p);
  REQUIRE(ds.size() == 7);
  for (int k = 0; k <= 6; ++k)
    CHECK(ds[k] == doctest::Approx(eval_at(differentiate(e, "x", k), p[0])).epsilon(1e-10));
}

TEST_CASE("differentiation memo is safe under concurrent use") {
  const Expr e = parse("sin(x)^4*exp(cos(x))/(2+x^2)", kX);
  std::vector<double> vals(4);
  std::vector<std::thread> threads;
  for (int i = 0; i < 4; ++i)
    threads.emplace_back([&, i] { vals[i] = eval_at(differentiate(e, "x", 5), 0.4); });
  for (auto& t : threads) t.join();
  for (int i = 1; i < 4; ++i) CHECK(vals[i] == vals[0]);
}
