#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "codingtree/mc.hpp"
#include "codingtree/tree.hpp"

using namespace codingtree;

namespace {

constexpr const char* kAcF = "z0 - z0^3";
constexpr const char* kAcPhi = "-0.5 - 0.5*tanh(-x/2)";

double ac_exact(double t, double x, double T) { return -0.5 - 0.5 * std::tanh(0.75 * (T - t) - x / 2); }

RunStatistics estimate(const ProblemSpec& spec, double t, double x, const Code& c, std::uint64_t samples,
                       std::uint64_t seed = 7) {
  RunConfig cfg;
  cfg.spec = spec;
  cfg.code = c;
  cfg.eval_points = {{t, x}};
  cfg.samples = samples;
  cfg.seed = seed;
  cfg.threads = default_threads();
  return run_estimate(cfg).front();
}

}  // namespace

TEST_CASE("make_problem validates variables and horizon") {
  CHECK_THROWS_AS(make_problem("z2", "x", 1, 1.0), ParseError);
  ProblemSpec direct;
  direct.f = parse("z2", {"z0", "z1", "z2"});
  direct.n = 1;
  CHECK_THROWS_AS(direct.validate(), std::invalid_argument);
  CHECK_THROWS_AS(make_problem("z0", "y", 0, 1.0), ParseError);
  CHECK_THROWS_AS(make_problem("z0", "x", 0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_problem("z0", "x", 0, 1.0, 0.0, -1.0), std::invalid_argument);
  CHECK_NOTHROW(make_problem("z0*z1", "x", 1, 1.0));
}

TEST_CASE("a sample is a pure function of its rng stream") {
  const auto spec = make_problem(kAcF, kAcPhi, 0, 0.3);
  TreeSampler a(spec), b(spec);
  for (std::uint64_t i = 0; i < 200; ++i) {
    SampleRng r1(3, 0, 0, i), r2(3, 0, 0, i);
    const auto o1 = a.sample(0.0, 0.1, Code::identity(), r1);
    const auto o2 = b.sample(0.0, 0.1, Code::identity(), r2);
    CHECK(o1.value == o2.value);
    CHECK(o1.nodes == o2.nodes);
    CHECK(r1.draws() == r2.draws());
  }
  // Interleaving other work on the same sampler does not change a sample.
  SampleRng r1(3, 0, 0, 5), r2(3, 0, 0, 5), other(9, 9, 9, 9);
  const double before = a.sample(0.0, 0.1, Code::identity(), r1).value;
  a.sample(0.1, -2.0, Code::deriv(2), other);
  CHECK(a.sample(0.0, 0.1, Code::identity(), r2).value == before);
}

TEST_CASE("trace output is deterministic and lists every node") {
  const auto spec = make_problem(kAcF, kAcPhi, 0, 2.0);
  TreeSampler s(spec);
  for (std::uint64_t i = 0; i < 20; ++i) {
    std::ostringstream t1, t2;
    SampleRng r1(1, 0, 0, i), r2(1, 0, 0, i);
    const auto o = s.sample(0.0, 0.0, Code::identity(), r1, &t1);
    s.sample(0.0, 0.0, Code::identity(), r2, &t2);
    CHECK(t1.str() == t2.str());
    const std::string text = t1.str();
    const auto lines = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
    CHECK(lines == o.nodes);
  }
}

TEST_CASE("at t = T the sample is the terminal value") {
  const auto spec = make_problem(kAcF, kAcPhi, 2, 0.3);
  TreeSampler s(spec);
  SampleRng rng(1, 0, 0, 0);
  const auto o = s.sample(0.3, 0.7, Code::identity(), rng);
  CHECK(o.value == doctest::Approx(ac_exact(0.3, 0.7, 0.3)).epsilon(1e-15));
  CHECK(o.nodes == 1);
  CHECK(rng.draws() == 0);
  const auto d1 = s.sample(0.3, 0.7, Code::deriv(1), rng);
  CHECK(d1.value == doctest::Approx(0.25 / std::pow(std::cosh(-0.35), 2)).epsilon(1e-12));
}

TEST_CASE("f = 0 and phi = 1 gives values in {0, e^(T-t)} with mean 1") {
  const auto spec = make_problem("0", "1", 0, 0.7);
  TreeSampler s(spec);
  const double top = std::exp(0.7 - 0.2);
  for (std::uint64_t i = 0; i < 2000; ++i) {
    SampleRng rng(5, 0, 0, i);
    const double v = s.sample(0.2, 0.0, Code::identity(), rng).value;
    CHECK((v == 0.0 || v == doctest::Approx(top).epsilon(1e-14)));
  }
  const auto st = estimate(spec, 0.2, 0.0, Code::identity(), 100'000);
  CHECK(std::fabs(st.mean - 1.0) <= 3 * st.standard_error());
}

TEST_CASE("constant source f = 1 with phi = 0 integrates to T - t") {
  const auto spec = make_problem("1", "0", 0, 0.5);
  const auto st = estimate(spec, 0.3, 1.0, Code::identity(), 100'000);
  CHECK(std::fabs(st.mean - 0.2) <= 3 * st.standard_error());
}

TEST_CASE("lifetimes are exponential with the configured rate") {
  for (double theta : {0.5, 1.0, 4.0}) {
    std::vector<double> v;
    for (std::uint64_t i = 0; i < 20'000; ++i) {
      SampleRng rng(11, 0, 0, i);
      v.push_back(sample_lifetime(rng, theta));
    }
    std::sort(v.begin(), v.end());
    double ks = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double cdf = 1.0 - std::exp(-theta * v[i]);
      const double n = static_cast<double>(v.size());
      ks = std::max({ks, std::fabs(cdf - static_cast<double>(i) / n), std::fabs(cdf - static_cast<double>(i + 1) / n)});
      sum += v[i];
    }
    CHECK(ks < 1.63 / std::sqrt(static_cast<double>(v.size())));  // 1% critical value
    CHECK(sum / static_cast<double>(v.size()) == doctest::Approx(1.0 / theta).epsilon(0.03));
  }
}

TEST_CASE("linear problems reproduce heat-kernel expectations") {
  // E[cos(x + W_s)] = cos(x) e^{-s/2}, E[(x + W_s)^2] = x^2 + s.
  const double T = 0.8, t = 0.1, x = 0.4, s = T - t;
  const auto c = estimate(make_problem("0", "cos(x)", 0, T), t, x, Code::identity(), 100'000);
  CHECK(std::fabs(c.mean - std::cos(x) * std::exp(-s / 2)) <= 3 * c.standard_error());
  const auto q = estimate(make_problem("0", "x^2", 0, T), t, x, Code::identity(), 100'000);
  CHECK(std::fabs(q.mean - (x * x + s)) <= 3 * q.standard_error());
  // f = -z0 damps the heat solution by e^{-s}.
  const auto l = estimate(make_problem("-z0", "cos(x)", 0, T), t, x, Code::identity(), 100'000);
  CHECK(std::fabs(l.mean - std::cos(x) * std::exp(-s / 2) * std::exp(-s)) <= 3 * l.standard_error());
}

TEST_CASE("Allen-Cahn derivative codes agree with differences of the exact solution") {
  const double T = 0.3, h = 1e-4;
  const auto spec = make_problem(kAcF, kAcPhi, 0, T);
  for (double x : {-1.0, 0.0, 0.8}) {
    const auto d1 = estimate(spec, 0.0, x, Code::deriv(1), 100'000);
    const double fd1 = (ac_exact(0, x + h, T) - ac_exact(0, x - h, T)) / (2 * h);
    CHECK(std::fabs(d1.mean - fd1) <= 3 * d1.standard_error() + 1e-6);
    const auto d2 = estimate(spec, 0.0, x, Code::deriv(2), 100'000);
    const double fd2 = (ac_exact(0, x + h, T) - 2 * ac_exact(0, x, T) + ac_exact(0, x - h, T)) / (h * h);
    CHECK(std::fabs(d2.mean - fd2) <= 3 * d2.standard_error() + 1e-5);
  }
}

TEST_CASE("the estimate is bounded by one when check_bounds holds") {
  // |∂^k f| <= 0.25 and |∂^k phi| <= 0.5, so K = 0.5 bounds every code value.
  REQUIRE(check_bounds(0.5, 3.0, 0.1, 0, 8) == BoundsVerdict::holds);
  const auto spec = make_problem("0.25*sin(z0)", "0.5*cos(x)", 0, 0.1, 0.0, 3.0);
  TreeSampler s(spec);
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 50'000; ++i) {
    SampleRng rng(2, 0, 0, i);
    const auto o = s.sample(0.0, 0.3, i % 2 ? Code::identity() : Code::deriv(1), rng);
    REQUIRE_FALSE(o.failed());
    worst = std::max(worst, std::fabs(o.value));
  }
  CHECK(worst <= 1.0);
}

TEST_CASE("node budget failures are reported, not silently dropped") {
  auto spec = make_problem(kAcF, kAcPhi, 0, 5.0, 0.0, 4.0);
  spec.max_nodes = 3;
  TreeSampler s(spec);
  std::size_t failures = 0;
  for (std::uint64_t i = 0; i < 200; ++i) {
    SampleRng rng(1, 0, 0, i);
    const auto o = s.sample(0.0, 0.0, Code::identity(), rng);
    if (o.failed()) {
      ++failures;
      CHECK(o.status == SampleStatus::node_budget);
      CHECK(std::isnan(o.value));
    }
  }
  CHECK(failures > 0);
}

TEST_CASE("Allen-Cahn at T = 0.3 runs without failed samples") {
  const auto spec = make_problem(kAcF, kAcPhi, 0, 0.3);
  const auto st = estimate(spec, 0.0, 0.0, Code::identity(), 100'000);
  CHECK(st.failed == 0);
  CHECK(st.count == 100'000);
}
