#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "codingtree/codes.hpp"
#include "codingtree/rng.hpp"
#include "codingtree/tree.hpp"

namespace codingtree {

/// Streaming count / mean / second moment with exact pairwise merging.
struct RunStatistics {
  std::uint64_t count = 0;
  std::uint64_t failed = 0;
  double mean = 0.0;
  double m2 = 0.0;
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
  std::uint64_t total_nodes = 0;

  void add(double value, std::uint64_t nodes = 0);
  double variance() const;  // m2 / (count - 1); 0 below two samples
  double standard_error() const;
};

/// Chan et al. parallel combination; `merge({}, s) == s`.
RunStatistics merge(const RunStatistics& a, const RunStatistics& b);

/// Raised when a sample fails under strict failure handling.
class SampleFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Function evaluating one sample of one evaluation point.
using SampleFn = std::function<SampleOutcome(std::size_t point, SampleRng& rng)>;

struct SamplingPlan {
  std::size_t points = 1;
  std::uint64_t samples = 1;
  std::uint64_t seed = 0;
  std::uint64_t run = 0;
  unsigned threads = 1;
  bool strict_failures = true;
};

/// Samples are grouped in fixed chunks of `kChunkSize` consecutive indices;
/// each chunk is accumulated sequentially and chunks are merged pairwise in a
/// fixed tree order, so every reported number is independent of the thread
/// count. `make_worker` is called once per thread. Sample i of point p uses
/// SampleRng(seed, run, p, i).
std::vector<RunStatistics> run_samples(const SamplingPlan& plan, const std::function<SampleFn()>& make_worker);

inline constexpr std::uint64_t kChunkSize = 1024;

struct EvalPoint {
  double t = 0.0;
  double x = 0.0;
};

struct RunConfig {
  ProblemSpec spec;
  Code code = Code::identity();
  std::vector<EvalPoint> eval_points{EvalPoint{}};
  std::uint64_t samples = 100'000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  unsigned runs = 5;
  bool strict_failures = true;
};

/// Per-point statistics of one run (repetition index `run`).
std::vector<RunStatistics> run_estimate(const RunConfig& config, std::uint64_t run = 0);

/// config.runs independent repetitions; result[r][p].
std::vector<std::vector<RunStatistics>> run_repeated(const RunConfig& config);

struct ErrorReport {
  double mean = 0.0;          // mean of the estimates across runs
  double sd = 0.0;            // sample standard deviation across runs
  double mean_rel_l1 = 0.0;   // mean of |est - exact| / |exact|
  double sd_rel_l1 = 0.0;
  bool relative = true;       // false when exact == 0 and absolute errors are reported
};

/// Requires at least one estimate; SDs need two.
ErrorReport error_report(const std::vector<double>& estimates, double exact);

/// Hardware threads, at least 1.
unsigned default_threads();

}  // namespace codingtree
