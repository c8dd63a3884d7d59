#include "codingtree/mc.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

namespace codingtree {

void RunStatistics::add(double value, std::uint64_t nodes) {
  ++count;
  const double delta = value - mean;
  mean += delta / static_cast<double>(count);
  m2 += delta * (value - mean);
  min = std::min(min, value);
  max = std::max(max, value);
  total_nodes += nodes;
}

double RunStatistics::variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }

double RunStatistics::standard_error() const {
  return count > 0 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
}

RunStatistics merge(const RunStatistics& a, const RunStatistics& b) {
  if (a.count == 0) {
    RunStatistics r = b;
    r.failed += a.failed;
    r.total_nodes += a.total_nodes;
    return r;
  }
  if (b.count == 0) {
    RunStatistics r = a;
    r.failed += b.failed;
    r.total_nodes += b.total_nodes;
    return r;
  }
  RunStatistics r;
  r.count = a.count + b.count;
  r.failed = a.failed + b.failed;
  const double na = static_cast<double>(a.count), nb = static_cast<double>(b.count);
  const double n = static_cast<double>(r.count);
  const double delta = b.mean - a.mean;
  r.mean = a.mean + delta * (nb / n);
  r.m2 = a.m2 + b.m2 + delta * delta * (na * nb / n);
  r.min = std::min(a.min, b.min);
  r.max = std::max(a.max, b.max);
  r.total_nodes = a.total_nodes + b.total_nodes;
  return r;
}

namespace {

RunStatistics pairwise(std::vector<RunStatistics> level) {
  if (level.empty()) return {};
  while (level.size() > 1) {
    std::vector<RunStatistics> next;
    next.reserve((level.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) next.push_back(merge(level[i], level[i + 1]));
    if (level.size() % 2) next.push_back(level.back());
    level = std::move(next);
  }
  return level.front();
}

struct Failure {
  std::size_t point = 0;
  std::uint64_t sample = 0;
  SampleOutcome outcome;
};

}  // namespace

std::vector<RunStatistics> run_samples(const SamplingPlan& plan, const std::function<SampleFn()>& make_worker) {
  if (plan.samples < 1) throw std::invalid_argument("samples must be >= 1");
  if (plan.points < 1) throw std::invalid_argument("at least one evaluation point is required");
  if (plan.samples > 0xFFFF'FFFFull * kChunkSize) throw std::invalid_argument("too many samples");
  const std::uint64_t chunks_per_point = (plan.samples + kChunkSize - 1) / kChunkSize;
  const std::uint64_t total_chunks = chunks_per_point * plan.points;
  std::vector<RunStatistics> chunk_stats(total_chunks);

  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> abort{false};
  std::mutex failure_mutex;
  std::vector<Failure> failures;
  std::exception_ptr error;

  auto worker = [&] {
    try {
      SampleFn fn = make_worker();
      for (;;) {
        if (abort.load(std::memory_order_relaxed)) return;
        const std::uint64_t job = next.fetch_add(1);
        if (job >= total_chunks) return;
        const std::size_t point = static_cast<std::size_t>(job / chunks_per_point);
        const std::uint64_t first = (job % chunks_per_point) * kChunkSize;
        const std::uint64_t last = std::min(first + kChunkSize, plan.samples);
        RunStatistics s;
        for (std::uint64_t i = first; i < last; ++i) {
          SampleRng rng(plan.seed, plan.run, point, i);
          const SampleOutcome o = fn(point, rng);
          if (o.failed()) {
            ++s.failed;
            s.total_nodes += o.nodes;
            if (plan.strict_failures) {
              std::lock_guard lock(failure_mutex);
              failures.push_back({point, i, o});
              abort = true;
              return;
            }
            continue;
          }
          s.add(o.value, o.nodes);
        }
        chunk_stats[job] = s;
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!error) error = std::current_exception();
      abort = true;
    }
  };

  const unsigned threads = std::max(1u, plan.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  if (!failures.empty()) {
    const auto& f = *std::min_element(failures.begin(), failures.end(), [](const Failure& a, const Failure& b) {
      return std::tie(a.point, a.sample) < std::tie(b.point, b.sample);
    });
    std::ostringstream os;
    os << "sample " << f.sample << " of point " << f.point << " (seed " << plan.seed << ", run " << plan.run
       << ") failed: " << to_string(f.outcome.status) << " after " << f.outcome.nodes
       << " nodes; rerun with a larger node budget or without strict failure handling";
    throw SampleFailure(os.str());
  }

  std::vector<RunStatistics> out;
  out.reserve(plan.points);
  for (std::size_t p = 0; p < plan.points; ++p) {
    const auto begin = chunk_stats.begin() + static_cast<std::ptrdiff_t>(p * chunks_per_point);
    out.push_back(pairwise({begin, begin + static_cast<std::ptrdiff_t>(chunks_per_point)}));
  }
  return out;
}

std::vector<RunStatistics> run_estimate(const RunConfig& config, std::uint64_t run) {
  config.spec.validate();
  SamplingPlan plan;
  plan.points = config.eval_points.size();
  plan.samples = config.samples;
  plan.seed = config.seed;
  plan.run = run;
  plan.threads = config.threads;
  plan.strict_failures = config.strict_failures;
  for (const auto& p : config.eval_points)
    if (p.t < config.spec.t0 || p.t > config.spec.T) throw std::invalid_argument("evaluation time outside [t0, T]");
  return run_samples(plan, [&config]() -> SampleFn {
    auto sampler = std::make_shared<TreeSampler>(config.spec);
    return [sampler, &config](std::size_t point, SampleRng& rng) {
      const auto& p = config.eval_points[point];
      return sampler->sample(p.t, p.x, config.code, rng);
    };
  });
}

std::vector<std::vector<RunStatistics>> run_repeated(const RunConfig& config) {
  if (config.runs < 1) throw std::invalid_argument("runs must be >= 1");
  std::vector<std::vector<RunStatistics>> out;
  for (unsigned r = 0; r < config.runs; ++r) out.push_back(run_estimate(config, r));
  return out;
}

ErrorReport error_report(const std::vector<double>& estimates, double exact) {
  if (estimates.empty()) throw std::invalid_argument("error_report needs at least one estimate");
  ErrorReport r;
  r.relative = exact != 0.0;
  const double scale = r.relative ? std::fabs(exact) : 1.0;
  const double k = static_cast<double>(estimates.size());
  double sum = 0.0, err_sum = 0.0;
  for (double e : estimates) {
    sum += e;
    err_sum += std::fabs(e - exact) / scale;
  }
  r.mean = sum / k;
  r.mean_rel_l1 = err_sum / k;
  if (estimates.size() > 1) {
    double ss = 0.0, es = 0.0;
    for (double e : estimates) {
      ss += (e - r.mean) * (e - r.mean);
      const double err = std::fabs(e - exact) / scale;
      es += (err - r.mean_rel_l1) * (err - r.mean_rel_l1);
    }
    r.sd = std::sqrt(ss / (k - 1));
    r.sd_rel_l1 = std::sqrt(es / (k - 1));
  }
  return r;
}

unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

}  // namespace codingtree
