#include "codingtree/fdb.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>

namespace codingtree {

namespace {

std::atomic<std::size_t> g_term_cap{1'000'000};

void compositions_into(int total, int parts, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == parts - 1) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int v = 0; v <= total; ++v) {
    cur.push_back(v);
    compositions_into(total - v, parts, cur, out);
    cur.pop_back();
  }
}

// Partitions of k as (part, multiplicity) pairs with strictly increasing parts.
void partitions_into(int remaining, int min_part, std::vector<std::pair<int, int>>& cur,
                     std::vector<std::vector<std::pair<int, int>>>& out) {
  if (remaining == 0) {
    out.push_back(cur);
    return;
  }
  for (int l = min_part; l <= remaining; ++l) {
    for (int mult = 1; mult * l <= remaining; ++mult) {
      cur.emplace_back(l, mult);
      partitions_into(remaining - mult * l, l + 1, cur, out);
      cur.pop_back();
    }
  }
}

boost::multiprecision::cpp_int factorial(int n) {
  boost::multiprecision::cpp_int r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

std::vector<FdbTerm> build_table(int m, int k) {
  std::vector<std::vector<std::pair<int, int>>> partitions;
  std::vector<std::pair<int, int>> cur;
  partitions_into(k, 1, cur, partitions);

  const std::size_t cap = g_term_cap.load();
  const boost::multiprecision::cpp_int k_fact = factorial(k);
  std::vector<FdbTerm> out;
  for (const auto& partition : partitions) {
    const int s = static_cast<int>(partition.size());
    std::vector<std::vector<std::vector<int>>> row_choices;
    for (const auto& [l, mult] : partition) row_choices.push_back(compositions(mult, m));

    // Odometer over the row choices.
    std::vector<std::size_t> idx(static_cast<std::size_t>(s), 0);
    for (;;) {
      FdbTerm t;
      t.s = s;
      t.lambda.assign(static_cast<std::size_t>(m), 0);
      boost::multiprecision::cpp_int denom = 1;
      for (int j = 0; j < s; ++j) {
        const auto& row = row_choices[j][idx[j]];
        const int l = partition[j].first;
        t.parts.push_back(l);
        t.k_matrix.push_back(row);
        const auto l_fact = factorial(l);
        for (int q = 0; q < m; ++q) {
          t.lambda[q] += row[q];
          denom *= factorial(row[q]);
          for (int r = 0; r < row[q]; ++r) denom *= l_fact;
        }
      }
      t.coefficient = Rational(k_fact, denom);
      t.weight = t.coefficient.convert_to<double>();
      out.push_back(std::move(t));
      if (out.size() > cap)
        throw ResourceError("Faa di Bruno table (m=" + std::to_string(m) + ", k=" + std::to_string(k) +
                            ") exceeds the cap of " + std::to_string(cap) + " terms");

      int j = s - 1;
      while (j >= 0 && ++idx[j] == row_choices[j].size()) {
        idx[j] = 0;
        --j;
      }
      if (j < 0) break;
    }
  }

  std::sort(out.begin(), out.end(), [&](const FdbTerm& a, const FdbTerm& b) {
    const int sa = std::accumulate(a.lambda.begin(), a.lambda.end(), 0);
    const int sb = std::accumulate(b.lambda.begin(), b.lambda.end(), 0);
    if (sa != sb) return sa < sb;
    return std::tie(a.lambda, a.s, a.parts, a.k_matrix) < std::tie(b.lambda, b.s, b.parts, b.k_matrix);
  });
  return out;
}

struct FdbMemo {
  std::mutex mutex;
  std::map<std::pair<int, int>, std::unique_ptr<const std::vector<FdbTerm>>> tables;
};

FdbMemo& memo() {
  static FdbMemo m;
  return m;
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(v[i]);
  }
  return s;
}

}  // namespace

std::vector<std::vector<int>> compositions(int total, int parts) {
  if (parts < 1) throw std::invalid_argument("compositions requires parts >= 1");
  if (total < 0) return {};
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  compositions_into(total, parts, cur, out);
  return out;
}

const std::vector<FdbTerm>& enumerate_fdb(int m, int k) {
  if (m < 1 || k < 1) throw std::invalid_argument("enumerate_fdb requires m >= 1 and k >= 1");
  auto& mm = memo();
  std::lock_guard lock(mm.mutex);
  auto& slot = mm.tables[{m, k}];
  if (!slot) {
    try {
      slot = std::make_unique<const std::vector<FdbTerm>>(build_table(m, k));
    } catch (...) {
      mm.tables.erase({m, k});
      throw;
    }
  }
  return *slot;
}

std::size_t fdb_term_cap() { return g_term_cap.load(); }
void set_fdb_term_cap(std::size_t cap) { g_term_cap.store(cap); }

std::string fdb_csv(int m, int k) {
  std::ostringstream os;
  os << "coefficient,lambda,k_matrix,parts,s\n";
  for (const auto& t : enumerate_fdb(m, k)) {
    os << numerator(t.coefficient) << '/' << denominator(t.coefficient) << ',' << join(t.lambda) << ',';
    for (std::size_t j = 0; j < t.k_matrix.size(); ++j) {
      if (j) os << ';';
      os << join(t.k_matrix[j]);
    }
    os << ',' << join(t.parts) << ',' << t.s << '\n';
  }
  return os.str();
}

}  // namespace codingtree
