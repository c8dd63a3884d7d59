#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace codingtree {

using Rational = boost::multiprecision::cpp_rational;

/// Thrown when a combinatorial table would exceed its size cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One term of the multivariate Faà di Bruno expansion of
///   d^k/dx^k g(v, v', ..., v^(m-1))
/// = sum over terms of coefficient * (∂^lambda g) * prod_{j,q} (v^(q + parts[j]))^k_matrix[j][q].
struct FdbTerm {
  Rational coefficient;
  double weight = 0.0;                       // coefficient as a double
  std::vector<int> lambda;                   // length m, column sums of k_matrix
  std::vector<std::vector<int>> k_matrix;    // s rows of length m
  std::vector<int> parts;                    // strictly increasing, length s
  int s = 0;
};

/// All length-`parts` vectors of non-negative integers summing to `total`,
/// in lexicographic order.
std::vector<std::vector<int>> compositions(int total, int parts);

/// Terms of order `k` over `m` variables. Tables are built once and cached;
/// the reference stays valid for the life of the process. Terms are sorted
/// by |lambda|, then lambda, then s, parts and k_matrix (all lexicographic).
///
/// Throws ResourceError when a table would hold more than fdb_term_cap()
/// terms.
const std::vector<FdbTerm>& enumerate_fdb(int m, int k);

std::size_t fdb_term_cap();
void set_fdb_term_cap(std::size_t cap);

/// CSV rendering: header `coefficient,lambda,k_matrix,parts,s`, then one row
/// per term. Vectors are space separated, matrix rows joined with ';', and
/// the coefficient is written num/den.
std::string fdb_csv(int m, int k);

}  // namespace codingtree
