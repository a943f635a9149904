#pragma once

// Brute-force reference implementations used by tests and the `verify`
// command. Deliberately shares nothing with the counter or the sampler
// beyond CnfFormula evaluation, so it can serve as an independent check.

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <span>
#include <vector>

#include "ccdd/formula.hpp"

namespace ccdd {

using BigInt = boost::multiprecision::cpp_int;

struct OracleLimit {
  unsigned max_vars = 24;
};

namespace detail {
inline std::vector<Var> checked_scope(const CnfFormula& phi, std::span<const Var> x,
                                      const OracleLimit& limit) {
  std::vector<Var> scope(x.begin(), x.end());
  std::sort(scope.begin(), scope.end());
  scope.erase(std::unique(scope.begin(), scope.end()), scope.end());
  if (scope.size() > limit.max_vars)
    throw ResourceLimitError("oracle limit exceeded: " + std::to_string(scope.size()) + " vars");
  for (Var v : phi.variables())
    if (!std::binary_search(scope.begin(), scope.end(), v))
      throw std::invalid_argument("oracle scope does not cover Vars(phi)");
  return scope;
}
}  // namespace detail

/// Exact model count of phi over X by enumerating all 2^|X| assignments.
inline BigInt brute_count(const CnfFormula& phi, std::span<const Var> x,
                          const OracleLimit& limit = {}) {
  std::vector<Var> scope = detail::checked_scope(phi, x, limit);
  size_t k = scope.size();
  BigInt count = 0;
  Assignment omega(phi.num_vars() == 0 ? (scope.empty() ? 0 : scope.back()) : phi.num_vars());
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
    // scope[0] is the most significant bit so masks ascend in the same
    // lexicographic order models are reported in elsewhere.
    for (size_t i = 0; i < k; ++i) omega.set(scope[i], (mask >> (k - 1 - i)) & 1);
    if (evaluate(phi, omega)) ++count;
  }
  return count;
}

inline BigInt brute_count(const CnfFormula& phi, const OracleLimit& limit = {}) {
  std::vector<Var> all(phi.num_vars());
  for (Var v = 1; v <= phi.num_vars(); ++v) all[v - 1] = v;
  return brute_count(phi, all, limit);
}

/// All models of phi over X, sorted lexicographically (ascending variable
/// order, false before true).
inline std::vector<Assignment> brute_models(const CnfFormula& phi, std::span<const Var> x,
                                            const OracleLimit& limit = {}) {
  std::vector<Var> scope = detail::checked_scope(phi, x, limit);
  size_t k = scope.size();
  std::vector<Assignment> models;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
    Assignment omega(phi.num_vars() == 0 ? (scope.empty() ? 0 : scope.back()) : phi.num_vars());
    for (size_t i = 0; i < k; ++i) omega.set(scope[i], (mask >> (k - 1 - i)) & 1);
    if (evaluate(phi, omega)) models.push_back(omega);
  }
  return models;
}

inline std::vector<Assignment> brute_models(const CnfFormula& phi, const OracleLimit& limit = {}) {
  std::vector<Var> all(phi.num_vars());
  for (Var v = 1; v <= phi.num_vars(); ++v) all[v - 1] = v;
  return brute_models(phi, all, limit);
}

struct ChiSquareResult {
  double statistic = 0.0;
  bool reject = false;  // at significance 0.001
};

/// Pearson goodness-of-fit against the uniform distribution over m
/// categories. Rejects iff the statistic exceeds the 0.999 quantile of the
/// chi-square distribution with m-1 degrees of freedom.
inline ChiSquareResult chi_square_uniform(std::span<const std::uint64_t> counts) {
  size_t m = counts.size();
  if (m < 2) throw std::invalid_argument("chi-square needs at least 2 categories");
  std::uint64_t total = 0;
  for (std::uint64_t c : counts) total += c;
  if (total < 10 * m) throw std::invalid_argument("chi-square needs at least 10 draws per category");
  double expected = static_cast<double>(total) / static_cast<double>(m);
  double stat = 0.0;
  for (std::uint64_t c : counts) {
    double d = static_cast<double>(c) - expected;
    stat += d * d / expected;
  }
  boost::math::chi_squared_distribution<double> dist(static_cast<double>(m - 1));
  double threshold = boost::math::quantile(dist, 0.999);
  return {stat, stat > threshold};
}

}  // namespace ccdd
