#ifndef BLOCKCS_ORACLE_HPP
#define BLOCKCS_ORACLE_HPP

#include "blockcs/block_model.hpp"

#include <functional>

namespace blockcs {

/// Exhaustive block k-sparse decoding, for validating the solver on tiny instances.
struct OracleResult {
  BlockIndexSet support;
  BlockVector x_best;
  double residual;
};

/// Maximum number of supports either oracle will enumerate.
inline constexpr double kOracleEnumerationLimit = 1e5;

/// Least squares over every size-k block support; returns the smallest
/// residual (ties to the lexicographically first support).
/// Requires C(n, k) <= kOracleEnumerationLimit and k*d <= m.
OracleResult brute_force_decode(const Matrix& A, const Vector& y, const BlockPattern& pattern, Index k);

/// Among supports of size <= k that fit y exactly (residual <= 1e-8 ||y||),
/// returns the reconstruction minimizing sum_i w_i ||x[i]||^p.
/// Throws std::domain_error when no support fits exactly.
BlockVector oracle_weighted_objective_argmin(const Matrix& A, const Vector& y, const BlockPattern& pattern, Index k,
                                             const Vector& w, double p);

/// Calls visit() on every size-k subset of [0, n) in lexicographic order.
void for_each_combination(Index n, Index k, const std::function<void(const std::vector<Index>&)>& visit);

}  // namespace blockcs

#endif  // BLOCKCS_ORACLE_HPP
