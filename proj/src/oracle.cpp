#include "blockcs/oracle.hpp"

#include <Eigen/QR>

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace blockcs {

namespace {

double binomial(Index n, Index k) {
  double c = 1.0;
  for (Index i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  return c;
}

struct SupportFit {
  Vector x;
  double residual;
};

SupportFit fit_support(const Matrix& A, const Vector& y, const BlockPattern& pattern, const std::vector<Index>& blocks) {
  const Index d = pattern.block_len();
  Vector x = Vector::Zero(pattern.dim());
  if (blocks.empty()) return {std::move(x), y.norm()};
  Matrix sub(A.rows(), static_cast<Index>(blocks.size()) * d);
  for (std::size_t j = 0; j < blocks.size(); ++j) sub.middleCols(static_cast<Index>(j) * d, d) = A.middleCols(blocks[j] * d, d);
  const Vector coef = sub.colPivHouseholderQr().solve(y);
  for (std::size_t j = 0; j < blocks.size(); ++j) x.segment(blocks[j] * d, d) = coef.segment(static_cast<Index>(j) * d, d);
  const double residual = (y - sub * coef).norm();
  return {std::move(x), residual};
}

void check_instance(const Matrix& A, const Vector& y, const BlockPattern& pattern, Index k, double enumerated) {
  if (A.cols() != pattern.dim() || A.rows() != y.size()) throw std::invalid_argument("oracle: dimension mismatch");
  if (k < 0 || k > pattern.num_blocks()) throw std::invalid_argument("oracle: need 0 <= k <= n");
  if (k * pattern.block_len() > A.rows()) throw std::invalid_argument("oracle: need k*d <= m");
  if (enumerated > kOracleEnumerationLimit) throw std::invalid_argument("oracle: too many supports to enumerate");
}

}  // namespace

void for_each_combination(Index n, Index k, const std::function<void(const std::vector<Index>&)>& visit) {
  if (k < 0 || k > n) return;
  std::vector<Index> comb(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) comb[static_cast<std::size_t>(i)] = i;
  while (true) {
    visit(comb);
    Index i = k - 1;
    while (i >= 0 && comb[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++comb[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < k; ++j) comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
  }
}

OracleResult brute_force_decode(const Matrix& A, const Vector& y, const BlockPattern& pattern, Index k) {
  check_instance(A, y, pattern, k, binomial(pattern.num_blocks(), k));

  std::optional<OracleResult> best;
  for_each_combination(pattern.num_blocks(), k, [&](const std::vector<Index>& blocks) {
    SupportFit fit = fit_support(A, y, pattern, blocks);
    if (!best || fit.residual < best->residual) {
      best = OracleResult{BlockIndexSet(pattern, blocks), BlockVector(pattern, std::move(fit.x)), fit.residual};
    }
  });
  return *best;
}

BlockVector oracle_weighted_objective_argmin(const Matrix& A, const Vector& y, const BlockPattern& pattern, Index k,
                                             const Vector& w, double p) {
  double total = 0.0;
  for (Index j = 0; j <= k; ++j) total += binomial(pattern.num_blocks(), j);
  check_instance(A, y, pattern, k, total);
  if (w.size() != pattern.num_blocks()) throw std::invalid_argument("oracle: weight length mismatch");

  const double fit_tol = 1e-8 * y.norm();
  std::optional<BlockVector> best;
  double best_objective = std::numeric_limits<double>::infinity();
  for (Index size = 0; size <= k; ++size) {
    for_each_combination(pattern.num_blocks(), size, [&](const std::vector<Index>& blocks) {
      SupportFit fit = fit_support(A, y, pattern, blocks);
      if (fit.residual > fit_tol) return;
      BlockVector candidate(pattern, std::move(fit.x));
      const double objective = weighted_objective(candidate, w, p);
      if (objective < best_objective) {
        best_objective = objective;
        best = std::move(candidate);
      }
    });
  }
  if (!best) throw std::domain_error("oracle: no support of size <= k fits y exactly");
  return *best;
}

}  // namespace blockcs
