// Independent reference computations used only by the test suites.
#ifndef BLOCKCS_TEST_SUPPORT_HPP
#define BLOCKCS_TEST_SUPPORT_HPP

#include "blockcs/block_model.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace blockcs::testing {

/// Plain scalar loop, no Eigen reductions.
inline std::vector<double> scalar_block_norms(const BlockVector& x) {
  const auto& v = x.values();
  const Index d = x.pattern().block_len();
  std::vector<double> out;
  for (Index i = 0; i < x.pattern().num_blocks(); ++i) {
    double acc = 0.0;
    for (Index j = 0; j < d; ++j) acc += v(i * d + j) * v(i * d + j);
    out.push_back(std::sqrt(acc));
  }
  return out;
}

/// Literal N x N form of the IRLS update:
/// W^{-1} ( (A W^{-1})^T (A W^{-1}) + lambda I_N )^{-1} (A W^{-1})^T y.
inline Vector irls_step_direct(const Matrix& A, const Vector& y, const BlockPattern& pattern, const Vector& W,
                               double lambda) {
  const Index N = pattern.dim();
  Vector winv(N);
  for (Index i = 0; i < pattern.num_blocks(); ++i) winv.segment(i * pattern.block_len(), pattern.block_len()).setConstant(1.0 / W(i));
  const Matrix Winv = winv.asDiagonal();
  const Matrix B = A * Winv;
  const Matrix M = B.transpose() * B + lambda * Matrix::Identity(N, N);
  return Winv * M.fullPivLu().solve(B.transpose() * y);
}

/// Test-local generator, separate from the library Rng.
class TestRng {
public:
  explicit TestRng(std::uint64_t seed) : engine_(seed) {}
  double normal() { return normal_(engine_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  Matrix gaussian(Index rows, Index cols) {
    Matrix M(rows, cols);
    for (Index i = 0; i < rows; ++i)
      for (Index j = 0; j < cols; ++j) M(i, j) = normal();
    return M;
  }
  Vector gaussian(Index len) { return gaussian(len, 1).col(0); }

private:
  std::mt19937 engine_;
  std::normal_distribution<double> normal_;
};

inline double rel_err(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

}  // namespace blockcs::testing

#endif  // BLOCKCS_TEST_SUPPORT_HPP
