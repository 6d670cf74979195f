#include "blockcs/solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace blockcs {

void SolverConfig::validate() const {
  check_exponent(p);
  if (!(lambda > 0.0)) throw std::invalid_argument("SolverConfig: lambda must be positive");
  if (!(gamma0 > 0.0)) throw std::invalid_argument("SolverConfig: gamma0 must be positive");
  if (!(gamma_decay > 0.0 && gamma_decay < 1.0)) throw std::invalid_argument("SolverConfig: gamma_decay must lie in (0, 1)");
  if (!(gamma_floor > 0.0)) throw std::invalid_argument("SolverConfig: gamma_floor must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("SolverConfig: tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("SolverConfig: max_iter must be >= 1");
  if (!(omega_min > 0.0 && omega_min <= 1.0)) throw std::invalid_argument("SolverConfig: omega_min must lie in (0, 1]");
}

MinNormSolution init_min_norm(const Matrix& A, const Vector& y) {
  if (A.rows() != y.size()) throw std::invalid_argument("init_min_norm: A rows must match y length");
  if (A.rows() > A.cols()) throw std::invalid_argument("init_min_norm: need m <= N");

  const Index m = A.rows();
  Matrix gram = Matrix::Zero(m, m);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(A);
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();

  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();

  MinNormSolution out;
  if (!(lo > 0.0) || hi / lo > 1e12) {
    out.ill_conditioned = true;
    gram.diagonal().array() += 1e-12 * std::max(hi, 1.0);
  }
  out.x = A.transpose() * gram.ldlt().solve(y);
  return out;
}

Vector irls_weights(const BlockVector& x, const Vector& w, double gamma, double p, double omega_min) {
  check_exponent(p);
  const Index n = x.pattern().num_blocks();
  if (w.size() != n) throw std::invalid_argument("irls_weights: weight length mismatch");
  if (!(gamma > 0.0)) throw std::invalid_argument("irls_weights: gamma must be positive");
  Vector W(n);
  for (Index i = 0; i < n; ++i) {
    // omega^(4/(p(p-2))) * ||omega^(1/p) x||^2 collapses to omega^(2/(p-2)) * ||x||^2.
    const double omega = std::max(w(i), omega_min);
    const double energy = std::pow(omega, 2.0 / (p - 2.0)) * x.block(i).squaredNorm();
    W(i) = std::pow(gamma + energy, p / 4.0 - 0.5);
  }
  return W;
}

Vector irls_step(const Matrix& A, const Vector& y, const BlockPattern& pattern, const Vector& W, double lambda) {
  const Index n = pattern.num_blocks();
  const Index d = pattern.block_len();
  if (A.cols() != pattern.dim() || A.rows() != y.size() || W.size() != n) {
    throw std::invalid_argument("irls_step: dimension mismatch");
  }
  if (!(W.array() > 0.0).all()) throw std::invalid_argument("irls_step: weights must be positive");

  Matrix B = A;
  for (Index i = 0; i < n; ++i) B.middleCols(i * d, d) /= W(i);

  Matrix G = Matrix::Zero(A.rows(), A.rows());
  G.selfadjointView<Eigen::Lower>().rankUpdate(B);
  G.diagonal().array() += lambda;
  Eigen::LDLT<Matrix> ldlt;
  ldlt.compute(G);  // reads the lower triangle only
  if (ldlt.info() != Eigen::Success) throw std::runtime_error("irls_step: factorization failed");

  Vector x = B.transpose() * ldlt.solve(y);
  for (Index i = 0; i < n; ++i) x.segment(i * d, d) /= W(i);
  if (!x.allFinite()) throw std::runtime_error("irls_step: non-finite update");
  return x;
}

RecoveryResult irls_recover(const Matrix& A, const Vector& y, const BlockPattern& pattern, const Vector& w,
                            const SolverConfig& cfg) {
  cfg.validate();
  if (A.cols() != pattern.dim() || A.rows() != y.size()) throw std::invalid_argument("irls_recover: dimension mismatch");
  if (w.size() != pattern.num_blocks()) throw std::invalid_argument("irls_recover: weight length mismatch");
  if ((w.array() < 0.0).any() || (w.array() > 1.0).any()) {
    throw std::invalid_argument("irls_recover: weights must lie in [0, 1]");
  }

  Vector x = init_min_norm(A, y).x;
  double gamma = cfg.gamma0;
  RecoveryResult result{BlockVector(pattern)};

  for (int t = 0; t < cfg.max_iter; ++t) {
    Vector next;
    try {
      const Vector W = irls_weights(BlockVector(pattern, x), w, gamma, cfg.p, cfg.omega_min);
      next = irls_step(A, y, pattern, W, cfg.lambda);
    } catch (const std::exception& e) {
      throw SolverError(std::string(e.what()) + " at iteration " + std::to_string(t + 1), t + 1, x);
    }
    result.final_step_norm = (next - x).norm();
    result.final_gamma = gamma;
    result.iterations = t + 1;
    x = std::move(next);
    gamma = std::max(cfg.gamma_decay * gamma, cfg.gamma_floor);
    if (result.final_step_norm <= cfg.tol) {
      result.converged = true;
      break;
    }
  }
  result.x_hat = BlockVector(pattern, std::move(x));
  return result;
}

}  // namespace blockcs
