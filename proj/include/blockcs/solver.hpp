#ifndef BLOCKCS_SOLVER_HPP
#define BLOCKCS_SOLVER_HPP

#include "blockcs/block_model.hpp"

#include <stdexcept>
#include <string>

namespace blockcs {

/// IRLS hyperparameters. Defaults match the standard experiment setup
/// except lambda, which the caller picks (1e-6 noise free, 1e-2 noisy).
struct SolverConfig {
  double p = 0.5;
  double lambda = 1e-6;
  double gamma0 = 1.0;
  double gamma_decay = 0.1;
  double gamma_floor = 1e-12;  // gamma_decay^t underflows long before max_iter
  double tol = 1e-5;
  int max_iter = 2500;
  double omega_min = 1e-6;  // weights below this are clamped; omega^(2/(p-2)) diverges at 0

  void validate() const;
};

struct RecoveryResult {
  BlockVector x_hat;
  int iterations = 0;
  bool converged = false;
  double final_gamma = 0.0;
  double final_step_norm = 0.0;
};

/// Raised when a linear solve inside the iteration produces non-finite values.
class SolverError : public std::runtime_error {
public:
  SolverError(const std::string& what, int iteration, Vector last_iterate)
      : std::runtime_error(what), iteration_(iteration), last_(std::move(last_iterate)) {}

  int iteration() const { return iteration_; }
  const Vector& last_iterate() const { return last_; }

private:
  int iteration_;
  Vector last_;
};

struct MinNormSolution {
  Vector x;
  /// Gram condition estimate exceeded 1e12; x came from the ridge-stabilized system.
  bool ill_conditioned = false;
};

/// Minimum-norm least-squares solution x = A^T (A A^T)^{-1} y.
MinNormSolution init_min_norm(const Matrix& A, const Vector& y);

/// Per-block IRLS weights W_i = (gamma + omega_i^(2/(p-2)) ||x[i]||^2)^(p/4 - 1/2),
/// with omega_i clamped below at omega_min.
Vector irls_weights(const BlockVector& x, const Vector& w, double gamma, double p, double omega_min);

/// x = W^{-1} B^T (B B^T + lambda I)^{-1} y with B = A W^{-1}, W block-diagonal
/// with W_i repeated over block i.
Vector irls_step(const Matrix& A, const Vector& y, const BlockPattern& pattern, const Vector& W, double lambda);

/// Weighted mixed l2/lp recovery by iteratively reweighted least squares.
/// w holds one weight per block in [0, 1].
RecoveryResult irls_recover(const Matrix& A, const Vector& y, const BlockPattern& pattern, const Vector& w,
                            const SolverConfig& cfg);

}  // namespace blockcs

#endif  // BLOCKCS_SOLVER_HPP
