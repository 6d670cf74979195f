#ifndef BLOCKCS_CONDITIONS_HPP
#define BLOCKCS_CONDITIONS_HPP

#include "blockcs/block_model.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace blockcs {

/// Parameters of the block p-RIP recovery condition.
///
/// a      integer block-count multiplier, a > 1 and a >= (1 - alpha) * rho
/// rho    |support estimate| / k
/// alpha  |support estimate ∩ true support| / |support estimate|
/// omega  weight applied on the support estimate
/// p      exponent of the mixed l2/lp norm
struct ConditionParams {
  int a = 3;
  double rho = 1.0;
  double alpha = 0.5;
  double omega = 1.0;
  double p = 1.0;

  /// Throws std::invalid_argument when any range constraint fails.
  void validate() const;
};

/// gamma = omega + (1 - omega) (1 + rho - 2 alpha rho)^(1 - p/2).
double gamma_factor(const ConditionParams& params);

/// Largest delta for which delta_(a+1)k < delta guarantees recovery:
/// (a^(1-p/2) - gamma) / (a^(1-p/2) + gamma).
double delta_threshold(const ConditionParams& params);

/// delta_ak + (a^(1-p/2)/gamma) delta_(a+1)k < a^(1-p/2)/gamma - 1.
/// Both inputs must lie in [0, 1).
bool rip_sufficient_check(double delta_ak, double delta_a1k, const ConditionParams& params);

struct RecoveryConstants {
  double c1;
  double c2;
};

/// Constants of the robust error bound. Throws std::domain_error when
/// (1 - delta_(a+1)k) - a^(p/2-1) (1 + delta_ak) gamma <= 0.
RecoveryConstants recovery_constants(double delta_ak, double delta_a1k, const ConditionParams& params, Index m);

/// Size of the symmetric difference of V and U.
std::size_t set_distance(const BlockIndexSet& V, const BlockIndexSet& U);

struct SupportRatios {
  double rho;
  double alpha;
};

/// rho = |T̃|/k, alpha = |T̃ ∩ T0| / |T̃| (0 for empty T̃).
SupportRatios derive_rho_alpha(const BlockIndexSet& T0, const BlockIndexSet& Ttil, Index k);

/// Sampled lower bound on the block p-restricted isometry constant.
struct RicEstimate {
  Index k = 0;
  double p = 1.0;
  double lower_bound = 0.0;
  Index samples = 0;
  std::uint64_t seed = 0;
  /// Unit-norm block k-sparse vector attaining lower_bound.
  std::optional<BlockVector> witness;
};

/// Deviation | ||Ax||_p^p - ||x||_2^p | of a block vector x, normalized by ||x||_2^p.
double isometry_deviation(const Matrix& A, const BlockVector& x, double p);

/// Estimates delta_k from below: a deterministic pass over the canonical
/// unit vectors (when C(n, k) <= 1e4) followed by `samples` random block
/// k-sparse unit vectors. The result is a lower bound, never the exact value.
RicEstimate ric_estimate(const Matrix& A, const BlockPattern& pattern, Index k, double p, Index samples,
                         std::uint64_t seed);

/// omega ||h_T||^p + (1-omega) ||h_S||^p - C ||h_{T^c}||^p; positive means the
/// weighted block NSP inequality fails for this (h, T, S).
double nsp_excess(const BlockVector& h, const BlockIndexSet& T, const BlockIndexSet& S, double omega, double p,
                  double C);

struct NspReport {
  Index k = 0;
  Index s = 0;
  double omega = 1.0;
  double p = 1.0;
  double C = 1.0;
  bool violated = false;
  std::optional<BlockVector> witness;
  /// ||A h||_2 of the witness (unit-norm h).
  double witness_residual = 0.0;
  Index samples = 0;
  std::uint64_t seed = 0;

  /// Human-readable verdict. A clean run is reported as evidence, not proof.
  std::string summary() const;
};

/// Searches the null space of A for a vector h that violates the weighted
/// block p-NSP with parameters (k, s, C). For each candidate h the worst-case
/// sets T = top-k blocks and S = top-s blocks are tested.
///
/// Null space: singular vectors whose singular values are at most
/// rank_tol * sigma_max. Throws std::domain_error when it is trivial.
NspReport nsp_falsify(const Matrix& A, const BlockPattern& pattern, Index k, Index s, double omega, double p,
                      double C, Index samples, std::uint64_t seed, double rank_tol = 1e-10);

/// Orthonormal basis (columns) of the numerical null space of A.
Matrix null_space_basis(const Matrix& A, double rank_tol = 1e-10);

}  // namespace blockcs

#endif  // BLOCKCS_CONDITIONS_HPP
