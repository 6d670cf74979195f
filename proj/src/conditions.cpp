#include "blockcs/conditions.hpp"

#include "blockcs/random.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace blockcs {

namespace {

double binomial_capped(Index n, Index k, double cap) {
  double c = 1.0;
  for (Index i = 1; i <= k; ++i) {
    c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
    if (c > cap) return c;
  }
  return c;
}

void check_ric_value(double delta, const char* name) {
  if (!(delta >= 0.0 && delta < 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie in [0, 1)");
  }
}

}  // namespace

void ConditionParams::validate() const {
  if (a <= 1) throw std::invalid_argument("ConditionParams: a must exceed 1");
  if (!(rho >= 0.0) || !std::isfinite(rho)) throw std::invalid_argument("ConditionParams: rho must be >= 0");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("ConditionParams: alpha must lie in [0, 1]");
  if (!(omega >= 0.0 && omega <= 1.0)) throw std::invalid_argument("ConditionParams: omega must lie in [0, 1]");
  check_exponent(p);
  if (static_cast<double>(a) < (1.0 - alpha) * rho) {
    throw std::invalid_argument("ConditionParams: need a >= (1 - alpha) * rho");
  }
  // The overlap alpha rho k cannot exceed k.
  if (alpha * rho > 1.0 + 1e-12) throw std::invalid_argument("ConditionParams: need alpha * rho <= 1");
}

double gamma_factor(const ConditionParams& params) {
  params.validate();
  const double base = 1.0 + params.rho - 2.0 * params.alpha * params.rho;
  return params.omega + (1.0 - params.omega) * std::pow(base, 1.0 - params.p / 2.0);
}

double delta_threshold(const ConditionParams& params) {
  const double gamma = gamma_factor(params);
  const double scale = std::pow(static_cast<double>(params.a), 1.0 - params.p / 2.0);
  return (scale - gamma) / (scale + gamma);
}

bool rip_sufficient_check(double delta_ak, double delta_a1k, const ConditionParams& params) {
  check_ric_value(delta_ak, "delta_ak");
  check_ric_value(delta_a1k, "delta_(a+1)k");
  const double ratio = std::pow(static_cast<double>(params.a), 1.0 - params.p / 2.0) / gamma_factor(params);
  return delta_ak + ratio * delta_a1k < ratio - 1.0;
}

RecoveryConstants recovery_constants(double delta_ak, double delta_a1k, const ConditionParams& params, Index m) {
  check_ric_value(delta_ak, "delta_ak");
  check_ric_value(delta_a1k, "delta_(a+1)k");
  if (m < 1) throw std::invalid_argument("recovery_constants: m must be positive");
  const double gamma = gamma_factor(params);
  const double p = params.p;
  const double a = static_cast<double>(params.a);
  const double denom = (1.0 - delta_a1k) - std::pow(a, p / 2.0 - 1.0) * (1.0 + delta_ak) * gamma;
  if (!(denom > 0.0)) {
    throw std::domain_error("recovery_constants: RIP condition fails (non-positive denominator)");
  }
  const double root = std::pow(denom, 1.0 / p);
  const double a_pow = std::pow(a, 0.5 - 1.0 / p);
  RecoveryConstants out{};
  out.c1 = std::pow(2.0, 2.0 / p - 1.0) * a_pow *
           (std::pow(1.0 + delta_ak, 1.0 / p) + std::pow(1.0 - delta_a1k, 1.0 / p)) / root;
  out.c2 = std::pow(2.0, 1.0 / p) * std::pow(static_cast<double>(m), 1.0 / p - 0.5) *
           (1.0 + a_pow * std::pow(gamma, 1.0 / p)) / root;
  return out;
}

std::size_t set_distance(const BlockIndexSet& V, const BlockIndexSet& U) {
  if (!(V.pattern() == U.pattern())) throw std::invalid_argument("set_distance: pattern mismatch");
  const std::size_t common = V.intersection_size(U);
  return (V.size() - common) + (U.size() - common);
}

SupportRatios derive_rho_alpha(const BlockIndexSet& T0, const BlockIndexSet& Ttil, Index k) {
  if (k <= 0) throw std::invalid_argument("derive_rho_alpha: k must be positive");
  const double est = static_cast<double>(Ttil.size());
  SupportRatios r{};
  r.rho = est / static_cast<double>(k);
  r.alpha = Ttil.empty() ? 0.0 : static_cast<double>(Ttil.intersection_size(T0)) / est;
  return r;
}

double isometry_deviation(const Matrix& A, const BlockVector& x, double p) {
  check_exponent(p);
  const double xn = std::pow(x.values().norm(), p);
  if (xn == 0.0) throw std::invalid_argument("isometry_deviation: zero vector");
  const double ax = (A * x.values()).array().abs().pow(p).sum();
  return std::abs(ax / xn - 1.0);
}

RicEstimate ric_estimate(const Matrix& A, const BlockPattern& pattern, Index k, double p, Index samples,
                         std::uint64_t seed) {
  check_exponent(p);
  const Index n = pattern.num_blocks();
  const Index d = pattern.block_len();
  if (A.cols() != pattern.dim()) throw std::invalid_argument("ric_estimate: column count must equal n*d");
  if (k < 1 || k > n) throw std::invalid_argument("ric_estimate: need 1 <= k <= n");
  if (samples < 1) throw std::invalid_argument("ric_estimate: samples must be >= 1");

  RicEstimate est;
  est.k = k;
  est.p = p;
  est.samples = samples;
  est.seed = seed;
  est.lower_bound = -1.0;

  auto consider = [&](const Vector& values) {
    BlockVector x(pattern, values);
    const double dev = isometry_deviation(A, x, p);
    if (dev > est.lower_bound) {
      est.lower_bound = dev;
      est.witness = std::move(x);
    }
  };

  if (binomial_capped(n, k, 1e4) <= 1e4) {
    for (Index j = 0; j < pattern.dim(); ++j) consider(Vector::Unit(pattern.dim(), j));
  }

  Rng rng(seed);
  for (Index t = 0; t < samples; ++t) {
    const auto support = rng.sample_without_replacement(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(k));
    Vector values = Vector::Zero(pattern.dim());
    for (auto blk : support) {
      for (Index j = 0; j < d; ++j) values(static_cast<Index>(blk) * d + j) = rng.gaussian();
    }
    const double norm = values.norm();
    if (norm == 0.0) continue;
    consider(values / norm);
  }
  return est;
}

double nsp_excess(const BlockVector& h, const BlockIndexSet& T, const BlockIndexSet& S, double omega, double p,
                  double C) {
  check_exponent(p);
  const Vector norms_p = block_norms(h).array().pow(p);
  double on_t = 0.0;
  double off_t = 0.0;
  for (Index i = 0; i < norms_p.size(); ++i) {
    if (T.contains(i)) {
      on_t += norms_p(i);
    } else {
      off_t += norms_p(i);
    }
  }
  double on_s = 0.0;
  for (Index i : S.indices()) on_s += norms_p(i);
  return omega * on_t + (1.0 - omega) * on_s - C * off_t;
}

Matrix null_space_basis(const Matrix& A, double rank_tol) {
  Eigen::BDCSVD<Matrix> svd(A, Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  const double cutoff = sv.size() > 0 ? rank_tol * sv(0) : 0.0;
  Index rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff) ++rank;
  return svd.matrixV().rightCols(A.cols() - rank);
}

NspReport nsp_falsify(const Matrix& A, const BlockPattern& pattern, Index k, Index s, double omega, double p,
                      double C, Index samples, std::uint64_t seed, double rank_tol) {
  check_exponent(p);
  const Index n = pattern.num_blocks();
  if (A.cols() != pattern.dim()) throw std::invalid_argument("nsp_falsify: column count must equal n*d");
  if (k < 0 || k > n || s < 0 || s > n) throw std::invalid_argument("nsp_falsify: need 0 <= k, s <= n");
  if (!(omega >= 0.0 && omega <= 1.0)) throw std::invalid_argument("nsp_falsify: omega must lie in [0, 1]");
  if (!(C > 0.0)) throw std::invalid_argument("nsp_falsify: C must be positive");
  if (samples < 0) throw std::invalid_argument("nsp_falsify: samples must be nonnegative");

  const Matrix basis = null_space_basis(A, rank_tol);
  if (basis.cols() == 0) throw std::domain_error("nsp_falsify: trivial null space, nothing to falsify");

  NspReport report;
  report.k = k;
  report.s = s;
  report.omega = omega;
  report.p = p;
  report.C = C;
  report.samples = samples;
  report.seed = seed;

  auto test = [&](const Vector& h_raw) {
    const double norm = h_raw.norm();
    if (norm == 0.0) return false;
    BlockVector h(pattern, h_raw / norm);
    const BlockIndexSet T = top_k_blocks(h, k);
    const BlockIndexSet S = top_k_blocks(h, s);
    if (nsp_excess(h, T, S, omega, p, C) > 0.0) {
      report.violated = true;
      report.witness_residual = (A * h.values()).norm();
      report.witness = std::move(h);
      return true;
    }
    return false;
  };

  for (Index j = 0; j < basis.cols(); ++j) {
    if (test(basis.col(j))) return report;
  }
  Rng rng(seed);
  Vector coeffs(basis.cols());
  for (Index t = 0; t < samples; ++t) {
    for (Index j = 0; j < coeffs.size(); ++j) coeffs(j) = rng.gaussian();
    if (test(basis * coeffs)) return report;
  }
  return report;
}

std::string NspReport::summary() const {
  std::ostringstream os;
  if (violated) {
    os << "violated: weighted block NSP (k=" << k << ", s=" << s << ", omega=" << omega << ", p=" << p
       << ", C=" << C << ") fails; witness residual " << witness_residual;
  } else {
    os << "no violation found in " << samples << " random null-space samples (seed " << seed
       << "); this is evidence, not a certificate";
  }
  return os.str();
}

}  // namespace blockcs
