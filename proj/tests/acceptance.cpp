// Acceptance suite. Each criterion prints one "[PASS]" or "[FAIL]" line.
//
//   acceptance            run every criterion
//   acceptance <name>     run one criterion
//   acceptance --list     print criterion names

#include "blockcs/conditions.hpp"
#include "blockcs/harness.hpp"
#include "blockcs/oracle.hpp"
#include "blockcs/solver.hpp"
#include "test_support.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace blockcs;
using blockcs::testing::TestRng;

namespace {

// Pinned tolerances and thresholds.
constexpr double kDeltaTol = 5e-4;
constexpr double kFlatTol = 1e-12;
constexpr double kPushThroughTol = 1e-8;
constexpr double kWeightLimitTol = 1e-6;
constexpr double kWitnessTol = 1e-10;
constexpr double kRicTol = 1e-12;
constexpr double kOracleSnr = 60.0;
constexpr double kExactSnr = 80.0;
constexpr int kRequiredOf20 = 18;

// Large-scale trend cells.
constexpr Index kTrendM = 100;
constexpr std::uint64_t kTrendSeed = 2024;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(double v, int prec = 6) {
  std::ostringstream s;
  s << std::setprecision(prec) << v;
  return s.str();
}

ConditionParams params(int a, double rho, double alpha, double omega, double p) {
  ConditionParams c;
  c.a = a;
  c.rho = rho;
  c.alpha = alpha;
  c.omega = omega;
  c.p = p;
  return c;
}

Outcome delta_regression() {
  const double d02 = delta_threshold(params(3, 1.0, 0.7, 0.2, 0.5));
  const double d1 = delta_threshold(params(3, 1.0, 0.7, 1.0, 0.5));
  const bool ok = std::abs(d02 - 0.5072) <= kDeltaTol && std::abs(d1 - 0.3902) <= kDeltaTol;
  return {ok, "omega=0.2: " + fmt(d02) + ", omega=1: " + fmt(d1)};
}

Outcome monotonicity_grid() {
  const std::vector<double> ps{1.0, 0.5, 0.01};  // decreasing p
  const std::vector<double> alphas{0.1, 0.3, 0.5, 0.7, 0.9};
  std::vector<double> omegas;
  for (int i = 0; i <= 20; ++i) omegas.push_back(i * 0.05);
  auto delta = [](double p, double alpha, double omega) { return delta_threshold(params(3, 1.0, alpha, omega, p)); };

  int violations = 0;
  for (double p : ps)
    for (std::size_t ia = 0; ia < alphas.size(); ++ia)
      for (std::size_t io = 0; io < omegas.size(); ++io) {
        const double alpha = alphas[ia];
        const double omega = omegas[io];
        const double v = delta(p, alpha, omega);
        if (ia + 1 < alphas.size() && omega < 1.0 && !(delta(p, alphas[ia + 1], omega) > v)) ++violations;
        if (io + 1 < omegas.size()) {
          const double next = delta(p, alpha, omegas[io + 1]);
          if (alpha > 0.5 && !(next < v)) ++violations;
          if (alpha < 0.5 && !(next > v)) ++violations;
          if (alpha == 0.5 && std::abs(next - v) > kFlatTol) ++violations;
        }
      }
  for (std::size_t ip = 0; ip + 1 < ps.size(); ++ip)
    for (double alpha : alphas)
      for (double omega : omegas)
        if (!(delta(ps[ip + 1], alpha, omega) >= delta(ps[ip], alpha, omega))) ++violations;
  return {violations == 0, std::to_string(violations) + " violations"};
}

Outcome algebraic_consistency() {
  TestRng rng(20240601);
  int discrepancies = 0;
  for (int t = 0; t < 1000; ++t) {
    const int a = rng.integer(2, 10);
    const double rho = rng.uniform(0.0, 3.0);
    // alpha uniform over its feasible range for this (a, rho).
    const double lo = rho > 0.0 ? std::max(0.0, 1.0 - a / rho) : 0.0;
    const double hi = rho > 1.0 ? 1.0 / rho : 1.0;
    const double alpha = rng.uniform(lo, hi);
    const ConditionParams c = params(a, rho, alpha, rng.uniform(0.0, 1.0), rng.uniform(0.01, 1.0));
    const double delta = rng.uniform(0.0, 0.999);
    if (rip_sufficient_check(delta, delta, c) != (delta < delta_threshold(c))) ++discrepancies;
  }
  return {discrepancies == 0, std::to_string(discrepancies) + " discrepancies over 1000 draws"};
}

Outcome push_through() {
  TestRng rng(77);
  const BlockPattern pattern(10, 2);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Matrix A = rng.gaussian(10, 20);
    const Vector y = rng.gaussian(10);
    Vector W(10);
    for (Index i = 0; i < 10; ++i) W(i) = std::exp(rng.uniform(-2.0, 2.0));
    const double lambda = std::pow(10.0, rng.uniform(-6.0, 0.0));
    const Vector fast = irls_step(A, y, pattern, W, lambda);
    const Vector direct = testing::irls_step_direct(A, y, pattern, W, lambda);
    worst = std::max(worst, (fast - direct).norm() / direct.norm());
  }
  return {worst <= kPushThroughTol, "max relative error " + fmt(worst, 3)};
}

Outcome weight_limit() {
  TestRng rng(99);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const BlockPattern pattern(rng.integer(1, 8), rng.integer(1, 4));
    Vector v = rng.gaussian(pattern.dim());
    Vector w(pattern.num_blocks());
    for (Index i = 0; i < w.size(); ++i) {
      w(i) = rng.uniform(0.01, 1.0);
      auto blk = v.segment(i * pattern.block_len(), pattern.block_len());
      if (blk.norm() < 0.01) blk.setConstant(0.5);
    }
    const double p = rng.uniform(0.01, 1.0);
    const BlockVector x(pattern, v);
    const Vector W = irls_weights(x, w, 1e-14, p, 1e-6);
    for (Index i = 0; i < w.size(); ++i) {
      const double sq = x.block(i).squaredNorm();
      worst = std::max(worst, testing::rel_err(W(i) * W(i) * sq, w(i) * std::pow(std::sqrt(sq), p)));
    }
  }
  return {worst <= kWeightLimitTol, "max relative error " + fmt(worst, 3)};
}

Outcome oracle_equivalence() {
  ScenarioConfig sc;
  sc.n = 8;
  sc.d = 2;
  sc.k = 2;
  sc.m = 10;
  sc.p = 0.5;
  sc.omega = 1.0;
  sc.base_seed = 31;
  int agree = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const ReplicationInstance inst = make_replication(sc, rep);
    SolverConfig cfg;
    cfg.p = sc.p;
    cfg.lambda = sc.effective_lambda();
    const RecoveryResult r = irls_recover(inst.A, inst.y, inst.x.pattern(), inst.weights, cfg);
    const OracleResult o = brute_force_decode(inst.A, inst.y, inst.x.pattern(), sc.k);
    if (top_k_blocks(r.x_hat, sc.k) == o.support && snr_db(inst.x, r.x_hat) > kOracleSnr) ++agree;
  }
  return {agree >= kRequiredOf20, std::to_string(agree) + "/20 agree"};
}

Outcome desk_exact_recovery() {
  ScenarioConfig sc;
  sc.n = 20;
  sc.d = 2;
  sc.k = 3;
  sc.m = 16;
  sc.p = 0.5;
  sc.omega = 1.0;
  sc.base_seed = 1;
  int good = 0;
  for (const auto& r : run_scenario(sc)) good += r.snr_db > kExactSnr;
  return {good >= kRequiredOf20, std::to_string(good) + "/20 above " + fmt(kExactSnr) + " dB"};
}

ScenarioConfig trend_cell() {
  ScenarioConfig sc;
  sc.n = 200;
  sc.d = 2;
  sc.k = 20;
  sc.m = kTrendM;
  sc.p = 0.5;
  sc.rho = 1.0;
  sc.sigma = 0.0;
  sc.reps = 20;
  sc.base_seed = kTrendSeed;
  return sc;
}

double mean_snr(const ScenarioConfig& sc) { return summarize(run_scenario(sc))[0].mean_finite_snr; }

Outcome weight_ordering_trend() {
  ScenarioConfig sc = trend_cell();
  sc.alpha = 0.7;
  sc.omega = 0.1;
  const double hi_small = mean_snr(sc);
  sc.omega = 1.0;
  const double hi_one = mean_snr(sc);
  sc.alpha = 0.3;
  const double lo_one = mean_snr(sc);
  sc.omega = 0.0;
  const double lo_zero = mean_snr(sc);
  const bool ok = hi_small - hi_one > 0.0 && lo_one - lo_zero > 0.0;
  return {ok, "alpha=0.7: omega 0.1 vs 1 margin " + fmt(hi_small - hi_one, 4) + " dB; alpha=0.3: omega 1 vs 0 margin " +
                  fmt(lo_one - lo_zero, 4) + " dB"};
}

Outcome exponent_ordering_trend() {
  ScenarioConfig sc = trend_cell();
  sc.alpha = 0.7;
  sc.omega = 0.5;
  sc.p = 0.2;
  const double s02 = mean_snr(sc);
  sc.p = 0.5;
  const double s05 = mean_snr(sc);
  sc.p = 1.0;
  const double s1 = mean_snr(sc);
  const bool ok = s02 >= s05 && s05 >= s1;
  return {ok, "mean SNR p=0.2: " + fmt(s02, 5) + ", p=0.5: " + fmt(s05, 5) + ", p=1: " + fmt(s1, 5) + " dB"};
}

Outcome nsp_soundness() {
  TestRng rng(4);
  Matrix A = rng.gaussian(8, 8);
  const BlockPattern pattern(4, 2);
  bool trivial_error = false;
  try {
    nsp_falsify(A, pattern, 1, 1, 1.0, 0.5, 0.9, 100, 5);
  } catch (const std::domain_error&) {
    trivial_error = true;
  }

  A.middleCols(6, 2) = A.middleCols(2, 2);
  const NspReport rep = nsp_falsify(A, pattern, 1, 1, 1.0, 0.5, 0.9, 100, 5);
  bool witness_ok = false;
  double excess = 0.0;
  if (rep.violated && rep.witness) {
    const BlockVector& h = *rep.witness;
    excess = nsp_excess(h, top_k_blocks(h, 1), top_k_blocks(h, 1), 1.0, 0.5, 0.9);
    witness_ok = excess > kWitnessTol && (A * h.values()).norm() <= kWitnessTol;
  }
  return {trivial_error && witness_ok, std::string("trivial-null error ") + (trivial_error ? "raised" : "missing") +
                                           ", witness excess " + fmt(excess, 4)};
}

Outcome ric_analytic() {
  const BlockPattern pattern(6, 1);
  const Matrix I = Matrix::Identity(6, 6);
  const double id = ric_estimate(I, pattern, 1, 0.5, 200, 3).lower_bound;
  const double twice = ric_estimate(2.0 * I, pattern, 1, 1.0, 200, 3).lower_bound;
  const bool ok = std::abs(id) <= kRicTol && std::abs(twice - 1.0) <= kRicTol;
  return {ok, "identity: " + fmt(id, 3) + ", 2*identity: " + fmt(twice, 17)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome simulate_determinism() {
  const auto dir = std::filesystem::temp_directory_path() / "blockcs_acceptance";
  std::filesystem::create_directories(dir);
  const auto cfg = dir / "sweep.ini";
  {
    std::ofstream out(cfg);
    out << "[cells]\nn = 20\nd = 2\nk = 3\nm = 12, 16\np = 0.5\nomega = 0.3, 1\nalpha = 0.7\nreps = 6\nbase_seed = 5\n";
  }
  auto run = [&](int threads) {
    const auto out = dir / ("threads" + std::to_string(threads) + ".csv");
    const std::string cmd = std::string("\"") + BLOCKCS_CLI + "\" simulate --config \"" + cfg.string() + "\" --out \"" +
                            out.string() + "\" --threads " + std::to_string(threads) + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return std::make_pair(rc, slurp(out));
  };
  const auto [rc1, one] = run(1);
  const auto [rc8, eight] = run(8);
  std::filesystem::remove_all(dir);
  const bool ok = rc1 == 0 && rc8 == 0 && !one.empty() && one == eight;
  return {ok, std::to_string(one.size()) + " bytes (threads=1) vs " + std::to_string(eight.size()) + " bytes (threads=8)"};
}

struct Criterion {
  std::string name;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {"delta_threshold_regression", delta_regression},
      {"delta_monotonicity_grid", monotonicity_grid},
      {"rip_threshold_consistency", algebraic_consistency},
      {"irls_push_through", push_through},
      {"irls_weight_limit", weight_limit},
      {"oracle_equivalence", oracle_equivalence},
      {"desk_exact_recovery", desk_exact_recovery},
      {"weight_ordering_trend", weight_ordering_trend},
      {"exponent_ordering_trend", exponent_ordering_trend},
      {"nsp_falsifier_soundness", nsp_soundness},
      {"ric_analytic_cases", ric_analytic},
      {"simulate_thread_determinism", simulate_determinism},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string only = argc > 1 ? argv[1] : "";
  if (only == "--list") {
    for (const auto& c : criteria()) std::cout << c.name << '\n';
    return 0;
  }
  int failed = 0;
  int ran = 0;
  for (const auto& c : criteria()) {
    if (!only.empty() && c.name != only) continue;
    ++ran;
    Outcome o{false, ""};
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << c.name << "  (" << o.detail << ")" << std::endl;
    failed += !o.pass;
  }
  if (ran == 0) {
    std::cerr << "unknown criterion: " << only << '\n';
    return 2;
  }
  return failed == 0 ? 0 : 1;
}
