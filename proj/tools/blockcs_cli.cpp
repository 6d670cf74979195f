// blockcs: weighted block-sparse recovery, recovery conditions and simulations.
//
//   blockcs recover     --matrix A.csv --measurements y.txt --d 2 --p 0.5 --lambda 1e-6 --out x.txt
//   blockcs simulate    --config sweep.ini --out results.csv --threads 4 --seed 1
//   blockcs conditions  --a 3 --rho 1 --alpha 0.7 --omega 0.2 --p 0.5
//   blockcs ric         --matrix A.csv --d 2 --k 3 --p 0.5 --samples 10000
//   blockcs nsp-check   --matrix A.csv --d 2 --k 3 --s 2 --omega 0.5 --p 0.5

#include "blockcs/conditions.hpp"
#include "blockcs/harness.hpp"
#include "blockcs/io.hpp"
#include "blockcs/solver.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <thread>

using namespace blockcs;
using io::format_double;

namespace {

BlockPattern pattern_for(const Matrix& A, Index d) {
  if (d < 1 || A.cols() % d != 0) {
    throw std::invalid_argument("matrix has " + std::to_string(A.cols()) + " columns, not a multiple of d=" +
                                std::to_string(d));
  }
  return BlockPattern(A.cols() / d, d);
}

struct RecoverArgs {
  std::string matrix, measurements, weights, out, diag;
  Index d = 1;
  double p = 0.5;
  double lambda = 1e-6;
  double tol = 1e-5;
  int max_iter = 2500;
};

int run_recover(const RecoverArgs& args) {
  const Matrix A = io::read_matrix_csv(args.matrix);
  const Vector y = io::read_vector(args.measurements);
  const BlockPattern pattern = pattern_for(A, args.d);
  Vector w = Vector::Ones(pattern.num_blocks());
  if (!args.weights.empty()) {
    w = io::read_vector(args.weights);
    if (w.size() != pattern.num_blocks()) {
      throw std::invalid_argument("weights file has " + std::to_string(w.size()) + " entries, expected " +
                                  std::to_string(pattern.num_blocks()));
    }
  }
  SolverConfig cfg;
  cfg.p = args.p;
  cfg.lambda = args.lambda;
  cfg.tol = args.tol;
  cfg.max_iter = args.max_iter;

  const RecoveryResult res = irls_recover(A, y, pattern, w, cfg);
  io::write_vector(args.out, res.x_hat.values());

  std::ostringstream diag;
  diag << "iterations = " << res.iterations << '\n'
       << "converged = " << (res.converged ? "true" : "false") << '\n'
       << "final_gamma = " << format_double(res.final_gamma) << '\n'
       << "final_step_norm = " << format_double(res.final_step_norm) << '\n'
       << "residual_norm = " << format_double((y - A * res.x_hat.values()).norm()) << '\n';
  if (!args.diag.empty()) {
    std::ofstream f(args.diag);
    if (!f) throw std::runtime_error("cannot open " + args.diag);
    f << diag.str();
  } else {
    std::cout << diag.str();
  }
  return 0;
}

struct SimulateArgs {
  std::string config, out, summary;
  int threads = 1;
  std::uint64_t seed = 0;
  bool timing = false;
};

int run_simulate(const SimulateArgs& args) {
  const auto cfgs = parse_sweep_config(args.config, args.seed);
  const CsvOptions opts{args.timing};
  if (args.summary.empty()) {
    run_sweep(cfgs, args.threads, args.out, opts);
    std::cerr << "wrote " << args.out << '\n';
    return 0;
  }
  const auto records = run_cells(cfgs, args.threads);
  {
    std::ofstream f(args.out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + args.out);
    write_records_csv(f, records, opts);
  }
  std::ofstream s(args.summary, std::ios::binary);
  if (!s) throw std::runtime_error("cannot open " + args.summary);
  write_summary_csv(s, summarize(records));
  std::cerr << "wrote " << args.out << " and " << args.summary << '\n';
  return 0;
}

struct ConditionsArgs {
  std::vector<int> a{3};
  std::vector<double> rho{1.0}, alpha{0.5}, omega{1.0}, p{1.0};
  std::optional<double> delta_ak, delta_a1k;
  std::optional<Index> m;
  std::string grid;
};

int run_conditions(const ConditionsArgs& args) {
  if (!args.grid.empty()) {
    std::ofstream f(args.grid, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + args.grid);
    f << "a,rho,alpha,omega,p,gamma,delta\n";
    for (int a : args.a)
      for (double rho : args.rho)
        for (double alpha : args.alpha)
          for (double omega : args.omega)
            for (double p : args.p) {
              const ConditionParams params{a, rho, alpha, omega, p};
              f << a << ',' << format_double(rho) << ',' << format_double(alpha) << ',' << format_double(omega) << ','
                << format_double(p) << ',' << format_double(gamma_factor(params)) << ','
                << format_double(delta_threshold(params)) << '\n';
            }
    std::cerr << "wrote " << args.grid << '\n';
    return 0;
  }

  if (args.a.size() != 1 || args.rho.size() != 1 || args.alpha.size() != 1 || args.omega.size() != 1 ||
      args.p.size() != 1) {
    throw std::invalid_argument("parameter lists need --grid <path>");
  }
  const ConditionParams params{args.a[0], args.rho[0], args.alpha[0], args.omega[0], args.p[0]};
  std::cout << "gamma = " << format_double(gamma_factor(params)) << '\n'
            << "delta = " << format_double(delta_threshold(params)) << '\n';
  if (args.delta_ak && args.delta_a1k) {
    const bool ok = rip_sufficient_check(*args.delta_ak, *args.delta_a1k, params);
    std::cout << "rip_sufficient = " << (ok ? "true" : "false") << '\n';
    if (ok && args.m) {
      const auto c = recovery_constants(*args.delta_ak, *args.delta_a1k, params, *args.m);
      std::cout << "C1 = " << format_double(c.c1) << '\n' << "C2 = " << format_double(c.c2) << '\n';
    } else if (!ok) {
      std::cout << "C1 = undefined\nC2 = undefined\n";
    }
  }
  return 0;
}

struct RicArgs {
  std::string matrix, witness;
  Index d = 1, k = 1, samples = 10000;
  double p = 1.0;
  std::uint64_t seed = 0;
};

int run_ric(const RicArgs& args) {
  const Matrix A = io::read_matrix_csv(args.matrix);
  const RicEstimate est = ric_estimate(A, pattern_for(A, args.d), args.k, args.p, args.samples, args.seed);
  std::cout << "k = " << est.k << '\n'
            << "p = " << format_double(est.p) << '\n'
            << "lower_bound = " << format_double(est.lower_bound) << '\n'
            << "samples = " << est.samples << '\n'
            << "seed = " << est.seed << '\n'
            << "note = sampled lower bound on delta_k, not its exact value\n";
  if (!args.witness.empty() && est.witness) io::write_vector(args.witness, est.witness->values());
  return 0;
}

struct NspArgs {
  std::string matrix, witness;
  Index d = 1, k = 1, s = 1, samples = 10000;
  double omega = 1.0, p = 1.0, C = 1.0, rank_tol = 1e-10;
  std::uint64_t seed = 0;
};

int run_nsp(const NspArgs& args) {
  const Matrix A = io::read_matrix_csv(args.matrix);
  const NspReport rep = nsp_falsify(A, pattern_for(A, args.d), args.k, args.s, args.omega, args.p, args.C,
                                    args.samples, args.seed, args.rank_tol);
  std::cout << "violated = " << (rep.violated ? "true" : "false") << '\n'
            << "samples = " << rep.samples << '\n'
            << "seed = " << rep.seed << '\n'
            << "summary = " << rep.summary() << '\n';
  if (!args.witness.empty() && rep.witness) io::write_vector(args.witness, rep.witness->values());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted block-sparse recovery by IRLS, recovery conditions and simulations"};
  app.require_subcommand(1);

  RecoverArgs rec;
  auto* recover = app.add_subcommand("recover", "Recover a block-sparse signal from measurements");
  recover->add_option("--matrix", rec.matrix, "Measurement matrix CSV (m rows, N columns)")->required()->check(CLI::ExistingFile);
  recover->add_option("--measurements", rec.measurements, "Measurement vector, one value per line")->required()->check(CLI::ExistingFile);
  recover->add_option("--d", rec.d, "Block length")->required();
  recover->add_option("--p", rec.p, "Exponent in (0, 1]")->required();
  recover->add_option("--lambda", rec.lambda, "Regularization (1e-6 noise free, 1e-2 noisy)")->required();
  recover->add_option("--weights", rec.weights, "Per-block weights in [0, 1], one per line (default all 1)")->check(CLI::ExistingFile);
  recover->add_option("--out", rec.out, "Output path for the recovered signal")->required();
  recover->add_option("--diag", rec.diag, "Write convergence diagnostics here instead of stdout");
  recover->add_option("--tol", rec.tol, "Stopping tolerance on the step norm")->capture_default_str();
  recover->add_option("--max-iter", rec.max_iter, "Iteration cap")->capture_default_str();

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run a simulation sweep and write per-replication CSV");
  simulate->add_option("--config", sim.config, "Sweep file ([section] key = value)")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", sim.out, "Output CSV")->required();
  simulate->add_option("--threads", sim.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim.seed, "base_seed for sections that do not set one")->capture_default_str();
  simulate->add_option("--summary", sim.summary, "Also write per-scenario mean SNR CSV");
  simulate->add_flag("--timing", sim.timing, "Record wall-clock milliseconds (output no longer byte-reproducible)");

  ConditionsArgs cond;
  auto* conditions = app.add_subcommand("conditions", "Evaluate gamma, the delta threshold and C1/C2");
  conditions->add_option("--a", cond.a, "Block-count multiplier a > 1")->delimiter(',')->capture_default_str();
  conditions->add_option("--rho", cond.rho, "Support estimate size ratio")->delimiter(',')->capture_default_str();
  conditions->add_option("--alpha", cond.alpha, "Support estimate accuracy")->delimiter(',')->capture_default_str();
  conditions->add_option("--omega", cond.omega, "Weight on the support estimate")->delimiter(',')->capture_default_str();
  conditions->add_option("--p", cond.p, "Exponent in (0, 1]")->delimiter(',')->capture_default_str();
  conditions->add_option("--delta-ak", cond.delta_ak, "Block RIC of order ak");
  conditions->add_option("--delta-a1k", cond.delta_a1k, "Block RIC of order (a+1)k");
  conditions->add_option("--m", cond.m, "Number of measurements (needed for C2)");
  conditions->add_option("--grid", cond.grid, "Write the Cartesian grid of comma-separated parameter lists as CSV");

  RicArgs ric;
  auto* ric_cmd = app.add_subcommand("ric", "Sampled lower bound on the block p-RIC");
  ric_cmd->add_option("--matrix", ric.matrix, "Matrix CSV")->required()->check(CLI::ExistingFile);
  ric_cmd->add_option("--d", ric.d, "Block length")->required();
  ric_cmd->add_option("--k", ric.k, "Block sparsity order")->required();
  ric_cmd->add_option("--p", ric.p, "Exponent in (0, 1]")->required();
  ric_cmd->add_option("--samples", ric.samples, "Random block-sparse unit vectors")->capture_default_str();
  ric_cmd->add_option("--seed", ric.seed, "Seed")->capture_default_str();
  ric_cmd->add_option("--witness", ric.witness, "Write the extremal vector here");

  NspArgs nsp;
  auto* nsp_cmd = app.add_subcommand("nsp-check", "Search the null space for a weighted block NSP violation");
  nsp_cmd->add_option("--matrix", nsp.matrix, "Matrix CSV")->required()->check(CLI::ExistingFile);
  nsp_cmd->add_option("--d", nsp.d, "Block length")->required();
  nsp_cmd->add_option("--k", nsp.k, "Block sparsity")->required();
  nsp_cmd->add_option("--s", nsp.s, "Support estimate error size")->required();
  nsp_cmd->add_option("--omega", nsp.omega, "Weight")->capture_default_str();
  nsp_cmd->add_option("--p", nsp.p, "Exponent in (0, 1]")->capture_default_str();
  nsp_cmd->add_option("--C", nsp.C, "NSP constant")->capture_default_str();
  nsp_cmd->add_option("--samples", nsp.samples, "Random null-space vectors")->capture_default_str();
  nsp_cmd->add_option("--seed", nsp.seed, "Seed")->capture_default_str();
  nsp_cmd->add_option("--rank-tol", nsp.rank_tol, "Relative singular value cutoff")->capture_default_str();
  nsp_cmd->add_option("--witness", nsp.witness, "Write a violating vector here");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*recover) return run_recover(rec);
    if (*simulate) return run_simulate(sim);
    if (*conditions) return run_conditions(cond);
    if (*ric_cmd) return run_ric(ric);
    if (*nsp_cmd) return run_nsp(nsp);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
