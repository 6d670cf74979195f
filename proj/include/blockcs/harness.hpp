#ifndef BLOCKCS_HARNESS_HPP
#define BLOCKCS_HARNESS_HPP

#include "blockcs/block_model.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace blockcs {

/// One cell of a simulation sweep.
struct ScenarioConfig {
  Index n = 200;
  Index d = 2;
  Index k = 20;
  Index m = 100;
  double p = 0.5;
  double sigma = 0.0;
  double omega = 1.0;
  double rho = 1.0;
  double alpha = 1.0;
  std::optional<double> theta;   // power-decay exponent; absent for exactly block-sparse signals
  std::optional<double> lambda;  // absent: 1e-6 when sigma == 0, else 1e-2
  int reps = 20;
  std::uint64_t base_seed = 0;

  double effective_lambda() const;
  /// |support estimate| = round(rho k).
  Index estimate_size() const;
  /// |support estimate ∩ T0| = round(alpha rho k).
  Index estimate_overlap() const;
  void validate() const;
};

struct ExperimentRecord {
  std::size_t scenario = 0;
  int rep = 0;
  std::uint64_t seed = 0;
  ScenarioConfig config;
  double snr_db = 0.0;
  int iterations = 0;
  bool converged = false;
  double wall_ms = 0.0;
};

/// m x N matrix of i.i.d. standard normal entries.
Matrix gen_gaussian_matrix(Index m, Index N, std::uint64_t seed);

/// k blocks chosen uniformly without replacement, entries i.i.d. standard normal.
std::pair<BlockVector, BlockIndexSet> gen_block_sparse_signal(const BlockPattern& pattern, Index k, std::uint64_t seed);

/// Block with decay rank r (1-based) has norm r^-theta; ranks are placed on a
/// random permutation of block positions, directions uniform on the sphere.
BlockVector gen_power_decay_signal(const BlockPattern& pattern, double theta, std::uint64_t seed);

/// round(alpha rho k) blocks drawn from T0 plus round(rho k) - round(alpha rho k)
/// drawn from its complement, with k = |T0|.
BlockIndexSet gen_support_estimate(const BlockIndexSet& T0, double rho, double alpha, std::uint64_t seed);

/// w_i = omega on the support estimate, 1 elsewhere.
Vector make_block_weights(const BlockIndexSet& estimate, double omega);

/// Everything a single replication draws, exposed for inspection in tests.
struct ReplicationInstance {
  Matrix A;
  BlockVector x;
  BlockIndexSet T0;
  BlockIndexSet estimate;
  Vector weights;
  Vector y;
};

/// Seed of replication r is base_seed + r; sub-streams for the matrix,
/// signal, support estimate and noise are derived from it with mix_seed.
ReplicationInstance make_replication(const ScenarioConfig& cfg, int rep);

ExperimentRecord run_replication(const ScenarioConfig& cfg, std::size_t scenario, int rep);

std::vector<ExperimentRecord> run_scenario(const ScenarioConfig& cfg, std::size_t scenario = 0);

/// Runs every (scenario, replication) cell on `threads` workers. Output is
/// sorted by (scenario, rep) and independent of the worker count.
std::vector<ExperimentRecord> run_cells(const std::vector<ScenarioConfig>& cfgs, int threads);

struct CsvOptions {
  /// When false wall_ms is written as 0 so identical runs give identical bytes.
  bool timing = false;
};

void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records, const CsvOptions& opts = {});

/// run_cells + write_records_csv into `out`. The file is written to a
/// temporary sibling and renamed; on failure nothing is left behind.
void run_sweep(const std::vector<ScenarioConfig>& cfgs, int threads, const std::filesystem::path& out,
               const CsvOptions& opts = {});

struct ScenarioSummary {
  std::size_t scenario = 0;
  ScenarioConfig config;
  double mean_finite_snr = 0.0;  // NaN when every replication was exact
  int finite_count = 0;
  int exact_count = 0;
  int converged_count = 0;
};

std::vector<ScenarioSummary> summarize(const std::vector<ExperimentRecord>& records);
void write_summary_csv(std::ostream& out, const std::vector<ScenarioSummary>& rows);

/// Parses a sweep file: [section] headers, key = value lines, '#' comments.
/// Keys are ScenarioConfig field names; comma-separated values expand as a
/// Cartesian product within the section. base_seed defaults to `default_seed`.
std::vector<ScenarioConfig> parse_sweep_config(std::istream& in, std::uint64_t default_seed = 0);
std::vector<ScenarioConfig> parse_sweep_config(const std::filesystem::path& path, std::uint64_t default_seed = 0);

}  // namespace blockcs

#endif  // BLOCKCS_HARNESS_HPP
