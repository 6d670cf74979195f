#include "blockcs/harness.hpp"

#include "blockcs/io.hpp"
#include "blockcs/random.hpp"
#include "blockcs/solver.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace blockcs {

namespace {

enum Stream : std::uint64_t { kMatrixStream = 0, kSignalStream = 1, kEstimateStream = 2, kNoiseStream = 3 };

Vector random_unit(Rng& rng, Index d) {
  Vector v(d);
  double norm = 0.0;
  while (norm == 0.0) {
    for (Index j = 0; j < d; ++j) v(j) = rng.gaussian();
    norm = v.norm();
  }
  return v / norm;
}

}  // namespace

double ScenarioConfig::effective_lambda() const {
  if (lambda) return *lambda;
  return sigma == 0.0 ? 1e-6 : 1e-2;
}

Index ScenarioConfig::estimate_size() const { return static_cast<Index>(std::lround(rho * static_cast<double>(k))); }

Index ScenarioConfig::estimate_overlap() const {
  return static_cast<Index>(std::lround(alpha * rho * static_cast<double>(k)));
}

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("ScenarioConfig: " + msg); };
  if (n < 1 || d < 1 || m < 1) fail("n, d, m must be positive");
  if (k < 1 || k > n) fail("need 1 <= k <= n");
  if (m > n * d) fail("need m <= N = n*d");
  if (!(p > 0.0 && p <= 1.0)) fail("p must lie in (0, 1]");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) fail("sigma must be >= 0");
  if (!(omega >= 0.0 && omega <= 1.0)) fail("omega must lie in [0, 1]");
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail("alpha must lie in [0, 1]");
  if (!(rho >= 0.0) || !std::isfinite(rho)) fail("rho must be >= 0");
  if (theta && !(*theta > 1.0)) fail("theta must exceed 1");
  if (lambda && !(*lambda > 0.0)) fail("lambda must be positive");
  if (reps < 1) fail("reps must be >= 1");
  const Index size = estimate_size();
  const Index overlap = estimate_overlap();
  if (size > n) fail("round(rho k) exceeds n");
  if (overlap > std::min(k, size)) fail("round(alpha rho k) exceeds min(k, round(rho k))");
  if (size - overlap > n - k) fail("support estimate needs more blocks outside T0 than exist");
}

Matrix gen_gaussian_matrix(Index m, Index N, std::uint64_t seed) {
  if (m < 1 || N < 1) throw std::invalid_argument("gen_gaussian_matrix: dimensions must be positive");
  Rng rng(seed);
  Matrix A(m, N);
  // Filled row by row.
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < N; ++j) A(i, j) = rng.gaussian();
  }
  return A;
}

std::pair<BlockVector, BlockIndexSet> gen_block_sparse_signal(const BlockPattern& pattern, Index k, std::uint64_t seed) {
  if (k < 0 || k > pattern.num_blocks()) throw std::invalid_argument("gen_block_sparse_signal: need 0 <= k <= n");
  Rng rng(seed);
  const auto picked = rng.sample_without_replacement(static_cast<std::uint64_t>(pattern.num_blocks()),
                                                     static_cast<std::uint64_t>(k));
  std::vector<Index> support(picked.begin(), picked.end());
  BlockIndexSet T0(pattern, std::move(support));

  Vector values = Vector::Zero(pattern.dim());
  for (Index blk : T0.indices()) {
    auto seg = values.segment(pattern.block_begin(blk), pattern.block_len());
    do {
      for (Index j = 0; j < seg.size(); ++j) seg(j) = rng.gaussian();
    } while (seg.squaredNorm() == 0.0);
  }
  return {BlockVector(pattern, std::move(values)), std::move(T0)};
}

BlockVector gen_power_decay_signal(const BlockPattern& pattern, double theta, std::uint64_t seed) {
  if (!(theta > 1.0)) throw std::invalid_argument("gen_power_decay_signal: theta must exceed 1");
  const Index n = pattern.num_blocks();
  Rng rng(seed);
  const auto positions = rng.sample_without_replacement(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(n));
  Vector values(pattern.dim());
  for (Index rank = 1; rank <= n; ++rank) {
    const auto blk = static_cast<Index>(positions[static_cast<std::size_t>(rank - 1)]);
    values.segment(pattern.block_begin(blk), pattern.block_len()) =
        std::pow(static_cast<double>(rank), -theta) * random_unit(rng, pattern.block_len());
  }
  return BlockVector(pattern, std::move(values));
}

BlockIndexSet gen_support_estimate(const BlockIndexSet& T0, double rho, double alpha, std::uint64_t seed) {
  const BlockPattern& pattern = T0.pattern();
  const double k = static_cast<double>(T0.size());
  if (!(rho >= 0.0) || !(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("gen_support_estimate: need rho >= 0 and alpha in [0, 1]");
  }
  const auto size = static_cast<std::size_t>(std::lround(rho * k));
  const auto overlap = static_cast<std::size_t>(std::lround(alpha * rho * k));
  const BlockIndexSet outside = T0.complement();
  if (overlap > T0.size() || overlap > size || size - overlap > outside.size()) {
    throw std::invalid_argument("gen_support_estimate: infeasible (rho, alpha) for this support");
  }

  Rng rng(seed);
  std::vector<Index> chosen;
  chosen.reserve(size);
  for (auto j : rng.sample_without_replacement(T0.size(), overlap)) chosen.push_back(T0.indices()[j]);
  for (auto j : rng.sample_without_replacement(outside.size(), size - overlap)) chosen.push_back(outside.indices()[j]);
  return BlockIndexSet(pattern, std::move(chosen));
}

Vector make_block_weights(const BlockIndexSet& estimate, double omega) {
  if (!(omega >= 0.0 && omega <= 1.0)) throw std::invalid_argument("make_block_weights: omega must lie in [0, 1]");
  Vector w = Vector::Ones(estimate.pattern().num_blocks());
  for (Index i : estimate.indices()) w(i) = omega;
  return w;
}

ReplicationInstance make_replication(const ScenarioConfig& cfg, int rep) {
  cfg.validate();
  const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(rep);
  const BlockPattern pattern(cfg.n, cfg.d);

  Matrix A = gen_gaussian_matrix(cfg.m, pattern.dim(), mix_seed(seed, kMatrixStream));

  std::optional<BlockVector> x;
  std::optional<BlockIndexSet> T0;
  if (cfg.theta) {
    x = gen_power_decay_signal(pattern, *cfg.theta, mix_seed(seed, kSignalStream));
    T0 = top_k_blocks(*x, cfg.k);
  } else {
    auto [signal, support] = gen_block_sparse_signal(pattern, cfg.k, mix_seed(seed, kSignalStream));
    x = std::move(signal);
    T0 = std::move(support);
  }

  BlockIndexSet estimate = gen_support_estimate(*T0, cfg.rho, cfg.alpha, mix_seed(seed, kEstimateStream));
  Vector weights = make_block_weights(estimate, cfg.omega);

  Vector y = A * x->values();
  if (cfg.sigma > 0.0) {
    Rng noise(mix_seed(seed, kNoiseStream));
    for (Index i = 0; i < y.size(); ++i) y(i) += cfg.sigma * noise.gaussian();
  }
  return ReplicationInstance{std::move(A), std::move(*x), std::move(*T0), std::move(estimate), std::move(weights),
                             std::move(y)};
}

ExperimentRecord run_replication(const ScenarioConfig& cfg, std::size_t scenario, int rep) {
  const auto start = std::chrono::steady_clock::now();
  const ReplicationInstance inst = make_replication(cfg, rep);

  SolverConfig solver;
  solver.p = cfg.p;
  solver.lambda = cfg.effective_lambda();

  ExperimentRecord rec;
  rec.scenario = scenario;
  rec.rep = rep;
  rec.seed = cfg.base_seed + static_cast<std::uint64_t>(rep);
  rec.config = cfg;
  try {
    const RecoveryResult res = irls_recover(inst.A, inst.y, inst.x.pattern(), inst.weights, solver);
    rec.snr_db = snr_db(inst.x, res.x_hat);
    rec.iterations = res.iterations;
    rec.converged = res.converged;
  } catch (const SolverError& e) {
    rec.snr_db = snr_db(inst.x, BlockVector(inst.x.pattern(), e.last_iterate()));
    rec.iterations = e.iteration();
    rec.converged = false;
  }
  rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::vector<ExperimentRecord> run_scenario(const ScenarioConfig& cfg, std::size_t scenario) {
  cfg.validate();
  std::vector<ExperimentRecord> out;
  out.reserve(static_cast<std::size_t>(cfg.reps));
  for (int r = 0; r < cfg.reps; ++r) out.push_back(run_replication(cfg, scenario, r));
  return out;
}

std::vector<ExperimentRecord> run_cells(const std::vector<ScenarioConfig>& cfgs, int threads) {
  if (threads < 1) throw std::invalid_argument("run_cells: threads must be >= 1");
  std::vector<std::pair<std::size_t, int>> jobs;
  for (std::size_t s = 0; s < cfgs.size(); ++s) {
    cfgs[s].validate();
    for (int r = 0; r < cfgs[s].reps; ++r) jobs.emplace_back(s, r);
  }

  std::vector<ExperimentRecord> records(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      try {
        records[j] = run_replication(cfgs[jobs[j].first], jobs[j].first, jobs[j].second);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };

  const auto count = std::min<std::size_t>(static_cast<std::size_t>(threads), std::max<std::size_t>(jobs.size(), 1));
  std::vector<std::jthread> pool;
  for (std::size_t t = 1; t < count; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();
  if (failure) std::rethrow_exception(failure);
  // jobs are generated in (scenario, rep) order, so records already are too.
  return records;
}

void write_records_csv(std::ostream& out, const std::vector<ExperimentRecord>& records, const CsvOptions& opts) {
  using io::format_double;
  out << "scenario,rep,seed,n,d,k,m,p,sigma,omega,rho,alpha,theta,lambda,snr_db,iterations,converged,wall_ms\n";
  for (const auto& r : records) {
    const ScenarioConfig& c = r.config;
    out << r.scenario << ',' << r.rep << ',' << r.seed << ',' << c.n << ',' << c.d << ',' << c.k << ',' << c.m << ','
        << format_double(c.p) << ',' << format_double(c.sigma) << ',' << format_double(c.omega) << ','
        << format_double(c.rho) << ',' << format_double(c.alpha) << ',' << (c.theta ? format_double(*c.theta) : "")
        << ',' << format_double(c.effective_lambda()) << ',' << format_double(r.snr_db) << ',' << r.iterations << ','
        << (r.converged ? 1 : 0) << ',' << format_double(opts.timing ? r.wall_ms : 0.0) << '\n';
  }
}

void run_sweep(const std::vector<ScenarioConfig>& cfgs, int threads, const std::filesystem::path& out,
               const CsvOptions& opts) {
  const auto records = run_cells(cfgs, threads);
  std::filesystem::path tmp = out;
  tmp += ".partial";
  try {
    {
      std::ofstream file(tmp, std::ios::binary);
      if (!file) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
      write_records_csv(file, records, opts);
      file.flush();
      if (!file) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, out);
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw;
  }
}

std::vector<ScenarioSummary> summarize(const std::vector<ExperimentRecord>& records) {
  std::map<std::size_t, ScenarioSummary> by_scenario;
  std::map<std::size_t, double> sums;
  for (const auto& r : records) {
    auto [it, inserted] = by_scenario.try_emplace(r.scenario);
    ScenarioSummary& s = it->second;
    if (inserted) {
      s.scenario = r.scenario;
      s.config = r.config;
    }
    if (std::isinf(r.snr_db)) {
      ++s.exact_count;
    } else {
      ++s.finite_count;
      sums[r.scenario] += r.snr_db;
    }
    if (r.converged) ++s.converged_count;
  }
  std::vector<ScenarioSummary> out;
  for (auto& [id, s] : by_scenario) {
    s.mean_finite_snr = s.finite_count > 0 ? sums[id] / s.finite_count : std::nan("");
    out.push_back(s);
  }
  return out;
}

void write_summary_csv(std::ostream& out, const std::vector<ScenarioSummary>& rows) {
  using io::format_double;
  out << "scenario,n,d,k,m,p,sigma,omega,rho,alpha,theta,lambda,mean_snr_db,finite_count,exact_count,converged_count\n";
  for (const auto& s : rows) {
    const ScenarioConfig& c = s.config;
    out << s.scenario << ',' << c.n << ',' << c.d << ',' << c.k << ',' << c.m << ',' << format_double(c.p) << ','
        << format_double(c.sigma) << ',' << format_double(c.omega) << ',' << format_double(c.rho) << ','
        << format_double(c.alpha) << ',' << (c.theta ? format_double(*c.theta) : "") << ','
        << format_double(c.effective_lambda()) << ',' << format_double(s.mean_finite_snr) << ',' << s.finite_count
        << ',' << s.exact_count << ',' << s.converged_count << '\n';
  }
}

// ---------------------------------------------------------------------------
// Sweep config parsing

namespace {

std::string trim_copy(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim_copy(item));
  return out;
}

template <typename Int>
Int parse_int(const std::string& text) {
  Int v{};
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw std::invalid_argument("not an integer: '" + text + "'");
  }
  return v;
}

// Field order fixes the Cartesian expansion order (last key varies fastest).
const std::vector<std::string>& field_names() {
  static const std::vector<std::string> names = {"n",     "d",   "k",     "m",     "p",      "sigma", "omega",
                                                 "rho",   "alpha", "theta", "lambda", "reps",  "base_seed"};
  return names;
}

void assign_field(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "n") cfg.n = parse_int<Index>(value);
  else if (key == "d") cfg.d = parse_int<Index>(value);
  else if (key == "k") cfg.k = parse_int<Index>(value);
  else if (key == "m") cfg.m = parse_int<Index>(value);
  else if (key == "p") cfg.p = io::parse_double(value);
  else if (key == "sigma") cfg.sigma = io::parse_double(value);
  else if (key == "omega") cfg.omega = io::parse_double(value);
  else if (key == "rho") cfg.rho = io::parse_double(value);
  else if (key == "alpha") cfg.alpha = io::parse_double(value);
  else if (key == "theta") cfg.theta = (value.empty() || value == "none") ? std::nullopt : std::optional(io::parse_double(value));
  else if (key == "lambda") cfg.lambda = (value.empty() || value == "auto") ? std::nullopt : std::optional(io::parse_double(value));
  else if (key == "reps") cfg.reps = parse_int<int>(value);
  else if (key == "base_seed") cfg.base_seed = parse_int<std::uint64_t>(value);
  else throw std::invalid_argument("unknown key '" + key + "'");
}

struct Section {
  std::string name;
  int line = 0;
  std::map<std::string, std::vector<std::string>> values;
};

void expand_section(const Section& section, std::uint64_t default_seed, std::vector<ScenarioConfig>& out) {
  for (const char* required : {"n", "d", "k", "m", "p"}) {
    if (!section.values.count(required)) {
      throw std::invalid_argument("section [" + section.name + "]: missing key '" + required + "'");
    }
  }
  std::vector<std::pair<std::string, const std::vector<std::string>*>> axes;
  for (const auto& name : field_names()) {
    auto it = section.values.find(name);
    if (it != section.values.end()) axes.emplace_back(name, &it->second);
  }
  std::vector<std::size_t> pos(axes.size(), 0);
  while (true) {
    ScenarioConfig cfg;
    cfg.base_seed = default_seed;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      try {
        assign_field(cfg, axes[a].first, (*axes[a].second)[pos[a]]);
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument("section [" + section.name + "] key '" + axes[a].first + "': " + e.what());
      }
    }
    try {
      cfg.validate();
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("section [" + section.name + "]: " + e.what());
    }
    out.push_back(cfg);

    std::size_t a = axes.size();
    while (a > 0) {
      --a;
      if (++pos[a] < axes[a].second->size()) break;
      pos[a] = 0;
      if (a == 0) return;
    }
  }
}

}  // namespace

std::vector<ScenarioConfig> parse_sweep_config(std::istream& in, std::uint64_t default_seed) {
  std::vector<Section> sections;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim_copy(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw std::invalid_argument("line " + std::to_string(lineno) + ": malformed section header");
      sections.push_back(Section{trim_copy(line.substr(1, line.size() - 2)), lineno, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("line " + std::to_string(lineno) + ": expected key = value");
    if (sections.empty()) throw std::invalid_argument("line " + std::to_string(lineno) + ": key outside a section");
    const std::string key = trim_copy(line.substr(0, eq));
    if (std::find(field_names().begin(), field_names().end(), key) == field_names().end()) {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    if (sections.back().values.count(key)) {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    sections.back().values[key] = split_list(trim_copy(line.substr(eq + 1)));
  }

  std::vector<ScenarioConfig> out;
  for (const auto& s : sections) expand_section(s, default_seed, out);
  return out;
}

std::vector<ScenarioConfig> parse_sweep_config(const std::filesystem::path& path, std::uint64_t default_seed) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_sweep_config(in, default_seed);
}

}  // namespace blockcs
