#ifndef BLOCKCS_RANDOM_HPP
#define BLOCKCS_RANDOM_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace blockcs {

/// Seeded generator used for every random draw in the library.
///
/// Engine: std::mt19937_64 (fully specified by the standard, so raw output
/// is identical on every conforming implementation). Uniforms take the top
/// 53 bits; Gaussians use the Box-Muller transform with the cached second
/// variate. Distribution objects from <random> are avoided because their
/// algorithms are implementation-defined.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform();
  /// Standard normal.
  double gaussian();
  /// Uniform integer in [0, bound), unbiased (rejection sampling).
  std::uint64_t below(std::uint64_t bound);
  /// k distinct values drawn uniformly from [0, n), in draw order.
  std::vector<std::uint64_t> sample_without_replacement(std::uint64_t n, std::uint64_t k);

private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

/// SplitMix64 finalizer; derives independent sub-stream seeds from one seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace blockcs

#endif  // BLOCKCS_RANDOM_HPP
