#ifndef BLOCKCS_BLOCK_MODEL_HPP
#define BLOCKCS_BLOCK_MODEL_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace blockcs {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Partition of an N-vector into n contiguous blocks of equal length d.
/// Block i occupies scalar entries [i*d, (i+1)*d).
class BlockPattern {
public:
  BlockPattern(Index num_blocks, Index block_len);

  Index num_blocks() const { return n_; }
  Index block_len() const { return d_; }
  Index dim() const { return n_ * d_; }

  Index block_begin(Index i) const { return i * d_; }

  friend bool operator==(const BlockPattern&, const BlockPattern&) = default;

private:
  Index n_;
  Index d_;
};

/// A real N-vector carrying its block layout.
class BlockVector {
public:
  explicit BlockVector(BlockPattern pattern);  // zero vector
  BlockVector(BlockPattern pattern, Vector values);

  const BlockPattern& pattern() const { return pattern_; }
  const Vector& values() const { return values_; }

  auto block(Index i) const { return values_.segment(pattern_.block_begin(i), pattern_.block_len()); }

  /// Copy of this vector with every block outside `keep` set to zero.
  /// `keep` must be a per-block mask of length n.
  BlockVector masked(const std::vector<bool>& keep) const;

private:
  BlockPattern pattern_;
  Vector values_;
};

/// Sorted set of distinct block indices in [0, n).
class BlockIndexSet {
public:
  explicit BlockIndexSet(BlockPattern pattern);  // empty set
  /// Indices may arrive unsorted; duplicates and out-of-range values throw.
  BlockIndexSet(BlockPattern pattern, std::vector<Index> indices);

  static BlockIndexSet all(BlockPattern pattern);

  const BlockPattern& pattern() const { return pattern_; }
  const std::vector<Index>& indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  bool contains(Index i) const;

  std::vector<bool> mask() const;
  BlockIndexSet complement() const;
  std::size_t intersection_size(const BlockIndexSet& other) const;

  friend bool operator==(const BlockIndexSet& a, const BlockIndexSet& b) {
    return a.pattern_ == b.pattern_ && a.indices_ == b.indices_;
  }

private:
  BlockPattern pattern_;
  std::vector<Index> indices_;
};

/// x restricted to the blocks of T, zeros elsewhere.
BlockVector restrict_to(const BlockVector& x, const BlockIndexSet& T);

/// Euclidean norm of every block.
Vector block_norms(const BlockVector& x);

/// (sum_i ||x[i]||_2^p)^(1/p), 0 < p <= 1.
double mixed_norm(const BlockVector& x, double p);

/// sum_i ||x[i]||_2^p, i.e. mixed_norm^p without the final root.
double mixed_norm_pow(const BlockVector& x, double p);

/// Number of blocks whose Euclidean norm exceeds tol.
Index block_l20(const BlockVector& x, double tol = 0.0);

/// Keeps the k blocks of largest norm (ties to the lower index).
std::pair<BlockVector, BlockIndexSet> best_k_block_approx(const BlockVector& x, Index k);

/// Indices of the k largest-norm blocks of x, same tie rule as best_k_block_approx.
BlockIndexSet top_k_blocks(const BlockVector& x, Index k);

inline constexpr double kInfiniteSnr = std::numeric_limits<double>::infinity();

/// 20 log10(||x_true|| / ||x_true - x_rec||). Exact recovery yields kInfiniteSnr.
double snr_db(const BlockVector& x_true, const BlockVector& x_rec);

/// sum_i w_i ||x[i]||_2^p with w_i in [0,1].
double weighted_objective(const BlockVector& x, const Vector& w, double p);

/// Throws std::invalid_argument unless 0 < p <= 1.
void check_exponent(double p);

}  // namespace blockcs

#endif  // BLOCKCS_BLOCK_MODEL_HPP
