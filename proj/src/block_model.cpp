#include "blockcs/block_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace blockcs {

BlockPattern::BlockPattern(Index num_blocks, Index block_len) : n_(num_blocks), d_(block_len) {
  if (n_ < 1 || d_ < 1) {
    throw std::invalid_argument("BlockPattern: need n >= 1 and d >= 1, got n=" + std::to_string(n_) +
                                " d=" + std::to_string(d_));
  }
}

BlockVector::BlockVector(BlockPattern pattern) : pattern_(pattern), values_(Vector::Zero(pattern.dim())) {}

BlockVector::BlockVector(BlockPattern pattern, Vector values) : pattern_(pattern), values_(std::move(values)) {
  if (values_.size() != pattern_.dim()) {
    throw std::invalid_argument("BlockVector: expected " + std::to_string(pattern_.dim()) + " entries, got " +
                                std::to_string(values_.size()));
  }
  if (!values_.allFinite()) {
    throw std::invalid_argument("BlockVector: non-finite entry");
  }
}

BlockVector BlockVector::masked(const std::vector<bool>& keep) const {
  if (static_cast<Index>(keep.size()) != pattern_.num_blocks()) {
    throw std::invalid_argument("BlockVector::masked: mask length mismatch");
  }
  Vector out = values_;
  for (Index i = 0; i < pattern_.num_blocks(); ++i) {
    if (!keep[static_cast<std::size_t>(i)]) {
      out.segment(pattern_.block_begin(i), pattern_.block_len()).setZero();
    }
  }
  return BlockVector(pattern_, std::move(out));
}

BlockIndexSet::BlockIndexSet(BlockPattern pattern) : pattern_(pattern) {}

BlockIndexSet::BlockIndexSet(BlockPattern pattern, std::vector<Index> indices)
    : pattern_(pattern), indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
    throw std::invalid_argument("BlockIndexSet: duplicate block index");
  }
  if (!indices_.empty() && (indices_.front() < 0 || indices_.back() >= pattern_.num_blocks())) {
    throw std::invalid_argument("BlockIndexSet: block index out of range");
  }
}

BlockIndexSet BlockIndexSet::all(BlockPattern pattern) {
  std::vector<Index> idx(static_cast<std::size_t>(pattern.num_blocks()));
  std::iota(idx.begin(), idx.end(), Index{0});
  return BlockIndexSet(pattern, std::move(idx));
}

bool BlockIndexSet::contains(Index i) const { return std::binary_search(indices_.begin(), indices_.end(), i); }

std::vector<bool> BlockIndexSet::mask() const {
  std::vector<bool> m(static_cast<std::size_t>(pattern_.num_blocks()), false);
  for (Index i : indices_) m[static_cast<std::size_t>(i)] = true;
  return m;
}

BlockIndexSet BlockIndexSet::complement() const {
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(pattern_.num_blocks()) - indices_.size());
  for (Index i = 0; i < pattern_.num_blocks(); ++i) {
    if (!contains(i)) out.push_back(i);
  }
  return BlockIndexSet(pattern_, std::move(out));
}

std::size_t BlockIndexSet::intersection_size(const BlockIndexSet& other) const {
  std::size_t count = 0;
  auto a = indices_.begin();
  auto b = other.indices_.begin();
  while (a != indices_.end() && b != other.indices_.end()) {
    if (*a < *b) {
      ++a;
    } else if (*b < *a) {
      ++b;
    } else {
      ++count;
      ++a;
      ++b;
    }
  }
  return count;
}

BlockVector restrict_to(const BlockVector& x, const BlockIndexSet& T) {
  if (!(x.pattern() == T.pattern())) throw std::invalid_argument("restrict_to: pattern mismatch");
  return x.masked(T.mask());
}

void check_exponent(double p) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::invalid_argument("exponent p must lie in (0, 1], got " + std::to_string(p));
  }
}

Vector block_norms(const BlockVector& x) {
  const Index n = x.pattern().num_blocks();
  Vector norms(n);
  for (Index i = 0; i < n; ++i) norms(i) = x.block(i).norm();
  return norms;
}

double mixed_norm_pow(const BlockVector& x, double p) {
  check_exponent(p);
  return block_norms(x).array().pow(p).sum();
}

double mixed_norm(const BlockVector& x, double p) { return std::pow(mixed_norm_pow(x, p), 1.0 / p); }

Index block_l20(const BlockVector& x, double tol) {
  if (!(tol >= 0.0)) throw std::invalid_argument("block_l20: tolerance must be nonnegative");
  return (block_norms(x).array() > tol).count();
}

BlockIndexSet top_k_blocks(const BlockVector& x, Index k) {
  const Index n = x.pattern().num_blocks();
  if (k < 0 || k > n) throw std::invalid_argument("top_k_blocks: need 0 <= k <= n");
  const Vector norms = block_norms(x);
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return norms(a) > norms(b); });
  order.resize(static_cast<std::size_t>(k));
  return BlockIndexSet(x.pattern(), std::move(order));
}

std::pair<BlockVector, BlockIndexSet> best_k_block_approx(const BlockVector& x, Index k) {
  BlockIndexSet T0 = top_k_blocks(x, k);
  return {restrict_to(x, T0), std::move(T0)};
}

double snr_db(const BlockVector& x_true, const BlockVector& x_rec) {
  if (!(x_true.pattern() == x_rec.pattern())) throw std::invalid_argument("snr_db: pattern mismatch");
  const double signal = x_true.values().norm();
  if (signal == 0.0) throw std::invalid_argument("snr_db: reference signal is zero");
  const double error = (x_true.values() - x_rec.values()).norm();
  if (error == 0.0) return kInfiniteSnr;
  return 20.0 * std::log10(signal / error);
}

double weighted_objective(const BlockVector& x, const Vector& w, double p) {
  check_exponent(p);
  if (w.size() != x.pattern().num_blocks()) throw std::invalid_argument("weighted_objective: weight length mismatch");
  if ((w.array() < 0.0).any() || (w.array() > 1.0).any() || !w.allFinite()) {
    throw std::invalid_argument("weighted_objective: weights must lie in [0, 1]");
  }
  return (w.array() * block_norms(x).array().pow(p)).sum();
}

}  // namespace blockcs
