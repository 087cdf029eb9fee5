#ifndef WBCS_BLOCK_MODEL_HPP
#define WBCS_BLOCK_MODEL_HPP

// Block structures, block signals, mixed norms and block supports.
//
// Block indices are 0-based throughout the library.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <memory>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wbcs/random.hpp"

namespace wbcs {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Partition of coordinates 0..N-1 into M consecutive blocks of lengths d_0..d_{M-1}.
///
/// Copies share the same immutable storage.
class BlockStructure {
 public:
  BlockStructure() : BlockStructure(std::vector<int>{1}) {}

  explicit BlockStructure(std::vector<int> block_lengths) {
    if (block_lengths.empty())
      throw std::invalid_argument("BlockStructure: at least one block required");
    auto data = std::make_shared<Data>();
    data->offsets.reserve(block_lengths.size() + 1);
    data->offsets.push_back(0);
    for (int len : block_lengths) {
      if (len < 1) throw std::invalid_argument("BlockStructure: block lengths must be >= 1");
      data->offsets.push_back(data->offsets.back() + len);
    }
    data->lengths = std::move(block_lengths);
    data_ = std::move(data);
  }

  /// M blocks of identical length.
  static BlockStructure uniform(int num_blocks, int block_len) {
    if (num_blocks < 1) throw std::invalid_argument("BlockStructure: num_blocks must be >= 1");
    return BlockStructure(std::vector<int>(static_cast<std::size_t>(num_blocks), block_len));
  }

  int num_blocks() const { return static_cast<int>(data_->lengths.size()); }
  int dim() const { return data_->offsets.back(); }
  int offset(int block) const { return data_->offsets[static_cast<std::size_t>(block)]; }
  int length(int block) const { return data_->lengths[static_cast<std::size_t>(block)]; }
  const std::vector<int>& lengths() const { return data_->lengths; }

  /// Block owning coordinate j.
  int block_of(int coord) const {
    auto it = std::upper_bound(data_->offsets.begin(), data_->offsets.end(), coord);
    return static_cast<int>(it - data_->offsets.begin()) - 1;
  }

  bool operator==(const BlockStructure& other) const {
    return data_ == other.data_ || data_->lengths == other.data_->lengths;
  }

 private:
  struct Data {
    std::vector<int> lengths;
    std::vector<int> offsets;
  };
  std::shared_ptr<const Data> data_;
};

/// Sorted, duplicate-free set of block indices.
class BlockIndexSet {
 public:
  BlockIndexSet() = default;
  BlockIndexSet(std::initializer_list<int> indices) : BlockIndexSet(std::vector<int>(indices)) {}
  explicit BlockIndexSet(std::vector<int> indices) : indices_(std::move(indices)) {
    std::sort(indices_.begin(), indices_.end());
    indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
    if (!indices_.empty() && indices_.front() < 0)
      throw std::invalid_argument("BlockIndexSet: negative block index");
  }

  static BlockIndexSet all(int num_blocks) {
    std::vector<int> idx(static_cast<std::size_t>(num_blocks));
    std::iota(idx.begin(), idx.end(), 0);
    return BlockIndexSet(std::move(idx));
  }

  const std::vector<int>& indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  bool contains(int block) const { return std::binary_search(indices_.begin(), indices_.end(), block); }
  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }

  /// Throws unless every index is < num_blocks.
  void check_within(int num_blocks) const {
    if (!indices_.empty() && indices_.back() >= num_blocks)
      throw std::out_of_range("BlockIndexSet: block index " + std::to_string(indices_.back()) +
                              " out of range for M=" + std::to_string(num_blocks));
  }

  BlockIndexSet complement(int num_blocks) const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(num_blocks) - std::min<std::size_t>(size(), num_blocks));
    for (int i = 0; i < num_blocks; ++i)
      if (!contains(i)) out.push_back(i);
    return BlockIndexSet(std::move(out));
  }

  friend BlockIndexSet set_union(const BlockIndexSet& a, const BlockIndexSet& b) {
    std::vector<int> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return BlockIndexSet(std::move(out));
  }
  friend BlockIndexSet set_intersection(const BlockIndexSet& a, const BlockIndexSet& b) {
    std::vector<int> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return BlockIndexSet(std::move(out));
  }
  friend BlockIndexSet set_difference(const BlockIndexSet& a, const BlockIndexSet& b) {
    std::vector<int> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return BlockIndexSet(std::move(out));
  }
  friend BlockIndexSet set_symmetric_difference(const BlockIndexSet& a, const BlockIndexSet& b) {
    std::vector<int> out;
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return BlockIndexSet(std::move(out));
  }

  bool operator==(const BlockIndexSet&) const = default;

 private:
  std::vector<int> indices_;
};

/// A length-N vector read through a BlockStructure.
class BlockSignal {
 public:
  BlockSignal() = default;
  BlockSignal(BlockStructure structure, Vector values)
      : structure_(std::move(structure)), values_(std::move(values)) {
    if (values_.size() != structure_.dim())
      throw std::invalid_argument("BlockSignal: values length " + std::to_string(values_.size()) +
                                  " does not match N=" + std::to_string(structure_.dim()));
  }

  static BlockSignal zeros(const BlockStructure& structure) {
    return BlockSignal(structure, Vector::Zero(structure.dim()));
  }

  const BlockStructure& structure() const { return structure_; }
  const Vector& values() const { return values_; }
  Vector& values() { return values_; }
  int dim() const { return static_cast<int>(values_.size()); }
  int num_blocks() const { return structure_.num_blocks(); }

  auto block(int i) const { return values_.segment(structure_.offset(i), structure_.length(i)); }
  auto block(int i) { return values_.segment(structure_.offset(i), structure_.length(i)); }

  double block_norm(int i) const { return block(i).norm(); }

  /// Per-block l2 norms.
  Vector block_norms() const {
    Vector r(num_blocks());
    for (int i = 0; i < num_blocks(); ++i) r[i] = block_norm(i);
    return r;
  }

  BlockSignal operator+(const BlockSignal& o) const { return {structure_, values_ + o.values_}; }
  BlockSignal operator-(const BlockSignal& o) const { return {structure_, values_ - o.values_}; }
  BlockSignal operator*(double s) const { return {structure_, values_ * s}; }

 private:
  BlockStructure structure_;
  Vector values_;
};

enum class MixedNorm { L0, L1, L2, Linf };

/// Per-block l2 norms of a raw vector under a structure.
inline Vector block_norms(const BlockStructure& s, const Vector& v) {
  Vector r(s.num_blocks());
  for (int i = 0; i < s.num_blocks(); ++i) r[i] = v.segment(s.offset(i), s.length(i)).norm();
  return r;
}

/// Mixed l2/lp norm: the p-norm of the vector of block l2 norms (p = 0 counts nonzero blocks).
inline double mixed_norm(const BlockSignal& x, MixedNorm p) {
  const Vector r = x.block_norms();
  switch (p) {
    case MixedNorm::L0:
      return static_cast<double>((r.array() > 0.0).count());
    case MixedNorm::L1:
      return r.sum();
    case MixedNorm::L2:
      return r.norm();
    case MixedNorm::Linf:
      return r.size() == 0 ? 0.0 : r.maxCoeff();
  }
  return 0.0;
}

/// Blocks whose l2 norm exceeds tol.
inline BlockIndexSet block_support(const BlockSignal& x, double tol = 0.0) {
  if (!(tol >= 0.0)) throw std::invalid_argument("block_support: tol must be >= 0");
  std::vector<int> idx;
  for (int i = 0; i < x.num_blocks(); ++i)
    if (x.block_norm(i) > tol) idx.push_back(i);
  return BlockIndexSet(std::move(idx));
}

/// x on the blocks of gamma, zero elsewhere.
inline BlockSignal restrict_to(const BlockSignal& x, const BlockIndexSet& gamma) {
  gamma.check_within(x.num_blocks());
  BlockSignal out = BlockSignal::zeros(x.structure());
  for (int i : gamma) out.block(i) = x.block(i);
  return out;
}

/// Indices of the k largest-norm blocks; ties go to the lower index.
inline BlockIndexSet largest_blocks(const Vector& norms, int k) {
  std::vector<int> order(static_cast<std::size_t>(norms.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return norms[a] > norms[b]; });
  order.resize(static_cast<std::size_t>(k));
  return BlockIndexSet(std::move(order));
}

/// Best block k-sparse approximation x[max(k)].
inline BlockSignal best_block_k_approx(const BlockSignal& x, int k) {
  if (k < 1 || k > x.num_blocks())
    throw std::invalid_argument("best_block_k_approx: need 1 <= k <= M");
  return restrict_to(x, largest_blocks(x.block_norms(), k));
}

/// k blocks chosen uniformly at random, nonzero entries i.i.d. N(0,1).
inline BlockSignal random_block_sparse(const BlockStructure& s, int k, std::uint64_t seed) {
  if (k < 0 || k > s.num_blocks())
    throw std::invalid_argument("random_block_sparse: need 0 <= k <= M");
  Rng rng(seed);
  std::vector<int> blocks = sample_without_replacement(s.num_blocks(), k, rng);
  std::sort(blocks.begin(), blocks.end());
  BlockSignal x = BlockSignal::zeros(s);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int b : blocks)
    for (int j = 0; j < s.length(b); ++j) x.block(b)[j] = normal(rng);
  return x;
}

/// Disjoint estimated supports with one weight each, plus the declared (rho, alpha) they were
/// generated from (may be empty when the estimate was built by hand).
struct SupportEstimate {
  std::vector<BlockIndexSet> sets;
  std::vector<double> weights;
  std::vector<double> rhos;
  std::vector<double> alphas;

  std::size_t num_sets() const { return sets.size(); }

  BlockIndexSet union_of_sets() const {
    BlockIndexSet u;
    for (const auto& s : sets) u = set_union(u, s);
    return u;
  }

  /// Throws std::invalid_argument if sets overlap or sizes disagree.
  void validate(int num_blocks) const {
    if (sets.size() != weights.size())
      throw std::invalid_argument("SupportEstimate: one weight per set required");
    std::size_t total = 0;
    for (const auto& s : sets) {
      s.check_within(num_blocks);
      total += s.size();
    }
    if (union_of_sets().size() != total)
      throw std::invalid_argument("SupportEstimate: estimated supports overlap");
  }
};

}  // namespace wbcs

#endif  // WBCS_BLOCK_MODEL_HPP
