#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "wbcs/block_model.hpp"

namespace wbcs {
namespace {

BlockSignal signal_from(std::vector<int> lengths, std::vector<double> values) {
  return BlockSignal(BlockStructure(std::move(lengths)), Eigen::Map<Vector>(values.data(), values.size()));
}

BlockSignal random_signal(const BlockStructure& s, Rng& rng, double zero_prob = 0.3) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::bernoulli_distribution drop(zero_prob);
  BlockSignal x = BlockSignal::zeros(s);
  for (int b = 0; b < s.num_blocks(); ++b)
    if (!drop(rng))
      for (int j = 0; j < s.length(b); ++j) x.block(b)[j] = g(rng);
  return x;
}

TEST(BlockStructure, OffsetsAndDimension) {
  const BlockStructure s({2, 3, 1});
  EXPECT_EQ(s.num_blocks(), 3);
  EXPECT_EQ(s.dim(), 6);
  EXPECT_EQ(s.offset(0), 0);
  EXPECT_EQ(s.offset(1), 2);
  EXPECT_EQ(s.offset(2), 5);
  EXPECT_EQ(s.block_of(4), 1);
  EXPECT_EQ(s.block_of(5), 2);
}

TEST(BlockStructure, RejectsEmptyOrNonPositiveBlocks) {
  EXPECT_THROW(BlockStructure(std::vector<int>{}), std::invalid_argument);
  EXPECT_THROW(BlockStructure({2, 0}), std::invalid_argument);
}

TEST(BlockSignal, LengthMustMatchStructure) {
  EXPECT_THROW(BlockSignal(BlockStructure::uniform(2, 2), Vector::Zero(3)), std::invalid_argument);
}

TEST(MixedNorm, ZeroSignal) {
  const auto x = BlockSignal::zeros(BlockStructure::uniform(4, 3));
  for (auto p : {MixedNorm::L1, MixedNorm::L2, MixedNorm::Linf}) EXPECT_EQ(mixed_norm(x, p), 0.0);
  EXPECT_EQ(mixed_norm(x, MixedNorm::L0), 0.0);
}

TEST(MixedNorm, HandEvaluated) {
  const auto x = signal_from({2, 2}, {3, 4, 0, 0});
  EXPECT_DOUBLE_EQ(mixed_norm(x, MixedNorm::L1), 5.0);
  EXPECT_DOUBLE_EQ(mixed_norm(x, MixedNorm::L2), 5.0);
  EXPECT_DOUBLE_EQ(mixed_norm(x, MixedNorm::Linf), 5.0);
  EXPECT_DOUBLE_EQ(mixed_norm(x, MixedNorm::L0), 1.0);

  const auto y = signal_from({1, 2, 3}, {1, 0, 1, 0, 0, -1});
  EXPECT_DOUBLE_EQ(mixed_norm(y, MixedNorm::L1), 3.0);
  EXPECT_DOUBLE_EQ(mixed_norm(y, MixedNorm::L2), std::sqrt(3.0));
}

TEST(MixedNorm, OrderingAndSparsityProperties) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<int> len(1, 4), count(1, 10);
    std::vector<int> lengths(static_cast<std::size_t>(count(rng)));
    for (int& l : lengths) l = len(rng);
    const BlockStructure s(lengths);
    const auto x = random_signal(s, rng);
    const double inf = mixed_norm(x, MixedNorm::Linf), two = mixed_norm(x, MixedNorm::L2),
                 one = mixed_norm(x, MixedNorm::L1), zero = mixed_norm(x, MixedNorm::L0);
    EXPECT_LE(inf, two + 1e-12);
    EXPECT_LE(two, one + 1e-12);
    EXPECT_LE(one, std::sqrt(zero) * two + 1e-12);
    EXPECT_NEAR(two, x.values().norm(), 1e-12);
  }
}

TEST(MixedNorm, UnitBlocksReduceToVectorNorms) {
  Rng rng(5);
  const auto s = BlockStructure::uniform(9, 1);
  const auto x = random_signal(s, rng);
  const Vector& v = x.values();
  EXPECT_NEAR(mixed_norm(x, MixedNorm::L1), v.lpNorm<1>(), 1e-12);
  EXPECT_NEAR(mixed_norm(x, MixedNorm::L2), v.norm(), 1e-12);
  EXPECT_NEAR(mixed_norm(x, MixedNorm::Linf), v.lpNorm<Eigen::Infinity>(), 1e-12);
  EXPECT_EQ(mixed_norm(x, MixedNorm::L0), static_cast<double>((v.array() != 0.0).count()));
}

TEST(BlockSupport, Definition) {
  EXPECT_TRUE(block_support(BlockSignal::zeros(BlockStructure::uniform(3, 2))).empty());
  // block norms (0, 2, 0, 1): 1-based {2,4}
  const auto x = signal_from({1, 1, 1, 1}, {0, 2, 0, -1});
  EXPECT_EQ(block_support(x), (BlockIndexSet{1, 3}));
  const auto y = signal_from({1, 1}, {1e-12, 2});
  EXPECT_EQ(block_support(y, 1e-9), (BlockIndexSet{1}));
  EXPECT_EQ(block_support(y, 0.0), (BlockIndexSet{0, 1}));
  EXPECT_THROW(block_support(y, -1.0), std::invalid_argument);
}

TEST(BestBlockKApprox, KeepsLargestBlocks) {
  // block norms (3, 1, 2), k = 2: keep blocks 0 and 2
  const auto x = signal_from({1, 1, 1}, {3, 1, -2});
  const auto a = best_block_k_approx(x, 2);
  EXPECT_EQ(a.values(), (Vector(3) << 3, 0, -2).finished());
}

TEST(BestBlockKApprox, TiesGoToLowerIndex) {
  const auto x = signal_from({1, 1, 1}, {2, -2, 1});
  EXPECT_EQ(best_block_k_approx(x, 1).values(), (Vector(3) << 2, 0, 0).finished());
}

TEST(BestBlockKApprox, SparseSignalIsFixed) {
  const auto x = signal_from({2, 2, 2}, {0, 0, 1, 2, 0, 0});
  EXPECT_EQ(best_block_k_approx(x, 1).values(), x.values());
  EXPECT_EQ(best_block_k_approx(x, 3).values(), x.values());
  EXPECT_THROW(best_block_k_approx(x, 0), std::invalid_argument);
  EXPECT_THROW(best_block_k_approx(x, 4), std::invalid_argument);
}

// Brute force over every k-subset: the kept blocks minimize ||x - s||_{2,1}.
TEST(BestBlockKApprox, MatchesBruteForceMinimizer) {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 3 + trial % 6;  // M <= 8
    const auto s = BlockStructure::uniform(m, 1 + trial % 3);
    const auto x = random_signal(s, rng, 0.2);
    for (int k = 1; k <= m; ++k) {
      const double got = mixed_norm(x - best_block_k_approx(x, k), MixedNorm::L1);
      double best = INFINITY;
      for (unsigned mask = 0; mask < (1u << m); ++mask) {
        if (std::popcount(mask) != k) continue;
        std::vector<int> keep;
        for (int i = 0; i < m; ++i)
          if (mask & (1u << i)) keep.push_back(i);
        best = std::min(best, mixed_norm(x - restrict_to(x, BlockIndexSet(keep)), MixedNorm::L1));
      }
      EXPECT_NEAR(got, best, 1e-12);
    }
  }
}

TEST(Restrict, FullEmptyAndPartition) {
  Rng rng(3);
  const auto s = BlockStructure({1, 2, 3, 2});
  const auto x = random_signal(s, rng, 0.0);
  EXPECT_EQ(restrict_to(x, BlockIndexSet::all(4)).values(), x.values());
  EXPECT_TRUE(restrict_to(x, {}).values().isZero());

  const BlockIndexSet gamma{0, 2};
  const auto in = restrict_to(x, gamma);
  const auto out = restrict_to(x, gamma.complement(4));
  EXPECT_EQ((in + out).values(), x.values());
  EXPECT_TRUE(set_intersection(block_support(in), block_support(out)).empty());
  EXPECT_EQ(restrict_to(in, gamma).values(), in.values());
  EXPECT_THROW(restrict_to(x, {4}), std::out_of_range);
}

TEST(Restrict, IsLinear) {
  Rng rng(4);
  const auto s = BlockStructure::uniform(5, 2);
  const auto x = random_signal(s, rng, 0.0), y = random_signal(s, rng, 0.0);
  const BlockIndexSet gamma{1, 4};
  const Vector lhs = restrict_to(x * 2.0 + y, gamma).values();
  const Vector rhs = (restrict_to(x, gamma) * 2.0 + restrict_to(y, gamma)).values();
  EXPECT_TRUE(lhs.isApprox(rhs, 1e-14));
}

TEST(RandomBlockSparse, SupportSizeAndDeterminism) {
  const auto s = BlockStructure::uniform(16, 3);
  for (int k : {1, 5, 16}) {
    const auto x = random_block_sparse(s, k, 123);
    EXPECT_EQ(mixed_norm(x, MixedNorm::L0), k);
    EXPECT_EQ(x.values(), random_block_sparse(s, k, 123).values());
  }
  EXPECT_NE(random_block_sparse(s, 4, 1).values(), random_block_sparse(s, 4, 2).values());
  EXPECT_THROW(random_block_sparse(s, 17, 0), std::invalid_argument);
}

TEST(RandomBlockSparse, SupportIsUniformOverBlocks) {
  const auto s = BlockStructure::uniform(8, 1);
  std::vector<int> hits(8, 0);
  const int draws = 8000;
  for (int i = 0; i < draws; ++i)
    for (int b : block_support(random_block_sparse(s, 2, static_cast<std::uint64_t>(i)))) ++hits[static_cast<std::size_t>(b)];
  // each block appears with probability 2/8; 5 sigma band
  const double expected = draws * 0.25, sd = std::sqrt(draws * 0.25 * 0.75);
  for (int h : hits) EXPECT_NEAR(h, expected, 5 * sd);
}

TEST(SupportEstimate, RejectsOverlap) {
  SupportEstimate est{{BlockIndexSet{0, 1}, BlockIndexSet{1, 2}}, {0.5, 0.25}, {}, {}};
  EXPECT_THROW(est.validate(4), std::invalid_argument);
  est.sets[1] = BlockIndexSet{2, 3};
  EXPECT_NO_THROW(est.validate(4));
  EXPECT_THROW(est.validate(3), std::out_of_range);
}

}  // namespace
}  // namespace wbcs
