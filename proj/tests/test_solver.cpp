#include <gtest/gtest.h>

#include <Eigen/LU>
#include <Eigen/QR>

#include <cmath>
#include <random>
#include <vector>

#include "wbcs/ensembles.hpp"
#include "wbcs/linalg.hpp"
#include "wbcs/solver.hpp"

namespace wbcs {
namespace {

Matrix gaussian(int rows, int cols, std::uint64_t seed) { return sample_matrix(Ensemble::GaussianUnit, rows, cols, seed).entries; }

TEST(SpdSolve, SolvesAndRejects) {
  const Matrix a = gaussian(6, 6, 1);
  const Matrix g = a.transpose() * a + Matrix::Identity(6, 6);
  const Vector b = Vector::LinSpaced(6, -1, 1);
  EXPECT_TRUE((g * spd_solve(g, b)).isApprox(b, 1e-12));
  Matrix indefinite = Matrix::Identity(3, 3);
  indefinite(2, 2) = -1;
  EXPECT_THROW(spd_solve(indefinite, Vector::Ones(3)), NotPositiveDefinite);
  EXPECT_THROW(spd_solve(g, Vector::Ones(5)), std::invalid_argument);
}

TEST(MinNormLeastSquares, WideSystemIsInterpolatingAndMinimal) {
  const Matrix a = gaussian(5, 12, 2);
  const Vector y = gaussian(5, 1, 3).col(0);
  const auto sol = min_norm_least_squares(a, y);
  EXPECT_FALSE(sol.regularized);
  EXPECT_NEAR((a * sol.x - y).norm(), 0.0, 1e-12);
  // any null-space perturbation increases the norm
  const Matrix null_basis = Eigen::FullPivLU<Matrix>(a).kernel();
  Rng rng(4);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    Vector c(null_basis.cols());
    for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = g(rng);
    const Vector other = sol.x + 0.1 * null_basis * c;
    EXPECT_NEAR((a * other - y).norm(), 0.0, 1e-10);
    EXPECT_GT(other.norm(), sol.x.norm());
  }
}

TEST(MinNormLeastSquares, TallSystemMatchesQr) {
  const Matrix a = gaussian(12, 4, 5);
  const Vector y = gaussian(12, 1, 6).col(0);
  const Vector qr = a.colPivHouseholderQr().solve(y);
  EXPECT_TRUE(min_norm_least_squares(a, y).x.isApprox(qr, 1e-10));
}

TEST(MinNormLeastSquares, RankDeficientGetsRidge) {
  Matrix a = gaussian(3, 6, 7);
  a.row(2) = a.row(0) + a.row(1);
  const Vector y = a * Vector::Ones(6);
  const auto sol = min_norm_least_squares(a, y);
  EXPECT_TRUE(sol.regularized);
  EXPECT_NEAR((a * sol.x - y).norm() / y.norm(), 0.0, 1e-6);
  const Vector pinv = a.completeOrthogonalDecomposition().solve(y);
  EXPECT_NEAR((sol.x - pinv).norm() / pinv.norm(), 0.0, 1e-6);
}

TEST(WeightMatrix, HandEvaluated) {
  const BlockStructure s({2, 1});
  const BlockSignal x(s, (Vector(3) << 3, 4, 0).finished());
  const WeightVector w(Vector((Vector(2) << 0.25, 1.0).finished()));
  const Vector d = irls_weight_matrix_diag(x, w, 1.0);
  // block 0: sqrt(0.25) (1 + 25)^{-1/4}; block 1: (1 + 0)^{-1/4}
  EXPECT_NEAR(d[0], 0.5 * std::pow(26.0, -0.25), 1e-15);
  EXPECT_EQ(d[0], d[1]);
  EXPECT_NEAR(d[2], 1.0, 1e-15);
  EXPECT_THROW(irls_weight_matrix_diag(x, w, 0.0), std::invalid_argument);
}

TEST(WeightVector, Range) {
  EXPECT_THROW(WeightVector(Vector::Zero(2)), std::invalid_argument);
  EXPECT_THROW(WeightVector(Vector::Constant(2, 1.5)), std::invalid_argument);
  EXPECT_NO_THROW(WeightVector::ones(3));
}

TEST(WeightsFromEstimate, ExpandsPerBlock) {
  const SupportEstimate est{{BlockIndexSet{1, 4}, BlockIndexSet{0}}, {0.5, 0.25}, {}, {}};
  const WeightVector w = weights_from_estimate(est, 6);
  EXPECT_EQ(w.values(), (Vector(6) << 0.25, 0.5, 1, 1, 0.5, 1).finished());
  EXPECT_EQ(weights_from_estimate(SupportEstimate{}, 3).values(), Vector::Ones(3));
}

TEST(IrlsStep, PushThroughMatchesGramRoute) {
  for (auto [n, big_n] : {std::pair{5, 12}, std::pair{30, 64}, std::pair{12, 12}, std::pair{15, 8}}) {
    const Matrix a = gaussian(n, big_n, static_cast<std::uint64_t>(n * 100 + big_n));
    const Vector y = gaussian(n, 1, 9).col(0);
    const Vector d = (Vector::Random(big_n).array().abs() + 0.1).matrix();
    for (double tau : {1e-6, 1e-3, 1.0}) {
      const Vector p = irls_step(a, y, d, tau), q = irls_step_gram(a, y, d, tau);
      EXPECT_LE((p - q).norm(), 1e-6 * std::max(1.0, q.norm())) << n << "x" << big_n << " tau " << tau;
    }
  }
}

// Independent reference: each step solves (A'A + tau W^2) x = A'y with a QR factorization and
// the same eps schedule, written for unit blocks.
Vector reference_irls(const Matrix& a, const Vector& y, const Vector& w, double tau, double nu, int k_hat,
                      int max_iters) {
  const int big_n = static_cast<int>(a.cols());
  Vector x = a.completeOrthogonalDecomposition().solve(y);
  double eps = 1.0;
  for (int it = 0; it < max_iters; ++it) {
    Vector d2(big_n);
    for (int i = 0; i < big_n; ++i) d2[i] = w[i] / std::sqrt(x[i] * x[i] + eps * eps);
    const Matrix lhs = a.transpose() * a + tau * Matrix(d2.asDiagonal());
    const Vector next = lhs.colPivHouseholderQr().solve(a.transpose() * y);
    Vector mags = next.cwiseAbs();
    std::sort(mags.data(), mags.data() + big_n, std::greater<>());
    const double step = (next - x).norm();
    eps = std::min(eps, nu * mags[k_hat] / big_n);
    x = next;
    if (eps < 1e-7 || step < 1e-8) break;
  }
  return x;
}

TEST(IrlsSolve, MatchesScalarReference) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const int n = 5, big_n = 12;
    const auto s = BlockStructure::uniform(big_n, 1);
    const Matrix a = gaussian(n, big_n, seed);
    const BlockSignal x0 = random_block_sparse(s, 1, seed + 50);
    const Vector y = a * x0.values();
    Vector w = Vector::Ones(big_n);
    w[3] = 0.4;
    IrlsConfig cfg;
    cfg.k_hat = 1;
    const auto res = irls_solve(a, y, s, WeightVector(w), cfg);
    const Vector ref = reference_irls(a, y, w, cfg.tau, cfg.nu, cfg.k_hat, cfg.max_iters);
    EXPECT_LE((res.solution.values() - ref).norm(), 1e-6 * std::max(1.0, ref.norm())) << "seed " << seed;
  }
}

TEST(IrlsSolve, IdentityMatrixRecoversSignal) {
  const auto s = BlockStructure::uniform(6, 2);
  const BlockSignal x = random_block_sparse(s, 2, 4);
  IrlsConfig cfg;
  cfg.k_hat = 2;
  cfg.tau = 1e-9;
  const auto res = irls_solve(Matrix::Identity(12, 12), x.values(), s, WeightVector::ones(6), cfg);
  EXPECT_LE((res.solution.values() - x.values()).norm(), 1e-6 * x.values().norm());
}

TEST(IrlsSolve, ZeroMeasurementsGiveZero) {
  const auto s = BlockStructure::uniform(8, 2);
  IrlsConfig cfg;
  cfg.k_hat = 2;
  const auto res = irls_solve(gaussian(6, 16, 3), Vector::Zero(6), s, WeightVector::ones(8), cfg);
  EXPECT_TRUE(res.solution.values().isZero());
  EXPECT_EQ(res.termination, Termination::EpsConverged);
  EXPECT_EQ(res.iterations, 1);
}

TEST(IrlsSolve, EpsAndObjectiveAreMonotone) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto s = BlockStructure::uniform(32, 2);
    const Matrix a = gaussian(30, 64, seed);
    const BlockSignal x = random_block_sparse(s, 4, seed + 1);
    Vector w = Vector::Ones(32);
    w.head(8).setConstant(0.3);
    IrlsConfig cfg;
    cfg.k_hat = 4;
    cfg.record_trace = true;
    const auto res = irls_solve(a, a * x.values(), s, WeightVector(w), cfg);
    ASSERT_EQ(res.eps_history.size(), static_cast<std::size_t>(res.iterations) + 1);
    for (std::size_t i = 1; i < res.eps_history.size(); ++i) {
      EXPECT_LE(res.eps_history[i], res.eps_history[i - 1]);
      EXPECT_LE(res.objective_history[i], res.objective_history[i - 1] * (1 + 1e-10) + 1e-12) << "iteration " << i;
    }
  }
}

TEST(IrlsSolve, EquivariantUnderBlockPermutation) {
  const auto s = BlockStructure::uniform(10, 2);
  const Matrix a = gaussian(12, 20, 11);
  const BlockSignal x = random_block_sparse(s, 3, 12);
  const std::vector<int> perm{4, 9, 0, 7, 2, 5, 1, 8, 3, 6};
  Matrix pa(12, 20);
  Vector px(20), w(10), pw(10);
  for (int b = 0; b < 10; ++b) w[b] = 0.2 + 0.08 * b;
  for (int b = 0; b < 10; ++b) {
    const int src = perm[static_cast<std::size_t>(b)];
    pa.middleCols(2 * b, 2) = a.middleCols(2 * src, 2);
    px.segment(2 * b, 2) = x.values().segment(2 * src, 2);
    pw[b] = w[src];
  }
  IrlsConfig cfg;
  cfg.k_hat = 3;
  const auto r1 = irls_solve(a, a * x.values(), s, WeightVector(w), cfg);
  const auto r2 = irls_solve(pa, pa * px, s, WeightVector(pw), cfg);
  for (int b = 0; b < 10; ++b)
    EXPECT_LE((r2.solution.block(b) - r1.solution.block(perm[static_cast<std::size_t>(b)])).norm(), 1e-8);
}

TEST(IrlsSolve, DimensionAndConfigErrors) {
  const auto s = BlockStructure::uniform(4, 2);
  const Matrix a = gaussian(3, 8, 1);
  IrlsConfig cfg;
  EXPECT_THROW(irls_solve(gaussian(3, 7, 1), Vector::Zero(3), s, WeightVector::ones(4), cfg), std::invalid_argument);
  EXPECT_THROW(irls_solve(a, Vector::Zero(4), s, WeightVector::ones(4), cfg), std::invalid_argument);
  EXPECT_THROW(irls_solve(a, Vector::Zero(3), s, WeightVector::ones(3), cfg), std::invalid_argument);
  cfg.k_hat = 4;
  EXPECT_THROW(irls_solve(a, Vector::Zero(3), s, WeightVector::ones(4), cfg), std::invalid_argument);
  cfg.k_hat = 1;
  cfg.nu = 1.0;
  EXPECT_THROW(irls_solve(a, Vector::Zero(3), s, WeightVector::ones(4), cfg), std::invalid_argument);
}

// Unweighted noiseless recovery at N = 256, d = 2, k = 10 is essentially always exact at n = 120.
TEST(IrlsSolve, RecoversAtComfortableMeasurementCount) {
  const auto s = BlockStructure::uniform(128, 2);
  int exact = 0;
  const int trials = 20;
  for (int t = 0; t < trials; ++t) {
    const Matrix a = gaussian(120, 256, derive_seed(t, 2));
    const BlockSignal x = random_block_sparse(s, 10, derive_seed(t, 1));
    IrlsConfig cfg;
    cfg.k_hat = 10;
    const auto res = irls_solve(a, a * x.values(), s, WeightVector::ones(128), cfg);
    if ((res.solution.values() - x.values()).norm() <= 1e-4 * x.values().norm()) ++exact;
  }
  EXPECT_GE(exact, 18);
}

}  // namespace
}  // namespace wbcs
