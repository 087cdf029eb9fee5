#ifndef WBCS_ENSEMBLES_HPP
#define WBCS_ENSEMBLES_HPP

// Random measurement ensembles and an exact (enumerating) block-RIP estimator.

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wbcs/block_model.hpp"
#include "wbcs/random.hpp"

namespace wbcs {

enum class Ensemble {
  GaussianUnit,    // N(0,1), the experimental ensemble
  GaussianScaled,  // N(0,1/n)
  Rademacher,      // +-1/sqrt(n)
  SparseTernary,   // +-sqrt(3/n) w.p. 1/6 each, 0 w.p. 2/3
};

inline std::string_view to_string(Ensemble e) {
  switch (e) {
    case Ensemble::GaussianUnit: return "gaussian_unit";
    case Ensemble::GaussianScaled: return "gaussian_scaled";
    case Ensemble::Rademacher: return "rademacher";
    case Ensemble::SparseTernary: return "sparse_ternary";
  }
  return "unknown";
}

inline Ensemble parse_ensemble(std::string_view tag) {
  for (Ensemble e : {Ensemble::GaussianUnit, Ensemble::GaussianScaled, Ensemble::Rademacher,
                     Ensemble::SparseTernary})
    if (tag == to_string(e)) return e;
  throw std::invalid_argument("unknown ensemble tag '" + std::string(tag) + "'");
}

struct MeasurementMatrix {
  Matrix entries;
  Ensemble ensemble = Ensemble::GaussianUnit;
  std::uint64_t seed = 0;

  int rows() const { return static_cast<int>(entries.rows()); }
  int cols() const { return static_cast<int>(entries.cols()); }
};

/// n x N matrix drawn entrywise (column-major order) from the ensemble's law.
inline MeasurementMatrix sample_matrix(Ensemble ensemble, int n, int N, std::uint64_t seed) {
  if (n < 1 || N < 1) throw std::invalid_argument("sample_matrix: need n, N >= 1");
  Rng rng(seed);
  Matrix a(n, N);
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  switch (ensemble) {
    case Ensemble::GaussianUnit: {
      std::normal_distribution<double> g(0.0, 1.0);
      for (Eigen::Index j = 0; j < a.size(); ++j) a.data()[j] = g(rng);
      break;
    }
    case Ensemble::GaussianScaled: {
      std::normal_distribution<double> g(0.0, inv_sqrt_n);
      for (Eigen::Index j = 0; j < a.size(); ++j) a.data()[j] = g(rng);
      break;
    }
    case Ensemble::Rademacher: {
      std::bernoulli_distribution coin(0.5);
      for (Eigen::Index j = 0; j < a.size(); ++j) a.data()[j] = coin(rng) ? inv_sqrt_n : -inv_sqrt_n;
      break;
    }
    case Ensemble::SparseTernary: {
      const double v = std::sqrt(3.0 / n);
      std::uniform_int_distribution<int> die(0, 5);
      for (Eigen::Index j = 0; j < a.size(); ++j) {
        const int r = die(rng);
        a.data()[j] = r == 0 ? v : (r == 1 ? -v : 0.0);
      }
      break;
    }
    default:
      throw std::invalid_argument("sample_matrix: unknown ensemble");
  }
  return {std::move(a), ensemble, seed};
}

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

namespace detail {

/// Columns of A belonging to the listed blocks, in block order.
inline Matrix gather_block_columns(const Matrix& a, const BlockStructure& s,
                                   const std::vector<int>& blocks) {
  int width = 0;
  for (int b : blocks) width += s.length(b);
  Matrix sub(a.rows(), width);
  int col = 0;
  for (int b : blocks) {
    sub.middleCols(col, s.length(b)) = a.middleCols(s.offset(b), s.length(b));
    col += s.length(b);
  }
  return sub;
}

/// Advance a sorted combination of size s over 0..m-1; false when exhausted.
inline bool next_combination(std::vector<int>& c, int m) {
  const int s = static_cast<int>(c.size());
  int i = s - 1;
  while (i >= 0 && c[static_cast<std::size_t>(i)] == m - s + i) --i;
  if (i < 0) return false;
  ++c[static_cast<std::size_t>(i)];
  for (int j = i + 1; j < s; ++j) c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
  return true;
}

}  // namespace detail

inline constexpr double kMaxRipSupports = 1e5;

/// Exact block-RIP constant of order s by enumerating every s-subset of blocks:
/// max over supports S of max(lambda_max(A_S'A_S) - 1, 1 - lambda_min(A_S'A_S)).
inline double empirical_block_rip(const Matrix& a, const BlockStructure& s, int order) {
  if (a.cols() != s.dim()) throw std::invalid_argument("empirical_block_rip: A has wrong column count");
  const int m = s.num_blocks();
  if (order < 1 || order > m) throw std::invalid_argument("empirical_block_rip: need 1 <= s <= M");
  if (binomial(m, order) > kMaxRipSupports)
    throw std::domain_error("empirical_block_rip: C(M,s) exceeds the enumeration guard of 1e5");

  std::vector<int> comb(static_cast<std::size_t>(order));
  for (int i = 0; i < order; ++i) comb[static_cast<std::size_t>(i)] = i;
  double delta = 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig;
  do {
    const Matrix sub = detail::gather_block_columns(a, s, comb);
    eig.compute(sub.transpose() * sub, Eigen::EigenvaluesOnly);
    const auto& ev = eig.eigenvalues();
    delta = std::max({delta, ev.maxCoeff() - 1.0, 1.0 - ev.minCoeff()});
  } while (detail::next_combination(comb, m));
  return delta;
}

inline double empirical_block_rip(const MeasurementMatrix& a, const BlockStructure& s, int order) {
  return empirical_block_rip(a.entries, s, order);
}

/// Concentration constant c0(eps) = eps^2/4 - eps^3/6 of the sub-Gaussian ensembles.
inline double concentration_c0(double eps) { return eps * eps / 4.0 - eps * eps * eps / 6.0; }

/// Upper bound 2 exp(-n c0(eps)) on P(| ||Ax||^2 - ||x||^2 | >= eps ||x||^2).
inline double concentration_bound(int n, double eps) {
  return 2.0 * std::exp(-n * concentration_c0(eps));
}

/// Fraction of `trials` fresh (matrix, unit vector) draws with | ||Ax||^2 - 1 | >= eps.
inline double concentration_check(Ensemble ensemble, int n, int N, int trials, double eps,
                                  std::uint64_t seed) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("concentration_check: need 0 < eps < 1");
  if (trials < 1) throw std::invalid_argument("concentration_check: trials must be >= 1");
  Rng rng(derive_seed(seed, 0));
  std::normal_distribution<double> g(0.0, 1.0);
  int failures = 0;
  for (int t = 0; t < trials; ++t) {
    const MeasurementMatrix a = sample_matrix(ensemble, n, N, derive_seed(seed, 1 + static_cast<std::uint64_t>(t)));
    Vector x(N);
    for (int j = 0; j < N; ++j) x[j] = g(rng);
    x.normalize();
    if (std::abs((a.entries * x).squaredNorm() - 1.0) >= eps) ++failures;
  }
  return static_cast<double>(failures) / trials;
}

}  // namespace wbcs

#endif  // WBCS_ENSEMBLES_HPP
