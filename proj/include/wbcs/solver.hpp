#ifndef WBCS_SOLVER_HPP
#define WBCS_SOLVER_HPP

// Iteratively reweighted least squares for the smoothed, regularized weighted l2/l1 problem
//
//   min_x  sum_i w_i sqrt(||x[i]||^2 + eps^2) + 1/(2 tau) ||y - A x||^2
//
// with eps driven to zero by the (k_hat+1)-th largest block norm.

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wbcs/block_model.hpp"
#include "wbcs/linalg.hpp"

namespace wbcs {

/// Per-block weights in (0,1].
class WeightVector {
 public:
  WeightVector() = default;
  explicit WeightVector(Vector w) : w_(std::move(w)) {
    for (Eigen::Index i = 0; i < w_.size(); ++i)
      if (!(w_[i] > 0.0 && w_[i] <= 1.0))
        throw std::invalid_argument("WeightVector: weights must lie in (0,1], got " + std::to_string(w_[i]));
  }
  static WeightVector ones(int num_blocks) { return WeightVector(Vector::Ones(num_blocks)); }

  const Vector& values() const { return w_; }
  double operator[](int i) const { return w_[i]; }
  int size() const { return static_cast<int>(w_.size()); }

 private:
  Vector w_;
};

/// Expand estimate weights to blocks: omega_j on the j-th estimate, 1 elsewhere.
inline WeightVector weights_from_estimate(const SupportEstimate& est, int num_blocks) {
  est.validate(num_blocks);
  Vector w = Vector::Ones(num_blocks);
  for (std::size_t j = 0; j < est.num_sets(); ++j)
    for (int i : est.sets[j]) w[i] = est.weights[j];
  return WeightVector(std::move(w));
}

struct IrlsConfig {
  double tau = 1e-3;
  double nu = 0.7;
  int k_hat = 1;
  double eps_tol = 1e-7;
  double step_tol = 1e-8;
  int max_iters = 1000;
  bool record_trace = false;

  void validate() const {
    if (!(tau > 0.0)) throw std::invalid_argument("IrlsConfig: tau must be > 0");
    if (!(nu > 0.0 && nu < 1.0)) throw std::invalid_argument("IrlsConfig: nu must lie in (0,1)");
    if (k_hat < 0) throw std::invalid_argument("IrlsConfig: k_hat must be >= 0");
    if (!(eps_tol > 0.0) || !(step_tol > 0.0)) throw std::invalid_argument("IrlsConfig: tolerances must be > 0");
    if (max_iters < 1) throw std::invalid_argument("IrlsConfig: max_iters must be >= 1");
  }
};

enum class Termination { EpsConverged, StepConverged, MaxIters };

inline std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::EpsConverged: return "eps_converged";
    case Termination::StepConverged: return "step_converged";
    case Termination::MaxIters: return "max_iters";
  }
  return "unknown";
}

struct IrlsResult {
  BlockSignal solution;
  int iterations = 0;
  double final_eps = 1.0;
  Termination termination = Termination::MaxIters;
  std::vector<std::string> warnings;
  // Filled when IrlsConfig::record_trace is set; entry 0 is the initial point.
  std::vector<double> eps_history;
  std::vector<double> objective_history;
};

/// Diagonal of W: sqrt(w_i) (eps^2 + ||x[i]||^2)^{-1/4}, repeated over each block's coordinates.
inline Vector irls_weight_matrix_diag(const BlockSignal& x, const WeightVector& w, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("irls_weight_matrix_diag: eps must be > 0");
  if (w.size() != x.num_blocks()) throw std::invalid_argument("irls_weight_matrix_diag: weight count != M");
  const BlockStructure& s = x.structure();
  Vector diag(x.dim());
  for (int i = 0; i < s.num_blocks(); ++i) {
    const double v = std::sqrt(w[i]) * std::pow(eps * eps + x.block(i).squaredNorm(), -0.25);
    diag.segment(s.offset(i), s.length(i)).setConstant(v);
  }
  return diag;
}

/// Smoothed weighted objective f(x, eps, tau).
inline double irls_objective(const Matrix& a, const Vector& y, const BlockSignal& x, const WeightVector& w,
                             double eps, double tau) {
  double f = 0.0;
  for (int i = 0; i < x.num_blocks(); ++i) f += w[i] * std::sqrt(x.block(i).squaredNorm() + eps * eps);
  return f + (y - a * x.values()).squaredNorm() / (2.0 * tau);
}

namespace detail {

/// (j+1)-th largest entry (0-based j), or 0 when there are fewer entries.
inline double kth_largest(Vector v, int j) {
  if (j >= v.size()) return 0.0;
  std::nth_element(v.data(), v.data() + j, v.data() + v.size(), std::greater<>());
  return v[j];
}

}  // namespace detail

/// One reweighted step x = W^{-1} (B'B + tau I)^{-1} B' y with B = A W^{-1}.
///
/// For n < N the push-through identity (B'B + tau I)^{-1} B' = B' (BB' + tau I)^{-1} gives the same
/// iterate from an n x n system.
inline Vector irls_step(const Matrix& a, const Vector& y, const Vector& w_diag, double tau) {
  const Vector w_inv = w_diag.cwiseInverse();
  const Matrix b = a * w_inv.asDiagonal();
  const Eigen::Index n = a.rows(), big_n = a.cols();
  Vector u;
  if (n < big_n) {
    Matrix g = Matrix::Zero(n, n);
    g.selfadjointView<Eigen::Lower>().rankUpdate(b);
    g.diagonal().array() += tau;
    Eigen::LLT<Matrix> llt(g);
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite("irls_step: BB' + tau I not positive definite");
    u = b.transpose() * llt.solve(y);
  } else {
    Matrix g = Matrix::Zero(big_n, big_n);
    g.selfadjointView<Eigen::Lower>().rankUpdate(b.transpose());
    g.diagonal().array() += tau;
    Eigen::LLT<Matrix> llt(g);
    if (llt.info() != Eigen::Success) throw NotPositiveDefinite("irls_step: B'B + tau I not positive definite");
    u = llt.solve(b.transpose() * y);
  }
  return w_inv.cwiseProduct(u);
}

/// Same iterate through the N x N Gram matrix and spd_solve, without the push-through shortcut.
inline Vector irls_step_gram(const Matrix& a, const Vector& y, const Vector& w_diag, double tau) {
  const Vector w_inv = w_diag.cwiseInverse();
  const Matrix b = a * w_inv.asDiagonal();
  Matrix g = b.transpose() * b;
  g.diagonal().array() += tau;
  return w_inv.cwiseProduct(spd_solve(g, b.transpose() * y));
}

/// Weighted l2/l1 recovery of x from y = A x (+ noise).
inline IrlsResult irls_solve(const Matrix& a, const Vector& y, const BlockStructure& s, const WeightVector& w,
                             const IrlsConfig& cfg) {
  cfg.validate();
  if (a.cols() != s.dim()) throw std::invalid_argument("irls_solve: A has " + std::to_string(a.cols()) +
                                                       " columns, structure has N=" + std::to_string(s.dim()));
  if (a.rows() != y.size()) throw std::invalid_argument("irls_solve: y length does not match A rows");
  if (w.size() != s.num_blocks()) throw std::invalid_argument("irls_solve: weight count != M");
  if (cfg.k_hat >= s.num_blocks()) throw std::invalid_argument("irls_solve: k_hat must be < M");

  const double big_n = static_cast<double>(s.dim());
  IrlsResult res;
  BlockSignal x(s, min_norm_least_squares(a, y).x);
  double eps = 1.0;
  if (cfg.record_trace) {
    res.eps_history.push_back(eps);
    res.objective_history.push_back(irls_objective(a, y, x, w, eps, cfg.tau));
  }

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    BlockSignal next(s, irls_step(a, y, irls_weight_matrix_diag(x, w, eps), cfg.tau));
    const double r = detail::kth_largest(next.block_norms(), cfg.k_hat);
    if (iter == 1 && cfg.nu * r / big_n >= 1.0)
      res.warnings.push_back("nu * r(x1)_{k_hat+1} / N >= 1; continuing with eps = min(eps, .)");
    const double step = (next.values() - x.values()).norm();
    eps = std::min(eps, cfg.nu * r / big_n);
    x = std::move(next);
    res.iterations = iter;
    if (cfg.record_trace) {
      res.eps_history.push_back(eps);
      res.objective_history.push_back(irls_objective(a, y, x, w, eps, cfg.tau));
    }
    if (eps < cfg.eps_tol) {
      res.termination = Termination::EpsConverged;
      break;
    }
    if (step < cfg.step_tol) {
      res.termination = Termination::StepConverged;
      break;
    }
  }
  res.final_eps = eps;
  res.solution = std::move(x);
  return res;
}

}  // namespace wbcs

#endif  // WBCS_SOLVER_HPP
