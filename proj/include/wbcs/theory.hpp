#ifndef WBCS_THEORY_HPP
#define WBCS_THEORY_HPP

// Closed-form recovery constants and checkable inequalities for weighted l2/l1 minimization
// with L disjoint prior block-support estimates.
//
// Weights are indexed 0..L-1 here; the prior profile requires them nonincreasing.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "wbcs/block_model.hpp"

namespace wbcs {

/// Weights, size ratios and accuracies of L disjoint support estimates.
struct PriorProfile {
  std::vector<double> omegas;
  std::vector<double> rhos;
  std::vector<double> alphas;

  std::size_t size() const { return omegas.size(); }

  double rho_total() const { return std::accumulate(rhos.begin(), rhos.end(), 0.0); }

  void validate() const {
    if (omegas.empty()) throw std::invalid_argument("PriorProfile: L must be >= 1");
    if (rhos.size() != omegas.size() || alphas.size() != omegas.size())
      throw std::invalid_argument("PriorProfile: omegas, rhos and alphas must have length L");
    for (std::size_t i = 0; i < size(); ++i) {
      if (!(omegas[i] >= 0.0 && omegas[i] <= 1.0))
        throw std::invalid_argument("PriorProfile: weights must lie in [0,1]");
      if (i > 0 && omegas[i] > omegas[i - 1])
        throw std::invalid_argument("PriorProfile: weights must be nonincreasing");
      if (!(rhos[i] >= 0.0)) throw std::invalid_argument("PriorProfile: sizes must be >= 0");
      if (!(alphas[i] >= 0.0 && alphas[i] <= 1.0))
        throw std::invalid_argument("PriorProfile: accuracies must lie in [0,1]");
    }
  }

  static PriorProfile uniform(std::size_t L, double omega, double rho_each, double alpha) {
    return {std::vector<double>(L, omega), std::vector<double>(L, rho_each), std::vector<double>(L, alpha)};
  }

  /// One weight over the union of all estimates, with the pooled accuracy.
  PriorProfile pooled(double omega) const {
    const double rho = rho_total();
    double correct = 0.0;
    for (std::size_t i = 0; i < size(); ++i) correct += alphas[i] * rhos[i];
    return {{omega}, {rho}, {rho > 0.0 ? correct / rho : 0.0}};
  }
};

namespace detail {

/// sum_{j>=i} rho_j and sum_{j>=i} alpha_j rho_j.
inline std::pair<double, double> tail_sums(const PriorProfile& p, std::size_t i) {
  double rho = 0.0, correct = 0.0;
  for (std::size_t j = i; j < p.size(); ++j) {
    rho += p.rhos[j];
    correct += p.alphas[j] * p.rhos[j];
  }
  return {rho, correct};
}

/// sqrt(1 + sum_{j>=i} rho_j - 2 sum_{j>=i} alpha_j rho_j).
inline double tail_root(const PriorProfile& p, std::size_t i) {
  const auto [rho, correct] = tail_sums(p, i);
  const double radicand = 1.0 + rho - 2.0 * correct;
  if (radicand < -1e-12)
    throw std::domain_error("PriorProfile: sum of alpha_j rho_j exceeds 1 (estimate larger than support)");
  return std::sqrt(std::max(radicand, 0.0));
}

}  // namespace detail

/// Aggregate weight/accuracy constant Upsilon_L. Identical in form to K_L of the
/// standard-RIP weighted l1 analysis.
inline double upsilon(const PriorProfile& p) {
  p.validate();
  const std::size_t L = p.size();
  double u = p.omegas[L - 1] + (1.0 - p.omegas[0]) * detail::tail_root(p, 0);
  for (std::size_t i = 1; i < L; ++i) u += (p.omegas[i - 1] - p.omegas[i]) * detail::tail_root(p, i);
  return u;
}

/// Order offset d (a real number; block counts use ceil(d k)).
inline double d_param(const PriorProfile& p) {
  p.validate();
  double prod = 1.0;
  for (double w : p.omegas) prod *= w;
  if (prod == 1.0) return 1.0;
  double d = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto [rho, correct] = detail::tail_sums(p, i);
    const double a_i = std::max(correct, rho - correct);
    const double b_i = i == 0 ? 1.0 : (p.omegas[i - 1] > p.omegas[i] ? 1.0 : 0.0);
    d = std::max(d, b_i * (1.0 - correct + a_i));
  }
  return d;
}

/// sqrt((t-d)/(t-d+upsilon^2)) from raw constants.
inline double delta_bound(double t, double d, double ups) {
  if (!(t > d)) throw std::domain_error("delta_bound: need t > d");
  return std::sqrt((t - d) / (t - d + ups * ups));
}

/// Block-RIP threshold: delta_tk below this value guarantees stable recovery.
inline double delta_bound(double t, const PriorProfile& p) {
  return delta_bound(t, d_param(p), upsilon(p));
}

struct StabilityConstants {
  double d0;
  double d1;
};

/// Noise and tail constants D0, D1 from raw (t, d, upsilon).
inline StabilityConstants stability_constants(double delta, double t, double d, double ups) {
  const double bound = delta_bound(t, d, ups);
  if (!(delta >= 0.0)) throw std::domain_error("stability_constants: delta must be >= 0");
  if (!(delta < bound))
    throw std::domain_error("stability_constants: delta " + std::to_string(delta) +
                            " not below the bound " + std::to_string(bound));
  const double s = t - d + ups * ups;
  const double gap = bound - delta;
  const double denom = s * gap;
  const double d0 = std::sqrt(2.0 * (t - d) * s * (1.0 + delta)) / denom;
  const double d1 = (std::sqrt(2.0) * delta * ups + std::sqrt(s * gap * delta)) / denom + 1.0 / std::sqrt(d);
  return {d0, d1};
}

inline StabilityConstants stability_constants(double delta, double t, const PriorProfile& p) {
  return stability_constants(delta, t, d_param(p), upsilon(p));
}

/// Constants C0, C1 of unweighted l2/l1 minimization under delta_tk < sqrt((t-1)/t).
inline StabilityConstants baseline_constants(double delta, double t) {
  if (!(t > 1.0)) throw std::domain_error("baseline_constants: need t > 1");
  const double bound = std::sqrt((t - 1.0) / t);
  if (!(delta >= 0.0 && delta < bound))
    throw std::domain_error("baseline_constants: need 0 <= delta < sqrt((t-1)/t)");
  const double denom = t * (bound - delta);
  const double c0 = std::sqrt(2.0 * t * (t - 1.0) * (1.0 + delta)) / denom;
  const double c1 = (std::sqrt(2.0) * delta + std::sqrt(t * (bound - delta) * delta)) / denom + 1.0;
  return {c0, c1};
}

/// Standard-RIP weighted l1 comparison constants.
struct NswConstants {
  double k_l;
  double delta_threshold;  // (a - K_L^2) / (a + K_L^2)
  double c0_prime;
  double c1_prime;
};

inline NswConstants nsw_constants(const PriorProfile& p, double a, double delta_ak, double delta_a1k) {
  if (!(a > 1.0)) throw std::domain_error("nsw_constants: need a > 1");
  if (!(delta_ak >= 0.0 && delta_ak < 1.0 && delta_a1k >= 0.0 && delta_a1k < 1.0))
    throw std::domain_error("nsw_constants: RIP constants must lie in [0,1)");
  const double k = upsilon(p);
  const double ratio = k / std::sqrt(a);
  const double denom = std::sqrt(1.0 - delta_a1k) - ratio * std::sqrt(1.0 + delta_ak);
  if (!(denom > 0.0))
    throw std::domain_error("nsw_constants: RIP condition fails, constants undefined");
  return {k, (a - k * k) / (a + k * k), (1.0 + ratio) / denom,
          (std::sqrt(1.0 - delta_a1k) + std::sqrt(1.0 + delta_ak)) / (std::sqrt(a) * denom)};
}

namespace detail {

inline double restricted_l21(const BlockSignal& x, const BlockIndexSet& gamma) {
  double s = 0.0;
  for (int i : gamma) s += x.block_norm(i);
  return s;
}

/// sum w ||x[G^c]|| + (1 - sum w)||x[Tt^c & G^c]|| - sum_i (sum w - w_i)||x[Tt_i & G^c]||.
inline double weighted_tail(const BlockSignal& x, const BlockIndexSet& gamma_c, const SupportEstimate& est) {
  const int m = x.num_blocks();
  const double wsum = std::accumulate(est.weights.begin(), est.weights.end(), 0.0);
  const BlockIndexSet outside = est.union_of_sets().complement(m);
  double z = wsum * restricted_l21(x, gamma_c) +
             (1.0 - wsum) * restricted_l21(x, set_intersection(outside, gamma_c));
  for (std::size_t i = 0; i < est.num_sets(); ++i)
    z -= (wsum - est.weights[i]) * restricted_l21(x, set_intersection(est.sets[i], gamma_c));
  return z;
}

}  // namespace detail

/// Right-hand side of the weighted l2/l1 error bound:
/// 2 D0 eps + 2 D1 / sqrt(k) * weighted tail of x outside T.
inline double error_bound_rhs(const BlockSignal& x, const BlockIndexSet& support, const SupportEstimate& est,
                              int k, double d0, double d1, double eps) {
  if (k < 1) throw std::invalid_argument("error_bound_rhs: k must be >= 1");
  est.validate(x.num_blocks());
  support.check_within(x.num_blocks());
  const double tail = detail::weighted_tail(x, support.complement(x.num_blocks()), est);
  return 2.0 * d0 * eps + 2.0 * d1 / std::sqrt(static_cast<double>(k)) * tail;
}

/// Slack of the block cone constraint satisfied by h = xhat - x for any minimizer xhat of the
/// weighted program: RHS - ||h[gamma^c]||_{2,1}. Nonnegative for true minimizers.
inline double cone_constraint_gap(const BlockSignal& h, const BlockSignal& x, const BlockIndexSet& gamma,
                                  const SupportEstimate& est) {
  if (!(h.structure() == x.structure())) throw std::invalid_argument("cone_constraint_gap: structure mismatch");
  const int m = x.num_blocks();
  est.validate(m);
  gamma.check_within(m);
  const BlockIndexSet gamma_c = gamma.complement(m);

  // Order the estimates by nonincreasing weight.
  std::vector<std::size_t> order(est.num_sets());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return est.weights[a] > est.weights[b]; });

  double rhs = 2.0 * detail::weighted_tail(x, gamma_c, est);
  if (!order.empty()) {
    const std::size_t L = order.size();
    auto w = [&](std::size_t i) { return est.weights[order[i]]; };
    // Tails of the union of estimates i..L-1, built from the back.
    std::vector<BlockIndexSet> tails(L);
    BlockIndexSet acc;
    for (std::size_t i = L; i-- > 0;) {
      acc = set_union(acc, est.sets[order[i]]);
      tails[i] = acc;
    }
    rhs += w(L - 1) * detail::restricted_l21(h, gamma);
    rhs += (1.0 - w(0)) * detail::restricted_l21(h, set_symmetric_difference(gamma, tails[0]));
    for (std::size_t i = 1; i < L; ++i)
      rhs += (w(i - 1) - w(i)) * detail::restricted_l21(h, set_symmetric_difference(gamma, tails[i]));
  } else {
    rhs += detail::restricted_l21(h, gamma);
  }
  return rhs - detail::restricted_l21(h, gamma_c);
}

/// Measurements sufficient for delta_tk < delta_bound with high probability (natural log).
inline double measurement_bound(double t, double k, double num_blocks, const PriorProfile& p) {
  if (!(num_blocks > k && k > 0.0)) throw std::domain_error("measurement_bound: need 0 < k < M");
  const double d = d_param(p);
  const double ups = upsilon(p);
  if (!(t > d)) throw std::domain_error("measurement_bound: need t > d");
  const double ratio = (t - d) / (t - d + ups * ups);
  const double denom = ratio / 16.0 - std::pow(ratio, 1.5) / 48.0;
  if (!(denom > 0.0)) throw std::domain_error("measurement_bound: nonpositive denominator");
  return t * k * std::log(num_blocks / k) / denom;
}

}  // namespace wbcs

#endif  // WBCS_THEORY_HPP
