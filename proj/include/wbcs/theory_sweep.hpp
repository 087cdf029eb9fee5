#ifndef WBCS_THEORY_SWEEP_HPP
#define WBCS_THEORY_SWEEP_HPP

// Parameter sweeps of the closed-form constants, one CSV per figure kind.
//
//   fig1a  single weight, rho = 1: delta bound vs omega, one series per alpha
//   fig1b  omega = (0.5, 0.25) vs single 0.5 / 0.25 on the union: delta bound vs rho1
//   fig1c  three weights (0.9, 0.5, 0.1), alpha = 0.9: delta bound over rho1 + rho2 + rho3 = 1
//   fig1d  as fig1b but D0, D1 at delta_tk = 0.5
//   fig2   d_i = 1, a = 4: delta bound vs (a - K^2)/(a + K^2), D0/D1 vs C0'/C1' at
//          delta_tk = 0.2, delta_ak = delta_(a+1)k = 0.15
//
// Points outside a formula's domain keep their row with blank values and a reason.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wbcs/csv.hpp"
#include "wbcs/theory.hpp"

namespace wbcs {

enum class TheoryKind { Fig1a, Fig1b, Fig1c, Fig1d, Fig2 };

inline std::string_view to_string(TheoryKind k) {
  switch (k) {
    case TheoryKind::Fig1a: return "fig1a";
    case TheoryKind::Fig1b: return "fig1b";
    case TheoryKind::Fig1c: return "fig1c";
    case TheoryKind::Fig1d: return "fig1d";
    case TheoryKind::Fig2: return "fig2";
  }
  return "unknown";
}

inline TheoryKind parse_theory_kind(std::string_view s) {
  for (TheoryKind k : {TheoryKind::Fig1a, TheoryKind::Fig1b, TheoryKind::Fig1c, TheoryKind::Fig1d, TheoryKind::Fig2})
    if (s == to_string(k)) return k;
  throw std::invalid_argument("unknown theory sweep kind '" + std::string(s) + "'");
}

struct TheoryGrid {
  double t = 5.0;
  std::vector<double> alphas;
  double step = 0.05;  // omega step (fig1a) or rho step (others)
  double delta_tk = 0.5;
  double a = 4.0;
  double delta_ak = 0.15;
  double delta_a1k = 0.15;

  static TheoryGrid defaults(TheoryKind kind) {
    TheoryGrid g;
    switch (kind) {
      case TheoryKind::Fig1a: g.alphas = {0.1, 0.3, 0.5, 0.7, 0.9}; break;
      case TheoryKind::Fig1b: g.alphas = {0.2, 0.5, 0.8}; break;
      case TheoryKind::Fig1c: g.alphas = {0.9}; break;
      case TheoryKind::Fig1d: g.alphas = {0.2, 0.5, 0.8}; break;
      case TheoryKind::Fig2:
        g.alphas = {0.3, 0.5, 0.8};
        g.step = 0.1;
        g.delta_tk = 0.2;
        break;
    }
    return g;
  }
};

namespace detail {

/// 0, step, 2 step, ..., 1 computed as i * step to avoid drift.
inline std::vector<double> unit_grid(double step) {
  if (!(step > 0.0 && step <= 1.0)) throw std::invalid_argument("theory_sweep: step must lie in (0,1]");
  const int count = static_cast<int>(std::llround(1.0 / step));
  std::vector<double> g;
  for (int i = 0; i <= count; ++i) g.push_back(std::min(1.0, i * step));
  return g;
}

/// Evaluates fn; on a domain error fills `width` blank cells and returns the message.
inline std::string guarded(std::vector<std::string>& row, std::size_t width,
                           const std::function<std::vector<double>()>& fn) {
  try {
    for (double v : fn()) row.push_back(format_double(v));
    return {};
  } catch (const std::domain_error& e) {
    row.resize(row.size() + width);
    return e.what();
  }
}

}  // namespace detail

inline CsvTable theory_sweep(TheoryKind kind, const TheoryGrid& g) {
  CsvTable out;
  const double t = g.t;
  auto bound_cells = [t](const PriorProfile& p) {
    const double u = upsilon(p), d = d_param(p);
    return std::vector<double>{u, d, delta_bound(t, d, u)};
  };
  auto constants_cells = [t, &g](const PriorProfile& p) {
    const double u = upsilon(p), d = d_param(p);
    const auto c = stability_constants(g.delta_tk, t, d, u);
    return std::vector<double>{u, d, c.d0, c.d1};
  };

  switch (kind) {
    case TheoryKind::Fig1a: {
      out.header = {"alpha", "omega", "rho", "t", "upsilon", "d", "delta_bound", "reason"};
      for (double alpha : g.alphas)
        for (double omega : detail::unit_grid(g.step)) {
          std::vector<std::string> row{format_double(alpha), format_double(omega), "1", format_double(t)};
          const PriorProfile p{{omega}, {1.0}, {alpha}};
          row.push_back(detail::guarded(row, 3, [&] { return bound_cells(p); }));
          out.rows.push_back(std::move(row));
        }
      break;
    }
    case TheoryKind::Fig1b:
    case TheoryKind::Fig1d: {
      const bool constants = kind == TheoryKind::Fig1d;
      out.header = {"alpha", "rho1", "rho2", "series", "t"};
      if (constants) out.header.push_back("delta_tk");
      for (const char* c : constants ? std::vector<const char*>{"upsilon", "d", "D0", "D1"}
                                     : std::vector<const char*>{"upsilon", "d", "delta_bound"})
        out.header.emplace_back(c);
      out.header.emplace_back("reason");
      struct Series {
        const char* name;
        std::vector<double> omegas;
      };
      const std::vector<Series> series{{"two_weights", {0.5, 0.25}}, {"single_0.5", {0.5}}, {"single_0.25", {0.25}}};
      for (double alpha : g.alphas)
        for (const Series& s : series)
          for (double rho1 : detail::unit_grid(g.step)) {
            const double rho2 = std::max(0.0, 1.0 - rho1);
            std::vector<std::string> row{format_double(alpha), format_double(rho1), format_double(rho2), s.name,
                                         format_double(t)};
            if (constants) row.push_back(format_double(g.delta_tk));
            const PriorProfile p = s.omegas.size() == 2 ? PriorProfile{s.omegas, {rho1, rho2}, {alpha, alpha}}
                                                        : PriorProfile{s.omegas, {1.0}, {alpha}};
            row.push_back(constants ? detail::guarded(row, 4, [&] { return constants_cells(p); })
                                    : detail::guarded(row, 3, [&] { return bound_cells(p); }));
            out.rows.push_back(std::move(row));
          }
      break;
    }
    case TheoryKind::Fig1c: {
      out.header = {"alpha", "rho1", "rho2", "rho3", "t", "upsilon", "d", "delta_bound", "reason"};
      const auto grid = detail::unit_grid(g.step);
      for (double alpha : g.alphas)
        for (double rho1 : grid)
          for (double rho2 : grid) {
            if (rho1 + rho2 > 1.0 + 1e-12) continue;
            const double rho3 = std::max(0.0, 1.0 - rho1 - rho2);
            std::vector<std::string> row{format_double(alpha), format_double(rho1), format_double(rho2),
                                         format_double(rho3), format_double(t)};
            const PriorProfile p{{0.9, 0.5, 0.1}, {rho1, rho2, rho3}, {alpha, alpha, alpha}};
            row.push_back(detail::guarded(row, 3, [&] { return bound_cells(p); }));
            out.rows.push_back(std::move(row));
          }
      break;
    }
    case TheoryKind::Fig2: {
      out.header = {"alpha", "rho1", "rho2", "t", "a", "delta_tk", "delta_ak", "delta_a1k", "upsilon", "d",
                    "delta_bound", "K_L", "delta_nsw", "D0", "D1", "C0_prime", "C1_prime", "reason"};
      for (double alpha : g.alphas)
        for (double rho1 : detail::unit_grid(g.step)) {
          const double rho2 = std::max(0.0, 1.0 - rho1);
          std::vector<std::string> row{format_double(alpha), format_double(rho1), format_double(rho2),
                                       format_double(t), format_double(g.a), format_double(g.delta_tk),
                                       format_double(g.delta_ak), format_double(g.delta_a1k)};
          const PriorProfile p{{0.5, 0.25}, {rho1, rho2}, {alpha, alpha}};
          row.push_back(detail::guarded(row, 9, [&] {
            const double u = upsilon(p), d = d_param(p);
            const auto c = stability_constants(g.delta_tk, t, d, u);
            const auto nsw = nsw_constants(p, g.a, g.delta_ak, g.delta_a1k);
            return std::vector<double>{u, d, delta_bound(t, d, u), nsw.k_l, nsw.delta_threshold,
                                       c.d0, c.d1, nsw.c0_prime, nsw.c1_prime};
          }));
          out.rows.push_back(std::move(row));
        }
      break;
    }
  }
  return out;
}

inline CsvTable theory_sweep(TheoryKind kind) { return theory_sweep(kind, TheoryGrid::defaults(kind)); }

}  // namespace wbcs

#endif  // WBCS_THEORY_SWEEP_HPP
