#ifndef WBCS_HARNESS_HPP
#define WBCS_HARNESS_HPP

// Monte-Carlo recovery experiments: signal, matrix, noise and support-estimate generation,
// recovery metrics, and grid sweeps written as CSV.

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <tuple>
#include <type_traits>
#include <vector>

#include "wbcs/block_model.hpp"
#include "wbcs/csv.hpp"
#include "wbcs/ensembles.hpp"
#include "wbcs/random.hpp"
#include "wbcs/solver.hpp"
#include "wbcs/theory.hpp"

namespace wbcs {

inline constexpr double kExactRecoveryTol = 1e-4;
inline constexpr double kNoiselessTau = 1e-3;
inline constexpr double kNoisyTauFactor = 0.1;

/// Nearest-integer count for a ratio times k.
inline int rounded_count(double ratio_times_k) {
  return static_cast<int>(std::llround(ratio_times_k));
}

/// Draw L disjoint support estimates around the true support T.
///
/// Estimate i receives round(alpha_i rho_i k) blocks of T and round(rho_i k) - round(alpha_i rho_i k)
/// blocks of T^c, uniformly without replacement and never reusing a block.
inline SupportEstimate generate_estimate(const BlockIndexSet& truth, int num_blocks, int k,
                                         const PriorProfile& profile, std::uint64_t seed) {
  truth.check_within(num_blocks);
  const std::size_t L = profile.size();
  if (profile.rhos.size() != L || profile.alphas.size() != L)
    throw std::invalid_argument("generate_estimate: omegas, rhos and alphas must have length L");

  std::vector<int> sizes(L), correct(L);
  int need_in = 0, need_out = 0;
  for (std::size_t i = 0; i < L; ++i) {
    if (!(profile.rhos[i] >= 0.0) || !(profile.alphas[i] >= 0.0 && profile.alphas[i] <= 1.0))
      throw std::invalid_argument("generate_estimate: need rho >= 0 and alpha in [0,1]");
    sizes[i] = rounded_count(profile.rhos[i] * k);
    correct[i] = rounded_count(profile.alphas[i] * profile.rhos[i] * k);
    if (correct[i] > sizes[i]) throw std::invalid_argument("generate_estimate: rounded alpha*rho*k exceeds rho*k");
    need_in += correct[i];
    need_out += sizes[i] - correct[i];
  }
  const BlockIndexSet outside = truth.complement(num_blocks);
  if (need_in > static_cast<int>(truth.size()) || need_out > static_cast<int>(outside.size()))
    throw std::invalid_argument("generate_estimate: infeasible (rho, alpha, k, M) combination");

  Rng rng(seed);
  const std::vector<int> pick_in = sample_without_replacement(static_cast<int>(truth.size()), need_in, rng);
  const std::vector<int> pick_out = sample_without_replacement(static_cast<int>(outside.size()), need_out, rng);

  SupportEstimate est;
  est.weights = profile.omegas;
  est.rhos = profile.rhos;
  est.alphas = profile.alphas;
  std::size_t cursor_in = 0, cursor_out = 0;
  for (std::size_t i = 0; i < L; ++i) {
    std::vector<int> blocks;
    for (int c = 0; c < correct[i]; ++c) blocks.push_back(truth.indices()[static_cast<std::size_t>(pick_in[cursor_in++])]);
    for (int c = correct[i]; c < sizes[i]; ++c)
      blocks.push_back(outside.indices()[static_cast<std::size_t>(pick_out[cursor_out++])]);
    est.sets.emplace_back(std::move(blocks));
  }
  return est;
}

/// ||xhat - x||_2 / ||x||_2.
inline double relative_error(const Vector& x, const Vector& xhat) { return (xhat - x).norm() / x.norm(); }

/// 20 log10(||x||^2 / ||xhat - x||^2), in dB.
inline double snr_db(const Vector& x, const Vector& xhat) {
  return 20.0 * std::log10(x.squaredNorm() / (xhat - x).squaredNorm());
}

/// Regularization choice: the published defaults (1e-3 noiseless, 0.1 max|A'y| noisy) or a fixed value.
struct TauPolicy {
  std::optional<double> fixed;

  double resolve(const Matrix& a, const Vector& y, double sigma) const {
    if (fixed) return *fixed;
    if (sigma == 0.0) return kNoiselessTau;
    return kNoisyTauFactor * (a.transpose() * y).cwiseAbs().maxCoeff();
  }
  std::string describe() const { return fixed ? format_double(*fixed) : "default"; }
};

struct TrialParams {
  int num_blocks = 128;
  int block_len = 2;
  int k = 10;
  int n = 100;
  Ensemble ensemble = Ensemble::GaussianUnit;
  double sigma = 0.0;
  TauPolicy tau;
  // Weights need not be ordered here; they must lie in (0,1] for the solver.
  PriorProfile profile{{1.0}, {0.0}, {0.0}};
  double nu = 0.7;
  std::optional<int> k_hat;  // defaults to k
  double eps_tol = 1e-7;
  double step_tol = 1e-8;
  int max_iters = 1000;

  int dim() const { return num_blocks * block_len; }
};

struct TrialRecord {
  std::uint64_t seed = 0;
  int n = 0;
  Ensemble ensemble = Ensemble::GaussianUnit;
  int N = 0;
  int M = 0;
  int k = 0;
  int block_len = 0;
  double sigma = 0.0;
  PriorProfile profile;
  double relative_error = std::numeric_limits<double>::quiet_NaN();
  double snr_db = std::numeric_limits<double>::quiet_NaN();
  bool exact = false;
  int iterations = 0;
  std::string termination;  // eps_converged | step_converged | max_iters | degenerate | error
  bool degenerate = false;
  std::string error;
};

/// Everything a trial draws, exposed so tests can rebuild the instance.
struct TrialInstance {
  BlockStructure structure;
  BlockSignal signal;
  MeasurementMatrix matrix;
  Vector noise;
  Vector measurements;
  SupportEstimate estimate;
};

inline TrialInstance make_instance(const TrialParams& p, std::uint64_t seed) {
  if (p.k < 0 || p.k > p.num_blocks) throw std::invalid_argument("run_trial: need 0 <= k <= M");
  TrialInstance inst;
  inst.structure = BlockStructure::uniform(p.num_blocks, p.block_len);
  inst.signal = random_block_sparse(inst.structure, p.k, derive_seed(seed, 1));
  inst.matrix = sample_matrix(p.ensemble, p.n, p.dim(), derive_seed(seed, 2));
  inst.noise = Vector::Zero(p.n);
  if (p.sigma > 0.0) {
    Rng rng(derive_seed(seed, 3));
    std::normal_distribution<double> g(0.0, p.sigma);
    for (int i = 0; i < p.n; ++i) inst.noise[i] = g(rng);
  }
  inst.measurements = inst.matrix.entries * inst.signal.values() + inst.noise;
  inst.estimate = generate_estimate(block_support(inst.signal), p.num_blocks, p.k, p.profile, derive_seed(seed, 4));
  return inst;
}

/// One seeded trial. Solver failures are recorded, not thrown.
inline TrialRecord run_trial(const TrialParams& p, std::uint64_t seed) {
  TrialRecord rec;
  rec.seed = seed;
  rec.n = p.n;
  rec.ensemble = p.ensemble;
  rec.N = p.dim();
  rec.M = p.num_blocks;
  rec.k = p.k;
  rec.block_len = p.block_len;
  rec.sigma = p.sigma;
  rec.profile = p.profile;

  if (p.k == 0) {
    rec.degenerate = true;
    rec.termination = "degenerate";
    return rec;
  }
  try {
    const TrialInstance inst = make_instance(p, seed);
    IrlsConfig cfg;
    cfg.tau = p.tau.resolve(inst.matrix.entries, inst.measurements, p.sigma);
    cfg.nu = p.nu;
    cfg.k_hat = p.k_hat.value_or(p.k);
    cfg.eps_tol = p.eps_tol;
    cfg.step_tol = p.step_tol;
    cfg.max_iters = p.max_iters;
    const IrlsResult res = irls_solve(inst.matrix.entries, inst.measurements, inst.structure,
                                      weights_from_estimate(inst.estimate, p.num_blocks), cfg);
    const Vector& x = inst.signal.values();
    const Vector& xhat = res.solution.values();
    rec.relative_error = relative_error(x, xhat);
    rec.snr_db = snr_db(x, xhat);
    rec.exact = rec.relative_error <= kExactRecoveryTol;
    rec.iterations = res.iterations;
    rec.termination = std::string(to_string(res.termination));
  } catch (const std::exception& e) {
    rec.termination = "error";
    rec.error = e.what();
  }
  return rec;
}

/// Grid of recovery experiments; every (profile, n) point runs `trials` trials with seeds
/// base_seed + trial index.
struct SweepSpec {
  TrialParams base;
  std::vector<int> n_grid;
  std::vector<PriorProfile> profiles;
  int trials = 50;
  std::uint64_t base_seed = 0;

  void validate() const {
    if (n_grid.empty()) throw std::invalid_argument("SweepSpec: n grid is empty");
    if (profiles.empty()) throw std::invalid_argument("SweepSpec: no weight/estimate settings");
    if (trials < 1) throw std::invalid_argument("SweepSpec: trials must be >= 1");
    for (int n : n_grid)
      if (n < 1) throw std::invalid_argument("SweepSpec: measurement counts must be >= 1");
  }
};

struct PointSummary {
  int trials = 0;
  int exact = 0;
  int valid = 0;
  int degenerate = 0;
  int failed = 0;
  double exact_frequency = 0.0;
  double mean_snr_db = std::numeric_limits<double>::quiet_NaN();
  double mean_relative_error = std::numeric_limits<double>::quiet_NaN();
  double mean_iterations = std::numeric_limits<double>::quiet_NaN();
};

/// Aggregates records of one grid point. Means use the CSV-quantized per-trial values so the
/// summary can be recomputed exactly from a per-trial file.
inline PointSummary summarize(const std::vector<TrialRecord>& recs) {
  PointSummary s;
  s.trials = static_cast<int>(recs.size());
  double snr = 0.0, rel = 0.0, its = 0.0;
  for (const auto& r : recs) {
    if (r.exact) ++s.exact;
    if (r.degenerate) {
      ++s.degenerate;
      continue;
    }
    if (!r.error.empty() || r.termination == "error") {
      ++s.failed;
      continue;
    }
    ++s.valid;
    snr += quantize(r.snr_db);
    rel += quantize(r.relative_error);
    its += r.iterations;
  }
  if (s.trials > 0) s.exact_frequency = static_cast<double>(s.exact) / s.trials;
  if (s.valid > 0) {
    s.mean_snr_db = snr / s.valid;
    s.mean_relative_error = rel / s.valid;
    s.mean_iterations = its / s.valid;
  }
  return s;
}

inline const std::vector<std::string>& point_columns() {
  static const std::vector<std::string> cols{"n", "N", "M", "block_len", "k", "sigma",
                                             "ensemble", "L", "omegas", "rhos", "alphas"};
  return cols;
}

inline std::vector<std::string> point_cells(const TrialRecord& r) {
  return {std::to_string(r.n),        std::to_string(r.N),         std::to_string(r.M),
          std::to_string(r.block_len), std::to_string(r.k),        format_double(r.sigma),
          std::string(to_string(r.ensemble)), std::to_string(r.profile.size()), join_values(r.profile.omegas),
          join_values(r.profile.rhos), join_values(r.profile.alphas)};
}

inline std::vector<std::string> summary_header() {
  auto h = point_columns();
  for (const char* c : {"trials", "exact_frequency", "mean_snr_db", "mean_relative_error", "mean_iterations",
                        "valid_trials", "degenerate_trials", "failed_trials"})
    h.emplace_back(c);
  return h;
}

inline std::vector<std::string> trial_header() {
  auto h = point_columns();
  for (const char* c : {"trial", "seed", "relative_error", "snr_db", "exact", "iterations", "termination"})
    h.emplace_back(c);
  return h;
}

inline std::vector<std::string> summary_row(const TrialRecord& point, const PointSummary& s) {
  auto row = point_cells(point);
  row.insert(row.end(), {std::to_string(s.trials), format_double(s.exact_frequency), format_double(s.mean_snr_db),
                         format_double(s.mean_relative_error), format_double(s.mean_iterations),
                         std::to_string(s.valid), std::to_string(s.degenerate), std::to_string(s.failed)});
  return row;
}

inline std::vector<std::string> trial_row(const TrialRecord& r, int trial_index) {
  auto row = point_cells(r);
  row.insert(row.end(), {std::to_string(trial_index), std::to_string(r.seed), format_double(r.relative_error),
                         format_double(r.snr_db), r.exact ? "1" : "0", std::to_string(r.iterations),
                         r.termination});
  return row;
}

struct SweepResult {
  CsvTable summary;
  CsvTable per_trial;
  std::vector<std::vector<TrialRecord>> points;  // one entry per summary row
};

/// Runs every grid point (profiles outer, n inner) and builds the summary and per-trial tables.
template <typename Progress = std::nullptr_t>
SweepResult run_sweep(const SweepSpec& spec, Progress progress = nullptr) {
  spec.validate();
  SweepResult out;
  out.summary.header = summary_header();
  out.per_trial.header = trial_header();
  for (const PriorProfile& profile : spec.profiles) {
    for (int n : spec.n_grid) {
      TrialParams p = spec.base;
      p.n = n;
      p.profile = profile;
      std::vector<TrialRecord> recs;
      recs.reserve(static_cast<std::size_t>(spec.trials));
      for (int t = 0; t < spec.trials; ++t) {
        recs.push_back(run_trial(p, spec.base_seed + static_cast<std::uint64_t>(t)));
        out.per_trial.rows.push_back(trial_row(recs.back(), t));
      }
      out.summary.rows.push_back(summary_row(recs.front(), summarize(recs)));
      if constexpr (!std::is_same_v<Progress, std::nullptr_t>) progress(out.summary.rows.back());
      out.points.push_back(std::move(recs));
    }
  }
  return out;
}

/// Rebuilds the summary table from a per-trial table.
inline CsvTable reaggregate(const CsvTable& per_trial) {
  const std::size_t key_width = point_columns().size();
  const std::size_t c_rel = per_trial.column("relative_error"), c_snr = per_trial.column("snr_db"),
                    c_exact = per_trial.column("exact"), c_its = per_trial.column("iterations"),
                    c_term = per_trial.column("termination");
  CsvTable out;
  out.header = summary_header();
  std::vector<std::vector<std::string>> keys;
  std::vector<std::vector<TrialRecord>> groups;
  for (const auto& row : per_trial.rows) {
    std::vector<std::string> key(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(key_width));
    if (keys.empty() || keys.back() != key) {
      keys.push_back(key);
      groups.emplace_back();
    }
    TrialRecord r;
    r.relative_error = parse_double(row[c_rel]);
    r.snr_db = parse_double(row[c_snr]);
    r.exact = row[c_exact] == "1";
    r.iterations = std::stoi(row[c_its]);
    r.termination = row[c_term];
    r.degenerate = r.termination == "degenerate";
    groups.back().push_back(r);
  }
  for (std::size_t g = 0; g < keys.size(); ++g) {
    const PointSummary s = summarize(groups[g]);
    auto row = keys[g];
    row.insert(row.end(), {std::to_string(s.trials), format_double(s.exact_frequency), format_double(s.mean_snr_db),
                           format_double(s.mean_relative_error), format_double(s.mean_iterations),
                           std::to_string(s.valid), std::to_string(s.degenerate), std::to_string(s.failed)});
    out.rows.push_back(std::move(row));
  }
  return out;
}

}  // namespace wbcs

#endif  // WBCS_HARNESS_HPP
