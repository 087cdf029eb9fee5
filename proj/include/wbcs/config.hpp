#ifndef WBCS_CONFIG_HPP
#define WBCS_CONFIG_HPP

// Flat key = value sweep configuration.
//
//   N = 256            # or M; block_len is required
//   block_len = 2
//   k = 10
//   n_grid = 40:10:90  # start:step:stop, or a comma list
//   ensemble = gaussian_unit
//   sigma = 0
//   tau = default      # or a number
//   L = 1
//   omegas = 0.1; 0.5; 1      # ';' separates settings, ',' separates the L values of one setting
//   rhos = 1
//   alphas = 0.8
//   trials = 50
//   seed = 1
//
// Optional solver keys: nu, k_hat, eps_tol, step_tol, max_iters. The grid is the product of the
// omega, rho and alpha settings; a one-value setting is repeated L times.

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wbcs/csv.hpp"
#include "wbcs/harness.hpp"

namespace wbcs {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double to_double(const std::string& key, const std::string& v) {
  try {
    return parse_double(trim(v));
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' expects a number, got '" + v + "'");
  }
}

inline long long to_int(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d != static_cast<double>(static_cast<long long>(d)))
    throw ConfigError("config: '" + key + "' expects an integer, got '" + v + "'");
  return static_cast<long long>(d);
}

inline std::vector<int> parse_int_grid(const std::string& key, const std::string& v) {
  std::vector<int> out;
  if (v.find(':') != std::string::npos) {
    const auto parts = split(v, ':');
    if (parts.size() != 3) throw ConfigError("config: '" + key + "' range must be start:step:stop");
    const long long start = to_int(key, parts[0]), step = to_int(key, parts[1]), stop = to_int(key, parts[2]);
    if (step <= 0) throw ConfigError("config: '" + key + "' step must be positive");
    for (long long n = start; n <= stop; n += step) out.push_back(static_cast<int>(n));
  } else {
    for (const auto& s : split(v, ',')) out.push_back(static_cast<int>(to_int(key, s)));
  }
  if (out.empty()) throw ConfigError("config: '" + key + "' is empty");
  return out;
}

inline std::vector<std::vector<double>> parse_settings(const std::string& key, const std::string& v,
                                                       std::size_t L) {
  std::vector<std::vector<double>> settings;
  for (const auto& setting : split(v, ';')) {
    if (trim(setting).empty()) continue;
    std::vector<double> vals;
    for (const auto& s : split(setting, ',')) vals.push_back(to_double(key, s));
    if (vals.size() == 1) vals.assign(L, vals.front());
    if (vals.size() != L)
      throw ConfigError("config: '" + key + "' setting has " + std::to_string(vals.size()) + " values, L=" +
                        std::to_string(L));
    settings.push_back(std::move(vals));
  }
  if (settings.empty()) throw ConfigError("config: '" + key + "' is empty");
  return settings;
}

}  // namespace detail

/// Raw key/value pairs; '#' starts a comment.
inline std::map<std::string, std::string> parse_key_values(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = detail::trim(line.substr(0, eq));
    if (kv.count(key)) throw ConfigError("config: duplicate key '" + key + "'");
    kv[key] = detail::trim(line.substr(eq + 1));
  }
  return kv;
}

inline SweepSpec sweep_spec_from_config(std::istream& in) {
  static const std::set<std::string> known{"N", "M", "block_len", "k", "n_grid", "ensemble", "sigma", "tau",
                                           "L", "omegas", "rhos", "alphas", "trials", "seed", "nu", "k_hat",
                                           "eps_tol", "step_tol", "max_iters"};
  const auto kv = parse_key_values(in);
  for (const auto& [k, v] : kv)
    if (!known.count(k)) throw ConfigError("config: unknown key '" + k + "'");
  auto require = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw ConfigError("config: missing key '" + key + "'");
    return it->second;
  };
  auto get = [&](const std::string& key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };

  SweepSpec spec;
  TrialParams& p = spec.base;
  p.block_len = static_cast<int>(detail::to_int("block_len", require("block_len")));
  if (p.block_len < 1) throw ConfigError("config: block_len must be >= 1");
  if (auto m = get("M")) p.num_blocks = static_cast<int>(detail::to_int("M", *m));
  if (auto nn = get("N")) {
    const long long big_n = detail::to_int("N", *nn);
    if (big_n % p.block_len != 0) throw ConfigError("config: N must be a multiple of block_len");
    if (get("M") && big_n != static_cast<long long>(p.num_blocks) * p.block_len)
      throw ConfigError("config: N, M and block_len disagree");
    p.num_blocks = static_cast<int>(big_n / p.block_len);
  } else if (!get("M")) {
    throw ConfigError("config: need N or M");
  }
  p.k = static_cast<int>(detail::to_int("k", require("k")));
  if (p.k < 0 || p.k > p.num_blocks) throw ConfigError("config: need 0 <= k <= M");
  spec.n_grid = detail::parse_int_grid("n_grid", require("n_grid"));
  if (auto e = get("ensemble")) {
    try {
      p.ensemble = parse_ensemble(*e);
    } catch (const std::invalid_argument& err) {
      throw ConfigError(std::string("config: ") + err.what());
    }
  }
  if (auto s = get("sigma")) p.sigma = detail::to_double("sigma", *s);
  if (p.sigma < 0.0) throw ConfigError("config: sigma must be >= 0");
  if (auto t = get("tau"); t && *t != "default") p.tau.fixed = detail::to_double("tau", *t);
  if (auto v = get("nu")) p.nu = detail::to_double("nu", *v);
  if (auto v = get("k_hat")) p.k_hat = static_cast<int>(detail::to_int("k_hat", *v));
  if (auto v = get("eps_tol")) p.eps_tol = detail::to_double("eps_tol", *v);
  if (auto v = get("step_tol")) p.step_tol = detail::to_double("step_tol", *v);
  if (auto v = get("max_iters")) p.max_iters = static_cast<int>(detail::to_int("max_iters", *v));
  if (auto v = get("trials")) spec.trials = static_cast<int>(detail::to_int("trials", *v));
  if (auto v = get("seed")) spec.base_seed = static_cast<std::uint64_t>(detail::to_int("seed", *v));

  const std::size_t L = get("L") ? static_cast<std::size_t>(detail::to_int("L", *get("L"))) : 1;
  if (L < 1) throw ConfigError("config: L must be >= 1");
  const auto omegas = detail::parse_settings("omegas", get("omegas") ? *get("omegas") : "1", L);
  const auto rhos = detail::parse_settings("rhos", get("rhos") ? *get("rhos") : "0", L);
  const auto alphas = detail::parse_settings("alphas", get("alphas") ? *get("alphas") : "0", L);
  for (const auto& w : omegas)
    for (double v : w)
      if (!(v > 0.0 && v <= 1.0)) throw ConfigError("config: weights must lie in (0,1]");
  for (const auto& w : omegas)
    for (const auto& r : rhos)
      for (const auto& a : alphas) spec.profiles.push_back(PriorProfile{w, r, a});
  try {
    spec.validate();
  } catch (const std::invalid_argument& err) {
    throw ConfigError(std::string("config: ") + err.what());
  }
  return spec;
}

inline SweepSpec sweep_spec_from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  return sweep_spec_from_config(f);
}

}  // namespace wbcs

#endif  // WBCS_CONFIG_HPP
