#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "collapse/dynamics.hpp"
#include "collapse/ensemble.hpp"
#include "collapse/errors.hpp"
#include "collapse/model.hpp"

namespace collapse {

/// Flat key = value configuration covering the two-state model, sampling and
/// integrator settings. Unknown keys are rejected; validation reports every
/// problem found, not just the first.
///
/// Keys (defaults in parentheses):
///   x0_1, x0_2            initial weights, must sum to 1
///   tau_r                 reduction time in seconds, > 0
///   sampling_mode         independent | common_chaotic (independent)
///   amplitude_convention  probability | amplitude (probability)
///   master_seed           unsigned 64-bit (1)
///   n_trajectories        >= 1 (10000)
///   t_end_tau             end time in units of tau_r (30)
///   step_tau              integrator step in units of tau_r (0.001)
///   delta                 outcome threshold in (0, 0.5) (0.001)
///   clamp                 true | false (true)
///   omega_1, omega_2      free phase frequencies, rad/s (0)
///   chaos                 none | common_logistic | independent_logistic (none)
///   chaos_seed            logistic seed in (0,1) (0.3)
///   chaos_seed_2          second stream's seed for independent_logistic (0.7)
///   chaos_amplitude       >= 0 (0)
///   chaos_period_tau      window length in units of tau_r (1)
struct RunConfig {
  std::map<std::string, std::string> raw;

  bool has(const std::string& key) const { return raw.count(key) != 0; }

  double number(const std::string& key, double fallback) const;
  std::uint64_t integer(const std::string& key, std::uint64_t fallback) const;
  bool flag(const std::string& key, bool fallback) const;

  TwoStateConfig two_state() const;
  SamplingSpec sampling() const;
  IntegratorSettings integrator() const;  // times in units of tau_r
  PhaseModel phase_model() const;         // step_period in units of tau_r
  double delta() const { return number("delta", 1e-3); }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

inline bool parse_number(const std::string& text, double& out) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc{} && res.ptr == last;
}

inline bool parse_integer(const std::string& text, std::uint64_t& out) {
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc{} && res.ptr == last;
}

struct KeySpec {
  enum Kind { Number, Integer, Flag, Enum } kind;
  std::vector<std::string> choices;  // Enum only
};

inline const std::map<std::string, KeySpec>& key_schema() {
  static const std::map<std::string, KeySpec> schema = {
      {"x0_1", {KeySpec::Number, {}}},
      {"x0_2", {KeySpec::Number, {}}},
      {"tau_r", {KeySpec::Number, {}}},
      {"sampling_mode", {KeySpec::Enum, {"independent", "common_chaotic"}}},
      {"amplitude_convention", {KeySpec::Enum, {"probability", "amplitude"}}},
      {"master_seed", {KeySpec::Integer, {}}},
      {"n_trajectories", {KeySpec::Integer, {}}},
      {"t_end_tau", {KeySpec::Number, {}}},
      {"step_tau", {KeySpec::Number, {}}},
      {"delta", {KeySpec::Number, {}}},
      {"clamp", {KeySpec::Flag, {}}},
      {"omega_1", {KeySpec::Number, {}}},
      {"omega_2", {KeySpec::Number, {}}},
      {"chaos", {KeySpec::Enum, {"none", "common_logistic", "independent_logistic"}}},
      {"chaos_seed", {KeySpec::Number, {}}},
      {"chaos_seed_2", {KeySpec::Number, {}}},
      {"chaos_amplitude", {KeySpec::Number, {}}},
      {"chaos_period_tau", {KeySpec::Number, {}}},
  };
  return schema;
}

}  // namespace detail

inline double RunConfig::number(const std::string& key, double fallback) const {
  const auto it = raw.find(key);
  if (it == raw.end()) return fallback;
  double v = 0.0;
  detail::parse_number(it->second, v);  // validated at parse time
  return v;
}

inline std::uint64_t RunConfig::integer(const std::string& key,
                                        std::uint64_t fallback) const {
  const auto it = raw.find(key);
  if (it == raw.end()) return fallback;
  std::uint64_t v = 0;
  detail::parse_integer(it->second, v);
  return v;
}

inline bool RunConfig::flag(const std::string& key, bool fallback) const {
  const auto it = raw.find(key);
  if (it == raw.end()) return fallback;
  return it->second == "true";
}

inline TwoStateConfig RunConfig::two_state() const {
  TwoStateConfig cfg;
  cfg.x0 = {number("x0_1", 0.5), number("x0_2", 0.5)};
  cfg.tau_r = number("tau_r", 1.0);
  cfg.sampling_mode = raw.count("sampling_mode") &&
                              raw.at("sampling_mode") == "common_chaotic"
                          ? SamplingMode::CommonChaotic
                          : SamplingMode::Independent;
  cfg.amplitude_convention = raw.count("amplitude_convention") &&
                                     raw.at("amplitude_convention") == "amplitude"
                                 ? AmplitudeConvention::Amplitude
                                 : AmplitudeConvention::Probability;
  return cfg;
}

inline SamplingSpec RunConfig::sampling() const {
  SamplingSpec spec;
  spec.mode = two_state().sampling_mode;
  spec.n_trajectories = integer("n_trajectories", 10000);
  spec.master_seed = integer("master_seed", 1);
  return spec;
}

inline IntegratorSettings RunConfig::integrator() const {
  IntegratorSettings st;
  st.step = number("step_tau", 1e-3);
  st.t_end = number("t_end_tau", 30.0);
  st.clamp = flag("clamp", true);
  return st;
}

inline PhaseModel RunConfig::phase_model() const {
  PhaseModel pm;
  pm.omega = {number("omega_1", 0.0), number("omega_2", 0.0)};
  const std::string chaos = raw.count("chaos") ? raw.at("chaos") : "none";
  pm.chaos = chaos == "common_logistic"
                 ? ChaosMode::CommonLogistic
                 : (chaos == "independent_logistic" ? ChaosMode::IndependentLogistic
                                                    : ChaosMode::None);
  pm.amplitude = number("chaos_amplitude", 0.0);
  pm.step_period = number("chaos_period_tau", 1.0);
  pm.seeds = {number("chaos_seed", 0.3), number("chaos_seed_2", 0.7)};
  return pm;
}

/// Parse and validate a config file. Collects all syntax errors, unknown keys,
/// type mismatches and semantic violations into one ConfigError.
inline RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound("parse_config: cannot open " + path);

  RunConfig config;
  std::vector<std::string> issues;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string text = detail::trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      issues.push_back("line " + std::to_string(line_no) +
                       ": expected key = value");
      continue;
    }
    const std::string key = detail::trim(text.substr(0, eq));
    const std::string value = detail::trim(text.substr(eq + 1));
    if (key.empty() || value.empty()) {
      issues.push_back("line " + std::to_string(line_no) +
                       ": empty key or value");
      continue;
    }
    const auto& schema = detail::key_schema();
    const auto spec = schema.find(key);
    if (spec == schema.end()) {
      issues.push_back("unknown key '" + key + "'");
      continue;
    }
    if (config.raw.count(key)) {
      issues.push_back("duplicate key '" + key + "'");
      continue;
    }
    switch (spec->second.kind) {
      case detail::KeySpec::Number: {
        double v;
        if (!detail::parse_number(value, v))
          issues.push_back("key '" + key + "': expected a number, got '" +
                           value + "'");
        break;
      }
      case detail::KeySpec::Integer: {
        std::uint64_t v;
        if (!detail::parse_integer(value, v))
          issues.push_back("key '" + key +
                           "': expected an unsigned integer, got '" + value +
                           "'");
        break;
      }
      case detail::KeySpec::Flag:
        if (value != "true" && value != "false")
          issues.push_back("key '" + key + "': expected true or false, got '" +
                           value + "'");
        break;
      case detail::KeySpec::Enum:
        if (std::find(spec->second.choices.begin(), spec->second.choices.end(),
                      value) == spec->second.choices.end())
          issues.push_back("key '" + key + "': invalid value '" + value + "'");
        break;
    }
    config.raw[key] = value;
  }

  // Semantic checks on whatever parsed cleanly.
  const auto bad = [&](const std::string& key) {
    return std::any_of(issues.begin(), issues.end(), [&](const std::string& s) {
      return s.find("'" + key + "'") != std::string::npos;
    });
  };
  if (config.has("x0_1") && config.has("x0_2") && !bad("x0_1") && !bad("x0_2")) {
    const double sum = config.number("x0_1", 0) + config.number("x0_2", 0);
    if (std::abs(sum - 1.0) > 1e-12)
      issues.push_back("x0_1 + x0_2 must equal 1 within 1e-12");
    for (const char* key : {"x0_1", "x0_2"}) {
      const double v = config.number(key, 0);
      if (!(v >= 0.0 && v <= 1.0))
        issues.push_back(std::string(key) + " must lie in [0,1]");
    }
  }
  if (config.has("tau_r") && !bad("tau_r") && !(config.number("tau_r", 0) > 0))
    issues.push_back("tau_r must be positive");
  if (config.has("n_trajectories") && !bad("n_trajectories") &&
      config.integer("n_trajectories", 1) < 1)
    issues.push_back("n_trajectories must be >= 1");
  if (config.has("step_tau") && !bad("step_tau") &&
      !(config.number("step_tau", 1) > 0))
    issues.push_back("step_tau must be positive");
  if (config.has("t_end_tau") && !bad("t_end_tau") &&
      !(config.number("t_end_tau", 0) >= 0))
    issues.push_back("t_end_tau must be nonnegative");
  if (config.has("delta") && !bad("delta")) {
    const double d = config.number("delta", 1e-3);
    if (!(d > 0.0 && d < 0.5)) issues.push_back("delta must lie in (0, 0.5)");
  }
  if (config.has("chaos_amplitude") && !bad("chaos_amplitude") &&
      !(config.number("chaos_amplitude", 0) >= 0))
    issues.push_back("chaos_amplitude must be >= 0");
  if (config.has("chaos_period_tau") && !bad("chaos_period_tau") &&
      !(config.number("chaos_period_tau", 1) > 0))
    issues.push_back("chaos_period_tau must be positive");
  for (const char* key : {"chaos_seed", "chaos_seed_2"}) {
    if (!config.has(key) || bad(key)) continue;
    const double u = config.number(key, 0.3);
    if (!(u > 0.0 && u < 1.0) || u == 0.25 || u == 0.5 || u == 0.75)
      issues.push_back(std::string(key) +
                       " must lie in (0,1) away from the logistic fixed "
                       "points {0.25, 0.5, 0.75}");
  }

  if (!issues.empty()) throw ConfigError(std::move(issues));
  return config;
}

/// Check that `required` keys are all present; reports the full missing list.
inline void require_keys(const RunConfig& config,
                         const std::vector<std::string>& required) {
  std::vector<std::string> issues;
  for (const auto& key : required)
    if (!config.has(key)) issues.push_back("missing key '" + key + "'");
  if (!issues.empty()) throw ConfigError(std::move(issues));
}

}  // namespace collapse
