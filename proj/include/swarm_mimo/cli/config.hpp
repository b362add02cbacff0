// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The swarm-mimo-sim authors

#pragma once

#include "../core.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace swarm_mimo::cli {

enum class ExperimentKind { rate_curve, spacing_sweep, gain_cdf, mission_sim, validate, tables };

inline const std::vector<std::pair<ExperimentKind, std::string>> &experiment_names() {
  static const std::vector<std::pair<ExperimentKind, std::string>> names = {
      {ExperimentKind::rate_curve, "rate-curve"},   {ExperimentKind::spacing_sweep, "spacing-sweep"},
      {ExperimentKind::gain_cdf, "gain-cdf"},       {ExperimentKind::mission_sim, "mission-sim"},
      {ExperimentKind::validate, "validate"},       {ExperimentKind::tables, "tables"}};
  return names;
}

inline std::string to_string(ExperimentKind k) {
  for (const auto &[kind, name] : experiment_names())
    if (kind == k) return name;
  return "?";
}

inline std::optional<ExperimentKind> parse_kind(const std::string &s) {
  for (const auto &[kind, name] : experiment_names())
    if (name == s) return kind;
  return std::nullopt;
}

enum class ValueType { integer, real, text, list, choice };

struct KeySpec {
  std::string key; // section.name
  ValueType type;
  std::string default_value;
  double lo = -HUGE_VAL, hi = HUGE_VAL; // inclusive numeric range
  std::vector<std::string> choices;
  std::vector<ExperimentKind> used_by; // empty means every experiment
  std::string help;

  bool applies_to(ExperimentKind k) const {
    return used_by.empty() || std::find(used_by.begin(), used_by.end(), k) != used_by.end();
  }
};

namespace detail {

using EK = ExperimentKind;

inline KeySpec num(std::string key, ValueType t, std::string def, double lo, double hi,
                   std::vector<EK> used, std::string help) {
  return {std::move(key), t, std::move(def), lo, hi, {}, std::move(used), std::move(help)};
}

inline KeySpec pick(std::string key, std::string def, std::vector<std::string> choices,
                    std::vector<EK> used, std::string help) {
  return {std::move(key), ValueType::choice, std::move(def), -HUGE_VAL, HUGE_VAL,
          std::move(choices), std::move(used), std::move(help)};
}

inline KeySpec list(std::string key, std::string def, double lo, double hi, std::vector<EK> used,
                    std::string help) {
  return {std::move(key), ValueType::list, std::move(def), lo, hi, {}, std::move(used),
          std::move(help)};
}

} // namespace detail

inline const std::vector<KeySpec> &schema() {
  using detail::EK;
  using detail::list;
  using detail::num;
  using detail::pick;
  constexpr auto I = ValueType::integer;
  constexpr auto R = ValueType::real;
  const std::vector<EK> geo = {EK::rate_curve, EK::spacing_sweep, EK::gain_cdf, EK::mission_sim,
                               EK::validate};
  const std::vector<EK> shell = {EK::rate_curve, EK::spacing_sweep, EK::gain_cdf, EK::validate};
  const std::vector<EK> link = {EK::rate_curve, EK::mission_sim, EK::validate, EK::tables};
  static const std::vector<KeySpec> s = {
      pick("experiment.kind", "", {"rate-curve", "spacing-sweep", "gain-cdf", "mission-sim",
                                   "validate", "tables"},
           {}, "experiment to run"),
      num("experiment.seed", I, "1", 0, 9.0e18, {}, "master RNG seed"),
      num("experiment.threads", I, "0", 0, 1024, {}, "worker threads, 0 = hardware"),

      num("array.m_x", I, "100", 1, 1e6, geo, "elements along x"),
      num("array.m_y", I, "1", 1, 1e4, geo, "elements along y"),
      num("array.delta_x_lambda", R, "0.5", 1e-6, 1e3, geo, "x spacing in wavelengths"),
      num("array.delta_y_lambda", R, "0.5", 0, 1e3, geo, "y spacing in wavelengths"),
      num("array.seed", I, "7", 0, 9.0e18, {EK::gain_cdf, EK::mission_sim, EK::validate},
          "seed of the frozen element orientation draw"),
      pick("array.gs_orientation", "pseudo_random", {"identical", "pseudo_random"},
           {EK::gain_cdf, EK::mission_sim, EK::validate}, "element orientations"),

      num("region.r_min_m", R, "20", 1e-9, 1e9, shell, "inner shell radius"),
      num("region.r_max_m", R, "500", 1e-9, 1e9, shell, "outer shell radius"),

      num("rf.f_c_hz", R, "2.4e9", 1e6, 1e12, {}, "carrier frequency"),
      num("rf.bandwidth_hz", R, "20e6", 1, 1e12, link, "system bandwidth B"),
      num("rf.coherence_bandwidth_hz", R, "3e6", 1, 1e12, link, "coherence bandwidth B_c"),
      num("rf.v_max_mps", R, "20", 0, 1e4, {EK::rate_curve, EK::validate},
          "maximum UAV speed for the coherence time"),
      num("rf.tau_dl_fraction", R, "0.125", 0, 0.999, link, "downlink share of T_len"),
      num("rf.rho_u_db", R, "0", 0, 60, link, "uplink SNR target"),
      num("rf.rho_p_db", R, "10", 0, 60, link, "pilot SNR target"),
      num("rf.kappa_chi_wc_db", R, "0", -100, 0, {EK::rate_curve, EK::tables},
          "kappa times chi_wc"),
      num("rf.chi_wc_db", R, "-10", -100, 0, {EK::mission_sim}, "worst-case mean gain"),

      list("rate.k_list", "20,50,100", 1, 1e6, {EK::rate_curve}, "fleet sizes K"),
      list("rate.m_list", "1:200", 1, 1e7, {EK::rate_curve}, "antenna counts M (a:b ranges allowed)"),
      num("rate.q_target_bps", R, "20e6", 0, 1e12, {EK::rate_curve}, "per-UAV target throughput"),
      pick("rate.bound", "optimal", {"optimal", "shell"}, {EK::rate_curve},
           "optimal spacing bound or shell bound with Omega"),
      pick("rate.array_kind", "ula", {"ula", "ura"}, {EK::rate_curve}, "array shape for the bound"),

      num("sweep.x_ratio_min", R, "0.05", 1e-6, 1e3, {EK::spacing_sweep}, "first delta_x/lambda"),
      num("sweep.x_ratio_max", R, "3", 1e-6, 1e3, {EK::spacing_sweep}, "last delta_x/lambda"),
      num("sweep.x_points", I, "296", 1, 1e6, {EK::spacing_sweep}, "grid points along x"),
      num("sweep.y_ratio_min", R, "0.5", 0, 1e3, {EK::spacing_sweep}, "first delta_y/lambda"),
      num("sweep.y_ratio_max", R, "0.5", 0, 1e3, {EK::spacing_sweep}, "last delta_y/lambda"),
      num("sweep.y_points", I, "1", 1, 1e6, {EK::spacing_sweep}, "grid points along y"),

      num("gain.samples", I, "100000", 1e4, 1e9, {EK::gain_cdf}, "Monte Carlo draws"),
      pick("gain.polarization", "circular", {"circular", "linear"}, {EK::gain_cdf},
           "feed excitation"),
      pick("gain.element_model", "cross_dipole", {"cross_dipole", "unit_gain"}, {EK::gain_cdf},
           "element model"),
      num("gain.threshold_min_db", R, "-30", -300, 300, {EK::gain_cdf}, "first CDF threshold"),
      num("gain.threshold_max_db", R, "40", -300, 300, {EK::gain_cdf}, "last CDF threshold"),
      num("gain.threshold_points", I, "141", 1, 1e6, {EK::gain_cdf}, "CDF thresholds"),

      num("mission.x1_m", R, "-1000", -1e7, 1e7, {EK::mission_sim}, "area x lower bound"),
      num("mission.x2_m", R, "2000", -1e7, 1e7, {EK::mission_sim}, "area x upper bound"),
      num("mission.y1_m", R, "2000", -1e7, 1e7, {EK::mission_sim}, "area y lower bound"),
      num("mission.y2_m", R, "6000", -1e7, 1e7, {EK::mission_sim}, "area y upper bound"),
      num("mission.grid_cols", I, "5", 1, 1e4, {EK::mission_sim}, "drones along x"),
      num("mission.grid_rows", I, "4", 1, 1e4, {EK::mission_sim}, "drones along y"),
      num("mission.speed_mps", R, "30", 1e-6, 1e4, {EK::mission_sim}, "drone speed"),
      num("mission.gsd_m", R, "0.05", 1e-6, 1e4, {EK::mission_sim}, "ground sampling distance"),
      num("mission.altitude_m", R, "100", 0, 1e6, {EK::mission_sim},
          "flight altitude, 0 derives it from the GSD"),
      num("mission.cross_track_pixels", I, "2664", 1, 1e6, {EK::mission_sim},
          "pixels across the swath"),
      num("mission.dt_s", R, "0.5", 1e-6, 1e6, {EK::mission_sim}, "time step"),
      num("mission.duration_s", R, "100", 0, 1e8, {EK::mission_sim},
          "simulated time, 0 runs the whole path"),
      pick("mission.csi", "estimated", {"perfect", "estimated"}, {EK::mission_sim},
           "receiver channel knowledge"),
      num("mission.d_wc_m", R, "0", 0, 1e9, {EK::mission_sim},
          "worst-case distance, 0 uses the farthest corner"),
      num("mission.noise_figure_db", R, "7", 0, 100, {EK::mission_sim}, "receiver noise figure"),
      num("mission.temperature_k", R, "290", 1, 1e4, {EK::mission_sim}, "noise temperature"),
      num("mission.power_scale", R, "1", 1e-9, 1e9, {EK::mission_sim},
          "multiplier on the channel-inversion data power"),

      num("camera.r_px", I, "1496", 1, 1e6, {EK::mission_sim, EK::tables}, "short sensor side"),
      num("camera.r_py", I, "2664", 1, 1e6, {EK::mission_sim, EK::tables}, "long sensor side"),
      num("camera.bits_per_pixel", R, "24", 1e-9, 1e4, {EK::mission_sim, EK::tables}, "bits per pixel"),
      num("camera.pixel_size_m", R, "2.3e-6", 1e-12, 1, {EK::mission_sim, EK::tables}, "pixel pitch"),
      num("camera.focal_length_m", R, "5e-3", 1e-9, 10, {EK::mission_sim, EK::tables}, "focal length"),
      num("camera.overlap_front", R, "0.7", 0, 0.999, {EK::mission_sim, EK::tables}, "OL_y"),
      num("camera.overlap_side", R, "0.6", 0, 0.999, {EK::mission_sim, EK::tables}, "OL_x"),

      num("tables.k", I, "20", 1, 1e6, {EK::tables}, "fleet size"),
      list("tables.gsd_list", "0.02,0.05,0.2", 1e-9, 1e4, {EK::tables}, "Table I GSD columns"),
      list("tables.speed_list", "20,30,30", 1e-9, 1e4, {EK::tables}, "Table I drone speeds"),
      list("tables.image_compression_list", "1,2", 1, 1e6, {EK::tables}, "Table I CR rows"),
      {"tables.video_resolutions", ValueType::text, "4096x2160,2664x1496", -HUGE_VAL, HUGE_VAL,
       {}, {EK::tables}, "Table II sensor sizes r_py x r_px"},
      list("tables.fps_list", "60,30", 0, 1e4, {EK::tables}, "Table II frame rates"),
      num("tables.video_compression", R, "200", 1, 1e9, {EK::tables}, "Table II CR"),
      num("tables.video_speed_mps", R, "30", 0, 1e4, {EK::tables},
          "speed used for the Table II pre-log"),

      num("validate.samples", I, "100000", 1e4, 1e9, {EK::validate}, "moment check draws"),
      num("validate.rate_samples", I, "10000", 1e3, 1e9, {EK::validate}, "ergodic rate draws"),
      num("validate.k", I, "2", 2, 1e4, {EK::validate}, "fleet size"),
  };
  return s;
}

// Defaults that differ from the schema default for one experiment.
inline std::optional<std::string> kind_default(ExperimentKind k, const std::string &key) {
  static const std::map<std::pair<ExperimentKind, std::string>, std::string> over = {
      {{ExperimentKind::tables, "rf.rho_u_db"}, "10"},
      {{ExperimentKind::tables, "rf.rho_p_db"}, "20"},
      {{ExperimentKind::mission_sim, "rf.rho_u_db"}, "10"},
      {{ExperimentKind::mission_sim, "rf.rho_p_db"}, "20"},
      {{ExperimentKind::gain_cdf, "array.m_x"}, "50"},
      {{ExperimentKind::gain_cdf, "array.gs_orientation"}, "identical"},
      {{ExperimentKind::validate, "array.m_x"}, "8"},
      {{ExperimentKind::validate, "array.delta_x_lambda"}, "0.3"},
      {{ExperimentKind::validate, "array.gs_orientation"}, "identical"},
      {{ExperimentKind::validate, "region.r_min_m"}, "100"},
      {{ExperimentKind::spacing_sweep, "array.m_x"}, "50"},
  };
  auto it = over.find({k, key});
  if (it == over.end()) return std::nullopt;
  return it->second;
}

inline const KeySpec *find_key(const std::string &key) {
  for (const auto &k : schema())
    if (k.key == key) return &k;
  return nullptr;
}

namespace detail {

inline std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string &s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // shortest representation that round-trips
  for (int p = 1; p <= 17; ++p) {
    char t[40];
    std::snprintf(t, sizeof t, "%.*g", p, v);
    if (std::strtod(t, nullptr) == v) return t;
  }
  return buf;
}

inline std::optional<double> to_real(const std::string &s) {
  double v = 0.0;
  const char *b = s.data(), *e = s.data() + s.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::optional<long long> to_integer(const std::string &s) {
  if (auto v = to_real(s); v && *v == std::floor(*v) && std::abs(*v) < 9.2e18)
    return static_cast<long long>(*v);
  return std::nullopt;
}

inline std::string range_text(const KeySpec &k) {
  if (k.type == ValueType::choice) {
    std::string r = "one of {";
    for (std::size_t i = 0; i < k.choices.size(); ++i) r += (i ? ", " : "") + k.choices[i];
    return r + "}";
  }
  if (k.type == ValueType::text) return "free text";
  return "[" + format_real(k.lo) + ", " + format_real(k.hi) + "]";
}

[[noreturn]] inline void fail(const KeySpec &k, const std::string &value, const std::string &what) {
  throw ConfigError("key '" + k.key + "' = '" + value + "': " + what + "; legal range " +
                    range_text(k));
}

inline void check_range(const KeySpec &k, const std::string &raw, double v) {
  if (v < k.lo || v > k.hi) fail(k, raw, "out of range");
}

// Returns the canonical text of a value, or throws naming the key.
inline std::string canonical(const KeySpec &k, const std::string &raw) {
  const std::string v = trim(raw);
  switch (k.type) {
  case ValueType::integer: {
    auto x = to_integer(v);
    if (!x) fail(k, v, "expected an integer");
    check_range(k, v, double(*x));
    return std::to_string(*x);
  }
  case ValueType::real: {
    auto x = to_real(v);
    if (!x) fail(k, v, "expected a real number");
    check_range(k, v, *x);
    return format_real(*x);
  }
  case ValueType::choice:
    if (std::find(k.choices.begin(), k.choices.end(), v) == k.choices.end())
      fail(k, v, "unknown choice");
    return v;
  case ValueType::text:
    return v;
  case ValueType::list: {
    std::string out;
    for (const auto &tok : split(v, ',')) {
      std::string c;
      const auto parts = split(tok, ':');
      if (parts.size() == 1) {
        auto x = to_real(parts[0]);
        if (!x) fail(k, v, "expected a comma separated list of numbers");
        check_range(k, v, *x);
        c = format_real(*x);
      } else if (parts.size() == 2) {
        auto a = to_integer(parts[0]), b = to_integer(parts[1]);
        if (!a || !b || *b < *a) fail(k, v, "expected an integer range a:b with a <= b");
        check_range(k, v, double(*a));
        check_range(k, v, double(*b));
        c = std::to_string(*a) + ":" + std::to_string(*b);
      } else {
        fail(k, v, "malformed list element");
      }
      out += (out.empty() ? "" : ",") + c;
    }
    if (out.empty()) fail(k, v, "list is empty");
    return out;
  }
  }
  return v;
}

} // namespace detail

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::rate_curve;
  std::map<std::string, std::string> values; // canonical text for every applicable key

  const std::string &raw(const std::string &key) const {
    auto it = values.find(key);
    if (it == values.end()) throw ConfigError("key '" + key + "' is not part of this experiment");
    return it->second;
  }
  double real(const std::string &key) const { return *detail::to_real(raw(key)); }
  long long integer(const std::string &key) const { return *detail::to_integer(raw(key)); }
  const std::string &text(const std::string &key) const { return raw(key); }
  std::vector<double> list(const std::string &key) const {
    std::vector<double> out;
    for (const auto &tok : detail::split(raw(key), ',')) {
      const auto parts = detail::split(tok, ':');
      if (parts.size() == 1) {
        out.push_back(*detail::to_real(parts[0]));
      } else {
        for (long long i = *detail::to_integer(parts[0]); i <= *detail::to_integer(parts[1]); ++i)
          out.push_back(double(i));
      }
    }
    return out;
  }
  std::uint64_t seed() const { return static_cast<std::uint64_t>(integer("experiment.seed")); }
  unsigned threads() const { return static_cast<unsigned>(integer("experiment.threads")); }

  // Overrides one key after parsing, with the same validation.
  void set(const std::string &key, const std::string &value) {
    const KeySpec *k = find_key(key);
    if (!k || !k->applies_to(kind))
      throw ConfigError("unknown key '" + key + "' for experiment " + to_string(kind));
    values[key] = detail::canonical(*k, value);
  }

  bool operator==(const ExperimentConfig &o) const { return kind == o.kind && values == o.values; }
};

// kind_hint is used when the text has no experiment.kind; a conflicting value is an error.
inline ExperimentConfig parse_config(const std::string &text,
                                     std::optional<ExperimentKind> kind_hint = std::nullopt) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error &e) {
    throw ConfigError("malformed config at line " + std::to_string(e.line()) + ": " + e.message());
  }
  std::map<std::string, std::string> given;
  for (const auto &[section, body] : tree) {
    if (body.empty()) throw ConfigError("key '" + section + "' must live inside a [section]");
    for (const auto &[name, leaf] : body) given[section + "." + name] = leaf.data();
  }

  ExperimentConfig cfg;
  std::optional<ExperimentKind> kind = kind_hint;
  if (auto it = given.find("experiment.kind"); it != given.end()) {
    const std::string v = detail::trim(it->second);
    auto k = parse_kind(v);
    if (!k) detail::fail(*find_key("experiment.kind"), v, "unknown experiment");
    if (kind_hint && *kind_hint != *k)
      throw ConfigError("key 'experiment.kind' = '" + v + "' conflicts with requested experiment " +
                        to_string(*kind_hint));
    kind = k;
  }
  if (!kind) throw ConfigError("key 'experiment.kind' is required");
  cfg.kind = *kind;

  for (const auto &[key, value] : given) {
    const KeySpec *k = find_key(key);
    if (!k) throw ConfigError("unknown key '" + key + "'");
    if (!k->applies_to(cfg.kind))
      throw ConfigError("key '" + key + "' is not used by experiment " + to_string(cfg.kind));
  }
  for (const auto &k : schema()) {
    if (!k.applies_to(cfg.kind)) continue;
    if (k.key == "experiment.kind") {
      cfg.values[k.key] = to_string(cfg.kind);
      continue;
    }
    auto it = given.find(k.key);
    std::string v = it != given.end() ? it->second : kind_default(cfg.kind, k.key).value_or(k.default_value);
    cfg.values[k.key] = detail::canonical(k, v);
  }
  if (cfg.values.count("region.r_min_m") &&
      cfg.real("region.r_min_m") > cfg.real("region.r_max_m"))
    throw ConfigError("key 'region.r_min_m' must not exceed region.r_max_m");
  return cfg;
}

inline std::string serialize_config(const ExperimentConfig &cfg) {
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections;
  std::vector<std::string> order;
  for (const auto &k : schema()) {
    auto it = cfg.values.find(k.key);
    if (it == cfg.values.end()) continue;
    const auto dot = k.key.find('.');
    const std::string sec = k.key.substr(0, dot);
    if (!sections.count(sec)) order.push_back(sec);
    sections[sec].push_back({k.key.substr(dot + 1), it->second});
  }
  std::string out;
  for (const auto &sec : order) {
    out += (out.empty() ? "" : "\n") + std::string("[") + sec + "]\n";
    for (const auto &[name, value] : sections[sec]) out += name + " = " + value + "\n";
  }
  return out;
}

inline std::uint64_t fnv1a(const std::string &s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
  return h;
}

inline std::uint64_t config_hash(const ExperimentConfig &cfg) {
  return fnv1a(serialize_config(cfg));
}

inline std::string help_text() {
  std::string out;
  std::string last;
  for (const auto &k : schema()) {
    const std::string sec = k.key.substr(0, k.key.find('.'));
    if (sec != last) out += "\n[" + sec + "]\n", last = sec;
    out += "  " + k.key.substr(k.key.find('.') + 1) + " = " + k.default_value + "  (" +
           detail::range_text(k) + ") " + k.help;
    std::string who;
    for (const auto &[kind, name] : experiment_names())
      if (kind_default(kind, k.key))
        who += (who.empty() ? "" : ", ") + name + ": " + *kind_default(kind, k.key);
    if (!who.empty()) out += " [default " + who + "]";
    out += "\n";
  }
  return out;
}

} // namespace swarm_mimo::cli
