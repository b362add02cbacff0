// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The swarm-mimo-sim authors

#pragma once

#include "../channel.hpp"
#include "../mission.hpp"
#include "../montecarlo.hpp"
#include "../rates.hpp"
#include "../spacing.hpp"
#include "config.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace swarm_mimo::cli {

struct CsvTable {
  std::string name; // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct ExperimentOutput {
  std::vector<CsvTable> tables;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
};

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string fmt(long long v) { return std::to_string(v); }
inline std::string fmt(int v) { return std::to_string(v); }

inline std::vector<double> linspace(double a, double b, long long n) {
  std::vector<double> out(n);
  for (long long i = 0; i < n; ++i) out[i] = n == 1 ? a : a + (b - a) * double(i) / double(n - 1);
  return out;
}

namespace detail {

inline double db(const ExperimentConfig &c, const std::string &key) {
  return db_to_linear(c.real(key));
}

inline CoherenceParams coherence(const ExperimentConfig &c, double v_max) {
  CoherenceParams p;
  p.f_c = c.real("rf.f_c_hz");
  p.bandwidth = c.real("rf.bandwidth_hz");
  p.b_c = c.real("rf.coherence_bandwidth_hz");
  p.v_max = v_max;
  p.tau_dl_fraction = c.real("rf.tau_dl_fraction");
  return p;
}

inline ArrayGeometry geometry(const ExperimentConfig &c, double lambda) {
  ArrayGeometry g;
  g.m_x = static_cast<int>(c.integer("array.m_x"));
  g.m_y = static_cast<int>(c.integer("array.m_y"));
  g.delta_x = c.real("array.delta_x_lambda") * lambda;
  g.delta_y = c.real("array.delta_y_lambda") * lambda;
  return g;
}

inline ShellRegion region(const ExperimentConfig &c) {
  return {c.real("region.r_min_m"), c.real("region.r_max_m")};
}

inline CameraModel camera(const ExperimentConfig &c) {
  CameraModel m;
  m.r_px = static_cast<int>(c.integer("camera.r_px"));
  m.r_py = static_cast<int>(c.integer("camera.r_py"));
  m.bits_per_pixel = c.real("camera.bits_per_pixel");
  m.pixel_size = c.real("camera.pixel_size_m");
  m.focal_length = c.real("camera.focal_length_m");
  m.overlap_front = c.real("camera.overlap_front");
  m.overlap_side = c.real("camera.overlap_side");
  return m;
}

inline RateParams rate_params(const ExperimentConfig &c, int K, double prelog, double lambda) {
  RateParams p;
  p.K = K;
  p.rho_u = db(c, "rf.rho_u_db");
  p.rho_p = db(c, "rf.rho_p_db");
  p.prelog = prelog;
  p.kappa = c.values.count("rf.kappa_chi_wc_db") ? db(c, "rf.kappa_chi_wc_db") : 1.0;
  p.chi_wc = 1.0;
  p.lambda = lambda;
  return p;
}

} // namespace detail

inline ExperimentOutput run_rate_curve(const ExperimentConfig &c) {
  const double lambda = wavelength(c.real("rf.f_c_hz"));
  const double bw = c.real("rf.bandwidth_hz");
  const double q = c.real("rate.q_target_bps");
  const bool shell = c.text("rate.bound") == "shell";
  const ArrayKind kind = c.text("rate.array_kind") == "ura" ? ArrayKind::ura : ArrayKind::ula;
  ArrayGeometry tmpl = detail::geometry(c, lambda);
  if (kind == ArrayKind::ula) tmpl.m_y = 1, tmpl.delta_y = 0.0;

  ExperimentOutput out;
  CsvTable curve{"rate_curve", {"k", "m", "prelog", "rate_bps_hz", "throughput_bps", "meets_target"}, {}};
  CsvTable req{"m_required", {"k", "q_target_bps", "prelog", "m_required"}, {}};
  auto m_req = nlohmann::ordered_json::object();
  for (double kd : c.list("rate.k_list")) {
    const int K = static_cast<int>(kd);
    const Prelog pl = coherence_prelog(detail::coherence(c, c.real("rf.v_max_mps")), K);
    RateParams p = detail::rate_params(c, K, pl.lambda, lambda);
    if (shell) p.region = detail::region(c);
    for (double md : c.list("rate.m_list")) {
      p.geometry = tmpl;
      p.geometry.m_x = static_cast<int>(md);
      const double r = shell ? mrc_bound_shell(p) : mrc_bound_optimal(p, kind);
      curve.rows.push_back({fmt(K), fmt(static_cast<long long>(p.geometry.size())), fmt(pl.lambda),
                            fmt(r), fmt(r * bw), r * bw >= q ? "1" : "0"});
    }
    const long long m = m_required(q, bw, p);
    req.rows.push_back({fmt(K), fmt(q), fmt(pl.lambda), fmt(m)});
    m_req[std::to_string(K)] = m;
  }
  out.tables = {curve, req};
  out.summary["m_required"] = m_req;
  return out;
}

inline ExperimentOutput run_spacing_sweep(const ExperimentConfig &c) {
  const double lambda = wavelength(c.real("rf.f_c_hz"));
  const ArrayGeometry tmpl = detail::geometry(c, lambda);
  const ShellRegion reg = detail::region(c);
  const auto xs = linspace(c.real("sweep.x_ratio_min"), c.real("sweep.x_ratio_max"),
                           c.integer("sweep.x_points"));
  const auto ys = linspace(c.real("sweep.y_ratio_min"), c.real("sweep.y_ratio_max"),
                           c.integer("sweep.y_points"));
  const SpacingGrid grid = omega_sweep(tmpl, lambda, reg, xs, ys, c.threads());

  ExperimentOutput out;
  CsvTable t{"spacing_sweep", {"delta_x_lambda", "delta_y_lambda", "omega", "local_min"}, {}};
  auto minima = nlohmann::ordered_json::array();
  const std::size_t nx = xs.size(), ny = ys.size();
  for (std::size_t iy = 0; iy < ny; ++iy)
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const double w = grid.at(ix, iy);
      bool is_min = nx * ny > 1;
      if (ix > 0) is_min &= w <= grid.at(ix - 1, iy);
      if (ix + 1 < nx) is_min &= w <= grid.at(ix + 1, iy);
      if (iy > 0) is_min &= w <= grid.at(ix, iy - 1);
      if (iy + 1 < ny) is_min &= w <= grid.at(ix, iy + 1);
      t.rows.push_back({fmt(xs[ix]), fmt(ys[iy]), fmt(w), is_min ? "1" : "0"});
      if (is_min) minima.push_back({xs[ix], ys[iy], w});
    }
  out.tables = {t};
  out.summary["local_minima"] = minima;
  if (tmpl.m_y == 1) {
    const auto opt = optimal_spacing_ula(tmpl.m_x, lambda, reg.r_min);
    out.summary["ula_optimal_count"] = opt.size();
  }
  return out;
}

inline ScenarioSpec scenario(const ExperimentConfig &c) {
  ScenarioSpec s;
  s.f_c = c.real("rf.f_c_hz");
  s.geometry = detail::geometry(c, s.lambda());
  s.region = detail::region(c);
  s.array_seed = static_cast<std::uint64_t>(c.integer("array.seed"));
  s.gs_orientation = c.text("array.gs_orientation") == "identical" ? GsOrientation::identical
                                                                    : GsOrientation::pseudo_random;
  return s;
}

inline ExperimentOutput run_gain_cdf(const ExperimentConfig &c) {
  ScenarioSpec s = scenario(c);
  s.polarization = c.text("gain.polarization") == "linear" ? Polarization::linear
                                                           : Polarization::circular;
  s.element_model = c.text("gain.element_model") == "unit_gain" ? ElementModel::unit_gain
                                                               : ElementModel::cross_dipole;
  const auto th = linspace(c.real("gain.threshold_min_db"), c.real("gain.threshold_max_db"),
                           c.integer("gain.threshold_points"));
  const GainCdf cdf = gain_cdf(s, c.integer("gain.samples"), c.seed(), th, c.threads());
  ExperimentOutput out;
  CsvTable t{"gain_cdf", {"threshold_db", "cdf"}, {}};
  for (std::size_t i = 0; i < cdf.cdf.size(); ++i)
    t.rows.push_back({fmt(cdf.thresholds_db[i]), fmt(cdf.cdf[i])});
  out.tables = {t};
  out.summary["samples"] = cdf.n;
  out.summary["median_db"] = cdf.median_db;
  out.summary["p_below_10db"] = cdf.p_below_10db;
  return out;
}

inline MissionSpec mission_spec(const ExperimentConfig &c) {
  MissionSpec s;
  s.area = {c.real("mission.x1_m"), c.real("mission.x2_m"), c.real("mission.y1_m"),
            c.real("mission.y2_m")};
  s.grid_cols = static_cast<int>(c.integer("mission.grid_cols"));
  s.grid_rows = static_cast<int>(c.integer("mission.grid_rows"));
  s.speed = c.real("mission.speed_mps");
  s.gsd = c.real("mission.gsd_m");
  s.camera = detail::camera(c);
  s.cross_track_pixels = static_cast<int>(c.integer("mission.cross_track_pixels"));
  s.altitude = c.real("mission.altitude_m");
  s.coherence = detail::coherence(c, s.speed);
  s.rho_u = detail::db(c, "rf.rho_u_db");
  s.rho_p = detail::db(c, "rf.rho_p_db");
  s.chi_wc = detail::db(c, "rf.chi_wc_db");
  s.d_wc = c.real("mission.d_wc_m");
  s.array = detail::geometry(c, s.lambda());
  s.gs_pseudo_random = c.text("array.gs_orientation") == "pseudo_random";
  s.array_seed = static_cast<std::uint64_t>(c.integer("array.seed"));
  s.csi = c.text("mission.csi") == "perfect" ? Csi::perfect : Csi::estimated;
  s.noise_figure_db = c.real("mission.noise_figure_db");
  s.temperature = c.real("mission.temperature_k");
  s.power_scale = c.real("mission.power_scale");
  return s;
}

inline ExperimentOutput run_mission_sim(const ExperimentConfig &c) {
  const MissionSpec s = mission_spec(c);
  const double duration = c.real("mission.duration_s");
  const MissionTrace tr = run_mission(s, c.real("mission.dt_s"), duration, c.seed());
  ExperimentOutput out;
  CsvTable t{"mission",
             {"t_s", "drone_id", "x_m", "y_m", "z_m", "throughput_bps", "power_w"},
             {}};
  for (const auto &r : tr.rows)
    t.rows.push_back({fmt(r.t), fmt(static_cast<long long>(r.drone)), fmt(r.position.x),
                      fmt(r.position.y), fmt(r.position.z), fmt(r.throughput), fmt(r.power)});
  out.tables = {t};
  const double span = tr.rows.empty() ? 0.0 : tr.rows.back().t;
  auto ext = nlohmann::ordered_json::object();
  for (int k = 1; k <= s.K(); ++k) {
    const auto n = count_local_extrema(tr.throughput_of(k));
    ext[std::to_string(k)] = span > 0.0 ? 100.0 * double(n) / span : 0.0;
  }
  out.summary["mission_time_s"] = mission_time(s, s.cross_track_pixels);
  out.summary["path_duration_s"] = path_duration(s);
  out.summary["altitude_m"] = s.flight_altitude();
  out.summary["worst_distance_m"] = s.worst_distance();
  out.summary["prelog"] = tr.prelog;
  out.summary["t_len_symbols"] = tr.t_len;
  out.summary["extrema_per_100s"] = ext;
  return out;
}

inline ExperimentOutput run_validate(const ExperimentConfig &c) {
  ScenarioSpec s = scenario(c);
  s.K = static_cast<int>(c.integer("validate.k"));
  s.rho_u = detail::db(c, "rf.rho_u_db");
  s.rho_p = detail::db(c, "rf.rho_p_db");
  s.element_model = ElementModel::unit_gain;
  const Prelog pl = coherence_prelog(detail::coherence(c, c.real("rf.v_max_mps")), s.K);
  s.prelog = pl.lambda;
  s.validate();
  const double lambda = s.lambda();
  const std::size_t n = c.integer("validate.samples");
  const std::uint64_t seed = c.seed();

  ExperimentOutput out;
  CsvTable t{"validate",
             {"check", "estimate", "reference", "std_error", "deviation_se", "pass"},
             {}};
  auto row = [&](const std::string &name, double est, double ref, double se, double dev, bool ok) {
    t.rows.push_back({name, fmt(est), fmt(ref), fmt(se), fmt(dev), ok ? "1" : "0"});
    out.summary[name] = ok;
  };

  const double om = omega(s.geometry, lambda, s.region);
  const double ref = s.rho_u * s.rho_u * (s.geometry.size() + om);
  const auto mom = estimate_interference_moment(s, n, seed, c.threads());
  const double dev = std::abs(mom.mean - ref) / mom.std_error;
  row("interference_moment", mom.mean, ref, mom.std_error, dev, dev <= 4.0);

  RateParams p;
  p.K = s.K;
  p.rho_u = s.rho_u;
  p.rho_p = s.rho_p;
  p.prelog = s.prelog;
  p.region = s.region;
  p.lambda = lambda;
  p.geometry = s.geometry;
  const double bound = mrc_bound_shell(p, om);
  const auto rate = estimate_ergodic_rate(s, c.integer("validate.rate_samples"), seed + 1,
                                          Receiver::mrc, Csi::estimated, c.threads());
  row("mrc_lower_bound", rate.mean, bound, rate.std_error, (rate.mean - bound) / rate.std_error,
      rate.mean >= bound - 2.0 * rate.std_error);

  const auto rep = validate_expectations(s, n, seed + 2, c.threads());
  row("phase_expectations", rep.max_deviation_se, 0.0, 1.0, rep.max_deviation_se,
      rep.max_deviation_se <= 4.0);

  out.tables = {t};
  out.summary["omega"] = om;
  return out;
}

inline ExperimentOutput run_tables(const ExperimentConfig &c) {
  const double lambda = wavelength(c.real("rf.f_c_hz"));
  const double bw = c.real("rf.bandwidth_hz");
  const int K = static_cast<int>(c.integer("tables.k"));
  CameraModel cam = detail::camera(c);
  auto req = [&](double q, double v) {
    const Prelog pl = coherence_prelog(detail::coherence(c, v), K);
    return std::pair{m_required(q, bw, detail::rate_params(c, K, pl.lambda, lambda)), pl.lambda};
  };

  ExperimentOutput out;
  CsvTable t1{"table1",
              {"gsd_m", "speed_mps", "compression", "q_image_bps", "q_sum_bps", "prelog", "m_required"},
              {}};
  const auto gsd = c.list("tables.gsd_list");
  const auto speed = c.list("tables.speed_list");
  if (gsd.size() != speed.size())
    throw ConfigError("key 'tables.speed_list' must have one entry per tables.gsd_list entry");
  for (double cr : c.list("tables.image_compression_list")) {
    cam.compression = cr;
    for (std::size_t i = 0; i < gsd.size(); ++i) {
      const double q = image_rate(cam, gsd[i], speed[i]);
      const auto [m, pre] = req(q, speed[i]);
      t1.rows.push_back({fmt(gsd[i]), fmt(speed[i]), fmt(cr), fmt(q), fmt(K * q), fmt(pre), fmt(m)});
    }
  }

  CsvTable t2{"table2",
              {"r_py", "r_px", "fps", "compression", "q_video_bps", "q_sum_bps", "prelog", "m_required"},
              {}};
  cam.compression = c.real("tables.video_compression");
  for (const auto &res : detail::split(c.text("tables.video_resolutions"), ',')) {
    const auto x = res.find('x');
    const auto py = x == std::string::npos ? std::nullopt : detail::to_integer(res.substr(0, x));
    const auto px = x == std::string::npos ? std::nullopt : detail::to_integer(res.substr(x + 1));
    if (!py || !px || *py < 1 || *px < 1)
      throw ConfigError("key 'tables.video_resolutions' entry '" + res +
                        "' must look like 4096x2160");
    cam.r_py = static_cast<int>(*py);
    cam.r_px = static_cast<int>(*px);
    for (double f : c.list("tables.fps_list")) {
      cam.fps = f;
      const double q = video_rate(cam, 1);
      const auto [m, pre] = req(q, c.real("tables.video_speed_mps"));
      t2.rows.push_back({fmt(*py), fmt(*px), fmt(f), fmt(cam.compression), fmt(q), fmt(K * q),
                         fmt(pre), fmt(m)});
    }
  }
  out.tables = {t1, t2};
  return out;
}

inline ExperimentOutput run_experiment(const ExperimentConfig &c) {
  switch (c.kind) {
  case ExperimentKind::rate_curve: return run_rate_curve(c);
  case ExperimentKind::spacing_sweep: return run_spacing_sweep(c);
  case ExperimentKind::gain_cdf: return run_gain_cdf(c);
  case ExperimentKind::mission_sim: return run_mission_sim(c);
  case ExperimentKind::validate: return run_validate(c);
  case ExperimentKind::tables: return run_tables(c);
  }
  throw ConfigError("unknown experiment");
}

inline std::string csv_text(const CsvTable &t, const ExperimentConfig &c) {
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(c)));
  std::string s = "# schema=v1, seed=" + std::to_string(c.seed()) + ", config_hash=" + hash + "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + t.columns[i];
  s += "\n";
  for (const auto &r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + r[i];
    s += "\n";
  }
  return s;
}

// Writes <dir>/<table>.csv for every table plus <dir>/summary.json.
inline void write_artifacts(const ExperimentOutput &out, const ExperimentConfig &c,
                            const std::filesystem::path &dir, const std::string &version,
                            double wall_seconds) {
  std::filesystem::create_directories(dir);
  auto put = [&](const std::filesystem::path &p, const std::string &text) {
    std::ofstream f(p, std::ios::binary);
    f << text;
    if (!f) throw std::ios_base::failure("cannot write " + p.string());
  };
  for (const auto &t : out.tables) put(dir / (t.name + ".csv"), csv_text(t, c));
  nlohmann::ordered_json j;
  j["experiment"] = to_string(c.kind);
  j["version"] = version;
  j["seed"] = c.seed();
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(c)));
  j["config_hash"] = hash;
  auto params = nlohmann::ordered_json::object();
  for (const auto &[k, v] : c.values) params[k] = v;
  j["parameters"] = params;
  j["results"] = out.summary;
  auto files = nlohmann::ordered_json::array();
  for (const auto &t : out.tables) files.push_back(t.name + ".csv");
  j["files"] = files;
  j["wall_clock_s"] = wall_seconds;
  put(dir / "summary.json", j.dump(2) + "\n");
}

} // namespace swarm_mimo::cli
