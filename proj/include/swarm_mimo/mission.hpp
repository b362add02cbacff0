// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The swarm-mimo-sim authors

#pragma once

#include "channel.hpp"
#include "core.hpp"
#include "geometry.hpp"
#include "montecarlo.hpp"
#include "polarization.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace swarm_mimo {

struct CameraModel {
  int r_px = 1496;
  int r_py = 2664;
  double bits_per_pixel = 24.0;
  double pixel_size = 2.3e-6;
  double focal_length = 5e-3;
  double compression = 1.0;
  double fps = 30.0;
  double overlap_front = 0.7; // OL_y
  double overlap_side = 0.6;  // OL_x

  void validate() const {
    if (r_px < 1 || r_py < 1 || !(bits_per_pixel > 0.0) || !(pixel_size > 0.0) ||
        !(focal_length > 0.0))
      throw DomainError("camera parameters must be positive");
    if (!(compression >= 1.0)) throw DomainError("compression ratio must be >= 1");
    if (!(fps >= 0.0)) throw DomainError("frame rate must be nonnegative");
    if (!(overlap_front >= 0.0 && overlap_front < 1.0) ||
        !(overlap_side >= 0.0 && overlap_side < 1.0))
      throw DomainError("image overlaps must lie in [0, 1)");
  }
};

inline double altitude_for_gsd(double gsd, const CameraModel &cam) {
  if (!(gsd > 0.0)) throw DomainError("GSD must be positive");
  return gsd * cam.focal_length / cam.pixel_size;
}

inline double image_rate(const CameraModel &cam, double gsd, double v) {
  cam.validate();
  if (!(gsd > 0.0) || !(v >= 0.0)) throw DomainError("GSD and speed must be positive");
  return cam.r_px * cam.bits_per_pixel * v / (gsd * cam.compression * (1.0 - cam.overlap_front));
}

// Seconds between consecutive images along track.
inline double image_interval(const CameraModel &cam, double gsd, double v) {
  return cam.r_py * gsd * (1.0 - cam.overlap_front) / v;
}

inline double image_bits(const CameraModel &cam) {
  return double(cam.r_px) * cam.r_py * cam.bits_per_pixel / cam.compression;
}

inline double video_rate(const CameraModel &cam, int K) {
  cam.validate();
  return K * double(cam.r_px) * cam.r_py * cam.bits_per_pixel * cam.fps / cam.compression;
}

struct AreaBounds {
  double x1 = -1000.0, x2 = 2000.0;
  double y1 = 2000.0, y2 = 6000.0;

  double area() const { return (x2 - x1) * (y2 - y1); }
};

struct MissionSpec {
  AreaBounds area;
  int grid_cols = 5;
  int grid_rows = 4;
  double speed = 30.0;
  double gsd = 0.05;
  CameraModel camera;
  int cross_track_pixels = 2664;
  double altitude = 100.0; // <= 0 derives it from gsd

  CoherenceParams coherence{2.4e9, 20e6, 3e6, 30.0, 0.125, -1.0, -1.0};
  double rho_u = 10.0;
  double rho_p = 100.0;
  double chi_wc = 0.1;
  double d_wc = 0.0; // <= 0 means the farthest area corner at altitude

  ArrayGeometry array{100, 1, 0.0625, 0.0};
  bool gs_pseudo_random = true;
  OrientationRanges gs_ranges{};
  std::uint64_t array_seed = 7;
  DipoleExcitation gs_excitation = DipoleExcitation::from_complex({0, M_SQRT1_2}, {0, M_SQRT1_2});
  DipoleExcitation uav_excitation = DipoleExcitation::from_complex({0, M_SQRT1_2}, {0, M_SQRT1_2});
  RotationAngles uav_orientation{0.0, 0.0, 0.5 * pi}; // dipoles along z and x
  Csi csi = Csi::estimated;

  double temperature = 290.0;
  double noise_figure_db = 7.0;
  double power_scale = 1.0; // multiplies the channel-inversion data power

  int K() const { return grid_cols * grid_rows; }
  double lambda() const { return wavelength(coherence.f_c); }
  double n0() const { return boltzmann * temperature * db_to_linear(noise_figure_db); }
  double flight_altitude() const {
    return altitude > 0.0 ? altitude : altitude_for_gsd(gsd, camera);
  }
  double swath() const { return cross_track_pixels * gsd * (1.0 - camera.overlap_side); }
  double worst_distance() const {
    if (d_wc > 0.0) return d_wc;
    const double h = flight_altitude();
    double best = 0.0;
    for (double x : {area.x1, area.x2})
      for (double y : {area.y1, area.y2}) best = std::max(best, Vec3{x, y, h}.norm());
    return best;
  }

  void validate() const {
    camera.validate();
    array.validate();
    if (!(area.x2 > area.x1) || !(area.y2 > area.y1)) throw DomainError("empty surveillance area");
    if (grid_cols < 1 || grid_rows < 1) throw DomainError("drone grid must be nonempty");
    if (!(speed > 0.0) || !(gsd > 0.0) || cross_track_pixels < 1)
      throw DomainError("speed, GSD and pixel count must be positive");
    if (!(rho_u > 0.0) || !(rho_p > 0.0) || !(chi_wc > 0.0) || !(power_scale > 0.0))
      throw DomainError("SNR targets and chi_wc must be positive");
  }
};

inline double mission_time(const MissionSpec &s, int cross_track_pixels) {
  if (cross_track_pixels < 1) throw DomainError("pixel count must be positive");
  return s.area.area() /
         (s.K() * s.speed * cross_track_pixels * s.gsd * (1.0 - s.camera.overlap_side));
}

struct TrajectoryPoint {
  Vec3 position;
  bool clamped = false;
};

struct DroneCell {
  double x0, y_top, width, height;
  int legs;
};

inline DroneCell drone_cell(const MissionSpec &s, int k) {
  if (k < 1 || k > s.K()) throw DimensionError("drone index out of range");
  const int i = (k - 1) % s.grid_cols + 1, j = (k - 1) / s.grid_cols + 1;
  DroneCell c;
  c.width = (s.area.x2 - s.area.x1) / s.grid_cols;
  c.height = (s.area.y2 - s.area.y1) / s.grid_rows;
  c.x0 = s.area.x1 + (i - 1) * c.width;
  c.y_top = s.area.y1 + j * c.height;
  c.legs = std::max(1, static_cast<int>(std::ceil(c.width / s.swath() - 1e-12)));
  return c;
}

// Total boustrophedon path length of one drone.
inline double path_length(const MissionSpec &s) {
  const DroneCell c = drone_cell(s, 1);
  return c.legs * c.height + (c.legs - 1) * s.swath();
}

inline double path_duration(const MissionSpec &s) { return path_length(s) / s.speed; }

// Legs run along y (down first), separated by one swath in +x.
inline TrajectoryPoint trajectory_position(const MissionSpec &s, int k, double t) {
  if (t < 0.0) throw DomainError("time must be nonnegative");
  const DroneCell c = drone_cell(s, k);
  const double w = s.swath();
  const double total = c.legs * c.height + (c.legs - 1) * w;
  TrajectoryPoint out;
  double dist = s.speed * t;
  if (dist > total) dist = total, out.clamped = true;
  const double unit = c.height + w;
  int leg = std::min(static_cast<int>(dist / unit), c.legs - 1);
  double rem = dist - leg * unit;
  const double h = s.flight_altitude();
  const bool down = leg % 2 == 0;
  if (rem <= c.height) {
    const double y = down ? c.y_top - rem : c.y_top - c.height + rem;
    out.position = {c.x0 + leg * w, y, h};
  } else {
    const double y = down ? c.y_top - c.height : c.y_top;
    out.position = {c.x0 + leg * w + (rem - c.height), y, h};
  }
  return out;
}

struct LinkBudget {
  double bandwidth = 20e6;
  double lambda = 0.125;
  double n0 = 0.0;
  double prelog = 1.0;
  double t_len = 1.0;
  int K = 1;
  double rho_u = 1.0;
  double rho_p = 1.0;
  double d_wc = 1.0;

  // P = data / chi_mean + pilot / chi_wc for a drone at distance d_k
  std::pair<double, double> coefficients(double d_k) const {
    const double a = 4.0 * pi / lambda;
    const double base = bandwidth * n0 * a * a;
    return {base * prelog * rho_u * d_k * d_k, base * (K / t_len) * rho_p * d_wc * d_wc};
  }
};

inline double power_from_coefficients(double data_coef, double pilot_coef, double chi_mean,
                                      double chi_wc) {
  if (!(chi_mean > 0.0) || !(chi_wc > 0.0)) throw DomainError("gains must be positive");
  return data_coef / chi_mean + pilot_coef / chi_wc;
}

inline double instantaneous_power(const LinkBudget &lb, double d_k, double chi_mean,
                                  double chi_wc) {
  const auto [a, b] = lb.coefficients(d_k);
  return power_from_coefficients(a, b, chi_mean, chi_wc);
}

inline LinkBudget link_budget(const MissionSpec &s) {
  const Prelog pl = coherence_prelog(s.coherence, s.K());
  LinkBudget lb;
  lb.bandwidth = s.coherence.bandwidth;
  lb.lambda = s.lambda();
  lb.n0 = s.n0();
  lb.prelog = pl.lambda;
  lb.t_len = pl.t_len;
  lb.K = s.K();
  lb.rho_u = s.rho_u;
  lb.rho_p = s.rho_p;
  lb.d_wc = s.worst_distance();
  return lb;
}

struct MissionSample {
  double t = 0.0;
  int drone = 1;
  Vec3 position;
  double throughput = 0.0; // bits/s
  double power = 0.0;      // W
};

struct MissionTrace {
  std::vector<MissionSample> rows;
  double prelog = 0.0;
  double t_len = 0.0;
  double pilot_power = 0.0;

  std::vector<double> throughput_of(int drone) const {
    std::vector<double> v;
    for (const auto &r : rows)
      if (r.drone == drone) v.push_back(r.throughput);
    return v;
  }
};

// duration <= 0 runs the full path.
inline MissionTrace run_mission(const MissionSpec &s, double dt, double duration,
                                std::uint64_t seed) {
  s.validate();
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  if (duration <= 0.0) duration = path_duration(s);
  const int K = s.K();
  const double lambda = s.lambda();
  const auto elements = element_positions(s.array);
  AntennaConfig gs_base;
  gs_base.excitation = s.gs_excitation;
  const auto gs = prepare(make_gs_configs(s.array, gs_base, s.gs_pseudo_random, s.gs_ranges,
                                          s.array_seed));
  AntennaConfig uav_cfg;
  uav_cfg.excitation = s.uav_excitation;
  uav_cfg.orientation = s.uav_orientation;
  const PreparedAntenna uav(uav_cfg);

  const LinkBudget lb = link_budget(s);
  PowerControlConfig pc;
  pc.rho_u = s.rho_u;
  pc.rho_p = s.rho_p;
  pc.d_wc = lb.d_wc;
  pc.chi_wc = s.chi_wc;
  const double p_p = pilot_power(pc, lambda);

  MissionTrace trace;
  trace.prelog = lb.prelog;
  trace.t_len = lb.t_len;
  trace.pilot_power = p_p;
  const auto steps = static_cast<std::size_t>(std::floor(duration / dt + 1e-9)) + 1;
  trace.rows.reserve(steps * K);
  const int M = s.array.size();
  for (std::size_t step = 0; step < steps; ++step) {
    const double t = step * dt;
    ChannelMatrix G(M, K);
    std::vector<double> p(K), chi_mean(K);
    std::vector<Vec3> pos(K);
    for (int k = 0; k < K; ++k) {
      pos[k] = trajectory_position(s, k + 1, t).position;
      const ChannelVector c = channel_vector(elements, gs, pos[k], uav, lambda);
      G.col(k) = c.g;
      p[k] = s.power_scale * data_power(c.mean_gain(), pc).p_u;
      double cs = 0.0;
      for (double x : c.chi) cs += x;
      chi_mean[k] = cs / M;
    }
    ChannelMatrix Gh = G;
    if (s.csi == Csi::estimated) {
      Rng rng = substream(seed, step);
      Gh = ml_estimate(G, p_p, rng);
    }
    const auto sinr = instantaneous_sinr_mrc(G, Gh, p);
    for (int k = 0; k < K; ++k) {
      MissionSample r;
      r.t = t;
      r.drone = k + 1;
      r.position = pos[k];
      r.throughput = lb.prelog * lb.bandwidth * std::log2(1.0 + sinr[k]);
      const auto [data, pilot] = lb.coefficients(pos[k].norm());
      r.power = power_from_coefficients(s.power_scale * data, pilot, chi_mean[k], s.chi_wc);
      trace.rows.push_back(r);
    }
  }
  return trace;
}

// Interior local extrema of a series, ignoring flat steps.
inline std::size_t count_local_extrema(const std::vector<double> &v) {
  std::size_t n = 0;
  int last = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double d = v[i] - v[i - 1];
    const int sgn = d > 0 ? 1 : (d < 0 ? -1 : 0);
    if (sgn == 0) continue;
    if (last != 0 && sgn != last) ++n;
    last = sgn;
  }
  return n;
}

} // namespace swarm_mimo
