// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The swarm-mimo-sim authors

#pragma once

#include "core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace swarm_mimo {

struct SphericalPosition {
  double d = 1.0;
  double theta = 0.5 * pi; // from +z
  double phi = 0.0;

  Vec3 to_cartesian() const {
    const double st = std::sin(theta);
    return {d * std::cos(phi) * st, d * std::sin(phi) * st, d * std::cos(theta)};
  }

  static SphericalPosition from_cartesian(const Vec3 &v) {
    SphericalPosition s;
    s.d = v.norm();
    if (s.d == 0.0) return {0.0, 0.0, 0.0};
    s.theta = std::acos(std::clamp(v.z / s.d, -1.0, 1.0));
    s.phi = std::atan2(v.y, v.x);
    if (s.phi < 0.0) s.phi += two_pi;
    return s;
  }
};

// roll = alpha_x, pitch = alpha_y, yaw = alpha_z
struct RotationAngles {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
};

struct RotationMatrix {
  std::array<std::array<double, 3>, 3> m{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};

  static RotationMatrix identity() { return {}; }

  double operator()(int r, int c) const { return m[r][c]; }

  Vec3 operator*(const Vec3 &v) const {
    return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
  }

  RotationMatrix operator*(const RotationMatrix &o) const {
    RotationMatrix r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += m[i][k] * o.m[k][j];
        r.m[i][j] = s;
      }
    return r;
  }

  RotationMatrix transpose() const {
    RotationMatrix r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r.m[i][j] = m[j][i];
    return r;
  }

  double det() const {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  }

  Vec3 column(int c) const { return {m[0][c], m[1][c], m[2][c]}; }
};

inline RotationMatrix rotation_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  return {{{{1, 0, 0}, {0, c, -s}, {0, s, c}}}};
}

inline RotationMatrix rotation_y(double a) {
  const double c = std::cos(a), s = std::sin(a);
  return {{{{c, 0, s}, {0, 1, 0}, {-s, 0, c}}}};
}

inline RotationMatrix rotation_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  return {{{{c, -s, 0}, {s, c, 0}, {0, 0, 1}}}};
}

inline void validate(const RotationAngles &a) {
  constexpr double eps = 1e-12;
  const double h = 0.5 * pi + eps;
  if (!(std::abs(a.roll) <= h)) throw DomainError("roll must lie in [-pi/2, pi/2]");
  if (!(std::abs(a.pitch) <= h)) throw DomainError("pitch must lie in [-pi/2, pi/2]");
  if (!(a.yaw >= -eps && a.yaw <= two_pi + eps)) throw DomainError("yaw must lie in [0, 2pi)");
}

// Applies yaw first, then pitch, then roll: R = Rx(roll) Ry(pitch) Rz(yaw).
inline RotationMatrix rotation_matrix(const RotationAngles &a) {
  validate(a);
  return rotation_x(a.roll) * rotation_y(a.pitch) * rotation_z(a.yaw);
}

struct ArrayGeometry {
  int m_x = 1;
  int m_y = 1;
  double delta_x = 0.0;
  double delta_y = 0.0;

  int size() const { return m_x * m_y; }

  double aperture() const {
    const double ax = (m_x - 1) * delta_x, ay = (m_y - 1) * delta_y;
    return std::sqrt(ax * ax + ay * ay);
  }

  void validate() const {
    if (m_x < 1 || m_y < 1) throw DomainError("array dimensions must be >= 1");
    if (!(delta_x >= 0.0) || !(delta_y >= 0.0) || !std::isfinite(delta_x) ||
        !std::isfinite(delta_y))
      throw DomainError("array spacings must be finite and nonnegative");
  }
};

// 1-based (p, q) for 1-based l = (q-1) M_x + p
inline std::pair<int, int> element_indices(const ArrayGeometry &g, int l) {
  if (l < 1 || l > g.size())
    throw DimensionError("element index " + std::to_string(l) + " outside [1, " +
                         std::to_string(g.size()) + "]");
  return {(l - 1) % g.m_x + 1, (l - 1) / g.m_x + 1};
}

inline Vec3 element_position(const ArrayGeometry &g, int l) {
  auto [p, q] = element_indices(g, l);
  return {(p - 1) * g.delta_x, (q - 1) * g.delta_y, 0.0};
}

inline std::vector<Vec3> element_positions(const ArrayGeometry &g) {
  std::vector<Vec3> out;
  out.reserve(g.size());
  for (int q = 0; q < g.m_y; ++q)
    for (int p = 0; p < g.m_x; ++p) out.push_back({p * g.delta_x, q * g.delta_y, 0.0});
  return out;
}

inline double exact_distance(const Vec3 &a, const Vec3 &b) { return (a - b).norm(); }

inline double approx_distance(const SphericalPosition &uav, const ArrayGeometry &g, int l,
                              bool include_second_order) {
  if (!(uav.d > g.aperture()))
    throw DomainError("approximate distance needs d above the array aperture");
  auto [p, q] = element_indices(g, l);
  const double px = (p - 1) * g.delta_x, qy = (q - 1) * g.delta_y;
  double d = uav.d - std::sin(uav.theta) * (px * std::cos(uav.phi) + qy * std::sin(uav.phi));
  if (include_second_order) d += (px * px + qy * qy) / (2.0 * uav.d);
  return d;
}

struct ShellRegion {
  double r_min = 1.0;
  double r_max = 1.0;

  void validate() const {
    if (!(r_min > 0.0) || !(r_max >= r_min) || !std::isfinite(r_max))
      throw DomainError("shell needs 0 < r_min <= r_max");
  }

  // analytic E{d} for the 3r^2 radial density
  double mean_radius() const {
    if (r_max == r_min) return r_max;
    return 0.75 * (std::pow(r_max, 4) - std::pow(r_min, 4)) /
           (std::pow(r_max, 3) - std::pow(r_min, 3));
  }
};

template <class URBG> SphericalPosition sample_shell_position(const ShellRegion &r, URBG &rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double a3 = r.r_min * r.r_min * r.r_min, b3 = r.r_max * r.r_max * r.r_max;
  SphericalPosition s;
  s.d = std::cbrt(u(rng) * (b3 - a3) + a3);
  s.theta = std::acos(1.0 - 2.0 * u(rng));
  s.phi = two_pi * u(rng);
  return s;
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct OrientationRanges {
  Interval roll{-0.5 * pi, 0.5 * pi};
  Interval pitch{-0.5 * pi, 0.5 * pi};
  Interval yaw{0.0, 0.5 * pi};

  static OrientationRanges fixed() { return {{0, 0}, {0, 0}, {0, 0}}; }

  void validate() const {
    auto check = [](const Interval &i, double lo, double hi, const char *name) {
      if (!(i.lo <= i.hi) || i.lo < lo - 1e-12 || i.hi > hi + 1e-12)
        throw DomainError(std::string("invalid ") + name + " interval");
    };
    check(roll, -0.5 * pi, 0.5 * pi, "roll");
    check(pitch, -0.5 * pi, 0.5 * pi, "pitch");
    check(yaw, 0.0, two_pi, "yaw");
  }
};

template <class URBG> RotationAngles sample_orientation(const OrientationRanges &r, URBG &rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto draw = [&](const Interval &i) { return i.lo + (i.hi - i.lo) * u(rng); };
  RotationAngles a;
  a.roll = draw(r.roll);
  a.pitch = draw(r.pitch);
  a.yaw = draw(r.yaw);
  return a;
}

} // namespace swarm_mimo
