// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The swarm-mimo-sim authors

#pragma once

#include "core.hpp"
#include "geometry.hpp"
#include "special_functions.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

namespace swarm_mimo {

struct RateParams {
  int K = 1;
  double rho_u = 1.0;
  double rho_p = 10.0;
  double prelog = 1.0; // Lambda
  double kappa = 1.0;
  double chi_wc = 1.0;
  double d_wc = 0.0; // 0 means region.r_max
  ShellRegion region{20.0, 500.0};
  double lambda = 0.125;
  ArrayGeometry geometry{1, 1, 0.0625, 0.0};

  int M() const { return geometry.size(); }
  double kappa_chi_wc() const { return kappa * chi_wc; }
  double worst_distance() const { return d_wc > 0.0 ? d_wc : region.r_max; }

  void validate() const {
    if (K < 1) throw DomainError("K must be >= 1");
    if (!(rho_u > 0.0)) throw DomainError("rho_u must be positive");
    if (!(rho_p > 0.0)) throw DomainError("rho_p must be positive");
    if (!(prelog > 0.0 && prelog <= 1.0)) throw DomainError("prelog factor must lie in (0, 1]");
    if (!(kappa > 0.0) || !(chi_wc > 0.0)) throw DomainError("kappa and chi_wc must be positive");
    if (kappa * chi_wc > 1.0 + 1e-12) throw DomainError("kappa * chi_wc must not exceed 1");
    if (!(lambda > 0.0)) throw DomainError("wavelength must be positive");
    region.validate();
    geometry.validate();
  }
};

struct PhaseMoments {
  double c = 1.0; // E{cos(b/d)}
  double d = 0.0; // E{sin(b/d)}
};

namespace detail {

// Antiderivatives of 3r^2 cos(b/r) and 3r^2 sin(b/r) times 2, up to the
// constant pi/2 b^3 in the first, for b > 0.
inline std::pair<double, double> cd_primitive(double b, double r) {
  const double x = b / r;
  const double c = std::cos(x), s = std::sin(x);
  if (x <= 4.0) {
    const double poly = (2.0 * r * r - b * b) * r;
    const double b3 = b * b * b;
    return {poly * c - b * r * r * s - b3 * (si(x) - 0.5 * pi),
            poly * s + b * r * r * c + b3 * ci(x)};
  }
  auto [ft, gt] = sici_aux_tail(x);
  const double b3 = b * b * b;
  return {b3 * (ft * c + gt * s), b3 * (ft * s - gt * c)};
}

} // namespace detail

inline PhaseMoments cb_db(double b, const ShellRegion &region) {
  region.validate();
  if (b == 0.0) return {1.0, 0.0};
  const double sign = b < 0.0 ? -1.0 : 1.0;
  const double ab = std::abs(b);
  const double R = region.r_max, Rm = region.r_min;
  if (R - Rm <= 1e-12 * R) return {std::cos(ab / R), sign * std::sin(ab / R)};
  const auto hi = detail::cd_primitive(ab, R);
  const auto lo = detail::cd_primitive(ab, Rm);
  const double vol = 2.0 * (R - Rm) * (R * R + R * Rm + Rm * Rm);
  return {(hi.first - lo.first) / vol, sign * (hi.second - lo.second) / vol};
}

inline double expected_phase_sinc(int dp, int dq, const ArrayGeometry &g, double lambda) {
  const double ax = dp * g.delta_x, ay = dq * g.delta_y;
  return sinc(2.0 / lambda * std::sqrt(ax * ax + ay * ay));
}

namespace detail {

struct AxisPair {
  int dp;
  long long a; // (p-1)^2 - (p'-1)^2 with 0-based p - 1
};

inline std::vector<AxisPair> axis_pairs(int m) {
  std::vector<AxisPair> out;
  out.reserve(static_cast<std::size_t>(m) * m);
  for (int p = 0; p < m; ++p)
    for (int pp = 0; pp < m; ++pp)
      out.push_back({p - pp, static_cast<long long>(p) * p - static_cast<long long>(pp) * pp});
  return out;
}

} // namespace detail

inline double omega(const ArrayGeometry &g, double lambda, const ShellRegion &region) {
  g.validate();
  region.validate();
  if (g.size() == 1) return 0.0;
  if (!(region.r_min > g.aperture()))
    throw DomainError("inner radius must exceed the array aperture");
  const auto xs = detail::axis_pairs(g.m_x);
  const auto ys = detail::axis_pairs(g.m_y);
  const double kb = pi / lambda;
  const double dx2 = g.delta_x * g.delta_x, dy2 = g.delta_y * g.delta_y;

  std::unordered_map<long long, double> sinc_cache;
  std::unordered_map<std::uint64_t, double> cd_cache;
  double total = 0.0;
  for (const auto &py : ys) {
    for (const auto &px : xs) {
      if (px.dp == 0 && py.dp == 0) continue;
      const long long skey = static_cast<long long>(std::abs(px.dp)) * 1000003LL + std::abs(py.dp);
      auto sit = sinc_cache.find(skey);
      if (sit == sinc_cache.end()) {
        const double s = expected_phase_sinc(px.dp, py.dp, g, lambda);
        sit = sinc_cache.emplace(skey, s * s).first;
      }
      const double s2 = sit->second;
      if (s2 < 1e-300) continue;
      long long a = px.a, c = py.a;
      if (a < 0 || (a == 0 && c < 0)) a = -a, c = -c; // C^2 + D^2 is even in b
      const std::uint64_t key =
          (static_cast<std::uint64_t>(a) << 32) ^ static_cast<std::uint64_t>(c + (1LL << 31));
      auto cit = cd_cache.find(key);
      if (cit == cd_cache.end()) {
        const auto m = cb_db(kb * (a * dx2 + c * dy2), region);
        cit = cd_cache.emplace(key, m.c * m.c + m.d * m.d).first;
      }
      total += s2 * cit->second;
    }
  }
  return total;
}

inline double omega_surface(const ArrayGeometry &g, double lambda) {
  g.validate();
  double total = 0.0;
  for (int dq = -(g.m_y - 1); dq <= g.m_y - 1; ++dq)
    for (int dp = -(g.m_x - 1); dp <= g.m_x - 1; ++dp) {
      if (dp == 0 && dq == 0) continue;
      const double s = expected_phase_sinc(dp, dq, g, lambda);
      total += double(g.m_x - std::abs(dp)) * double(g.m_y - std::abs(dq)) * s * s;
    }
  return total;
}

// 3(R^5 - Rmin^5) / (5 R^2 (R^3 - Rmin^3)), written in t = Rmin/R.
inline double shell_factor(const ShellRegion &r) {
  const double t = r.r_min / r.r_max;
  return 3.0 * (1 + t + t * t + t * t * t + t * t * t * t) / (5.0 * (1 + t + t * t));
}

// E{1/(beta chi)} for uniform shell positions.
inline double e_inv_beta_chi(double kappa, double lambda, const ShellRegion &r) {
  const double k = 4.0 * pi / lambda;
  return k * k * kappa * r.r_max * r.r_max * shell_factor(r);
}

inline double mrc_bound_shell(const RateParams &p, double omega_value) {
  p.validate();
  const double M = p.M(), K = p.K, ru = p.rho_u, rp = p.rho_p;
  const double den = ru * (K - 1.0) * (1.0 + omega_value / M) + 1.0 +
                     (1.0 + K * ru) * p.kappa_chi_wc() * shell_factor(p.region) / (ru * rp);
  return p.prelog * std::log2(1.0 + M * ru / den);
}

inline double mrc_bound_shell(const RateParams &p) {
  return mrc_bound_shell(p, omega(p.geometry, p.lambda, p.region));
}

// interference_moment is E{p_uj p_uk |g_k^H g_j|^2} for one pair j != k;
// all K-1 interferers are taken as identically distributed.
inline double mrc_bound_general(double interference_moment, double e_inv_bc, const RateParams &p) {
  p.validate();
  const double M = p.M(), K = p.K, ru = p.rho_u, rp = p.rho_p;
  const double wc = p.lambda / (4.0 * pi * p.worst_distance());
  const double den = (K - 1.0) * interference_moment / (M * ru) +
                     (1.0 + K * ru) * e_inv_bc * wc * wc * p.chi_wc / (ru * rp) + 1.0;
  return p.prelog * std::log2(1.0 + M * ru / den);
}

enum class ArrayKind { ula, ura };

inline double mrc_bound_optimal(const RateParams &p, ArrayKind kind) {
  p.validate();
  const double M = p.M(), K = p.K, ru = p.rho_u, rp = p.rho_p;
  double inter = ru * (K - 1.0);
  if (kind == ArrayKind::ura) inter *= 1.0 + omega_surface(p.geometry, p.lambda) / M;
  const double den = inter + 1.0 + p.kappa_chi_wc() * (1.0 + K * ru) / (ru * rp);
  return p.prelog * std::log2(1.0 + M * ru / den);
}

// expectation = E{(M - (1 + X/M))^{-1}} with X the cross-phase double sum; K = 2 only.
inline double zf_bound_two(double expectation, double prelog, double rho_u, int K = 2) {
  if (K != 2) throw DomainError("ZF bound is available for K = 2 only");
  if (!(expectation > 0.0)) throw DomainError("ZF expectation must be positive");
  return prelog * std::log2(1.0 + rho_u / expectation);
}

// Smallest M meeting Q_tar at the optimal-spacing ULA bound.
inline long long m_required(double q_tar, double bandwidth, const RateParams &p) {
  p.validate();
  if (!(bandwidth > 0.0)) throw DomainError("bandwidth must be positive");
  if (!(q_tar >= 0.0)) throw DomainError("target rate must be nonnegative");
  const double K = p.K, ru = p.rho_u;
  const double pre = (K - 1.0) + 1.0 / ru + p.kappa_chi_wc() * (1.0 + K * ru) / (ru * ru * p.rho_p);
  const double m = pre * std::expm1(q_tar / (p.prelog * bandwidth) * std::log(2.0));
  if (!std::isfinite(m) || m > 9e18) throw InfeasibleError("required antenna count overflows");
  return static_cast<long long>(std::ceil(m - 1e-9));
}

} // namespace swarm_mimo
