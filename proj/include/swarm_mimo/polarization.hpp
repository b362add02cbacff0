// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The swarm-mimo-sim authors

#pragma once

#include "core.hpp"
#include "geometry.hpp"
#include "sampling.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <vector>

namespace swarm_mimo {

struct DipoleExcitation {
  double amp_theta = 1.0;
  double phase_theta = 0.0;
  double amp_psi = 0.0;
  double phase_psi = 0.0;

  cplx theta_feed() const { return std::polar(amp_theta, phase_theta); }
  cplx psi_feed() const { return std::polar(amp_psi, phase_psi); }

  static DipoleExcitation from_complex(cplx e_theta, cplx e_psi) {
    return {std::abs(e_theta), std::arg(e_theta), std::abs(e_psi), std::arg(e_psi)};
  }
  static DipoleExcitation linear() { return {1.0, 0.0, 0.0, 0.0}; }
  // GS side (1, i)/sqrt2 and UAV side (1, -i)/sqrt2 of the circular setup
  static DipoleExcitation circular_gs() { return {M_SQRT1_2, 0.0, M_SQRT1_2, 0.5 * pi}; }
  static DipoleExcitation circular_uav() { return {M_SQRT1_2, 0.0, M_SQRT1_2, -0.5 * pi}; }
};

struct DipoleGeometry {
  double length_wavelengths = 0.5; // d_len / lambda
  double gain = 1.643;
  bool isotropic_pattern = false; // F = 1 in every direction
};

enum class ElementModel {
  cross_dipole,
  unit_gain // h = 1 everywhere, chi = 1
};

struct AntennaConfig {
  DipoleExcitation excitation;
  RotationAngles orientation;
  DipoleGeometry dipole;
  ElementModel model = ElementModel::cross_dipole;
};

struct PolarizationResult {
  cplx h;
  double plf = 0.0;
  double chi = 0.0;
};

struct PolarizationBasis {
  Vec3 theta_hat, psi_hat, p_hat;
};

// F(theta) with the wavelength folded into the length ratio.
inline double field_pattern(double theta, const DipoleGeometry &dip) {
  if (dip.isotropic_pattern) return 1.0;
  const double s = std::sin(theta);
  if (std::abs(s) < 1e-300 || theta <= 0.0 || theta >= pi) return 0.0;
  const double k = pi * dip.length_wavelengths;
  return (std::cos(k * std::cos(theta)) - std::cos(k)) / s;
}

inline double field_pattern(double theta, const DipoleGeometry &dip, double f0) {
  (void)wavelength(f0);
  return field_pattern(theta, dip);
}

inline PolarizationBasis polarization_basis(const Vec3 &r) {
  const double rxy = std::sqrt(r.x * r.x + r.y * r.y);
  const double rxz = std::sqrt(r.x * r.x + r.z * r.z);
  const double d = r.norm();
  if (rxy == 0.0) throw SingularDirectionError("direction lies on the z axis");
  if (rxz == 0.0) throw SingularDirectionError("direction lies on the y axis");
  PolarizationBasis b;
  b.theta_hat = Vec3{-r.x * r.z, -r.y * r.z, rxy * rxy} / (d * rxy);
  b.psi_hat = Vec3{-r.x * r.y, rxz * rxz, -r.y * r.z} / (d * rxz);
  b.p_hat = r / d;
  return b;
}

using Mat2 = std::array<std::array<double, 2>, 2>;

namespace detail {

struct LinkFrames {
  Vec3 theta_tx, psi_tx; // global field directions of the transmit dipoles
  Vec3 z_rx, y_rx;       // global receive dipole axes
  double theta_x, psi_x; // angles in the rotated transmit frame
  double theta_p, psi_p; // angles in the rotated receive frame
};

inline LinkFrames link_frames(const Vec3 &rel, const RotationMatrix &tx, const RotationMatrix &rx) {
  const double d = rel.norm();
  if (d == 0.0) throw SingularDirectionError("zero separation");
  const Vec3 lt = tx.transpose() * rel;
  const Vec3 lr = rx.transpose() * rel;
  const PolarizationBasis bt = polarization_basis(lt);
  LinkFrames f;
  f.theta_tx = tx * bt.theta_hat;
  f.psi_tx = tx * bt.psi_hat;
  f.z_rx = rx.column(2);
  f.y_rx = rx.column(1);
  f.theta_x = std::acos(std::clamp(lt.z / d, -1.0, 1.0));
  f.psi_x = std::acos(std::clamp(lt.y / d, -1.0, 1.0));
  f.theta_p = std::acos(std::clamp(-lr.z / d, -1.0, 1.0));
  f.psi_p = std::acos(std::clamp(-lr.y / d, -1.0, 1.0));
  return f;
}

} // namespace detail

inline Mat2 t_matrix(const Vec3 &rel, const RotationMatrix &tx, const RotationMatrix &rx) {
  const auto f = detail::link_frames(rel, tx, rx);
  return {{{f.theta_tx.dot(f.z_rx), f.theta_tx.dot(f.y_rx)},
           {f.psi_tx.dot(f.z_rx), f.psi_tx.dot(f.y_rx)}}};
}

// Antenna with its rotation matrix resolved once.
struct PreparedAntenna {
  AntennaConfig cfg;
  RotationMatrix rot;

  PreparedAntenna() = default;
  explicit PreparedAntenna(const AntennaConfig &c) : cfg(c), rot(rotation_matrix(c.orientation)) {}
};

// tx = GS element, rx = UAV, rel = UAV position minus element position.
inline PolarizationResult channel_factor(const PreparedAntenna &tx, const PreparedAntenna &rx,
                                         const Vec3 &rel, bool want_plf = true) {
  PolarizationResult r;
  if (tx.cfg.model == ElementModel::unit_gain || rx.cfg.model == ElementModel::unit_gain) {
    r.h = 1.0;
    r.plf = 1.0;
    r.chi = 1.0;
    return r;
  }
  const auto f = detail::link_frames(rel, tx.rot, rx.rot);
  const cplx et = tx.cfg.excitation.theta_feed() * field_pattern(f.theta_x, tx.cfg.dipole);
  const cplx ep = tx.cfg.excitation.psi_feed() * field_pattern(f.psi_x, tx.cfg.dipole);
  const cplx rt = rx.cfg.excitation.theta_feed() * field_pattern(f.theta_p, rx.cfg.dipole);
  const cplx rp = rx.cfg.excitation.psi_feed() * field_pattern(f.psi_p, rx.cfg.dipole);

  const double t11 = f.theta_tx.dot(f.z_rx), t12 = f.theta_tx.dot(f.y_rx);
  const double t21 = f.psi_tx.dot(f.z_rx), t22 = f.psi_tx.dot(f.y_rx);
  const cplx h0 = std::conj(et) * (t11 * rt + t12 * rp) + std::conj(ep) * (t21 * rt + t22 * rp);

  const double g = std::sqrt(tx.cfg.dipole.gain * rx.cfg.dipole.gain);
  r.h = g * h0;
  r.chi = std::norm(r.h);
  if (want_plf) {
    auto vec_norm2 = [](const Vec3 &a, cplx ca, const Vec3 &b, cplx cb) {
      const cplx x = a.x * ca + b.x * cb, y = a.y * ca + b.y * cb, z = a.z * ca + b.z * cb;
      return std::norm(x) + std::norm(y) + std::norm(z);
    };
    const double n1 = vec_norm2(f.theta_tx, et, f.psi_tx, ep);
    const double n2 = vec_norm2(f.z_rx, rt, f.y_rx, rp);
    if (n1 == 0.0 || n2 == 0.0) throw DomainError("degenerate excitation: zero response vector");
    r.plf = std::min(1.0, std::norm(h0) / (n1 * n2));
  }
  return r;
}

inline PolarizationResult channel_factor(const AntennaConfig &tx, const AntennaConfig &rx,
                                         const Vec3 &rel, double f0) {
  (void)wavelength(f0);
  return channel_factor(PreparedAntenna(tx), PreparedAntenna(rx), rel);
}

struct GainProfile {
  std::vector<double> chi;
  double mean = 0.0;
  double sum = 0.0;
};

inline std::vector<PreparedAntenna> prepare(const std::vector<AntennaConfig> &cfgs) {
  std::vector<PreparedAntenna> out;
  out.reserve(cfgs.size());
  for (const auto &c : cfgs) out.emplace_back(c);
  return out;
}

inline GainProfile effective_gain_array(const std::vector<Vec3> &elements,
                                        const std::vector<PreparedAntenna> &gs,
                                        const Vec3 &uav_pos, const PreparedAntenna &uav) {
  if (elements.empty() || elements.size() != gs.size())
    throw DimensionError("need one antenna config per array element");
  GainProfile g;
  g.chi.resize(elements.size());
  for (std::size_t l = 0; l < elements.size(); ++l) {
    g.chi[l] = channel_factor(gs[l], uav, uav_pos - elements[l], false).chi;
    g.sum += g.chi[l];
  }
  g.mean = g.sum / elements.size();
  return g;
}

inline GainProfile effective_gain_array(const ArrayGeometry &geom,
                                        const std::vector<AntennaConfig> &gs_configs,
                                        const Vec3 &uav_pos, const AntennaConfig &uav,
                                        double f0) {
  (void)wavelength(f0);
  return effective_gain_array(element_positions(geom), prepare(gs_configs), uav_pos,
                              PreparedAntenna(uav));
}

// Identical orientation for every element, or one frozen draw per element.
inline std::vector<AntennaConfig> make_gs_configs(const ArrayGeometry &geom,
                                                  const AntennaConfig &base, bool pseudo_random,
                                                  const OrientationRanges &ranges,
                                                  std::uint64_t seed) {
  std::vector<AntennaConfig> out(geom.size(), base);
  if (pseudo_random) {
    Rng rng = substream(seed, 0x6a5);
    for (auto &c : out) c.orientation = sample_orientation(ranges, rng);
  }
  return out;
}

struct SearchBudget {
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
  std::size_t refine_top = 10;
  std::size_t refine_iterations = 400;
};

struct WorstCaseResult {
  double chi_wc = 0.0;
  SphericalPosition position;
  RotationAngles orientation;
  std::size_t evaluations = 0;
};

namespace detail {

using Point5 = std::array<double, 5>; // phi, theta, roll, pitch, yaw

inline Point5 clamp_box(Point5 x, const Point5 &lo, const Point5 &hi) {
  for (int i = 0; i < 5; ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
  return x;
}

// Box-constrained Nelder-Mead by projection onto the box.
template <class F>
Point5 nelder_mead(F &&f, Point5 x0, const Point5 &lo, const Point5 &hi, std::size_t iters,
                   double &fbest, std::size_t &evals) {
  constexpr int n = 5;
  std::array<Point5, n + 1> s;
  std::array<double, n + 1> fv;
  s[0] = x0;
  for (int i = 0; i < n; ++i) {
    s[i + 1] = x0;
    const double step = 0.05 * std::max(hi[i] - lo[i], 1e-3);
    s[i + 1][i] = (x0[i] + step <= hi[i]) ? x0[i] + step : x0[i] - step;
  }
  for (int i = 0; i <= n; ++i) {
    s[i] = clamp_box(s[i], lo, hi);
    fv[i] = f(s[i]);
    ++evals;
  }
  for (std::size_t it = 0; it < iters; ++it) {
    std::array<int, n + 1> idx;
    for (int i = 0; i <= n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    const int best = idx[0], worst = idx[n], second = idx[n - 1];
    if (std::abs(fv[worst] - fv[best]) <= 1e-10 * (std::abs(fv[best]) + 1e-300)) break;
    Point5 c{};
    for (int i = 0; i <= n; ++i)
      if (i != worst)
        for (int k = 0; k < n; ++k) c[k] += s[i][k] / n;
    auto along = [&](double t) {
      Point5 p;
      for (int k = 0; k < n; ++k) p[k] = c[k] + t * (s[worst][k] - c[k]);
      return clamp_box(p, lo, hi);
    };
    const Point5 xr = along(-1.0);
    const double fr = f(xr);
    ++evals;
    if (fr < fv[best]) {
      const Point5 xe = along(-2.0);
      const double fe = f(xe);
      ++evals;
      if (fe < fr) s[worst] = xe, fv[worst] = fe;
      else s[worst] = xr, fv[worst] = fr;
    } else if (fr < fv[second]) {
      s[worst] = xr, fv[worst] = fr;
    } else {
      const Point5 xc = along(fr < fv[worst] ? -0.5 : 0.5);
      const double fc = f(xc);
      ++evals;
      if (fc < std::min(fr, fv[worst])) {
        s[worst] = xc, fv[worst] = fc;
      } else {
        for (int i = 0; i <= n; ++i) {
          if (i == best) continue;
          for (int k = 0; k < n; ++k) s[i][k] = s[best][k] + 0.5 * (s[i][k] - s[best][k]);
          fv[i] = f(s[i]);
          ++evals;
        }
      }
    }
  }
  int b = 0;
  for (int i = 1; i <= n; ++i)
    if (fv[i] < fv[b]) b = i;
  fbest = fv[b];
  return s[b];
}

} // namespace detail

// Stochastic search for the minimum of the array-mean gain over UAV direction and
// orientation at distance r_max. The result bounds the true minimum from above.
inline WorstCaseResult worst_case_gain(const ArrayGeometry &geom,
                                       const std::vector<AntennaConfig> &gs_configs,
                                       const AntennaConfig &uav_template,
                                       const ShellRegion &region, const SearchBudget &budget,
                                       const OrientationRanges &uav_ranges = {}) {
  if (budget.samples < 10000) throw DomainError("worst-case search needs at least 1e4 samples");
  region.validate();
  uav_ranges.validate();
  const auto elements = element_positions(geom);
  const auto gs = prepare(gs_configs);
  const double d = region.r_max;

  using detail::Point5;
  const Point5 lo{0.0, 0.0, uav_ranges.roll.lo, uav_ranges.pitch.lo, uav_ranges.yaw.lo};
  const Point5 hi{two_pi, pi, uav_ranges.roll.hi, uav_ranges.pitch.hi, uav_ranges.yaw.hi};

  auto objective = [&](const Point5 &x) {
    AntennaConfig u = uav_template;
    u.orientation = {x[2], x[3], x[4]};
    const Vec3 pos = SphericalPosition{d, x[1], x[0]}.to_cartesian();
    try {
      return effective_gain_array(elements, gs, pos, PreparedAntenna(u)).mean;
    } catch (const SingularDirectionError &) {
      return std::numeric_limits<double>::infinity();
    }
  };

  struct Cand {
    Point5 x;
    double f;
  };
  auto cands = parallel_samples<Cand>(budget.samples, budget.seed, [&](Rng &rng, std::size_t) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Point5 x;
    x[0] = two_pi * u(rng);
    x[1] = std::acos(1.0 - 2.0 * u(rng));
    for (int k = 2; k < 5; ++k) x[k] = lo[k] + (hi[k] - lo[k]) * u(rng);
    return Cand{x, objective(x)};
  });
  std::stable_sort(cands.begin(), cands.end(), [](const Cand &a, const Cand &b) { return a.f < b.f; });

  WorstCaseResult best;
  best.evaluations = budget.samples;
  best.chi_wc = cands.front().f;
  Point5 xb = cands.front().x;
  const std::size_t top = std::min(budget.refine_top, cands.size());
  for (std::size_t i = 0; i < top; ++i) {
    double fb = 0.0;
    const Point5 x = detail::nelder_mead(objective, cands[i].x, lo, hi, budget.refine_iterations,
                                         fb, best.evaluations);
    if (fb < best.chi_wc) best.chi_wc = fb, xb = x;
  }
  best.position = {d, xb[1], xb[0]};
  best.orientation = {xb[2], xb[3], xb[4]};
  return best;
}

struct KappaResult {
  double kappa = 0.0;
  double std_error = 0.0;
  std::size_t n_used = 0;
  std::size_t n_excluded = 0;
};

// kappa = E{1/chi} over shell positions and UAV orientations, chi being the array mean gain.
inline KappaResult kappa_estimate(const ArrayGeometry &geom,
                                  const std::vector<AntennaConfig> &gs_configs,
                                  const AntennaConfig &uav_template, const ShellRegion &region,
                                  std::size_t n, std::uint64_t seed,
                                  const OrientationRanges &uav_ranges = {},
                                  double chi_floor = 1e-12) {
  if (n < 10000) throw DomainError("kappa estimate needs at least 1e4 samples");
  region.validate();
  const auto elements = element_positions(geom);
  const auto gs = prepare(gs_configs);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto inv = parallel_samples<double>(n, seed, [&](Rng &rng, std::size_t) {
    for (;;) {
      AntennaConfig u = uav_template;
      const Vec3 pos = sample_shell_position(region, rng).to_cartesian();
      u.orientation = sample_orientation(uav_ranges, rng);
      try {
        const double chi = effective_gain_array(elements, gs, pos, PreparedAntenna(u)).mean;
        return chi < chi_floor ? nan : 1.0 / chi;
      } catch (const SingularDirectionError &) {
      }
    }
  });
  KappaResult r;
  std::vector<double> kept;
  kept.reserve(n);
  for (double v : inv) {
    if (std::isnan(v)) ++r.n_excluded;
    else kept.push_back(v);
  }
  const auto ms = mean_stderr(kept);
  r.kappa = ms.mean;
  r.std_error = ms.std_error;
  r.n_used = kept.size();
  return r;
}

} // namespace swarm_mimo
