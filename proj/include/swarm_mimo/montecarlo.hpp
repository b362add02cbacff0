// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The swarm-mimo-sim authors

#pragma once

#include "channel.hpp"
#include "geometry.hpp"
#include "polarization.hpp"
#include "rates.hpp"
#include "sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace swarm_mimo {

struct EstimatorResult {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

inline EstimatorResult make_result(const std::vector<double> &v, std::uint64_t seed) {
  const auto ms = mean_stderr(v);
  return {ms.mean, ms.std_error, ms.n, seed};
}

enum class Polarization { linear, circular };
enum class GsOrientation { identical, pseudo_random };
enum class Receiver { mrc, zf };
enum class Csi { perfect, estimated };

struct ScenarioSpec {
  ArrayGeometry geometry{8, 1, 0.0625, 0.0};
  GsOrientation gs_orientation = GsOrientation::identical;
  Polarization polarization = Polarization::circular;
  ElementModel element_model = ElementModel::unit_gain;
  bool isotropic_pattern = false;
  RotationAngles identical_orientation{};
  OrientationRanges gs_ranges{};
  OrientationRanges uav_ranges{};
  std::uint64_t array_seed = 7;
  ShellRegion region{20.0, 500.0};
  int K = 2;
  double rho_u = 1.0;
  double rho_p = 10.0;
  double f_c = 2.4e9;
  double chi_wc = 1.0;
  double prelog = 1.0;

  double lambda() const { return wavelength(f_c); }

  AntennaConfig gs_template() const {
    AntennaConfig a;
    a.excitation = polarization == Polarization::circular ? DipoleExcitation::circular_gs()
                                                          : DipoleExcitation::linear();
    a.orientation = identical_orientation;
    a.dipole.isotropic_pattern = isotropic_pattern;
    a.model = element_model;
    return a;
  }

  AntennaConfig uav_template() const {
    AntennaConfig a = gs_template();
    a.excitation = polarization == Polarization::circular ? DipoleExcitation::circular_uav()
                                                          : DipoleExcitation::linear();
    a.orientation = {};
    return a;
  }

  std::vector<AntennaConfig> gs_configs() const {
    return make_gs_configs(geometry, gs_template(),
                           gs_orientation == GsOrientation::pseudo_random, gs_ranges, array_seed);
  }

  void validate() const {
    geometry.validate();
    region.validate();
    gs_ranges.validate();
    uav_ranges.validate();
    if (K < 1) throw DomainError("K must be >= 1");
    if (!(rho_u > 0.0) || !(rho_p > 0.0)) throw DomainError("SNR targets must be positive");
    if (!(region.r_min > geometry.aperture()))
      throw DomainError("inner radius must exceed the array aperture");
  }
};

// Elements and antennas resolved once per scenario.
struct PreparedScenario {
  ScenarioSpec spec;
  std::vector<Vec3> elements;
  std::vector<PreparedAntenna> gs;
  AntennaConfig uav;
  double lambda;

  explicit PreparedScenario(const ScenarioSpec &s)
      : spec(s), elements(element_positions(s.geometry)), gs(prepare(s.gs_configs())),
        uav(s.uav_template()), lambda(s.lambda()) {
    s.validate();
  }

  struct Draw {
    Vec3 position;
    PreparedAntenna antenna;
  };

  Draw draw_uav(Rng &rng) const {
    AntennaConfig u = uav;
    const Vec3 pos = sample_shell_position(spec.region, rng).to_cartesian();
    u.orientation = sample_orientation(spec.uav_ranges, rng);
    return {pos, PreparedAntenna(u)};
  }

  // Redraws on probability-zero singular directions.
  ChannelVector draw_channel(Rng &rng) const {
    for (;;) {
      const Draw d = draw_uav(rng);
      try {
        return channel_vector(elements, gs, d.position, d.antenna, lambda);
      } catch (const SingularDirectionError &) {
      }
    }
  }

  GainProfile draw_gain(Rng &rng) const {
    for (;;) {
      const Draw d = draw_uav(rng);
      try {
        return effective_gain_array(elements, gs, d.position, d.antenna);
      } catch (const SingularDirectionError &) {
      }
    }
  }
};

inline EstimatorResult estimate_interference_moment(const ScenarioSpec &spec, std::size_t n,
                                                    std::uint64_t seed, unsigned threads = 0) {
  const PreparedScenario sc(spec);
  auto v = parallel_samples<double>(
      n, seed,
      [&](Rng &rng, std::size_t) {
        const ChannelVector gk = sc.draw_channel(rng);
        const ChannelVector gj = sc.draw_channel(rng);
        const double pk = spec.rho_u / gk.mean_gain(), pj = spec.rho_u / gj.mean_gain();
        return pk * pj * std::norm(gk.g.dot(gj.g));
      },
      threads);
  return make_result(v, seed);
}

inline EstimatorResult estimate_ergodic_rate(const ScenarioSpec &spec, std::size_t n,
                                             std::uint64_t seed, Receiver receiver, Csi csi,
                                             unsigned threads = 0) {
  if (receiver == Receiver::zf && csi == Csi::estimated)
    throw DomainError("zero forcing is modelled with perfect CSI only");
  const PreparedScenario sc(spec);
  PowerControlConfig pc;
  pc.rho_u = spec.rho_u;
  pc.rho_p = spec.rho_p;
  pc.d_wc = spec.region.r_max;
  pc.chi_wc = spec.chi_wc;
  const double p_p = pilot_power(pc, sc.lambda);
  const int K = spec.K;
  const int M = spec.geometry.size();
  auto v = parallel_samples<double>(
      n, seed,
      [&](Rng &rng, std::size_t) {
        ChannelMatrix G(M, K);
        std::vector<double> p(K);
        for (int k = 0; k < K; ++k) {
          const ChannelVector c = sc.draw_channel(rng);
          G.col(k) = c.g;
          p[k] = data_power(c.mean_gain(), pc).p_u;
        }
        std::vector<double> sinr;
        if (receiver == Receiver::zf) {
          sinr = sinr_zf(G, p);
        } else {
          const ChannelMatrix Gh = csi == Csi::estimated ? ml_estimate(G, p_p, rng) : G;
          sinr = instantaneous_sinr_mrc(G, Gh, p);
        }
        double s = 0.0;
        for (double x : sinr) s += std::log2(1.0 + x);
        return spec.prelog * s / K;
      },
      threads);
  return make_result(v, seed);
}

struct GainCdf {
  std::vector<double> thresholds_db;
  std::vector<double> cdf;
  double p_below_10db = 0.0;
  double median_db = 0.0;
  std::size_t n = 0;
};

// Empirical CDF of sum_l chi_kl.
inline GainCdf gain_cdf(const ScenarioSpec &spec, std::size_t n, std::uint64_t seed,
                        const std::vector<double> &thresholds_db, unsigned threads = 0) {
  if (n < 10000) throw DomainError("gain CDF needs at least 1e4 samples");
  const PreparedScenario sc(spec);
  auto v = parallel_samples<double>(
      n, seed, [&](Rng &rng, std::size_t) { return sc.draw_gain(rng).sum; }, threads);
  std::sort(v.begin(), v.end());
  GainCdf out;
  out.n = n;
  out.thresholds_db = thresholds_db;
  std::sort(out.thresholds_db.begin(), out.thresholds_db.end());
  auto frac_below = [&](double db) {
    const double t = db_to_linear(db);
    return double(std::lower_bound(v.begin(), v.end(), t) - v.begin()) / v.size();
  };
  for (double t : out.thresholds_db) out.cdf.push_back(frac_below(t));
  out.p_below_10db = frac_below(10.0);
  const double med = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  out.median_db = linear_to_db(med);
  return out;
}

struct ExpectationCheck {
  int l = 1, l2 = 1; // 1-based element pair
  cplx closed_form;
  cplx mc;
  double std_error = 0.0; // of the complex mean
  double deviation_se = 0.0;
  cplx mc_exact; // same draws with exact distances
};

struct ExpectationReport {
  std::vector<ExpectationCheck> pairs;
  double max_deviation_se = 0.0;
  std::size_t n = 0;
};

// Phase-factor means E{exp(i 2pi/lambda (d_l - d_l'))} against (C + iD) sinc, for
// element 1 paired with every element (capped at 32 pairs).
inline ExpectationReport validate_expectations(const ScenarioSpec &spec, std::size_t n,
                                               std::uint64_t seed, unsigned threads = 0) {
  spec.validate();
  const ArrayGeometry &g = spec.geometry;
  const double lambda = spec.lambda();
  const double k = two_pi / lambda;
  const int npairs = std::min(g.size(), 32);
  const auto elements = element_positions(g);

  struct Sample {
    std::vector<cplx> approx, exact;
  };
  auto samples = parallel_samples<Sample>(
      n, seed,
      [&](Rng &rng, std::size_t) {
        const SphericalPosition s = sample_shell_position(spec.region, rng);
        const Vec3 pos = s.to_cartesian();
        Sample out;
        out.approx.resize(npairs);
        out.exact.resize(npairs);
        const double a1 = approx_distance(s, g, 1, true);
        const double e1 = exact_distance(pos, elements[0]);
        for (int j = 0; j < npairs; ++j) {
          out.approx[j] = std::polar(1.0, k * (a1 - approx_distance(s, g, j + 1, true)));
          out.exact[j] = std::polar(1.0, k * (e1 - exact_distance(pos, elements[j])));
        }
        return out;
      },
      threads);

  ExpectationReport rep;
  rep.n = n;
  const double kb = pi / lambda;
  for (int j = 0; j < npairs; ++j) {
    cplx sa = 0.0, se = 0.0;
    for (const auto &s : samples) sa += s.approx[j], se += s.exact[j];
    const cplx mean = sa / double(n);
    double var = 0.0;
    for (const auto &s : samples) var += std::norm(s.approx[j] - mean);
    ExpectationCheck c;
    c.l = 1;
    c.l2 = j + 1;
    c.mc = mean;
    c.mc_exact = se / double(n);
    c.std_error = n > 1 ? std::sqrt(var / (n - 1) / n) : 0.0;
    auto [p2, q2] = element_indices(g, j + 1);
    const double b = kb * (0.0 - double(p2 - 1) * (p2 - 1) * g.delta_x * g.delta_x -
                           double(q2 - 1) * (q2 - 1) * g.delta_y * g.delta_y);
    const auto cd = cb_db(b, spec.region);
    c.closed_form = cplx(cd.c, cd.d) * expected_phase_sinc(p2 - 1, q2 - 1, g, lambda);
    c.deviation_se = c.std_error > 0.0 ? std::abs(c.mc - c.closed_form) / c.std_error
                                       : (std::abs(c.mc - c.closed_form) > 1e-12 ? 1e300 : 0.0);
    rep.max_deviation_se = std::max(rep.max_deviation_se, c.deviation_se);
    rep.pairs.push_back(c);
  }
  return rep;
}

// E{(M - |S|^2/M)^{-1}} with S = sum_l exp(i 2pi/lambda (d_1l - d_2l)), exact distances.
inline EstimatorResult estimate_zf_expectation(const ScenarioSpec &spec, std::size_t n,
                                               std::uint64_t seed, unsigned threads = 0) {
  spec.validate();
  const auto elements = element_positions(spec.geometry);
  const double k = two_pi / spec.lambda();
  const double M = elements.size();
  auto v = parallel_samples<double>(
      n, seed,
      [&](Rng &rng, std::size_t) {
        const Vec3 a = sample_shell_position(spec.region, rng).to_cartesian();
        const Vec3 b = sample_shell_position(spec.region, rng).to_cartesian();
        cplx s = 0.0;
        for (const auto &e : elements)
          s += std::polar(1.0, k * (exact_distance(a, e) - exact_distance(b, e)));
        return 1.0 / (M - std::norm(s) / M);
      },
      threads);
  return make_result(v, seed);
}

} // namespace swarm_mimo
