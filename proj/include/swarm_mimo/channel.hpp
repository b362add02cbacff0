// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The swarm-mimo-sim authors

#pragma once

#include "core.hpp"
#include "geometry.hpp"
#include "polarization.hpp"
#include "sampling.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

namespace swarm_mimo {

using ChannelMatrix = Eigen::MatrixXcd; // M x K

inline double pathloss(double d, double lambda) {
  if (!(d > 0.0)) throw DomainError("pathloss needs d > 0");
  const double r = lambda / (4.0 * pi * d);
  return r * r;
}

struct ChannelVector {
  Eigen::VectorXcd g;
  std::vector<double> beta;
  std::vector<double> chi;

  // (1/M) sum beta_kl chi_kl
  double mean_gain() const {
    double s = 0.0;
    for (std::size_t l = 0; l < beta.size(); ++l) s += beta[l] * chi[l];
    return s / beta.size();
  }
};

// g_kl = sqrt(beta_kl) h_kl exp(-i 2 pi d_kl / lambda), exact distances.
inline ChannelVector channel_vector(const std::vector<Vec3> &elements,
                                    const std::vector<PreparedAntenna> &gs, const Vec3 &uav_pos,
                                    const PreparedAntenna &uav, double lambda) {
  if (elements.empty() || elements.size() != gs.size())
    throw DimensionError("need one antenna config per array element");
  const std::size_t M = elements.size();
  ChannelVector c;
  c.g.resize(M);
  c.beta.resize(M);
  c.chi.resize(M);
  const double k = two_pi / lambda;
  for (std::size_t l = 0; l < M; ++l) {
    const Vec3 rel = uav_pos - elements[l];
    const double d = rel.norm();
    if (!(d > 0.0)) throw DomainError("UAV coincides with an array element");
    const auto pol = channel_factor(gs[l], uav, rel, false);
    c.beta[l] = pathloss(d, lambda);
    c.chi[l] = pol.chi;
    c.g[l] = std::sqrt(c.beta[l]) * pol.h * std::polar(1.0, -k * d);
  }
  return c;
}

inline ChannelVector channel_vector(const ArrayGeometry &geom,
                                    const std::vector<AntennaConfig> &gs_configs,
                                    const Vec3 &uav_pos, const AntennaConfig &uav, double f_c) {
  const double lambda = wavelength(f_c);
  if (!(uav_pos.norm() > geom.aperture()))
    throw DomainError("UAV must lie outside the array aperture");
  return channel_vector(element_positions(geom), prepare(gs_configs), uav_pos,
                        PreparedAntenna(uav), lambda);
}

struct CoherenceParams {
  double f_c = 2.4e9;
  double bandwidth = 20e6;
  double b_c = 3e6;
  double v_max = 20.0;
  double tau_dl_fraction = 0.125; // of T_len, used when tau_dl < 0
  double tau_dl = -1.0;           // symbols
  double tau_ul_p = -1.0;         // symbols, negative means K
};

struct Prelog {
  double t_len = 0.0;
  double lambda = 0.0;
  double tau_dl = 0.0;
  double tau_ul_p = 0.0;
  double tau_ul_d = 0.0;
};

inline double coherence_time(double v_max, double f_c) {
  if (!(v_max > 0.0)) return std::numeric_limits<double>::infinity();
  return wavelength(f_c) / (2.0 * v_max);
}

inline Prelog coherence_prelog(const CoherenceParams &p, int K) {
  if (!(p.b_c > 0.0) || !(p.f_c > 0.0) || !(p.v_max >= 0.0) || K < 1)
    throw DomainError("invalid coherence parameters");
  Prelog r;
  r.tau_ul_p = p.tau_ul_p >= 0.0 ? p.tau_ul_p : K;
  if (p.v_max == 0.0) {
    r.t_len = std::numeric_limits<double>::infinity();
    r.tau_dl = std::numeric_limits<double>::infinity();
    r.lambda = 1.0 - p.tau_dl_fraction;
    r.tau_ul_d = std::numeric_limits<double>::infinity();
  } else {
    r.t_len = p.b_c * speed_of_light / (2.0 * p.v_max * p.f_c);
    r.tau_dl = p.tau_dl >= 0.0 ? p.tau_dl : p.tau_dl_fraction * r.t_len;
    r.lambda = 1.0 - (r.tau_dl + r.tau_ul_p) / r.t_len;
    r.tau_ul_d = r.t_len - r.tau_dl - r.tau_ul_p;
  }
  if (!(r.lambda > 0.0)) throw InfeasibleError("coherence interval leaves no uplink data symbols");
  return r;
}

struct PowerControlConfig {
  double rho_u = 1.0;
  double rho_p = 10.0;
  double p_u_max = std::numeric_limits<double>::infinity();
  double d_wc = 500.0;
  double chi_wc = 1.0;
};

inline double pilot_power(const PowerControlConfig &cfg, double lambda) {
  if (!(cfg.chi_wc > 0.0)) throw DomainError("chi_wc must be positive");
  const double a = 4.0 * pi * cfg.d_wc / lambda;
  return cfg.rho_p * a * a / cfg.chi_wc;
}

struct DataPower {
  double p_u = 0.0;
  bool in_outage = false;
};

inline DataPower data_power(double mean_gain, const PowerControlConfig &cfg) {
  if (!(mean_gain > 0.0)) throw DomainError("mean channel gain must be positive");
  const double want = cfg.rho_u / mean_gain;
  if (want > cfg.p_u_max) return {cfg.p_u_max, true};
  return {want, false};
}

inline double max_data_power(double energy_budget, double p_p, double tau_ul_p, double tau_ul_d) {
  const double left = energy_budget - p_p * tau_ul_p;
  if (!(left > 0.0)) throw InfeasibleError("pilot energy exhausts the per-interval budget");
  if (!(tau_ul_d > 0.0)) throw InfeasibleError("no uplink data symbols");
  return left / tau_ul_d;
}

inline ChannelMatrix ml_estimate(const ChannelMatrix &G, double p_p, Rng &rng) {
  if (!(p_p > 0.0)) throw DomainError("pilot power must be positive");
  if (std::isinf(p_p)) return G;
  const double s = 1.0 / std::sqrt(p_p);
  ChannelMatrix est = G;
  for (Eigen::Index k = 0; k < G.cols(); ++k)
    for (Eigen::Index l = 0; l < G.rows(); ++l) est(l, k) += s * complex_gaussian(rng);
  return est;
}

// Fraction of sampled UAV states whose channel inversion exceeds the cap.
inline MeanStderr outage_probability(const std::function<double(Rng &)> &mean_gain_sampler,
                                     const PowerControlConfig &cfg, std::size_t n,
                                     std::uint64_t seed) {
  if (n < 1000) throw DomainError("outage estimate needs at least 1e3 samples");
  auto v = parallel_samples<double>(n, seed, [&](Rng &rng, std::size_t) {
    return data_power(mean_gain_sampler(rng), cfg).in_outage ? 1.0 : 0.0;
  });
  return mean_stderr(v);
}

inline std::vector<double> instantaneous_sinr_mrc(const ChannelMatrix &G, const ChannelMatrix &Gh,
                                                  const std::vector<double> &powers) {
  if (G.rows() != Gh.rows() || G.cols() != Gh.cols() ||
      static_cast<std::size_t>(G.cols()) != powers.size() || G.cols() < 1)
    throw DimensionError("channel, estimate and power dimensions disagree");
  const Eigen::MatrixXcd C = Gh.adjoint() * G; // C(k, j) = gh_k^H g_j
  const Eigen::Index K = G.cols();
  std::vector<double> out(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    double inter = 0.0;
    for (Eigen::Index j = 0; j < K; ++j)
      if (j != k) inter += powers[j] * std::norm(C(k, j));
    out[k] = powers[k] * std::norm(C(k, k)) / (inter + Gh.col(k).squaredNorm());
  }
  return out;
}

inline std::vector<double> sinr_zf(const ChannelMatrix &G, const std::vector<double> &powers) {
  const Eigen::Index M = G.rows(), K = G.cols();
  if (K < 1 || static_cast<std::size_t>(K) != powers.size())
    throw DimensionError("channel and power dimensions disagree");
  if (M < K) throw DimensionError("zero forcing needs M >= K");
  const Eigen::MatrixXcd gram = G.adjoint() * G;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram, Eigen::EigenvaluesOnly);
  const auto &ev = eig.eigenvalues();
  if (!(ev.minCoeff() > 0.0) || ev.maxCoeff() / ev.minCoeff() > 1e12)
    throw SingularMatrixError("channel Gram matrix is singular");
  const Eigen::MatrixXcd inv = gram.ldlt().solve(Eigen::MatrixXcd::Identity(K, K));
  std::vector<double> out(K);
  for (Eigen::Index k = 0; k < K; ++k) out[k] = powers[k] / inv(k, k).real();
  return out;
}

} // namespace swarm_mimo
