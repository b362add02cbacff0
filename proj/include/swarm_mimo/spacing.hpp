// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The swarm-mimo-sim authors

#pragma once

#include "geometry.hpp"
#include "rates.hpp"
#include "sampling.hpp"

#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <vector>

namespace swarm_mimo {

inline std::vector<double> optimal_spacing_ula(int M, double lambda, double r_min) {
  if (!(r_min > 0.0)) throw DomainError("r_min must be positive");
  if (M < 2) return {0.5 * lambda};
  const long long nmax = static_cast<long long>(std::floor(2.0 * r_min / (lambda * (M - 1))));
  std::vector<double> out;
  for (long long n = 1; n <= nmax; ++n) out.push_back(n * 0.5 * lambda);
  return out;
}

struct UraSpacing {
  int n = 1; // delta_x = n lambda / 2
  int m = 1; // delta_y = m lambda / 2
  double delta_x = 0.0;
  double delta_y = 0.0;
  double aperture = 0.0;
};

// Feasible lattice points in increasing aperture order, at most `limit` of them.
inline std::vector<UraSpacing> optimal_spacing_ura(int m_x, int m_y, double lambda, double r_min,
                                                   std::size_t limit = 256) {
  if (!(r_min > 0.0)) throw DomainError("r_min must be positive");
  if (m_x < 1 || m_y < 1) throw DomainError("array dimensions must be >= 1");
  auto make = [&](int n, int m) {
    UraSpacing s{n, m, n * 0.5 * lambda, m * 0.5 * lambda, 0.0};
    const double ax = (m_x - 1) * s.delta_x, ay = (m_y - 1) * s.delta_y;
    s.aperture = std::sqrt(ax * ax + ay * ay);
    return s;
  };
  if (m_x == 1 && m_y == 1) return {make(1, 1)};
  const double cap = 4.0 * r_min * r_min / (lambda * lambda);
  auto feasible = [&](int n, int m) {
    const double a = double(m_x - 1) * (m_x - 1) * n * n + double(m_y - 1) * (m_y - 1) * m * m;
    return a < cap;
  };
  // an axis of length 1 leaves its spacing free; pin it to the smallest allowed value
  const bool n_free = m_x > 1, m_free = m_y > 1;
  const int n0 = m_y, m0 = m_x;

  std::vector<UraSpacing> out;
  auto cmp = [](const UraSpacing &a, const UraSpacing &b) {
    if (a.aperture != b.aperture) return a.aperture > b.aperture;
    if (a.n != b.n) return a.n > b.n;
    return a.m > b.m;
  };
  std::priority_queue<UraSpacing, std::vector<UraSpacing>, decltype(cmp)> heap(cmp);
  std::set<std::pair<int, int>> seen;
  auto push = [&](int n, int m) {
    if (!feasible(n, m) || !seen.insert({n, m}).second) return;
    heap.push(make(n, m));
  };
  push(n0, m0);
  while (!heap.empty() && out.size() < limit) {
    const UraSpacing s = heap.top();
    heap.pop();
    out.push_back(s);
    if (n_free) push(s.n + 1, s.m);
    if (m_free) push(s.n, s.m + 1);
  }
  return out;
}

struct SpacingGrid {
  std::vector<double> x_ratios; // delta_x / lambda
  std::vector<double> y_ratios; // delta_y / lambda, single entry for a ULA
  std::vector<double> omega;    // row-major, y outer

  double at(std::size_t ix, std::size_t iy) const { return omega[iy * x_ratios.size() + ix]; }
};

inline SpacingGrid omega_sweep(const ArrayGeometry &tmpl, double lambda, const ShellRegion &region,
                               const std::vector<double> &x_ratios,
                               std::vector<double> y_ratios = {}, unsigned threads = 0) {
  if (x_ratios.empty()) throw DomainError("spacing grid is empty");
  if (y_ratios.empty()) y_ratios.push_back(tmpl.delta_y / lambda);
  SpacingGrid grid{x_ratios, y_ratios, {}};
  const std::size_t nx = x_ratios.size();
  grid.omega = parallel_samples<double>(
      nx * y_ratios.size(), 0,
      [&](Rng &, std::size_t i) {
        ArrayGeometry g = tmpl;
        g.delta_x = x_ratios[i % nx] * lambda;
        g.delta_y = y_ratios[i / nx] * lambda;
        return omega(g, lambda, region);
      },
      threads);
  return grid;
}

} // namespace swarm_mimo
