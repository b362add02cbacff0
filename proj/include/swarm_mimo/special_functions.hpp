// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The swarm-mimo-sim authors

#pragma once

#include "core.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <utility>

namespace swarm_mimo {

inline constexpr double euler_gamma = 0.57721566490153286061;

namespace detail {

// Maclaurin series, |x| <= 4.
inline double si_series(double x) {
  const double x2 = x * x;
  double term = x, sum = x;
  for (int n = 1; n < 60; ++n) {
    term *= -x2 / ((2.0 * n) * (2.0 * n + 1.0));
    const double add = term / (2.0 * n + 1.0);
    sum += add;
    if (std::abs(add) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

inline double ci_series(double x) {
  const double x2 = x * x;
  double term = 1.0, sum = 0.0;
  for (int n = 1; n < 60; ++n) {
    term *= -x2 / ((2.0 * n - 1.0) * (2.0 * n));
    const double add = term / (2.0 * n);
    sum += add;
    if (std::abs(add) < 1e-18 * (std::abs(sum) + 1e-300)) break;
  }
  return euler_gamma + std::log(x) + sum;
}

} // namespace detail

// Auxiliary functions f(x), g(x) for x > 0, from the continued fraction of
// e^{ix} E1(ix) = g(x) - i f(x) (modified Lentz).
inline std::pair<double, double> sici_aux(double x) {
  if (!(x > 0.0)) throw DomainError("auxiliary functions need x > 0");
  using C = std::complex<double>;
  constexpr double tiny = 1e-300;
  const C z(0.0, x);
  C b = z + 1.0;
  C c = 1.0 / tiny;
  C d = 1.0 / b;
  C h = d;
  for (int i = 1; i < 100000; ++i) {
    const double a = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const C del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return {-h.imag(), h.real()};
}

inline double si(double x) {
  if (!std::isfinite(x)) {
    if (std::isnan(x)) return x;
    return x > 0 ? 0.5 * pi : -0.5 * pi;
  }
  const double ax = std::abs(x);
  double r;
  if (ax <= 4.0) {
    r = detail::si_series(ax);
  } else {
    auto [f, g] = sici_aux(ax);
    r = 0.5 * pi - f * std::cos(ax) - g * std::sin(ax);
  }
  return x < 0 ? -r : r;
}

inline double ci(double x) {
  if (!(x > 0.0)) throw DomainError("ci(x) needs x > 0");
  if (x == std::numeric_limits<double>::infinity()) return 0.0;
  if (x <= 4.0) return detail::ci_series(x);
  auto [f, g] = sici_aux(x);
  return f * std::sin(x) - g * std::cos(x);
}

// f(x) - 1/x + 2/x^3 and g(x) - 1/x^2, the parts left after the leading
// asymptotic terms cancel against the polynomial terms of C(b), D(b).
inline std::pair<double, double> sici_aux_tail(double x) {
  if (x >= 40.0) {
    const double ix2 = 1.0 / (x * x);
    // f tail: sum_{n>=2} (-1)^n (2n)!/x^{2n+1}; g tail: sum_{n>=1} (-1)^n (2n+1)!/x^{2n+2}
    double tf = 24.0 * ix2 * ix2 / x, tg = -6.0 * ix2 * ix2;
    double sf = tf, sg = tg;
    for (int n = 2; n < 40; ++n) {
      const double nf = -tf * (2.0 * n + 1.0) * (2.0 * n + 2.0) * ix2;
      const double ng = -tg * (2.0 * n) * (2.0 * n + 1.0) * ix2;
      if (std::abs(nf) > std::abs(tf)) break;
      tf = nf, tg = ng;
      sf += tf, sg += tg;
      if (std::abs(tf) < 1e-18 * std::abs(sf)) break;
    }
    return {sf, sg};
  }
  auto [f, g] = sici_aux(x);
  return {f - 1.0 / x + 2.0 / (x * x * x), g - 1.0 / (x * x)};
}

} // namespace swarm_mimo
