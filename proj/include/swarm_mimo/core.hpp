// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The swarm-mimo-sim authors

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace swarm_mimo {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double speed_of_light = 3.0e8;
inline constexpr double boltzmann = 1.380649e-23;

// Error hierarchy. The CLI maps each family to its own exit status.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
public:
  using Error::Error;
};

// Polarization basis is undefined on the array axes.
class SingularDirectionError : public DomainError {
public:
  using DomainError::DomainError;
};

class DimensionError : public Error {
public:
  using Error::Error;
};

class InfeasibleError : public Error {
public:
  using Error::Error;
};

class SingularMatrixError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

inline double wavelength(double f_c) {
  if (!(f_c > 0.0)) throw DomainError("carrier frequency must be positive");
  return speed_of_light / f_c;
}

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  constexpr Vec3 operator+(const Vec3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3 &o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  constexpr double dot(const Vec3 &o) const { return x * o.x + y * o.y + z * o.z; }
  constexpr Vec3 cross(const Vec3 &o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
};

inline constexpr Vec3 operator*(double s, const Vec3 &v) { return v * s; }

// Normalized sinc, sin(pi x)/(pi x).
inline double sinc(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - (pi * x) * (pi * x) / 6.0;
  return std::sin(pi * x) / (pi * x);
}

} // namespace swarm_mimo
