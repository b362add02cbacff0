// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 The swarm-mimo-sim authors

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace swarm_mimo {

using Rng = std::mt19937_64;

// Independent generator for sample `index` of a run seeded with `seed`.
inline Rng substream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32), 0x5a17u};
  return Rng(seq);
}

template <class URBG> std::complex<double> complex_gaussian(URBG &rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const double re = n(rng), im = n(rng);
  return {re * M_SQRT1_2, im * M_SQRT1_2};
}

// SWARM_MIMO_THREADS caps the worker count; unset means hardware concurrency.
inline unsigned worker_count(unsigned requested = 0) {
  unsigned n = requested;
  if (n == 0) {
    n = std::max(1u, std::thread::hardware_concurrency());
    if (const char *env = std::getenv("SWARM_MIMO_THREADS")) {
      const long cap = std::strtol(env, nullptr, 10);
      if (cap > 0) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
  }
  return std::max(1u, n);
}

// Evaluates fn(rng, i) for i in [0, n) with rng = substream(seed, i).
// Output order is by index, so the thread count never changes results.
template <class T, class F>
std::vector<T> parallel_samples(std::size_t n, std::uint64_t seed, F &&fn, unsigned threads = 0) {
  std::vector<T> out(n);
  const unsigned workers = std::min<std::size_t>(worker_count(threads), std::max<std::size_t>(n, 1));
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Rng rng = substream(seed, i);
      out[i] = fn(rng, i);
    }
  };
  if (workers <= 1) {
    run(0, n);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t b = w * chunk, e = std::min(n, b + chunk);
    pool.emplace_back([&, w, b, e] {
      try {
        run(b, e);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto &t : pool) t.join();
  for (auto &e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

struct MeanStderr {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

inline MeanStderr mean_stderr(const std::vector<double> &v) {
  MeanStderr r;
  r.n = v.size();
  if (v.empty()) return r;
  double s = 0.0;
  for (double x : v) s += x;
  r.mean = s / v.size();
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - r.mean) * (x - r.mean);
    r.std_error = std::sqrt(ss / (v.size() - 1) / v.size());
  }
  return r;
}

} // namespace swarm_mimo
