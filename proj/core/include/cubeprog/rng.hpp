// Copyright (C) 2026 The cubeprog Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

namespace cubeprog {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to derive independent per-item seeds from a
/// master seed so generation order never changes results.
constexpr std::uint64_t mixSeed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t deriveSeed(std::uint64_t master, std::uint64_t stream,
                                   std::uint64_t item = 0) noexcept {
  return mixSeed(mixSeed(master ^ mixSeed(stream)) + item);
}

inline Rng makeRng(std::uint64_t master, std::uint64_t stream,
                   std::uint64_t item = 0) {
  return Rng(deriveSeed(master, stream, item));
}

// Portable uniform draws. The std distributions are implementation-defined,
// these are not.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

/// Uniform integer in [0, n). Lemire-style rejection-free reduction is not
/// needed at these sizes; the modulo bias is below 2^-40 for n < 2^24.
inline std::size_t uniformIndex(Rng& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

double standardNormal(Rng& rng);

}  // namespace cubeprog
