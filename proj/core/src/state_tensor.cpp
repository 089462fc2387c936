// Copyright (C) 2026 The cubeprog Authors
// SPDX-License-Identifier: Apache-2.0

#include "cubeprog/state_tensor.hpp"

#include <cmath>
#include <sstream>

#include "cubeprog/error.hpp"
#include "cubeprog/rng.hpp"

namespace cubeprog {

const char* relName(Rel r) noexcept {
  switch (r) {
    case Rel::Above: return "Above";
    case Rel::Left: return "Left";
    case Rel::None: return "None";
  }
  return "None";
}

Rel relFromName(const std::string& name) {
  if (name == "Above") return Rel::Above;
  if (name == "Left") return Rel::Left;
  if (name == "None") return Rel::None;
  throw FormatError("unknown relation '" + name + "'");
}

StateTensor::StateTensor(std::size_t n) : n_(n), scores_(n * n * kRelChannels, 0.0) {}

void StateTensor::set(std::size_t i, std::size_t j, Rel r, bool on) {
  (*this)(i, j, r) = on ? 1.0 : 0.0;
}

void StateTensor::deriveNone() {
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) {
      if (i == j) continue;
      set(i, j, Rel::None, !has(i, j, Rel::Above) && !has(i, j, Rel::Left));
    }
}

std::size_t StateTensor::relationCount() const {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      if (i != j) count += has(i, j, Rel::Above) + has(i, j, Rel::Left);
  return count;
}

std::vector<float> StateTensor::flatten() const { return flattenPadded(n_); }

std::vector<float> StateTensor::flattenPadded(std::size_t nMax) const {
  if (nMax < n_) throw ShapeError("state tensor larger than padding");
  std::vector<float> out(nMax * nMax * kRelChannels, 0.0f);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) {
      if (i == j) continue;
      for (std::size_t c = 0; c < kRelChannels; ++c)
        out[(i * nMax + j) * kRelChannels + c] =
            static_cast<float>(scores_[index(i, j, static_cast<Rel>(c))]);
    }
  return out;
}

std::uint64_t StateTensor::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t byte) {
    h ^= byte;
    h *= 0x100000001b3ULL;
  };
  mix(n_ & 0xff);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) {
      if (i == j) continue;
      mix(static_cast<std::uint64_t>(has(i, j, Rel::Above)) |
          (static_cast<std::uint64_t>(has(i, j, Rel::Left)) << 1));
    }
  return h;
}

bool operator==(const StateTensor& a, const StateTensor& b) {
  if (a.n_ != b.n_) return false;
  for (std::size_t i = 0; i < a.n_; ++i)
    for (std::size_t j = 0; j < a.n_; ++j) {
      if (i == j) continue;
      if (a.has(i, j, Rel::Above) != b.has(i, j, Rel::Above) ||
          a.has(i, j, Rel::Left) != b.has(i, j, Rel::Left))
        return false;
    }
  return true;
}

std::string describe(const StateTensor& t) {
  std::ostringstream os;
  bool first = true;
  for (Rel r : {Rel::Above, Rel::Left})
    for (std::size_t i = 0; i < t.n(); ++i)
      for (std::size_t j = 0; j < t.n(); ++j) {
        if (i == j || !t.has(i, j, r)) continue;
        os << (first ? "" : " ") << relName(r) << '(' << i << ',' << j << ')';
        first = false;
      }
  return first ? "{}" : os.str();
}

double standardNormal(Rng& rng) {
  // Box-Muller on the portable uniform; one value per call keeps the stream
  // position independent of caching.
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace cubeprog
