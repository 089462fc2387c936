// Copyright (C) 2026 The cubeprog Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace cubeprog {

/// Relationship symbols, in state-tensor channel order.
enum class Rel : std::uint8_t { Above = 0, Left = 1, None = 2 };

inline constexpr std::size_t kRelChannels = 3;

const char* relName(Rel r) noexcept;
Rel relFromName(const std::string& name);

/// n x n x k pairwise relationship scores. Entry (i, j, Above) reads
/// "object i is above object j". The diagonal is never read or written.
class StateTensor {
 public:
  StateTensor() = default;
  explicit StateTensor(std::size_t n);

  std::size_t n() const noexcept { return n_; }

  double operator()(std::size_t i, std::size_t j, Rel r) const {
    return scores_[index(i, j, r)];
  }
  double& operator()(std::size_t i, std::size_t j, Rel r) {
    return scores_[index(i, j, r)];
  }

  bool has(std::size_t i, std::size_t j, Rel r) const { return (*this)(i, j, r) >= 0.5; }
  void set(std::size_t i, std::size_t j, Rel r, bool on = true);

  /// Recomputes the None channel of a binary tensor from Above/Left.
  void deriveNone();

  /// Number of set Above/Left entries (binary tensors only).
  std::size_t relationCount() const;

  const std::vector<double>& raw() const noexcept { return scores_; }

  /// n*n*k values in (i, j, channel) row-major order; diagonal zeroed.
  std::vector<float> flatten() const;
  /// Same layout, embedded in an nMax x nMax x k block (zero padded).
  std::vector<float> flattenPadded(std::size_t nMax) const;

  /// FNV-1a over the binarized Above/Left entries. Stable across platforms.
  std::uint64_t hash() const;

  friend bool operator==(const StateTensor& a, const StateTensor& b);

 private:
  std::size_t index(std::size_t i, std::size_t j, Rel r) const {
    return (i * n_ + j) * kRelChannels + static_cast<std::size_t>(r);
  }

  std::size_t n_ = 0;
  std::vector<double> scores_;
};

/// Compact human-readable listing, e.g. "Above(0,1) Left(2,3)".
std::string describe(const StateTensor& t);

}  // namespace cubeprog
