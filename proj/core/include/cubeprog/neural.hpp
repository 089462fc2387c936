// Copyright (C) 2026 The cubeprog Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace cubeprog {

enum class LossKind : std::uint32_t { MSE = 0, SoftmaxCrossEntropy = 1 };
enum class Pathing : std::uint32_t { Shared = 0, Independent = 1 };

struct HeadSpec {
  int dim = 1;
  LossKind loss = LossKind::MSE;
  friend bool operator==(const HeadSpec&, const HeadSpec&) = default;
};

/// Dense rectifier network. With Independent pathing every head owns a full
/// copy of the hidden stack; with Shared pathing the heads branch off the
/// last hidden layer.
struct NetSpec {
  int inputDim = 1;
  std::vector<int> hidden;
  std::vector<HeadSpec> heads;
  Pathing pathing = Pathing::Independent;

  /// Throws ConfigError on non-positive dims or no heads.
  void validate() const;
  std::uint64_t hash() const;
  friend bool operator==(const NetSpec&, const NetSpec&) = default;
};

template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

template <typename S>
struct Layer {
  Mat<S> weight;  // out x in
  Vec<S> bias;
};

/// Parameters (or gradients, or optimizer moments) shaped by a NetSpec.
/// Layer order is trunk first, then each head path in head order.
template <typename S>
struct BasicParams {
  NetSpec spec;
  std::uint64_t specHash = 0;
  std::vector<Layer<S>> trunk;               // Shared pathing only
  std::vector<std::vector<Layer<S>>> heads;  // per head, input side first

  std::size_t parameterCount() const;
  bool allFinite() const;
  /// Same shapes, every entry zero.
  BasicParams zerosLike() const;
  /// Visits every layer in layer order.
  template <typename F>
  void forEachLayer(F&& f) {
    for (auto& l : trunk) f(l);
    for (auto& path : heads)
      for (auto& l : path) f(l);
  }
  template <typename F>
  void forEachLayer(F&& f) const {
    for (const auto& l : trunk) f(l);
    for (const auto& path : heads)
      for (const auto& l : path) f(l);
  }

  template <typename T>
  BasicParams<T> cast() const;
};

using Params = BasicParams<float>;

/// He-normal weights (variance 2/fanIn) for layers feeding a rectifier,
/// variance 1/fanIn for output layers, zero biases. Deterministic per seed.
template <typename S = float>
BasicParams<S> initParams(const NetSpec& spec, std::uint64_t seed);

/// Raw head outputs (logits for cross-entropy heads), each dim x batch.
/// `inputs` is inputDim x batch. Throws NumericError on non-finite values.
template <typename S>
std::vector<Mat<S>> forward(const BasicParams<S>& params, const Mat<S>& inputs);

/// forward() with softmax applied to cross-entropy heads.
template <typename S>
std::vector<Mat<S>> predict(const BasicParams<S>& params, const Mat<S>& inputs);

/// Sum over heads. MSE is the mean of squared errors over batch and
/// outputs; cross-entropy is the batch mean of -sum t log softmax(z).
template <typename S>
S loss(const NetSpec& spec, const std::vector<Mat<S>>& outputs,
       const std::vector<Mat<S>>& targets);

/// Loss and its exact gradient with respect to every parameter.
template <typename S>
S lossAndGradient(const BasicParams<S>& params, const Mat<S>& inputs,
                  const std::vector<Mat<S>>& targets, BasicParams<S>& grad);

/// Column-major training data: inputs inputDim x N, one dim x N target
/// matrix per head.
struct Dataset {
  Mat<float> inputs;
  std::vector<Mat<float>> targets;

  std::size_t size() const { return static_cast<std::size_t>(inputs.cols()); }
  Dataset subset(const std::vector<std::size_t>& indices) const;
};

enum class Optimizer { Adam, Sgd };
enum class Schedule { Constant, Cosine };

struct TrainConfig {
  std::uint64_t seed = 0;
  int batchSize = 64;
  int epochs = 100;
  double learningRate = 1e-3;
  Optimizer optimizer = Optimizer::Adam;
  /// Cosine anneals the rate per epoch from learningRate toward zero.
  Schedule schedule = Schedule::Constant;
  double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  /// Decoupled weight decay on weights (not biases), scaled by the learning rate.
  double weightDecay = 0.0;
  double trainFraction = 1.0;
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> heldOut;
};

/// Seeded permutation; the first round(fraction * n) indices train.
/// Throws ConfigError if the fraction is outside (0, 1] or the train split
/// would be empty.
Split splitDataset(std::size_t n, double fraction, std::uint64_t seed);

struct EpochRecord {
  int epoch = 0;
  double trainLoss = 0.0;
  std::optional<double> metric;
};

struct TrainResult {
  Params params;
  Split split;
  std::vector<EpochRecord> history;
};

/// Called after every epoch; a returned value is stored as that epoch's metric.
using EpochHook = std::function<std::optional<double>(int epoch, const Params&)>;

/// Deterministic in (spec, dataset, config). Single-threaded.
TrainResult train(const NetSpec& spec, const Dataset& data, const TrainConfig& config,
                  const EpochHook& hook = {});

/// Column-wise argmax of rows [row0, row0 + rows).
std::vector<int> argmaxColumns(const Mat<float>& m, int row0, int rows);

/// Forward pass over a large input in fixed-size chunks.
std::vector<Mat<float>> predictBatched(const Params& params, const Mat<float>& inputs,
                                       int chunk = 1024);

// "DNET" weight files: little-endian {magic, version u32, spec descriptor,
// spec hash as two u32, float32 parameters in layer order (weights row-major,
// then bias)}.
inline constexpr std::uint32_t kWeightFileVersion = 1;
void writeParams(const std::filesystem::path& path, const Params& params);
Params readParams(const std::filesystem::path& path);

}  // namespace cubeprog
