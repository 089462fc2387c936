// Copyright (C) 2026 The cubeprog Authors
// SPDX-License-Identifier: Apache-2.0

#include "cubeprog/neural.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "cubeprog/error.hpp"
#include "cubeprog/rng.hpp"

namespace cubeprog {

namespace {

constexpr std::uint64_t kShuffleStream = 0x5348554646ULL;
constexpr std::uint64_t kSplitStream = 0x53504c4954ULL;

template <typename S>
struct PathCache {
  std::vector<Mat<S>> act;  // act[k] feeds layer k; act.back() is the output
  std::vector<Mat<S>> pre;  // pre-activations per layer
};

template <typename S>
Mat<S> runPath(const std::vector<Layer<S>>& layers, const Mat<S>& input, bool reluOnLast,
               PathCache<S>* cache) {
  Mat<S> a = input;
  if (cache) {
    cache->act.clear();
    cache->pre.clear();
  }
  for (std::size_t k = 0; k < layers.size(); ++k) {
    Mat<S> z = layers[k].weight * a;
    z.colwise() += layers[k].bias;
    if (cache) {
      cache->act.push_back(std::move(a));
      cache->pre.push_back(z);
    }
    if (k + 1 < layers.size() || reluOnLast)
      a = z.cwiseMax(S(0));
    else
      a = std::move(z);
  }
  if (cache) cache->act.push_back(a);
  return a;
}

template <typename S>
Mat<S> backwardPath(const std::vector<Layer<S>>& layers, const PathCache<S>& cache,
                    Mat<S> delta, bool reluOnLast, std::vector<Layer<S>>& grads,
                    bool needInputGrad) {
  for (std::size_t k = layers.size(); k-- > 0;) {
    if (k + 1 < layers.size() || reluOnLast)
      delta = (cache.pre[k].array() > S(0)).select(delta, Mat<S>::Zero(delta.rows(), delta.cols()));
    grads[k].weight.noalias() = delta * cache.act[k].transpose();
    grads[k].bias = delta.rowwise().sum();
    if (k > 0 || needInputGrad) {
      Mat<S> next = layers[k].weight.transpose() * delta;
      delta = std::move(next);
    }
  }
  return delta;
}

template <typename S>
Mat<S> softmaxColumns(const Mat<S>& z) {
  Mat<S> out = z;
  for (Eigen::Index c = 0; c < z.cols(); ++c) {
    const S m = z.col(c).maxCoeff();
    out.col(c) = (z.col(c).array() - m).exp().matrix();
    out.col(c) /= out.col(c).sum();
  }
  return out;
}

template <typename S>
S headLoss(const HeadSpec& head, const Mat<S>& out, const Mat<S>& target, Mat<S>* grad) {
  const S batch = S(out.cols());
  if (head.loss == LossKind::MSE) {
    const Mat<S> diff = out - target;
    const S denom = batch * S(out.rows());
    if (grad) *grad = diff * (S(2) / denom);
    return diff.squaredNorm() / denom;
  }
  S total = 0;
  Mat<S> probs(out.rows(), out.cols());
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    const S m = out.col(c).maxCoeff();
    const Vec<S> shifted = out.col(c).array() - m;
    const S logZ = std::log(shifted.array().exp().sum());
    total -= (target.col(c).array() * (shifted.array() - logZ)).sum();
    probs.col(c) = (shifted.array() - logZ).exp().matrix();
  }
  if (grad) *grad = (probs - target) / batch;
  return total / batch;
}

template <typename S>
void checkShapes(const NetSpec& spec, const Mat<S>& inputs, const std::vector<Mat<S>>* targets) {
  if (inputs.rows() != spec.inputDim)
    throw ShapeError("input has " + std::to_string(inputs.rows()) + " rows, network expects " +
                     std::to_string(spec.inputDim));
  if (!targets) return;
  if (targets->size() != spec.heads.size()) throw ShapeError("one target matrix per head");
  for (std::size_t h = 0; h < spec.heads.size(); ++h)
    if ((*targets)[h].rows() != spec.heads[h].dim || (*targets)[h].cols() != inputs.cols())
      throw ShapeError("target shape mismatch for head " + std::to_string(h));
}

}  // namespace

void NetSpec::validate() const {
  if (inputDim < 1) throw ConfigError("inputDim must be >= 1");
  for (int w : hidden)
    if (w < 1) throw ConfigError("hidden widths must be >= 1");
  if (heads.empty()) throw ConfigError("network needs at least one head");
  for (const auto& h : heads)
    if (h.dim < 1) throw ConfigError("head dims must be >= 1");
  if (pathing == Pathing::Shared && hidden.empty() && heads.size() > 1)
    throw ConfigError("shared pathing needs at least one hidden layer");
}

std::uint64_t NetSpec::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 4; ++b) {
      h ^= (v >> (8 * b)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  mix(static_cast<std::uint64_t>(inputDim));
  mix(static_cast<std::uint64_t>(pathing));
  mix(hidden.size());
  for (int w : hidden) mix(static_cast<std::uint64_t>(w));
  mix(heads.size());
  for (const auto& hd : heads) {
    mix(static_cast<std::uint64_t>(hd.dim));
    mix(static_cast<std::uint64_t>(hd.loss));
  }
  return h;
}

template <typename S>
std::size_t BasicParams<S>::parameterCount() const {
  std::size_t count = 0;
  forEachLayer([&](const Layer<S>& l) { count += l.weight.size() + l.bias.size(); });
  return count;
}

template <typename S>
bool BasicParams<S>::allFinite() const {
  bool ok = true;
  forEachLayer([&](const Layer<S>& l) { ok = ok && l.weight.allFinite() && l.bias.allFinite(); });
  return ok;
}

template <typename S>
BasicParams<S> BasicParams<S>::zerosLike() const {
  BasicParams<S> out = *this;
  out.forEachLayer([](Layer<S>& l) {
    l.weight.setZero();
    l.bias.setZero();
  });
  return out;
}

template <typename S>
template <typename T>
BasicParams<T> BasicParams<S>::cast() const {
  BasicParams<T> out;
  out.spec = spec;
  out.specHash = specHash;
  auto conv = [](const Layer<S>& l) {
    return Layer<T>{l.weight.template cast<T>(), l.bias.template cast<T>()};
  };
  for (const auto& l : trunk) out.trunk.push_back(conv(l));
  for (const auto& path : heads) {
    out.heads.emplace_back();
    for (const auto& l : path) out.heads.back().push_back(conv(l));
  }
  return out;
}

template <typename S>
BasicParams<S> initParams(const NetSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(mixSeed(seed));
  auto make = [&rng](int in, int out, bool feedsRelu) {
    Layer<S> l;
    l.weight.resize(out, in);
    l.bias = Vec<S>::Zero(out);
    const double stddev = std::sqrt((feedsRelu ? 2.0 : 1.0) / in);
    for (Eigen::Index c = 0; c < l.weight.cols(); ++c)
      for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
        l.weight(r, c) = static_cast<S>(stddev * standardNormal(rng));
    return l;
  };

  BasicParams<S> p;
  p.spec = spec;
  p.specHash = spec.hash();
  int width = spec.inputDim;
  if (spec.pathing == Pathing::Shared) {
    for (int w : spec.hidden) {
      p.trunk.push_back(make(width, w, true));
      width = w;
    }
    for (const auto& h : spec.heads) p.heads.push_back({make(width, h.dim, false)});
  } else {
    for (const auto& h : spec.heads) {
      std::vector<Layer<S>> path;
      int w0 = spec.inputDim;
      for (int w : spec.hidden) {
        path.push_back(make(w0, w, true));
        w0 = w;
      }
      path.push_back(make(w0, h.dim, false));
      p.heads.push_back(std::move(path));
    }
  }
  return p;
}

template <typename S>
std::vector<Mat<S>> forward(const BasicParams<S>& params, const Mat<S>& inputs) {
  checkShapes<S>(params.spec, inputs, nullptr);
  const Mat<S> trunkOut =
      params.trunk.empty() ? inputs : runPath<S>(params.trunk, inputs, true, nullptr);
  std::vector<Mat<S>> outs;
  outs.reserve(params.heads.size());
  for (const auto& path : params.heads) {
    outs.push_back(runPath<S>(path, trunkOut, false, nullptr));
    if (!outs.back().allFinite()) throw NumericError("non-finite network output");
  }
  return outs;
}

template <typename S>
std::vector<Mat<S>> predict(const BasicParams<S>& params, const Mat<S>& inputs) {
  auto outs = forward(params, inputs);
  for (std::size_t h = 0; h < outs.size(); ++h)
    if (params.spec.heads[h].loss == LossKind::SoftmaxCrossEntropy)
      outs[h] = softmaxColumns<S>(outs[h]);
  return outs;
}

template <typename S>
S loss(const NetSpec& spec, const std::vector<Mat<S>>& outputs,
       const std::vector<Mat<S>>& targets) {
  if (outputs.size() != spec.heads.size() || targets.size() != spec.heads.size())
    throw ShapeError("one output and one target per head");
  S total = 0;
  for (std::size_t h = 0; h < outputs.size(); ++h) {
    if (outputs[h].rows() != targets[h].rows() || outputs[h].cols() != targets[h].cols())
      throw ShapeError("output/target shape mismatch");
    total += headLoss<S>(spec.heads[h], outputs[h], targets[h], nullptr);
  }
  return total;
}

template <typename S>
S lossAndGradient(const BasicParams<S>& params, const Mat<S>& inputs,
                  const std::vector<Mat<S>>& targets, BasicParams<S>& grad) {
  const NetSpec& spec = params.spec;
  checkShapes<S>(spec, inputs, &targets);
  if (grad.heads.size() != params.heads.size() || grad.trunk.size() != params.trunk.size())
    grad = params.zerosLike();

  PathCache<S> trunkCache;
  const bool shared = !params.trunk.empty();
  const Mat<S> trunkOut = shared ? runPath<S>(params.trunk, inputs, true, &trunkCache) : inputs;

  S total = 0;
  Mat<S> trunkDelta;
  for (std::size_t h = 0; h < params.heads.size(); ++h) {
    PathCache<S> cache;
    const Mat<S> out = runPath<S>(params.heads[h], trunkOut, false, &cache);
    if (!out.allFinite()) throw NumericError("non-finite network output");
    Mat<S> dOut;
    total += headLoss<S>(spec.heads[h], out, targets[h], &dOut);
    Mat<S> dIn = backwardPath<S>(params.heads[h], cache, std::move(dOut), false, grad.heads[h], shared);
    if (shared) {
      if (trunkDelta.size() == 0)
        trunkDelta = std::move(dIn);
      else
        trunkDelta += dIn;
    }
  }
  if (shared) backwardPath<S>(params.trunk, trunkCache, std::move(trunkDelta), true, grad.trunk, false);
  if (!std::isfinite(static_cast<double>(total))) throw NumericError("non-finite loss");
  return total;
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out;
  const auto cols = static_cast<Eigen::Index>(indices.size());
  out.inputs.resize(inputs.rows(), cols);
  for (Eigen::Index c = 0; c < cols; ++c) out.inputs.col(c) = inputs.col(indices[c]);
  for (const auto& t : targets) {
    Mat<float> m(t.rows(), cols);
    for (Eigen::Index c = 0; c < cols; ++c) m.col(c) = t.col(indices[c]);
    out.targets.push_back(std::move(m));
  }
  return out;
}

Split splitDataset(std::size_t n, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw ConfigError("trainFraction must be in (0, 1]");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng = makeRng(seed, kSplitStream);
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[uniformIndex(rng, i)]);
  const auto nTrain = static_cast<std::size_t>(std::llround(fraction * double(n)));
  if (nTrain == 0) throw ConfigError("empty training split");
  Split s;
  s.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(nTrain));
  s.heldOut.assign(perm.begin() + static_cast<std::ptrdiff_t>(nTrain), perm.end());
  return s;
}

TrainResult train(const NetSpec& spec, const Dataset& data, const TrainConfig& config,
                  const EpochHook& hook) {
  spec.validate();
  if (config.batchSize < 1 || config.epochs < 0 || !(config.learningRate > 0) ||
      !(config.weightDecay >= 0))
    throw ConfigError("invalid training configuration");
  checkShapes<float>(spec, data.inputs, &data.targets);

  TrainResult result;
  result.split = splitDataset(data.size(), config.trainFraction, config.seed);
  result.params = initParams<float>(spec, config.seed);
  Params& p = result.params;
  Params grad = p.zerosLike();
  Params m1 = p.zerosLike(), m2 = p.zerosLike();

  std::vector<std::size_t> order = result.split.train;
  const auto batch = static_cast<std::size_t>(config.batchSize);
  const float b1 = static_cast<float>(config.beta1), b2 = static_cast<float>(config.beta2);
  const float eps = static_cast<float>(config.eps);
  long step = 0;

  Mat<float> xb;
  std::vector<Mat<float>> tb(spec.heads.size());
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double rate = config.learningRate;
    if (config.schedule == Schedule::Cosine)
      rate *= 0.5 * (1.0 + std::cos(std::numbers::pi * epoch / config.epochs));
    const float lr = static_cast<float>(rate);
    const float decay = static_cast<float>(rate * config.weightDecay);
    Rng rng = makeRng(config.seed, kShuffleStream, static_cast<std::uint64_t>(epoch));
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniformIndex(rng, i)]);

    double lossSum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t count = std::min(batch, order.size() - start);
      const auto cols = static_cast<Eigen::Index>(count);
      xb.resize(data.inputs.rows(), cols);
      for (Eigen::Index c = 0; c < cols; ++c) xb.col(c) = data.inputs.col(order[start + c]);
      for (std::size_t h = 0; h < tb.size(); ++h) {
        tb[h].resize(data.targets[h].rows(), cols);
        for (Eigen::Index c = 0; c < cols; ++c) tb[h].col(c) = data.targets[h].col(order[start + c]);
      }
      const float l = lossAndGradient<float>(p, xb, tb, grad);
      lossSum += double(l) * double(count);
      ++step;

      if (config.optimizer == Optimizer::Sgd) {
        auto gi = std::vector<Layer<float>*>{};
        grad.forEachLayer([&](Layer<float>& g) { gi.push_back(&g); });
        std::size_t k = 0;
        p.forEachLayer([&](Layer<float>& w) {
          if (decay > 0.0f) w.weight *= 1.0f - decay;
          w.weight -= lr * gi[k]->weight;
          w.bias -= lr * gi[k]->bias;
          ++k;
        });
        continue;
      }
      const float c1 = 1.0f - std::pow(b1, float(step));
      const float c2 = 1.0f - std::pow(b2, float(step));
      const float stepSize = lr * std::sqrt(c2) / c1;
      std::vector<Layer<float>*> g, a, b;
      grad.forEachLayer([&](Layer<float>& l) { g.push_back(&l); });
      m1.forEachLayer([&](Layer<float>& l) { a.push_back(&l); });
      m2.forEachLayer([&](Layer<float>& l) { b.push_back(&l); });
      std::size_t k = 0;
      p.forEachLayer([&](Layer<float>& w) {
        if (decay > 0.0f) w.weight *= 1.0f - decay;
        a[k]->weight = b1 * a[k]->weight + (1 - b1) * g[k]->weight;
        b[k]->weight = b2 * b[k]->weight + (1 - b2) * g[k]->weight.cwiseAbs2();
        w.weight.array() -= stepSize * a[k]->weight.array() / (b[k]->weight.array().sqrt() + eps);
        a[k]->bias = b1 * a[k]->bias + (1 - b1) * g[k]->bias;
        b[k]->bias = b2 * b[k]->bias + (1 - b2) * g[k]->bias.cwiseAbs2();
        w.bias.array() -= stepSize * a[k]->bias.array() / (b[k]->bias.array().sqrt() + eps);
        ++k;
      });
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.trainLoss = order.empty() ? 0.0 : lossSum / double(order.size());
    if (hook) rec.metric = hook(epoch, p);
    result.history.push_back(rec);
  }
  return result;
}

std::vector<int> argmaxColumns(const Mat<float>& m, int row0, int rows) {
  std::vector<int> out(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    Eigen::Index idx = 0;
    m.col(c).segment(row0, rows).maxCoeff(&idx);
    out[static_cast<std::size_t>(c)] = static_cast<int>(idx);
  }
  return out;
}

std::vector<Mat<float>> predictBatched(const Params& params, const Mat<float>& inputs, int chunk) {
  std::vector<Mat<float>> outs(params.spec.heads.size());
  for (std::size_t h = 0; h < outs.size(); ++h) outs[h].resize(params.spec.heads[h].dim, inputs.cols());
  for (Eigen::Index start = 0; start < inputs.cols(); start += chunk) {
    const Eigen::Index count = std::min<Eigen::Index>(chunk, inputs.cols() - start);
    const Mat<float> block = inputs.middleCols(start, count);
    auto part = predict<float>(params, block);
    for (std::size_t h = 0; h < outs.size(); ++h) outs[h].middleCols(start, count) = part[h];
  }
  return outs;
}

#define CUBEPROG_INSTANTIATE(S)                                                              \
  template struct BasicParams<S>;                                                            \
  template BasicParams<S> initParams<S>(const NetSpec&, std::uint64_t);                      \
  template std::vector<Mat<S>> forward<S>(const BasicParams<S>&, const Mat<S>&);             \
  template std::vector<Mat<S>> predict<S>(const BasicParams<S>&, const Mat<S>&);             \
  template S loss<S>(const NetSpec&, const std::vector<Mat<S>>&, const std::vector<Mat<S>>&); \
  template S lossAndGradient<S>(const BasicParams<S>&, const Mat<S>&,                        \
                                const std::vector<Mat<S>>&, BasicParams<S>&);

CUBEPROG_INSTANTIATE(float)
CUBEPROG_INSTANTIATE(double)
#undef CUBEPROG_INSTANTIATE

template BasicParams<double> BasicParams<float>::cast<double>() const;
template BasicParams<float> BasicParams<double>::cast<float>() const;

}  // namespace cubeprog
