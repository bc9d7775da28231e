// ldadnn/network.cc

// Copyright 2026  The ldadnn Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "ldadnn/network.h"

#include <cmath>
#include <limits>
#include <numeric>

#include "ldadnn/common.h"
#include "ldadnn/rng.h"

namespace ldadnn {

std::string ActivationName(Activation a) {
  return a == Activation::kRelu ? "relu" : "sigmoid";
}

Activation ActivationFromName(const std::string &name) {
  if (name == "sigmoid") return Activation::kSigmoid;
  if (name == "relu") return Activation::kRelu;
  throw Error(ErrorCode::kParse, "unknown activation '" + name + "'");
}

namespace {

void CheckConfig(const NetworkConfig &c) {
  if (c.input_dim < 1 || c.output_dim < 1 || c.domain_dim < 0)
    throw Error(ErrorCode::kPrecondition,
                "network needs input_dim >= 1, output_dim >= 1, domain_dim >= 0");
  for (int h : c.hidden_dims)
    if (h < 1) throw Error(ErrorCode::kPrecondition, "hidden layer sizes must be >= 1");
}

std::vector<int> LayerWidths(const NetworkConfig &c) {
  std::vector<int> widths{c.input_dim + c.domain_dim};
  widths.insert(widths.end(), c.hidden_dims.begin(), c.hidden_dims.end());
  widths.push_back(c.output_dim);
  return widths;
}

}  // namespace

LdatNetwork::LdatNetwork(const NetworkConfig &config) : config_(config) {
  CheckConfig(config_);
  const std::vector<int> widths = LayerWidths(config_);
  Rng rng(config_.seed);
  for (size_t l = 0; l + 1 < widths.size(); ++l) {
    const int in = widths[l], out = widths[l + 1];
    const double limit = std::sqrt(6.0 / (in + out));
    Layer layer;
    layer.weight.resize(out, in);
    for (int j = 0; j < in; ++j)
      for (int i = 0; i < out; ++i) layer.weight(i, j) = rng.Uniform(-limit, limit);
    layer.bias = Eigen::VectorXd::Zero(out);
    layers_.push_back(std::move(layer));
  }
}

LdatNetwork::LdatNetwork(const NetworkConfig &config, std::vector<Layer> layers)
    : config_(config), layers_(std::move(layers)) {
  CheckConfig(config_);
  const std::vector<int> widths = LayerWidths(config_);
  if (layers_.size() + 1 != widths.size())
    throw Error(ErrorCode::kDimensionMismatch, "layer count does not match config");
  for (size_t l = 0; l < layers_.size(); ++l) {
    const Layer &layer = layers_[l];
    if (layer.weight.rows() != widths[l + 1] || layer.weight.cols() != widths[l] ||
        layer.bias.size() != widths[l + 1])
      throw Error(ErrorCode::kDimensionMismatch,
                  "layer " + std::to_string(l) + " has the wrong shape");
    if (!layer.weight.allFinite() || !layer.bias.allFinite())
      throw Error(ErrorCode::kNonFinite,
                  "layer " + std::to_string(l) + " has non-finite parameters");
  }
}

int64_t LdatNetwork::NumParameters() const {
  int64_t n = 0;
  for (const auto &layer : layers_) n += layer.weight.size() + layer.bias.size();
  return n;
}

Json LdatNetwork::ToJson() const {
  Json layers = Json::array();
  for (const auto &layer : layers_) {
    std::vector<double> flat;
    flat.reserve(layer.weight.size());
    for (Eigen::Index i = 0; i < layer.weight.rows(); ++i)
      for (Eigen::Index j = 0; j < layer.weight.cols(); ++j)
        flat.push_back(layer.weight(i, j));
    layers.push_back({{"rows", layer.weight.rows()},
                      {"cols", layer.weight.cols()},
                      {"weight", std::move(flat)},
                      {"bias", std::vector<double>(layer.bias.begin(), layer.bias.end())}});
  }
  return Json{{"input_dim", config_.input_dim},
              {"domain_dim", config_.domain_dim},
              {"hidden_dims", config_.hidden_dims},
              {"output_dim", config_.output_dim},
              {"activation", ActivationName(config_.activation)},
              {"seed", config_.seed},
              {"layers", std::move(layers)}};
}

LdatNetwork LdatNetwork::FromJson(const Json &json) {
  try {
    NetworkConfig config;
    config.input_dim = json.at("input_dim").get<int>();
    config.domain_dim = json.at("domain_dim").get<int>();
    config.hidden_dims = json.at("hidden_dims").get<std::vector<int>>();
    config.output_dim = json.at("output_dim").get<int>();
    config.activation = ActivationFromName(json.at("activation").get<std::string>());
    config.seed = json.value("seed", uint64_t{0});
    std::vector<Layer> layers;
    for (const auto &l : json.at("layers")) {
      const int rows = l.at("rows").get<int>();
      const int cols = l.at("cols").get<int>();
      const Json &w = l.at("weight");
      const Json &b = l.at("bias");
      if (rows < 1 || cols < 1 || static_cast<int64_t>(w.size()) != int64_t{rows} * cols ||
          static_cast<int>(b.size()) != rows)
        throw Error(ErrorCode::kDimensionMismatch, "layer arrays have the wrong size");
      Layer layer;
      layer.weight.resize(rows, cols);
      layer.bias.resize(rows);
      for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) layer.weight(i, j) = JsonToDouble(w[i * cols + j]);
        layer.bias[i] = JsonToDouble(b[i]);
      }
      layers.push_back(std::move(layer));
    }
    return LdatNetwork(config, std::move(layers));
  } catch (const Json::exception &e) {
    throw Error(ErrorCode::kParse, std::string("malformed network JSON: ") + e.what());
  }
}

int CheckUbic(const LdatNetwork &net, std::span<const double> ubic) {
  const int K = net.DomainDim();
  if (K == 0) {
    if (!ubic.empty())
      throw Error(ErrorCode::kDimensionMismatch,
                  "baseline network takes no domain code");
    return -1;
  }
  if (static_cast<int>(ubic.size()) != K)
    throw Error(ErrorCode::kDimensionMismatch,
                "domain code must have " + std::to_string(K) + " entries");
  int hot = -1;
  for (int k = 0; k < K; ++k) {
    if (ubic[k] == 1.0) {
      if (hot >= 0) throw Error(ErrorCode::kPrecondition, "domain code has several ones");
      hot = k;
    } else if (ubic[k] != 0.0) {
      throw Error(ErrorCode::kPrecondition, "domain code entries must be 0 or 1");
    }
  }
  if (hot < 0) throw Error(ErrorCode::kPrecondition, "domain code has no one");
  return hot;
}

namespace {

struct Cache {
  std::vector<Eigen::MatrixXd> z;  // pre-activations per layer
  std::vector<Eigen::MatrixXd> a;  // a[0] = input, a[l + 1] = output of layer l
};

void Activate(Activation act, const Eigen::MatrixXd &z, Eigen::MatrixXd *a) {
  if (act == Activation::kSigmoid)
    *a = (1.0 + (-z.array()).exp()).inverse().matrix();
  else
    *a = z.cwiseMax(0.0);
}

// Column-wise softmax, max-shifted.
Eigen::MatrixXd Softmax(const Eigen::MatrixXd &z) {
  Eigen::MatrixXd p(z.rows(), z.cols());
  for (Eigen::Index c = 0; c < z.cols(); ++c) {
    const double m = z.col(c).maxCoeff();
    p.col(c) = (z.col(c).array() - m).exp().matrix();
    p.col(c) /= p.col(c).sum();
  }
  return p;
}

// `domains` is null for a baseline network, else one index per column.
void ForwardBatch(const LdatNetwork &net, const Eigen::MatrixXd &x, const int *domains,
                  Cache *cache) {
  const auto &layers = net.layers();
  const size_t L = layers.size();
  cache->z.resize(L);
  cache->a.resize(L + 1);
  cache->a[0] = x;
  for (size_t l = 0; l < L; ++l) {
    Eigen::MatrixXd &z = cache->z[l];
    if (l == 0) {
      if (net.DomainDim() == 0) {
        z.noalias() = layers[0].weight * x;
      } else {
        z.noalias() = layers[0].weight.leftCols(net.InputDim()) * x;
        for (Eigen::Index c = 0; c < x.cols(); ++c)
          z.col(c) += layers[0].weight.col(net.InputDim() + domains[c]);
      }
    } else {
      z.noalias() = layers[l].weight * cache->a[l];
    }
    z.colwise() += layers[l].bias;
    if (l + 1 < L)
      Activate(net.config().activation, z, &cache->a[l + 1]);
    else
      cache->a[l + 1] = Softmax(z);
  }
}

// Sum over columns of -log softmax(z)[label].
double CrossEntropySum(const Eigen::MatrixXd &z, const int *labels) {
  double loss = 0.0;
  for (Eigen::Index c = 0; c < z.cols(); ++c) {
    const double m = z.col(c).maxCoeff();
    const double lse = m + std::log((z.col(c).array() - m).exp().sum());
    loss += lse - z(labels[c], c);
  }
  return loss;
}

struct Batch {
  Eigen::MatrixXd x;
  std::vector<int> domains;
  std::vector<int> labels;
};

Batch Gather(const FrameDataset &data, const std::vector<int> &indices) {
  Batch b;
  b.x.resize(data.features.rows(), static_cast<Eigen::Index>(indices.size()));
  for (size_t i = 0; i < indices.size(); ++i) {
    b.x.col(static_cast<Eigen::Index>(i)) = data.features.col(indices[i]);
    b.labels.push_back(data.labels[indices[i]]);
    if (!data.domains.empty()) b.domains.push_back(data.domains[indices[i]]);
  }
  return b;
}

template <typename Fn>
void ForEachChunk(const LdatNetwork &net, const FrameDataset &data, Fn &&fn) {
  constexpr int kChunk = 1024;
  Cache cache;
  for (int begin = 0; begin < data.Size(); begin += kChunk) {
    const int n = std::min(kChunk, data.Size() - begin);
    const Eigen::MatrixXd x = data.features.middleCols(begin, n);
    ForwardBatch(net, x, data.domains.empty() ? nullptr : data.domains.data() + begin,
                 &cache);
    fn(begin, n, cache);
  }
}

}  // namespace

Eigen::VectorXd FirstLayerPreactivation(const LdatNetwork &net,
                                        Eigen::Ref<const Eigen::VectorXd> features,
                                        std::span<const double> ubic) {
  return Preactivations(net, features, ubic).front();
}

std::vector<Eigen::VectorXd> Preactivations(const LdatNetwork &net,
                                            Eigen::Ref<const Eigen::VectorXd> features,
                                            std::span<const double> ubic) {
  if (features.size() != net.InputDim())
    throw Error(ErrorCode::kDimensionMismatch,
                "feature vector has " + std::to_string(features.size()) +
                    " entries, network expects " + std::to_string(net.InputDim()));
  const int hot = CheckUbic(net, ubic);
  Cache cache;
  const Eigen::MatrixXd x = features;
  ForwardBatch(net, x, hot >= 0 ? &hot : nullptr, &cache);
  std::vector<Eigen::VectorXd> out;
  for (const auto &z : cache.z) out.push_back(z.col(0));
  return out;
}

Eigen::VectorXd Forward(const LdatNetwork &net, Eigen::Ref<const Eigen::VectorXd> features,
                        std::span<const double> ubic) {
  if (features.size() != net.InputDim())
    throw Error(ErrorCode::kDimensionMismatch,
                "feature vector has " + std::to_string(features.size()) +
                    " entries, network expects " + std::to_string(net.InputDim()));
  const int hot = CheckUbic(net, ubic);
  Cache cache;
  const Eigen::MatrixXd x = features;
  ForwardBatch(net, x, hot >= 0 ? &hot : nullptr, &cache);
  return cache.a.back().col(0);
}

LdatNetwork InitAugmentedFromBaseline(const LdatNetwork &baseline, int num_domains,
                                      uint64_t seed) {
  if (baseline.DomainDim() != 0)
    throw Error(ErrorCode::kPrecondition, "network already has a domain input");
  if (num_domains < 1) throw Error(ErrorCode::kPrecondition, "K must be >= 1");
  NetworkConfig config = baseline.config();
  config.domain_dim = num_domains;
  config.seed = seed;
  std::vector<Layer> layers = baseline.layers();
  Layer &first = layers.front();
  Eigen::MatrixXd widened = Eigen::MatrixXd::Zero(first.weight.rows(),
                                                  first.weight.cols() + num_domains);
  widened.leftCols(first.weight.cols()) = first.weight;
  first.weight = std::move(widened);
  return LdatNetwork(config, std::move(layers));
}

FrameDataset FrameDataset::WithoutDomains() const {
  FrameDataset out;
  out.features = features;
  out.labels = labels;
  return out;
}

FrameDataset FrameDataset::Subset(const std::vector<int> &indices) const {
  FrameDataset out;
  out.num_domains = num_domains;
  out.features.resize(features.rows(), static_cast<Eigen::Index>(indices.size()));
  for (size_t i = 0; i < indices.size(); ++i) {
    out.features.col(static_cast<Eigen::Index>(i)) = features.col(indices[i]);
    out.labels.push_back(labels[indices[i]]);
    if (!domains.empty()) out.domains.push_back(domains[indices[i]]);
  }
  return out;
}

void CheckDataset(const LdatNetwork &net, const FrameDataset &data) {
  if (data.features.cols() != data.Size())
    throw Error(ErrorCode::kDimensionMismatch, "features and labels differ in count");
  if (data.Size() > 0 && data.features.rows() != net.InputDim())
    throw Error(ErrorCode::kDimensionMismatch, "feature dimension differs from network");
  for (int y : data.labels)
    if (y < 0 || y >= net.OutputDim())
      throw Error(ErrorCode::kOutOfRange,
                  "label " + std::to_string(y) + " outside [0, " +
                      std::to_string(net.OutputDim()) + ")");
  if (net.DomainDim() == 0) {
    if (!data.domains.empty())
      throw Error(ErrorCode::kDimensionMismatch,
                  "baseline network given domain-coded data");
    return;
  }
  if (static_cast<int>(data.domains.size()) != data.Size())
    throw Error(ErrorCode::kDimensionMismatch,
                "domain-aware network needs a domain for every frame");
  for (int d : data.domains)
    if (d < 0 || d >= net.DomainDim())
      throw Error(ErrorCode::kOutOfRange,
                  "domain " + std::to_string(d) + " outside [0, " +
                      std::to_string(net.DomainDim()) + ")");
}

double MeanCrossEntropy(const LdatNetwork &net, const FrameDataset &data) {
  CheckDataset(net, data);
  if (data.Size() == 0) return std::numeric_limits<double>::quiet_NaN();
  double loss = 0.0;
  ForEachChunk(net, data, [&](int begin, int, const Cache &cache) {
    loss += CrossEntropySum(cache.z.back(), data.labels.data() + begin);
  });
  return loss / data.Size();
}

std::vector<int> Predict(const LdatNetwork &net, const FrameDataset &data) {
  CheckDataset(net, data);
  std::vector<int> out(data.Size());
  ForEachChunk(net, data, [&](int begin, int n, const Cache &cache) {
    const Eigen::MatrixXd &p = cache.a.back();
    for (int c = 0; c < n; ++c) {
      Eigen::Index best = 0;
      for (Eigen::Index k = 1; k < p.rows(); ++k)
        if (p(k, c) > p(best, c)) best = k;
      out[begin + c] = static_cast<int>(best);
    }
  });
  return out;
}

double FrameAccuracy(const LdatNetwork &net, const FrameDataset &data) {
  if (data.Size() == 0) return std::numeric_limits<double>::quiet_NaN();
  const std::vector<int> pred = Predict(net, data);
  int correct = 0;
  for (int i = 0; i < data.Size(); ++i) correct += pred[i] == data.labels[i];
  return static_cast<double>(correct) / data.Size();
}

std::vector<Layer> Gradients(const LdatNetwork &net, const FrameDataset &data,
                             const std::vector<int> &indices) {
  CheckDataset(net, data);
  if (indices.empty()) throw Error(ErrorCode::kPrecondition, "empty minibatch");
  const Batch batch = Gather(data, indices);
  Cache cache;
  ForwardBatch(net, batch.x, batch.domains.empty() ? nullptr : batch.domains.data(),
               &cache);
  const auto &layers = net.layers();
  const size_t L = layers.size();
  const double scale = 1.0 / static_cast<double>(indices.size());

  std::vector<Layer> grads(L);
  Eigen::MatrixXd delta = cache.a.back();  // softmax - onehot, per column
  for (size_t c = 0; c < indices.size(); ++c)
    delta(batch.labels[c], static_cast<Eigen::Index>(c)) -= 1.0;
  delta *= scale;

  for (size_t l = L; l-- > 0;) {
    grads[l].bias = delta.rowwise().sum();
    if (l == 0 && net.DomainDim() > 0) {
      const int in = net.InputDim();
      grads[0].weight = Eigen::MatrixXd::Zero(layers[0].weight.rows(),
                                              layers[0].weight.cols());
      grads[0].weight.leftCols(in).noalias() = delta * cache.a[0].transpose();
      for (size_t c = 0; c < indices.size(); ++c)
        grads[0].weight.col(in + batch.domains[c]) +=
            delta.col(static_cast<Eigen::Index>(c));
    } else {
      grads[l].weight.noalias() = delta * cache.a[l].transpose();
    }
    if (l == 0) break;
    Eigen::MatrixXd back = layers[l].weight.transpose() * delta;
    const Eigen::MatrixXd &a = cache.a[l];
    if (net.config().activation == Activation::kSigmoid)
      delta = back.array() * a.array() * (1.0 - a.array());
    else
      delta = back.array() * (cache.z[l - 1].array() > 0.0).cast<double>();
  }
  return grads;
}

TrainResult Train(LdatNetwork net, const FrameDataset &train,
                  const FrameDataset &heldout, const TrainConfig &config) {
  CheckDataset(net, train);
  if (heldout.Size() > 0) CheckDataset(net, heldout);
  if (train.Size() == 0) throw Error(ErrorCode::kPrecondition, "training set is empty");
  if (config.batch_size < 1) throw Error(ErrorCode::kPrecondition, "batch size must be >= 1");
  if (!(config.learning_rate >= 0.0))
    throw Error(ErrorCode::kPrecondition, "learning rate must be >= 0");

  Rng rng(config.seed);
  std::vector<int> order(train.Size());
  std::iota(order.begin(), order.end(), 0);
  double lr = config.learning_rate;
  double prev_cv_loss = std::numeric_limits<double>::infinity();
  std::vector<EpochMetrics> metrics;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.Shuffle(&order);
    if (lr > 0.0) {
      for (int begin = 0; begin < train.Size(); begin += config.batch_size) {
        const int end = std::min(train.Size(), begin + config.batch_size);
        const std::vector<int> idx(order.begin() + begin, order.begin() + end);
        const std::vector<Layer> grads = Gradients(net, train, idx);
        auto &layers = net.mutable_layers();
        for (size_t l = 0; l < layers.size(); ++l) {
          layers[l].weight -= lr * grads[l].weight;
          layers[l].bias -= lr * grads[l].bias;
        }
      }
    }
    EpochMetrics m;
    m.epoch = epoch;
    m.learning_rate = lr;
    m.train_loss = MeanCrossEntropy(net, train);
    if (!std::isfinite(m.train_loss))
      throw Error(ErrorCode::kNumerical,
                  "training loss became non-finite at epoch " + std::to_string(epoch) +
                      "; lower the learning rate");
    m.cv_loss = MeanCrossEntropy(net, heldout);
    m.cv_accuracy = FrameAccuracy(net, heldout);
    metrics.push_back(m);
    if (config.halve_on_increase && heldout.Size() > 0) {
      if (m.cv_loss > prev_cv_loss) lr *= 0.5;
      prev_cv_loss = m.cv_loss;
    }
  }
  return TrainResult{std::move(net), std::move(metrics)};
}

double GradientCheck(const LdatNetwork &net, Eigen::Ref<const Eigen::VectorXd> features,
                     std::span<const double> ubic, int label, double epsilon) {
  if (!(epsilon >= 1e-7 && epsilon <= 1e-3))
    throw Error(ErrorCode::kPrecondition, "epsilon must lie in [1e-7, 1e-3]");
  if (features.size() != net.InputDim())
    throw Error(ErrorCode::kDimensionMismatch, "feature dimension differs from network");
  const int hot = CheckUbic(net, ubic);
  FrameDataset sample;
  sample.features = features;
  sample.labels = {label};
  if (hot >= 0) {
    sample.domains = {hot};
    sample.num_domains = net.DomainDim();
  }
  const std::vector<Layer> analytic = Gradients(net, sample, {0});

  LdatNetwork probe = net;
  double worst = 0.0;
  auto check = [&](double *param, double grad) {
    const double saved = *param;
    *param = saved + epsilon;
    const double plus = MeanCrossEntropy(probe, sample);
    *param = saved - epsilon;
    const double minus = MeanCrossEntropy(probe, sample);
    *param = saved;
    const double numeric = (plus - minus) / (2.0 * epsilon);
    const double denom = std::max({std::abs(grad), std::abs(numeric), 1e-3});
    worst = std::max(worst, std::abs(grad - numeric) / denom);
  };
  auto &layers = probe.mutable_layers();
  for (size_t l = 0; l < layers.size(); ++l) {
    for (Eigen::Index j = 0; j < layers[l].weight.cols(); ++j)
      for (Eigen::Index i = 0; i < layers[l].weight.rows(); ++i)
        check(&layers[l].weight(i, j), analytic[l].weight(i, j));
    for (Eigen::Index i = 0; i < layers[l].bias.size(); ++i)
      check(&layers[l].bias[i], analytic[l].bias[i]);
  }
  return worst;
}

std::string MetricsCsv(const std::vector<EpochMetrics> &metrics, const ArtifactMeta *meta) {
  std::string out;
  if (meta) out += "# " + MetaToJson(*meta).dump() + "\n";
  out += "epoch,train_loss,cv_accuracy\n";
  char buf[96];
  for (const auto &m : metrics) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", m.epoch, m.train_loss,
                  m.cv_accuracy);
    out += buf;
  }
  return out;
}

}  // namespace ldadnn
