// ldadnn/network.h

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

// Feedforward frame classifier with optional one-hot domain input.
//
// The first layer sees [features; d] where d is a K-dim one-hot domain code,
// so its weight splits into an acoustic block W_v (input_dim columns) and a
// domain block W_d (K columns):
//
//   v1 = f(W_v v0 + W_d d + b)
//
// With d = e_j the term W_d d is column j of W_d, i.e. each domain gets its
// own first-layer bias W_d[:, j] + b.  The pre-activation is computed in that
// form (acoustic product, then the selected column, then b), so a network
// whose W_d is zero produces bit-identical outputs to the same network
// without the domain input.

#ifndef LDADNN_NETWORK_H_
#define LDADNN_NETWORK_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ldadnn/io.h"

namespace ldadnn {

enum class Activation { kSigmoid, kRelu };

std::string ActivationName(Activation a);
Activation ActivationFromName(const std::string &name);

struct NetworkConfig {
  int input_dim = 1;
  int domain_dim = 0;  // K; 0 is the baseline network
  std::vector<int> hidden_dims = {64, 64};
  int output_dim = 1;
  Activation activation = Activation::kSigmoid;
  uint64_t seed = 0;
};

struct Layer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;
};

class LdatNetwork {
 public:
  // Glorot-uniform weights, zero biases, seeded by config.seed.
  explicit LdatNetwork(const NetworkConfig &config);
  // Takes given parameters; checks shapes and finiteness against `config`.
  LdatNetwork(const NetworkConfig &config, std::vector<Layer> layers);

  const NetworkConfig &config() const { return config_; }
  int InputDim() const { return config_.input_dim; }
  int DomainDim() const { return config_.domain_dim; }
  int OutputDim() const { return config_.output_dim; }
  int NumLayers() const { return static_cast<int>(layers_.size()); }
  // First-layer input width: input_dim + domain_dim.
  int FirstLayerWidth() const { return config_.input_dim + config_.domain_dim; }

  const std::vector<Layer> &layers() const { return layers_; }
  std::vector<Layer> &mutable_layers() { return layers_; }

  using ConstColumns =
      Eigen::Block<const Eigen::MatrixXd, Eigen::Dynamic, Eigen::Dynamic, true>;

  // Blocks of the first-layer weight.
  ConstColumns AcousticWeights() const {
    return layers_.front().weight.leftCols(config_.input_dim);
  }
  ConstColumns DomainWeights() const {
    return layers_.front().weight.rightCols(config_.domain_dim);
  }

  int64_t NumParameters() const;

  Json ToJson() const;
  static LdatNetwork FromJson(const Json &json);

 private:
  NetworkConfig config_;
  std::vector<Layer> layers_;
};

// Checks that `ubic` is present exactly when the network has a domain input
// and is then one-hot of the right length.  Returns the hot index, or -1 for
// a baseline network.
int CheckUbic(const LdatNetwork &net, std::span<const double> ubic);

// W_v v0 + W_d d + b.
Eigen::VectorXd FirstLayerPreactivation(const LdatNetwork &net,
                                        Eigen::Ref<const Eigen::VectorXd> features,
                                        std::span<const double> ubic = {});

// Pre-activations of every layer, first to output (before softmax).
std::vector<Eigen::VectorXd> Preactivations(const LdatNetwork &net,
                                            Eigen::Ref<const Eigen::VectorXd> features,
                                            std::span<const double> ubic = {});

// Softmax output probabilities.
Eigen::VectorXd Forward(const LdatNetwork &net, Eigen::Ref<const Eigen::VectorXd> features,
                        std::span<const double> ubic = {});

// Adds a K-column domain block to a baseline network: W_v and every other
// parameter are copied, W_d starts at zero.  `seed` becomes the new
// network's seed.
LdatNetwork InitAugmentedFromBaseline(const LdatNetwork &baseline, int num_domains,
                                      uint64_t seed);

// Frames in columns-per-example form.  `domains` is empty for baseline data,
// otherwise one domain index per frame.
struct FrameDataset {
  Eigen::MatrixXd features;  // input_dim x N
  std::vector<int> domains;
  int num_domains = 0;
  std::vector<int> labels;

  int Size() const { return static_cast<int>(labels.size()); }
  // Same frames, domain input removed.
  FrameDataset WithoutDomains() const;
  FrameDataset Subset(const std::vector<int> &indices) const;
};

void CheckDataset(const LdatNetwork &net, const FrameDataset &data);

struct TrainConfig {
  double learning_rate = 0.1;
  int batch_size = 32;
  int epochs = 20;
  // Halve the learning rate after an epoch whose held-out loss went up.
  bool halve_on_increase = false;
  uint64_t seed = 0;  // minibatch order
};

struct EpochMetrics {
  int epoch = 0;
  double learning_rate = 0.0;
  double train_loss = 0.0;  // mean cross-entropy over the training set
  double cv_loss = 0.0;
  double cv_accuracy = 0.0;  // NaN when no held-out set is given
};

struct TrainResult {
  LdatNetwork net;
  std::vector<EpochMetrics> metrics;
};

// Minibatch SGD on mean per-frame cross-entropy.  Metrics are evaluated
// after each epoch over the full sets in a fixed order.
TrainResult Train(LdatNetwork net, const FrameDataset &train,
                  const FrameDataset &heldout, const TrainConfig &config);

double MeanCrossEntropy(const LdatNetwork &net, const FrameDataset &data);
double FrameAccuracy(const LdatNetwork &net, const FrameDataset &data);
std::vector<int> Predict(const LdatNetwork &net, const FrameDataset &data);

// Analytic gradient of the mean cross-entropy over `indices` of `data`, in
// the same shapes as the network's layers.
std::vector<Layer> Gradients(const LdatNetwork &net, const FrameDataset &data,
                             const std::vector<int> &indices);

// Compares the analytic gradient for one example against central finite
// differences over every parameter (W_d included).  Per parameter the error
// is |analytic - numeric| / max(|analytic|, |numeric|, 1e-3); returns the
// largest.
double GradientCheck(const LdatNetwork &net, Eigen::Ref<const Eigen::VectorXd> features,
                     std::span<const double> ubic, int label, double epsilon);

// epoch,train_loss,cv_accuracy
std::string MetricsCsv(const std::vector<EpochMetrics> &metrics,
                       const ArtifactMeta *meta = nullptr);

}  // namespace ldadnn

#endif  // LDADNN_NETWORK_H_
