// tests/test_network.cc


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


#include <cmath>
#include <vector>

#include "doctest.h"
#include "ldadnn/common.h"
#include "ldadnn/domains.h"
#include "ldadnn/network.h"
#include "ldadnn/rng.h"
#include "ldadnn/synthetic.h"
#include "oracles.h"

using namespace ldadnn;

namespace {

NetworkConfig SmallConfig(Rng *rng, int domain_dim, Activation act = Activation::kSigmoid) {
  NetworkConfig cfg;
  cfg.input_dim = 1 + static_cast<int>(rng->UniformInt(10));
  cfg.domain_dim = domain_dim;
  cfg.hidden_dims.clear();
  const int depth = static_cast<int>(rng->UniformInt(3));
  for (int l = 0; l < depth; ++l) cfg.hidden_dims.push_back(1 + static_cast<int>(rng->UniformInt(10)));
  cfg.output_dim = 2 + static_cast<int>(rng->UniformInt(9));
  cfg.activation = act;
  cfg.seed = rng->NextU64();
  return cfg;
}

// Random non-zero parameters everywhere, W_d included.
LdatNetwork RandomNet(Rng *rng, const NetworkConfig &cfg) {
  LdatNetwork net(cfg);
  for (auto &layer : net.mutable_layers()) {
    for (Eigen::Index i = 0; i < layer.weight.size(); ++i) layer.weight.data()[i] = rng->Normal();
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias[i] = rng->Normal(0.0, 0.5);
  }
  return net;
}

Eigen::VectorXd RandomVector(Rng *rng, int n) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng->Normal();
  return v;
}

}  // namespace

TEST_CASE("baseline forward is a softmax over the layers") {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto cfg = SmallConfig(&rng, 0);
    const auto net = RandomNet(&rng, cfg);
    const auto x = RandomVector(&rng, cfg.input_dim);
    const auto p = Forward(net, x);
    CHECK(std::abs(p.sum() - 1.0) <= 1e-9);
    // Direct evaluation of the layer recursion.
    Eigen::VectorXd a = x;
    for (int l = 0; l < net.NumLayers(); ++l) {
      Eigen::VectorXd z = net.layers()[l].weight * a + net.layers()[l].bias;
      if (l + 1 < net.NumLayers())
        a = (1.0 / (1.0 + (-z.array()).exp())).matrix();
      else
        a = (z.array() - z.maxCoeff()).exp().matrix();
    }
    a /= a.sum();
    CHECK((a - p).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("zero W_d reproduces the baseline") {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto cfg = SmallConfig(&rng, 0);
    const auto base = RandomNet(&rng, cfg);
    const int K = 1 + static_cast<int>(rng.UniformInt(6));
    const auto aug = InitAugmentedFromBaseline(base, K, 9);
    CHECK(aug.FirstLayerWidth() == cfg.input_dim + K);
    CHECK(aug.DomainWeights().cwiseAbs().maxCoeff() == 0.0);
    const auto x = RandomVector(&rng, cfg.input_dim);
    const auto u = UbicFromIndex(static_cast<int>(rng.UniformInt(K)), K);
    CHECK((Forward(aug, x, u.code) - Forward(base, x)).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("one-hot input selects a W_d column") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int K = 2 + static_cast<int>(rng.UniformInt(6));
    const auto cfg = SmallConfig(&rng, K);
    const auto net = RandomNet(&rng, cfg);
    const auto x = RandomVector(&rng, cfg.input_dim);
    const auto &W = net.layers()[0].weight;
    const int j = static_cast<int>(rng.UniformInt(K));
    const auto u = UbicFromIndex(j, K);
    const Eigen::VectorXd want =
        W.leftCols(cfg.input_dim) * x + W.col(cfg.input_dim + j) + net.layers()[0].bias;
    CHECK((FirstLayerPreactivation(net, x, u.code) - want).cwiseAbs().maxCoeff() <= 1e-12);

    const int i = (j + 1) % K;
    const Eigen::VectorXd delta = FirstLayerPreactivation(net, x, UbicFromIndex(j, K).code) -
                                  FirstLayerPreactivation(net, x, UbicFromIndex(i, K).code);
    const Eigen::VectorXd col_diff = W.col(cfg.input_dim + j) - W.col(cfg.input_dim + i);
    CHECK((delta - col_diff).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("augmentation widths") {
  NetworkConfig cfg;
  cfg.input_dim = 440;
  cfg.hidden_dims = {8};
  cfg.output_dim = 3;
  const LdatNetwork base(cfg);
  CHECK(InitAugmentedFromBaseline(base, 64, 1).FirstLayerWidth() == 504);
  const auto one = InitAugmentedFromBaseline(base, 1, 1);
  CHECK(one.FirstLayerWidth() == 441);
  CHECK(one.DomainWeights().cols() == 1);
  CHECK(one.DomainWeights().cwiseAbs().maxCoeff() == 0.0);
  CHECK((one.layers()[0].bias - base.layers()[0].bias).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(InitAugmentedFromBaseline(one, 4, 1), Error);
}

TEST_CASE("malformed domain codes are rejected") {
  NetworkConfig cfg;
  cfg.input_dim = 2;
  cfg.domain_dim = 3;
  cfg.hidden_dims = {};
  cfg.output_dim = 2;
  const LdatNetwork net(cfg);
  const Eigen::VectorXd x = Eigen::VectorXd::Zero(2);
  std::vector<double> two_hot = {1, 1, 0}, none = {0, 0, 0}, frac = {0.5, 0.5, 0}, short_code = {1, 0};
  CHECK_THROWS_AS(Forward(net, x, two_hot), Error);
  CHECK_THROWS_AS(Forward(net, x, none), Error);
  CHECK_THROWS_AS(Forward(net, x, frac), Error);
  CHECK_THROWS_AS(Forward(net, x, short_code), Error);
  CHECK_THROWS_AS(Forward(net, x), Error);
  CHECK_THROWS_AS(Forward(net, Eigen::VectorXd::Zero(3), UbicFromIndex(0, 3).code), Error);
}

TEST_CASE("gradient check on random small networks") {
  Rng rng(4);
  for (int trial = 0; trial < 60; ++trial) {
    const int K = trial % 3 == 0 ? 0 : 1 + static_cast<int>(rng.UniformInt(5));
    const auto cfg = SmallConfig(&rng, K);
    const auto net = RandomNet(&rng, cfg);
    const auto x = RandomVector(&rng, cfg.input_dim);
    std::vector<double> code;
    if (K > 0) code = UbicFromIndex(static_cast<int>(rng.UniformInt(K)), K).code;
    const int label = static_cast<int>(rng.UniformInt(cfg.output_dim));
    CHECK(GradientCheck(net, x, code, label, 1e-5) < 1e-5);
  }
}

TEST_CASE("relu gradient check away from kinks") {
  Rng rng(5);
  int checked = 0;
  for (int trial = 0; trial < 200 && checked < 30; ++trial) {
    const int K = 1 + static_cast<int>(rng.UniformInt(4));
    const auto cfg = SmallConfig(&rng, K, Activation::kRelu);
    const auto net = RandomNet(&rng, cfg);
    const auto x = RandomVector(&rng, cfg.input_dim);
    const auto code = UbicFromIndex(static_cast<int>(rng.UniformInt(K)), K).code;
    const auto z = Preactivations(net, x, code);
    double nearest = 1e9;
    for (size_t l = 0; l + 1 < z.size(); ++l) nearest = std::min(nearest, z[l].cwiseAbs().minCoeff());
    if (nearest < 1e-3) continue;
    ++checked;
    CHECK(GradientCheck(net, x, code, 0, 1e-5) < 1e-5);
  }
  CHECK(checked >= 30);
}

TEST_CASE("W_d gradient touches only the selected column") {
  Rng rng(6);
  const int K = 5;
  const auto cfg = SmallConfig(&rng, K);
  const auto net = RandomNet(&rng, cfg);
  FrameDataset data;
  data.features = Eigen::MatrixXd::Random(cfg.input_dim, 1);
  data.num_domains = K;
  data.domains = {3};
  data.labels = {1};
  const auto grads = Gradients(net, data, {0});
  const auto &g = grads[0].weight;
  for (int k = 0; k < K; ++k) {
    const double norm = g.col(cfg.input_dim + k).cwiseAbs().maxCoeff();
    if (k == 3)
      CHECK(norm > 0.0);
    else
      CHECK(norm == 0.0);
  }
}

TEST_CASE("training on separable data") {
  Rng rng(7);
  auto sample = [&](int n) {
    FrameDataset d;
    d.features.resize(2, n);
    for (int i = 0; i < n; ++i) {
      const int y = static_cast<int>(rng.UniformInt(2));
      d.features(0, i) = rng.Normal(y == 0 ? -3.0 : 3.0, 1.0);
      d.features(1, i) = rng.Normal();
      d.labels.push_back(y);
    }
    return d;
  };
  const auto train = sample(1000), heldout = sample(500);
  NetworkConfig cfg;
  cfg.input_dim = 2;
  cfg.hidden_dims = {};
  cfg.output_dim = 2;
  TrainConfig tc;
  tc.epochs = 50;
  const auto result = Train(LdatNetwork(cfg), train, heldout, tc);
  CHECK(result.metrics.size() == 50);
  CHECK(FrameAccuracy(result.net, heldout) >= 0.99);

  tc.learning_rate = 0.0;
  tc.epochs = 3;
  const LdatNetwork start(cfg);
  const auto frozen = Train(start, train, heldout, tc);
  CHECK((frozen.net.layers()[0].weight - start.layers()[0].weight).cwiseAbs().maxCoeff() == 0.0);
  CHECK(frozen.metrics[0].train_loss == frozen.metrics[2].train_loss);

  // Unbounded activations with huge inputs and step size overflow.
  auto wild = train;
  wild.features *= 1e150;
  cfg.hidden_dims = {8};
  cfg.activation = Activation::kRelu;
  tc.learning_rate = 1e150;
  tc.epochs = 5;
  try {
    Train(LdatNetwork(cfg), wild, FrameDataset{}, tc);
    FAIL("expected a numerical error");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kNumerical);
  }
}

TEST_CASE("domain input helps on a domain-shift task") {
  DomainShiftSpec spec;
  const auto task = MakeDomainShiftTask(spec, 3);
  const auto train = SampleShiftedFrames(task, 4000, 4);
  const auto test = SampleShiftedFrames(task, 2000, 5);
  NetworkConfig cfg;
  cfg.input_dim = spec.dim;
  cfg.hidden_dims = {32};
  cfg.output_dim = spec.num_classes;
  cfg.seed = 1;
  TrainConfig tc;
  tc.epochs = 15;
  const auto base = Train(LdatNetwork(cfg), train.WithoutDomains(), test.WithoutDomains(), tc);
  auto aug_cfg = cfg;
  aug_cfg.domain_dim = spec.num_domains;
  const auto aug = Train(LdatNetwork(aug_cfg), train, test, tc);
  CHECK(FrameAccuracy(aug.net, test) > FrameAccuracy(base.net, test.WithoutDomains()));
}

TEST_CASE("network json round trip and metrics csv") {
  Rng rng(8);
  const auto cfg = SmallConfig(&rng, 3, Activation::kRelu);
  const auto net = RandomNet(&rng, cfg);
  const auto back = LdatNetwork::FromJson(Json::parse(net.ToJson().dump()));
  CHECK(back.config().activation == Activation::kRelu);
  CHECK(back.DomainDim() == 3);
  for (int l = 0; l < net.NumLayers(); ++l)
    CHECK((back.layers()[l].weight - net.layers()[l].weight).cwiseAbs().maxCoeff() == 0.0);
  std::vector<EpochMetrics> m = {{1, 0.1, 0.5, 0.6, 0.75}};
  const auto csv = MetricsCsv(m);
  CHECK(csv.rfind("epoch,train_loss,cv_accuracy\n", 0) == 0);
  CHECK(csv.find("1,0.5,0.75") != std::string::npos);
}
