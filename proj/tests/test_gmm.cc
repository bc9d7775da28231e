// tests/test_gmm.cc


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
#include <numeric>
#include <vector>

#include "doctest.h"
#include "ldadnn/common.h"
#include "ldadnn/gmm.h"
#include "ldadnn/rng.h"
#include "ldadnn/synthetic.h"
#include "oracles.h"

using namespace ldadnn;

namespace {

GmmModel RandomModel(Rng *rng, int V, int D) {
  std::vector<double> ones(V, 1.0);
  auto w = rng->Dirichlet(ones);
  Eigen::VectorXd weights(V);
  for (int i = 0; i < V; ++i) weights[i] = std::max(w[i], 1e-3);
  weights /= weights.sum();
  GmmModel::Matrix means(V, D), vars(V, D);
  for (int i = 0; i < V; ++i)
    for (int d = 0; d < D; ++d) {
      means(i, d) = rng->Normal(0.0, 2.0);
      vars(i, d) = rng->Uniform(0.3, 3.0);
    }
  return GmmModel(weights, means, vars);
}

Eigen::MatrixXd ThreeCenters() {
  Eigen::MatrixXd centers(3, 2);
  centers << 0.0, 0.0, 12.0, 0.0, 0.0, 12.0;
  return centers;
}

}  // namespace

TEST_CASE("three separated clusters are recovered") {
  std::vector<int> truth;
  const auto centers = ThreeCenters();
  auto frames = SampleGaussianClusters(centers, 1.0, 1000, 5, &truth);
  auto model = TrainGmm(frames, 3);
  auto match = oracle::GreedyMatch(
      [&](int t, int f) { return (centers.row(t) - model.means().row(f)).norm(); }, 3);
  for (int c = 0; c < 3; ++c)
    for (int d = 0; d < 2; ++d)
      CHECK(std::abs(model.means()(match[c], d) - centers(c, d)) < 0.1);
}

TEST_CASE("one component is the sample mean and variance") {
  Rng rng(2);
  FrameMatrix frames(500, 3);
  for (int n = 0; n < 500; ++n)
    for (int d = 0; d < 3; ++d) frames(n, d) = rng.Normal(d, 1.0 + d);
  auto model = TrainGmm(frames, 1);
  const Eigen::RowVectorXd mean = frames.colwise().mean();
  const Eigen::RowVectorXd var =
      (frames.rowwise() - mean).array().square().colwise().sum() / frames.rows();
  CHECK(model.weights()[0] == 1.0);
  for (int d = 0; d < 3; ++d) {
    CHECK(model.means()(0, d) == doctest::Approx(mean[d]).epsilon(1e-10));
    CHECK(model.variances()(0, d) == doctest::Approx(var[d]).epsilon(1e-10));
  }
}

TEST_CASE("training rejects too few frames and bad values") {
  FrameMatrix two(2, 1);
  two << 0.0, 1.0;
  try {
    TrainGmm(two, 3);
    FAIL("expected precondition error");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kPrecondition);
  }
  FrameMatrix bad(4, 1);
  bad << 0.0, 1.0, std::nan(""), 2.0;
  CHECK_THROWS_AS(TrainGmm(bad, 1), Error);
}

TEST_CASE("responsibilities: degenerate and symmetric models") {
  GmmModel one(Eigen::VectorXd::Ones(1), GmmModel::Matrix::Zero(1, 2),
               GmmModel::Matrix::Ones(1, 2));
  Eigen::VectorXd x(2);
  x << 3.0, -4.0;
  auto r1 = Responsibilities(one, x);
  CHECK(r1.size() == 1);
  CHECK(r1[0] == 1.0);

  GmmModel::Matrix means(2, 2);
  means << 1.5, -0.5, -1.5, 0.5;
  GmmModel sym(Eigen::VectorXd::Constant(2, 0.5), means, GmmModel::Matrix::Constant(2, 2, 0.7));
  auto r2 = Responsibilities(sym, Eigen::VectorXd::Zero(2));
  CHECK(std::abs(r2[0] - 0.5) <= 1e-12);
  CHECK(std::abs(r2[1] - 0.5) <= 1e-12);

  CHECK_THROWS_AS(Responsibilities(sym, Eigen::VectorXd::Zero(3)), Error);
}

TEST_CASE("responsibilities match the direct density ratio") {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const auto model = RandomModel(&rng, 3, 4);
    Eigen::VectorXd x(4);
    for (int d = 0; d < 4; ++d) x[d] = rng.Normal(0.0, 2.0);
    const auto want = oracle::DirectResponsibilities(model, x);
    const auto got = Responsibilities(model, x);
    CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(std::abs(got.sum() - 1.0) <= 1e-9);
  }
}

TEST_CASE("quantize at the means and on ties") {
  GmmModel::Matrix means(3, 2);
  means << 0, 0, 20, 0, 0, 20;
  GmmModel model(Eigen::VectorXd::Constant(3, 1.0 / 3), means, GmmModel::Matrix::Ones(3, 2));
  FeatureDocument doc{"x", std::nullopt, FrameMatrix(3, 2), {}};
  doc.frames << 20, 0, 0, 20, 0, 0;
  CHECK(Quantize(model, doc).symbols == std::vector<int32_t>{1, 2, 0});

  // Components 1 and 4 coincide; 0, 2, 3 are far away.
  GmmModel::Matrix tm(5, 1);
  tm << -50, 3, 40, 90, 3;
  GmmModel tie(Eigen::VectorXd::Constant(5, 0.2), tm, GmmModel::Matrix::Ones(5, 1));
  FeatureDocument t{"t", std::nullopt, FrameMatrix::Constant(1, 1, 3.0), {}};
  const auto r = Responsibilities(tie, Eigen::VectorXd::Constant(1, 3.0));
  CHECK(r[1] == r[4]);
  CHECK(Quantize(tie, t).symbols == std::vector<int32_t>{1});
}

TEST_CASE("quantize is the argmax of the oracle responsibilities") {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto model = RandomModel(&rng, 5, 3);
    FeatureDocument doc{"r", std::nullopt, FrameMatrix(40, 3), {}};
    for (int t = 0; t < 40; ++t)
      for (int d = 0; d < 3; ++d) doc.frames(t, d) = rng.Normal(0.0, 3.0);
    const auto symbols = Quantize(model, doc).symbols;
    for (int t = 0; t < 40; ++t) {
      const auto r = oracle::DirectResponsibilities(model, doc.frames.row(t).transpose());
      Eigen::Index best;
      r.maxCoeff(&best);
      CHECK(symbols[t] == best);
    }
  }
}

TEST_CASE("quantization is permutation equivariant") {
  Rng rng(8);
  const auto model = RandomModel(&rng, 6, 2);
  const std::vector<int> perm = {3, 0, 5, 1, 4, 2};
  const auto permuted = model.Permuted(perm);
  std::vector<int> inverse(6);
  for (int j = 0; j < 6; ++j) inverse[perm[j]] = j;
  FeatureDocument doc{"p", std::nullopt, FrameMatrix(100, 2), {}};
  for (int t = 0; t < 100; ++t)
    for (int d = 0; d < 2; ++d) doc.frames(t, d) = rng.Normal(0.0, 3.0);
  const auto a = Quantize(model, doc).symbols;
  const auto b = Quantize(permuted, doc).symbols;
  for (int t = 0; t < 100; ++t) CHECK(b[t] == inverse[a[t]]);
}

TEST_CASE("EM is monotone within a component count and respects the floor") {
  Rng rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    FrameMatrix frames(400, 2);
    for (int n = 0; n < 400; ++n)
      for (int d = 0; d < 2; ++d) frames(n, d) = rng.Normal(3.0 * (n % 4), 1.0);
    const auto result = TrainGmmWithHistory(frames, 8);
    CHECK(result.model.NumComponents() == 8);
    for (size_t i = 1; i < result.history.size(); ++i) {
      const auto &prev = result.history[i - 1];
      const auto &cur = result.history[i];
      if (prev.segment == cur.segment)
        CHECK(cur.avg_log_likelihood * 400 >= prev.avg_log_likelihood * 400 - 1e-8);
    }
    for (int i = 0; i < 8; ++i)
      for (int d = 0; d < 2; ++d)
        CHECK(result.model.variances()(i, d) >= result.variance_floor[d]);
    CHECK(std::abs(result.model.weights().sum() - 1.0) <= 1e-9);
  }
}

TEST_CASE("variance floor holds on duplicated frames") {
  FrameMatrix frames(60, 1);
  for (int n = 0; n < 60; ++n) frames(n, 0) = n < 30 ? 0.0 : static_cast<double>(n);
  const auto result = TrainGmmWithHistory(frames, 4);
  for (int i = 0; i < 4; ++i) CHECK(result.model.variances()(i, 0) >= result.variance_floor[0]);
}

TEST_CASE("threaded training matches single thread closely") {
  std::vector<int> truth;
  auto frames = SampleGaussianClusters(ThreeCenters(), 1.0, 300, 3, &truth);
  GmmConfig cfg;
  auto a = TrainGmm(frames, 4, cfg);
  cfg.threads = 4;
  auto b = TrainGmm(frames, 4, cfg);
  CHECK((a.means() - b.means()).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("model json round trip and validation") {
  Rng rng(4);
  const auto model = RandomModel(&rng, 4, 3);
  const auto back = GmmModel::FromJson(Json::parse(model.ToJson().dump()));
  CHECK((back.means() - model.means()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.variances() - model.variances()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.weights() - model.weights()).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(GmmModel(Eigen::VectorXd::Constant(2, 0.4), GmmModel::Matrix::Zero(2, 1),
                           GmmModel::Matrix::Ones(2, 1)),
                  Error);
  CHECK_THROWS_AS(GmmModel(Eigen::VectorXd::Ones(1), GmmModel::Matrix::Zero(1, 1),
                           GmmModel::Matrix::Zero(1, 1)),
                  Error);
}

TEST_CASE("quantize checks the frame dimension") {
  GmmModel model(Eigen::VectorXd::Ones(1), GmmModel::Matrix::Zero(1, 2),
                 GmmModel::Matrix::Ones(1, 2));
  FeatureDocument doc{"x", std::nullopt, FrameMatrix::Zero(2, 3), {}};
  CHECK_THROWS_AS(Quantize(model, doc), Error);
  CHECK_THROWS_AS(QuantizeAll(model, {doc}, 2), Error);
}
