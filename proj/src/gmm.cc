// ldadnn/gmm.cc

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

#include "ldadnn/gmm.h"

#include <cmath>
#include <numbers>

#include "ldadnn/common.h"
#include "ldadnn/math.h"
#include "ldadnn/parallel.h"

namespace ldadnn {

GmmModel::GmmModel(Eigen::VectorXd weights, Matrix means, Matrix variances)
    : weights_(std::move(weights)),
      means_(std::move(means)),
      variances_(std::move(variances)) {
  const Eigen::Index V = weights_.size();
  if (V < 1) throw Error(ErrorCode::kPrecondition, "GMM needs at least one component");
  if (means_.rows() != V || variances_.rows() != V ||
      means_.cols() != variances_.cols() || means_.cols() < 1)
    throw Error(ErrorCode::kDimensionMismatch, "GMM parameter shapes disagree");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < V; ++i) {
    if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i]))
      throw Error(ErrorCode::kPrecondition,
                  "GMM weight " + std::to_string(i) + " is not positive");
    sum += weights_[i];
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw Error(ErrorCode::kPrecondition, "GMM weights do not sum to 1");
  if (!means_.allFinite())
    throw Error(ErrorCode::kNonFinite, "GMM means must be finite");
  if (!variances_.allFinite() || !(variances_.array() > 0.0).all())
    throw Error(ErrorCode::kPrecondition, "GMM variances must be positive and finite");

  const double D = static_cast<double>(means_.cols());
  const double log_2pi = std::log(2.0 * std::numbers::pi);
  inv_variances_ = variances_.cwiseInverse();
  log_const_.resize(V);
  for (Eigen::Index i = 0; i < V; ++i)
    log_const_[i] = std::log(weights_[i]) -
                    0.5 * (D * log_2pi + variances_.row(i).array().log().sum());
}

void GmmModel::LogJoint(const double *frame, double *out) const {
  const Eigen::Index V = weights_.size();
  const Eigen::Index D = means_.cols();
  for (Eigen::Index i = 0; i < V; ++i) {
    const double *mu = means_.row(i).data();
    const double *iv = inv_variances_.row(i).data();
    double quad = 0.0;
    for (Eigen::Index d = 0; d < D; ++d) {
      const double diff = frame[d] - mu[d];
      quad += diff * diff * iv[d];
    }
    out[i] = log_const_[i] - 0.5 * quad;
  }
}

double GmmModel::LogLikelihood(Eigen::Ref<const Eigen::VectorXd> frame) const {
  if (frame.size() != Dim())
    throw Error(ErrorCode::kDimensionMismatch, "frame dimension does not match GMM");
  std::vector<double> lj(NumComponents());
  LogJoint(frame.data(), lj.data());
  return LogSumExp(lj);
}

GmmModel GmmModel::Permuted(const std::vector<int> &perm) const {
  const int V = NumComponents();
  if (static_cast<int>(perm.size()) != V)
    throw Error(ErrorCode::kDimensionMismatch, "permutation size differs from V");
  Eigen::VectorXd w(V);
  Matrix mu(V, Dim()), var(V, Dim());
  for (int j = 0; j < V; ++j) {
    w[j] = weights_[perm[j]];
    mu.row(j) = means_.row(perm[j]);
    var.row(j) = variances_.row(perm[j]);
  }
  return GmmModel(std::move(w), std::move(mu), std::move(var));
}

Json GmmModel::ToJson() const {
  Json means = Json::array(), vars = Json::array();
  for (int i = 0; i < NumComponents(); ++i) {
    means.push_back(std::vector<double>(means_.row(i).begin(), means_.row(i).end()));
    vars.push_back(
        std::vector<double>(variances_.row(i).begin(), variances_.row(i).end()));
  }
  return Json{{"D", Dim()},
              {"V", NumComponents()},
              {"weights", std::vector<double>(weights_.begin(), weights_.end())},
              {"means", std::move(means)},
              {"variances", std::move(vars)}};
}

GmmModel GmmModel::FromJson(const Json &json) {
  try {
    const int D = json.at("D").get<int>();
    const int V = json.at("V").get<int>();
    if (D < 1 || V < 1) throw Error(ErrorCode::kParse, "GMM D and V must be >= 1");
    const Json &w = json.at("weights");
    const Json &mu = json.at("means");
    const Json &var = json.at("variances");
    if (static_cast<int>(w.size()) != V || static_cast<int>(mu.size()) != V ||
        static_cast<int>(var.size()) != V)
      throw Error(ErrorCode::kDimensionMismatch, "GMM arrays do not have V rows");
    Eigen::VectorXd weights(V);
    Matrix means(V, D), variances(V, D);
    for (int i = 0; i < V; ++i) {
      weights[i] = JsonToDouble(w[i]);
      if (static_cast<int>(mu[i].size()) != D || static_cast<int>(var[i].size()) != D)
        throw Error(ErrorCode::kDimensionMismatch, "GMM rows do not have D columns");
      for (int d = 0; d < D; ++d) {
        means(i, d) = JsonToDouble(mu[i][d]);
        variances(i, d) = JsonToDouble(var[i][d]);
      }
    }
    return GmmModel(std::move(weights), std::move(means), std::move(variances));
  } catch (const Json::exception &e) {
    throw Error(ErrorCode::kParse, std::string("malformed GMM JSON: ") + e.what());
  }
}

namespace {

using Matrix = GmmModel::Matrix;

struct Params {
  std::vector<double> weights;
  Matrix means;
  Matrix variances;

  int Size() const { return static_cast<int>(weights.size()); }

  GmmModel ToModel() const {
    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(weights.data(), Size());
    return GmmModel(std::move(w), means, variances);
  }

  int Heaviest() const {
    int best = 0;
    for (int i = 1; i < Size(); ++i)
      if (weights[i] > weights[best]) best = i;
    return best;
  }

  // Splits component `src` into itself and `dst`: weights halved, means
  // moved apart by +/- offset standard deviations.  `dst` may be a new
  // index equal to Size().
  void Split(int src, int dst, double offset) {
    if (dst == Size()) {
      weights.push_back(0.0);
      means.conservativeResize(dst + 1, Eigen::NoChange);
      variances.conservativeResize(dst + 1, Eigen::NoChange);
    }
    const Eigen::RowVectorXd delta =
        offset * variances.row(src).array().sqrt().matrix();
    weights[src] *= 0.5;
    weights[dst] = weights[src];
    variances.row(dst) = variances.row(src);
    means.row(dst) = means.row(src) - delta;
    means.row(src) += delta;
  }
};

struct Accumulator {
  Eigen::VectorXd occ;
  Matrix sum_x;
  Matrix sum_x2;
  double log_like = 0.0;

  Accumulator(int V, int D)
      : occ(Eigen::VectorXd::Zero(V)),
        sum_x(Matrix::Zero(V, D)),
        sum_x2(Matrix::Zero(V, D)) {}

  void Add(const Accumulator &other) {
    occ += other.occ;
    sum_x += other.sum_x;
    sum_x2 += other.sum_x2;
    log_like += other.log_like;
  }
};

// One EM pass.  Returns the average per-frame log-likelihood of the
// parameters before the update and whether any component had to be
// re-seeded.
double EmPass(const FrameMatrix &frames, const Eigen::VectorXd &floor,
              const GmmConfig &config, Params *params, bool *reseeded) {
  const GmmModel model = params->ToModel();
  const int V = params->Size();
  const int D = static_cast<int>(frames.cols());
  const size_t N = static_cast<size_t>(frames.rows());

  std::vector<Accumulator> partial(NumChunks(N, config.threads), Accumulator(V, D));
  ParallelChunks(N, config.threads, [&](size_t chunk, size_t begin, size_t end) {
    Accumulator &acc = partial[chunk];
    std::vector<double> lj(V);
    for (size_t n = begin; n < end; ++n) {
      const double *x = frames.row(static_cast<Eigen::Index>(n)).data();
      model.LogJoint(x, lj.data());
      const double lse = LogSumExp(lj);
      acc.log_like += lse;
      for (int i = 0; i < V; ++i) {
        const double post = std::exp(lj[i] - lse);
        if (post == 0.0) continue;
        acc.occ[i] += post;
        for (int d = 0; d < D; ++d) {
          acc.sum_x(i, d) += post * x[d];
          acc.sum_x2(i, d) += post * x[d] * x[d];
        }
      }
    }
  });
  Accumulator total(V, D);
  for (const auto &p : partial) total.Add(p);

  const double avg = total.log_like / static_cast<double>(N);
  if (!std::isfinite(avg))
    throw Error(ErrorCode::kNumerical,
                "GMM EM produced a non-finite log-likelihood with " +
                    std::to_string(V) + " components");

  const double occ_sum = total.occ.sum();
  std::vector<int> empty;
  for (int i = 0; i < V; ++i) {
    const double occ = total.occ[i];
    if (occ < config.empty_mass) {
      empty.push_back(i);
      params->weights[i] = 0.0;
      continue;
    }
    params->weights[i] = occ / occ_sum;
    for (int d = 0; d < D; ++d) {
      const double mean = total.sum_x(i, d) / occ;
      const double var = total.sum_x2(i, d) / occ - mean * mean;
      params->means(i, d) = mean;
      params->variances(i, d) = std::max(var, floor[d]);
    }
  }
  for (int i : empty) params->Split(params->Heaviest(), i, config.split_offset);
  *reseeded = !empty.empty();
  if (*reseeded) {
    double w_sum = 0.0;
    for (double w : params->weights) w_sum += w;
    for (double &w : params->weights) w /= w_sum;
  }
  return avg;
}

}  // namespace

GmmTrainResult TrainGmmWithHistory(const FrameMatrix &frames,
                                   int target_components,
                                   const GmmConfig &config) {
  const Eigen::Index N = frames.rows();
  const Eigen::Index D = frames.cols();
  if (target_components < 1)
    throw Error(ErrorCode::kPrecondition, "GMM needs at least one component");
  if (N < target_components)
    throw Error(ErrorCode::kPrecondition,
                "GMM training needs at least V frames (have " + std::to_string(N) +
                    ", V = " + std::to_string(target_components) + ")");
  if (D < 1) throw Error(ErrorCode::kPrecondition, "frames have zero dimension");
  if (!frames.allFinite())
    throw Error(ErrorCode::kNonFinite, "GMM training frames must be finite");

  const Eigen::RowVectorXd mean = frames.colwise().mean();
  const Eigen::RowVectorXd var =
      (frames.rowwise() - mean).array().square().colwise().mean();
  Eigen::VectorXd floor(D);
  for (Eigen::Index d = 0; d < D; ++d)
    floor[d] = std::max(config.variance_floor_scale * var[d], 1e-12);

  Params params;
  params.weights = {1.0};
  params.means = mean;
  params.variances.resize(1, D);
  for (Eigen::Index d = 0; d < D; ++d)
    params.variances(0, d) = std::max(var[d], floor[d]);

  std::vector<GmmIterationStats> history;
  int segment = 0;
  auto pass = [&]() {
    bool reseeded = false;
    const int size = params.Size();
    const double ll = EmPass(frames, floor, config, &params, &reseeded);
    history.push_back({size, segment, ll});
    if (reseeded) ++segment;
    return ll;
  };

  while (params.Size() < target_components) {
    params.Split(params.Heaviest(), params.Size(), config.split_offset);
    ++segment;
    for (int it = 0; it < config.iters_per_split; ++it) pass();
  }

  double prev = pass();
  for (int it = 1; it < config.final_max_iters; ++it) {
    const int seg = segment;
    const double ll = pass();
    if (seg == segment && std::abs(ll - prev) <= config.final_rel_tol * std::abs(prev))
      break;
    prev = ll;
  }

  return GmmTrainResult{params.ToModel(), std::move(history), std::move(floor)};
}

GmmModel TrainGmm(const FrameMatrix &frames, int target_components,
                  const GmmConfig &config) {
  return TrainGmmWithHistory(frames, target_components, config).model;
}

Eigen::VectorXd Responsibilities(const GmmModel &model,
                                 Eigen::Ref<const Eigen::VectorXd> frame) {
  if (frame.size() != model.Dim())
    throw Error(ErrorCode::kDimensionMismatch,
                "frame dimension " + std::to_string(frame.size()) +
                    " does not match GMM dimension " + std::to_string(model.Dim()));
  const int V = model.NumComponents();
  Eigen::VectorXd post(V);
  model.LogJoint(frame.data(), post.data());
  const double lse = LogSumExp(std::span<const double>(post.data(), V));
  for (int i = 0; i < V; ++i) post[i] = std::exp(post[i] - lse);
  return post;
}

SymbolDocument Quantize(const GmmModel &model, const FeatureDocument &doc) {
  if (doc.NumFrames() > 0 && doc.Dim() != model.Dim())
    throw Error(ErrorCode::kDimensionMismatch,
                "document '" + doc.id + "' has dimension " + std::to_string(doc.Dim()) +
                    ", GMM expects " + std::to_string(model.Dim()));
  SymbolDocument out;
  out.id = doc.id;
  out.group = doc.group;
  out.symbols.resize(doc.NumFrames());
  for (int t = 0; t < doc.NumFrames(); ++t) {
    const Eigen::VectorXd post = Responsibilities(model, doc.frames.row(t).transpose());
    out.symbols[t] = ArgMax(std::span<const double>(post.data(), post.size()));
  }
  return out;
}

std::vector<SymbolDocument> QuantizeAll(const GmmModel &model,
                                        const std::vector<FeatureDocument> &docs,
                                        int threads) {
  std::vector<SymbolDocument> out(docs.size());
  ParallelChunks(docs.size(), threads, [&](size_t, size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) out[i] = Quantize(model, docs[i]);
  });
  return out;
}

}  // namespace ldadnn
