// ldadnn/gmm.h

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

// Diagonal-covariance GMM used as the acoustic quantizer: each frame is
// replaced by the index of the component with the highest posterior.

#ifndef LDADNN_GMM_H_
#define LDADNN_GMM_H_

#include <vector>

#include <Eigen/Dense>

#include "ldadnn/corpus.h"
#include "ldadnn/io.h"

namespace ldadnn {

class GmmModel {
 public:
  using Matrix =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  // Validates: V >= 1, positive weights summing to 1 within 1e-9, positive
  // finite variances, finite means, consistent shapes.
  GmmModel(Eigen::VectorXd weights, Matrix means, Matrix variances);

  int NumComponents() const { return static_cast<int>(weights_.size()); }
  int Dim() const { return static_cast<int>(means_.cols()); }

  const Eigen::VectorXd &weights() const { return weights_; }
  const Matrix &means() const { return means_; }
  const Matrix &variances() const { return variances_; }

  // out[i] = log w_i + log N(frame; mu_i, diag(var_i)).  `out` must have
  // NumComponents() entries.  Does not check the frame dimension.
  void LogJoint(const double *frame, double *out) const;

  // log p(frame) = logsumexp of LogJoint.
  double LogLikelihood(Eigen::Ref<const Eigen::VectorXd> frame) const;

  // Same model with components reordered: new component j is old perm[j].
  GmmModel Permuted(const std::vector<int> &perm) const;

  Json ToJson() const;
  static GmmModel FromJson(const Json &json);

 private:
  Eigen::VectorXd weights_;
  Matrix means_;
  Matrix variances_;
  // log w_i - 0.5 * (D log 2pi + sum_d log var_id)
  Eigen::VectorXd log_const_;
  Matrix inv_variances_;
};

struct GmmConfig {
  int iters_per_split = 4;      // EM passes after each mix-up split
  int final_max_iters = 50;     // cap on the closing EM run
  double final_rel_tol = 1e-6;  // relative change in average log-likelihood
  double variance_floor_scale = 1e-4;  // times the global per-dim variance
  double split_offset = 0.2;    // mean perturbation, in standard deviations
  double empty_mass = 1e-8;     // components below this occupancy are re-seeded
  int threads = 1;
};

// One EM pass.  `segment` increases whenever the component set changes
// (mix-up split or re-seed); the likelihood is only guaranteed to be
// non-decreasing between passes that share a segment.
struct GmmIterationStats {
  int num_components = 0;
  int segment = 0;
  double avg_log_likelihood = 0.0;  // per frame, of the parameters going in
};

struct GmmTrainResult {
  GmmModel model;
  std::vector<GmmIterationStats> history;
  Eigen::VectorXd variance_floor;
};

// Mix-up training: starts from the single-Gaussian ML estimate, repeatedly
// splits the heaviest component (mean +/- split_offset * sigma, weight
// halved) running `iters_per_split` EM passes after each split until
// `target_components` exist, then runs EM to convergence.
GmmTrainResult TrainGmmWithHistory(const FrameMatrix &frames,
                                   int target_components,
                                   const GmmConfig &config = {});

GmmModel TrainGmm(const FrameMatrix &frames, int target_components,
                  const GmmConfig &config = {});

// Posterior P(G_i | frame) over the V components, via log-sum-exp.
Eigen::VectorXd Responsibilities(const GmmModel &model,
                                 Eigen::Ref<const Eigen::VectorXd> frame);

// symbols[t] = argmax_i P(G_i | x_t), lowest index on ties.
SymbolDocument Quantize(const GmmModel &model, const FeatureDocument &doc);

std::vector<SymbolDocument> QuantizeAll(const GmmModel &model,
                                        const std::vector<FeatureDocument> &docs,
                                        int threads = 1);

}  // namespace ldadnn

#endif  // LDADNN_GMM_H_
