// ldadnn/lda.h

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

// Latent Dirichlet allocation over bags-of-sounds, trained with variational
// EM.  Each document gets a factorized posterior q(theta | gamma) prod_n
// q(z_n | phi_n); phi is kept per distinct symbol since every token of the
// same symbol shares the same optimal phi.

#ifndef LDADNN_LDA_H_
#define LDADNN_LDA_H_

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "ldadnn/corpus.h"
#include "ldadnn/io.h"

namespace ldadnn {

struct LdaConfig {
  double gamma_tol = 1e-5;  // max relative change of gamma
  int max_e_iters = 100;
  double em_tol = 1e-4;  // relative change of the corpus objective
  int max_em_iters = 50;
  // Additive pseudo-count per (topic, symbol) cell in the M-step; 0 disables.
  double smoothing = 1e-3;
  // Symmetric Dirichlet parameter; 1/K when unset.  Held fixed.
  std::optional<double> alpha;
  uint64_t seed = 0;
  int threads = 1;
  // InferTheta normalizes gamma - alpha instead of gamma.
  bool theta_excludes_prior = false;
};

class LdaModel {
 public:
  using Matrix =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  // log_beta is K x V; each row must exponentiate to a distribution (within
  // 1e-8).  alpha has K positive entries.
  LdaModel(std::vector<double> alpha, Matrix log_beta);

  int NumTopics() const { return static_cast<int>(log_beta_.rows()); }
  int VocabSize() const { return static_cast<int>(log_beta_.cols()); }
  const std::vector<double> &alpha() const { return alpha_; }
  const Matrix &log_beta() const { return log_beta_; }

  Json ToJson() const;
  static LdaModel FromJson(const Json &json);

 private:
  std::vector<double> alpha_;
  Matrix log_beta_;
};

struct VariationalState {
  std::vector<double> gamma;  // K
  std::vector<int> word_ids;  // distinct symbols present, ascending
  Eigen::MatrixXd phi;        // word_ids.size() x K, rows sum to 1
  int iterations = 0;
};

// Coordinate ascent on (phi, gamma) for one document:
//   phi_wk  proportional to beta_kw exp(psi(gamma_k))
//   gamma_k = alpha_k + sum_w count_w phi_wk
// until the largest relative change in gamma is below config.gamma_tol or
// config.max_e_iters passes.  gamma starts at alpha + total/K unless
// `gamma_init` is given.  If `elbo_trace` is non-null the bound after every
// pass is appended to it.
VariationalState EStepDocument(const LdaModel &model, const BagOfSounds &doc,
                               const LdaConfig &config = {},
                               const std::vector<double> *gamma_init = nullptr,
                               std::vector<double> *elbo_trace = nullptr);

// E_q[log p(theta, z, w | alpha, beta)] - E_q[log q(theta, z)] for the token
// sequence of `doc`.
double Elbo(const LdaModel &model, const BagOfSounds &doc,
            const VariationalState &state);

struct LdaFitResult {
  LdaModel model;
  // Per EM iteration, the summed document ELBO under the beta used for that
  // E-step, and the same plus the log-density of the smoothing prior on
  // beta (smoothing * sum_kw log beta_kw), which is what the smoothed M-step
  // maximizes.  They coincide when smoothing is 0.
  std::vector<double> elbo_history;
  std::vector<double> objective_history;
  int iterations = 0;
  bool converged = false;
};

// Variational EM.  beta starts from the corpus symbol distribution with
// every cell scaled by seeded uniform noise in [0.5, 1.5]; per-document gamma
// is carried across EM iterations.
LdaFitResult FitLdaWithHistory(const std::vector<BagOfSounds> &corpus, int num_topics,
                               const LdaConfig &config = {});
LdaModel FitLda(const std::vector<BagOfSounds> &corpus, int num_topics,
                const LdaConfig &config = {});

struct ThetaEstimate {
  std::vector<double> theta;
  bool empty_document = false;  // theta is uniform, nothing was inferred
};

ThetaEstimate InferTheta(const LdaModel &model, const BagOfSounds &doc,
                         const LdaConfig &config = {});

}  // namespace ldadnn

#endif  // LDADNN_LDA_H_
