// ldadnn/lda.cc

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

#include "ldadnn/lda.h"

#include <cmath>
#include <limits>

#include "ldadnn/common.h"
#include "ldadnn/math.h"
#include "ldadnn/parallel.h"
#include "ldadnn/rng.h"

namespace ldadnn {

LdaModel::LdaModel(std::vector<double> alpha, Matrix log_beta)
    : alpha_(std::move(alpha)), log_beta_(std::move(log_beta)) {
  const Eigen::Index K = log_beta_.rows();
  if (K < 1 || log_beta_.cols() < 1)
    throw Error(ErrorCode::kPrecondition, "LDA model needs K >= 1 and V >= 1");
  if (static_cast<Eigen::Index>(alpha_.size()) != K)
    throw Error(ErrorCode::kDimensionMismatch, "alpha must have K entries");
  for (double a : alpha_)
    if (!(a > 0.0) || !std::isfinite(a))
      throw Error(ErrorCode::kPrecondition, "alpha entries must be positive");
  for (Eigen::Index k = 0; k < K; ++k) {
    double sum = 0.0;
    for (Eigen::Index w = 0; w < log_beta_.cols(); ++w) {
      const double lb = log_beta_(k, w);
      if (std::isnan(lb) || lb > 0.0)
        throw Error(ErrorCode::kPrecondition, "log_beta entries must be <= 0");
      sum += std::exp(lb);
    }
    if (std::abs(sum - 1.0) > 1e-8)
      throw Error(ErrorCode::kPrecondition,
                  "beta row " + std::to_string(k) + " sums to " + std::to_string(sum));
  }
}

Json LdaModel::ToJson() const {
  Json alpha;
  bool symmetric = true;
  for (double a : alpha_) symmetric = symmetric && a == alpha_.front();
  if (symmetric)
    alpha = alpha_.front();
  else
    alpha = alpha_;
  Json rows = Json::array();
  for (int k = 0; k < NumTopics(); ++k) {
    Json row = Json::array();
    for (int w = 0; w < VocabSize(); ++w) row.push_back(LogProbToJson(log_beta_(k, w)));
    rows.push_back(std::move(row));
  }
  return Json{{"K", NumTopics()},
              {"V", VocabSize()},
              {"alpha", std::move(alpha)},
              {"log_beta", std::move(rows)}};
}

LdaModel LdaModel::FromJson(const Json &json) {
  try {
    const int K = json.at("K").get<int>();
    const int V = json.at("V").get<int>();
    if (K < 1 || V < 1) throw Error(ErrorCode::kParse, "LDA K and V must be >= 1");
    std::vector<double> alpha;
    const Json &a = json.at("alpha");
    if (a.is_array()) {
      for (const auto &x : a) alpha.push_back(JsonToDouble(x));
    } else {
      alpha.assign(K, JsonToDouble(a));
    }
    const Json &rows = json.at("log_beta");
    if (static_cast<int>(rows.size()) != K)
      throw Error(ErrorCode::kDimensionMismatch, "log_beta must have K rows");
    Matrix log_beta(K, V);
    for (int k = 0; k < K; ++k) {
      if (static_cast<int>(rows[k].size()) != V)
        throw Error(ErrorCode::kDimensionMismatch, "log_beta rows must have V entries");
      for (int w = 0; w < V; ++w) log_beta(k, w) = LogProbFromJson(rows[k][w]);
    }
    return LdaModel(std::move(alpha), std::move(log_beta));
  } catch (const Json::exception &e) {
    throw Error(ErrorCode::kParse, std::string("malformed LDA JSON: ") + e.what());
  }
}

namespace {

void CheckDocument(const LdaModel &model, const BagOfSounds &doc) {
  if (doc.VocabSize() != model.VocabSize())
    throw Error(ErrorCode::kDimensionMismatch,
                "document '" + doc.id + "' has vocabulary size " +
                    std::to_string(doc.VocabSize()) + ", model has " +
                    std::to_string(model.VocabSize()));
  if (doc.total < 1)
    throw Error(ErrorCode::kPrecondition, "document '" + doc.id + "' is empty");
}

double AlphaFor(const LdaConfig &config, int K) {
  const double alpha = config.alpha.value_or(1.0 / K);
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw Error(ErrorCode::kPrecondition, "alpha must be positive");
  return alpha;
}

}  // namespace

VariationalState EStepDocument(const LdaModel &model, const BagOfSounds &doc,
                               const LdaConfig &config,
                               const std::vector<double> *gamma_init,
                               std::vector<double> *elbo_trace) {
  CheckDocument(model, doc);
  const int K = model.NumTopics();
  const auto &alpha = model.alpha();
  const auto &log_beta = model.log_beta();

  VariationalState state;
  std::vector<double> counts;
  for (int w = 0; w < doc.VocabSize(); ++w) {
    if (doc.counts[w] > 0) {
      state.word_ids.push_back(w);
      counts.push_back(static_cast<double>(doc.counts[w]));
    }
  }
  const int J = static_cast<int>(state.word_ids.size());

  if (gamma_init) {
    if (static_cast<int>(gamma_init->size()) != K)
      throw Error(ErrorCode::kDimensionMismatch, "gamma_init must have K entries");
    state.gamma = *gamma_init;
  } else {
    state.gamma.resize(K);
    for (int k = 0; k < K; ++k)
      state.gamma[k] = alpha[k] + static_cast<double>(doc.total) / K;
  }
  state.phi.resize(J, K);

  std::vector<double> psi(K), logits(K), next(K);
  for (int iter = 0; iter < config.max_e_iters; ++iter) {
    for (int k = 0; k < K; ++k) psi[k] = Digamma(state.gamma[k]);
    for (int k = 0; k < K; ++k) next[k] = alpha[k];
    for (int j = 0; j < J; ++j) {
      const int w = state.word_ids[j];
      for (int k = 0; k < K; ++k) logits[k] = log_beta(k, w) + psi[k];
      const double lse = LogSumExp(logits);
      if (!std::isfinite(lse))
        throw Error(ErrorCode::kNumerical,
                    "document '" + doc.id + "': symbol " + std::to_string(w) +
                        " has zero probability under every topic");
      for (int k = 0; k < K; ++k) {
        const double p = std::exp(logits[k] - lse);
        state.phi(j, k) = p;
        next[k] += counts[j] * p;
      }
    }
    double max_rel = 0.0;
    for (int k = 0; k < K; ++k) {
      max_rel = std::max(max_rel, std::abs(next[k] - state.gamma[k]) / state.gamma[k]);
      state.gamma[k] = next[k];
    }
    state.iterations = iter + 1;
    if (elbo_trace) elbo_trace->push_back(Elbo(model, doc, state));
    if (max_rel < config.gamma_tol) break;
  }
  return state;
}

double Elbo(const LdaModel &model, const BagOfSounds &doc,
            const VariationalState &state) {
  const int K = model.NumTopics();
  if (doc.VocabSize() != model.VocabSize())
    throw Error(ErrorCode::kDimensionMismatch, "document vocabulary differs from model");
  if (static_cast<int>(state.gamma.size()) != K || state.phi.cols() != K ||
      state.phi.rows() != static_cast<Eigen::Index>(state.word_ids.size()))
    throw Error(ErrorCode::kDimensionMismatch, "variational state does not match model");
  const auto &alpha = model.alpha();

  double alpha_sum = 0.0, gamma_sum = 0.0;
  for (int k = 0; k < K; ++k) {
    alpha_sum += alpha[k];
    gamma_sum += state.gamma[k];
  }
  const double psi_sum = Digamma(gamma_sum);
  std::vector<double> e_log_theta(K);
  for (int k = 0; k < K; ++k) e_log_theta[k] = Digamma(state.gamma[k]) - psi_sum;

  // E[log p(theta | alpha)] - E[log q(theta | gamma)]
  double bound = std::lgamma(alpha_sum) - std::lgamma(gamma_sum);
  for (int k = 0; k < K; ++k) {
    bound += std::lgamma(state.gamma[k]) - std::lgamma(alpha[k]);
    bound += (alpha[k] - state.gamma[k]) * e_log_theta[k];
  }
  // E[log p(z | theta)] + E[log p(w | z, beta)] - E[log q(z | phi)]
  for (size_t j = 0; j < state.word_ids.size(); ++j) {
    const int w = state.word_ids[j];
    if (w < 0 || w >= doc.VocabSize())
      throw Error(ErrorCode::kOutOfRange, "variational state has an invalid symbol");
    const double count = static_cast<double>(doc.counts[w]);
    if (count == 0.0) continue;
    for (int k = 0; k < K; ++k) {
      const double p = state.phi(static_cast<Eigen::Index>(j), k);
      if (p <= 0.0) continue;
      bound += count * p * (e_log_theta[k] + model.log_beta()(k, w) - std::log(p));
    }
  }
  return bound;
}

LdaFitResult FitLdaWithHistory(const std::vector<BagOfSounds> &corpus, int num_topics,
                               const LdaConfig &config) {
  if (corpus.empty()) throw Error(ErrorCode::kPrecondition, "LDA corpus is empty");
  if (num_topics < 1) throw Error(ErrorCode::kPrecondition, "K must be >= 1");
  const int K = num_topics;
  const int V = corpus.front().VocabSize();
  if (V < 1) throw Error(ErrorCode::kPrecondition, "vocabulary size must be >= 1");
  const double eta = config.smoothing;
  if (!(eta >= 0.0)) throw Error(ErrorCode::kPrecondition, "smoothing must be >= 0");

  std::vector<double> empirical(V, eta);
  double total = V * eta;
  for (const auto &doc : corpus) {
    if (doc.VocabSize() != V)
      throw Error(ErrorCode::kDimensionMismatch,
                  "document '" + doc.id + "' has a different vocabulary size");
    if (doc.total < 1)
      throw Error(ErrorCode::kPrecondition, "document '" + doc.id + "' is empty");
    for (int w = 0; w < V; ++w) empirical[w] += static_cast<double>(doc.counts[w]);
    total += static_cast<double>(doc.total);
  }
  for (double &p : empirical) p /= total;

  const std::vector<double> alpha(K, AlphaFor(config, K));
  LdaModel::Matrix log_beta(K, V);
  {
    Rng rng(config.seed);
    for (int k = 0; k < K; ++k) {
      double row_sum = 0.0;
      for (int w = 0; w < V; ++w) {
        log_beta(k, w) = empirical[w] * rng.Uniform(0.5, 1.5);
        row_sum += log_beta(k, w);
      }
      for (int w = 0; w < V; ++w) log_beta(k, w) = std::log(log_beta(k, w) / row_sum);
    }
  }
  LdaModel model(alpha, log_beta);

  struct Partial {
    Eigen::MatrixXd stats;
    double elbo = 0.0;
  };

  const size_t M = corpus.size();
  std::vector<std::vector<double>> gammas(M);
  std::vector<double> elbo_history, objective_history;
  bool converged = false;
  int iterations = 0;

  for (int iter = 0; iter < config.max_em_iters; ++iter) {
    std::vector<Partial> partial(NumChunks(M, config.threads));
    ParallelChunks(M, config.threads, [&](size_t chunk, size_t begin, size_t end) {
      Partial &p = partial[chunk];
      p.stats = Eigen::MatrixXd::Zero(K, V);
      for (size_t m = begin; m < end; ++m) {
        const auto *init = gammas[m].empty() ? nullptr : &gammas[m];
        VariationalState state = EStepDocument(model, corpus[m], config, init);
        p.elbo += Elbo(model, corpus[m], state);
        for (size_t j = 0; j < state.word_ids.size(); ++j) {
          const int w = state.word_ids[j];
          const double c = static_cast<double>(corpus[m].counts[w]);
          for (int k = 0; k < K; ++k)
            p.stats(k, w) += c * state.phi(static_cast<Eigen::Index>(j), k);
        }
        gammas[m] = std::move(state.gamma);
      }
    });
    Eigen::MatrixXd stats = Eigen::MatrixXd::Zero(K, V);
    double elbo = 0.0;
    for (const auto &p : partial) {
      stats += p.stats;
      elbo += p.elbo;
    }
    double objective = elbo;
    if (eta > 0.0) objective += eta * model.log_beta().sum();
    if (!std::isfinite(objective))
      throw Error(ErrorCode::kNumerical, "LDA corpus bound is not finite");
    elbo_history.push_back(elbo);
    objective_history.push_back(objective);

    for (int k = 0; k < K; ++k) {
      const double row_sum = stats.row(k).sum() + V * eta;
      if (!(row_sum > 0.0))
        throw Error(ErrorCode::kNumerical,
                    "topic " + std::to_string(k) + " received no mass; enable smoothing");
      for (int w = 0; w < V; ++w)
        log_beta(k, w) = std::log((stats(k, w) + eta) / row_sum);
    }
    model = LdaModel(alpha, log_beta);
    iterations = iter + 1;

    if (objective_history.size() >= 2) {
      const double prev = objective_history[objective_history.size() - 2];
      if (std::abs(objective - prev) < config.em_tol * std::abs(prev)) {
        converged = true;
        break;
      }
    }
  }
  return LdaFitResult{std::move(model), std::move(elbo_history),
                      std::move(objective_history), iterations, converged};
}

LdaModel FitLda(const std::vector<BagOfSounds> &corpus, int num_topics,
                const LdaConfig &config) {
  return FitLdaWithHistory(corpus, num_topics, config).model;
}

ThetaEstimate InferTheta(const LdaModel &model, const BagOfSounds &doc,
                         const LdaConfig &config) {
  const int K = model.NumTopics();
  ThetaEstimate out;
  if (doc.total == 0 && doc.VocabSize() == model.VocabSize()) {
    out.theta.assign(K, 1.0 / K);
    out.empty_document = true;
    return out;
  }
  const VariationalState state = EStepDocument(model, doc, config);
  out.theta = state.gamma;
  if (config.theta_excludes_prior)
    for (int k = 0; k < K; ++k) out.theta[k] -= model.alpha()[k];
  double sum = 0.0;
  for (double t : out.theta) sum += t;
  for (double &t : out.theta) t /= sum;
  return out;
}

}  // namespace ldadnn
