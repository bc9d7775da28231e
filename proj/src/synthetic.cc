// ldadnn/synthetic.cc

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

#include "ldadnn/synthetic.h"

#include <cstdio>

#include "ldadnn/common.h"
#include "ldadnn/rng.h"

namespace ldadnn {

std::vector<std::vector<double>> RandomTopics(int num_topics, int vocab_size,
                                              double concentration, uint64_t seed) {
  if (num_topics < 1 || vocab_size < 1 || !(concentration > 0.0))
    throw Error(ErrorCode::kPrecondition, "RandomTopics: bad arguments");
  Rng rng(seed);
  const std::vector<double> alpha(vocab_size, concentration);
  std::vector<std::vector<double>> beta;
  for (int k = 0; k < num_topics; ++k) beta.push_back(rng.Dirichlet(alpha));
  return beta;
}

FrameMatrix SampleGaussianClusters(const Eigen::MatrixXd &centers, double stddev,
                                   int frames_per_center, uint64_t seed,
                                   std::vector<int> *component) {
  Rng rng(seed);
  const int C = static_cast<int>(centers.rows());
  const int D = static_cast<int>(centers.cols());
  FrameMatrix frames(static_cast<Eigen::Index>(C) * frames_per_center, D);
  if (component) component->clear();
  Eigen::Index r = 0;
  for (int n = 0; n < frames_per_center; ++n) {
    for (int c = 0; c < C; ++c, ++r) {
      for (int d = 0; d < D; ++d) frames(r, d) = centers(c, d) + stddev * rng.Normal();
      if (component) component->push_back(c);
    }
  }
  return frames;
}

DomainShiftTask MakeDomainShiftTask(const DomainShiftSpec &spec, uint64_t seed) {
  if (spec.num_domains < 1 || spec.num_classes < 1 || spec.dim < 1)
    throw Error(ErrorCode::kPrecondition, "domain shift task needs positive sizes");
  Rng rng(seed);
  DomainShiftTask task;
  task.spec = spec;
  task.class_means.resize(spec.num_classes, spec.dim);
  task.domain_offsets.resize(spec.num_domains, spec.dim);
  for (int c = 0; c < spec.num_classes; ++c)
    for (int d = 0; d < spec.dim; ++d) task.class_means(c, d) = spec.class_spread * rng.Normal();
  for (int k = 0; k < spec.num_domains; ++k)
    for (int d = 0; d < spec.dim; ++d)
      task.domain_offsets(k, d) = spec.domain_shift * rng.Normal();
  return task;
}

FrameDataset SampleShiftedFrames(const DomainShiftTask &task, int n, uint64_t seed) {
  const auto &spec = task.spec;
  Rng rng(seed);
  FrameDataset data;
  data.num_domains = spec.num_domains;
  data.features.resize(spec.dim, n);
  data.labels.resize(n);
  data.domains.resize(n);
  for (int i = 0; i < n; ++i) {
    const int k = static_cast<int>(rng.UniformInt(spec.num_domains));
    const int y = static_cast<int>(rng.UniformInt(spec.num_classes));
    for (int d = 0; d < spec.dim; ++d)
      data.features(d, i) = task.class_means(y, d) + task.domain_offsets(k, d) +
                            spec.noise * rng.Normal();
    data.domains[i] = k;
    data.labels[i] = y;
  }
  return data;
}

std::vector<FeatureDocument> SampleDomainCorpus(const DomainShiftTask &task,
                                                const DomainCorpusSpec &spec,
                                                uint64_t seed,
                                                std::vector<int> *true_domains) {
  if (spec.num_docs < 1 || spec.min_frames < 1 || spec.max_frames < spec.min_frames ||
      spec.num_groups < 1)
    throw Error(ErrorCode::kPrecondition, "domain corpus needs positive sizes");
  const auto &shift = task.spec;
  Rng rng(seed);
  std::vector<std::vector<double>> preference;
  const std::vector<double> conc(shift.num_domains, spec.group_concentration);
  for (int g = 0; g < spec.num_groups; ++g) preference.push_back(rng.Dirichlet(conc));

  std::vector<FeatureDocument> docs;
  if (true_domains) true_domains->clear();
  char buf[64];
  for (int m = 0; m < spec.num_docs; ++m) {
    const int g = static_cast<int>(rng.UniformInt(spec.num_groups));
    const int k = rng.Categorical(preference[g]);
    const int T = spec.min_frames +
                  static_cast<int>(rng.UniformInt(spec.max_frames - spec.min_frames + 1));
    FeatureDocument doc;
    std::snprintf(buf, sizeof(buf), "utt%05d", m);
    doc.id = buf;
    std::snprintf(buf, sizeof(buf), "genre%d", g);
    doc.group = buf;
    doc.frames.resize(T, shift.dim);
    doc.labels.resize(T);
    for (int t = 0; t < T; ++t) {
      const int y = static_cast<int>(rng.UniformInt(shift.num_classes));
      for (int d = 0; d < shift.dim; ++d)
        doc.frames(t, d) = task.class_means(y, d) + task.domain_offsets(k, d) +
                           shift.noise * rng.Normal();
      doc.labels[t] = y;
    }
    docs.push_back(std::move(doc));
    if (true_domains) true_domains->push_back(k);
  }
  return docs;
}

}  // namespace ldadnn
