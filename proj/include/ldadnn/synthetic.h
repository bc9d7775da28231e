// ldadnn/synthetic.h

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

// Synthetic data with known ground truth, for tests, the acceptance suite
// and the command-line demo.

#ifndef LDADNN_SYNTHETIC_H_
#define LDADNN_SYNTHETIC_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ldadnn/corpus.h"
#include "ldadnn/network.h"

namespace ldadnn {

// K rows over V symbols, each drawn from a symmetric Dirichlet.
std::vector<std::vector<double>> RandomTopics(int num_topics, int vocab_size,
                                              double concentration, uint64_t seed);

// Frames drawn from isotropic Gaussians around `centers` (one row each);
// `component` receives the generating center of every frame.
FrameMatrix SampleGaussianClusters(const Eigen::MatrixXd &centers, double stddev,
                                   int frames_per_center, uint64_t seed,
                                   std::vector<int> *component);

// Frames whose class-conditional mean is moved by a per-domain offset:
//   x = class_mean[y] + domain_offset[k] + noise * N(0, I).
// Without knowing k the classes overlap; knowing k removes the shift.
struct DomainShiftSpec {
  int num_domains = 4;
  int num_classes = 8;
  int dim = 8;
  double class_spread = 1.0;  // stddev of class means around 0
  double domain_shift = 1.5;  // stddev of domain offsets around 0
  double noise = 1.0;
};

struct DomainShiftTask {
  DomainShiftSpec spec;
  Eigen::MatrixXd class_means;     // num_classes x dim
  Eigen::MatrixXd domain_offsets;  // num_domains x dim
};

DomainShiftTask MakeDomainShiftTask(const DomainShiftSpec &spec, uint64_t seed);

// `n` frames with uniformly drawn domain and class, carrying the domain.
FrameDataset SampleShiftedFrames(const DomainShiftTask &task, int n, uint64_t seed);

// Documents (utterances) for the full pipeline: each document belongs to one
// latent domain, every frame gets a uniformly drawn class label, and each
// group (genre) has its own Dirichlet-drawn preference over domains.  The
// generating domain of every document goes to `true_domains`.
struct DomainCorpusSpec {
  DomainShiftSpec shift;
  int num_docs = 200;
  int min_frames = 30;
  int max_frames = 80;
  int num_groups = 4;
  double group_concentration = 0.5;
};

std::vector<FeatureDocument> SampleDomainCorpus(const DomainShiftTask &task,
                                                const DomainCorpusSpec &spec,
                                                uint64_t seed,
                                                std::vector<int> *true_domains);

}  // namespace ldadnn

#endif  // LDADNN_SYNTHETIC_H_
