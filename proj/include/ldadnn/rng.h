// ldadnn/rng.h

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

#ifndef LDADNN_RNG_H_
#define LDADNN_RNG_H_

#include <cstdint>
#include <span>
#include <vector>

namespace ldadnn {

// Seedable generator used everywhere randomness is needed.
//
// The engine is xoshiro256** (Blackman & Vigna), with its 256-bit state
// expanded from the 64-bit seed by four successive splitmix64 outputs.  All
// derived variates (uniform, normal, gamma, Dirichlet, categorical) are
// computed here rather than with <random> distributions, whose algorithms
// differ between standard library implementations; a given seed therefore
// yields the same integer draws on every platform, and the same real draws
// wherever libm's log/exp/sqrt agree.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  uint64_t NextU64();

  // Uniform on [0, 1) with 53 random bits.
  double Uniform();
  // Uniform on [lo, hi).
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Uniform integer in [0, n); n must be > 0.  Unbiased (rejection).
  uint64_t UniformInt(uint64_t n);

  // Standard normal (Marsaglia polar method; one spare value is cached).
  double Normal();
  double Normal(double mean, double stddev) { return mean + stddev * Normal(); }

  // Gamma(shape, 1) via Marsaglia-Tsang, with the shape < 1 boost.
  double Gamma(double shape);

  // Draw from Dirichlet(alpha).
  std::vector<double> Dirichlet(std::span<const double> alpha);

  // Index drawn with probability proportional to weights[i].  Weights need
  // not be normalized but must be non-negative with a positive sum.
  int Categorical(std::span<const double> weights);

  // Fisher-Yates shuffle.
  template <typename T>
  void Shuffle(std::vector<T> *items) {
    for (size_t i = items->size(); i > 1; --i) {
      size_t j = static_cast<size_t>(UniformInt(i));
      std::swap((*items)[i - 1], (*items)[j]);
    }
  }

  // Child generator with an independent stream; used to give each consumer
  // (document, layer, ...) its own sequence without coupling draw counts.
  Rng Fork();

 private:
  uint64_t s_[4];
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace ldadnn

#endif  // LDADNN_RNG_H_
