// ldadnn/math.h

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

#ifndef LDADNN_MATH_H_
#define LDADNN_MATH_H_

#include <span>

namespace ldadnn {

// Digamma function psi(x) = d/dx log Gamma(x), for x > 0.  Arguments below 6
// are shifted up with psi(x) = psi(x + 1) - 1/x, then the asymptotic series
// is summed through the x^-14 term (absolute error below 1e-12).
double Digamma(double x);

// log(sum(exp(v))), stable; returns -inf for an empty or all -inf input.
double LogSumExp(std::span<const double> v);

// Index of the largest element; the lowest index wins ties.  NaN entries are
// never selected unless every entry is NaN (then 0).
int ArgMax(std::span<const double> v);

// -sum p log p with 0 log 0 = 0, in nats.
double EntropyNats(std::span<const double> p);

}  // namespace ldadnn

#endif  // LDADNN_MATH_H_
