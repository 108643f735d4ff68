// Copyright 2026 The qdcg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <vector>

// Standard normal machinery: density, tails, Mills ratio, conditional
// means of cells and tails, and the iterated tail-mean sequence.
namespace qdcg::gaussian {

double pdf(double x);
double cdf(double x);
// P(X > x), evaluated through erfc so the right tail keeps full precision.
double upper_tail(double x);

// upper_tail(x) / pdf(x). Above kAsymptoticThreshold the three-term
// asymptotic series 1/x - 1/x^3 + 3/x^5 is used since both factors underflow.
double mills_ratio(double x);
inline constexpr double kAsymptoticThreshold = 37.0;

// E[X | X >= x]; tends to 0 as x -> -inf.
double conditional_mean_tail(double x);

// Inverse of cdf on (0, 1) (Wichura's AS241, about 1e-16 relative).
double quantile(double p);

// Cell integrals of the standard normal over [lo, hi); infinite bounds ok.
double cell_mass(double lo, double hi);
// Integral of x over [lo, hi).
double cell_partial_mean(double lo, double hi);
// Integral of |x - center| over [lo, hi), center inside the cell.
double cell_abs_deviation(double lo, double hi, double center);

// omega_0 = 0, omega_{j+1} = E[X | X >= omega_j]; holds steps + 1 values.
struct OmegaSequence {
  std::vector<double> values;
};

OmegaSequence omega_sequence(unsigned steps);

struct RateRow {
  unsigned n;
  double w1;
};

inline constexpr unsigned kMaxRateLevel = 20;

// W1 between N(0,1) and its level-n quantization for n = 0..n_max, from
// exact cell integrals.
std::vector<RateRow> rate_table(unsigned n_max);

}  // namespace qdcg::gaussian
