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

#include "qdcg/gaussian.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "qdcg/error.hpp"
#include "qdcg/quantize.hpp"
#include "qdcg/source.hpp"

namespace qdcg::gaussian {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// e^{x^2/2} with the rounding error of x*x carried separately.
double exp_half_square(double x) {
  const double hi = x * x;
  const double lo = std::fma(x, x, -hi);
  return std::exp(0.5 * hi) * std::exp(0.5 * lo);
}

double polynomial(const double* c, int degree, double r) {
  double acc = c[degree];
  for (int i = degree - 1; i >= 0; --i) acc = acc * r + c[i];
  return acc;
}

}  // namespace

double pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double upper_tail(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

double mills_ratio(double x) {
  if (x >= kAsymptoticThreshold) {
    const double u = 1.0 / x;
    const double u2 = u * u;
    return u * (1.0 - u2 + 3.0 * u2 * u2);
  }
  if (x >= 3.0) {
    // Laplace continued fraction 1/(x + 1/(x + 2/(x + ...))), evaluated backward.
    double t = 0.0;
    for (int k = 60; k > 0; --k) t = k / (x + t);
    return 1.0 / (x + t);
  }
  if (x > 0.0) {
    return std::sqrt(std::numbers::pi / 2.0) * std::erfc(x * kInvSqrt2) * exp_half_square(x);
  }
  return upper_tail(x) / pdf(x);
}

double conditional_mean_tail(double x) {
  if (std::isinf(x)) return x > 0 ? x : 0.0;
  if (x > 0.0) return 1.0 / mills_ratio(x);
  return pdf(x) / upper_tail(x);
}

double quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw InvalidArgument("normal quantile: probability outside [0, 1]");
  }
  static constexpr double a[] = {3.3871328727963666080e0,  1.3314166789178437745e+2,
                                 1.9715909503065514427e+3, 1.3731693765509461125e+4,
                                 4.5921953931549871457e+4, 6.7265770927008700853e+4,
                                 3.3430575583588128105e+4, 2.5090809287301226727e+3};
  static constexpr double b[] = {1.0,
                                 4.2313330701600911252e+1, 6.8718700749205790830e+2,
                                 5.3941960214247511077e+3, 2.1213794301586595867e+4,
                                 3.9307895800092710610e+4, 2.8729085735721942674e+4,
                                 5.2264952788528545610e+3};
  static constexpr double c[] = {1.42343711074968357734e0, 4.63033784615654529590e0,
                                 5.76949722146069140550e0, 3.64784832476320460504e0,
                                 1.27045825245236838258e0, 2.41780725177450611770e-1,
                                 2.27238449892691845833e-2, 7.74545014278341407640e-4};
  static constexpr double d[] = {1.0,
                                 2.05319162663775882187e0, 1.67638483018380384940e0,
                                 6.89767334985100004550e-1, 1.48103976427480074590e-1,
                                 1.51986665636164571966e-2, 5.47593808499534494600e-4,
                                 1.05075007164441684324e-9};
  static constexpr double e[] = {6.65790464350110377720e0, 5.46378491116411436990e0,
                                 1.78482653991729133580e0, 2.96560571828504891230e-1,
                                 2.65321895265761230930e-2, 1.24266094738807843860e-3,
                                 2.71155556874348757815e-5, 2.01033439929228813265e-7};
  static constexpr double f[] = {1.0,
                                 5.99832206555887937690e-1, 1.36929880922735805310e-1,
                                 1.48753612908506148525e-2, 7.86869131145613259100e-4,
                                 1.84631831751005468180e-5, 1.42151175831644588870e-7,
                                 2.04426310338993978564e-15};

  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * polynomial(a, 7, r) / polynomial(b, 7, r);
  }
  double r = std::sqrt(-std::log(q < 0.0 ? p : 1.0 - p));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = polynomial(c, 7, r) / polynomial(d, 7, r);
  } else {
    r -= 5.0;
    value = polynomial(e, 7, r) / polynomial(f, 7, r);
  }
  return q < 0.0 ? -value : value;
}

double cell_mass(double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  // Differences are taken on the side of zero where the tail is small.
  if (lo >= 0.0) return upper_tail(lo) - upper_tail(hi);
  if (hi <= 0.0) return cdf(hi) - cdf(lo);
  return 1.0 - cdf(lo) - upper_tail(hi);
}

double cell_partial_mean(double lo, double hi) { return pdf(lo) - pdf(hi); }

double cell_abs_deviation(double lo, double hi, double center) {
  // c * (P[lo, c) - P[c, hi)) + (pdf(lo) + pdf(hi) - 2 pdf(c)) written so each
  // half is a nonnegative quantity.
  const double left = center * cell_mass(lo, center) - cell_partial_mean(lo, center);
  const double right = cell_partial_mean(center, hi) - center * cell_mass(center, hi);
  return std::max(0.0, left) + std::max(0.0, right);
}

OmegaSequence omega_sequence(unsigned steps) {
  if (steps == 0) throw InvalidArgument("omega sequence: steps must be positive");
  OmegaSequence seq;
  seq.values.reserve(steps + 1);
  seq.values.push_back(0.0);
  for (unsigned j = 0; j < steps; ++j) {
    seq.values.push_back(conditional_mean_tail(seq.values.back()));
  }
  return seq;
}

std::vector<RateRow> rate_table(unsigned n_max) {
  if (n_max == 0 || n_max > kMaxRateLevel) {
    throw InvalidArgument("gaussian rate table: n_max must be in 1.." +
                          std::to_string(kMaxRateLevel));
  }
  const SourceSpec standard = SourceSpec::gaussian(0.0, 1.0);
  std::vector<RateRow> rows;
  rows.reserve(n_max + 1);
  for (unsigned n = 0; n <= n_max; ++n) rows.push_back({n, quantization_error(standard, n)});
  return rows;
}

}  // namespace qdcg::gaussian
