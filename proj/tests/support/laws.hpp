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

#include <algorithm>
#include <cmath>

#include "qdcg/measure.hpp"

namespace support {

// Law of U1 + U2 for independent U(0, 1): density t on [0, 1], 2 - t on [1, 2].
struct TriangularLaw : qdcg::ContinuousLaw {
  double cdf(double x) const override {
    if (x <= 0) return 0;
    if (x >= 2) return 1;
    return x <= 1 ? x * x / 2 : 1 - (2 - x) * (2 - x) / 2;
  }
  double quantile(double u) const override {
    return u <= 0.5 ? std::sqrt(2 * u) : 2 - std::sqrt(2 * (1 - u));
  }
  double partial_mean(double lo, double hi) const override {
    return antiderivative(std::clamp(hi, 0.0, 2.0)) - antiderivative(std::clamp(lo, 0.0, 2.0));
  }

 private:
  static double antiderivative(double t) {
    return t <= 1 ? t * t * t / 3 : t * t - t * t * t / 3 - 1.0 / 3;
  }
};

}  // namespace support
