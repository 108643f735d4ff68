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

#include "qdcg/measure.hpp"
#include "support/oracles.hpp"

namespace support {

inline oracle::Law to_law(const qdcg::DiscreteMeasure& m) {
  oracle::Law law;
  for (std::size_t i = 0; i < m.size(); ++i) law.push_back({m.atoms()[i], m.weights()[i]});
  return law;
}

inline qdcg::DiscreteMeasure uniform_grid(std::size_t count, double start = 1.0) {
  std::vector<double> xs(count);
  for (std::size_t i = 0; i < count; ++i) xs[i] = start + static_cast<double>(i);
  return qdcg::DiscreteMeasure::uniform(xs);
}

inline qdcg::DiscreteMeasure measure(std::vector<double> atoms, std::vector<double> weights) {
  return qdcg::DiscreteMeasure(atoms, weights);
}

}  // namespace support
