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

#include <cstddef>
#include <functional>

namespace qdcg {

struct IntegrationResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = false;
};

// Globally adaptive Gauss-Kronrod (7/15) quadrature on a finite interval.
// The interval with the largest embedded error estimate is bisected until the
// summed estimate drops below abs_tol or max_intervals is reached. Nodes
// never touch the endpoints, so integrable endpoint singularities are fine.
IntegrationResult integrate(const std::function<double(double)>& f, double lo, double hi,
                            double abs_tol, std::size_t max_intervals = 4000);

}  // namespace qdcg
