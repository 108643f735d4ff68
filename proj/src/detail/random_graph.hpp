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
#include <random>

#include "qdcg/graph.hpp"
#include "qdcg/measure.hpp"

// Random inputs shared by selfcheck and the test suites.
namespace qdcg::detail {

// Between min_atoms and max_atoms atoms (fewer once ties merge), either on an
// integer grid or continuous in [-10, 10], random positive weights.
DiscreteMeasure random_measure(std::mt19937_64& rng, std::size_t min_atoms, std::size_t max_atoms);

struct RandomGraphOptions {
  std::size_t max_nodes = 8;
  std::size_t max_sources = 3;
  std::size_t max_atoms = 64;
};

// DAG with discrete sources and ops from {affine, add, sub, min, max}; every
// node reaches the terminal.
CompGraph random_graph(std::mt19937_64& rng, const RandomGraphOptions& options = {});

}  // namespace qdcg::detail
