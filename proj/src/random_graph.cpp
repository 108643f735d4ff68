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

#include "detail/random_graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace qdcg::detail {

namespace {

std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

}  // namespace

DiscreteMeasure random_measure(std::mt19937_64& rng, std::size_t min_atoms, std::size_t max_atoms) {
  const std::size_t k = pick(rng, min_atoms, max_atoms);
  const bool grid = pick(rng, 0, 1) == 0;
  std::uniform_real_distribution<double> pos(-10.0, 10.0);
  std::exponential_distribution<double> mass(1.0);
  std::vector<Atom> atoms(k);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    atoms[i].position = grid ? std::round(pos(rng)) : pos(rng);
    atoms[i].weight = mass(rng) + 1e-3;
    total += atoms[i].weight;
  }
  for (auto& a : atoms) a.weight /= total;
  return DiscreteMeasure(std::move(atoms));
}

CompGraph random_graph(std::mt19937_64& rng, const RandomGraphOptions& options) {
  CompGraph g;
  const std::size_t sources = pick(rng, 1, options.max_sources);
  const std::size_t max_ops = options.max_nodes - sources;
  // One slot is held back for a closing add over dangling nodes.
  const std::size_t ops = pick(rng, 1, std::max<std::size_t>(1, max_ops - 1));

  std::vector<std::string> ids;
  std::vector<int> consumers;
  for (std::size_t s = 0; s < sources; ++s) {
    ids.push_back("s" + std::to_string(s));
    consumers.push_back(0);
    g.add_source(ids.back(), SourceSpec::discrete(random_measure(rng, 1, options.max_atoms)));
  }

  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  for (std::size_t v = 0; v < ops; ++v) {
    const std::size_t kind = pick(rng, 0, 4);
    const std::size_t arity = kind == 0 ? 1 : (kind == 1 || kind == 2 ? 2 : pick(rng, 2, 3));
    std::vector<std::string> inputs;
    for (std::size_t a = 0; a < arity; ++a) {
      // Prefer nodes nobody consumes yet so fewer need the closing add.
      std::vector<std::size_t> dangling;
      for (std::size_t u = 0; u < ids.size(); ++u) {
        if (consumers[u] == 0) dangling.push_back(u);
      }
      const std::size_t u = (!dangling.empty() && pick(rng, 0, 2) > 0)
                                ? dangling[pick(rng, 0, dangling.size() - 1)]
                                : pick(rng, 0, ids.size() - 1);
      ++consumers[u];
      inputs.push_back(ids[u]);
    }
    NodeOp op = kind == 0   ? NodeOp::affine(coef(rng), coef(rng))
                : kind == 1 ? NodeOp::sub()
                : kind == 2 ? NodeOp::add()
                : kind == 3 ? NodeOp::min()
                            : NodeOp::max();
    ids.push_back("v" + std::to_string(v));
    consumers.push_back(0);
    g.add_op(ids.back(), std::move(op), std::move(inputs));
  }

  std::vector<std::string> dangling;
  for (std::size_t u = 0; u < ids.size(); ++u) {
    if (consumers[u] == 0) dangling.push_back(ids[u]);
  }
  if (dangling.size() == 1) {
    g.set_terminal(dangling.front());
  } else {
    g.add_op("out", NodeOp::add(), dangling);
    g.set_terminal("out");
  }
  return g;
}

}  // namespace qdcg::detail
