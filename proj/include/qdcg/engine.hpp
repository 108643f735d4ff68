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
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qdcg/graph.hpp"
#include "qdcg/measure.hpp"

namespace qdcg {

enum class EvalMode { exact, cq, mc };

inline constexpr std::size_t kDefaultAtomCap = std::size_t{1} << 24;

struct EvalOptions {
  // Largest joint table (tuples of atoms) any evaluation may hold.
  std::size_t atom_cap = kDefaultAtomCap;
  // Also return the law of this node.
  std::optional<std::string> marginal_node;
};

struct NodeStats {
  std::string id;
  std::size_t joint_atoms = 0;  // tuples in the joint table when the node was computed
  std::size_t support = 0;      // atoms of the node's law afterwards (0 if never a marginal)
  bool cut_vertex = false;      // the joint table reduced to this node alone
  bool compressed = false;
  double wall_ms = 0.0;
};

struct EvalResult {
  DiscreteMeasure terminal;
  std::optional<DiscreteMeasure> marginal;
  std::vector<double> samples;  // mc mode only, in sample order
  std::vector<NodeStats> stats;
};

// Ground truth: enumerates the full product of source atoms and evaluates
// the graph on every tuple. Continuous sources need quantize_sources_at;
// with it every source (discrete ones included) is replaced by T(mu_s, n).
EvalResult eval_exact_joint(const CompGraph& g, std::optional<unsigned> quantize_sources_at,
                            const EvalOptions& options = {});

// Compressed-and-quantized evaluation. Sources are quantized at level n and
// introduced into a joint table over the frontier (computed nodes still
// awaiting a consumer) just before first use. After each op node the table
// is projected onto the frontier; when the frontier is that node alone its
// law is a genuine marginal and is compressed to at most 2^n atoms. Other
// nodes stay exact. Throws CapExceeded naming the node whose table would
// exceed options.atom_cap.
EvalResult eval_cq(const CompGraph& g, unsigned n, const EvalOptions& options = {});

// Monte Carlo: `samples` independent draws of the source vector pushed
// through the graph. Source j of sample i uses Philox block
// (i, stream = j) under `seed`.
EvalResult eval_mc(const CompGraph& g, std::size_t samples, std::uint64_t seed,
                   const EvalOptions& options = {});

// Min/max network of the modified bubble sort over the given sources,
// terminal = k-th smallest (1-based). Nodes that cannot reach the terminal
// are pruned. Sources are "x0".."x{m-1}"; the compare-exchange of pass i
// at position j creates "min_{i}_{j}" and "max_{i}_{j}".
CompGraph build_bubble_sort_graph(std::span<const SourceSpec> sources, unsigned k);

}  // namespace qdcg
