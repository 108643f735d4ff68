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

#include <cstdint>
#include <string>
#include <vector>

#include "qdcg/measure.hpp"
#include "qdcg/source.hpp"

namespace qdcg {

// One node of the mean-split recursion: the half-open interval
// [lower, upper), its mass and the conditional mean of the law on it.
// Children split the interval at `mean`; the right child is left-closed.
struct Cell {
  double lower;
  double upper;
  double mass;
  double mean;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::uint32_t depth = 0;

  bool is_leaf() const noexcept { return left < 0; }
};

// Record of one quantizer run. Node 0 is the root (-inf, +inf).
class CellTree {
 public:
  CellTree() = default;
  explicit CellTree(std::vector<Cell> cells) : cells_(std::move(cells)) {}

  const std::vector<Cell>& cells() const noexcept { return cells_; }
  const Cell& root() const { return cells_.front(); }
  // Leaf indices ordered left to right.
  std::vector<std::size_t> leaves() const;
  std::uint32_t height() const;

  // Nested {"interval":[lo,hi],"mass":..,"mean":..,"children":[..]} objects;
  // infinite bounds are written as the strings "-inf" / "inf".
  std::string to_json() const;

 private:
  std::vector<Cell> cells_;
};

// T(m, n): depth-n mean-split quantization of a discrete measure. Cells
// holding a single atom stop early, so the result has at most 2^n atoms.
DiscreteMeasure quantize_discrete(const DiscreteMeasure& m, unsigned n, CellTree* tree = nullptr);

// Identity when m has at most 2^n atoms, quantize_discrete(m, n) otherwise.
DiscreteMeasure compress(const DiscreteMeasure& m, unsigned n);

// compress() for an unsorted weighted point cloud (ties allowed), e.g. a
// pushforward before merging. Distinct positions are only counted up to
// 2^n + 1, and the quantizer partitions in place, so nothing is sorted
// unless the identity branch is taken.
DiscreteMeasure compress_points(std::vector<Atom> points, unsigned n);

// E|X - X^(n)| under the cell coupling: every atom is sent to the mean of
// the leaf cell that contains it.
double cell_coupling_error(const DiscreteMeasure& m, unsigned n);

struct Quantization {
  DiscreteMeasure measure;
  CellTree tree;
};

inline constexpr double kQuantileCellTolerance = 1e-10;

// Quantizes any source. Gaussian and uniform cells are integrated in closed
// form, quantile sources in probability space by adaptive quadrature.
Quantization quantize_source(const SourceSpec& source, unsigned n);

// Sum over leaves of mass * E[|X - cell mean| | X in cell].
double quantization_error(const SourceSpec& source, unsigned n);

}  // namespace qdcg
