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

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qdcg/measure.hpp"

namespace qdcg {

struct GaussianSource {
  double mean;
  double std;
};

struct UniformSource {
  double lo;
  double hi;
};

struct DiscreteSource {
  DiscreteMeasure measure;
};

// Law given by a nondecreasing quantile function on (0, 1). Either a
// piecewise-linear table through (p_i, q_i) with p running from 0 to 1, or an
// arbitrary callable.
struct QuantileSource {
  std::function<double(double)> quantile;
  std::vector<double> table_p;
  std::vector<double> table_q;
  std::string label;

  bool tabulated() const noexcept { return !table_p.empty(); }
};

// Input distribution attached to a source node.
class SourceSpec {
 public:
  using Variant = std::variant<GaussianSource, UniformSource, DiscreteSource, QuantileSource>;

  static SourceSpec gaussian(double mean, double std);
  static SourceSpec uniform(double lo, double hi);
  static SourceSpec discrete(DiscreteMeasure measure);
  static SourceSpec tabulated_quantile(std::vector<double> p, std::vector<double> q);
  static SourceSpec quantile_function(std::function<double(double)> quantile,
                                      std::string label = "callable");

  // Compact text form used on the command line:
  //   gaussian:<mean>,<std>   uniform:<lo>,<hi>   point:<x>
  //   discrete:<x1>,<x2>,...  (equal weights)     csv:<path to atom,weight csv>
  static SourceSpec parse(std::string_view text);

  const Variant& variant() const noexcept { return variant_; }
  bool is_discrete() const noexcept { return std::holds_alternative<DiscreteSource>(variant_); }

  // Inverse-transform sample from a uniform draw u in (0, 1).
  double sample(double u) const;
  double mean() const;
  std::string describe() const;

 private:
  explicit SourceSpec(Variant v) : variant_(std::move(v)) {}

  Variant variant_;
};

}  // namespace qdcg
