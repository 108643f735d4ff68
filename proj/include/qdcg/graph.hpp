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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "qdcg/source.hpp"

namespace qdcg {

enum class OpKind { affine, add, sub, min, max, scale_add, em_step, custom };

const char* to_string(OpKind kind);

// Scalar coefficient of an SDE, a(t, x) or b(t, x).
using Coefficient = std::function<double(double t, double x)>;

// c0 + c1 * x, independent of t.
Coefficient affine_coefficient(double c0, double c1);

// Scalar function attached to an op node together with its Lipschitz
// constant under the l1 norm on the inputs.
//
// Built-in kinds derive the constant (affine |a|; add, sub, min, max 1;
// scale_add max(1, |c|)). em_step is y + a(t, y) dt + b(t, y) sqrt(dt) xi
// over inputs (y, xi) and has none; custom nodes carry whatever was
// declared, possibly nothing.
class NodeOp {
 public:
  using Function = std::function<double(std::span<const double>)>;

  static NodeOp affine(double a, double b);
  static NodeOp add();
  static NodeOp sub();
  static NodeOp min();
  static NodeOp max();
  static NodeOp scale_add(double c);
  static NodeOp em_step(Coefficient drift, Coefficient diffusion, double t, double dt);
  static NodeOp custom(Function f, std::optional<double> lipschitz, std::size_t arity,
                       std::string label = "custom");

  OpKind kind() const noexcept { return kind_; }
  const std::string& label() const noexcept { return label_; }

  // Declared or derived constant; empty when the function is not known to be
  // globally Lipschitz.
  std::optional<double> lipschitz() const noexcept { return lipschitz_; }
  NodeOp& override_lipschitz(double value);

  // Required input count, or 0 for variadic kinds (add/min/max take >= 2).
  std::size_t arity() const noexcept { return arity_; }
  bool accepts(std::size_t inputs) const noexcept;

  double evaluate(std::span<const double> inputs) const;

  double param_a() const noexcept { return a_; }
  double param_b() const noexcept { return b_; }
  double em_time() const noexcept { return t_; }
  double em_dt() const noexcept { return dt_; }

 private:
  NodeOp(OpKind kind, std::size_t arity, std::optional<double> lip, std::string label)
      : kind_(kind), arity_(arity), lipschitz_(lip), label_(std::move(label)) {}

  OpKind kind_;
  std::size_t arity_;
  std::optional<double> lipschitz_;
  std::string label_;
  double a_ = 0.0;
  double b_ = 0.0;
  double t_ = 0.0;
  double dt_ = 0.0;
  double sqrt_dt_ = 0.0;
  Coefficient drift_;
  Coefficient diffusion_;
  Function fn_;
};

struct Node {
  std::string id;
  std::optional<SourceSpec> source;
  std::optional<NodeOp> op;
  std::vector<std::string> inputs;

  bool is_source() const noexcept { return source.has_value(); }
};

struct Topology;
class CompGraph;
Topology validate(const CompGraph& g);

// A computational graph: source nodes carrying input laws, op nodes carrying
// scalar functions of their ordered inputs, and one terminal.
class CompGraph {
 public:
  CompGraph& add_source(std::string id, SourceSpec source);
  CompGraph& add_op(std::string id, NodeOp op, std::vector<std::string> inputs);
  CompGraph& set_terminal(std::string id);
  // Adds a node as given, even an incomplete one; validate() reports what is
  // missing. Used by the JSON reader.
  CompGraph& add_node(Node node);

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::string& terminal() const noexcept { return terminal_; }
  std::optional<std::size_t> find(const std::string& id) const;
  const Node& node(const std::string& id) const;

 private:
  std::vector<Node> nodes_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string> duplicate_ids_;
  std::string terminal_;

  friend Topology validate(const CompGraph& g);
};

// Index view of a validated graph.
struct Topology {
  std::vector<std::size_t> order;                    // every node, inputs first
  std::vector<std::vector<std::size_t>> inputs;      // per node, in declared order
  std::vector<std::vector<std::size_t>> consumers;   // per node, one entry per edge
  std::vector<std::size_t> sources;                  // in declaration order
  std::size_t terminal = 0;
};

// Checks every structural invariant and reports all violations at once:
// unknown inputs, duplicate ids, cycles, terminal missing or with consumers,
// nodes with no route to the terminal, sources without a law, op nodes
// without inputs or with the wrong input count.
Topology validate(const CompGraph& g);

inline constexpr std::size_t kDefaultPathCap = 1'000'000;

struct PathEnumeration {
  std::vector<std::vector<std::size_t>> paths;  // node indices, source first
  std::uint64_t count = 0;
};

// Every directed path from `source` to the terminal, each exactly once.
// Throws CapExceeded once more than `cap` paths are produced.
PathEnumeration enumerate_paths(const CompGraph& g, const std::string& source,
                                std::size_t cap = kDefaultPathCap);

// Path counts to the terminal by dynamic programming over the DAG, per node.
// Saturates at UINT64_MAX.
std::vector<std::uint64_t> path_counts(const CompGraph& g);

// Per node: sum over paths to the terminal of the product of Lipschitz
// constants of the nodes entered along the path. Throws when an op node on
// some path has no Lipschitz constant.
std::vector<double> path_distortion_sums(const CompGraph& g);

// The same quantity for one source by explicit enumeration.
double enumerated_distortion_sum(const CompGraph& g, const std::string& source,
                                 std::size_t cap = kDefaultPathCap);

// Maximum over sources of the shortest path length (in edges) to the terminal.
unsigned depth(const CompGraph& g);

// Compression constant in the end-to-end bound: loose = 3 / 2^n as the
// statement is usually quoted, tight = 3 / 2^(n+1).
enum class CompressionConstant { loose, tight };

double compression_factor(CompressionConstant c, unsigned n);

struct SourceBoundTerm {
  std::string source;
  double quantization_error;  // W1(mu_s, mu_s^(n))
  double quantized_diameter;  // diam supp mu_s^(n)
  double distortion_sum;      // sum over paths of the Lipschitz products
  double term;                // (error + factor * diameter) * distortion_sum
};

struct BoundReport {
  unsigned n = 0;
  double factor = 0.0;
  double total = 0.0;
  std::vector<SourceBoundTerm> sources;
};

// sum_s (W1(mu_s, mu_s^(n)) + factor * diam supp mu_s^(n)) * sum_paths prod Lip.
// Rejects graphs containing em_step or undeclared custom constants.
BoundReport theorem1_bound(const CompGraph& g, unsigned n,
                           CompressionConstant constant = CompressionConstant::loose);

// #paths * max path distortion * max_s (W1_s + factor * diam_s), using the
// same compression factor as theorem1_bound so that it always dominates it.
double crude_bound(const CompGraph& g, unsigned n,
                   CompressionConstant constant = CompressionConstant::loose,
                   std::size_t path_cap = kDefaultPathCap);

// JSON graph format, see README.
CompGraph graph_from_json(const std::string& text);
CompGraph graph_from_file(const std::string& path);

}  // namespace qdcg
