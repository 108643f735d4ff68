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

#include "qdcg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <queue>

#include "qdcg/error.hpp"
#include "qdcg/quantize.hpp"

namespace qdcg {

const char* to_string(OpKind kind) {
  switch (kind) {
    case OpKind::affine: return "affine";
    case OpKind::add: return "add";
    case OpKind::sub: return "sub";
    case OpKind::min: return "min";
    case OpKind::max: return "max";
    case OpKind::scale_add: return "scale_add";
    case OpKind::em_step: return "em_step";
    case OpKind::custom: return "custom";
  }
  return "unknown";
}

Coefficient affine_coefficient(double c0, double c1) {
  return [c0, c1](double, double x) { return c0 + c1 * x; };
}

NodeOp NodeOp::affine(double a, double b) {
  NodeOp op(OpKind::affine, 1, std::fabs(a), "affine");
  op.a_ = a;
  op.b_ = b;
  return op;
}

NodeOp NodeOp::add() { return NodeOp(OpKind::add, 0, 1.0, "add"); }
NodeOp NodeOp::sub() { return NodeOp(OpKind::sub, 2, 1.0, "sub"); }
NodeOp NodeOp::min() { return NodeOp(OpKind::min, 0, 1.0, "min"); }
NodeOp NodeOp::max() { return NodeOp(OpKind::max, 0, 1.0, "max"); }

NodeOp NodeOp::scale_add(double c) {
  NodeOp op(OpKind::scale_add, 2, std::max(1.0, std::fabs(c)), "scale_add");
  op.a_ = c;
  return op;
}

NodeOp NodeOp::em_step(Coefficient drift, Coefficient diffusion, double t, double dt) {
  if (!drift || !diffusion) throw InvalidArgument("em_step: drift and diffusion are required");
  if (!(dt > 0.0)) throw InvalidArgument("em_step: dt must be positive");
  NodeOp op(OpKind::em_step, 2, std::nullopt, "em_step");
  op.drift_ = std::move(drift);
  op.diffusion_ = std::move(diffusion);
  op.t_ = t;
  op.dt_ = dt;
  op.sqrt_dt_ = std::sqrt(dt);
  return op;
}

NodeOp NodeOp::custom(Function f, std::optional<double> lipschitz, std::size_t arity,
                      std::string label) {
  if (!f) throw InvalidArgument("custom op: empty function");
  if (arity == 0) throw InvalidArgument("custom op: arity must be positive");
  if (lipschitz && !(std::isfinite(*lipschitz) && *lipschitz >= 0.0)) {
    throw InvalidArgument("custom op: Lipschitz constant must be finite and nonnegative");
  }
  NodeOp op(OpKind::custom, arity, lipschitz, std::move(label));
  op.fn_ = std::move(f);
  return op;
}

NodeOp& NodeOp::override_lipschitz(double value) {
  if (!(std::isfinite(value) && value >= 0.0)) {
    throw InvalidArgument("Lipschitz override must be finite and nonnegative");
  }
  lipschitz_ = value;
  return *this;
}

bool NodeOp::accepts(std::size_t inputs) const noexcept {
  return arity_ == 0 ? inputs >= 2 : inputs == arity_;
}

double NodeOp::evaluate(std::span<const double> x) const {
  switch (kind_) {
    case OpKind::affine: return a_ * x[0] + b_;
    case OpKind::add: {
      double s = 0.0;
      for (double v : x) s += v;
      return s;
    }
    case OpKind::sub: return x[0] - x[1];
    case OpKind::min: return *std::min_element(x.begin(), x.end());
    case OpKind::max: return *std::max_element(x.begin(), x.end());
    case OpKind::scale_add: return x[0] + a_ * x[1];
    case OpKind::em_step:
      return x[0] + drift_(t_, x[0]) * dt_ + diffusion_(t_, x[0]) * sqrt_dt_ * x[1];
    case OpKind::custom: return fn_(x);
  }
  return 0.0;
}

CompGraph& CompGraph::add_node(Node node) {
  if (index_.contains(node.id)) {
    duplicate_ids_.push_back(node.id);
    return *this;
  }
  index_.emplace(node.id, nodes_.size());
  nodes_.push_back(std::move(node));
  return *this;
}

CompGraph& CompGraph::add_source(std::string id, SourceSpec source) {
  return add_node(Node{std::move(id), std::move(source), std::nullopt, {}});
}

CompGraph& CompGraph::add_op(std::string id, NodeOp op, std::vector<std::string> inputs) {
  return add_node(Node{std::move(id), std::nullopt, std::move(op), std::move(inputs)});
}

CompGraph& CompGraph::set_terminal(std::string id) {
  terminal_ = std::move(id);
  return *this;
}

std::optional<std::size_t> CompGraph::find(const std::string& id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const Node& CompGraph::node(const std::string& id) const {
  const auto i = find(id);
  if (!i) throw InvalidArgument("graph: no node '" + id + "'");
  return nodes_[*i];
}

Topology validate(const CompGraph& g) {
  std::vector<std::string> issues;
  for (const auto& id : g.duplicate_ids_) issues.push_back("duplicate node id '" + id + "'");

  const auto& nodes = g.nodes();
  const std::size_t count = nodes.size();
  Topology topo;
  topo.inputs.resize(count);
  topo.consumers.resize(count);

  for (std::size_t i = 0; i < count; ++i) {
    const Node& node = nodes[i];
    if (node.source && node.op) {
      issues.push_back("node '" + node.id + "' is both a source and an op");
    } else if (!node.source && !node.op) {
      issues.push_back(node.inputs.empty()
                           ? "source '" + node.id + "' has no distribution"
                           : "op node '" + node.id + "' has no function");
    }
    if (node.source) {
      topo.sources.push_back(i);
      if (!node.inputs.empty()) issues.push_back("source '" + node.id + "' has inputs");
      continue;
    }
    if (node.inputs.empty()) {
      issues.push_back("op node '" + node.id + "' has no inputs");
    }
    if (node.op && !node.inputs.empty() && !node.op->accepts(node.inputs.size())) {
      issues.push_back("op node '" + node.id + "' (" + to_string(node.op->kind()) + ") given " +
                       std::to_string(node.inputs.size()) + " inputs");
    }
    for (const auto& in : node.inputs) {
      const auto j = g.find(in);
      if (!j) {
        issues.push_back("node '" + node.id + "' reads unknown input '" + in + "'");
        continue;
      }
      topo.inputs[i].push_back(*j);
      topo.consumers[*j].push_back(i);
    }
  }

  bool terminal_ok = false;
  if (g.terminal().empty()) {
    issues.push_back("no terminal node set");
  } else if (const auto t = g.find(g.terminal()); !t) {
    issues.push_back("terminal '" + g.terminal() + "' is not a node");
  } else {
    topo.terminal = *t;
    terminal_ok = true;
    if (!topo.consumers[*t].empty()) {
      issues.push_back("terminal '" + g.terminal() + "' has outgoing edges");
    }
    if (nodes[*t].source || topo.inputs[*t].empty()) {
      issues.push_back("terminal '" + g.terminal() + "' has no inputs");
    }
  }

  // Kahn's algorithm, smallest declaration index first.
  std::vector<std::size_t> indegree(count, 0);
  for (std::size_t i = 0; i < count; ++i) indegree[i] = topo.inputs[i].size();
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < count; ++i) {
    if (indegree[i] == 0) ready.push(i);
  }
  while (!ready.empty()) {
    const std::size_t i = ready.top();
    ready.pop();
    topo.order.push_back(i);
    for (auto c : topo.consumers[i]) {
      if (--indegree[c] == 0) ready.push(c);
    }
  }
  if (topo.order.size() != count) {
    std::string members;
    for (std::size_t i = 0; i < count; ++i) {
      if (indegree[i] > 0) members += (members.empty() ? "'" : ", '") + nodes[i].id + "'";
    }
    issues.push_back("cycle through " + members);
  }

  if (terminal_ok) {
    std::vector<bool> reaches(count, false);
    std::vector<std::size_t> stack{topo.terminal};
    reaches[topo.terminal] = true;
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (auto u : topo.inputs[v]) {
        if (!reaches[u]) {
          reaches[u] = true;
          stack.push_back(u);
        }
      }
    }
    for (std::size_t i = 0; i < count; ++i) {
      if (!reaches[i]) issues.push_back("node '" + nodes[i].id + "' has no path to the terminal");
    }
  }

  if (!issues.empty()) throw ValidationError(std::move(issues));
  return topo;
}

namespace {

std::size_t source_index(const CompGraph& g, const Topology& topo, const std::string& source) {
  const auto s = g.find(source);
  if (!s || !g.nodes()[*s].is_source()) {
    throw InvalidArgument("graph: '" + source + "' is not a source node");
  }
  static_cast<void>(topo);
  return *s;
}

double lipschitz_of(const CompGraph& g, std::size_t v) {
  const Node& node = g.nodes()[v];
  const auto lip = node.op->lipschitz();
  if (!lip) {
    throw InvalidArgument("node '" + node.id + "' (" + std::string(to_string(node.op->kind())) +
                          ") has no Lipschitz constant; declare one with \"lip\"");
  }
  return *lip;
}

}  // namespace

PathEnumeration enumerate_paths(const CompGraph& g, const std::string& source, std::size_t cap) {
  const Topology topo = validate(g);
  const std::size_t s = source_index(g, topo, source);
  PathEnumeration out;
  std::vector<std::size_t> path{s};
  auto walk = [&](auto&& self, std::size_t v) -> void {
    if (v == topo.terminal) {
      if (out.count >= cap) {
        throw CapExceeded("path enumeration from '" + source + "' exceeds the cap of " +
                          std::to_string(cap) + " paths");
      }
      out.paths.push_back(path);
      ++out.count;
      return;
    }
    for (auto c : topo.consumers[v]) {
      path.push_back(c);
      self(self, c);
      path.pop_back();
    }
  };
  walk(walk, s);
  return out;
}

std::vector<std::uint64_t> path_counts(const CompGraph& g) {
  const Topology topo = validate(g);
  std::vector<std::uint64_t> count(g.nodes().size(), 0);
  count[topo.terminal] = 1;
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  for (auto it = topo.order.rbegin(); it != topo.order.rend(); ++it) {
    const std::size_t u = *it;
    if (u == topo.terminal) continue;
    std::uint64_t total = 0;
    for (auto v : topo.consumers[u]) {
      total = (kMax - total < count[v]) ? kMax : total + count[v];
    }
    count[u] = total;
  }
  return count;
}

std::vector<double> path_distortion_sums(const CompGraph& g) {
  const Topology topo = validate(g);
  std::vector<double> sum(g.nodes().size(), 0.0);
  sum[topo.terminal] = 1.0;
  for (auto it = topo.order.rbegin(); it != topo.order.rend(); ++it) {
    const std::size_t u = *it;
    if (u == topo.terminal) continue;
    double total = 0.0;
    for (auto v : topo.consumers[u]) total += lipschitz_of(g, v) * sum[v];
    sum[u] = total;
  }
  return sum;
}

double enumerated_distortion_sum(const CompGraph& g, const std::string& source,
                                 std::size_t cap) {
  const auto paths = enumerate_paths(g, source, cap);
  double total = 0.0;
  for (const auto& path : paths.paths) {
    double product = 1.0;
    for (std::size_t i = 1; i < path.size(); ++i) product *= lipschitz_of(g, path[i]);
    total += product;
  }
  return total;
}

unsigned depth(const CompGraph& g) {
  const Topology topo = validate(g);
  constexpr unsigned kUnreached = std::numeric_limits<unsigned>::max();
  std::vector<unsigned> dist(g.nodes().size(), kUnreached);
  std::deque<std::size_t> queue{topo.terminal};
  dist[topo.terminal] = 0;
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    for (auto u : topo.inputs[v]) {
      if (dist[u] == kUnreached) {
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
    }
  }
  unsigned result = 0;
  for (auto s : topo.sources) result = std::max(result, dist[s]);
  return result;
}

double compression_factor(CompressionConstant c, unsigned n) {
  const double base = std::ldexp(3.0, -static_cast<int>(n));
  return c == CompressionConstant::loose ? base : 0.5 * base;
}

BoundReport theorem1_bound(const CompGraph& g, unsigned n, CompressionConstant constant) {
  const Topology topo = validate(g);
  const auto sums = path_distortion_sums(g);
  BoundReport report;
  report.n = n;
  report.factor = compression_factor(constant, n);
  for (auto s : topo.sources) {
    const Node& node = g.nodes()[s];
    const auto q = quantize_source(*node.source, n);
    SourceBoundTerm term;
    term.source = node.id;
    term.quantization_error = quantization_error(*node.source, n);
    term.quantized_diameter = q.measure.diameter();
    term.distortion_sum = sums[s];
    term.term = (term.quantization_error + report.factor * term.quantized_diameter) *
                term.distortion_sum;
    report.total += term.term;
    report.sources.push_back(std::move(term));
  }
  return report;
}

double crude_bound(const CompGraph& g, unsigned n, CompressionConstant constant,
                   std::size_t path_cap) {
  const Topology topo = validate(g);
  const auto counts = path_counts(g);
  std::uint64_t total_paths = 0;
  for (auto s : topo.sources) {
    total_paths += counts[s];
    if (total_paths > path_cap || counts[s] > path_cap) {
      throw CapExceeded("crude bound: more than " + std::to_string(path_cap) +
                        " source-to-terminal paths");
    }
  }

  std::vector<double> worst(g.nodes().size(), 0.0);
  worst[topo.terminal] = 1.0;
  for (auto it = topo.order.rbegin(); it != topo.order.rend(); ++it) {
    const std::size_t u = *it;
    if (u == topo.terminal) continue;
    double best = 0.0;
    for (auto v : topo.consumers[u]) best = std::max(best, lipschitz_of(g, v) * worst[v]);
    worst[u] = best;
  }

  const BoundReport report = theorem1_bound(g, n, constant);
  double max_distortion = 0.0;
  double max_source = 0.0;
  for (std::size_t i = 0; i < topo.sources.size(); ++i) {
    max_distortion = std::max(max_distortion, worst[topo.sources[i]]);
    const auto& t = report.sources[i];
    max_source = std::max(max_source, t.quantization_error + report.factor * t.quantized_diameter);
  }
  return static_cast<double>(total_paths) * max_distortion * max_source;
}

}  // namespace qdcg
