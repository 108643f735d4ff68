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

#include "qdcg/engine.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <unordered_map>

#include "qdcg/error.hpp"
#include "qdcg/quantize.hpp"
#include "qdcg/rng.hpp"

namespace qdcg {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string cap_message(const std::string& what, std::size_t size, std::size_t cap) {
  return what + " needs " + std::to_string(size) + " joint atoms, above the cap of " +
         std::to_string(cap) + " (raise it with --atom-cap)";
}

std::optional<std::size_t> marginal_index(const CompGraph& g, const EvalOptions& options) {
  if (!options.marginal_node) return std::nullopt;
  const auto i = g.find(*options.marginal_node);
  if (!i) throw InvalidArgument("eval: no node '" + *options.marginal_node + "' for --node");
  return i;
}

std::vector<DiscreteMeasure> source_laws(const CompGraph& g, const Topology& topo,
                                         std::optional<unsigned> level) {
  std::vector<DiscreteMeasure> laws;
  laws.reserve(topo.sources.size());
  for (auto s : topo.sources) {
    const Node& node = g.nodes()[s];
    if (level) {
      laws.push_back(quantize_source(*node.source, *level).measure);
    } else if (const auto* d = std::get_if<DiscreteSource>(&node.source->variant())) {
      laws.push_back(d->measure);
    } else {
      throw InvalidArgument("eval: source '" + node.id + "' is continuous (" +
                            node.source->describe() + "); give a quantization level");
    }
  }
  return laws;
}

// ---------------------------------------------------------------------------
// Joint table over the frontier.

class JointTable {
 public:
  std::size_t rows() const noexcept { return weights_.size(); }
  std::size_t width() const noexcept { return columns_.size(); }
  const std::vector<std::size_t>& columns() const noexcept { return columns_; }
  bool has(std::size_t node) const {
    return std::find(columns_.begin(), columns_.end(), node) != columns_.end();
  }
  std::size_t position(std::size_t node) const {
    return static_cast<std::size_t>(std::find(columns_.begin(), columns_.end(), node) -
                                    columns_.begin());
  }
  double value(std::size_t row, std::size_t col) const { return cells_[row * width() + col]; }
  double weight(std::size_t row) const { return weights_[row]; }

  // Product with an independent law on a new column.
  void introduce(std::size_t node, const DiscreteMeasure& law) {
    if (columns_.empty()) {
      columns_ = {node};
      cells_.assign(law.atoms().begin(), law.atoms().end());
      weights_.assign(law.weights().begin(), law.weights().end());
      return;
    }
    const std::size_t old_width = width();
    std::vector<double> cells;
    std::vector<double> weights;
    cells.reserve(rows() * law.size() * (old_width + 1));
    weights.reserve(rows() * law.size());
    for (std::size_t r = 0; r < rows(); ++r) {
      for (std::size_t a = 0; a < law.size(); ++a) {
        cells.insert(cells.end(), cells_.begin() + static_cast<std::ptrdiff_t>(r * old_width),
                     cells_.begin() + static_cast<std::ptrdiff_t>((r + 1) * old_width));
        cells.push_back(law.atoms()[a]);
        weights.push_back(weights_[r] * law.weights()[a]);
      }
    }
    columns_.push_back(node);
    cells_ = std::move(cells);
    weights_ = std::move(weights);
  }

  void append(std::size_t node, const std::vector<double>& values) {
    const std::size_t old_width = width();
    std::vector<double> cells;
    cells.reserve(rows() * (old_width + 1));
    for (std::size_t r = 0; r < rows(); ++r) {
      cells.insert(cells.end(), cells_.begin() + static_cast<std::ptrdiff_t>(r * old_width),
                   cells_.begin() + static_cast<std::ptrdiff_t>((r + 1) * old_width));
      cells.push_back(values[r]);
    }
    columns_.push_back(node);
    cells_ = std::move(cells);
  }

  // Keeps the listed columns and merges rows that became identical.
  void project(const std::vector<std::size_t>& keep) {
    std::vector<std::size_t> positions;
    for (auto node : keep) positions.push_back(position(node));
    const std::size_t w = positions.size();
    std::vector<double> cells(rows() * w);
    for (std::size_t r = 0; r < rows(); ++r) {
      for (std::size_t c = 0; c < w; ++c) cells[r * w + c] = value(r, positions[c]);
    }
    std::vector<std::size_t> idx(rows());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    auto row_less = [&](std::size_t a, std::size_t b) {
      return std::lexicographical_compare(cells.begin() + static_cast<std::ptrdiff_t>(a * w),
                                          cells.begin() + static_cast<std::ptrdiff_t>((a + 1) * w),
                                          cells.begin() + static_cast<std::ptrdiff_t>(b * w),
                                          cells.begin() + static_cast<std::ptrdiff_t>((b + 1) * w));
    };
    std::sort(idx.begin(), idx.end(), row_less);
    std::vector<double> merged_cells;
    std::vector<double> merged_weights;
    merged_cells.reserve(cells.size());
    merged_weights.reserve(rows());
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const std::size_t r = idx[k];
      const bool same = k > 0 && !row_less(idx[k - 1], r);
      if (same) {
        merged_weights.back() += weights_[r];
      } else {
        merged_cells.insert(merged_cells.end(), cells.begin() + static_cast<std::ptrdiff_t>(r * w),
                            cells.begin() + static_cast<std::ptrdiff_t>((r + 1) * w));
        merged_weights.push_back(weights_[r]);
      }
    }
    columns_ = keep;
    cells_ = std::move(merged_cells);
    weights_ = std::move(merged_weights);
  }

  std::vector<Atom> column_points(std::size_t node) const {
    const std::size_t c = position(node);
    std::vector<Atom> points(rows());
    for (std::size_t r = 0; r < rows(); ++r) points[r] = {value(r, c), weights_[r]};
    return points;
  }

  void reset(std::size_t node, const DiscreteMeasure& law) {
    columns_.clear();
    introduce(node, law);
  }

 private:
  std::vector<std::size_t> columns_;
  std::vector<double> cells_;
  std::vector<double> weights_;
};

}  // namespace

EvalResult eval_exact_joint(const CompGraph& g, std::optional<unsigned> quantize_sources_at,
                            const EvalOptions& options) {
  const auto start = Clock::now();
  const Topology topo = validate(g);
  const auto laws = source_laws(g, topo, quantize_sources_at);
  const auto wanted = marginal_index(g, options);

  std::size_t tuples = 1;
  for (const auto& law : laws) {
    if (law.size() > options.atom_cap / tuples) {
      throw CapExceeded(cap_message("exact joint enumeration", tuples * law.size(),
                                    options.atom_cap));
    }
    tuples *= law.size();
  }

  std::vector<std::size_t> ops;
  for (auto v : topo.order) {
    if (!g.nodes()[v].is_source()) ops.push_back(v);
  }

  std::vector<double> values(g.nodes().size(), 0.0);
  std::vector<std::size_t> digit(laws.size(), 0);
  std::vector<double> buffer;
  std::vector<Atom> terminal_points;
  std::vector<Atom> marginal_points;
  terminal_points.reserve(tuples);
  for (std::size_t t = 0; t < tuples; ++t) {
    double weight = 1.0;
    for (std::size_t s = 0; s < laws.size(); ++s) {
      values[topo.sources[s]] = laws[s].atoms()[digit[s]];
      weight *= laws[s].weights()[digit[s]];
    }
    for (auto v : ops) {
      buffer.clear();
      for (auto u : topo.inputs[v]) buffer.push_back(values[u]);
      values[v] = g.nodes()[v].op->evaluate(buffer);
    }
    terminal_points.push_back({values[topo.terminal], weight});
    if (wanted) marginal_points.push_back({values[*wanted], weight});
    // Odometer, last source fastest.
    for (std::size_t s = laws.size(); s-- > 0;) {
      if (++digit[s] < laws[s].size()) break;
      digit[s] = 0;
    }
  }

  EvalResult result{DiscreteMeasure(std::move(terminal_points)), std::nullopt, {}, {}};
  if (wanted) result.marginal = DiscreteMeasure(std::move(marginal_points));
  result.stats.push_back({g.terminal(), tuples, result.terminal.size(), false, false,
                          elapsed_ms(start)});
  return result;
}

EvalResult eval_cq(const CompGraph& g, unsigned n, const EvalOptions& options) {
  const Topology topo = validate(g);
  const auto laws = source_laws(g, topo, n);
  const auto wanted = marginal_index(g, options);

  std::vector<std::size_t> law_of(g.nodes().size(), 0);
  for (std::size_t s = 0; s < topo.sources.size(); ++s) law_of[topo.sources[s]] = s;

  std::vector<std::size_t> remaining(g.nodes().size(), 0);
  for (std::size_t v = 0; v < g.nodes().size(); ++v) remaining[v] = topo.consumers[v].size();

  EvalResult result{DiscreteMeasure::point_mass(0.0), std::nullopt, {}, {}};
  if (wanted && g.nodes()[*wanted].is_source()) result.marginal = laws[law_of[*wanted]];

  JointTable table;
  std::vector<double> buffer;
  for (auto v : topo.order) {
    const Node& node = g.nodes()[v];
    if (node.is_source()) continue;
    const auto start = Clock::now();

    for (auto u : topo.inputs[v]) {
      if (table.has(u)) continue;
      const auto& law = laws[law_of[u]];
      if (table.rows() > 0 && law.size() > options.atom_cap / table.rows()) {
        throw CapExceeded(cap_message("node '" + node.id + "'", table.rows() * law.size(),
                                      options.atom_cap));
      }
      table.introduce(u, law);
    }

    std::vector<std::size_t> positions;
    for (auto u : topo.inputs[v]) positions.push_back(table.position(u));
    std::vector<double> column(table.rows());
    for (std::size_t r = 0; r < table.rows(); ++r) {
      buffer.clear();
      for (auto p : positions) buffer.push_back(table.value(r, p));
      column[r] = node.op->evaluate(buffer);
    }
    table.append(v, column);

    NodeStats stats;
    stats.id = node.id;
    stats.joint_atoms = table.rows();

    for (auto u : topo.inputs[v]) --remaining[u];
    std::vector<std::size_t> keep;
    for (auto c : table.columns()) {
      if (c == v || remaining[c] > 0) keep.push_back(c);
    }

    if (keep.size() == 1) {
      stats.cut_vertex = true;
      auto points = table.column_points(v);
      DiscreteMeasure law = compress_points(std::move(points), n);
      stats.compressed = law.size() < stats.joint_atoms && stats.joint_atoms > (std::size_t{1} << n);
      stats.support = law.size();
      if (wanted && *wanted == v) result.marginal = law;
      table.reset(v, law);
    } else {
      if (wanted && *wanted == v) result.marginal = DiscreteMeasure(table.column_points(v));
      table.project(keep);
    }
    stats.wall_ms = elapsed_ms(start);
    result.stats.push_back(std::move(stats));
  }

  result.terminal = DiscreteMeasure(table.column_points(topo.terminal));
  return result;
}

EvalResult eval_mc(const CompGraph& g, std::size_t samples, std::uint64_t seed,
                   const EvalOptions& options) {
  if (samples == 0) throw InvalidArgument("eval mc: samples must be positive");
  const auto start = Clock::now();
  const Topology topo = validate(g);
  const auto wanted = marginal_index(g, options);

  std::vector<std::size_t> ops;
  for (auto v : topo.order) {
    if (!g.nodes()[v].is_source()) ops.push_back(v);
  }

  std::vector<double> values(g.nodes().size(), 0.0);
  std::vector<double> buffer;
  std::vector<double> out(samples);
  std::vector<double> marginal;
  if (wanted) marginal.resize(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    for (std::size_t s = 0; s < topo.sources.size(); ++s) {
      const double u =
          rng::uniform_pair(seed, i, rng::kGraphSourceStreamBase + static_cast<std::uint32_t>(s))[0];
      values[topo.sources[s]] = g.nodes()[topo.sources[s]].source->sample(u);
    }
    for (auto v : ops) {
      buffer.clear();
      for (auto u : topo.inputs[v]) buffer.push_back(values[u]);
      values[v] = g.nodes()[v].op->evaluate(buffer);
    }
    out[i] = values[topo.terminal];
    if (wanted) marginal[i] = values[*wanted];
  }

  EvalResult result{empirical_from_samples(out), std::nullopt, std::move(out), {}};
  if (wanted) result.marginal = empirical_from_samples(marginal);
  result.stats.push_back({g.terminal(), samples, result.terminal.size(), false, false,
                          elapsed_ms(start)});
  return result;
}

CompGraph build_bubble_sort_graph(std::span<const SourceSpec> sources, unsigned k) {
  const std::size_t m = sources.size();
  if (m < 2) throw InvalidArgument("bubble sort graph: need at least two sources");
  if (k < 1 || k > m) throw InvalidArgument("bubble sort graph: k must be in 1..#sources");

  std::vector<Node> nodes;
  std::vector<std::string> current;
  for (std::size_t j = 0; j < m; ++j) {
    current.push_back("x" + std::to_string(j));
    nodes.push_back(Node{current.back(), sources[j], std::nullopt, {}});
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j + i + 1 < m; ++j) {
      const std::string suffix = std::to_string(i) + "_" + std::to_string(j);
      const std::vector<std::string> pair{current[j], current[j + 1]};
      nodes.push_back(Node{"min_" + suffix, std::nullopt, NodeOp::min(), pair});
      nodes.push_back(Node{"max_" + suffix, std::nullopt, NodeOp::max(), pair});
      current[j] = "min_" + suffix;
      current[j + 1] = "max_" + suffix;
    }
  }
  const std::string terminal = current[k - 1];

  // Keep only ancestors of the terminal.
  std::unordered_map<std::string, std::size_t> where;
  for (std::size_t i = 0; i < nodes.size(); ++i) where[nodes[i].id] = i;
  std::vector<bool> keep(nodes.size(), false);
  std::vector<std::size_t> stack{where.at(terminal)};
  keep[stack.back()] = true;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (const auto& in : nodes[v].inputs) {
      const std::size_t u = where.at(in);
      if (!keep[u]) {
        keep[u] = true;
        stack.push_back(u);
      }
    }
  }
  CompGraph g;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (keep[i]) g.add_node(std::move(nodes[i]));
  }
  g.set_terminal(terminal);
  return g;
}

}  // namespace qdcg
