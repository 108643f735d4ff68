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

#include "qdcg/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "detail/runs.hpp"
#include "detail/sum.hpp"
#include "qdcg/error.hpp"
#include "qdcg/gaussian.hpp"
#include "qdcg/integrate.hpp"

namespace qdcg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t atom_budget(unsigned n) {
  return n >= 63 ? std::numeric_limits<std::size_t>::max() : (std::size_t{1} << n);
}

std::int32_t add_cell(std::vector<Cell>* cells, const Cell& cell) {
  if (cells == nullptr) return -1;
  cells->push_back(cell);
  return static_cast<std::int32_t>(cells->size() - 1);
}

void link_children(std::vector<Cell>* cells, std::int32_t parent, std::int32_t left,
                   std::int32_t right) {
  if (cells == nullptr || parent < 0) return;
  (*cells)[static_cast<std::size_t>(parent)].left = left;
  (*cells)[static_cast<std::size_t>(parent)].right = right;
}

// ---------------------------------------------------------------------------
// Discrete point clouds.

struct CloudStats {
  double mass = 0.0;
  double moment = 0.0;
  double min = kInf;
  double max = -kInf;
};

// Plain sums over blocks of kBlock points, compensated across blocks.
class StatsAccumulator {
 public:
  void add(const Atom& p) noexcept {
    block_mass_ += p.weight;
    block_moment_ += p.weight * p.position;
    min_ = std::min(min_, p.position);
    max_ = std::max(max_, p.position);
    if (++count_ == kBlock) flush();
  }
  CloudStats stats() noexcept {
    flush();
    return {mass_.value(), moment_.value(), min_, max_};
  }

 private:
  static constexpr unsigned kBlock = 32;

  void flush() noexcept {
    mass_ += block_mass_;
    moment_ += block_moment_;
    block_mass_ = block_moment_ = 0.0;
    count_ = 0;
  }

  detail::CompensatedSum mass_;
  detail::CompensatedSum moment_;
  double block_mass_ = 0.0;
  double block_moment_ = 0.0;
  unsigned count_ = 0;
  double min_ = kInf;
  double max_ = -kInf;
};

CloudStats stats_of(std::span<const Atom> points) {
  StatsAccumulator acc;
  for (const auto& p : points) acc.add(p);
  return acc.stats();
}

// Rounding can push moment / mass just outside the cloud.
double cloud_mean(const CloudStats& s) { return std::clamp(s.moment / s.mass, s.min, s.max); }

class CloudQuantizer {
 public:
  CloudQuantizer(unsigned levels, bool sorted, std::vector<Cell>* cells, bool want_error)
      : levels_(levels), sorted_(sorted), cells_(cells), want_error_(want_error) {}

  void run(std::span<Atom> points) {
    const CloudStats s = stats_of(points);
    const std::int32_t root = add_cell(cells_, {-kInf, kInf, s.mass, cloud_mean(s)});
    visit(points, s, -kInf, kInf, 0, root);
  }

  std::vector<Atom>& output() { return out_; }
  double error() const { return error_.value(); }

 private:
  void visit(std::span<Atom> points, const CloudStats& s, double lower, double upper,
             unsigned depth, std::int32_t node) {
    const double mean = cloud_mean(s);
    if (depth == levels_ || s.max - s.min <= DiscreteMeasure::kMergeTolerance) {
      emit(points, s.mass, mean);
      return;
    }
    CloudStats ls, rs;
    const auto split = partition(points, mean, ls, rs);
    if (split == 0 || split == points.size()) {
      emit(points, s.mass, mean);
      return;
    }
    const std::int32_t li =
        add_cell(cells_, {lower, mean, ls.mass, cloud_mean(ls), -1, -1, depth + 1});
    const std::int32_t ri =
        add_cell(cells_, {mean, upper, rs.mass, cloud_mean(rs), -1, -1, depth + 1});
    link_children(cells_, node, li, ri);
    visit(points.first(split), ls, lower, mean, depth + 1, li);
    visit(points.subspan(split), rs, mean, upper, depth + 1, ri);
  }

  // Moves the points strictly below the split to the front, returns their
  // count and fills the statistics of both sides.
  std::size_t partition(std::span<Atom> points, double split, CloudStats& ls,
                        CloudStats& rs) const {
    const auto below = [split](const Atom& a) { return a.position < split; };
    if (sorted_) {
      const auto k = static_cast<std::size_t>(
          std::partition_point(points.begin(), points.end(), below) - points.begin());
      ls = stats_of(points.first(k));
      rs = stats_of(points.subspan(k));
      return k;
    }
    StatsAccumulator lacc, racc;
    std::size_t i = 0, j = points.size();
    while (true) {
      while (i < j && below(points[i])) lacc.add(points[i++]);
      while (i < j && !below(points[j - 1])) racc.add(points[--j]);
      if (i == j) break;
      std::swap(points[i], points[j - 1]);
      lacc.add(points[i++]);
      racc.add(points[--j]);
    }
    ls = lacc.stats();
    rs = racc.stats();
    return i;
  }

  void emit(std::span<const Atom> points, double mass, double mean) {
    out_.push_back({mean, mass});
    if (want_error_) {
      for (const auto& p : points) error_ += p.weight * std::fabs(p.position - mean);
    }
  }

  unsigned levels_;
  bool sorted_;
  std::vector<Cell>* cells_;
  bool want_error_;
  std::vector<Atom> out_;
  detail::CompensatedSum error_;
};

// Mean-split over a cloud stored as ascending runs. A cell is one index range
// per run; a split is a binary search per range, and only the child holding
// fewer points is summed directly.
class RunQuantizer {
 public:
  RunQuantizer(std::span<const Atom> points, unsigned levels) : points_(points), levels_(levels) {}

  void run(std::span<const std::size_t> run_starts) {
    std::vector<Range> root;
    for (std::size_t r = 0; r < run_starts.size(); ++r) {
      const std::size_t hi = r + 1 < run_starts.size() ? run_starts[r + 1] : points_.size();
      if (run_starts[r] < hi) root.push_back({run_starts[r], hi});
    }
    CloudStats s = stats(root);
    for (const auto& r : root) {
      s.min = std::min(s.min, points_[r.lo].position);
      s.max = std::max(s.max, points_[r.hi - 1].position);
    }
    visit(root, s);
  }

  std::vector<Atom>& output() { return out_; }

 private:
  struct Range {
    std::size_t lo, hi;
  };

  // Mass and moment only; plain sums over chunks of at most 64 points,
  // compensated across chunks.
  CloudStats stats(const std::vector<Range>& ranges) const {
    detail::CompensatedSum mass, moment;
    for (const auto& r : ranges) {
      for (std::size_t lo = r.lo; lo < r.hi; lo += 64) {
        const std::size_t hi = std::min(r.hi, lo + 64);
        double m = 0.0, x = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
          m += points_[i].weight;
          x += points_[i].weight * points_[i].position;
        }
        mass += m;
        moment += x;
      }
    }
    CloudStats s;
    s.mass = mass.value();
    s.moment = moment.value();
    return s;
  }

  void visit(const std::vector<Range>& ranges, const CloudStats& s, unsigned depth = 0) {
    const double mean = cloud_mean(s);
    if (depth == levels_ || s.max - s.min <= DiscreteMeasure::kMergeTolerance) {
      out_.push_back({mean, s.mass});
      return;
    }
    std::vector<Range> left(ranges.size()), right(ranges.size());
    std::size_t nl = 0, nr = 0;
    std::size_t left_count = 0, right_count = 0;
    CloudStats ls, rs;
    const Atom* base = points_.data();
    for (const auto& r : ranges) {
      std::size_t lo = r.lo, hi = r.hi;
      while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (base[mid].position < mean) {
          lo = mid + 1;
        } else {
          hi = mid;
        }
      }
      const std::size_t k = lo;
      if (k > r.lo) {
        left[nl++] = {r.lo, k};
        left_count += k - r.lo;
        ls.min = std::min(ls.min, base[r.lo].position);
        ls.max = std::max(ls.max, base[k - 1].position);
      }
      if (k < r.hi) {
        right[nr++] = {k, r.hi};
        right_count += r.hi - k;
        rs.min = std::min(rs.min, base[k].position);
        rs.max = std::max(rs.max, base[r.hi - 1].position);
      }
    }
    left.resize(nl);
    right.resize(nr);
    if (left.empty() || right.empty()) {
      out_.push_back({mean, s.mass});
      return;
    }
    // The complement is well conditioned only when it keeps most of the mass.
    const bool sum_left = left_count <= right_count;
    const CloudStats direct = stats(sum_left ? left : right);
    CloudStats& small = sum_left ? ls : rs;
    CloudStats& large = sum_left ? rs : ls;
    small.mass = direct.mass;
    small.moment = direct.moment;
    if (2.0 * direct.mass <= s.mass) {
      large.mass = s.mass - direct.mass;
      large.moment = s.moment - direct.moment;
    } else {
      const CloudStats other = stats(sum_left ? right : left);
      large.mass = other.mass;
      large.moment = other.moment;
    }
    visit(left, ls, depth + 1);
    visit(right, rs, depth + 1);
  }

  std::span<const Atom> points_;
  unsigned levels_;
  std::vector<Atom> out_;
};

std::vector<Atom> to_points(const DiscreteMeasure& m) {
  std::vector<Atom> points(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) points[i] = {m.atoms()[i], m.weights()[i]};
  return points;
}

// Number of positions that stay distinct under the merge tolerance, counted
// only up to limit + 1.
std::size_t distinct_up_to(std::span<const Atom> points, std::size_t limit) {
  std::set<double> seen;
  for (const auto& p : points) {
    const auto it = seen.lower_bound(p.position - DiscreteMeasure::kMergeTolerance);
    if (it != seen.end() && *it <= p.position + DiscreteMeasure::kMergeTolerance) continue;
    seen.insert(p.position);
    if (seen.size() > limit) break;
  }
  return seen.size();
}

// ---------------------------------------------------------------------------
// Continuous laws with closed-form cells. The standard normal and uniform
// recursions run on [lo, hi) in the law's own coordinates.

struct CellIntegrals {
  // mass, first moment and absolute deviation about a centre on [lo, hi).
  std::function<double(double, double)> mass;
  std::function<double(double, double)> moment;
  std::function<double(double, double, double)> abs_deviation;
};

class IntervalQuantizer {
 public:
  IntervalQuantizer(unsigned levels, CellIntegrals integrals, std::vector<Cell>* cells,
                    bool want_error)
      : levels_(levels), f_(std::move(integrals)), cells_(cells), want_error_(want_error) {}

  void run(double lo, double hi) {
    const double mass = f_.mass(lo, hi);
    const double mean = f_.moment(lo, hi) / mass;
    const std::int32_t root = add_cell(cells_, {-kInf, kInf, mass, mean});
    visit(lo, hi, mass, mean, 0, root);
  }

  std::vector<Atom>& output() { return out_; }
  double error() const { return error_.value(); }

 private:
  void visit(double lo, double hi, double mass, double mean, unsigned depth, std::int32_t node) {
    if (depth == levels_) {
      emit(lo, hi, mass, mean);
      return;
    }
    const double left_mass = f_.mass(lo, mean);
    const double right_mass = f_.mass(mean, hi);
    if (!(left_mass > 0.0) || !(right_mass > 0.0)) {
      emit(lo, hi, mass, mean);
      return;
    }
    const double left_mean = std::clamp(f_.moment(lo, mean) / left_mass, lo, mean);
    const double right_mean = std::clamp(f_.moment(mean, hi) / right_mass, mean, hi);
    const Cell* parent = cells_ ? &(*cells_)[static_cast<std::size_t>(node)] : nullptr;
    const double lower = parent ? parent->lower : lo;
    const double upper = parent ? parent->upper : hi;
    const std::int32_t li =
        add_cell(cells_, {lower, mean, left_mass, left_mean, -1, -1, depth + 1});
    const std::int32_t ri =
        add_cell(cells_, {mean, upper, right_mass, right_mean, -1, -1, depth + 1});
    link_children(cells_, node, li, ri);
    visit(lo, mean, left_mass, left_mean, depth + 1, li);
    visit(mean, hi, right_mass, right_mean, depth + 1, ri);
  }

  void emit(double lo, double hi, double mass, double mean) {
    out_.push_back({mean, mass});
    if (want_error_) error_ += f_.abs_deviation(lo, hi, mean);
  }

  unsigned levels_;
  CellIntegrals f_;
  std::vector<Cell>* cells_;
  bool want_error_;
  std::vector<Atom> out_;
  detail::CompensatedSum error_;
};

CellIntegrals standard_normal_integrals() {
  return {gaussian::cell_mass, gaussian::cell_partial_mean, gaussian::cell_abs_deviation};
}

CellIntegrals uniform_integrals(double lo, double hi) {
  const double width = hi - lo;
  auto clip = [lo, hi](double a, double b) {
    return std::pair{std::clamp(a, lo, hi), std::clamp(b, lo, hi)};
  };
  return {[=](double a, double b) {
            const auto [l, h] = clip(a, b);
            return (h - l) / width;
          },
          [=](double a, double b) {
            const auto [l, h] = clip(a, b);
            return 0.5 * (h * h - l * l) / width;
          },
          [=](double a, double b, double c) {
            const auto [l, h] = clip(a, b);
            return 0.5 * ((c - l) * (c - l) + (h - c) * (h - c)) / width;
          }};
}

// ---------------------------------------------------------------------------
// Quantile-function laws: cells live in probability space (u_lo, u_hi).

class QuantileQuantizer {
 public:
  QuantileQuantizer(unsigned levels, const std::function<double(double)>& q,
                    std::vector<Cell>* cells, bool want_error, std::string label)
      : levels_(levels), q_(q), cells_(cells), want_error_(want_error), label_(std::move(label)) {}

  void run() {
    const double mean = integral(0.0, 1.0);
    const std::int32_t root = add_cell(cells_, {-kInf, kInf, 1.0, mean});
    visit(0.0, 1.0, mean, -kInf, kInf, 0, root);
  }

  std::vector<Atom>& output() { return out_; }
  double error() const { return error_.value(); }

 private:
  double integral(double lo, double hi) const {
    const auto r = integrate(q_, lo, hi, kQuantileCellTolerance);
    if (!r.converged) {
      throw NumericalError("quantile source '" + label_ +
                           "': cell integral did not reach tolerance (non-integrable tail?)");
    }
    return r.value;
  }

  // inf{u in (lo, hi) : Q(u) >= level}.
  double crossing(double lo, double hi, double level) const {
    double a = lo;
    double b = hi;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      if (q_(mid) >= level) {
        b = mid;
      } else {
        a = mid;
      }
    }
    return b;
  }

  void visit(double u_lo, double u_hi, double mean, double lower, double upper, unsigned depth,
             std::int32_t node) {
    const double mass = u_hi - u_lo;
    if (depth == levels_) {
      emit(u_lo, u_hi, mean);
      return;
    }
    const double u_mid = crossing(u_lo, u_hi, mean);
    const double slack = 1e-14 * mass;
    if (u_mid - u_lo <= slack || u_hi - u_mid <= slack) {
      emit(u_lo, u_hi, mean);
      return;
    }
    const double left_mean = integral(u_lo, u_mid) / (u_mid - u_lo);
    const double right_mean = integral(u_mid, u_hi) / (u_hi - u_mid);
    const std::int32_t li =
        add_cell(cells_, {lower, mean, u_mid - u_lo, left_mean, -1, -1, depth + 1});
    const std::int32_t ri =
        add_cell(cells_, {mean, upper, u_hi - u_mid, right_mean, -1, -1, depth + 1});
    link_children(cells_, node, li, ri);
    visit(u_lo, u_mid, left_mean, lower, mean, depth + 1, li);
    visit(u_mid, u_hi, right_mean, mean, upper, depth + 1, ri);
  }

  void emit(double u_lo, double u_hi, double mean) {
    out_.push_back({mean, u_hi - u_lo});
    if (!want_error_) return;
    const double u_c = crossing(u_lo, u_hi, mean);
    const double below = mean * (u_c - u_lo) - integral(u_lo, u_c);
    const double above = integral(u_c, u_hi) - mean * (u_hi - u_c);
    error_ += std::max(0.0, below) + std::max(0.0, above);
  }

  unsigned levels_;
  const std::function<double(double)>& q_;
  std::vector<Cell>* cells_;
  bool want_error_;
  std::string label_;
  std::vector<Atom> out_;
  detail::CompensatedSum error_;
};

struct SourceRun {
  std::vector<Atom> atoms;
  double error = 0.0;
};

SourceRun run_source(const SourceSpec& source, unsigned n, std::vector<Cell>* cells,
                     bool want_error) {
  return std::visit(
      [&](const auto& s) -> SourceRun {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, DiscreteSource>) {
          CloudQuantizer q(n, true, cells, want_error);
          auto points = to_points(s.measure);
          q.run(points);
          return {std::move(q.output()), q.error()};
        } else if constexpr (std::is_same_v<T, GaussianSource>) {
          IntervalQuantizer q(n, standard_normal_integrals(), cells, want_error);
          q.run(-kInf, kInf);
          auto atoms = std::move(q.output());
          for (auto& a : atoms) a.position = s.mean + s.std * a.position;
          if (cells != nullptr) {
            for (auto& c : *cells) {
              c.lower = s.mean + s.std * c.lower;
              c.upper = s.mean + s.std * c.upper;
              c.mean = s.mean + s.std * c.mean;
            }
          }
          return {std::move(atoms), s.std * q.error()};
        } else if constexpr (std::is_same_v<T, UniformSource>) {
          IntervalQuantizer q(n, uniform_integrals(s.lo, s.hi), cells, want_error);
          q.run(s.lo, s.hi);
          return {std::move(q.output()), q.error()};
        } else {
          static_cast<void>(source.mean());  // integrability check
          QuantileQuantizer q(n, s.quantile, cells, want_error, s.label);
          q.run();
          return {std::move(q.output()), q.error()};
        }
      },
      source.variant());
}

}  // namespace

std::vector<std::size_t> CellTree::leaves() const {
  std::vector<std::size_t> out;
  if (cells_.empty()) return out;
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    const Cell& c = cells_[i];
    if (c.is_leaf()) {
      out.push_back(i);
    } else {
      stack.push_back(static_cast<std::size_t>(c.right));
      stack.push_back(static_cast<std::size_t>(c.left));
    }
  }
  return out;
}

std::uint32_t CellTree::height() const {
  std::uint32_t h = 0;
  for (const auto& c : cells_) h = std::max(h, c.depth);
  return h;
}

std::string CellTree::to_json() const {
  std::ostringstream out;
  out.precision(17);
  auto bound = [&out](double x) {
    if (std::isinf(x)) {
      out << (x > 0 ? "\"inf\"" : "\"-inf\"");
    } else {
      out << x;
    }
  };
  auto write = [&](auto&& self, std::size_t i) -> void {
    const Cell& c = cells_[i];
    out << "{\"interval\":[";
    bound(c.lower);
    out << ',';
    bound(c.upper);
    out << "],\"mass\":" << c.mass << ",\"mean\":" << c.mean;
    if (!c.is_leaf()) {
      out << ",\"children\":[";
      self(self, static_cast<std::size_t>(c.left));
      out << ',';
      self(self, static_cast<std::size_t>(c.right));
      out << ']';
    }
    out << '}';
  };
  if (!cells_.empty()) write(write, 0);
  return out.str();
}

DiscreteMeasure quantize_discrete(const DiscreteMeasure& m, unsigned n, CellTree* tree) {
  std::vector<Cell> cells;
  CloudQuantizer q(n, true, tree ? &cells : nullptr, false);
  auto points = to_points(m);
  q.run(points);
  if (tree != nullptr) *tree = CellTree(std::move(cells));
  return DiscreteMeasure(std::move(q.output()));
}

DiscreteMeasure compress(const DiscreteMeasure& m, unsigned n) {
  if (m.size() <= atom_budget(n)) return m;
  return quantize_discrete(m, n);
}

DiscreteMeasure compress_points(std::vector<Atom> points, unsigned n) {
  if (points.empty()) throw InvalidArgument("compress: empty point cloud");
  const std::size_t budget = atom_budget(n);
  if (points.size() <= budget || distinct_up_to(points, budget) <= budget) {
    return DiscreteMeasure(std::move(points));
  }
  CloudQuantizer q(n, false, nullptr, false);
  q.run(points);
  return DiscreteMeasure(std::move(q.output()));
}

DiscreteMeasure detail::compress_sorted_runs(std::span<const Atom> points,
                                             std::span<const std::size_t> run_starts,
                                             unsigned n) {
  if (points.empty()) throw InvalidArgument("compress: empty point cloud");
  const std::size_t budget = atom_budget(n);
  if (points.size() <= budget || distinct_up_to(points, budget) <= budget) {
    return DiscreteMeasure(std::vector<Atom>(points.begin(), points.end()));
  }
  for (std::size_t r = 0; r < run_starts.size(); ++r) {
    const std::size_t hi = r + 1 < run_starts.size() ? run_starts[r + 1] : points.size();
    if (run_starts[r] > hi || hi > points.size()) {
      throw InvalidArgument("compress: run starts must be ascending and within the cloud");
    }
  }
  if (run_starts.empty() || run_starts.front() != 0) {
    throw InvalidArgument("compress: first run must start at 0");
  }
  RunQuantizer q(points, n);
  q.run(run_starts);
  return DiscreteMeasure(std::move(q.output()));
}

double cell_coupling_error(const DiscreteMeasure& m, unsigned n) {
  CellTree tree;
  quantize_discrete(m, n, &tree);
  const auto leaves = tree.leaves();
  std::vector<double> lowers;
  lowers.reserve(leaves.size());
  for (auto i : leaves) lowers.push_back(tree.cells()[i].lower);
  detail::CompensatedSum total;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double x = m.atoms()[i];
    const auto it = std::upper_bound(lowers.begin(), lowers.end(), x);
    const auto leaf = leaves[static_cast<std::size_t>(it - lowers.begin()) - 1];
    total += m.weights()[i] * std::fabs(x - tree.cells()[leaf].mean);
  }
  return total.value();
}

Quantization quantize_source(const SourceSpec& source, unsigned n) {
  std::vector<Cell> cells;
  auto run = run_source(source, n, &cells, false);
  return {DiscreteMeasure(std::move(run.atoms)), CellTree(std::move(cells))};
}

double quantization_error(const SourceSpec& source, unsigned n) {
  return run_source(source, n, nullptr, true).error;
}

}  // namespace qdcg
