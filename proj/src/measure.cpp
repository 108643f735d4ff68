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

#include "qdcg/measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "detail/sum.hpp"
#include "qdcg/error.hpp"

namespace qdcg {

namespace {

// Sums closer to one than this are left untouched so that rebuilding a valid
// measure is the identity.
constexpr double kExactSumSlack = 1e-13;

}  // namespace

DiscreteMeasure::DiscreteMeasure(std::span<const double> atoms,
                                 std::span<const double> weights) {
  if (atoms.size() != weights.size()) {
    throw InvalidArgument("measure: atoms and weights differ in length (" +
                          std::to_string(atoms.size()) + " vs " +
                          std::to_string(weights.size()) + ")");
  }
  std::vector<Atom> pairs(atoms.size());
  for (std::size_t i = 0; i < atoms.size(); ++i) pairs[i] = {atoms[i], weights[i]};
  build(std::move(pairs));
}

DiscreteMeasure::DiscreteMeasure(std::vector<Atom> atoms) { build(std::move(atoms)); }

DiscreteMeasure DiscreteMeasure::point_mass(double position) {
  return DiscreteMeasure(std::vector<Atom>{{position, 1.0}});
}

DiscreteMeasure DiscreteMeasure::uniform(std::span<const double> positions) {
  std::vector<Atom> pairs;
  pairs.reserve(positions.size());
  const double w = 1.0 / static_cast<double>(positions.size());
  for (double x : positions) pairs.push_back({x, w});
  return DiscreteMeasure(std::move(pairs));
}

void DiscreteMeasure::build(std::vector<Atom> atoms) {
  for (const auto& a : atoms) {
    if (!std::isfinite(a.position)) throw InvalidArgument("measure: non-finite atom position");
    if (!std::isfinite(a.weight) || a.weight < 0.0) {
      throw InvalidArgument("measure: weights must be finite and nonnegative");
    }
  }
  std::erase_if(atoms, [](const Atom& a) { return a.weight == 0.0; });
  if (atoms.empty()) throw InvalidArgument("measure: no atom with positive weight");

  if (!std::is_sorted(atoms.begin(), atoms.end(),
                      [](const Atom& l, const Atom& r) { return l.position < r.position; })) {
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& l, const Atom& r) { return l.position < r.position; });
  }

  atoms_.clear();
  weights_.clear();
  atoms_.reserve(atoms.size());
  weights_.reserve(atoms.size());

  // Groups are formed against the running merged position, which keeps the
  // output gaps above the tolerance and makes the pass idempotent.
  std::size_t i = 0;
  while (i < atoms.size()) {
    double position = atoms[i].position;
    double weight = atoms[i].weight;
    std::size_t j = i + 1;
    if (j < atoms.size() && atoms[j].position - position <= kMergeTolerance) {
      double moment = position * weight;
      while (j < atoms.size() && atoms[j].position - position <= kMergeTolerance) {
        moment += atoms[j].position * atoms[j].weight;
        weight += atoms[j].weight;
        position = std::clamp(moment / weight, atoms[i].position, atoms[j].position);
        ++j;
      }
    }
    atoms_.push_back(position);
    weights_.push_back(weight);
    i = j;
  }

  detail::CompensatedSum total;
  for (double w : weights_) total += w;
  const double sum = total.value();
  if (std::fabs(sum - 1.0) > kNormalizationTolerance) {
    throw InvalidArgument("measure: weights sum to " + std::to_string(sum) + ", not 1");
  }
  if (std::fabs(sum - 1.0) > kExactSumSlack) {
    for (double& w : weights_) w /= sum;
  }
}

double DiscreteMeasure::mean() const {
  detail::CompensatedSum s;
  for (std::size_t i = 0; i < atoms_.size(); ++i) s += atoms_[i] * weights_[i];
  return s.value();
}

double DiscreteMeasure::cdf_at(double x) const {
  const auto end = std::upper_bound(atoms_.begin(), atoms_.end(), x);
  const auto count = static_cast<std::size_t>(end - atoms_.begin());
  if (count == atoms_.size()) return 1.0;
  detail::CompensatedSum s;
  for (std::size_t i = 0; i < count; ++i) s += weights_[i];
  return std::min(1.0, s.value());
}

double DiscreteMeasure::quantile(double u) const {
  double cumulative = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    cumulative += weights_[i];
    if (cumulative >= u) return atoms_[i];
  }
  return atoms_.back();
}

double wasserstein1(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  const auto xa = a.atoms();
  const auto wa = a.weights();
  const auto xb = b.atoms();
  const auto wb = b.weights();
  std::size_t i = 0;
  std::size_t j = 0;
  double fa = 0.0;
  double fb = 0.0;
  double previous = std::min(xa[0], xb[0]);
  detail::CompensatedSum total;
  while (i < xa.size() || j < xb.size()) {
    const double next = (j == xb.size() || (i < xa.size() && xa[i] <= xb[j])) ? xa[i] : xb[j];
    total += std::fabs(fa - fb) * (next - previous);
    while (i < xa.size() && xa[i] == next) fa += wa[i++];
    while (j < xb.size() && xb[j] == next) fb += wb[j++];
    previous = next;
  }
  return total.value();
}

double wasserstein1(const DiscreteMeasure& m, const ContinuousLaw& law) {
  const auto x = m.atoms();
  const auto w = m.weights();
  const double inf = std::numeric_limits<double>::infinity();

  // Integral of the law's CDF over [lo, hi] by parts.
  auto integrated_cdf = [&](double lo, double hi) {
    return hi * law.cdf(hi) - lo * law.cdf(lo) - law.partial_mean(lo, hi);
  };

  detail::CompensatedSum total;
  total += std::max(0.0, x[0] * law.cdf(x[0]) - law.partial_mean(-inf, x[0]));
  double level = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    level += w[i];
    const double lo = x[i];
    const double hi = x[i + 1];
    const double cross = std::clamp(law.quantile(std::min(level, 1.0)), lo, hi);
    const double below = level * (cross - lo) - integrated_cdf(lo, cross);
    const double above = integrated_cdf(cross, hi) - level * (hi - cross);
    total += std::max(0.0, below) + std::max(0.0, above);
  }
  const double last = x.back();
  total += std::max(0.0, law.partial_mean(last, inf) - last * (1.0 - law.cdf(last)));
  return total.value();
}

DiscreteMeasure empirical_from_samples(std::span<const double> samples) {
  if (samples.empty()) throw InvalidArgument("empirical measure: no samples");
  std::vector<Atom> atoms;
  atoms.reserve(samples.size());
  const double w = 1.0 / static_cast<double>(samples.size());
  for (double s : samples) atoms.push_back({s, w});
  return DiscreteMeasure(std::move(atoms));
}

void write_csv(std::ostream& out, const DiscreteMeasure& m,
               std::span<const std::string> comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "atom,weight\n";
  char buffer[64];
  for (std::size_t i = 0; i < m.size(); ++i) {
    std::snprintf(buffer, sizeof buffer, "%.17g,%.17g\n", m.atoms()[i], m.weights()[i]);
    out << buffer;
  }
}

DiscreteMeasure read_csv(std::istream& in) {
  std::vector<double> atoms;
  std::vector<double> weights;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      if (line == "atom,weight") continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw IoError("measure csv: line " + std::to_string(line_no) + " has no comma");
    }
    char* end = nullptr;
    const std::string a = line.substr(0, comma);
    const std::string b = line.substr(comma + 1);
    const double atom = std::strtod(a.c_str(), &end);
    if (end == a.c_str()) throw IoError("measure csv: bad atom on line " + std::to_string(line_no));
    const double weight = std::strtod(b.c_str(), &end);
    if (end == b.c_str()) throw IoError("measure csv: bad weight on line " + std::to_string(line_no));
    atoms.push_back(atom);
    weights.push_back(weight);
  }
  if (atoms.empty()) throw IoError("measure csv: no rows");
  return DiscreteMeasure(atoms, weights);
}

}  // namespace qdcg
