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
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace qdcg {

struct Atom {
  double position;
  double weight;
};

// A finitely supported probability measure on the real line.
//
// Atoms are strictly increasing and every weight is positive. Construction
// sorts its input, merges positions closer than kMergeTolerance (the merged
// atom sits at the weighted mean, so means are preserved), drops zero
// weights and renormalizes when the total is within kNormalizationTolerance
// of one. Instances are immutable.
class DiscreteMeasure {
 public:
  static constexpr double kMergeTolerance = 1e-12;
  static constexpr double kNormalizationTolerance = 1e-9;

  DiscreteMeasure(std::span<const double> atoms, std::span<const double> weights);
  explicit DiscreteMeasure(std::vector<Atom> atoms);

  static DiscreteMeasure point_mass(double position);
  // Equal weights on the given positions.
  static DiscreteMeasure uniform(std::span<const double> positions);

  std::span<const double> atoms() const noexcept { return atoms_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return atoms_.size(); }

  double min() const noexcept { return atoms_.front(); }
  double max() const noexcept { return atoms_.back(); }
  double mean() const;
  double diameter() const noexcept { return max() - min(); }

  // Right-continuous distribution function, mu((-inf, x]).
  double cdf_at(double x) const;
  // Left-continuous inverse of cdf_at on (0, 1].
  double quantile(double u) const;

  friend bool operator==(const DiscreteMeasure&, const DiscreteMeasure&) = default;

 private:
  void build(std::vector<Atom> atoms);

  std::vector<double> atoms_;
  std::vector<double> weights_;
};

// Wasserstein-1 distance by a sweep over the merged support.
double wasserstein1(const DiscreteMeasure& a, const DiscreteMeasure& b);

// Law with a known distribution function, quantile function and partial
// first moments; enough for an exact W1 against a discrete measure.
class ContinuousLaw {
 public:
  virtual ~ContinuousLaw() = default;
  virtual double cdf(double x) const = 0;
  virtual double quantile(double u) const = 0;
  // Integral of t over [lo, hi]. Infinite bounds are allowed.
  virtual double partial_mean(double lo, double hi) const = 0;
};

// W1 = integral of |F_m(x) - F(x)| dx, assembled interval by interval between
// consecutive atoms.
double wasserstein1(const DiscreteMeasure& m, const ContinuousLaw& law);

DiscreteMeasure empirical_from_samples(std::span<const double> samples);

// CSV with header `atom,weight`, atoms ascending, 17 significant digits.
// Each comment is written on its own line prefixed by "# ".
void write_csv(std::ostream& out, const DiscreteMeasure& m,
               std::span<const std::string> comments = {});
// Skips '#' comment lines and the header row.
DiscreteMeasure read_csv(std::istream& in);

}  // namespace qdcg
