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
#include <utility>
#include <vector>

#include "qdcg/graph.hpp"
#include "qdcg/measure.hpp"

namespace qdcg {

// Scalar SDE dY = a(t, Y) dt + b(t, Y) dW on [0, horizon], discretized by
// Euler-Maruyama with `steps` equal steps.
// Time-independent affine coefficients a = drift0 + drift1 x, b = diffusion0 + diffusion1 x.
struct AffineSde {
  double drift0 = 0.0;
  double drift1 = 0.0;
  double diffusion0 = 0.0;
  double diffusion1 = 0.0;
};

struct SdeSpec {
  Coefficient drift;
  Coefficient diffusion;
  double y0 = 0.0;
  double horizon = 1.0;
  std::size_t steps = 1;
  // Optional closed form of drift and diffusion used by the Monte Carlo reference.
  std::optional<AffineSde> affine;

  double dt() const noexcept { return horizon / static_cast<double>(steps); }
  double time(std::size_t k) const noexcept { return static_cast<double>(k) * dt(); }

  // a = mu x, b = sigma x.
  static SdeSpec gbm(double mu, double sigma, double y0, double horizon, std::size_t steps);

  // Throws InvalidArgument on missing coefficients, horizon <= 0, steps == 0
  // or an affine form that disagrees with drift/diffusion.
  void check() const;
};

enum class EmLayout {
  fused,     // one em_step node per step
  expanded,  // drift node, noise node and an add per step
};

// Sources "y0" (point mass) and "xi0".."xi{N-1}" (standard normal).
// Fused: step k is node "y{k+1}". Expanded: "f{k}_1" = y + a dt,
// "f{k}_2" = sqrt(dt) b xi, "y{k+1}" = their sum; depth 2N, 2^N paths from y0.
CompGraph build_em_graph(const SdeSpec& spec, EmLayout layout = EmLayout::fused);

// Compressed laws of Y_1..Y_N at level n. The noise is quantized once; each
// step pushes (state x noise) through the scheme and compresses to 2^n atoms.
std::vector<DiscreteMeasure> em_propagate(const SdeSpec& spec, unsigned n);

// Terminal values of `samples` independent Euler-Maruyama paths. Path p,
// steps 2j and 2j+1 use the Philox block (p, kEulerMaruyamaStream, j).
std::vector<double> em_reference_samples(const SdeSpec& spec, std::size_t samples,
                                         std::uint64_t seed, unsigned threads = 1);

// Terminal samples for several step counts driven by one Brownian path per
// sample. out[i] holds the samples for steps[i]; a single step count
// reproduces em_reference_samples exactly.
std::vector<std::vector<double>> em_coupled_reference_samples(const SdeSpec& base,
                                                              const std::vector<std::size_t>& steps,
                                                              std::size_t samples,
                                                              std::uint64_t seed,
                                                              unsigned threads = 1);

struct ExperimentRecord {
  std::size_t steps = 0;  // N
  unsigned level = 0;     // n
  double w1 = 0.0;
  double bound_fit = 0.0;
  double diameter = 0.0;
  std::size_t support = 0;
  double runtime_ms = 0.0;
};

// Cells (N, n) of the error study.
using ExperimentCell = std::pair<std::size_t, unsigned>;
std::vector<ExperimentCell> experiment_grid(const std::vector<std::size_t>& steps,
                                            const std::vector<unsigned>& levels);

// W1 between the Monte Carlo law of Y_N (one reference per distinct N,
// shared across n) and em_propagate(., n) at step N. base.steps is ignored.
// bound_fit is filled from fit_theorem2_envelope over all records.
std::vector<ExperimentRecord> em_error_experiment(const SdeSpec& base,
                                                  const std::vector<ExperimentCell>& cells,
                                                  std::size_t ref_samples, std::uint64_t seed,
                                                  unsigned threads = 1);

// c exp(c' k sqrt(n dt)) / 2^n.
double em_theorem2_bound(const SdeSpec& spec, unsigned n, std::size_t k, double c,
                         double c_prime);

struct Theorem2Fit {
  double c = 0.0;
  double c_prime = 0.0;
};

// Least squares for log(w1 2^n) against N sqrt(n dt), then c is raised until
// the bound dominates every record with w1 > 0.
Theorem2Fit fit_theorem2_envelope(const std::vector<ExperimentRecord>& records, double horizon);

}  // namespace qdcg
