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

#include "qdcg/sde.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <thread>

#include "detail/runs.hpp"
#include "qdcg/error.hpp"
#include "qdcg/gaussian.hpp"
#include "qdcg/quantize.hpp"
#include "qdcg/rng.hpp"

namespace qdcg {

SdeSpec SdeSpec::gbm(double mu, double sigma, double y0, double horizon, std::size_t steps) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw InvalidArgument("gbm: sigma must be > 0");
  if (!std::isfinite(mu) || !std::isfinite(y0)) throw InvalidArgument("gbm: non-finite parameter");
  SdeSpec spec{affine_coefficient(0.0, mu), affine_coefficient(0.0, sigma), y0, horizon, steps,
               AffineSde{0.0, mu, 0.0, sigma}};
  spec.check();
  return spec;
}

void SdeSpec::check() const {
  if (!drift || !diffusion) throw InvalidArgument("sde: drift and diffusion are required");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InvalidArgument("sde: horizon must be > 0");
  if (steps == 0) throw InvalidArgument("sde: steps must be >= 1");
  if (!std::isfinite(y0)) throw InvalidArgument("sde: y0 must be finite");
  if (affine) {
    const AffineSde& c = *affine;
    for (double x : {0.0, 1.0, -2.5}) {
      const double a = c.drift0 + c.drift1 * x;
      const double b = c.diffusion0 + c.diffusion1 * x;
      if (drift(0.0, x) != a || drift(horizon, x) != a || diffusion(0.0, x) != b ||
          diffusion(horizon, x) != b) {
        throw InvalidArgument("sde: affine form disagrees with drift/diffusion");
      }
    }
  }
}

CompGraph build_em_graph(const SdeSpec& spec, EmLayout layout) {
  spec.check();
  const double dt = spec.dt();
  const double root_dt = std::sqrt(dt);
  CompGraph g;
  g.add_source("y0", SourceSpec::discrete(DiscreteMeasure::point_mass(spec.y0)));
  for (std::size_t k = 0; k < spec.steps; ++k) {
    g.add_source("xi" + std::to_string(k), SourceSpec::gaussian(0.0, 1.0));
  }
  for (std::size_t k = 0; k < spec.steps; ++k) {
    const std::string y = "y" + std::to_string(k);
    const std::string xi = "xi" + std::to_string(k);
    const std::string next = "y" + std::to_string(k + 1);
    const double t = spec.time(k);
    if (layout == EmLayout::fused) {
      g.add_op(next, NodeOp::em_step(spec.drift, spec.diffusion, t, dt), {y, xi});
      continue;
    }
    const std::string f1 = "f" + std::to_string(k) + "_1";
    const std::string f2 = "f" + std::to_string(k) + "_2";
    auto drift = spec.drift;
    auto diffusion = spec.diffusion;
    g.add_op(f1,
             NodeOp::custom([drift, t, dt](std::span<const double> x) { return x[0] + drift(t, x[0]) * dt; },
                            std::nullopt, 1, "em_drift"),
             {y});
    g.add_op(f2,
             NodeOp::custom(
                 [diffusion, t, root_dt](std::span<const double> x) {
                   return root_dt * diffusion(t, x[1]) * x[0];
                 },
                 std::nullopt, 2, "em_noise"),
             {xi, y});
    g.add_op(next, NodeOp::add(), {f1, f2});
  }
  g.set_terminal("y" + std::to_string(spec.steps));
  return g;
}

std::vector<DiscreteMeasure> em_propagate(const SdeSpec& spec, unsigned n) {
  spec.check();
  const double dt = spec.dt();
  const double root_dt = std::sqrt(dt);
  const DiscreteMeasure noise = quantize_source(SourceSpec::gaussian(0.0, 1.0), n).measure;

  std::vector<DiscreteMeasure> laws;
  laws.reserve(spec.steps);
  DiscreteMeasure state = DiscreteMeasure::point_mass(spec.y0);
  std::vector<Atom> points;
  std::vector<std::size_t> runs;
  const std::size_t m = noise.size();
  for (std::size_t k = 0; k < spec.steps; ++k) {
    const double t = spec.time(k);
    points.clear();
    points.reserve(state.size() * m);
    runs.clear();
    // Each state atom maps the noise atoms affinely, so its points form an
    // ascending run once read in the direction of the slope.
    for (std::size_t i = 0; i < state.size(); ++i) {
      const double y = state.atoms()[i];
      const double w = state.weights()[i];
      const double base = y + spec.drift(t, y) * dt;
      const double scale = spec.diffusion(t, y) * root_dt;
      runs.push_back(points.size());
      for (std::size_t j = 0; j < m; ++j) {
        const std::size_t jj = scale < 0.0 ? m - 1 - j : j;
        points.push_back({base + scale * noise.atoms()[jj], w * noise.weights()[jj]});
      }
    }
    runs.push_back(points.size());
    state = detail::compress_sorted_runs(points, runs, n);
    laws.push_back(state);
  }
  return laws;
}

namespace {

// Runs body(begin, end) over [0, count) split across threads.
template <class Body>
void parallel_chunks(std::size_t count, unsigned threads, const Body& body) {
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, count);
  if (workers == 1) {
    body(std::size_t{0}, count);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin < end) pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
  for (auto& t : pool) t.join();
}

// Fills xi with the first xi.size() normals of path p on the Euler-Maruyama stream.
void path_normals(std::uint64_t seed, std::size_t p, std::span<double> xi) {
  for (std::size_t i = 0; i < xi.size(); i += 2) {
    const auto u = rng::uniform_pair(seed, p, rng::kEulerMaruyamaStream,
                                     static_cast<std::uint32_t>(i / 2));
    xi[i] = gaussian::quantile(u[0]);
    if (i + 1 < xi.size()) xi[i + 1] = gaussian::quantile(u[1]);
  }
}

// Terminal value for N steps of size dt; increment(k) is the Brownian
// increment of step k.
template <class Increment>
double em_path(const SdeSpec& spec, std::size_t N, double dt, const Increment& increment) {
  double y = spec.y0;
  if (spec.affine) {
    const AffineSde c = *spec.affine;
    for (std::size_t k = 0; k < N; ++k) {
      y = y + (c.drift0 + c.drift1 * y) * dt + (c.diffusion0 + c.diffusion1 * y) * increment(k);
    }
    return y;
  }
  for (std::size_t k = 0; k < N; ++k) {
    const double t = static_cast<double>(k) * dt;
    y = y + spec.drift(t, y) * dt + spec.diffusion(t, y) * increment(k);
  }
  return y;
}

}  // namespace

std::vector<double> em_reference_samples(const SdeSpec& spec, std::size_t samples,
                                         std::uint64_t seed, unsigned threads) {
  spec.check();
  if (samples == 0) throw InvalidArgument("em reference: samples must be positive");
  const double dt = spec.dt();
  const double root_dt = std::sqrt(dt);
  std::vector<double> out(samples);
  parallel_chunks(samples, threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> xi(spec.steps);
    for (std::size_t p = begin; p < end; ++p) {
      path_normals(seed, p, xi);
      out[p] = em_path(spec, spec.steps, dt, [&](std::size_t k) { return root_dt * xi[k]; });
    }
  });
  return out;
}

std::vector<std::vector<double>> em_coupled_reference_samples(const SdeSpec& base,
                                                              const std::vector<std::size_t>& steps,
                                                              std::size_t samples,
                                                              std::uint64_t seed,
                                                              unsigned threads) {
  base.check();
  if (samples == 0) throw InvalidArgument("em reference: samples must be positive");
  if (steps.empty()) throw InvalidArgument("em reference: no step counts");
  for (auto N : steps) {
    if (N == 0) throw InvalidArgument("em reference: steps must be >= 1");
    if (N > (std::size_t{1} << 31)) throw InvalidArgument("em reference: steps too large");
  }

  // Union grid of times k/N as reduced fractions, ordered by value.
  struct Frac {
    std::uint64_t num, den;
  };
  std::vector<Frac> grid;
  for (auto N : steps) {
    for (std::size_t k = 0; k <= N; ++k) {
      const std::uint64_t g = std::gcd<std::uint64_t>(k, N);
      grid.push_back({k / g, N / g});
    }
  }
  const auto less = [](const Frac& a, const Frac& b) { return a.num * b.den < b.num * a.den; };
  std::sort(grid.begin(), grid.end(), less);
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [](const Frac& a, const Frac& b) { return a.num == b.num && a.den == b.den; }),
             grid.end());
  const std::size_t intervals = grid.size() - 1;
  std::vector<double> root_len(intervals);
  for (std::size_t i = 0; i < intervals; ++i) {
    const double len = base.horizon *
                       static_cast<double>(grid[i + 1].num * grid[i].den - grid[i].num * grid[i + 1].den) /
                       (static_cast<double>(grid[i].den) * static_cast<double>(grid[i + 1].den));
    root_len[i] = std::sqrt(len);
  }

  // Grid index of every k/N.
  std::vector<std::vector<std::uint32_t>> index(steps.size());
  for (std::size_t s = 0; s < steps.size(); ++s) {
    const std::size_t N = steps[s];
    index[s].resize(N + 1);
    for (std::size_t k = 0; k <= N; ++k) {
      const std::uint64_t g = std::gcd<std::uint64_t>(k, N);
      const Frac f{k / g, N / g};
      index[s][k] = static_cast<std::uint32_t>(std::lower_bound(grid.begin(), grid.end(), f, less) -
                                               grid.begin());
    }
  }

  std::vector<std::vector<double>> out(steps.size(), std::vector<double>(samples));
  parallel_chunks(samples, threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> xi(intervals);
    std::vector<double> w(intervals + 1);
    for (std::size_t p = begin; p < end; ++p) {
      path_normals(seed, p, xi);
      w[0] = 0.0;
      for (std::size_t i = 0; i < intervals; ++i) w[i + 1] = w[i] + root_len[i] * xi[i];
      for (std::size_t s = 0; s < steps.size(); ++s) {
        const std::size_t N = steps[s];
        const double dt = base.horizon / static_cast<double>(N);
        const double root_dt = std::sqrt(dt);
        const std::uint32_t* idx = index[s].data();
        // A step spanning one grid interval uses its own normal directly.
        out[s][p] = em_path(base, N, dt, [&](std::size_t k) {
          const std::uint32_t a = idx[k], b = idx[k + 1];
          return b == a + 1 ? root_dt * xi[a] : w[b] - w[a];
        });
      }
    }
  });
  return out;
}

std::vector<ExperimentCell> experiment_grid(const std::vector<std::size_t>& steps,
                                            const std::vector<unsigned>& levels) {
  std::vector<ExperimentCell> cells;
  for (auto N : steps) {
    for (auto n : levels) cells.emplace_back(N, n);
  }
  return cells;
}

std::vector<ExperimentRecord> em_error_experiment(const SdeSpec& base,
                                                  const std::vector<ExperimentCell>& cells,
                                                  std::size_t ref_samples, std::uint64_t seed,
                                                  unsigned threads) {
  using Clock = std::chrono::steady_clock;
  std::vector<std::size_t> distinct;
  for (const auto& [N, n] : cells) {
    if (std::find(distinct.begin(), distinct.end(), N) == distinct.end()) distinct.push_back(N);
  }
  std::map<std::size_t, DiscreteMeasure> references;
  if (!distinct.empty()) {
    auto samples = em_coupled_reference_samples(base, distinct, ref_samples, seed, threads);
    for (std::size_t s = 0; s < distinct.size(); ++s) {
      references.emplace(distinct[s], empirical_from_samples(samples[s]));
      samples[s] = {};
    }
  }
  std::vector<ExperimentRecord> records;
  records.reserve(cells.size());
  for (const auto& [N, n] : cells) {
    SdeSpec spec = base;
    spec.steps = N;
    spec.check();
    const auto ref = references.find(N);
    const auto start = Clock::now();
    const DiscreteMeasure law = em_propagate(spec, n).back();
    ExperimentRecord rec;
    rec.steps = N;
    rec.level = n;
    rec.runtime_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    rec.w1 = wasserstein1(ref->second, law);
    rec.diameter = law.diameter();
    rec.support = law.size();
    records.push_back(rec);
  }
  const Theorem2Fit fit = fit_theorem2_envelope(records, base.horizon);
  for (auto& rec : records) {
    SdeSpec spec = base;
    spec.steps = rec.steps;
    rec.bound_fit = em_theorem2_bound(spec, rec.level, rec.steps, fit.c, fit.c_prime);
  }
  return records;
}

double em_theorem2_bound(const SdeSpec& spec, unsigned n, std::size_t k, double c,
                         double c_prime) {
  const double exponent = c_prime * static_cast<double>(k) *
                          std::sqrt(static_cast<double>(n) * spec.dt());
  return c * std::exp(exponent) / std::ldexp(1.0, static_cast<int>(n));
}

Theorem2Fit fit_theorem2_envelope(const std::vector<ExperimentRecord>& records, double horizon) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& r : records) {
    if (!(r.w1 > 0.0)) continue;
    xs.push_back(std::sqrt(static_cast<double>(r.steps) * r.level * horizon));
    ys.push_back(std::log(r.w1) + r.level * std::log(2.0));
  }
  if (xs.empty()) return {};
  double slope = 0.0;
  if (xs.size() > 1) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    if (sxx > 0.0) slope = sxy / sxx;
  }
  // Both constants are positive in the bound.
  slope = std::max(slope, std::numeric_limits<double>::min());
  double log_c = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < xs.size(); ++i) log_c = std::max(log_c, ys[i] - slope * xs[i]);
  // Guard against rounding in exp/log when checking domination.
  return {std::exp(log_c) * (1.0 + 1e-12), slope};
}

}  // namespace qdcg
