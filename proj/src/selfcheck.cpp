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

#include "qdcg/selfcheck.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "detail/random_graph.hpp"
#include "qdcg/engine.hpp"
#include "qdcg/gaussian.hpp"
#include "qdcg/graph.hpp"
#include "qdcg/quantize.hpp"
#include "qdcg/rng.hpp"
#include "qdcg/sde.hpp"

namespace qdcg {

namespace {

std::string fmt(const char* format, double a, double b = 0.0) {
  char buf[128];
  std::snprintf(buf, sizeof buf, format, a, b);
  return buf;
}

DiscreteMeasure uniform_grid(std::size_t count) {
  std::vector<double> xs(count);
  for (std::size_t i = 0; i < count; ++i) xs[i] = static_cast<double>(i + 1);
  return DiscreteMeasure::uniform(xs);
}

CheckResult worst_case_family() {
  double worst = 0.0;
  for (unsigned m = 1; m <= 8; ++m) {
    const auto mu = uniform_grid(std::size_t{1} << m);
    for (unsigned n = 0; n <= m + 1; ++n) {
      const double expect = n < m ? std::ldexp(1.0, static_cast<int>(m - n)) / 4.0 : 0.0;
      worst = std::max(worst, std::abs(wasserstein1(mu, quantize_discrete(mu, n)) - expect));
    }
  }
  return {"worst-case family uniform{1..2^m}", worst <= 1e-12, fmt("max deviation %.3g", worst)};
}

CheckResult discrete_bound_and_means() {
  std::mt19937_64 rng(7);
  double worst_ratio = 0.0;
  double worst_mean = 0.0;
  bool support_ok = true;
  for (int trial = 0; trial < 200; ++trial) {
    const auto mu = detail::random_measure(rng, 2, 256);
    for (unsigned n = 1; n <= 8 && (std::size_t{1} << n) <= mu.size(); ++n) {
      const auto q = quantize_discrete(mu, n);
      support_ok = support_ok && q.size() <= (std::size_t{1} << n);
      const double bound = mu.diameter() / std::ldexp(1.0, static_cast<int>(n + 1));
      if (bound > 0) worst_ratio = std::max(worst_ratio, wasserstein1(mu, q) / bound);
      worst_mean = std::max(worst_mean, std::abs(q.mean() - mu.mean()));
    }
  }
  const bool ok = support_ok && worst_ratio <= 1.0 + 1e-12 && worst_mean <= 1e-8;
  return {"discrete bound, support and mean", ok,
          fmt("max W1/bound %.4f, max mean drift %.3g", worst_ratio, worst_mean)};
}

CheckResult coupling_identity() {
  std::mt19937_64 rng(11);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto mu = detail::random_measure(rng, 1, 100);
    const unsigned n = static_cast<unsigned>(trial % 8);
    worst = std::max(worst, std::abs(cell_coupling_error(mu, n) -
                                     wasserstein1(mu, quantize_discrete(mu, n))));
  }
  return {"cell coupling equals W1", worst <= 1e-10, fmt("max deviation %.3g", worst)};
}

CheckResult gaussian_rate() {
  const auto rows = gaussian::rate_table(11);
  double lo = 1e9, hi = 0.0;
  for (unsigned n = 6; n + 1 < rows.size(); ++n) {
    const double r = rows[n].w1 / rows[n + 1].w1;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return {"gaussian rate ratios", lo >= 1.8 && hi <= 2.2, fmt("ratios in [%.4f, %.4f]", lo, hi)};
}

CheckResult omega_growth() {
  const auto seq = gaussian::omega_sequence(5000);
  const double r = seq.values.back() / std::sqrt(10000.0);
  return {"omega_J / sqrt(2J) at J=5000", r >= 0.98 && r <= 1.02, fmt("ratio %.5f", r)};
}

CheckResult theorem1_random() {
  std::mt19937_64 rng(13);
  int violations = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = detail::random_graph(rng, {8, 3, 16});
    const auto exact = eval_exact_joint(g, std::nullopt);
    for (unsigned n = 1; n <= 3; ++n) {
      const double w = wasserstein1(exact.terminal, eval_cq(g, n).terminal);
      const double b = theorem1_bound(g, n).total;
      if (w > b + 1e-9) ++violations;
      if (b > 0) worst = std::max(worst, w / b);
    }
  }
  return {"theorem 1 domination (20 graphs)", violations == 0,
          fmt("violations %.0f, max W1/bound %.4f", violations, worst)};
}

CheckResult order_statistics() {
  const std::vector<double> xs{1, 2, 3, 4};
  const auto src = SourceSpec::discrete(DiscreteMeasure::uniform(xs));
  const std::vector<SourceSpec> sources(3, src);
  bool ok = true;
  for (unsigned k = 1; k <= 3; ++k) {
    std::vector<Atom> brute;
    for (double a : xs)
      for (double b : xs)
        for (double c : xs) {
          std::vector<double> t{a, b, c};
          std::sort(t.begin(), t.end());
          brute.push_back({t[k - 1], 1.0 / 64.0});
        }
    const auto got = eval_exact_joint(build_bubble_sort_graph(sources, k), std::nullopt).terminal;
    ok = ok && got == DiscreteMeasure(brute);
  }
  return {"bubble sort order statistics", ok, ok ? "exact match" : "mismatch"};
}

CheckResult philox_kat() {
  const auto out = rng::philox4x32_10({0, 0, 0, 0}, {0, 0});
  const bool ok = out == rng::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u};
  return {"philox4x32-10 known answer", ok, ok ? "match" : "mismatch"};
}

CheckResult em_mean() {
  const auto spec = SdeSpec::gbm(0.05, 0.4, 100.0, 1.0, 50);
  const auto laws = em_propagate(spec, 6);
  double worst = 0.0;
  double expect = spec.y0;
  for (const auto& law : laws) {
    expect *= 1.0 + 0.05 * spec.dt();
    worst = std::max(worst, std::abs(law.mean() - expect) / expect);
  }
  return {"EM mean recursion", worst <= 1e-8, fmt("max relative drift %.3g", worst)};
}

CheckResult csv_round_trip() {
  const auto q = quantize_source(SourceSpec::gaussian(0.0, 1.0), 5).measure;
  std::stringstream buf;
  write_csv(buf, q, {});
  const bool ok = read_csv(buf) == q;
  return {"CSV round trip", ok, ok ? "bit-identical" : "differs"};
}

}  // namespace

std::vector<CheckResult> run_selfcheck(const std::function<void(const CheckResult&)>& on_result) {
  using Check = CheckResult (*)();
  const Check checks[] = {worst_case_family, discrete_bound_and_means, coupling_identity,
                          gaussian_rate,     omega_growth,             theorem1_random,
                          order_statistics,  philox_kat,               em_mean,
                          csv_round_trip};
  std::vector<CheckResult> results;
  for (auto check : checks) {
    const auto start = std::chrono::steady_clock::now();
    CheckResult r;
    try {
      r = check();
    } catch (const std::exception& e) {
      r = {"(check threw)", false, e.what()};
    }
    r.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (on_result) on_result(r);
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace qdcg
