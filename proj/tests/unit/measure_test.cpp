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

#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "detail/random_graph.hpp"
#include "qdcg/error.hpp"
#include "qdcg/measure.hpp"
#include "support/helpers.hpp"

using namespace qdcg;
using support::measure;
using support::uniform_grid;

TEST_SUITE("measure") {
  TEST_CASE("mean and diameter") {
    CHECK(DiscreteMeasure::point_mass(5).mean() == 5);
    CHECK(measure({0, 1}, {0.5, 0.5}).mean() == 0.5);
    CHECK(uniform_grid(8).mean() == doctest::Approx(4.5).epsilon(1e-15));
    CHECK(DiscreteMeasure::point_mass(3).diameter() == 0);
    CHECK(uniform_grid(8).diameter() == 7);
    CHECK(measure({-2, 6}, {0.5, 0.5}).diameter() == 8);
  }

  TEST_CASE("construction sorts, merges and drops") {
    const auto m = measure({3, 1, 1 + 5e-13, 2, 7}, {0.25, 0.25, 0.25, 0.25, 0.0});
    REQUIRE(m.size() == 3);
    CHECK(m.atoms()[0] == doctest::Approx(1 + 2.5e-13).epsilon(1e-15));
    CHECK(m.weights()[0] == doctest::Approx(0.5));
    CHECK(m.atoms()[1] == 2);
    CHECK(m.atoms()[2] == 3);
  }

  TEST_CASE("construction errors") {
    CHECK_THROWS_AS(measure({}, {}), InvalidArgument);
    CHECK_THROWS_AS(measure({1, 2}, {0.5, -0.5}), InvalidArgument);
    CHECK_THROWS_AS(measure({NAN}, {1.0}), InvalidArgument);
    CHECK_THROWS_AS(measure({1, 2}, {0.5, 0.6}), InvalidArgument);
    CHECK_THROWS_AS(measure({1}, {0.0}), InvalidArgument);
    // Within the tolerance the weights are rescaled.
    const auto m = measure({1, 2}, {0.5, 0.5 + 5e-10});
    CHECK(m.weights()[0] + m.weights()[1] == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("construction is idempotent") {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 200; ++i) {
      const auto m = detail::random_measure(rng, 1, 50);
      const DiscreteMeasure again(m.atoms(), m.weights());
      CHECK(again == m);
    }
  }

  TEST_CASE("wasserstein1 examples") {
    CHECK(wasserstein1(DiscreteMeasure::point_mass(0), DiscreteMeasure::point_mass(1)) == 1);
    const auto u8 = uniform_grid(8);
    CHECK(wasserstein1(u8, u8) == 0);
    CHECK(wasserstein1(u8, measure({2.5, 6.5}, {0.5, 0.5})) == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("cdf_at and quantile") {
    const auto d0 = DiscreteMeasure::point_mass(0);
    CHECK(d0.cdf_at(-1) == 0);
    CHECK(d0.cdf_at(0) == 1);
    const auto u8 = uniform_grid(8);
    CHECK(u8.cdf_at(4) == doctest::Approx(0.5));
    CHECK(u8.cdf_at(8) == 1);
    CHECK(u8.quantile(0.5) == 4);
    CHECK(u8.quantile(0.5000001) == 5);
    CHECK(u8.quantile(1.0) == 8);
    std::mt19937_64 rng(2);
    for (int i = 0; i < 50; ++i) {
      const auto m = detail::random_measure(rng, 1, 40);
      double prev = 0;
      for (double x = m.min() - 1; x <= m.max() + 1; x += 0.05) {
        const double f = m.cdf_at(x);
        CHECK(f >= prev);
        prev = f;
      }
      CHECK(m.cdf_at(m.max()) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("metric axioms on random triples") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 300; ++i) {
      const auto a = detail::random_measure(rng, 1, 30);
      const auto b = detail::random_measure(rng, 1, 30);
      const auto c = detail::random_measure(rng, 1, 30);
      const double ab = wasserstein1(a, b), ba = wasserstein1(b, a);
      CHECK(ab == ba);
      CHECK(ab >= 0);
      CHECK(wasserstein1(a, c) <= ab + wasserstein1(b, c) + 1e-9);
      CHECK(wasserstein1(a, a) == 0);
    }
  }

  TEST_CASE("sweep agrees with the quantile coupling") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> normal;
    // Equal counts: sorted sample differences.
    for (int i = 0; i < 200; ++i) {
      const std::size_t k = 1 + rng() % 60;
      std::vector<double> x(k), y(k);
      for (auto& v : x) v = normal(rng);
      for (auto& v : y) v = 2 * normal(rng) + 0.3;
      auto sx = x, sy = y;
      std::sort(sx.begin(), sx.end());
      std::sort(sy.begin(), sy.end());
      double expect = 0;
      for (std::size_t j = 0; j < k; ++j) expect += std::abs(sx[j] - sy[j]) / k;
      CHECK(wasserstein1(empirical_from_samples(x), empirical_from_samples(y)) ==
            doctest::Approx(expect).epsilon(1e-12));
    }
    // General weights.
    for (int i = 0; i < 500; ++i) {
      const auto a = detail::random_measure(rng, 1, 80);
      const auto b = detail::random_measure(rng, 1, 80);
      CHECK(wasserstein1(a, b) ==
            doctest::Approx(oracle::w1_quantile(support::to_law(a), support::to_law(b))).epsilon(1e-10));
    }
  }

  TEST_CASE("empirical measures") {
    const std::vector<double> one{3};
    CHECK(empirical_from_samples(one) == DiscreteMeasure::point_mass(3));
    const std::vector<double> xs{1, 1, 2};
    const auto m = empirical_from_samples(xs);
    REQUIRE(m.size() == 2);
    CHECK(m.weights()[0] == doctest::Approx(2.0 / 3));
    CHECK_THROWS_AS(empirical_from_samples(std::vector<double>{}), InvalidArgument);
  }

  TEST_CASE("W1 against a continuous law") {
    // Uniform(0, 1): cdf x, quantile u, partial mean (hi^2 - lo^2) / 2.
    struct Unit : ContinuousLaw {
      double cdf(double x) const override { return std::clamp(x, 0.0, 1.0); }
      double quantile(double u) const override { return u; }
      double partial_mean(double lo, double hi) const override {
        lo = std::clamp(lo, 0.0, 1.0);
        hi = std::clamp(hi, 0.0, 1.0);
        return (hi * hi - lo * lo) / 2;
      }
    } unit;
    CHECK(wasserstein1(DiscreteMeasure::point_mass(0.5), unit) == doctest::Approx(0.25));
    CHECK(wasserstein1(measure({0.25, 0.75}, {0.5, 0.5}), unit) == doctest::Approx(0.125));
    CHECK(wasserstein1(DiscreteMeasure::point_mass(3), unit) == doctest::Approx(2.5));
    // Against a brute-force integral of |F_m - x|.
    std::mt19937_64 rng(5);
    for (int i = 0; i < 20; ++i) {
      const auto m = detail::random_measure(rng, 1, 10);
      const double lo = std::min(0.0, m.min()) - 1, hi = std::max(1.0, m.max()) + 1;
      double expect = 0;
      const int panels = 400000;
      const double h = (hi - lo) / panels;
      for (int k = 0; k < panels; ++k) {
        const double x = lo + (k + 0.5) * h;
        expect += std::abs(m.cdf_at(x) - unit.cdf(x)) * h;
      }
      CHECK(wasserstein1(m, unit) == doctest::Approx(expect).epsilon(1e-4));
    }
  }

  TEST_CASE("csv round trip is exact") {
    std::mt19937_64 rng(6);
    for (int i = 0; i < 50; ++i) {
      const auto m = detail::random_measure(rng, 1, 100);
      std::stringstream s;
      const std::vector<std::string> comments{"hello", "n = 3"};
      write_csv(s, m, comments);
      const std::string text = s.str();
      CHECK(text.rfind("# hello\n# n = 3\natom,weight\n", 0) == 0);
      CHECK(read_csv(s) == m);
    }
    std::stringstream bad("atom,weight\n1,abc\n");
    CHECK_THROWS(read_csv(bad));
  }
}
