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

#include "doctest.h"
#include "qdcg/error.hpp"
#include "qdcg/gaussian.hpp"
#include "qdcg/quantize.hpp"
#include "support/oracles.hpp"

using namespace qdcg;
namespace g = qdcg::gaussian;

// Reference values from 40-digit evaluations of erfc, erfinv and the tail
// integrals.
TEST_SUITE("gaussian") {
  TEST_CASE("tail conditional mean") {
    CHECK(g::conditional_mean_tail(0) == doctest::Approx(0.7978845608028654).epsilon(1e-15));
    CHECK(g::conditional_mean_tail(5) == doctest::Approx(5.18650396712584).epsilon(1e-13));
    CHECK(g::conditional_mean_tail(0.5) == doctest::Approx(1.1410777703680644809).epsilon(1e-14));
    CHECK(g::conditional_mean_tail(3) == doctest::Approx(3.2830986549304365069).epsilon(1e-14));
    CHECK(g::conditional_mean_tail(10) == doctest::Approx(10.098093233962511963).epsilon(1e-14));
    CHECK(g::conditional_mean_tail(36.5) == doctest::Approx(36.527356284475012415).epsilon(1e-14));
    CHECK(g::conditional_mean_tail(50) == doctest::Approx(50.019984031905639809).epsilon(1e-9));
    CHECK(g::conditional_mean_tail(-3) == doctest::Approx(0.0044378390421256637933).epsilon(1e-12));
    CHECK(g::conditional_mean_tail(-40) >= 0);
    CHECK(g::conditional_mean_tail(-40) <= 1e-300);
    CHECK(g::conditional_mean_tail(-INFINITY) == 0);
  }

  TEST_CASE("tail mean by brute-force integration") {
    for (double x : {-2.0, 0.0, 1.0, 5.0}) {
      const double hi = std::max(x, 0.0) + 40;
      const double num = oracle::simpson([](double t) { return t * std::exp(-t * t / 2); }, x, hi, 200000);
      const double den = oracle::simpson([](double t) { return std::exp(-t * t / 2); }, x, hi, 200000);
      CHECK(g::conditional_mean_tail(x) == doctest::Approx(num / den).epsilon(1e-10));
    }
  }

  TEST_CASE("Mills ratio across the asymptotic switch") {
    // The three-term series is exact to O(x^-7); at the switch that is a few
    // parts in 1e9.
    CHECK(g::mills_ratio(36.5) == doctest::Approx(0.027376741755193040781).epsilon(1e-13));
    CHECK(g::mills_ratio(37.5) == doctest::Approx(0.026647744014898550332).epsilon(1e-8));
    CHECK(g::mills_ratio(50) == doctest::Approx(0.019992009580853567311).epsilon(1e-9));
    CHECK(g::mills_ratio(200) == doctest::Approx(0.00499987500937382833).epsilon(1e-14));
    const double below = g::mills_ratio(std::nextafter(g::kAsymptoticThreshold, 0.0));
    const double above = g::mills_ratio(g::kAsymptoticThreshold);
    CHECK(std::abs(below - above) / below <= 1e-8);
    double prev = g::mills_ratio(0.0);
    for (double x = 0.25; x < 300; x += 0.25) {
      const double r = g::mills_ratio(x);
      CHECK(r < prev);
      prev = r;
    }
  }

  TEST_CASE("cdf, tails and quantile") {
    CHECK(g::cdf(0) == 0.5);
    CHECK(g::upper_tail(8) == doctest::Approx(6.2209605742717841235e-16).epsilon(1e-14));
    CHECK(g::quantile(0.5) == 0);
    CHECK(g::quantile(1e-10) == doctest::Approx(-6.3613409024040562047).epsilon(1e-15));
    CHECK(g::quantile(0.02) == doctest::Approx(-2.0537489106318230529).epsilon(1e-15));
    CHECK(g::quantile(0.3) == doctest::Approx(-0.52440051270804078404).epsilon(1e-15));
    CHECK(g::quantile(0.975) == doctest::Approx(1.9599639845400542355).epsilon(1e-15));
    CHECK(g::quantile(0.999999) == doctest::Approx(4.7534243088228989482).epsilon(1e-10));
    CHECK(std::isinf(g::quantile(0.0)));
    CHECK(std::isinf(g::quantile(1.0)));
    for (double p = 1e-6; p < 1; p += 0.0137) {
      CHECK(g::cdf(g::quantile(p)) == doctest::Approx(p).epsilon(1e-13));
    }
    // cdf rounds towards 1 above about 5, so the round trip is conditioned only below.
    for (double x = -8; x < 5; x += 0.173) {
      CHECK(g::quantile(g::cdf(x)) == doctest::Approx(x).epsilon(1e-9));
    }
  }

  TEST_CASE("cell integrals") {
    CHECK(g::cell_mass(-INFINITY, 0) == 0.5);
    CHECK(g::cell_mass(-INFINITY, INFINITY) == 1);
    CHECK(g::cell_partial_mean(0, INFINITY) == doctest::Approx(1 / std::sqrt(2 * M_PI)).epsilon(1e-15));
    CHECK(g::cell_mass(0.5, 2) == doctest::Approx(0.28578740677780768916).epsilon(1e-14));
    CHECK(g::cell_partial_mean(0.5, 2) == doctest::Approx(0.29807436025111142582).epsilon(1e-14));
    CHECK(g::cell_abs_deviation(0.5, 2, 1) == doctest::Approx(0.091862318572051170603).epsilon(1e-13));
    CHECK(g::cell_mass(30, 31) > 0);
  }

  TEST_CASE("omega sequence") {
    CHECK_THROWS_AS(g::omega_sequence(0), InvalidArgument);
    const auto seq = g::omega_sequence(5000);
    REQUIRE(seq.values.size() == 5001);
    CHECK(seq.values[0] == 0);
    CHECK(seq.values[1] == doctest::Approx(std::sqrt(2 / M_PI)).epsilon(1e-15));
    for (std::size_t j = 1; j < seq.values.size(); ++j) {
      CHECK(seq.values[j] > seq.values[j - 1]);
      CHECK(std::abs(seq.values[j] - g::conditional_mean_tail(seq.values[j - 1])) <= 1e-12 * seq.values[j]);
      if (j >= 101) {
        const double inc = seq.values[j] - seq.values[j - 1];
        const double expect = 1 / seq.values[j - 1];
        CHECK(std::abs(inc - expect) / expect < 0.05);
      }
    }
    const double r = seq.values[5000] / std::sqrt(10000.0);
    CHECK(r >= 0.98);
    CHECK(r <= 1.02);
  }

  TEST_CASE("rate table") {
    // W1 between N(0,1) and its level-n quantization, from 30-digit quadrature.
    const double expect[] = {0.797884560802865, 0.482624198685984, 0.270907353833445,
                             0.145807899062460, 0.0765476751638148, 0.0395651429532173,
                             0.0202426592255053};
    const auto rows = g::rate_table(13);
    REQUIRE(rows.size() == 14);
    for (unsigned n = 0; n <= 6; ++n) {
      CHECK(rows[n].n == n);
      CHECK(rows[n].w1 == doctest::Approx(expect[n]).epsilon(1e-12));
    }
    for (unsigned n = 6; n <= 12; ++n) {
      const double ratio = rows[n].w1 / rows[n + 1].w1;
      CHECK(ratio >= 1.8);
      CHECK(ratio <= 2.2);
    }
    CHECK_THROWS_AS(g::rate_table(g::kMaxRateLevel + 1), InvalidArgument);
  }

  TEST_CASE("quantized normal is symmetric") {
    for (unsigned n = 0; n <= 14; ++n) {
      const auto q = quantize_source(SourceSpec::gaussian(0, 1), n).measure;
      const std::size_t k = q.size();
      REQUIRE(k == (std::size_t{1} << n));
      for (std::size_t i = 0; i < k; ++i) {
        CHECK(std::abs(q.atoms()[i] + q.atoms()[k - 1 - i]) <= 1e-10);
        CHECK(std::abs(q.weights()[i] - q.weights()[k - 1 - i]) <= 1e-10);
      }
    }
  }

  TEST_CASE("affine equivariance") {
    for (unsigned n : {0u, 1u, 3u, 7u, 10u}) {
      const auto base = quantize_source(SourceSpec::gaussian(0, 1), n).measure;
      const auto moved = quantize_source(SourceSpec::gaussian(-2, 3.5), n).measure;
      REQUIRE(base.size() == moved.size());
      for (std::size_t i = 0; i < base.size(); ++i) {
        CHECK(moved.atoms()[i] == doctest::Approx(-2 + 3.5 * base.atoms()[i]).epsilon(1e-12));
        CHECK(moved.weights()[i] == doctest::Approx(base.weights()[i]).epsilon(1e-12));
      }
      CHECK(quantization_error(SourceSpec::gaussian(-2, 3.5), n) ==
            doctest::Approx(3.5 * quantization_error(SourceSpec::gaussian(0, 1), n)).epsilon(1e-12));
    }
  }
}
