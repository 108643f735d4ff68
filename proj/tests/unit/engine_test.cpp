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

#include "doctest.h"
#include "detail/random_graph.hpp"
#include "qdcg/engine.hpp"
#include "qdcg/error.hpp"
#include "qdcg/quantize.hpp"
#include "support/helpers.hpp"
#include "support/laws.hpp"
#include "support/staged.hpp"

using namespace qdcg;
using support::measure;
using support::uniform_grid;

namespace {

void check_same(const DiscreteMeasure& a, const DiscreteMeasure& b, double tol = 1e-14) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::abs(a.atoms()[i] - b.atoms()[i]) <= 1e-12 * std::max(1.0, std::abs(a.atoms()[i])));
    CHECK(std::abs(a.weights()[i] - b.weights()[i]) <= tol);
  }
}

DiscreteMeasure from_law(const oracle::Law& law) {
  std::vector<Atom> atoms;
  for (auto [x, w] : law) atoms.push_back({x, w});
  return DiscreteMeasure(std::move(atoms));
}

// k-th smallest of three independent copies of `law`, by direct enumeration.
DiscreteMeasure brute_order_statistic(const DiscreteMeasure& law, unsigned k) {
  const auto l = support::to_law(law);
  return from_law(oracle::product_pushforward({l, l, l}, [k](const std::vector<double>& x) {
    auto s = x;
    std::sort(s.begin(), s.end());
    return s[k - 1];
  }));
}

}  // namespace

TEST_SUITE("engine") {
  TEST_CASE("exact joint examples") {
    CompGraph id;
    id.add_source("s", SourceSpec::discrete(DiscreteMeasure::point_mass(3)));
    id.add_op("v", NodeOp::affine(1, 0), {"s"});
    id.set_terminal("v");
    CHECK(eval_exact_joint(id, std::nullopt).terminal == DiscreteMeasure::point_mass(3));

    const auto coin = SourceSpec::discrete(measure({0, 1}, {0.5, 0.5}));
    CompGraph sum;
    sum.add_source("a", coin);
    sum.add_source("b", coin);
    sum.add_op("s", NodeOp::add(), {"a", "b"});
    sum.set_terminal("s");
    CHECK(eval_exact_joint(sum, std::nullopt).terminal == measure({0, 1, 2}, {0.25, 0.5, 0.25}));
    CHECK(eval_cq(sum, 2).terminal == measure({0, 1, 2}, {0.25, 0.5, 0.25}));

    CompGraph cont;
    cont.add_source("g", SourceSpec::gaussian(0, 1));
    cont.add_op("v", NodeOp::affine(2, 0), {"g"});
    cont.set_terminal("v");
    CHECK_THROWS_AS(eval_exact_joint(cont, std::nullopt), InvalidArgument);
    CHECK(eval_exact_joint(cont, 3u).terminal.size() == 8);
  }

  TEST_CASE("order statistics against enumeration") {
    const auto u3 = uniform_grid(3);
    const std::vector<SourceSpec> three(3, SourceSpec::discrete(u3));
    check_same(eval_exact_joint(build_bubble_sort_graph(three, 3), std::nullopt).terminal,
               brute_order_statistic(u3, 3));
    const auto u4 = uniform_grid(4);
    const std::vector<SourceSpec> four(3, SourceSpec::discrete(u4));
    for (unsigned k = 1; k <= 3; ++k) {
      const auto g = build_bubble_sort_graph(four, k);
      check_same(eval_exact_joint(g, std::nullopt).terminal, brute_order_statistic(u4, k));
      check_same(eval_cq(g, 4).terminal, brute_order_statistic(u4, k));
    }
  }

  TEST_CASE("bubble sort builder") {
    const std::vector<SourceSpec> two(2, SourceSpec::uniform(0, 1));
    const auto g = build_bubble_sort_graph(two, 1);
    CHECK(g.nodes().size() == 3);
    CHECK(g.node(g.terminal()).op->kind() == OpKind::min);
    CHECK_THROWS_AS(build_bubble_sort_graph(two, 3), InvalidArgument);
    CHECK_THROWS_AS(build_bubble_sort_graph(std::vector<SourceSpec>(1, SourceSpec::uniform(0, 1)), 1),
                    InvalidArgument);
    const std::vector<SourceSpec> five(5, SourceSpec::uniform(0, 1));
    for (unsigned k = 1; k <= 5; ++k) {
      const auto gk = build_bubble_sort_graph(five, k);
      CHECK_NOTHROW(validate(gk));
      for (const auto& node : gk.nodes()) {
        if (!node.is_source()) CHECK(node.op->lipschitz() == 1.0);
      }
    }
  }

  TEST_CASE("monte carlo") {
    CompGraph id;
    id.add_source("s", SourceSpec::discrete(DiscreteMeasure::point_mass(3)));
    id.add_op("v", NodeOp::affine(1, 0), {"s"});
    id.set_terminal("v");
    const auto r = eval_mc(id, 1000, 5);
    for (double x : r.samples) CHECK(x == 3);

    CompGraph sum;
    sum.add_source("a", SourceSpec::uniform(0, 1));
    sum.add_source("b", SourceSpec::uniform(0, 1));
    sum.add_op("s", NodeOp::add(), {"a", "b"});
    sum.set_terminal("s");
    const auto big = eval_mc(sum, 1000000, 42);
    CHECK(wasserstein1(big.terminal, support::TriangularLaw{}) < 5e-3);
    const auto again = eval_mc(sum, 1000, 42);
    CHECK(std::equal(again.samples.begin(), again.samples.end(), big.samples.begin()));
    CHECK(eval_mc(sum, 1000, 43).samples != again.samples);

    const std::vector<SourceSpec> three(3, SourceSpec::uniform(0, 1));
    const auto mx = eval_mc(build_bubble_sort_graph(three, 3), 1000000, 7).terminal;
    double sup = 0;
    for (double t = 0.005; t < 1; t += 0.01) sup = std::max(sup, std::abs(mx.cdf_at(t) - t * t * t));
    CHECK(sup < 0.01);
    CHECK_THROWS_AS(eval_mc(sum, 0, 1), InvalidArgument);
  }

  TEST_CASE("cq chains compress at every node") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 30; ++trial) {
      const auto src = detail::random_measure(rng, 5, 60);
      const unsigned n = 1 + trial % 4;
      CompGraph g;
      g.add_source("s", SourceSpec::discrete(src));
      std::string prev = "s";
      // Reference: quantize the source, then map and compress by hand.
      DiscreteMeasure expect = quantize_discrete(src, n);
      for (int k = 0; k < 4; ++k) {
        const double a = (k % 2 ? -1.5 : 0.75), b = k;
        const std::string id = "v" + std::to_string(k);
        g.add_op(id, NodeOp::affine(a, b), {prev});
        prev = id;
        std::vector<Atom> mapped;
        for (std::size_t i = 0; i < expect.size(); ++i) mapped.push_back({a * expect.atoms()[i] + b, expect.weights()[i]});
        expect = compress(DiscreteMeasure(std::move(mapped)), n);
      }
      g.set_terminal(prev);
      check_same(eval_cq(g, n).terminal, expect);
    }
  }

  TEST_CASE("cq agrees with the exact joint when nothing is compressed") {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 200; ++i) {
      const auto g = detail::random_graph(rng, {8, 3, 4});
      // Supports stay below 4^3 = 64 = 2^6.
      const auto cq = eval_cq(g, 6);
      for (const auto& s : cq.stats) CHECK_FALSE(s.compressed);
      check_same(cq.terminal, eval_exact_joint(g, 6u).terminal, 1e-13);
      check_same(cq.terminal, eval_exact_joint(g, std::nullopt).terminal, 1e-13);
    }
  }

  TEST_CASE("marginals by projection") {
    std::mt19937_64 rng(43);
    for (int i = 0; i < 60; ++i) {
      // 5^3 < 2^7 atoms, so no node is compressed.
      const auto g = detail::random_graph(rng, {8, 3, 5});
      for (const auto& node : g.nodes()) {
        EvalOptions opts;
        opts.marginal_node = node.id;
        const auto cq = eval_cq(g, 7, opts);
        const auto ex = eval_exact_joint(g, 7u, opts);
        REQUIRE(cq.marginal);
        REQUIRE(ex.marginal);
        check_same(*cq.marginal, *ex.marginal, 1e-13);
      }
    }
    EvalOptions bad;
    bad.marginal_node = "nope";
    CHECK_THROWS_AS(eval_cq(support::staged_graph(rng, 2, 4), 2, bad), InvalidArgument);
  }

  TEST_CASE("cap errors name the node") {
    CompGraph g;
    for (int s = 0; s < 3; ++s) {
      std::vector<double> xs(64);
      for (int k = 0; k < 64; ++k) xs[k] = k + 0.01 * s;
      g.add_source("s" + std::to_string(s), SourceSpec::discrete(DiscreteMeasure::uniform(xs)));
    }
    g.add_op("sum3", NodeOp::add(), {"s0", "s1", "s2"});
    g.set_terminal("sum3");
    EvalOptions opts;
    opts.atom_cap = 100000;
    try {
      eval_cq(g, 6, opts);
      FAIL("expected CapExceeded");
    } catch (const CapExceeded& e) {
      CHECK(std::string(e.what()).find("'sum3'") != std::string::npos);
      CHECK(std::string(e.what()).find("--atom-cap") != std::string::npos);
    }
    CHECK_THROWS_AS(eval_exact_joint(g, std::nullopt, opts), CapExceeded);
    opts.atom_cap = 1 << 20;
    CHECK(eval_cq(g, 6, opts).terminal.size() <= 64);
  }

  TEST_CASE("stats") {
    std::mt19937_64 rng(44);
    const auto g = support::staged_graph(rng, 5, 30);
    const auto r = eval_cq(g, 3);
    CHECK(r.terminal.size() <= 8);
    CHECK(r.stats.size() == g.nodes().size() - 6);
    for (const auto& s : r.stats) {
      CHECK(s.cut_vertex);
      CHECK(s.support <= 8);
      CHECK(s.wall_ms >= 0);
    }
  }

  TEST_CASE("error propagation inequalities") {
    std::mt19937_64 rng(45);
    for (int i = 0; i < 120; ++i) {
      const auto g = detail::random_graph(rng, {8, 3, 64});
      const auto topo = validate(g);
      const auto exact = eval_exact_joint(g, std::nullopt).terminal;
      const auto dist = path_distortion_sums(g);
      for (unsigned n = 1; n <= 5; ++n) {
        // Quantized sources, no compression.
        double rhs = 0;
        for (auto s : topo.sources) rhs += quantization_error(*g.nodes()[s].source, n) * dist[s];
        CHECK(wasserstein1(exact, eval_exact_joint(g, n).terminal) <= rhs * (1 + 1e-9) + 1e-12);
        CHECK(wasserstein1(exact, eval_cq(g, n).terminal) <= theorem1_bound(g, n).total * (1 + 1e-9) + 1e-12);
      }
    }
  }

  TEST_CASE("compression step on staged graphs") {
    std::mt19937_64 rng(46);
    for (int i = 0; i < 100; ++i) {
      const auto g = support::staged_graph(rng, 1 + i % 4, 24);
      const auto topo = validate(g);
      const auto dist = path_distortion_sums(g);
      for (unsigned n = 1; n <= 4; ++n) {
        double rhs = 0;
        for (auto s : topo.sources) {
          rhs += quantize_source(*g.nodes()[s].source, n).measure.diameter() * dist[s];
        }
        rhs *= compression_factor(CompressionConstant::tight, n);
        const double lhs = wasserstein1(eval_exact_joint(g, n).terminal, eval_cq(g, n).terminal);
        CHECK(lhs <= rhs * (1 + 1e-9) + 1e-12);
      }
    }
  }
}
