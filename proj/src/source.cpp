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

#include "qdcg/source.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qdcg/error.hpp"
#include "qdcg/gaussian.hpp"
#include "qdcg/integrate.hpp"

namespace qdcg {

namespace {

std::vector<double> parse_numbers(std::string_view body, std::string_view what) {
  std::vector<double> out;
  std::string token;
  std::stringstream stream{std::string(body)};
  while (std::getline(stream, token, ',')) {
    char* end = nullptr;
    const double value = std::strtod(token.c_str(), &end);
    if (token.empty() || end != token.c_str() + token.size()) {
      throw InvalidArgument("source '" + std::string(what) + "': cannot parse number '" + token +
                            "'");
    }
    out.push_back(value);
  }
  return out;
}

double table_quantile(const std::vector<double>& p, const std::vector<double>& q, double u) {
  const auto it = std::upper_bound(p.begin(), p.end(), u);
  if (it == p.begin()) return q.front();
  if (it == p.end()) return q.back();
  const auto i = static_cast<std::size_t>(it - p.begin());
  const double t = (u - p[i - 1]) / (p[i] - p[i - 1]);
  return q[i - 1] + t * (q[i] - q[i - 1]);
}

std::string format_number(double x) {
  std::ostringstream out;
  out.precision(17);
  out << x;
  return out.str();
}

}  // namespace

SourceSpec SourceSpec::gaussian(double mean, double std) {
  if (!std::isfinite(mean) || !std::isfinite(std) || !(std > 0.0)) {
    throw InvalidArgument("gaussian source: need finite mean and std > 0");
  }
  return SourceSpec(GaussianSource{mean, std});
}

SourceSpec SourceSpec::uniform(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw InvalidArgument("uniform source: need finite lo < hi");
  }
  return SourceSpec(UniformSource{lo, hi});
}

SourceSpec SourceSpec::discrete(DiscreteMeasure measure) {
  return SourceSpec(DiscreteSource{std::move(measure)});
}

SourceSpec SourceSpec::tabulated_quantile(std::vector<double> p, std::vector<double> q) {
  if (p.size() != q.size() || p.size() < 2) {
    throw InvalidArgument("quantile table: need at least two (p, q) knots of equal count");
  }
  if (p.front() != 0.0 || p.back() != 1.0) {
    throw InvalidArgument("quantile table: p must run from 0 to 1");
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!std::isfinite(q[i])) throw InvalidArgument("quantile table: non-finite q");
    if (i > 0 && !(p[i] > p[i - 1])) {
      throw InvalidArgument("quantile table: p must be strictly increasing");
    }
    if (i > 0 && q[i] < q[i - 1]) {
      throw InvalidArgument("quantile table: q must be nondecreasing");
    }
  }
  QuantileSource src;
  src.table_p = std::move(p);
  src.table_q = std::move(q);
  src.quantile = [tp = src.table_p, tq = src.table_q](double u) {
    return table_quantile(tp, tq, u);
  };
  src.label = "table";
  return SourceSpec(std::move(src));
}

SourceSpec SourceSpec::quantile_function(std::function<double(double)> quantile,
                                         std::string label) {
  if (!quantile) throw InvalidArgument("quantile source: empty function");
  constexpr int kProbe = 1024;
  double previous = -std::numeric_limits<double>::infinity();
  for (int i = 1; i < kProbe; ++i) {
    const double value = quantile(static_cast<double>(i) / kProbe);
    if (std::isnan(value) || value < previous) {
      throw InvalidArgument("quantile source '" + label + "': not nondecreasing on (0, 1)");
    }
    previous = value;
  }
  return SourceSpec(QuantileSource{std::move(quantile), {}, {}, std::move(label)});
}

SourceSpec SourceSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw InvalidArgument("source '" + std::string(text) + "': expected <type>:<parameters>");
  }
  const std::string_view type = text.substr(0, colon);
  const std::string_view body = text.substr(colon + 1);
  if (type == "csv") {
    std::ifstream in{std::string(body)};
    if (!in) throw IoError("source: cannot open '" + std::string(body) + "'");
    return discrete(read_csv(in));
  }
  const auto values = parse_numbers(body, text);
  auto expect = [&](std::size_t count) {
    if (values.size() != count) {
      throw InvalidArgument("source '" + std::string(text) + "': expected " +
                            std::to_string(count) + " parameters");
    }
  };
  if (type == "gaussian" || type == "normal") {
    expect(2);
    return gaussian(values[0], values[1]);
  }
  if (type == "uniform") {
    expect(2);
    return uniform(values[0], values[1]);
  }
  if (type == "point") {
    expect(1);
    return discrete(DiscreteMeasure::point_mass(values[0]));
  }
  if (type == "discrete") {
    if (values.empty()) throw InvalidArgument("source 'discrete': no atoms");
    return discrete(DiscreteMeasure::uniform(values));
  }
  throw InvalidArgument("source: unknown type '" + std::string(type) + "'");
}

double SourceSpec::sample(double u) const {
  return std::visit(
      [u](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, GaussianSource>) {
          return s.mean + s.std * gaussian::quantile(u);
        } else if constexpr (std::is_same_v<T, UniformSource>) {
          return s.lo + (s.hi - s.lo) * u;
        } else if constexpr (std::is_same_v<T, DiscreteSource>) {
          return s.measure.quantile(u);
        } else {
          return s.quantile(u);
        }
      },
      variant_);
}

double SourceSpec::mean() const {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, GaussianSource>) {
          return s.mean;
        } else if constexpr (std::is_same_v<T, UniformSource>) {
          return 0.5 * (s.lo + s.hi);
        } else if constexpr (std::is_same_v<T, DiscreteSource>) {
          return s.measure.mean();
        } else {
          // The absolute first moment guards against symmetric heavy tails
          // whose signed integral cancels numerically.
          const auto& q = s.quantile;
          const auto abs_moment = integrate([&q](double u) { return std::fabs(q(u)); }, 0.0, 1.0,
                                            1e-10);
          const auto r = integrate(q, 0.0, 1.0, 1e-10);
          if (!abs_moment.converged || !r.converged) {
            throw NumericalError("quantile source '" + s.label +
                                 "': mean integral does not converge (infinite mean?)");
          }
          return r.value;
        }
      },
      variant_);
}

std::string SourceSpec::describe() const {
  return std::visit(
      [](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, GaussianSource>) {
          return "gaussian:" + format_number(s.mean) + "," + format_number(s.std);
        } else if constexpr (std::is_same_v<T, UniformSource>) {
          return "uniform:" + format_number(s.lo) + "," + format_number(s.hi);
        } else if constexpr (std::is_same_v<T, DiscreteSource>) {
          return "discrete[" + std::to_string(s.measure.size()) + " atoms]";
        } else {
          return "quantile[" + s.label + "]";
        }
      },
      variant_);
}

}  // namespace qdcg
