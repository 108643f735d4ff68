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

#include "qdcg/qdcg.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "qdcg/engine.hpp"
#include "qdcg/error.hpp"
#include "qdcg/gaussian.hpp"
#include "qdcg/graph.hpp"
#include "qdcg/measure.hpp"
#include "qdcg/quantize.hpp"
#include "qdcg/sde.hpp"
#include "qdcg/selfcheck.hpp"
#include "qdcg/source.hpp"

struct qdcg_measure {
  qdcg::DiscreteMeasure value;
};

struct qdcg_source {
  qdcg::SourceSpec value;
};

struct qdcg_graph {
  qdcg::CompGraph value;
};

struct qdcg_bound_report {
  qdcg::BoundReport value;
};

struct qdcg_eval_result {
  qdcg_measure terminal;
  std::optional<qdcg_measure> marginal;
  std::vector<qdcg::NodeStats> stats;
};

namespace {

thread_local std::string last_error;

qdcg_status fail(qdcg_status status, const char* message) {
  last_error = message;
  return status;
}

qdcg_status status_of(qdcg::ErrorKind kind) {
  switch (kind) {
    case qdcg::ErrorKind::invalid_argument: return QDCG_ERR_INVALID_ARGUMENT;
    case qdcg::ErrorKind::validation: return QDCG_ERR_VALIDATION;
    case qdcg::ErrorKind::cap_exceeded: return QDCG_ERR_CAP_EXCEEDED;
    case qdcg::ErrorKind::numerical: return QDCG_ERR_NUMERICAL;
    case qdcg::ErrorKind::io: return QDCG_ERR_IO;
  }
  return QDCG_ERR_INTERNAL;
}

// Runs body, translating exceptions into status codes.
template <class F>
qdcg_status guard(F&& body) {
  try {
    body();
    return QDCG_OK;
  } catch (const qdcg::Error& e) {
    return fail(status_of(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(QDCG_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(QDCG_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(QDCG_ERR_INTERNAL, "unknown error");
  }
}

#define QDCG_REQUIRE(cond)                                                   \
  do {                                                                      \
    if (!(cond)) return fail(QDCG_ERR_INVALID_ARGUMENT, "null argument: " #cond); \
  } while (0)

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

qdcg::SdeSpec gbm_spec(const qdcg_gbm& m, std::size_t steps) {
  return qdcg::SdeSpec::gbm(m.mu, m.sigma, m.y0, m.horizon, steps);
}

qdcg::CompressionConstant to_constant(qdcg_constant c) {
  return c == QDCG_CONSTANT_TIGHT ? qdcg::CompressionConstant::tight
                                  : qdcg::CompressionConstant::loose;
}

}  // namespace

extern "C" {

const char* qdcg_last_error(void) { return last_error.c_str(); }

const char* qdcg_status_name(qdcg_status status) {
  switch (status) {
    case QDCG_OK: return "ok";
    case QDCG_ERR_INVALID_ARGUMENT: return "invalid argument";
    case QDCG_ERR_VALIDATION: return "validation error";
    case QDCG_ERR_CAP_EXCEEDED: return "cap exceeded";
    case QDCG_ERR_NUMERICAL: return "numerical error";
    case QDCG_ERR_IO: return "i/o error";
    case QDCG_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* qdcg_version(void) { return "0.1.0"; }

void qdcg_string_free(char* s) { std::free(s); }

qdcg_status qdcg_measure_create(const double* atoms, const double* weights, size_t count,
                                qdcg_measure** out) {
  QDCG_REQUIRE(out);
  QDCG_REQUIRE(count == 0 || (atoms && weights));
  return guard([&] {
    *out = new qdcg_measure{qdcg::DiscreteMeasure(std::span(atoms, count), std::span(weights, count))};
  });
}

qdcg_status qdcg_measure_read_csv(const char* path, qdcg_measure** out) {
  QDCG_REQUIRE(path && out);
  return guard([&] {
    std::ifstream in(path);
    if (!in) throw qdcg::IoError(std::string("cannot open '") + path + "'");
    *out = new qdcg_measure{qdcg::read_csv(in)};
  });
}

qdcg_status qdcg_measure_write_csv(const qdcg_measure* m, const char* path,
                                   const char* const* comments, size_t comment_count) {
  QDCG_REQUIRE(m && path);
  QDCG_REQUIRE(comment_count == 0 || comments);
  return guard([&] {
    std::vector<std::string> lines(comments, comments + comment_count);
    std::ofstream file(path);
    if (!file) throw qdcg::IoError(std::string("cannot write '") + path + "'");
    qdcg::write_csv(file, m->value, lines);
    if (!file) throw qdcg::IoError(std::string("write failed for '") + path + "'");
  });
}

void qdcg_measure_free(qdcg_measure* m) { delete m; }
size_t qdcg_measure_size(const qdcg_measure* m) { return m ? m->value.size() : 0; }
const double* qdcg_measure_atoms(const qdcg_measure* m) { return m ? m->value.atoms().data() : nullptr; }
const double* qdcg_measure_weights(const qdcg_measure* m) {
  return m ? m->value.weights().data() : nullptr;
}
double qdcg_measure_mean(const qdcg_measure* m) {
  return m ? m->value.mean() : std::numeric_limits<double>::quiet_NaN();
}
double qdcg_measure_diameter(const qdcg_measure* m) {
  return m ? m->value.diameter() : std::numeric_limits<double>::quiet_NaN();
}

qdcg_status qdcg_wasserstein1(const qdcg_measure* a, const qdcg_measure* b, double* out) {
  QDCG_REQUIRE(a && b && out);
  return guard([&] { *out = qdcg::wasserstein1(a->value, b->value); });
}

qdcg_status qdcg_quantize_discrete(const qdcg_measure* m, unsigned n, qdcg_measure** out) {
  QDCG_REQUIRE(m && out);
  return guard([&] { *out = new qdcg_measure{qdcg::quantize_discrete(m->value, n)}; });
}

qdcg_status qdcg_compress(const qdcg_measure* m, unsigned n, qdcg_measure** out) {
  QDCG_REQUIRE(m && out);
  return guard([&] { *out = new qdcg_measure{qdcg::compress(m->value, n)}; });
}

qdcg_status qdcg_cell_coupling_error(const qdcg_measure* m, unsigned n, double* out) {
  QDCG_REQUIRE(m && out);
  return guard([&] { *out = qdcg::cell_coupling_error(m->value, n); });
}

qdcg_status qdcg_source_parse(const char* text, qdcg_source** out) {
  QDCG_REQUIRE(text && out);
  return guard([&] { *out = new qdcg_source{qdcg::SourceSpec::parse(text)}; });
}

qdcg_status qdcg_source_from_measure(const qdcg_measure* m, qdcg_source** out) {
  QDCG_REQUIRE(m && out);
  return guard([&] { *out = new qdcg_source{qdcg::SourceSpec::discrete(m->value)}; });
}

void qdcg_source_free(qdcg_source* s) { delete s; }

qdcg_status qdcg_source_describe(const qdcg_source* s, char** out) {
  QDCG_REQUIRE(s && out);
  return guard([&] { *out = copy_string(s->value.describe()); });
}

qdcg_status qdcg_quantize_source(const qdcg_source* s, unsigned n, qdcg_measure** out,
                                 char** tree_json) {
  QDCG_REQUIRE(s && out);
  return guard([&] {
    auto q = qdcg::quantize_source(s->value, n);
    char* json = tree_json ? copy_string(q.tree.to_json()) : nullptr;
    *out = new qdcg_measure{std::move(q.measure)};
    if (tree_json) *tree_json = json;
  });
}

qdcg_status qdcg_quantization_error(const qdcg_source* s, unsigned n, double* out) {
  QDCG_REQUIRE(s && out);
  return guard([&] { *out = qdcg::quantization_error(s->value, n); });
}

double qdcg_conditional_mean_tail(double x) { return qdcg::gaussian::conditional_mean_tail(x); }

qdcg_status qdcg_gaussian_rate(unsigned n_max, double* w1_out) {
  QDCG_REQUIRE(w1_out);
  return guard([&] {
    if (n_max > qdcg::gaussian::kMaxRateLevel) {
      throw qdcg::InvalidArgument("gaussian rate: n_max must be <= " +
                                  std::to_string(qdcg::gaussian::kMaxRateLevel));
    }
    for (const auto& row : qdcg::gaussian::rate_table(n_max)) w1_out[row.n] = row.w1;
  });
}

qdcg_status qdcg_omega_sequence(unsigned steps, double* out) {
  QDCG_REQUIRE(out);
  return guard([&] {
    const auto seq = qdcg::gaussian::omega_sequence(steps);
    std::copy(seq.values.begin(), seq.values.end(), out);
  });
}

qdcg_status qdcg_graph_from_json(const char* text, qdcg_graph** out) {
  QDCG_REQUIRE(text && out);
  return guard([&] {
    auto g = qdcg::graph_from_json(text);
    qdcg::validate(g);
    *out = new qdcg_graph{std::move(g)};
  });
}

qdcg_status qdcg_graph_from_file(const char* path, qdcg_graph** out) {
  QDCG_REQUIRE(path && out);
  return guard([&] {
    auto g = qdcg::graph_from_file(path);
    qdcg::validate(g);
    *out = new qdcg_graph{std::move(g)};
  });
}

qdcg_status qdcg_graph_bubble_sort(const qdcg_source* const* sources, size_t count, unsigned k,
                                   qdcg_graph** out) {
  QDCG_REQUIRE(out);
  QDCG_REQUIRE(count == 0 || sources);
  return guard([&] {
    std::vector<qdcg::SourceSpec> specs;
    for (size_t i = 0; i < count; ++i) {
      if (!sources[i]) throw qdcg::InvalidArgument("bubble sort: null source");
      specs.push_back(sources[i]->value);
    }
    *out = new qdcg_graph{qdcg::build_bubble_sort_graph(specs, k)};
  });
}

void qdcg_graph_free(qdcg_graph* g) { delete g; }
size_t qdcg_graph_node_count(const qdcg_graph* g) { return g ? g->value.nodes().size() : 0; }
const char* qdcg_graph_terminal(const qdcg_graph* g) { return g ? g->value.terminal().c_str() : ""; }

qdcg_status qdcg_graph_validate(const qdcg_graph* g) {
  QDCG_REQUIRE(g);
  return guard([&] { qdcg::validate(g->value); });
}

qdcg_status qdcg_graph_depth(const qdcg_graph* g, unsigned* out) {
  QDCG_REQUIRE(g && out);
  return guard([&] { *out = qdcg::depth(g->value); });
}

qdcg_status qdcg_graph_path_count(const qdcg_graph* g, uint64_t* out) {
  QDCG_REQUIRE(g && out);
  return guard([&] {
    const auto topo = qdcg::validate(g->value);
    const auto counts = qdcg::path_counts(g->value);
    uint64_t total = 0;
    for (auto s : topo.sources) {
      total = counts[s] > UINT64_MAX - total ? UINT64_MAX : total + counts[s];
    }
    *out = total;
  });
}

qdcg_status qdcg_theorem1_bound(const qdcg_graph* g, unsigned n, qdcg_constant constant,
                                qdcg_bound_report** out) {
  QDCG_REQUIRE(g && out);
  return guard([&] {
    *out = new qdcg_bound_report{qdcg::theorem1_bound(g->value, n, to_constant(constant))};
  });
}

void qdcg_bound_free(qdcg_bound_report* r) { delete r; }
double qdcg_bound_total(const qdcg_bound_report* r) { return r ? r->value.total : 0.0; }
double qdcg_bound_factor(const qdcg_bound_report* r) { return r ? r->value.factor : 0.0; }
size_t qdcg_bound_term_count(const qdcg_bound_report* r) { return r ? r->value.sources.size() : 0; }

qdcg_status qdcg_bound_term_at(const qdcg_bound_report* r, size_t i, qdcg_bound_term* out) {
  QDCG_REQUIRE(r && out);
  if (i >= r->value.sources.size()) return fail(QDCG_ERR_INVALID_ARGUMENT, "bound term index out of range");
  const auto& t = r->value.sources[i];
  *out = {t.source.c_str(), t.quantization_error, t.quantized_diameter, t.distortion_sum, t.term};
  return QDCG_OK;
}

qdcg_status qdcg_crude_bound(const qdcg_graph* g, unsigned n, qdcg_constant constant,
                             double* out) {
  QDCG_REQUIRE(g && out);
  return guard([&] { *out = qdcg::crude_bound(g->value, n, to_constant(constant)); });
}

void qdcg_eval_options_init(qdcg_eval_options* options) {
  if (!options) return;
  options->mode = QDCG_EVAL_CQ;
  options->n = 8;
  options->samples = 100000;
  options->seed = 1;
  options->atom_cap = qdcg::kDefaultAtomCap;
  options->node = nullptr;
}

qdcg_status qdcg_eval(const qdcg_graph* g, const qdcg_eval_options* options,
                      qdcg_eval_result** out) {
  QDCG_REQUIRE(g && options && out);
  return guard([&] {
    qdcg::EvalOptions opts;
    opts.atom_cap = options->atom_cap;
    if (options->node) opts.marginal_node = options->node;
    qdcg::EvalResult r{qdcg::DiscreteMeasure::point_mass(0.0), std::nullopt, {}, {}};
    switch (options->mode) {
      case QDCG_EVAL_EXACT:
        r = qdcg::eval_exact_joint(
            g->value, options->n < 0 ? std::nullopt : std::optional<unsigned>(options->n), opts);
        break;
      case QDCG_EVAL_CQ:
        if (options->n < 0) throw qdcg::InvalidArgument("eval cq: n must be >= 0");
        r = qdcg::eval_cq(g->value, static_cast<unsigned>(options->n), opts);
        break;
      case QDCG_EVAL_MC:
        r = qdcg::eval_mc(g->value, options->samples, options->seed, opts);
        break;
      default:
        throw qdcg::InvalidArgument("eval: unknown mode");
    }
    auto* res = new qdcg_eval_result{{std::move(r.terminal)}, std::nullopt, std::move(r.stats)};
    if (r.marginal) res->marginal = qdcg_measure{std::move(*r.marginal)};
    *out = res;
  });
}

void qdcg_eval_free(qdcg_eval_result* r) { delete r; }
const qdcg_measure* qdcg_eval_terminal(const qdcg_eval_result* r) { return r ? &r->terminal : nullptr; }
const qdcg_measure* qdcg_eval_marginal(const qdcg_eval_result* r) {
  return r && r->marginal ? &*r->marginal : nullptr;
}
size_t qdcg_eval_stat_count(const qdcg_eval_result* r) { return r ? r->stats.size() : 0; }

qdcg_status qdcg_eval_stat_at(const qdcg_eval_result* r, size_t i, qdcg_node_stats* out) {
  QDCG_REQUIRE(r && out);
  if (i >= r->stats.size()) return fail(QDCG_ERR_INVALID_ARGUMENT, "stat index out of range");
  const auto& s = r->stats[i];
  *out = {s.id.c_str(), s.joint_atoms, s.support, s.cut_vertex, s.compressed, s.wall_ms};
  return QDCG_OK;
}

qdcg_status qdcg_em_propagate(const qdcg_gbm* model, size_t steps, unsigned n, qdcg_measure** out) {
  QDCG_REQUIRE(model && out);
  return guard([&] {
    auto laws = qdcg::em_propagate(gbm_spec(*model, steps), n);
    *out = new qdcg_measure{std::move(laws.back())};
  });
}

qdcg_status qdcg_em_experiment(const qdcg_gbm* model, const size_t* steps,
                               const unsigned* levels, size_t cell_count, uint64_t ref_samples,
                               uint64_t seed, unsigned threads, qdcg_em_record* out, double* c,
                               double* c_prime) {
  QDCG_REQUIRE(model && out);
  QDCG_REQUIRE(cell_count > 0 && steps && levels);
  return guard([&] {
    const auto base = gbm_spec(*model, 1);
    std::vector<qdcg::ExperimentCell> cells;
    for (size_t i = 0; i < cell_count; ++i) cells.emplace_back(steps[i], levels[i]);
    const auto records = qdcg::em_error_experiment(base, cells, ref_samples, seed, threads);
    for (size_t i = 0; i < records.size(); ++i) {
      const auto& r = records[i];
      out[i] = {r.steps, r.level, r.w1, r.bound_fit, r.diameter, r.support, r.runtime_ms};
    }
    const auto fit = qdcg::fit_theorem2_envelope(records, model->horizon);
    if (c) *c = fit.c;
    if (c_prime) *c_prime = fit.c_prime;
  });
}

qdcg_status qdcg_selfcheck(qdcg_check_callback callback, void* user, int* all_passed) {
  return guard([&] {
    bool ok = true;
    qdcg::run_selfcheck([&](const qdcg::CheckResult& r) {
      ok = ok && r.passed;
      if (callback) callback(r.name.c_str(), r.passed ? 1 : 0, r.detail.c_str(), r.wall_ms, user);
    });
    if (all_passed) *all_passed = ok ? 1 : 0;
  });
}

}  // extern "C"
