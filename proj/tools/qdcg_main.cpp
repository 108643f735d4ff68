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

// qdcg command-line tool. Talks to the library only through qdcg/qdcg.h.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qdcg/qdcg.h"
#include "svg_plot.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitFailure = 2;

struct Failure {
  int code;
  std::string message;
};

void check(qdcg_status status, const std::string& context = {}) {
  if (status == QDCG_OK) return;
  std::string message = qdcg_last_error();
  if (!context.empty()) message = context + ": " + message;
  if (status == QDCG_ERR_CAP_EXCEEDED && message.find("--atom-cap") == std::string::npos) {
    message += " (raise it with --atom-cap)";
  }
  throw Failure{kExitFailure, message};
}

[[noreturn]] void usage(const std::string& message) { throw Failure{kExitUsage, message}; }

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Measure = std::unique_ptr<qdcg_measure, Deleter<qdcg_measure, qdcg_measure_free>>;
using Source = std::unique_ptr<qdcg_source, Deleter<qdcg_source, qdcg_source_free>>;
using Graph = std::unique_ptr<qdcg_graph, Deleter<qdcg_graph, qdcg_graph_free>>;
using Report = std::unique_ptr<qdcg_bound_report, Deleter<qdcg_bound_report, qdcg_bound_free>>;
using Result = std::unique_ptr<qdcg_eval_result, Deleter<qdcg_eval_result, qdcg_eval_free>>;

std::string owned(char* s) {
  std::string out = s ? s : "";
  qdcg_string_free(s);
  return out;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Command-line arguments are parsed into sources here so that a bad spec
// is reported as a usage error.
Source parse_source(const std::string& text) {
  qdcg_source* s = nullptr;
  const qdcg_status status = qdcg_source_parse(text.c_str(), &s);
  if (status == QDCG_ERR_INVALID_ARGUMENT) usage(std::string("--source: ") + qdcg_last_error());
  check(status, "--source");
  return Source(s);
}

Graph load_graph(const std::string& path) {
  qdcg_graph* g = nullptr;
  check(qdcg_graph_from_file(path.c_str(), &g), path);
  return Graph(g);
}

struct Globals {
  unsigned threads = 1;
  std::size_t atom_cap = std::size_t{1} << 24;
  std::string out_dir;
};

Globals globals;

std::string resolve_output(const std::string& path) {
  if (path.empty()) return path;
  std::filesystem::path p(path);
  if (!globals.out_dir.empty() && p.is_relative()) p = std::filesystem::path(globals.out_dir) / p;
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  return p.string();
}

// Echo of the resolved configuration: one rerunnable command line followed
// by one "name = value" line per option.
std::vector<std::string> echo_config(const CLI::App& app, const CLI::App& sub) {
  std::vector<std::string> lines;
  std::string command = "command: qdcg";
  std::vector<std::string> settings;
  auto visit = [&](const CLI::App& a) {
    for (const CLI::Option* opt : a.get_options()) {
      if (opt->get_lnames().empty()) continue;
      const std::string name = opt->get_lnames().front();
      if (name == "help") continue;
      std::string value;
      if (opt->get_expected_min() == 0) {
        if (opt->count() == 0) continue;
        command += " --" + name;
        settings.push_back(name + " = true");
        continue;
      }
      if (opt->count() > 0) {
        for (std::size_t i = 0; i < opt->results().size(); ++i) {
          value += (i ? "," : "") + opt->results()[i];
        }
      } else {
        value = opt->get_default_str();
      }
      if (value.empty()) continue;
      command += " --" + name + " " + value;
      settings.push_back(name + " = " + value);
    }
  };
  visit(app);
  command += " " + sub.get_name();
  visit(sub);
  lines.push_back(command);
  lines.push_back(std::string("library: qdcg ") + qdcg_version());
  for (auto& s : settings) lines.push_back(std::move(s));
  return lines;
}

class Output {
 public:
  explicit Output(const std::string& path) : path_(resolve_output(path)) {
    if (!path_.empty()) {
      file_.open(path_);
      if (!file_) throw Failure{kExitFailure, "cannot write '" + path_ + "'"};
    }
  }
  std::ostream& stream() { return path_.empty() ? std::cout : file_; }
  const std::string& path() const { return path_; }
  void comments(const std::vector<std::string>& lines) {
    for (const auto& l : lines) stream() << "# " << l << '\n';
  }
  void finish() {
    stream().flush();
    if (!stream()) throw Failure{kExitFailure, "write failed for '" + path_ + "'"};
    if (!path_.empty()) std::cerr << "wrote " << path_ << '\n';
  }

 private:
  std::string path_;
  std::ofstream file_;
};

void write_measure(const qdcg_measure* m, const std::string& out,
                   const std::vector<std::string>& comments) {
  const std::string path = resolve_output(out);
  if (!path.empty()) {
    std::vector<const char*> ptrs;
    for (const auto& c : comments) ptrs.push_back(c.c_str());
    check(qdcg_measure_write_csv(m, path.c_str(), ptrs.data(), ptrs.size()), path);
    std::cerr << "wrote " << path << '\n';
    return;
  }
  for (const auto& c : comments) std::cout << "# " << c << '\n';
  std::cout << "atom,weight\n";
  const double* a = qdcg_measure_atoms(m);
  const double* w = qdcg_measure_weights(m);
  for (std::size_t i = 0; i < qdcg_measure_size(m); ++i) {
    std::cout << num(a[i]) << ',' << num(w[i]) << '\n';
  }
}

// ---------------------------------------------------------------------------

struct QuantizeArgs {
  std::string source;
  unsigned n = 0;
  std::string out;
  std::string tree;
};

void run_quantize(const QuantizeArgs& args, std::vector<std::string> echo) {
  const Source src = parse_source(args.source);
  qdcg_measure* m = nullptr;
  char* json = nullptr;
  check(qdcg_quantize_source(src.get(), args.n, &m, args.tree.empty() ? nullptr : &json));
  const Measure q(m);
  const std::string tree = owned(json);
  double err = 0.0;
  check(qdcg_quantization_error(src.get(), args.n, &err));
  echo.push_back("law = " + owned([&] {
                   char* d = nullptr;
                   check(qdcg_source_describe(src.get(), &d));
                   return d;
                 }()));
  echo.push_back("quantization_error = " + num(err));
  echo.push_back("mean = " + num(qdcg_measure_mean(q.get())));
  write_measure(q.get(), args.out, echo);
  if (!args.tree.empty()) {
    Output t(args.tree);
    t.stream() << tree << '\n';
    t.finish();
  }
}

struct RateArgs {
  unsigned n_max = 13;
  std::string out;
};

void run_gaussian_rate(const RateArgs& args, const std::vector<std::string>& echo) {
  std::vector<double> w1(args.n_max + 1);
  check(qdcg_gaussian_rate(args.n_max, w1.data()));
  Output out(args.out);
  out.comments(echo);
  out.stream() << "n,w1,ratio\n";
  for (unsigned n = 0; n <= args.n_max; ++n) {
    out.stream() << n << ',' << num(w1[n]) << ',' << (n ? num(w1[n - 1] / w1[n]) : "") << '\n';
  }
  out.finish();
}

struct OmegaArgs {
  unsigned steps = 5000;
  std::string out;
};

void run_omega(const OmegaArgs& args, const std::vector<std::string>& echo) {
  std::vector<double> omega(args.steps + 1);
  check(qdcg_omega_sequence(args.steps, omega.data()));
  Output out(args.out);
  out.comments(echo);
  out.stream() << "j,omega,omega_over_sqrt_2j\n";
  for (unsigned j = 0; j <= args.steps; ++j) {
    out.stream() << j << ',' << num(omega[j]) << ','
                 << (j ? num(omega[j] / std::sqrt(2.0 * j)) : "") << '\n';
  }
  out.finish();
}

struct BoundArgs {
  std::string graph;
  unsigned n = 4;
  std::string constant = "loose";
  bool crude = false;
  std::string out;
};

void run_bound(const BoundArgs& args, const std::vector<std::string>& echo) {
  const Graph g = load_graph(args.graph);
  const qdcg_constant c = args.constant == "tight" ? QDCG_CONSTANT_TIGHT : QDCG_CONSTANT_LOOSE;
  qdcg_bound_report* r = nullptr;
  check(qdcg_theorem1_bound(g.get(), args.n, c, &r));
  const Report report(r);
  unsigned depth = 0;
  std::uint64_t paths = 0;
  check(qdcg_graph_depth(g.get(), &depth));
  check(qdcg_graph_path_count(g.get(), &paths));

  Output out(args.out);
  out.comments(echo);
  out.comments({"terminal = " + std::string(qdcg_graph_terminal(g.get())),
                "depth = " + std::to_string(depth), "paths = " + std::to_string(paths),
                "compression_factor = " + num(qdcg_bound_factor(report.get())),
                "bound = " + num(qdcg_bound_total(report.get()))});
  if (args.crude) {
    double crude = 0.0;
    check(qdcg_crude_bound(g.get(), args.n, c, &crude));
    out.comments({"crude_bound = " + num(crude)});
  }
  out.stream() << "source,quantization_error,quantized_diameter,distortion_sum,term\n";
  for (std::size_t i = 0; i < qdcg_bound_term_count(report.get()); ++i) {
    qdcg_bound_term t{};
    check(qdcg_bound_term_at(report.get(), i, &t));
    out.stream() << t.source << ',' << num(t.quantization_error) << ',' << num(t.quantized_diameter)
                 << ',' << num(t.distortion_sum) << ',' << num(t.term) << '\n';
  }
  out.finish();
}

struct EvalArgs {
  std::string graph;
  std::string mode = "cq";
  int n = 8;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  std::string node;
  std::string out;
  std::string stats;
};

qdcg_eval_mode parse_mode(const std::string& mode) {
  if (mode == "exact") return QDCG_EVAL_EXACT;
  if (mode == "cq") return QDCG_EVAL_CQ;
  return QDCG_EVAL_MC;
}

Result evaluate(const qdcg_graph* g, const EvalArgs& args) {
  qdcg_eval_options opts;
  qdcg_eval_options_init(&opts);
  opts.mode = parse_mode(args.mode);
  opts.n = args.n;
  opts.samples = args.samples;
  opts.seed = args.seed;
  opts.atom_cap = globals.atom_cap;
  opts.node = args.node.empty() ? nullptr : args.node.c_str();
  qdcg_eval_result* r = nullptr;
  check(qdcg_eval(g, &opts, &r));
  return Result(r);
}

void run_eval(const EvalArgs& args, std::vector<std::string> echo) {
  const Graph g = load_graph(args.graph);
  const Result r = evaluate(g.get(), args);
  const qdcg_measure* m = args.node.empty() ? qdcg_eval_terminal(r.get()) : qdcg_eval_marginal(r.get());
  echo.push_back("law_of = " + (args.node.empty() ? std::string(qdcg_graph_terminal(g.get())) : args.node));
  echo.push_back("support = " + std::to_string(qdcg_measure_size(m)));
  echo.push_back("mean = " + num(qdcg_measure_mean(m)));
  write_measure(m, args.out, echo);
  if (!args.stats.empty()) {
    Output s(args.stats);
    s.stream() << "node,joint_atoms,support,cut_vertex,compressed,wall_ms\n";
    for (std::size_t i = 0; i < qdcg_eval_stat_count(r.get()); ++i) {
      qdcg_node_stats st{};
      check(qdcg_eval_stat_at(r.get(), i, &st));
      s.stream() << st.id << ',' << st.joint_atoms << ',' << st.support << ',' << st.cut_vertex << ','
                 << st.compressed << ',' << num(st.wall_ms) << '\n';
    }
    s.finish();
  }
}

struct EmArgs {
  double mu = 0.05;
  double sigma = 0.4;
  double y0 = 100.0;
  double horizon = 1.0;
  std::vector<std::size_t> steps{1, 100, 200, 300, 400, 500, 600, 700, 800,
                                 900, 1000, 1100, 1200, 1300, 1400, 1500};
  std::vector<unsigned> levels{5, 6, 7, 8, 9, 10, 11};
  std::string layout = "figure";
  unsigned fixed_n = 10;
  std::size_t fixed_N = 500;
  std::uint64_t ref_samples = 1000000;
  std::uint64_t seed = 1;
  std::string out;
  std::string svg;
};

void run_em(const EmArgs& args, const std::vector<std::string>& echo) {
  const qdcg_gbm model{args.mu, args.sigma, args.y0, args.horizon};
  std::vector<std::size_t> steps;
  std::vector<unsigned> levels;
  auto add = [&](std::size_t N, unsigned n) {
    for (std::size_t i = 0; i < steps.size(); ++i) {
      if (steps[i] == N && levels[i] == n) return;
    }
    steps.push_back(N);
    levels.push_back(n);
  };
  if (args.layout == "figure") {
    for (auto N : args.steps) add(N, args.fixed_n);
    for (auto n : args.levels) add(args.fixed_N, n);
  } else {
    for (auto N : args.steps)
      for (auto n : args.levels) add(N, n);
  }

  std::vector<qdcg_em_record> records(steps.size());
  double c = 0.0, c_prime = 0.0;
  check(qdcg_em_experiment(&model, steps.data(), levels.data(), steps.size(), args.ref_samples,
                           args.seed, globals.threads, records.data(), &c, &c_prime),
        "em");

  Output out(args.out);
  out.comments(echo);
  out.comments({"fit c = " + num(c), "fit c_prime = " + num(c_prime)});
  out.stream() << "N,n,w1,bound_fit,diam,support,runtime_ms\n";
  for (const auto& r : records) {
    out.stream() << r.steps << ',' << r.level << ',' << num(r.w1) << ',' << num(r.bound_fit) << ','
                 << num(r.diameter) << ',' << r.support << ',' << num(r.runtime_ms) << '\n';
  }
  out.finish();

  if (!args.svg.empty()) {
    const unsigned plot_n = args.layout == "figure" ? args.fixed_n : args.levels.back();
    const std::size_t plot_N = args.layout == "figure" ? args.fixed_N : args.steps.back();
    qdcg::tools::Series a_w{"W1", {}, {}}, a_b{"bound (fit)", {}, {}};
    qdcg::tools::Series b_w{"W1", {}, {}}, b_b{"bound (fit)", {}, {}};
    for (const auto& r : records) {
      if (r.level == plot_n) {
        a_w.x.push_back(r.steps), a_w.y.push_back(r.w1);
        a_b.x.push_back(r.steps), a_b.y.push_back(r.bound_fit);
      }
      if (r.steps == plot_N) {
        b_w.x.push_back(r.level), b_w.y.push_back(r.w1);
        b_b.x.push_back(r.level), b_b.y.push_back(r.bound_fit);
      }
    }
    std::vector<qdcg::tools::Panel> panels{
        {"W1 vs N at n = " + std::to_string(plot_n), "N", "W1", {a_w, a_b}},
        {"W1 vs n at N = " + std::to_string(plot_N), "n", "W1", {b_w, b_b}}};
    Output svg(args.svg);
    svg.stream() << qdcg::tools::render_svg(panels);
    svg.finish();
  }
}

struct SortArgs {
  std::string source = "discrete:1,2,3,4";
  unsigned m = 3;
  std::vector<unsigned> k;
  std::string mode = "exact";
  int n = -1;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  std::string out;
};

void run_sort_demo(const SortArgs& args, const std::vector<std::string>& echo) {
  const Source src = parse_source(args.source);
  std::vector<const qdcg_source*> sources(args.m, src.get());
  std::vector<unsigned> ks = args.k;
  if (ks.empty()) {
    for (unsigned k = 1; k <= args.m; ++k) ks.push_back(k);
  }
  Output out(args.out);
  out.comments(echo);
  out.stream() << "k,atom,weight\n";
  for (unsigned k : ks) {
    qdcg_graph* g = nullptr;
    check(qdcg_graph_bubble_sort(sources.data(), sources.size(), k, &g));
    const Graph graph(g);
    EvalArgs e;
    e.mode = args.mode;
    e.n = args.mode == "cq" && args.n < 0 ? 8 : args.n;
    e.samples = args.samples;
    e.seed = args.seed;
    const Result r = evaluate(graph.get(), e);
    const qdcg_measure* law = qdcg_eval_terminal(r.get());
    const double* a = qdcg_measure_atoms(law);
    const double* w = qdcg_measure_weights(law);
    for (std::size_t i = 0; i < qdcg_measure_size(law); ++i) {
      out.stream() << k << ',' << num(a[i]) << ',' << num(w[i]) << '\n';
    }
  }
  out.finish();
}

int run_selfcheck() {
  int all = 0;
  auto report = [](const char* name, int passed, const char* detail, double ms, void*) {
    std::printf("%s  %-38s %s (%.0f ms)\n", passed ? "PASS" : "FAIL", name, detail, ms);
    std::fflush(stdout);
  };
  check(qdcg_selfcheck(report, nullptr, &all));
  std::printf("selfcheck: %s\n", all ? "all passed" : "FAILURES");
  return all ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantized distributional computational graphs"};
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->always_capture_default();
  app.add_option("--threads", globals.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
  app.add_option("--atom-cap", globals.atom_cap, "Largest joint table in atoms")
      ->check(CLI::PositiveNumber);
  app.add_option("--out-dir", globals.out_dir, "Directory for relative output paths");
  app.set_version_flag("--version", qdcg_version());

  QuantizeArgs qa;
  auto* quantize = app.add_subcommand("quantize", "Quantize a source at level n");
  quantize->add_option("--source", qa.source, "gaussian:m,s | uniform:lo,hi | point:x | discrete:x,.. | csv:path")
      ->required();
  quantize->add_option("--n", qa.n, "Level (at most 2^n atoms)")->required()->check(CLI::Range(0u, 30u));
  quantize->add_option("--out", qa.out, "CSV output (stdout when omitted)");
  quantize->add_option("--tree", qa.tree, "Write the cell tree as JSON");

  RateArgs ra;
  auto* rate = app.add_subcommand("gaussian-rate", "Quantization error of N(0,1) by level");
  rate->add_option("--n-max", ra.n_max)->check(CLI::Range(0u, 20u));
  rate->add_option("--out", ra.out);

  OmegaArgs oa;
  auto* omega = app.add_subcommand("omega", "Iterated tail means of N(0,1)");
  omega->add_option("--steps", oa.steps)->check(CLI::Range(1u, 100000000u));
  omega->add_option("--out", oa.out);

  BoundArgs ba;
  auto* bound = app.add_subcommand("bound", "End-to-end error bound of a graph");
  bound->add_option("--graph", ba.graph, "Graph JSON file")->required();
  bound->add_option("--n", ba.n)->check(CLI::Range(0u, 30u));
  bound->add_option("--constant", ba.constant)->check(CLI::IsMember({"loose", "tight"}));
  bound->add_flag("--crude", ba.crude, "Also print the crude bound");
  bound->add_option("--out", ba.out);

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Evaluate a graph");
  eval->add_option("--graph", ea.graph, "Graph JSON file")->required();
  eval->add_option("--mode", ea.mode)->check(CLI::IsMember({"exact", "cq", "mc"}));
  eval->add_option("--n", ea.n, "Level; exact mode keeps sources as given when < 0")
      ->check(CLI::Range(-1, 30));
  eval->add_option("--samples", ea.samples)->check(CLI::PositiveNumber);
  eval->add_option("--seed", ea.seed);
  eval->add_option("--node", ea.node, "Emit this node's law instead of the terminal's");
  eval->add_option("--out", ea.out);
  eval->add_option("--stats", ea.stats, "Per-node statistics CSV");

  EmArgs em;
  auto* emc = app.add_subcommand("em", "Euler-Maruyama error study for geometric Brownian motion");
  emc->add_option("--mu", em.mu);
  emc->add_option("--sigma", em.sigma);
  emc->add_option("--y0", em.y0);
  emc->add_option("--T", em.horizon);
  emc->add_option("--steps", em.steps)->delimiter(',');
  emc->add_option("--n", em.levels)->delimiter(',');
  emc->add_option("--layout", em.layout, "grid: every (N, n); figure: N sweep at --fixed-n plus n sweep at --fixed-N")
      ->check(CLI::IsMember({"grid", "figure"}));
  emc->add_option("--fixed-n", em.fixed_n);
  emc->add_option("--fixed-N", em.fixed_N);
  emc->add_option("--ref-samples", em.ref_samples)->check(CLI::PositiveNumber);
  emc->add_option("--seed", em.seed);
  emc->add_option("--out", em.out);
  emc->add_option("--svg", em.svg);

  SortArgs sa;
  auto* sort = app.add_subcommand("sort-demo", "Order statistics through the bubble-sort graph");
  sort->add_option("--source", sa.source);
  sort->add_option("--m", sa.m, "Number of iid sources")->check(CLI::Range(2u, 64u));
  sort->add_option("--k", sa.k, "Order statistics (default all)")->delimiter(',');
  sort->add_option("--mode", sa.mode)->check(CLI::IsMember({"exact", "cq", "mc"}));
  sort->add_option("--n", sa.n)->check(CLI::Range(-1, 30));
  sort->add_option("--samples", sa.samples)->check(CLI::PositiveNumber);
  sort->add_option("--seed", sa.seed);
  sort->add_option("--out", sa.out);

  auto* selfcheck = app.add_subcommand("selfcheck", "Fast invariant checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    const CLI::App* sub = app.get_subcommands().front();
    const auto echo = echo_config(app, *sub);
    if (sub == quantize) run_quantize(qa, echo);
    else if (sub == rate) run_gaussian_rate(ra, echo);
    else if (sub == omega) run_omega(oa, echo);
    else if (sub == bound) run_bound(ba, echo);
    else if (sub == eval) {
      if (ea.mode == "cq" && ea.n < 0) usage("eval: --mode cq needs --n >= 0");
      run_eval(ea, echo);
    } else if (sub == emc) {
      if (em.steps.empty() || em.levels.empty()) usage("em: --steps and --n must be non-empty");
      run_em(em, echo);
    } else if (sub == sort) {
      for (auto k : sa.k) {
        if (k < 1 || k > sa.m) usage("sort-demo: --k values must be in 1..--m");
      }
      run_sort_demo(sa, echo);
    } else if (sub == selfcheck) return run_selfcheck();
  } catch (const Failure& f) {
    std::cerr << "qdcg: " << f.message << '\n';
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "qdcg: " << e.what() << '\n';
    return kExitFailure;
  }
  return 0;
}
