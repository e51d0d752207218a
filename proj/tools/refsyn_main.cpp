#include "refsyn/bench.hpp"
#include "refsyn/config.hpp"
#include "refsyn/controller.hpp"
#include "refsyn/error.hpp"
#include "refsyn/refine.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <regex>

namespace fs = std::filesystem;
using namespace refsyn;

namespace {

struct Args {
  std::vector<std::string> configs;
  std::string spec_path, fts_path, out_dir;
  std::string backend = "bdd", encoding = "log", reorder = "none";
  std::size_t refinements = 0;
  std::string budget;
  std::uint64_t seed = 1;
  std::size_t runs = 1, horizon = 200, repeats = 3, splits_per_iteration = 0;
  std::vector<std::size_t> levels;
  std::string test;
  bool no_reorder_rows = false;
};

std::chrono::milliseconds parse_budget(const std::string &text) {
  static const std::regex re(R"(\s*(-?[0-9]+(?:\.[0-9]+)?)\s*(ms|s|m|h)?\s*)");
  std::smatch m;
  if (!std::regex_match(text, m, re))
    throw UsageError("cannot parse budget '" + text + "' (examples: 500ms, 60s, 5m, 1h)");
  double value = std::stod(m[1]);
  const std::string unit = m[2].matched ? m[2].str() : "s";
  const double scale = unit == "ms" ? 1.0 : unit == "s" ? 1e3 : unit == "m" ? 6e4 : 3.6e6;
  const auto ms = static_cast<long long>(value * scale);
  if (ms <= 0)
    throw UsageError("budget must be positive, got '" + text + "'");
  return std::chrono::milliseconds(ms);
}

/// Writes to out_dir/name when --out is given, else to stdout.
template <class F> void emit(const Args &a, const std::string &name, F &&write) {
  if (a.out_dir.empty()) {
    write(std::cout);
    return;
  }
  fs::create_directories(a.out_dir);
  const fs::path path = fs::path(a.out_dir) / name;
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write " + path.string());
  write(out);
  std::cerr << "wrote " << path.string() << '\n';
}

ProblemConfig one_config(const Args &a) {
  if (a.configs.size() != 1)
    throw UsageError("exactly one --config is required");
  ProblemConfig cfg = load_config(a.configs.front());
  if (!a.spec_path.empty())
    cfg.spec = load_spec(a.spec_path);
  return cfg;
}

RefineOptions refine_options(const Args &a, const ProblemConfig &cfg) {
  RefineOptions o;
  o.backend = backend_from_string(a.backend);
  o.encoding = encoding_kind_from_string(a.encoding);
  o.reorder = reorder_from_string(a.reorder);
  o.manager = cfg.manager;
  o.win.scope = cfg.scope;
  o.splits_per_iteration =
      a.splits_per_iteration ? a.splits_per_iteration : cfg.refine.splits_per_iteration;
  o.min_width = cfg.refine.min_width;
  o.max_iterations = cfg.refine.max_iterations;
  o.target = cfg.target;
  if (a.refinements > 0) {
    o.max_splits = a.refinements;
    o.max_iterations = std::numeric_limits<std::size_t>::max();
  }
  if (!a.budget.empty()) {
    o.wall_limit = parse_budget(a.budget);
    if (a.refinements == 0)
      o.max_iterations = std::numeric_limits<std::size_t>::max();
  }
  return o;
}

void print_ids(std::ostream &out, const Bitset &s) {
  for (auto q : s.to_ids())
    out << ' ' << q;
}

void write_synth(std::ostream &out, const Fts &fts, const WinResult &r) {
  out << "backend " << to_string(r.backend) << '\n';
  out << "states " << fts.state_count() << '\n';
  out << "win";
  print_ids(out, r.win);
  out << '\n';
  const auto &t = r.trace;
  out << "outer_iterations " << t.outer.size() << '\n';
  for (std::size_t j = 0; j < t.passes.size(); ++j) {
    const auto &p = t.passes[j];
    out << "pass " << j << " nu_iterations " << p.iterates.size() << " inner_lengths";
    for (const auto &l : p.inner)
      out << ' ' << l.size();
    out << " value";
    print_ids(out, t.outer[j]);
    out << '\n';
  }
}

int cmd_abstract(const Args &a) {
  const ProblemConfig cfg = one_config(a);
  Abstraction abs(cfg.system);
  if (a.refinements > 0) {
    RefineOptions o = refine_options(a, cfg);
    o.backend = Backend::List;
    refine_loop(abs, cfg.spec, o);
  }
  emit(a, cfg.name + ".fts", [&](std::ostream &out) { write_fts(out, abs.fts()); });
  return 0;
}

int cmd_synth(const Args &a) {
  Fts fts;
  Spec spec;
  ActionScope scope = ActionScope::Enabled;
  std::string name = "synth";
  if (!a.fts_path.empty()) {
    if (!a.configs.empty())
      throw UsageError("--fts and --config are mutually exclusive");
    std::ifstream in(a.fts_path);
    if (!in)
      throw UsageError("cannot open " + a.fts_path);
    fts = read_fts(in);
    if (!a.spec_path.empty())
      spec = load_spec(a.spec_path);
    name = fs::path(a.fts_path).stem().string();
  } else {
    const ProblemConfig cfg = one_config(a);
    fts = Abstraction(cfg.system).fts().copy_explicit();
    spec = cfg.spec;
    scope = cfg.scope;
    name = cfg.name;
  }
  const Backend backend = backend_from_string(a.backend);
  if (backend == Backend::Symbolic)
    fts.attach_symbolic(encoding_kind_from_string(a.encoding));
  WinOptions wo;
  wo.scope = scope;
  const WinResult r = win(fts, spec, backend, wo);
  emit(a, name + ".win", [&](std::ostream &out) { write_synth(out, fts, r); });
  return 0;
}

int cmd_refine(const Args &a) {
  const ProblemConfig cfg = one_config(a);
  Abstraction abs(cfg.system);
  const RunReport rep = refine_loop(abs, cfg.spec, refine_options(a, cfg));
  emit(a, cfg.name + "_run.csv", [&](std::ostream &out) { write_run_report(out, rep); });
  std::cerr << "stopped: " << rep.reason << " after " << rep.rows.size() << " iterations, "
            << rep.splits << " splits\n";
  return 0;
}

int cmd_simulate(const Args &a) {
  const ProblemConfig cfg = one_config(a);
  Abstraction abs(cfg.system);
  RefineOptions o = refine_options(a, cfg);
  // the controller needs full iterates, which the list backend provides
  o.backend = Backend::List;
  refine_loop(abs, cfg.spec, o);
  WinOptions wo;
  wo.scope = cfg.scope;
  const WinResult r = win(abs.fts(), cfg.spec, Backend::List, wo);
  if (r.win.none())
    throw std::runtime_error("winning set is empty; nothing to simulate");
  const Controller ctrl = Controller::extract(abs.fts(), cfg.spec, r);
  const auto cells = r.win.to_ids();

  std::mt19937_64 rng(a.seed);
  for (std::size_t run = 0; run < a.runs; ++run) {
    const Box &cell = abs.partition().cell(cells[rng() % cells.size()]);
    std::vector<double> x0(cell.dim());
    for (std::size_t d = 0; d < x0.size(); ++d)
      x0[d] = std::uniform_real_distribution<double>(cell.lo[d], cell.hi[d])(rng);
    SimOptions so;
    so.horizon = a.horizon;
    so.seed = rng();
    const auto report = simulate(ctrl, abs, x0, so);
    emit(a, cfg.name + "_sim" + std::to_string(run) + ".txt",
         [&](std::ostream &out) { write_report(out, report); });
  }
  return 0;
}

std::vector<ProblemConfig> bench_layouts(const Args &a) {
  std::vector<std::string> paths = a.configs;
  if (paths.empty()) {
    const fs::path dir = fs::path(REFSYN_SOURCE_DIR) / "configs" / "layouts";
    for (const auto &e : fs::directory_iterator(dir))
      if (e.path().extension() == ".json")
        paths.push_back(e.path().string());
    std::sort(paths.begin(), paths.end());
  }
  std::vector<ProblemConfig> out;
  for (const auto &p : paths)
    out.push_back(load_config(p));
  return out;
}

int cmd_bench(const Args &a) {
  BenchOptions bo;
  bo.repeats = a.repeats;
  bo.splits_per_iteration = a.splits_per_iteration;
  const ReorderPolicy method =
      reorder_from_string(a.reorder == "none" ? "sift" : a.reorder);
  bo.representations = default_representations(!a.no_reorder_rows, method);
  if (a.test == "T1") {
    bo.refinements = a.refinements ? a.refinements : 2000;
    const auto rows = bench_t1(bench_layouts(a), bo);
    emit(a, "bench_t1.csv", [&](std::ostream &out) { write_bench(out, rows); });
  } else if (a.test == "T2") {
    const auto layouts = bench_layouts(a);
    if (layouts.size() != 1)
      throw UsageError("bench T2 takes exactly one --config");
    std::vector<std::size_t> levels = a.levels;
    if (levels.empty())
      levels = {500, 1000, 1500, 2000, 2500, 3000, 3500, 4000};
    const auto rows = bench_t2(layouts.front(), levels, bo);
    emit(a, "bench_t2.csv", [&](std::ostream &out) { write_bench(out, rows); });
  } else if (a.test == "T3") {
    const auto layouts = bench_layouts(a);
    if (layouts.size() != 1)
      throw UsageError("bench T3 takes exactly one --config");
    const auto budget = parse_budget(a.budget.empty() ? "3600s" : a.budget);
    const auto results = bench_t3(layouts.front(), budget, bo);
    for (const auto &r : results) {
      const std::string tag =
          r.rep.name() + (r.rep.reorder == ReorderPolicy::None
                              ? ""
                              : "_" + std::string(to_string(r.rep.reorder)));
      emit(a, "bench_t3_run_" + tag + ".csv",
           [&](std::ostream &out) { write_run_report(out, r.report); });
    }
    emit(a, "bench_t3_buckets.csv",
         [&](std::ostream &out) { write_t3_buckets(out, t3_buckets(results)); });
    emit(a, "bench_t3_summary.csv",
         [&](std::ostream &out) { write_t3_summary(out, results); });
  } else {
    throw UsageError("bench test must be T1, T2 or T3");
  }
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Abstraction-refinement controller synthesis"};
  app.require_subcommand(1);
  Args a;

  auto common = [&](CLI::App *sub) {
    sub->add_option("--config", a.configs, "Problem description (JSON)");
    sub->add_option("--spec", a.spec_path, "Specification override (JSON)");
    sub->add_option("--backend", a.backend, "list | bdd")
        ->check(CLI::IsMember({"list", "bdd"}));
    sub->add_option("--encoding", a.encoding, "log | split")
        ->check(CLI::IsMember({"log", "split"}));
    sub->add_option("--reorder", a.reorder, "none | sift | anneal")
        ->check(CLI::IsMember({"none", "sift", "anneal"}));
    sub->add_option("--refinements", a.refinements, "Number of cell splits");
    sub->add_option("--budget", a.budget, "Wall-clock budget, e.g. 60s, 5m, 1h");
    sub->add_option("--seed", a.seed, "Random seed");
    sub->add_option("--out", a.out_dir, "Output directory (default: stdout)");
    sub->add_option("--splits-per-iteration", a.splits_per_iteration,
                    "Cells split per refinement iteration");
  };

  auto *abstract = app.add_subcommand("abstract", "Write the initial (or refined) abstraction");
  common(abstract);
  auto *synth = app.add_subcommand("synth", "Compute the winning set");
  common(synth);
  synth->add_option("--fts", a.fts_path, "Transition system file instead of a config");
  auto *refine = app.add_subcommand("refine", "Run the refinement loop");
  common(refine);
  auto *sim = app.add_subcommand("simulate", "Closed-loop simulation of the extracted controller");
  common(sim);
  sim->add_option("--runs", a.runs, "Number of simulations");
  sim->add_option("--horizon", a.horizon, "Steps per simulation");
  auto *bench = app.add_subcommand("bench", "Benchmarks T1, T2, T3");
  common(bench);
  bench->add_option("test", a.test, "T1 | T2 | T3")->required();
  bench->add_option("--levels", a.levels, "T2 refinement levels");
  bench->add_option("--repeats", a.repeats, "Timed syntheses per row (fastest kept)");
  bench->add_flag("--no-reorder-rows", a.no_reorder_rows, "Skip reordered representations");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e);
  }

  try {
    if (*abstract)
      return cmd_abstract(a);
    if (*synth)
      return cmd_synth(a);
    if (*refine)
      return cmd_refine(a);
    if (*sim)
      return cmd_simulate(a);
    return cmd_bench(a);
  } catch (const ConfigError &e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return 3;
  } catch (const UsageError &e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
