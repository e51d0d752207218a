#include "refsyn/bench.hpp"

#include "refsyn/error.hpp"

#include <algorithm>
#include <limits>
#include <ostream>
#include <tuple>

namespace refsyn {

std::string Representation::name() const {
  if (backend == Backend::List)
    return "list";
  return "bdd-" + std::string(to_string(encoding));
}

std::string Representation::encoding_name() const {
  return backend == Backend::List ? "none" : std::string(to_string(encoding));
}

std::vector<Representation> default_representations(bool with_reorder, ReorderPolicy method) {
  std::vector<Representation> out{{Backend::List, EncodingKind::Log, ReorderPolicy::None}};
  for (auto enc : {EncodingKind::Log, EncodingKind::Split}) {
    out.push_back({Backend::Symbolic, enc, ReorderPolicy::None});
    if (with_reorder)
      out.push_back({Backend::Symbolic, enc, method});
  }
  return out;
}

void write_bench(std::ostream &out, std::vector<BenchRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const BenchRow &a, const BenchRow &b) {
    return std::tie(a.layout, a.representation, a.reorder, a.n_states) <
           std::tie(b.layout, b.representation, b.reorder, b.n_states);
  });
  out << kBenchHeader << '\n';
  for (const auto &r : rows)
    out << r.layout << ',' << r.representation << ',' << r.encoding << ',' << r.reorder
        << ',' << r.n_states << ',' << r.n_transitions << ',' << r.synth_time_ms << ','
        << r.bdd_nodes << ',' << r.nodes_per_var << '\n';
}

namespace {

RefineOptions list_refinement(const ProblemConfig &cfg, std::size_t refinements,
                              std::size_t splits_per_iteration) {
  RefineOptions o;
  o.backend = Backend::List;
  o.win.scope = cfg.scope;
  o.splits_per_iteration =
      splits_per_iteration ? splits_per_iteration : cfg.refine.splits_per_iteration;
  o.min_width = cfg.refine.min_width;
  o.max_iterations = std::numeric_limits<std::size_t>::max();
  o.max_splits = refinements;
  return o;
}

BenchRow measure(const ProblemConfig &cfg, Abstraction &abs, const Representation &rep,
                 std::size_t repeats) {
  Fts &fts = abs.fts();
  if (rep.backend == Backend::Symbolic && rep.reorder != ReorderPolicy::None)
    fts.symbolic().manager().reorder(rep.reorder == ReorderPolicy::Sift
                                         ? bdd::ReorderMethod::Sift
                                         : bdd::ReorderMethod::Anneal);
  WinOptions wo;
  wo.scope = cfg.scope;
  wo.detail = TraceDetail::Summary;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < std::max<std::size_t>(1, repeats); ++i)
    best = std::min(best, win(fts, cfg.spec, rep.backend, wo).synth_millis);
  BenchRow row;
  row.layout = cfg.name;
  row.representation = rep.name();
  row.encoding = rep.encoding_name();
  row.reorder = std::string(to_string(rep.reorder));
  row.n_states = fts.state_count();
  row.n_transitions = fts.transition_count();
  row.synth_time_ms = best;
  if (rep.backend == Backend::Symbolic)
    std::tie(row.bdd_nodes, row.nodes_per_var) = bdd_footprint(fts);
  return row;
}

Abstraction fresh(const ProblemConfig &cfg, const Representation &rep) {
  Abstraction abs(cfg.system);
  if (rep.backend == Backend::Symbolic)
    abs.fts().attach_symbolic(rep.encoding, cfg.manager);
  return abs;
}

} // namespace

std::vector<StateId> record_splits(const ProblemConfig &cfg, std::size_t refinements,
                                   std::size_t splits_per_iteration) {
  Abstraction abs(cfg.system);
  if (refinements == 0)
    return {};
  return refine_loop(abs, cfg.spec, list_refinement(cfg, refinements, splits_per_iteration))
      .split_log;
}

BenchRow time_representation(const ProblemConfig &cfg, std::span<const StateId> splits,
                             const Representation &rep, std::size_t repeats) {
  Abstraction abs = fresh(cfg, rep);
  replay_splits(abs, splits);
  return measure(cfg, abs, rep, repeats);
}

std::vector<BenchRow> bench_t1(const std::vector<ProblemConfig> &layouts,
                               const BenchOptions &opts) {
  std::vector<BenchRow> rows;
  for (const auto &cfg : layouts) {
    const auto splits = record_splits(cfg, opts.refinements, opts.splits_per_iteration);
    for (const auto &rep : opts.representations)
      rows.push_back(time_representation(cfg, splits, rep, opts.repeats));
  }
  return rows;
}

std::vector<BenchRow> bench_t2(const ProblemConfig &layout, std::vector<std::size_t> levels,
                               const BenchOptions &opts) {
  if (levels.empty())
    throw UsageError("bench T2 needs at least one refinement level");
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  const auto splits = record_splits(layout, levels.back(), opts.splits_per_iteration);
  std::vector<BenchRow> rows;
  for (const auto &rep : opts.representations) {
    Abstraction abs = fresh(layout, rep);
    std::size_t done = 0;
    for (std::size_t level : levels) {
      const std::size_t upto = std::min(level, splits.size());
      replay_splits(abs, std::span<const StateId>(splits).subspan(done, upto - done));
      done = upto;
      rows.push_back(measure(layout, abs, rep, opts.repeats));
    }
  }
  return rows;
}

std::vector<T3Result> bench_t3(const ProblemConfig &layout, std::chrono::milliseconds budget,
                               const BenchOptions &opts) {
  if (budget.count() <= 0)
    throw UsageError("bench T3 needs a positive time budget");
  std::vector<T3Result> out;
  for (const auto &rep : opts.representations) {
    Abstraction abs(layout.system);
    RefineOptions ro;
    ro.backend = rep.backend;
    ro.encoding = rep.encoding;
    ro.reorder = rep.reorder;
    ro.manager = layout.manager;
    ro.win.scope = layout.scope;
    ro.splits_per_iteration = opts.splits_per_iteration ? opts.splits_per_iteration
                                                        : layout.refine.splits_per_iteration;
    ro.min_width = layout.refine.min_width;
    ro.max_iterations = std::numeric_limits<std::size_t>::max();
    ro.wall_limit = budget;
    T3Result r{rep, refine_loop(abs, layout.spec, ro), 0};
    // every row closes an iteration, including the one that hit the budget
    r.completed_iterations = r.report.rows.size();
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<T3Bucket> t3_buckets(const std::vector<T3Result> &results, std::size_t width) {
  std::vector<T3Bucket> out;
  for (const auto &r : results) {
    const auto &rows = r.report.rows;
    const std::string label =
        r.rep.name() + (r.rep.reorder == ReorderPolicy::None
                            ? ""
                            : "+" + std::string(to_string(r.rep.reorder)));
    for (std::size_t b = 0; b * width < rows.size(); ++b) {
      T3Bucket k;
      k.representation = label;
      k.bucket = b;
      const std::size_t end = std::min(rows.size(), (b + 1) * width);
      k.iterations = end - b * width;
      for (std::size_t i = b * width; i < end; ++i)
        k.mean_ms += rows[i].iteration_ms;
      k.mean_ms /= static_cast<double>(k.iterations);
      for (std::size_t i = b * width; i < end; ++i)
        k.variance_ms2 += (rows[i].iteration_ms - k.mean_ms) * (rows[i].iteration_ms - k.mean_ms);
      k.variance_ms2 /= static_cast<double>(k.iterations);
      out.push_back(k);
    }
  }
  return out;
}

void write_t3_summary(std::ostream &out, const std::vector<T3Result> &results) {
  out << kT3SummaryHeader << '\n';
  for (const auto &r : results) {
    const auto &last = r.report.rows.back();
    out << r.rep.name()
        << (r.rep.reorder == ReorderPolicy::None ? "" : "+" + std::string(to_string(r.rep.reorder)))
        << ',' << r.completed_iterations << ',' << r.report.rows.size() << ','
        << last.n_states << ',' << last.bdd_nodes << ',' << last.nodes_per_var << '\n';
  }
}

void write_t3_buckets(std::ostream &out, const std::vector<T3Bucket> &buckets) {
  out << kT3BucketHeader << '\n';
  for (const auto &b : buckets)
    out << b.representation << ',' << b.bucket << ',' << b.iterations << ',' << b.mean_ms
        << ',' << b.variance_ms2 << '\n';
}

} // namespace refsyn
