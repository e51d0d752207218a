#include "refsyn/refine.hpp"

#include "refsyn/error.hpp"

#include <algorithm>
#include <ostream>

namespace refsyn {

std::string_view to_string(PlanSource s) {
  switch (s) {
  case PlanSource::Nu:
    return "nu";
  case PlanSource::OuterMu:
    return "outer-mu";
  case PlanSource::InnerMu:
    return "inner-mu";
  }
  return "?";
}

std::string_view to_string(ReorderPolicy p) {
  switch (p) {
  case ReorderPolicy::None:
    return "none";
  case ReorderPolicy::Sift:
    return "sift";
  case ReorderPolicy::Anneal:
    return "anneal";
  }
  return "?";
}

ReorderPolicy reorder_from_string(std::string_view name) {
  if (name == "none" || name == "off")
    return ReorderPolicy::None;
  if (name == "sift")
    return ReorderPolicy::Sift;
  if (name == "anneal")
    return ReorderPolicy::Anneal;
  throw UsageError("unknown reorder method '" + std::string(name) + "'");
}

std::vector<StateId> RefinePlan::states() const {
  std::vector<StateId> out;
  out.reserve(entries.size());
  for (const auto &e : entries)
    out.push_back(e.state);
  return out;
}

RefinePlan plan_from_trace(const Fts &fts, const WinResult &result,
                           std::optional<StateId> sink) {
  const std::size_t n = fts.state_bound();
  std::vector<int> source(n, -1);
  auto add = [&](const Bitset &cells, PlanSource s) {
    cells.for_each([&](StateId q) {
      if (source[q] < 0)
        source[q] = static_cast<int>(s);
    });
  };
  auto frontier = [&](const Bitset &fixed) {
    return fts.list_pre(fixed, kExistsExists) - fixed;
  };

  add(frontier(result.win), PlanSource::OuterMu);
  if (!result.trace.passes.empty()) {
    const auto &last = result.trace.passes.back();
    if (!last.iterates.empty())
      add(last.iterates.front() - result.win, PlanSource::Nu);
    for (const auto &goal_iters : last.inner)
      if (!goal_iters.empty())
        add(frontier(goal_iters.back()), PlanSource::InnerMu);
  }

  RefinePlan plan;
  for (StateId q = 0; q < n; ++q) {
    if (source[q] < 0 || !fts.is_live(q) || (sink && q == *sink))
      continue;
    plan.entries.push_back({q, static_cast<PlanSource>(source[q])});
  }
  return plan;
}

std::vector<StateId> throttle_plan(const RefinePlan &plan, const Abstraction &abs,
                                   std::size_t max_cells, double min_width) {
  const auto &part = abs.partition();
  std::vector<std::pair<double, StateId>> ranked;
  for (const auto &e : plan.entries) {
    if (!part.is_cell(e.state))
      continue;
    const Box &b = part.cell(e.state);
    if (b.width(b.longest_axis()) <= min_width)
      continue;
    ranked.emplace_back(b.volume(), e.state);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto &a, const auto &b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  std::vector<StateId> out;
  for (std::size_t i = 0; i < ranked.size() && i < max_cells; ++i)
    out.push_back(ranked[i].second);
  return out;
}

std::pair<std::size_t, double> bdd_footprint(Fts &fts) {
  if (!fts.has_symbolic())
    return {0, 0.0};
  auto &m = fts.symbolic().manager();
  const std::size_t nodes = m.total_nodes();
  const std::size_t vars = m.var_count();
  return {nodes, vars ? static_cast<double>(nodes) / static_cast<double>(vars) : 0.0};
}

namespace {

bool target_covered(const Abstraction &abs, const Box &target, const Bitset &win) {
  const auto &part = abs.partition();
  for (StateId q : part.cells())
    if (part.cell(q).intersects(target) && !win.test(q)) {
      // a cell that only touches the target along a face does not count
      const Box &c = part.cell(q);
      bool interior = true;
      for (std::size_t d = 0; d < c.dim(); ++d)
        interior = interior && c.lo[d] < target.hi[d] && target.lo[d] < c.hi[d];
      if (interior)
        return false;
    }
  return true;
}

void maybe_reorder(Fts &fts, const RefineOptions &opts, std::size_t iter) {
  if (opts.reorder == ReorderPolicy::None || !fts.has_symbolic())
    return;
  const bool due = opts.reorder_interval == 0 ? iter == 0
                                              : iter % opts.reorder_interval == 0;
  if (!due)
    return;
  fts.symbolic().manager().reorder(opts.reorder == ReorderPolicy::Sift
                                       ? bdd::ReorderMethod::Sift
                                       : bdd::ReorderMethod::Anneal);
}

} // namespace

RunReport refine_loop(Abstraction &abs, const Spec &spec, const RefineOptions &opts) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  Fts &fts = abs.fts();
  if (opts.backend == Backend::Symbolic) {
    if (!fts.has_symbolic() || fts.symbolic().encoding().kind() != opts.encoding)
      fts.attach_symbolic(opts.encoding, opts.manager);
  }
  WinOptions wopts = opts.win;
  if (opts.backend == Backend::Symbolic)
    wopts.detail = TraceDetail::Summary;

  RunReport report;
  double last_volume = -1.0;
  for (std::size_t iter = 0;; ++iter) {
    const auto iter_start = clock::now();
    maybe_reorder(fts, opts, iter);
    WinResult result = win(fts, spec, opts.backend, wopts);
    IterationRow row;
    row.iter = iter;
    row.n_states = fts.state_count();
    row.n_transitions = fts.transition_count();
    row.synth_time_ms = result.synth_millis;
    row.win_volume = abs.volume(result.win);
    if (opts.backend == Backend::Symbolic)
      std::tie(row.bdd_nodes, row.nodes_per_var) = bdd_footprint(fts);
    row.encoding = opts.backend == Backend::Symbolic
                       ? std::string(to_string(opts.encoding))
                       : std::string("none");
    row.backend = std::string(to_string(opts.backend));
    if (last_volume >= 0.0 && row.win_volume < last_volume)
      ++report.volume_decreases;
    last_volume = row.win_volume;
    report.rows.push_back(std::move(row));
    report.last = std::move(result);
    auto close_row = [&] {
      report.rows.back().iteration_ms =
          std::chrono::duration<double, std::milli>(clock::now() - iter_start).count();
    };

    if (opts.target && target_covered(abs, *opts.target, report.last.win)) {
      report.reason = "target covered";
      close_row();
      break;
    }
    if (iter >= opts.max_iterations) {
      report.reason = "iteration budget";
      close_row();
      break;
    }
    if (opts.max_splits > 0 && report.splits >= opts.max_splits) {
      report.reason = "split budget";
      close_row();
      break;
    }
    if (opts.wall_limit.count() > 0 && clock::now() - start >= opts.wall_limit) {
      report.reason = "time budget";
      close_row();
      break;
    }
    const auto plan = plan_from_trace(fts, report.last, abs.sink());
    std::size_t room = opts.splits_per_iteration;
    if (opts.max_splits > 0)
      room = std::min(room, opts.max_splits - report.splits);
    const auto cells = throttle_plan(plan, abs, room, opts.min_width);
    if (cells.empty()) {
      report.reason = "fixed point stable";
      close_row();
      break;
    }
    for (StateId q : cells) {
      abs.split(q);
      report.split_log.push_back(q);
    }
    report.splits += cells.size();
    close_row();
  }
  report.total_millis =
      std::chrono::duration<double, std::milli>(clock::now() - start).count();
  return report;
}

void replay_splits(Abstraction &abs, std::span<const StateId> splits) {
  for (StateId q : splits)
    abs.split(q);
}

void write_run_report(std::ostream &out, const RunReport &report) {
  out << kRunReportHeader << '\n';
  for (const auto &r : report.rows)
    out << r.iter << ',' << r.n_states << ',' << r.n_transitions << ','
        << r.synth_time_ms << ',' << r.win_volume << ',' << r.bdd_nodes << ','
        << r.nodes_per_var << ',' << r.encoding << ',' << r.backend << '\n';
}

} // namespace refsyn
