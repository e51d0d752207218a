#pragma once

// Trace-guided refinement and the synthesis/refinement loop.

#include "refsyn/abstraction.hpp"
#include "refsyn/synthesis.hpp"

#include <chrono>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace refsyn {

enum class PlanSource { Nu, OuterMu, InnerMu };
std::string_view to_string(PlanSource s);

struct PlanEntry {
  StateId state;
  PlanSource source;
};

/// Candidate cells (sorted by id, no duplicates, never the sink).
struct RefinePlan {
  std::vector<PlanEntry> entries;
  bool empty() const { return entries.empty(); }
  std::vector<StateId> states() const;
};

/// Reads the final pass of a trace: the first nu iterate minus the winning
/// set, plus the existential predecessors of each mu fixed point (outer and
/// inner) minus that fixed point.
RefinePlan plan_from_trace(const Fts &fts, const WinResult &result,
                           std::optional<StateId> sink = std::nullopt);

/// Keeps at most `max_cells` entries whose cells are wider than
/// `min_width` along their longest axis, largest volume first (ties: lower
/// id first).
std::vector<StateId> throttle_plan(const RefinePlan &plan, const Abstraction &abs,
                                   std::size_t max_cells, double min_width);

enum class ReorderPolicy { None, Sift, Anneal };
std::string_view to_string(ReorderPolicy p);
ReorderPolicy reorder_from_string(std::string_view name);

struct RefineOptions {
  Backend backend = Backend::Symbolic;
  EncodingKind encoding = EncodingKind::Log;
  ReorderPolicy reorder = ReorderPolicy::None;
  /// Reorder before every n-th synthesis (0: only before the first).
  std::size_t reorder_interval = 50;
  bdd::ManagerConfig manager;
  WinOptions win;
  std::size_t splits_per_iteration = 1;
  double min_width = 0.0;
  std::size_t max_iterations = 100;
  /// Stop once this many cells have been split (0: no limit).
  std::size_t max_splits = 0;
  /// Zero means no wall-clock limit.
  std::chrono::milliseconds wall_limit{0};
  /// Stop once every cell inside this box is winning.
  std::optional<Box> target;
};

struct IterationRow {
  std::size_t iter = 0;
  std::size_t n_states = 0;
  std::size_t n_transitions = 0;
  double synth_time_ms = 0.0;
  double win_volume = 0.0;
  std::size_t bdd_nodes = 0;
  double nodes_per_var = 0.0;
  std::string encoding;
  std::string backend;
  /// Whole iteration: synthesis, planning and splitting.
  double iteration_ms = 0.0;
};

struct RunReport {
  std::vector<IterationRow> rows;
  std::string reason;
  std::size_t splits = 0;
  /// Split cells in order; replaying them reproduces the partition.
  std::vector<StateId> split_log;
  /// Iterations whose winning volume was below the previous one.
  std::size_t volume_decreases = 0;
  WinResult last;
  double total_millis = 0.0;
};

/// Measures the symbolic representation: live nodes after a sweep and the
/// per-variable average.
std::pair<std::size_t, double> bdd_footprint(Fts &fts);

/// Applies recorded splits in order.
void replay_splits(Abstraction &abs, std::span<const StateId> splits);

RunReport refine_loop(Abstraction &abs, const Spec &spec, const RefineOptions &opts);

inline constexpr const char *kRunReportHeader =
    "iter,n_states,n_transitions,synth_time_ms,win_volume,bdd_nodes,nodes_per_var,"
    "encoding,backend";
void write_run_report(std::ostream &out, const RunReport &report);

} // namespace refsyn
