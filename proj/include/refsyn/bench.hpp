#pragma once

// Benchmark harness: cross-layout timing (T1), refinement-level sweep (T2)
// and wall-clock-budgeted refinement runs (T3).

#include "refsyn/config.hpp"
#include "refsyn/refine.hpp"

#include <chrono>
#include <iosfwd>
#include <string>
#include <vector>

namespace refsyn {

/// One way of storing and evaluating the transition system.
struct Representation {
  Backend backend = Backend::List;
  EncodingKind encoding = EncodingKind::Log; // symbolic only
  ReorderPolicy reorder = ReorderPolicy::None;

  std::string name() const; // "list", "bdd-log", "bdd-split"
  std::string encoding_name() const;
};

/// list, bdd-log, bdd-split; the BDD ones with and without reordering
/// when `with_reorder` is set.
std::vector<Representation> default_representations(bool with_reorder,
                                                    ReorderPolicy method = ReorderPolicy::Sift);

struct BenchRow {
  std::string layout;
  std::string representation;
  std::string encoding;
  std::string reorder;
  std::size_t n_states = 0;
  std::size_t n_transitions = 0;
  double synth_time_ms = 0.0;
  std::size_t bdd_nodes = 0;
  double nodes_per_var = 0.0;
};

inline constexpr const char *kBenchHeader =
    "layout,representation,encoding,reorder,n_states,n_transitions,synth_time_ms,"
    "bdd_nodes,nodes_per_var";
/// Rows sorted by (layout, representation, reorder, n_states).
void write_bench(std::ostream &out, std::vector<BenchRow> rows);

struct BenchOptions {
  std::size_t refinements = 2000;
  /// Overrides the config's splits per iteration when nonzero.
  std::size_t splits_per_iteration = 0;
  /// Timed syntheses per row; the fastest is reported.
  std::size_t repeats = 3;
  std::vector<Representation> representations = default_representations(true);
};

/// Refines with the list backend until `refinements` cells were split (or
/// the plan runs dry) and returns the split sequence.
std::vector<StateId> record_splits(const ProblemConfig &cfg, std::size_t refinements,
                                   std::size_t splits_per_iteration);

/// Builds the abstraction for `splits` with the representation's encoding
/// attached from the start, then times the final synthesis.
BenchRow time_representation(const ProblemConfig &cfg, std::span<const StateId> splits,
                             const Representation &rep, std::size_t repeats);

std::vector<BenchRow> bench_t1(const std::vector<ProblemConfig> &layouts,
                               const BenchOptions &opts);

std::vector<BenchRow> bench_t2(const ProblemConfig &layout, std::vector<std::size_t> levels,
                               const BenchOptions &opts);

struct T3Result {
  Representation rep;
  RunReport report;
  std::size_t completed_iterations = 0; // iterations that ran to their stop-or-split decision
};

struct T3Bucket {
  std::string representation;
  std::size_t bucket = 0;
  std::size_t iterations = 0;
  double mean_ms = 0.0;
  double variance_ms2 = 0.0;
};

std::vector<T3Result> bench_t3(const ProblemConfig &layout, std::chrono::milliseconds budget,
                               const BenchOptions &opts);
std::vector<T3Bucket> t3_buckets(const std::vector<T3Result> &results, std::size_t width = 50);

inline constexpr const char *kT3SummaryHeader =
    "representation,completed_iterations,synthesis_rows,final_n_states,final_bdd_nodes,"
    "final_nodes_per_var";
void write_t3_summary(std::ostream &out, const std::vector<T3Result> &results);
inline constexpr const char *kT3BucketHeader =
    "representation,bucket,iterations,mean_iteration_ms,variance_iteration_ms2";
void write_t3_buckets(std::ostream &out, const std::vector<T3Bucket> &buckets);

} // namespace refsyn
