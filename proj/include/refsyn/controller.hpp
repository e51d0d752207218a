#pragma once

// Finite-memory strategies read off a winning-set trace, their abstract
// verification, and closed-loop simulation on the concrete dynamics.

#include "refsyn/abstraction.hpp"
#include "refsyn/synthesis.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace refsyn {

/// What the controller does in one (state, phase) pair. `level` is the
/// outer iteration that first captures the state for this phase and `rank`
/// the inner iteration within it; together they decrease lexicographically
/// along controlled steps until the phase goal is served.
struct ControlEntry {
  std::uint32_t level = 0;
  std::uint32_t rank = 0;
  std::vector<ActionId> actions; // ascending
};

class Controller {
public:
  /// Needs the full trace of an (exists, forall) evaluation.
  static Controller extract(const Fts &fts, const Spec &spec, const WinResult &result);

  std::size_t phases() const { return table_.size(); }
  std::size_t state_bound() const { return bound_; }
  std::size_t action_count() const { return n_actions_; }
  const Spec &spec() const { return spec_; }
  const Bitset &win() const { return win_; }

  const ControlEntry *entry(StateId q, std::size_t phase) const;
  /// Smallest allowed action; nullopt when (q, phase) has no entry.
  std::optional<ActionId> choose(StateId q, std::size_t phase) const;
  /// Memory after acting in q: the phase advances once a rank-1 state of
  /// the current goal is served.
  std::size_t next_phase(StateId q, std::size_t phase) const;

  /// Text export: one line "q phase level rank : actions" per entry,
  /// ordered by state, then phase.
  void write(std::ostream &out) const;

private:
  Spec spec_;
  std::size_t bound_ = 0, n_actions_ = 0;
  Bitset win_;
  std::vector<Bitset> serve_; // per phase: B and goal
  std::vector<std::vector<std::optional<ControlEntry>>> table_; // [phase][q]
};

struct AbstractCheck {
  bool ok = true;
  std::string failure;
  std::size_t reachable_pairs = 0;
};

/// Explores every controller-compatible abstract play from Win in phase 0
/// and checks safety, eventual confinement to B and recurrence of every
/// goal by cycle detection on the reachable (state, phase) graph.
AbstractCheck check_abstract(const Fts &fts, const Controller &ctrl,
                             const WinResult &result);

enum class DisturbanceMode { Uniform, Zero };

struct SimOptions {
  std::size_t horizon = 100;
  std::uint64_t seed = 1;
  DisturbanceMode disturbance = DisturbanceMode::Uniform;
};

struct SimStep {
  std::vector<double> x;
  StateId cell = 0;
  std::size_t phase = 0;
  ActionId action = 0;
};

struct ClosedLoopReport {
  std::vector<SimStep> steps;     // one per executed step
  std::vector<double> final_state;
  std::vector<std::size_t> goal_visits;
  std::size_t safety_violations = 0;
  /// First step index from which every later state (including the final
  /// one) lies in the persistence box; nullopt if the run ends outside it.
  std::optional<std::size_t> confined_from;
  bool halted = false;
  std::string halt_reason;
};

ClosedLoopReport simulate(const Controller &ctrl, const Abstraction &abs,
                          std::span<const double> x0, const SimOptions &opts);

void write_report(std::ostream &out, const ClosedLoopReport &report);

} // namespace refsyn
