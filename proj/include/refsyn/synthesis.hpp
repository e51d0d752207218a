#pragma once

/// @file synthesis.hpp
/// @brief Least/greatest fixed points over state sets and the winning set of
/// the specification  []A  /\  <>[]B  /\  (/\_i []<>G_i).
///
/// The winning set is
///   mu V2. nu V1. /\_i mu V0. pre(V2) | (B & G_i & pre(V1)) | (B & pre(V0))
/// where pre is the (exists, forall) controllable predecessor restricted to
/// the safe set A: pre_A(X) = A & pre(X & A). Restricting the argument to A
/// disables every action that may leave A, which is what []A requires.
///
/// Iterate lists never contain the starting set (empty set for mu, all live
/// states for nu); their length is the number of map applications, and the
/// last two applications give equal sets.

#include "refsyn/bdd.hpp"
#include "refsyn/bitset.hpp"
#include "refsyn/fts.hpp"

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace refsyn {

struct Spec {
  std::string safe = "A";
  std::string persist = "B";
  std::vector<std::string> goals;
};

enum class Backend { List, Symbolic };
std::string_view to_string(Backend b);
Backend backend_from_string(std::string_view name);

/// Raised when a fixed-point iteration breaks monotonicity or its step
/// bound. Indicates a non-monotone map or an engine bug.
class FixedPointError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

template <class Set> struct FixedPoint {
  Set value;
  std::vector<Set> iterates;
  std::size_t steps() const { return iterates.size(); }
};

/// Greatest fixed point from `top`. `subset(a, b)` tests a <= b and is used
/// for the in-process monotonicity check; `max_steps` bounds applications.
template <class Set>
FixedPoint<Set> gfp(const Set &top, const std::function<Set(const Set &)> &map,
                    const std::function<bool(const Set &, const Set &)> &subset,
                    std::size_t max_steps) {
  FixedPoint<Set> fp;
  Set cur = top;
  for (;;) {
    Set next = map(cur);
    if (!subset(next, cur))
      throw FixedPointError("gfp: iterate grew");
    fp.iterates.push_back(next);
    if (next == cur)
      break;
    if (fp.iterates.size() >= max_steps)
      throw FixedPointError("gfp: no convergence within the step bound");
    cur = std::move(next);
  }
  fp.value = fp.iterates.back();
  return fp;
}

template <class Set>
FixedPoint<Set> lfp(const Set &bottom,
                    const std::function<Set(const Set &)> &map,
                    const std::function<bool(const Set &, const Set &)> &subset,
                    std::size_t max_steps) {
  FixedPoint<Set> fp;
  Set cur = bottom;
  for (;;) {
    Set next = map(cur);
    if (!subset(cur, next))
      throw FixedPointError("lfp: iterate shrank");
    fp.iterates.push_back(next);
    if (next == cur)
      break;
    if (fp.iterates.size() >= max_steps)
      throw FixedPointError("lfp: no convergence within the step bound");
    cur = std::move(next);
  }
  fp.value = fp.iterates.back();
  return fp;
}

/// Recorded iterates of one winning-set evaluation.
template <class Set> struct FixedPointTrace {
  struct NuPass {
    /// V1 iterates of this pass.
    std::vector<Set> iterates;
    /// Inner mu iterates per goal, from the last V1 iteration of the pass
    /// (the one evaluated at the fixed point).
    std::vector<std::vector<Set>> inner;
    std::size_t inner_steps = 0;
  };
  /// Outer mu iterates V2^1, V2^2, ...; V2^0 is empty.
  std::vector<Set> outer;
  /// passes[j] computes outer[j] from V2^j (empty for j = 0).
  std::vector<NuPass> passes;
  /// Goals after substituting the dummy goal; their labels as sets.
  std::vector<std::string> goal_names;

  std::size_t total_steps() const {
    std::size_t n = outer.size();
    for (const auto &p : passes)
      n += p.iterates.size() + p.inner_steps;
    return n;
  }
};

using ExplicitTrace = FixedPointTrace<Bitset>;

/// How much of a symbolic trace win() converts to explicit sets. `Summary`
/// keeps what refinement planning reads: the final outer value, the first
/// and last iterate of the final nu pass and the last inner iterates of
/// that pass. The list backend always returns the full trace.
enum class TraceDetail { Full, Summary };

struct WinOptions {
  Quant quant = kExistsForall;
  ActionScope scope = ActionScope::Enabled;
  TraceDetail detail = TraceDetail::Full;
};

struct WinResult {
  Backend backend = Backend::List;
  Bitset win;
  ExplicitTrace trace;
  /// Explicit copies of the proposition sets used (after the dummy goal).
  Bitset safe, persist;
  std::vector<Bitset> goals;
  /// Wall-clock time of the fixed-point evaluation only.
  double synth_millis = 0.0;
  /// Map applications over all levels.
  std::size_t steps = 0;
};

/// Evaluates the winning set with the chosen backend and converts the trace
/// to explicit sets afterwards (outside the timed region). The symbolic
/// backend requires an attached symbolic view.
WinResult win(Fts &fts, const Spec &spec, Backend backend,
              const WinOptions &opts = {});

/// Symbolic evaluation keeping native BDD iterates.
struct SymbolicWin {
  bdd::Bdd win;
  FixedPointTrace<bdd::Bdd> trace;
  double synth_millis = 0.0;
};
SymbolicWin win_symbolic(Fts &fts, const Spec &spec,
                         const WinOptions &opts = {});

/// Explicit evaluation.
struct ListWin {
  Bitset win;
  ExplicitTrace trace;
  double synth_millis = 0.0;
};
ListWin win_list(const Fts &fts, const Spec &spec, const WinOptions &opts = {});

/// Step bound used by the in-process convergence check: a monotone chain
/// of subsets of the live states changes at most |Q| times, plus the final
/// confirming application.
inline std::size_t step_bound(const Fts &fts) { return fts.state_count() + 1; }

} // namespace refsyn
