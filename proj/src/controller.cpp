#include "refsyn/controller.hpp"

#include "refsyn/error.hpp"

#include <algorithm>
#include <ostream>
#include <random>

namespace refsyn {

namespace {

bool all_inside(std::span<const StateId> succ, const Bitset &target) {
  return !succ.empty() &&
         std::all_of(succ.begin(), succ.end(), [&](StateId p) { return target.test(p); });
}

std::vector<ActionId> actions_into(const Fts &fts, StateId q, const Bitset &target) {
  std::vector<ActionId> out;
  for (ActionId u = 0; u < fts.action_count(); ++u)
    if (all_inside(fts.list().successors(q, u), target))
      out.push_back(u);
  return out;
}

} // namespace

Controller Controller::extract(const Fts &fts, const Spec &spec, const WinResult &result) {
  const auto &trace = result.trace;
  if (result.win.none())
    throw UsageError("controller extraction needs a nonempty winning set");
  if (trace.passes.size() != trace.outer.size() || trace.outer.empty())
    throw UsageError("controller extraction needs a full fixed-point trace");

  Controller c;
  c.spec_ = spec;
  c.bound_ = fts.state_bound();
  c.n_actions_ = fts.action_count();
  c.win_ = result.win;
  const std::size_t phases = result.goals.size();
  c.table_.assign(phases, std::vector<std::optional<ControlEntry>>(c.bound_));
  for (std::size_t i = 0; i < phases; ++i)
    c.serve_.push_back(result.persist & result.goals[i]);

  const Bitset empty(c.bound_);
  for (std::size_t j = 0; j < trace.passes.size(); ++j) {
    const Bitset &lower = j == 0 ? empty : trace.outer[j - 1];
    const Bitset &level_set = trace.outer[j];
    const Bitset lower_safe = lower & result.safe;
    const Bitset level_safe = level_set & result.safe;
    const auto &pass = trace.passes[j];
    for (std::size_t i = 0; i < phases; ++i) {
      const auto &iters = pass.inner[i];
      for (std::size_t k = 0; k < iters.size(); ++k) {
        const Bitset fresh = k == 0 ? iters[0] : iters[k] - iters[k - 1];
        const Bitset prev_safe = k == 0 ? Bitset(c.bound_) : iters[k - 1] & result.safe;
        fresh.for_each([&](StateId q) {
          auto &slot = c.table_[i][q];
          if (slot)
            return; // captured at a lower level already
          ControlEntry e;
          e.level = static_cast<std::uint32_t>(j);
          e.rank = static_cast<std::uint32_t>(k + 1);
          if (k == 0) {
            // into the lower level, or serve the goal and stay in this level
            e.actions = c.serve_[i].test(q) ? actions_into(fts, q, level_safe)
                                            : actions_into(fts, q, lower_safe);
          } else {
            e.actions = actions_into(fts, q, prev_safe);
          }
          if (e.actions.empty() || !result.safe.test(q))
            throw FixedPointError("controller extraction: state " + std::to_string(q) +
                                  " has no valid action at its rank");
          slot = std::move(e);
        });
      }
    }
  }
  result.win.for_each([&](StateId q) {
    for (std::size_t i = 0; i < phases; ++i)
      if (!c.table_[i][q])
        throw FixedPointError("controller extraction: winning state " +
                              std::to_string(q) + " unranked");
  });
  return c;
}

const ControlEntry *Controller::entry(StateId q, std::size_t phase) const {
  if (phase >= table_.size() || q >= bound_ || !table_[phase][q])
    return nullptr;
  return &*table_[phase][q];
}

std::optional<ActionId> Controller::choose(StateId q, std::size_t phase) const {
  const auto *e = entry(q, phase);
  if (!e)
    return std::nullopt;
  return e->actions.front();
}

std::size_t Controller::next_phase(StateId q, std::size_t phase) const {
  const auto *e = entry(q, phase);
  if (e && e->rank == 1 && serve_[phase].test(q))
    return (phase + 1) % table_.size();
  return phase;
}

void Controller::write(std::ostream &out) const {
  out << "controller " << bound_ << ' ' << n_actions_ << ' ' << phases() << '\n';
  out << "# state phase level rank : actions\n";
  for (StateId q = 0; q < bound_; ++q)
    for (std::size_t i = 0; i < phases(); ++i) {
      const auto *e = entry(q, i);
      if (!e)
        continue;
      out << q << ' ' << i << ' ' << e->level << ' ' << e->rank << " :";
      for (auto u : e->actions)
        out << ' ' << u;
      out << '\n';
    }
}

AbstractCheck check_abstract(const Fts &fts, const Controller &ctrl,
                             const WinResult &result) {
  AbstractCheck check;
  const std::size_t phases = ctrl.phases();
  const std::size_t n = fts.state_bound();
  auto id = [&](StateId q, std::size_t i) { return q * phases + i; };
  const std::size_t total = n * phases;

  // reachable controlled graph
  std::vector<std::vector<std::size_t>> succ(total);
  std::vector<char> seen(total, 0);
  std::vector<std::size_t> stack;
  result.win.for_each([&](StateId q) {
    seen[id(q, 0)] = 1;
    stack.push_back(id(q, 0));
  });
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    const auto q = static_cast<StateId>(v / phases);
    const std::size_t i = v % phases;
    ++check.reachable_pairs;
    const auto *e = ctrl.entry(q, i);
    if (!result.safe.test(q)) {
      check.ok = false;
      check.failure = "unsafe state " + std::to_string(q) + " reachable";
      return check;
    }
    if (!e) {
      check.ok = false;
      check.failure = "no control at state " + std::to_string(q) + " phase " +
                      std::to_string(i);
      return check;
    }
    const std::size_t next = ctrl.next_phase(q, i);
    for (ActionId u : e->actions)
      for (StateId p : fts.list().successors(q, u)) {
        const std::size_t w = id(p, next);
        succ[v].push_back(w);
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
      }
  }

  // is there a reachable cycle through vertices satisfying `keep`?
  auto has_cycle = [&](const std::function<bool(std::size_t)> &keep) {
    std::vector<int> color(total, 0); // 0 new, 1 on stack, 2 done
    for (std::size_t s = 0; s < total; ++s) {
      if (!seen[s] || !keep(s) || color[s])
        continue;
      std::vector<std::pair<std::size_t, std::size_t>> dfs{{s, 0}};
      color[s] = 1;
      while (!dfs.empty()) {
        auto &[v, k] = dfs.back();
        if (k < succ[v].size()) {
          const std::size_t w = succ[v][k++];
          if (!keep(w))
            continue;
          if (color[w] == 1)
            return true;
          if (color[w] == 0) {
            color[w] = 1;
            dfs.push_back({w, 0});
          }
        } else {
          color[v] = 2;
          dfs.pop_back();
        }
      }
    }
    return false;
  };
  // a cycle through a state outside B violates persistence: find a cycle
  // in the full graph that contains such a vertex via SCC-free search from
  // each offending vertex
  std::vector<char> outside(total, 0);
  for (std::size_t v = 0; v < total; ++v)
    outside[v] = seen[v] && !result.persist.test(static_cast<StateId>(v / phases));
  for (std::size_t v = 0; v < total; ++v) {
    if (!outside[v])
      continue;
    std::vector<char> vis(total, 0);
    std::vector<std::size_t> st(succ[v].begin(), succ[v].end());
    bool back = false;
    while (!st.empty() && !back) {
      const std::size_t w = st.back();
      st.pop_back();
      if (w == v) {
        back = true;
        break;
      }
      if (vis[w])
        continue;
      vis[w] = 1;
      for (auto x : succ[w])
        st.push_back(x);
    }
    if (back) {
      check.ok = false;
      check.failure = "cycle through state " + std::to_string(v / phases) + " outside B";
      return check;
    }
  }
  for (std::size_t g = 0; g < result.goals.size(); ++g) {
    const Bitset served = result.goals[g] & result.persist;
    if (has_cycle([&](std::size_t v) { return !served.test(static_cast<StateId>(v / phases)); })) {
      check.ok = false;
      check.failure = "a play can avoid goal " + std::to_string(g) + " forever";
      return check;
    }
  }
  return check;
}

ClosedLoopReport simulate(const Controller &ctrl, const Abstraction &abs,
                          std::span<const double> x0, const SimOptions &opts) {
  const auto &sys = abs.system();
  const auto &part = abs.partition();
  if (x0.size() != part.dim())
    throw UsageError("simulate: initial state has the wrong dimension");
  const auto start = part.locate(x0);
  if (!start || !ctrl.win().test(*start))
    throw UsageError("simulate: initial state is not in a winning cell");
  auto prop_box = [&](const std::string &name) -> const Box & {
    const auto it = sys.propositions.find(name);
    if (it == sys.propositions.end())
      throw UsageError("simulate: proposition '" + name + "' has no box");
    return it->second;
  };
  const Box &persist = prop_box(ctrl.spec().persist);
  const Box *safe = sys.propositions.count(ctrl.spec().safe)
                        ? &sys.propositions.at(ctrl.spec().safe)
                        : nullptr;
  std::vector<const Box *> goals;
  if (ctrl.spec().goals.empty())
    goals.push_back(&persist);
  for (const auto &g : ctrl.spec().goals)
    goals.push_back(&prop_box(g));

  ClosedLoopReport rep;
  rep.goal_visits.assign(goals.size(), 0);
  std::mt19937_64 rng(opts.seed);
  std::vector<double> x(x0.begin(), x0.end());
  std::vector<double> d(sys.disturbance.dim(), 0.0);
  std::size_t phase = 0;
  std::optional<std::size_t> confined;

  auto note_state = [&](std::size_t t) {
    if (persist.contains(x)) {
      if (!confined)
        confined = t;
    } else {
      confined.reset();
    }
    for (std::size_t i = 0; i < goals.size(); ++i)
      if (goals[i]->contains(x) && persist.contains(x))
        ++rep.goal_visits[i];
    if (safe && !safe->contains(x))
      ++rep.safety_violations;
  };

  if (opts.horizon == 0)
    return rep;
  note_state(0);
  for (std::size_t t = 0; t < opts.horizon; ++t) {
    const auto cell = part.locate(x);
    const auto action = cell ? ctrl.choose(*cell, phase) : std::nullopt;
    if (!action) {
      rep.halted = true;
      rep.halt_reason = "no control action for the current cell";
      break;
    }
    rep.steps.push_back({x, *cell, phase, *action});
    phase = ctrl.next_phase(*cell, phase);
    if (opts.disturbance == DisturbanceMode::Uniform)
      for (std::size_t j = 0; j < d.size(); ++j)
        d[j] = std::uniform_real_distribution<double>(sys.disturbance.lo[j],
                                                      sys.disturbance.hi[j])(rng);
    x = sys.modes[*action].apply(x, d);
    if (!part.domain().contains(x)) {
      ++rep.safety_violations;
      rep.halted = true;
      rep.halt_reason = "left the domain";
      confined.reset();
      break;
    }
    note_state(t + 1);
  }
  rep.final_state = x;
  rep.confined_from = confined;
  return rep;
}

void write_report(std::ostream &out, const ClosedLoopReport &report) {
  out << "step,cell,phase,action";
  const std::size_t dim = report.final_state.size();
  for (std::size_t i = 0; i < dim; ++i)
    out << ",x" << i;
  out << '\n';
  for (std::size_t t = 0; t < report.steps.size(); ++t) {
    const auto &s = report.steps[t];
    out << t << ',' << s.cell << ',' << s.phase << ',' << s.action;
    for (double v : s.x)
      out << ',' << v;
    out << '\n';
  }
  out << "# final";
  for (double v : report.final_state)
    out << ' ' << v;
  out << "\n# safety_violations " << report.safety_violations << "\n# confined_from "
      << (report.confined_from ? std::to_string(*report.confined_from) : "never")
      << "\n# goal_visits";
  for (auto g : report.goal_visits)
    out << ' ' << g;
  out << '\n';
  if (report.halted)
    out << "# halted " << report.halt_reason << '\n';
}

} // namespace refsyn
