#include "refsyn/synthesis.hpp"

#include "refsyn/error.hpp"

#include <chrono>

namespace refsyn {

std::string_view to_string(Backend b) {
  return b == Backend::List ? "list" : "bdd";
}

Backend backend_from_string(std::string_view name) {
  if (name == "list")
    return Backend::List;
  if (name == "bdd" || name == "symbolic")
    return Backend::Symbolic;
  throw UsageError("unknown backend '" + std::string(name) + "'");
}

namespace {

struct ListOps {
  using Set = Bitset;
  const Fts &fts;
  WinOptions opts;

  Set all() const { return fts.live_states(); }
  Set empty() const { return Bitset(fts.state_bound()); }
  Set label(const std::string &p) const { return fts.label(p) & all(); }
  Set pre(const Set &x) const { return fts.list_pre(x, opts.quant, opts.scope); }
  static bool subset(const Set &a, const Set &b) { return a.subset_of(b); }
};

struct SymOps {
  using Set = bdd::Bdd;
  const Fts &fts;
  SymbolicRep &sym;
  WinOptions opts;

  Set all() const { return sym.states(); }
  Set empty() const { return sym.manager().constant(false); }
  Set label(const std::string &p) const { return sym.set(fts.label(p) & fts.live_states()); }
  Set pre(const Set &x) const { return sym.pre(x, opts.quant, opts.scope); }
  static bool subset(const Set &a, const Set &b) { return (a & ~b).is_false(); }
};

template <class Ops> struct Evaluation {
  using Set = typename Ops::Set;
  Set win;
  FixedPointTrace<Set> trace;
  double millis = 0.0;
};

template <class Ops>
Evaluation<Ops> evaluate(Ops &ops, const Fts &fts, const Spec &spec) {
  using Set = typename Ops::Set;
  Evaluation<Ops> ev;

  const Set safe = ops.label(spec.safe);
  const Set persist = ops.label(spec.persist);
  std::vector<Set> goals;
  if (spec.goals.empty()) {
    goals.push_back(persist);
    ev.trace.goal_names.push_back(spec.persist);
  } else {
    for (const auto &g : spec.goals) {
      goals.push_back(ops.label(g));
      ev.trace.goal_names.push_back(g);
    }
  }

  const std::size_t bound = step_bound(fts);
  const std::function<bool(const Set &, const Set &)> subset = Ops::subset;
  auto pre_safe = [&](const Set &x) { return safe & ops.pre(x & safe); };

  const auto start = std::chrono::steady_clock::now();
  auto outer = lfp<Set>(
      ops.empty(),
      [&](const Set &v2) {
        typename FixedPointTrace<Set>::NuPass pass;
        const Set p2 = pre_safe(v2);
        auto nu = gfp<Set>(
            ops.all(),
            [&](const Set &v1) {
              const Set p1 = pre_safe(v1);
              std::vector<std::vector<Set>> inner(goals.size());
              Set acc;
              for (std::size_t i = 0; i < goals.size(); ++i) {
                const Set base = p2 | (persist & goals[i] & p1);
                auto mu = lfp<Set>(
                    ops.empty(),
                    [&](const Set &v0) { return base | (persist & pre_safe(v0)); },
                    subset, bound);
                pass.inner_steps += mu.steps();
                acc = i == 0 ? mu.value : (acc & mu.value);
                inner[i] = std::move(mu.iterates);
              }
              pass.inner = std::move(inner);
              return acc;
            },
            subset, bound);
        pass.iterates = std::move(nu.iterates);
        ev.trace.passes.push_back(std::move(pass));
        return nu.value;
      },
      subset, bound);
  ev.millis = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - start)
                  .count();
  ev.win = outer.value;
  ev.trace.outer = std::move(outer.iterates);
  if (!Ops::subset(ev.win, safe))
    throw FixedPointError("winning set leaves the safe set");
  return ev;
}

} // namespace

ListWin win_list(const Fts &fts, const Spec &spec, const WinOptions &opts) {
  ListOps ops{fts, opts};
  auto ev = evaluate(ops, fts, spec);
  return ListWin{std::move(ev.win), std::move(ev.trace), ev.millis};
}

SymbolicWin win_symbolic(Fts &fts, const Spec &spec, const WinOptions &opts) {
  SymOps ops{fts, fts.symbolic(), opts};
  auto ev = evaluate(ops, fts, spec);
  return SymbolicWin{std::move(ev.win), std::move(ev.trace), ev.millis};
}

WinResult win(Fts &fts, const Spec &spec, Backend backend,
              const WinOptions &opts) {
  WinResult r;
  r.backend = backend;
  if (backend == Backend::List) {
    auto lw = win_list(fts, spec, opts);
    r.win = std::move(lw.win);
    r.trace = std::move(lw.trace);
    r.synth_millis = lw.synth_millis;
    r.steps = r.trace.total_steps();
  } else {
    auto sw = win_symbolic(fts, spec, opts);
    auto &sym = fts.symbolic();
    const std::size_t n = fts.state_bound();
    auto conv = [&](const bdd::Bdd &b) { return sym.to_bitset(b, n); };
    r.win = conv(sw.win);
    r.synth_millis = sw.synth_millis;
    r.steps = sw.trace.total_steps();
    r.trace.goal_names = sw.trace.goal_names;
    const bool full = opts.detail == TraceDetail::Full;
    if (full) {
      for (const auto &s : sw.trace.outer)
        r.trace.outer.push_back(conv(s));
    } else {
      r.trace.outer.push_back(r.win);
    }
    for (std::size_t j = full ? 0 : sw.trace.passes.size() - 1;
         j < sw.trace.passes.size(); ++j) {
      const auto &p = sw.trace.passes[j];
      ExplicitTrace::NuPass ep;
      ep.inner_steps = p.inner_steps;
      for (std::size_t k = 0; k < p.iterates.size(); ++k)
        if (full || k == 0 || k + 1 == p.iterates.size())
          ep.iterates.push_back(conv(p.iterates[k]));
      for (const auto &goal_iters : p.inner) {
        ep.inner.emplace_back();
        for (std::size_t k = full ? 0 : goal_iters.size() - 1;
             k < goal_iters.size(); ++k)
          ep.inner.back().push_back(conv(goal_iters[k]));
      }
      r.trace.passes.push_back(std::move(ep));
    }
  }
  const Bitset &live = fts.live_states();
  r.safe = fts.label(spec.safe) & live;
  r.persist = fts.label(spec.persist) & live;
  for (const auto &g : r.trace.goal_names)
    r.goals.push_back(fts.label(g) & live);
  return r;
}

} // namespace refsyn
