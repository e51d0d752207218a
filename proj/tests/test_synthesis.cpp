#include "doctest.h"

#include "game_oracle.hpp"
#include "random_fts.hpp"
#include "refsyn/error.hpp"
#include "refsyn/synthesis.hpp"

#include <random>

using namespace refsyn;
using namespace refsyn::testing;

namespace {

const std::function<bool(const Bitset &, const Bitset &)> kSubset =
    [](const Bitset &a, const Bitset &b) { return a.subset_of(b); };

Fts three_state() {
  Fts fts(2);
  for (int i = 0; i < 3; ++i)
    fts.add_state();
  for (auto t : {Transition{0, 0, 1}, Transition{0, 0, 2}, Transition{0, 1, 1},
                 Transition{1, 0, 2}, Transition{2, 0, 2}})
    fts.add_transition(t);
  return fts;
}

// Controllable reachability by worklist: a state joins once some action
// has all of its (nonempty) successors inside the current set.
Bitset reach_closure(const Fts &fts, const Bitset &target) {
  Bitset in = target;
  bool changed = true;
  while (changed) {
    changed = false;
    fts.live_states().for_each([&](StateId q) {
      if (in.test(q))
        return;
      for (ActionId u = 0; u < fts.action_count(); ++u) {
        const auto s = fts.list().successors(q, u);
        if (!s.empty() &&
            std::all_of(s.begin(), s.end(), [&](StateId p) { return in.test(p); })) {
          in.set(q);
          changed = true;
          return;
        }
      }
    });
  }
  return in;
}

} // namespace

TEST_CASE("gfp and lfp on constant and identity maps") {
  const Bitset all(5, true), none(5);
  auto id = [](const Bitset &x) { return x; };
  auto g = gfp<Bitset>(all, id, kSubset, 10);
  CHECK(g.value == all);
  CHECK(g.steps() == 1);
  auto g0 = gfp<Bitset>(all, [&](const Bitset &) { return none; }, kSubset, 10);
  CHECK(g0.value == none);
  CHECK(g0.steps() == 2);
  auto l = lfp<Bitset>(none, id, kSubset, 10);
  CHECK(l.value == none);
  auto l1 = lfp<Bitset>(none, [&](const Bitset &) { return all; }, kSubset, 10);
  CHECK(l1.value == all);
  CHECK(l1.steps() == 2);
  // a map that grows under gfp is rejected
  CHECK_THROWS_AS(gfp<Bitset>(none, [&](const Bitset &) { return all; }, kSubset, 10),
                  FixedPointError);
}

TEST_CASE("safety gfp on the three-state example") {
  Fts fts = three_state();
  const Bitset a = Bitset::from_ids(3, {1, 2});
  auto g = gfp<Bitset>(
      Bitset(3, true),
      [&](const Bitset &v) { return a & fts.list_pre(v, kExistsForall); },
      kSubset, 4);
  CHECK(g.value == a);
}

TEST_CASE("reachability lfp equals the worklist closure") {
  std::mt19937_64 rng(10);
  for (int run = 0; run < 200; ++run) {
    auto inst = random_instance(rng, 20, 3, 0);
    const Fts &fts = inst.fts;
    Bitset target(fts.state_bound());
    fts.live_states().for_each([&](StateId q) {
      if (rng() % 5 == 0)
        target.set(q);
    });
    auto l = lfp<Bitset>(
        Bitset(fts.state_bound()),
        [&](const Bitset &v) { return target | fts.list_pre(v, kExistsForall); },
        kSubset, step_bound(fts));
    CHECK(l.value == reach_closure(fts, target));
  }
}

TEST_CASE("trivial winning sets") {
  Fts fts(1);
  for (int i = 0; i < 4; ++i)
    fts.add_state();
  for (StateId q = 0; q < 4; ++q) {
    fts.add_transition({q, 0, q});
    fts.set_label("A", q);
    fts.set_label("B", q);
    fts.set_label("G", q);
  }
  fts.attach_symbolic(EncodingKind::Log);
  Spec spec{"A", "B", {"G"}};
  for (auto backend : {Backend::List, Backend::Symbolic})
    CHECK(win(fts, spec, backend).win == fts.live_states());

  fts.define_label("empty");
  Spec none{"A", "empty", {}};
  for (auto backend : {Backend::List, Backend::Symbolic})
    CHECK(win(fts, none, backend).win.none());

  Spec bad{"A", "nope", {}};
  CHECK_THROWS_AS(win(fts, bad, Backend::List), UsageError);
}

TEST_CASE("leaving the safe set through a nondeterministic outcome loses") {
  // state 0 has one action that may go to 1 (safe) or 2 (unsafe)
  Fts fts(1);
  for (int i = 0; i < 3; ++i)
    fts.add_state();
  fts.add_transition({0, 0, 1});
  fts.add_transition({0, 0, 2});
  fts.add_transition({1, 0, 1});
  fts.add_transition({2, 0, 2});
  for (StateId q : {0u, 1u})
    fts.set_label("A", q);
  for (StateId q : {0u, 1u, 2u})
    fts.set_label("B", q);
  const auto r = win(fts, Spec{"A", "B", {}}, Backend::List);
  CHECK(r.win.to_ids() == std::vector<std::uint32_t>{1});
}

TEST_CASE("zielonka agrees with strategy enumeration on tiny games") {
  std::mt19937_64 rng(2024);
  int solved = 0;
  for (int run = 0; run < 150; ++run) {
    auto inst = random_instance(rng, 4, 2, 2);
    const Fts &fts = inst.fts;
    std::vector<Bitset> goals;
    for (const auto &gname : inst.spec.goals)
      goals.push_back(fts.label(gname));
    const auto pg = testing::build_product(fts, fts.label("A"), fts.label("B"), goals);
    const auto brute = testing::solve_by_enumeration(pg.game);
    if (brute.empty())
      continue;
    std::vector<char> all(pg.game.size(), 1);
    CHECK(testing::zielonka(pg.game, all) == brute);
    ++solved;
  }
  CHECK(solved > 100);
}

TEST_CASE("winning sets match the game oracle on random instances") {
  std::mt19937_64 rng(7);
  for (int run = 0; run < 200; ++run) {
    auto inst = random_instance(rng, 12, 3, 2);
    Fts &fts = inst.fts;
    fts.attach_symbolic(run % 2 ? EncodingKind::Split : EncodingKind::Log);
    std::vector<Bitset> goals;
    for (const auto &gname : inst.spec.goals)
      goals.push_back(fts.label(gname));
    const Bitset expect =
        testing::zielonka_win(fts, fts.label("A"), fts.label("B"), goals);
    const auto lw = win(fts, inst.spec, Backend::List);
    const auto sw = win(fts, inst.spec, Backend::Symbolic);
    REQUIRE(lw.win == expect);
    REQUIRE(sw.win == expect);
    REQUIRE(lw.trace.outer.size() == sw.trace.outer.size());
    for (std::size_t j = 0; j < lw.trace.outer.size(); ++j)
      REQUIRE(lw.trace.outer[j] == sw.trace.outer[j]);
    CHECK(lw.win.subset_of(fts.label("A")));
  }
}

TEST_CASE("trace bookkeeping") {
  std::mt19937_64 rng(3);
  auto inst = random_instance(rng, 12, 2, 2);
  const auto r = win(inst.fts, inst.spec, Backend::List);
  REQUIRE(!r.trace.outer.empty());
  CHECK(r.trace.outer.back() == r.win);
  CHECK(r.trace.passes.size() == r.trace.outer.size());
  const std::size_t goals = std::max<std::size_t>(1, inst.spec.goals.size());
  for (const auto &p : r.trace.passes) {
    CHECK(p.inner.size() == goals);
    CHECK(p.iterates.size() <= step_bound(inst.fts));
  }
  CHECK(r.steps == r.trace.total_steps());
}
