#include "doctest.h"

#include "refsyn/bdd.hpp"
#include "refsyn/error.hpp"
#include "truth_table.hpp"

#include <algorithm>
#include <numeric>
#include <random>

using namespace refsyn;
using namespace refsyn::bdd;
using refsyn::testing::TruthTable;

namespace {

std::vector<VarId> make_vars(Manager &m, unsigned n) {
  std::vector<VarId> vs;
  for (unsigned i = 0; i < n; ++i)
    vs.push_back(m.new_var());
  return vs;
}

// Random function built from random literals and connectives, for sizes
// beyond the 64-row truth-table range.
Bdd random_formula(Manager &m, const std::vector<VarId> &vars,
                   std::mt19937_64 &rng, int depth) {
  if (depth == 0) {
    const VarId v = vars[rng() % vars.size()];
    return (rng() & 1) ? m.var(v) : m.nvar(v);
  }
  Bdd a = random_formula(m, vars, rng, depth - 1);
  Bdd b = random_formula(m, vars, rng, depth - 1);
  switch (rng() % 3) {
  case 0:
    return a & b;
  case 1:
    return a | b;
  default:
    return a ^ b;
  }
}

} // namespace

TEST_CASE("new_var assigns dense ids appended to the order") {
  Manager m;
  CHECK(m.new_var() == 0);
  CHECK(m.new_var() == 1);
  CHECK(m.new_var() == 2);
  CHECK(m.order() == std::vector<VarId>{0, 1, 2});

  Bdd f = m.var(0) & m.var(2);
  const auto before = m.node_count(f);
  m.new_var();
  CHECK(m.node_count(f) == before);
}

TEST_CASE("apply terminal identities") {
  Manager m;
  auto z = make_vars(m, 2);
  CHECK((m.var(z[0]) & m.nvar(z[0])).is_false());
  Bdd all = m.constant(false);
  for (int r = 0; r < 4; ++r) {
    std::vector<std::uint8_t> bits{static_cast<std::uint8_t>(r & 1),
                                   static_cast<std::uint8_t>((r >> 1) & 1)};
    all |= m.cube(z, bits);
  }
  CHECK(all.is_true());
}

TEST_CASE("apply matches the truth-table oracle on random 6-variable pairs") {
  Manager m;
  auto z = make_vars(m, 6);
  std::mt19937_64 rng(17);
  for (int i = 0; i < 200; ++i) {
    const auto ta = testing::tt_random(6, rng);
    const auto tb = testing::tt_random(6, rng);
    Bdd a = testing::tt_to_bdd(m, ta, z);
    Bdd b = testing::tt_to_bdd(m, tb, z);
    CHECK(testing::bdd_to_tt(m, m.apply(BoolOp::And, a, b), 6, z).rows ==
          (ta.rows & tb.rows));
    CHECK(testing::bdd_to_tt(m, m.apply(BoolOp::Or, a, b), 6, z).rows ==
          (ta.rows | tb.rows));
    CHECK(testing::bdd_to_tt(m, m.apply(BoolOp::Xor, a, b), 6, z).rows ==
          (ta.rows ^ tb.rows));
  }
  m.check_invariants();
}

TEST_CASE("apply across managers is a usage error") {
  Manager m1, m2;
  m1.new_var();
  m2.new_var();
  Bdd a = m1.var(0), b = m2.var(0);
  CHECK_THROWS_AS(m1.apply(BoolOp::And, a, b), UsageError);
  CHECK_THROWS_AS(a & b, UsageError);
}

TEST_CASE("negate is an involution that preserves size") {
  Manager m;
  CHECK(m.negate(m.constant(true)).is_false());
  auto z = make_vars(m, 8);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 100; ++i) {
    Bdd f = random_formula(m, z, rng, 5);
    Bdd nf = ~f;
    CHECK(m.node_count(nf) == m.node_count(f));
    CHECK((~nf) == f);
  }
}

TEST_CASE("cofactor fixes a variable and never grows the diagram") {
  Manager m;
  auto z = make_vars(m, 2);
  Bdd f = m.var(z[0]) & m.var(z[1]);
  CHECK(m.cofactor(f, z[0], true) == m.var(z[1]));
  CHECK(m.cofactor(f, z[0], false).is_false());

  auto w = make_vars(m, 6);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const auto t = testing::tt_random(6, rng);
    Bdd g = testing::tt_to_bdd(m, t, w);
    const unsigned v = rng() % 6;
    const bool val = rng() & 1;
    Bdd c = m.cofactor(g, w[v], val);
    CHECK(m.node_count(c) <= m.node_count(g));
    CHECK(testing::bdd_to_tt(m, c, 6, w).rows ==
          testing::tt_cofactor(t, v, val).rows);
  }
}

TEST_CASE("quantification examples and oracle") {
  Manager m;
  auto z = make_vars(m, 2);
  const std::vector<VarId> first{z[0]};
  CHECK(m.exists(first, m.var(z[0]) & m.var(z[1])) == m.var(z[1]));
  CHECK(m.forall(first, m.var(z[0]) | m.var(z[1])) == m.var(z[1]));

  auto w = make_vars(m, 6);
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    const auto t = testing::tt_random(6, rng);
    Bdd f = testing::tt_to_bdd(m, t, w);
    std::vector<unsigned> picked;
    std::vector<VarId> qvars;
    for (unsigned v = 0; v < 6; ++v)
      if (rng() % 3 == 0) {
        picked.push_back(v);
        qvars.push_back(w[v]);
      }
    const bool ex = rng() & 1;
    Bdd q = m.quantify(ex ? Quantifier::Exists : Quantifier::Forall, qvars, f);
    CHECK(testing::bdd_to_tt(m, q, 6, w).rows ==
          testing::tt_quantify(t, picked, ex).rows);
    // elimination order inside the set does not matter
    std::reverse(qvars.begin(), qvars.end());
    CHECK(m.quantify(ex ? Quantifier::Exists : Quantifier::Forall, qvars, f) ==
          q);
    // relational product agrees with conjunction followed by exists
    const auto t2 = testing::tt_random(6, rng);
    Bdd g = testing::tt_to_bdd(m, t2, w);
    CHECK(m.and_exists(f, g, qvars) == m.exists(qvars, f & g));
  }
  m.check_invariants();
}

TEST_CASE("canonicity: equal functions share a root") {
  Manager m;
  auto z = make_vars(m, 4);
  Bdd a = (m.var(z[0]) & m.var(z[1])) | (m.var(z[2]) & m.var(z[3]));
  Bdd b = ~((~m.var(z[2]) | ~m.var(z[3])) & ~(m.var(z[1]) & m.var(z[0])));
  CHECK(a == b);
  Bdd c = m.ite(m.var(z[0]), m.var(z[1]), m.constant(false)) |
          m.ite(m.var(z[3]), m.var(z[2]), m.constant(false));
  CHECK(a == c);
}

TEST_CASE("rename moves functions between variable groups") {
  Manager m;
  auto x = make_vars(m, 3);
  auto y = make_vars(m, 3);
  CHECK(m.rename(m.constant(true), x, y).is_true());
  std::mt19937_64 rng(9);
  for (int i = 0; i < 50; ++i) {
    Bdd f = random_formula(m, x, rng, 3);
    Bdd g = m.rename(f, x, y);
    CHECK(m.rename(g, y, x) == f);
    auto fs = m.sat_all(f, x);
    auto gs = m.sat_all(g, y);
    std::sort(fs.begin(), fs.end());
    std::sort(gs.begin(), gs.end());
    CHECK(fs == gs);
  }
  const std::vector<VarId> shorter{y[0]};
  CHECK_THROWS_AS(m.rename(m.var(x[0]), x, shorter), UsageError);
}

TEST_CASE("sat enumeration") {
  Manager m;
  auto z = make_vars(m, 3);
  CHECK(m.sat_all(m.constant(false), z).empty());
  const std::vector<VarId> only0{z[0]};
  auto one = m.sat_all(m.var(z[0]), only0);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == std::vector<std::uint8_t>{1});

  Bdd parity = m.var(z[0]) ^ m.var(z[1]) ^ m.var(z[2]);
  auto rows = m.sat_all(parity, z);
  CHECK(rows.size() == 4);
  for (const auto &r : rows)
    CHECK((r[0] ^ r[1] ^ r[2]) == 1);
  CHECK(m.sat_count(parity, z) == doctest::Approx(4.0));
  CHECK_THROWS_AS(m.sat_all(parity, only0), UsageError);
}

TEST_CASE("garbage collection keeps referenced functions intact") {
  ManagerConfig cfg;
  cfg.gc_threshold = 64;
  Manager m(cfg);
  auto z = make_vars(m, 10);
  std::mt19937_64 rng(21);
  std::vector<std::pair<Bdd, std::vector<std::vector<std::uint8_t>>>> kept;
  for (int i = 0; i < 40; ++i) {
    Bdd f = random_formula(m, z, rng, 4);
    if (i % 4 == 0)
      kept.emplace_back(f, m.sat_all(f, z));
  }
  m.collect_garbage();
  m.check_invariants();
  for (auto &[f, sats] : kept)
    CHECK(m.sat_all(f, z) == sats);
  CHECK(m.stats().gc_runs > 0);
}

TEST_CASE("reorder on a single variable is a no-op") {
  Manager m;
  m.new_var();
  Bdd f = m.var(0);
  auto rep = m.reorder(ReorderMethod::Sift);
  CHECK(rep.nodes_before == rep.nodes_after);
  CHECK(m.order() == std::vector<VarId>{0});
}

TEST_CASE("sifting shrinks the interleaved-pair function") {
  Manager m;
  auto z = make_vars(m, 4); // z1..z4 -> 0..3
  Bdd f = (m.var(z[0]) & m.var(z[2])) | (m.var(z[1]) & m.var(z[3]));
  const std::vector<VarId> bad{z[0], z[1], z[2], z[3]};
  const std::vector<VarId> good{z[0], z[2], z[1], z[3]};
  m.set_order(good);
  const auto good_size = m.total_nodes();
  m.set_order(bad);
  const auto bad_size = m.total_nodes();
  CHECK(good_size < bad_size);
  auto rep = m.reorder(ReorderMethod::Sift);
  CHECK(rep.nodes_before == bad_size);
  CHECK(rep.nodes_after <= rep.nodes_before);
  CHECK(rep.nodes_after == good_size);
  m.check_invariants();
}

TEST_CASE("reordering preserves the semantics of every live function") {
  for (auto method : {ReorderMethod::Sift, ReorderMethod::Anneal}) {
    ManagerConfig cfg;
    cfg.anneal_iterations = 2000;
    Manager m(cfg);
    auto z = make_vars(m, 12);
    std::mt19937_64 rng(method == ReorderMethod::Sift ? 1 : 2);
    std::vector<Bdd> live;
    for (int i = 0; i < 8; ++i)
      live.push_back(random_formula(m, z, rng, 6));

    std::vector<std::vector<std::uint8_t>> samples(1000);
    std::vector<std::vector<bool>> expected(live.size());
    for (auto &s : samples) {
      s.resize(m.var_count());
      for (auto &b : s)
        b = rng() & 1;
    }
    for (std::size_t i = 0; i < live.size(); ++i)
      for (auto &s : samples)
        expected[i].push_back(m.eval(live[i], s));

    auto rep = m.reorder(method);
    CHECK(rep.nodes_after <= rep.nodes_before);
    m.check_invariants();
    for (std::size_t i = 0; i < live.size(); ++i)
      for (std::size_t k = 0; k < samples.size(); ++k)
        REQUIRE(m.eval(live[i], samples[k]) == expected[i][k]);
    // operations keep working under the new order
    Bdd g = live[0] & live[1];
    for (std::size_t k = 0; k < samples.size(); ++k)
      REQUIRE(m.eval(g, samples[k]) == (expected[0][k] && expected[1][k]));
  }
}
