#include "doctest.h"

#include "refsyn/abstraction.hpp"
#include "refsyn/error.hpp"
#include "refsyn/thermal.hpp"
#include "abstraction_sampling.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace refsyn;
using namespace refsyn::testing;

namespace {

AffineMode affine_1d(double a, double k) {
  AffineMode m;
  m.dim = 1;
  m.a = {a};
  m.k = {k};
  return m;
}

AffineMode identity(std::size_t n) {
  AffineMode m;
  m.dim = n;
  m.a.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    m.a[i * n + i] = 1.0;
  m.k.assign(n, 0.0);
  return m;
}

} // namespace

TEST_CASE("reach of a 1-D monotone map") {
  const Box r = reach(Box({0.0}, {2.0}), affine_1d(0.5, 1.0), Box());
  CHECK(r.lo[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.hi[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.lo[0] <= 1.0);
  CHECK(r.hi[0] >= 2.0);
  const Box neg = reach(Box({0.0}, {2.0}), affine_1d(-1.0, 0.0), Box());
  CHECK(neg.lo[0] == doctest::Approx(-2.0));
  CHECK(neg.hi[0] == doctest::Approx(0.0));
}

TEST_CASE("identity dynamics reach the cell itself") {
  const Box cell({0.25, -1.0, 3.0}, {0.5, 2.0, 3.5});
  const Box r = reach(cell, identity(3), Box());
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(r.lo[i] == doctest::Approx(cell.lo[i]));
    CHECK(r.hi[i] == doctest::Approx(cell.hi[i]));
    CHECK(r.contains(cell));
  }
}

TEST_CASE("3-D reach boxes contain samples and are tight") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  for (int run = 0; run < 5; ++run) {
    AffineMode m;
    m.dim = 3;
    m.dist_dim = 2;
    m.a.resize(9);
    m.k.resize(3);
    m.e.resize(6);
    for (auto &x : m.a)
      x = coef(rng);
    for (auto &x : m.k)
      x = coef(rng);
    for (auto &x : m.e)
      x = coef(rng);
    const Box cell({-1.0, 0.0, 2.0}, {0.5, 1.0, 2.25});
    const Box dist({-0.1, 0.0}, {0.1, 0.3});
    const Box r = reach(cell, m, dist);
    std::vector<double> lo(3, INFINITY), hi(3, -INFINITY);
    for (int s = 0; s < 100000; ++s) {
      std::vector<double> x(3), d(2);
      for (int i = 0; i < 3; ++i) {
        // corners dominate the extremes of a linear map
        x[i] = rng() % 2 ? cell.lo[i] : cell.hi[i];
        if (rng() % 4 == 0)
          x[i] = std::uniform_real_distribution<double>(cell.lo[i], cell.hi[i])(rng);
      }
      for (int i = 0; i < 2; ++i)
        d[i] = rng() % 2 ? dist.lo[i] : dist.hi[i];
      const auto y = m.apply(x, d);
      for (int i = 0; i < 3; ++i) {
        REQUIRE(y[i] >= r.lo[i]);
        REQUIRE(y[i] <= r.hi[i]);
        lo[i] = std::min(lo[i], y[i]);
        hi[i] = std::max(hi[i], y[i]);
      }
    }
    for (int i = 0; i < 3; ++i) {
      const double tol = 1e-6 * r.width(i);
      CHECK(lo[i] - r.lo[i] <= tol);
      CHECK(r.hi[i] - hi[i] <= tol);
    }
  }
}

TEST_CASE("partition stays a valid cover under random splits") {
  std::mt19937_64 rng(5);
  for (std::size_t n : {1u, 2u, 3u}) {
    Partition part(unit_box(n), std::vector<std::size_t>(n, 2));
    for (int s = 0; s < 80; ++s) {
      const auto cells = part.cells();
      const StateId q = cells[rng() % cells.size()];
      const std::size_t d0 = part.depth(q);
      part.split(q, static_cast<StateId>(part.id_bound()));
      CHECK(part.depth(q) == d0 + 1);
      CHECK(part.depth(static_cast<StateId>(part.id_bound() - 1)) == d0 + 1);
    }
    const auto cells = part.cells();
    CHECK(cells.size() == part.cell_count());
    double vol = 0.0;
    for (auto q : cells)
      vol += part.cell(q).volume();
    CHECK(vol == doctest::Approx(1.0));
    // disjoint interiors
    for (std::size_t i = 0; i < cells.size(); ++i)
      for (std::size_t j = i + 1; j < cells.size(); ++j) {
        const Box &a = part.cell(cells[i]), &b = part.cell(cells[j]);
        bool overlap = true;
        for (std::size_t d = 0; d < n; ++d)
          overlap = overlap && a.lo[d] < b.hi[d] && b.lo[d] < a.hi[d];
        REQUIRE_FALSE(overlap);
      }
    // locate returns a cell containing the point
    for (int s = 0; s < 2000; ++s) {
      const auto x = sample_in(unit_box(n), rng);
      const auto q = part.locate(x);
      REQUIRE(q.has_value());
      CHECK(part.cell(*q).contains(x));
    }
    CHECK_FALSE(part.locate(std::vector<double>(n, 1.5)).has_value());
    CHECK_THROWS_AS(part.split(part.sink(), static_cast<StateId>(part.id_bound())),
                    UsageError);
  }
}

TEST_CASE("identity dynamics give self-loops and closed-boundary neighbours") {
  System sys;
  sys.domain = unit_box(2);
  sys.grid = {2, 2};
  sys.modes = {identity(2)};
  Abstraction abs(sys);
  const auto &fts = abs.fts();
  // a 2x2 grid: every cell touches every other at least at a corner
  for (StateId q = 0; q < 4; ++q) {
    const auto s = fts.list().successors(q, 0);
    CHECK(std::find(s.begin(), s.end(), q) != s.end());
    CHECK(s.size() == 4);
    CHECK(std::find(s.begin(), s.end(), abs.sink()) == s.end());
  }
  const StateId child = abs.split(0);
  for (StateId q : {StateId{0}, child}) {
    const auto s = fts.list().successors(q, 0);
    CHECK(std::find(s.begin(), s.end(), q) != s.end());
  }
  // the sink is absorbing
  const auto sink_succ = fts.list().successors(abs.sink(), 0);
  CHECK(std::vector<StateId>(sink_succ.begin(), sink_succ.end()) ==
        std::vector<StateId>{abs.sink()});
}

TEST_CASE("contraction toward the centre never reaches the sink") {
  System sys;
  sys.domain = Box({-1.0}, {1.0});
  sys.grid = {8};
  sys.modes = {affine_1d(0.5, 0.0)};
  Abstraction abs(sys);
  for (StateId q : abs.partition().cells()) {
    const auto s = abs.fts().list().successors(q, 0);
    CHECK(std::find(s.begin(), s.end(), abs.sink()) == s.end());
    CHECK(sys.domain.contains(abs.reach_box(q, 0)));
  }
  // an expanding map leaves from the outer cells
  sys.modes = {affine_1d(2.0, 0.0)};
  Abstraction out(sys);
  const auto s = out.fts().list().successors(0, 0);
  CHECK(std::find(s.begin(), s.end(), out.sink()) != s.end());
}

TEST_CASE("cell labels under-approximate proposition boxes") {
  std::mt19937_64 rng(17);
  System sys = random_system(rng, 2, 2);
  sys.propositions["D"] = sys.domain;
  sys.propositions["S"] = Box({-0.4, -1.0}, {0.7, 1.0});
  Abstraction abs(sys);
  for (int s = 0; s < 60; ++s) {
    const auto cells = abs.partition().cells();
    abs.split(cells[rng() % cells.size()]);
  }
  const auto &fts = abs.fts();
  const auto &part = abs.partition();
  for (StateId q : part.cells()) {
    CHECK(fts.label("D").test(q));
    const Box &c = part.cell(q);
    CHECK(fts.label("S").test(q) == sys.propositions["S"].contains(c));
    if (fts.label("P").test(q))
      CHECK(sys.propositions["P"].contains(c));
  }
  CHECK_FALSE(fts.label("D").test(abs.sink()));
  CHECK_FALSE(fts.label("A").test(abs.sink()));
  // a straddling cell is not labeled
  System one;
  one.domain = unit_box(1);
  one.grid = {2};
  one.modes = {identity(1)};
  one.propositions["B"] = Box({0.25}, {1.0});
  Abstraction a1(one);
  CHECK_FALSE(a1.fts().label("B").test(0));
  CHECK(a1.fts().label("B").test(1));
}

TEST_CASE("children inherit their parent's labels") {
  std::mt19937_64 rng(23);
  Abstraction abs(random_system(rng, 2, 1));
  for (int s = 0; s < 100; ++s) {
    const auto cells = abs.partition().cells();
    const StateId q = cells[rng() % cells.size()];
    const bool had = abs.fts().label("P").test(q);
    const StateId child = abs.split(q);
    if (had) {
      CHECK(abs.fts().label("P").test(q));
      CHECK(abs.fts().label("P").test(child));
    }
  }
}

TEST_CASE("Monte-Carlo soundness on random 2-D and 3-D systems") {
  std::mt19937_64 rng(4242);
  std::size_t total = 0, bad = 0;
  for (int run = 0; run < 20; ++run) {
    const std::size_t n = run % 2 ? 3 : 2;
    Abstraction abs(random_system(rng, n, 1 + rng() % 3));
    for (int s = 0; s < 30; ++s) {
      const auto cells = abs.partition().cells();
      abs.split(cells[rng() % cells.size()]);
    }
    bad += soundness_violations(abs, rng, 5000);
    total += 5000;
  }
  CHECK(total >= 100000);
  CHECK(bad == 0);
}

TEST_CASE("incremental splits match a full rebuild") {
  std::mt19937_64 rng(808);
  for (int run = 0; run < 200; ++run) {
    const std::size_t n = run % 3 == 2 ? 3 : 2;
    Abstraction abs(random_system(rng, n, 1 + rng() % 3));
    const int steps = 1 + static_cast<int>(rng() % 25);
    for (int s = 0; s < steps; ++s) {
      const auto cells = abs.partition().cells();
      abs.split(cells[rng() % cells.size()]);
    }
    REQUIRE(abs.fts() == abs.rebuild());
  }
}

TEST_CASE("thermal modes: single-resistor exchange") {
  ThermalConfig cfg;
  cfg.tau = 0.1;
  cfg.zones = {{"z1", "room", 1.0, 0.0, false, 0.0}, {"z2", "room", 1.0, 0.0, false, 0.0}};
  cfg.links = {{"z1", "z2", 1.0}};
  cfg.domain = unit_box(2, 0.0, 40.0);
  cfg.grid = {2, 2};
  const auto modes = thermal_modes(cfg);
  REQUIRE(modes.size() == 1);
  const auto y = modes[0].apply(std::vector<double>{20.0, 30.0}, {});
  CHECK(y[0] == doctest::Approx(20.0 + 0.1 * (30.0 - 20.0)));
  CHECK(y[1] == doctest::Approx(30.0 + 0.1 * (20.0 - 30.0)));
}

TEST_CASE("thermal modes: uniform temperatures are fixed points") {
  ThermalConfig cfg;
  cfg.tau = 0.2;
  cfg.zones = {{"a", "room", 2.0, 0.0, false, 0.0},
               {"b", "room", 1.0, 0.0, false, 0.0},
               {"c", "slab", 3.0, 0.0, false, 0.0}};
  cfg.links = {{"a", "b", 1.5}, {"b", "c", 0.7}, {"a", "c", 4.0}};
  cfg.domain = unit_box(3, 0.0, 40.0);
  cfg.grid = {1, 1, 1};
  const auto m = thermal_modes(cfg).at(0);
  const auto y = m.apply(std::vector<double>{23.0, 23.0, 23.0}, {});
  for (double v : y)
    CHECK(v == doctest::Approx(23.0));
}

TEST_CASE("thermal modes: Euler rows conserve weight") {
  ThermalConfig cfg;
  cfg.tau = 0.05;
  cfg.zones = {{"room", "a", 1.0, 0.3, false, 0.0}, {"slab", "slab", 4.0, 0.0, true, 2.0}};
  cfg.fixed = {{"outside", 30.0}, {"water", 18.0}};
  cfg.links = {{"room", "outside", 5.0}, {"room", "slab", 1.0}};
  cfg.domain = unit_box(2, 20.0, 28.0);
  cfg.grid = {4, 4};
  cfg.disturbance = Box({-0.1, 0.0}, {0.1, 0.0});
  const auto modes = thermal_modes(cfg);
  REQUIRE(modes.size() == 2);
  // folded coefficient of each fixed node per zone and mode
  const double fixed_room = cfg.tau / 1.0 * (1.0 / 5.0);
  for (std::size_t u = 0; u < 2; ++u) {
    const auto &m = modes[u];
    const double fixed_slab = u == 1 ? cfg.tau / 4.0 * (1.0 / 2.0) : 0.0;
    CHECK(m.a[0] + m.a[1] + fixed_room == doctest::Approx(1.0));
    CHECK(m.a[2] + m.a[3] + fixed_slab == doctest::Approx(1.0));
    CHECK(m.k[0] == doctest::Approx(cfg.tau * (30.0 / 5.0 + 0.3)));
    CHECK(m.k[1] == doctest::Approx(u == 1 ? cfg.tau / 4.0 * (18.0 / 2.0) : 0.0));
    CHECK(m.e[0] == doctest::Approx(cfg.tau));
  }
}

TEST_CASE("thermal config guards") {
  ThermalConfig cfg;
  cfg.tau = 2.0;
  cfg.zones = {{"z1", "room", 1.0, 0.0, false, 0.0}, {"z2", "room", 1.0, 0.0, false, 0.0}};
  cfg.links = {{"z1", "z2", 1.0}};
  cfg.domain = unit_box(2);
  cfg.grid = {1, 1};
  CHECK_THROWS_AS(thermal_modes(cfg), ConfigError);
  cfg.tau = 0.5;
  CHECK_NOTHROW(thermal_modes(cfg));
  cfg.links.push_back({"z1", "nowhere", 1.0});
  CHECK_THROWS_AS(thermal_modes(cfg), ConfigError);
  cfg.links.pop_back();
  cfg.zones[1].slab = true;
  cfg.zones[1].water_resistance = 1.0;
  CHECK_THROWS_AS(thermal_modes(cfg), ConfigError); // no water node
}

TEST_CASE("thermal abstraction is sound under disturbance") {
  ThermalConfig cfg;
  cfg.tau = 0.5;
  cfg.zones = {{"room", "a", 1.0, 0.0, false, 0.0}, {"slab", "slab", 2.0, 0.0, true, 2.0}};
  cfg.fixed = {{"outside", 30.0}, {"water", 18.0}};
  cfg.links = {{"room", "outside", 10.0}, {"room", "slab", 2.0}};
  cfg.domain = Box({20.0, 20.0}, {28.0, 28.0});
  cfg.grid = {4, 4};
  cfg.disturbance = Box({-0.1, 0.0}, {0.1, 0.0});
  Abstraction abs(thermal_system(cfg));
  std::mt19937_64 rng(1);
  for (int s = 0; s < 60; ++s) {
    const auto cells = abs.partition().cells();
    abs.split(cells[rng() % cells.size()]);
  }
  CHECK(soundness_violations(abs, rng, 20000) == 0);
  CHECK(abs.fts() == abs.rebuild());
}
