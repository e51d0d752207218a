#pragma once

// Random affine systems and Monte-Carlo soundness sampling for
// abstractions.

#include "refsyn/abstraction.hpp"

#include <algorithm>
#include <random>
#include <vector>

namespace refsyn::testing {

inline Box unit_box(std::size_t n, double lo = 0.0, double hi = 1.0) {
  return Box(std::vector<double>(n, lo), std::vector<double>(n, hi));
}

// Random affine system on [-1,1]^n with a mild contraction so that most
// successors stay inside the domain.
inline System random_system(std::mt19937_64 &rng, std::size_t n, std::size_t modes) {
  std::uniform_real_distribution<double> coef(-0.6, 0.6), off(-0.3, 0.3);
  System sys;
  sys.domain = unit_box(n, -1.0, 1.0);
  sys.grid.assign(n, n == 2 ? 3 : 2);
  const std::size_t nd = rng() % 2 == 0 ? 0 : n;
  if (nd > 0)
    sys.disturbance = unit_box(nd, -0.05, 0.05);
  for (std::size_t u = 0; u < modes; ++u) {
    AffineMode m;
    m.dim = n;
    m.dist_dim = nd;
    m.a.resize(n * n);
    for (auto &x : m.a)
      x = coef(rng);
    m.k.resize(n);
    for (auto &x : m.k)
      x = off(rng);
    m.e.assign(n * nd, 0.0);
    for (std::size_t i = 0; i < nd; ++i)
      m.e[i * nd + i] = 1.0;
    sys.modes.push_back(m);
  }
  sys.propositions["P"] = unit_box(n, -0.5, 0.5);
  sys.propositions["A"] = sys.domain;
  return sys;
}

inline std::vector<double> sample_in(const Box &b, std::mt19937_64 &rng) {
  std::vector<double> x(b.dim());
  for (std::size_t i = 0; i < b.dim(); ++i)
    x[i] = std::uniform_real_distribution<double>(b.lo[i], b.hi[i])(rng);
  // hit faces and corners now and then
  if (rng() % 8 == 0) {
    const std::size_t i = rng() % b.dim();
    x[i] = rng() % 2 ? b.lo[i] : b.hi[i];
  }
  return x;
}

// Counts sampled concrete steps whose successor cell is not a listed target.
inline std::size_t soundness_violations(const Abstraction &abs, std::mt19937_64 &rng,
                                 std::size_t samples) {
  const auto &sys = abs.system();
  const auto cells = abs.partition().cells();
  std::size_t bad = 0;
  for (std::size_t s = 0; s < samples; ++s) {
    const StateId q = cells[rng() % cells.size()];
    const ActionId u = static_cast<ActionId>(rng() % sys.modes.size());
    const auto x = sample_in(abs.partition().cell(q), rng);
    std::vector<double> d;
    if (sys.disturbance.dim() > 0)
      d = sample_in(sys.disturbance, rng);
    const auto y = sys.modes[u].apply(x, d);
    const auto cell = abs.partition().locate(y);
    const StateId target = cell ? *cell : abs.sink();
    const auto succ = abs.fts().list().successors(q, u);
    if (std::find(succ.begin(), succ.end(), target) == succ.end())
      ++bad;
  }
  return bad;
}

} // namespace refsyn::testing
