#pragma once

// Test-only oracle: boolean functions over at most 6 variables as 64-bit
// truth tables. Row r assigns variable v the value (r >> v) & 1.

#include "refsyn/bdd.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace refsyn::testing {

struct TruthTable {
  unsigned vars = 0;
  std::uint64_t rows = 0;

  std::uint64_t mask() const {
    return vars >= 6 ? ~std::uint64_t{0} : ((std::uint64_t{1} << (1u << vars)) - 1);
  }
  bool at(std::uint64_t row) const { return (rows >> row) & 1u; }
};

inline TruthTable tt_var(unsigned vars, unsigned v) {
  TruthTable t{vars, 0};
  for (std::uint64_t r = 0; r < (std::uint64_t{1} << vars); ++r)
    if ((r >> v) & 1u)
      t.rows |= std::uint64_t{1} << r;
  return t;
}

inline TruthTable tt_random(unsigned vars, std::mt19937_64 &rng) {
  TruthTable t{vars, rng()};
  t.rows &= t.mask();
  return t;
}

inline TruthTable tt_cofactor(const TruthTable &t, unsigned v, bool value) {
  TruthTable out{t.vars, 0};
  for (std::uint64_t r = 0; r < (std::uint64_t{1} << t.vars); ++r) {
    const std::uint64_t src =
        value ? (r | (std::uint64_t{1} << v)) : (r & ~(std::uint64_t{1} << v));
    if (t.at(src))
      out.rows |= std::uint64_t{1} << r;
  }
  return out;
}

inline TruthTable tt_quantify(TruthTable t, const std::vector<unsigned> &vs,
                              bool exists) {
  for (unsigned v : vs) {
    const auto a = tt_cofactor(t, v, false), b = tt_cofactor(t, v, true);
    t.rows = exists ? (a.rows | b.rows) : (a.rows & b.rows);
  }
  return t;
}

/// Builds a BDD for `t` by Shannon expansion over manager variables
/// vars[0..t.vars-1] using only var/apply, independently of cofactor and
/// quantification code.
inline bdd::Bdd tt_to_bdd(bdd::Manager &m, const TruthTable &t,
                          const std::vector<bdd::VarId> &vars) {
  bdd::Bdd acc = m.constant(false);
  for (std::uint64_t r = 0; r < (std::uint64_t{1} << t.vars); ++r) {
    if (!t.at(r))
      continue;
    bdd::Bdd term = m.constant(true);
    for (unsigned v = 0; v < t.vars; ++v)
      term &= ((r >> v) & 1u) ? m.var(vars[v]) : m.nvar(vars[v]);
    acc |= term;
  }
  return acc;
}

/// Reads the truth table of `f` by exhaustive evaluation.
inline TruthTable bdd_to_tt(bdd::Manager &m, const bdd::Bdd &f, unsigned nvars,
                            const std::vector<bdd::VarId> &vars) {
  TruthTable t{nvars, 0};
  std::vector<std::uint8_t> assignment(m.var_count(), 0);
  for (std::uint64_t r = 0; r < (std::uint64_t{1} << nvars); ++r) {
    for (unsigned v = 0; v < nvars; ++v)
      assignment[vars[v]] = (r >> v) & 1u;
    if (m.eval(f, assignment))
      t.rows |= std::uint64_t{1} << r;
  }
  return t;
}

} // namespace refsyn::testing
