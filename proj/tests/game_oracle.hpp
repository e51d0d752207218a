#pragma once

// Explicit parity-game oracle for the winning set. The Fts is unfolded into
// a game with a goal-cycling memory; player 0 (controller) picks actions,
// player 1 (environment) picks successors. Max-parity priorities:
//   3  state outside B (or a losing sink)
//   2  controller vertex visiting the goal of its current phase inside B
//   1  any other controller vertex
//   0  environment vertices
// Player 0 wins a play iff the largest priority seen infinitely often is
// even. Solved with Zielonka's recursive algorithm; tiny games can also be
// solved by enumerating player-0 positional strategies.

#include "refsyn/fts.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <vector>

namespace refsyn::testing {

struct ParityGame {
  std::vector<int> owner;    // 0 or 1
  std::vector<int> priority; // max parity
  std::vector<std::vector<int>> succ;

  int add(int who, int prio) {
    owner.push_back(who);
    priority.push_back(prio);
    succ.emplace_back();
    return static_cast<int>(owner.size()) - 1;
  }
  int size() const { return static_cast<int>(owner.size()); }
};

// Attractor of `target` for `player` inside the subgame `in`.
inline std::vector<char> attractor(const ParityGame &g,
                                   const std::vector<char> &in,
                                   const std::vector<char> &target, int player) {
  const int n = g.size();
  std::vector<std::vector<int>> pred(n);
  std::vector<int> degree(n, 0);
  for (int v = 0; v < n; ++v) {
    if (!in[v])
      continue;
    for (int w : g.succ[v])
      if (in[w]) {
        pred[w].push_back(v);
        ++degree[v];
      }
  }
  std::vector<char> attr(n, 0);
  std::vector<int> queue;
  for (int v = 0; v < n; ++v)
    if (in[v] && target[v]) {
      attr[v] = 1;
      queue.push_back(v);
    }
  while (!queue.empty()) {
    const int w = queue.back();
    queue.pop_back();
    for (int v : pred[w]) {
      if (attr[v])
        continue;
      if (g.owner[v] == player || --degree[v] == 0) {
        attr[v] = 1;
        queue.push_back(v);
      }
    }
  }
  return attr;
}

// Returns, for every vertex of the subgame, the winner (0 or 1). Every
// vertex of the subgame must keep at least one successor inside it.
inline std::vector<int> zielonka(const ParityGame &g, const std::vector<char> &in) {
  const int n = g.size();
  std::vector<int> win(n, -1);
  int max_prio = -1;
  for (int v = 0; v < n; ++v)
    if (in[v])
      max_prio = std::max(max_prio, g.priority[v]);
  if (max_prio < 0)
    return win;
  const int player = max_prio % 2;
  const int opponent = 1 - player;
  std::vector<char> top(n, 0);
  for (int v = 0; v < n; ++v)
    top[v] = in[v] && g.priority[v] == max_prio;
  const auto a = attractor(g, in, top, player);
  std::vector<char> rest(n, 0);
  for (int v = 0; v < n; ++v)
    rest[v] = in[v] && !a[v];
  const auto sub = zielonka(g, rest);
  bool opponent_wins_somewhere = false;
  for (int v = 0; v < n; ++v)
    if (rest[v] && sub[v] == opponent)
      opponent_wins_somewhere = true;
  if (!opponent_wins_somewhere) {
    for (int v = 0; v < n; ++v)
      if (in[v])
        win[v] = player;
    return win;
  }
  std::vector<char> opp(n, 0);
  for (int v = 0; v < n; ++v)
    opp[v] = rest[v] && sub[v] == opponent;
  const auto b = attractor(g, in, opp, opponent);
  std::vector<char> rest2(n, 0);
  for (int v = 0; v < n; ++v)
    rest2[v] = in[v] && !b[v];
  const auto sub2 = zielonka(g, rest2);
  for (int v = 0; v < n; ++v) {
    if (!in[v])
      continue;
    win[v] = b[v] ? opponent : sub2[v];
  }
  return win;
}

// Player 0 wins from v under a fixed positional strategy iff no cycle with
// odd maximum priority is reachable in the remaining one-player graph.
inline std::vector<int> solve_by_enumeration(const ParityGame &g,
                                             std::size_t max_strategies = 1u << 16) {
  const int n = g.size();
  std::vector<int> choosers;
  std::size_t total = 1;
  for (int v = 0; v < n; ++v)
    if (g.owner[v] == 0) {
      choosers.push_back(v);
      total *= g.succ[v].size();
      if (total > max_strategies)
        return {};
    }
  std::vector<int> best(n, 1);
  std::vector<std::size_t> pick(choosers.size(), 0);
  for (std::size_t s = 0; s < total; ++s) {
    std::size_t rem = s;
    for (std::size_t c = 0; c < choosers.size(); ++c) {
      pick[c] = rem % g.succ[choosers[c]].size();
      rem /= g.succ[choosers[c]].size();
    }
    std::vector<std::vector<int>> edges(n);
    for (int v = 0; v < n; ++v)
      if (g.owner[v] == 1)
        edges[v] = g.succ[v];
    for (std::size_t c = 0; c < choosers.size(); ++c)
      edges[choosers[c]] = {g.succ[choosers[c]][pick[c]]};

    // bad[v]: v lies on a cycle whose max priority is odd
    std::vector<char> bad(n, 0);
    for (int p = 1; p <= 3; p += 2) {
      for (int v = 0; v < n; ++v) {
        if (g.priority[v] != p)
          continue;
        // cycle through v using only vertices of priority <= p
        std::vector<char> seen(n, 0);
        std::vector<int> stack{v};
        bool cycle = false;
        while (!stack.empty() && !cycle) {
          const int x = stack.back();
          stack.pop_back();
          for (int y : edges[x]) {
            if (g.priority[y] > p)
              continue;
            if (y == v) {
              cycle = true;
              break;
            }
            if (!seen[y]) {
              seen[y] = 1;
              stack.push_back(y);
            }
          }
        }
        if (cycle)
          bad[v] = 1;
      }
    }
    for (int v = 0; v < n; ++v) {
      if (best[v] == 0)
        continue;
      std::vector<char> seen(n, 0);
      std::vector<int> stack{v};
      seen[v] = 1;
      bool reach_bad = false;
      while (!stack.empty()) {
        const int x = stack.back();
        stack.pop_back();
        if (bad[x]) {
          reach_bad = true;
          break;
        }
        for (int y : edges[x])
          if (!seen[y]) {
            seen[y] = 1;
            stack.push_back(y);
          }
      }
      if (!reach_bad)
        best[v] = 0;
    }
  }
  return best;
}

struct ProductGame {
  ParityGame game;
  std::size_t phases = 1;
  // controller vertex of (state, phase); -1 for dead ids
  std::vector<std::vector<int>> vertex;
};

// Unfolds the Fts under the specification. An empty goal list means a
// single goal equal to B.
inline ProductGame build_product(const Fts &fts, const Bitset &safe,
                                 const Bitset &persist,
                                 std::vector<Bitset> goals) {
  if (goals.empty())
    goals.push_back(persist);
  ProductGame pg;
  auto &g = pg.game;
  pg.phases = goals.size();
  const std::size_t n = fts.state_bound();
  pg.vertex.assign(n, std::vector<int>(pg.phases, -1));
  const int lose = g.add(0, 3);
  g.succ[lose].push_back(lose);
  for (StateId q = 0; q < n; ++q) {
    if (!fts.is_live(q))
      continue;
    for (std::size_t i = 0; i < pg.phases; ++i) {
      int prio = 1;
      if (!persist.test(q))
        prio = 3;
      else if (goals[i].test(q))
        prio = 2;
      pg.vertex[q][i] = g.add(0, prio);
    }
  }
  for (StateId q = 0; q < n; ++q) {
    if (!fts.is_live(q))
      continue;
    for (std::size_t i = 0; i < pg.phases; ++i) {
      const int v = pg.vertex[q][i];
      if (!safe.test(q)) {
        g.succ[v].push_back(lose);
        continue;
      }
      const bool visit = persist.test(q) && goals[i].test(q);
      const std::size_t next_phase = visit ? (i + 1) % pg.phases : i;
      for (ActionId u = 0; u < fts.action_count(); ++u) {
        const auto succ = fts.list().successors(q, u);
        if (succ.empty())
          continue;
        const int e = g.add(1, 0);
        g.succ[v].push_back(e);
        for (StateId p : succ)
          g.succ[e].push_back(pg.vertex[p][next_phase]);
      }
      if (g.succ[v].empty())
        g.succ[v].push_back(lose);
    }
  }
  return pg;
}

// States whose phase-0 vertex is won by the controller.
inline Bitset oracle_win(const ProductGame &pg, std::size_t state_bound,
                         const std::vector<int> &winner) {
  Bitset out(state_bound);
  for (StateId q = 0; q < state_bound; ++q) {
    const int v = pg.vertex[q].empty() ? -1 : pg.vertex[q][0];
    if (v >= 0 && winner[v] == 0)
      out.set(q);
  }
  return out;
}

inline Bitset zielonka_win(const Fts &fts, const Bitset &safe,
                           const Bitset &persist,
                           const std::vector<Bitset> &goals) {
  const auto pg = build_product(fts, safe, persist, goals);
  std::vector<char> all(pg.game.size(), 1);
  return oracle_win(pg, fts.state_bound(), zielonka(pg.game, all));
}

} // namespace refsyn::testing
