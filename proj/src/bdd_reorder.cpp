// Variable reordering by in-place swaps of adjacent levels. Node ids (and so
// every outstanding Bdd handle) survive a swap; nodes are relabelled rather
// than copied.

#include "refsyn/bdd.hpp"

#include "refsyn/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

namespace refsyn::bdd {

// Exchanges the variables at `lvl` and `lvl + 1`. Requires a table without
// dead nodes; nodes that become unreferenced are freed immediately so the
// table size stays an exact function of the order.
std::size_t Manager::swap_adjacent(std::uint32_t lvl) {
  const VarId x = level2var_[lvl];
  const VarId y = level2var_[lvl + 1];
  Subtable &tx = subtables_[x];

  std::vector<NodeId> xs = subtable_nodes(tx);
  std::fill(tx.buckets.begin(), tx.buckets.end(), kNil);
  tx.keys = 0;

  std::vector<NodeId> moved;
  for (NodeId n : xs) {
    const Node &node = nodes_[n];
    const bool touches = (node.lo > kTrueNode && nodes_[node.lo].var == y) ||
                         (node.hi > kTrueNode && nodes_[node.hi].var == y);
    if (touches)
      moved.push_back(n);
    else
      subtable_insert(subtables_[x], n);
  }
  // nodes in `moved` are temporarily in no subtable
  table_nodes_ -= moved.size();

  level2var_[lvl] = y;
  level2var_[lvl + 1] = x;
  var2level_[y] = lvl;
  var2level_[x] = lvl + 1;

  for (NodeId n : moved) {
    const NodeId f0 = nodes_[n].lo;
    const NodeId f1 = nodes_[n].hi;
    const bool y0 = f0 > kTrueNode && nodes_[f0].var == y;
    const bool y1 = f1 > kTrueNode && nodes_[f1].var == y;
    const NodeId f00 = y0 ? nodes_[f0].lo : f0;
    const NodeId f01 = y0 ? nodes_[f0].hi : f0;
    const NodeId f10 = y1 ? nodes_[f1].lo : f1;
    const NodeId f11 = y1 ? nodes_[f1].hi : f1;
    const NodeId new_lo = mk(x, f00, f10);
    ref(new_lo);
    const NodeId new_hi = mk(x, f01, f11);
    ref(new_hi);
    deref_eager(f0);
    deref_eager(f1);
    nodes_[n].var = y;
    nodes_[n].lo = new_lo;
    nodes_[n].hi = new_hi;
    subtable_insert(subtables_[y], n);
    ++table_nodes_;
  }
  stats_.peak_table_nodes = std::max(stats_.peak_table_nodes, table_nodes_);
  return table_nodes_;
}

void Manager::set_order(std::span<const VarId> target) {
  if (target.size() != var_count())
    throw UsageError("set_order: target must list every variable once");
  std::vector<char> seen(var_count(), 0);
  for (VarId v : target) {
    if (v >= var_count() || seen[v]++)
      throw UsageError("set_order: target is not a permutation");
  }
  collect_garbage();
  for (std::uint32_t p = 0; p < target.size(); ++p) {
    std::uint32_t cur = var2level_[target[p]];
    while (cur > p) {
      swap_adjacent(cur - 1);
      --cur;
    }
  }
  cache_clear();
}

ReorderReport Manager::reorder(ReorderMethod method) {
  const auto start = std::chrono::steady_clock::now();
  collect_garbage();
  ReorderReport report;
  if (var_count() < 2) {
    report.nodes_before = report.nodes_after = table_nodes_;
  } else {
    report = method == ReorderMethod::Sift ? sift() : anneal();
  }
  cache_clear();
  gc_limit_ = std::max(config_.gc_threshold, 2 * table_nodes_);
  report.millis = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - start)
                      .count();
  return report;
}

ReorderReport Manager::sift() {
  ReorderReport report;
  report.nodes_before = table_nodes_;
  const auto n = static_cast<std::uint32_t>(var_count());

  std::vector<VarId> vars(n);
  for (VarId v = 0; v < n; ++v)
    vars[v] = v;
  std::stable_sort(vars.begin(), vars.end(), [&](VarId a, VarId b) {
    return subtables_[a].keys > subtables_[b].keys;
  });

  for (VarId x : vars) {
    std::uint32_t cur = var2level_[x];
    std::size_t best = table_nodes_;
    std::uint32_t best_level = cur;
    const double limit_factor = config_.sift_max_growth;

    auto go_down = [&] {
      while (cur + 1 < n) {
        const std::size_t size = swap_adjacent(cur);
        ++report.swaps;
        ++cur;
        if (size < best) {
          best = size;
          best_level = cur;
        }
        if (static_cast<double>(size) > limit_factor * static_cast<double>(best))
          break;
      }
    };
    auto go_up = [&] {
      while (cur > 0) {
        const std::size_t size = swap_adjacent(cur - 1);
        ++report.swaps;
        --cur;
        if (size < best) {
          best = size;
          best_level = cur;
        }
        if (static_cast<double>(size) > limit_factor * static_cast<double>(best))
          break;
      }
    };
    if (cur > n / 2) {
      go_down();
      go_up();
    } else {
      go_up();
      go_down();
    }
    while (cur < best_level) {
      swap_adjacent(cur);
      ++report.swaps;
      ++cur;
    }
    while (cur > best_level) {
      swap_adjacent(cur - 1);
      ++report.swaps;
      --cur;
    }
  }
  report.nodes_after = table_nodes_;
  return report;
}

ReorderReport Manager::anneal() {
  ReorderReport report;
  report.nodes_before = table_nodes_;
  const auto n = static_cast<std::uint32_t>(var_count());
  const std::size_t iterations =
      config_.anneal_iterations ? config_.anneal_iterations
                                : std::size_t{8} * n * n;
  std::mt19937_64 rng(config_.anneal_seed);
  std::uniform_int_distribution<std::uint32_t> pick(0, n - 2);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  const double scale = std::max<double>(1.0, static_cast<double>(table_nodes_));
  double temperature = config_.anneal_initial_temp;
  std::size_t current = table_nodes_;
  std::size_t best = current;
  std::vector<VarId> best_order = level2var_;

  for (std::size_t it = 0; it < iterations; ++it) {
    const std::uint32_t lvl = pick(rng);
    const std::size_t size = swap_adjacent(lvl);
    ++report.swaps;
    const double delta =
        static_cast<double>(size) - static_cast<double>(current);
    const bool accept =
        delta <= 0.0 ||
        (temperature > 0.0 && coin(rng) < std::exp(-delta / (temperature * scale)));
    if (accept) {
      current = size;
      if (current < best) {
        best = current;
        best_order = level2var_;
      }
    } else {
      swap_adjacent(lvl);
      ++report.swaps;
    }
    temperature *= config_.anneal_cooling;
  }
  for (std::uint32_t p = 0; p < n; ++p) {
    std::uint32_t cur = var2level_[best_order[p]];
    while (cur > p) {
      swap_adjacent(cur - 1);
      ++report.swaps;
      --cur;
    }
  }
  report.nodes_after = table_nodes_;
  return report;
}

} // namespace refsyn::bdd
