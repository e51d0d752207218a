#pragma once

/// @file bdd.hpp
/// @brief Reduced ordered binary decision diagrams without complement edges.
///
/// A Manager owns every node. Bdd handles are reference-counted roots into
/// one manager; two handles of the same manager denote the same boolean
/// function iff their root ids are equal. The manager (and all of its
/// handles) form one single-threaded unit. Independent managers may be used
/// from different threads.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace refsyn::bdd {

using VarId = std::uint32_t;
using NodeId = std::uint32_t;

inline constexpr NodeId kFalseNode = 0;
inline constexpr NodeId kTrueNode = 1;

enum class BoolOp : std::uint8_t { And, Or, Xor };
enum class Quantifier : std::uint8_t { Exists, Forall };
enum class ReorderMethod : std::uint8_t { Sift, Anneal };

struct ManagerConfig {
  /// log2 of the number of direct-mapped operation cache slots.
  unsigned cache_log2 = 18;
  /// A sweep runs at the start of a public operation once the unique table
  /// holds more than this many nodes (live or dead). After a sweep the
  /// threshold becomes max(gc_threshold, 2 * survivors).
  std::size_t gc_threshold = std::size_t{1} << 18;
  /// Sifting stops moving a variable in one direction once the table grows
  /// beyond this factor of the best size seen.
  double sift_max_growth = 1.2;
  /// Annealing: temperature is expressed as a fraction of the starting
  /// node count, so a move growing the table by delta nodes is accepted
  /// with probability exp(-delta / (temperature * start_size)).
  double anneal_initial_temp = 0.05;
  double anneal_cooling = 0.995;
  /// Number of adjacent-swap proposals; 0 means 8 * n_vars^2.
  std::size_t anneal_iterations = 0;
  std::uint64_t anneal_seed = 0x5eed;
};

struct ReorderReport {
  std::size_t nodes_before = 0;
  std::size_t nodes_after = 0;
  std::size_t swaps = 0;
  double millis = 0.0;
};

struct ManagerStats {
  std::size_t cache_lookups = 0;
  std::size_t cache_hits = 0;
  std::size_t gc_runs = 0;
  std::size_t nodes_freed = 0;
  std::size_t peak_table_nodes = 0;
};

class Manager;

/// Reference-counted handle to a node of a Manager. A default-constructed
/// handle is empty and belongs to no manager.
class Bdd {
public:
  Bdd() noexcept = default;
  Bdd(const Bdd &other) noexcept;
  Bdd(Bdd &&other) noexcept;
  Bdd &operator=(const Bdd &other) noexcept;
  Bdd &operator=(Bdd &&other) noexcept;
  ~Bdd();

  Manager *manager() const noexcept { return mgr_; }
  NodeId id() const noexcept { return root_; }
  bool empty() const noexcept { return mgr_ == nullptr; }
  bool is_false() const noexcept { return mgr_ && root_ == kFalseNode; }
  bool is_true() const noexcept { return mgr_ && root_ == kTrueNode; }
  bool is_constant() const noexcept { return mgr_ && root_ <= kTrueNode; }

  Bdd operator~() const;
  Bdd operator&(const Bdd &o) const;
  Bdd operator|(const Bdd &o) const;
  Bdd operator^(const Bdd &o) const;
  Bdd &operator&=(const Bdd &o);
  Bdd &operator|=(const Bdd &o);
  Bdd &operator^=(const Bdd &o);

  friend bool operator==(const Bdd &a, const Bdd &b) noexcept {
    return a.mgr_ == b.mgr_ && a.root_ == b.root_;
  }

private:
  friend class Manager;
  Bdd(Manager *mgr, NodeId root) noexcept; // takes a new reference

  Manager *mgr_ = nullptr;
  NodeId root_ = kFalseNode;
};

class Manager {
public:
  explicit Manager(ManagerConfig config = {});
  Manager(const Manager &) = delete;
  Manager &operator=(const Manager &) = delete;
  ~Manager();

  const ManagerConfig &config() const { return config_; }

  // -- variables and order ---------------------------------------------

  /// Declares a variable, placed at the bottom of the current order.
  VarId new_var();
  std::size_t var_count() const { return var2level_.size(); }
  std::uint32_t level_of(VarId v) const;
  VarId var_at_level(std::uint32_t level) const;
  /// Current order, level 0 first.
  std::vector<VarId> order() const { return level2var_; }
  /// Rearranges the order to `target` (a permutation of all variables)
  /// with adjacent swaps. Every live Bdd keeps its meaning.
  void set_order(std::span<const VarId> target);

  // -- construction ----------------------------------------------------

  Bdd constant(bool value);
  Bdd var(VarId v);
  Bdd nvar(VarId v);
  /// Conjunction of literals: vars[i] positive iff bits[i] != 0.
  Bdd cube(std::span<const VarId> vars, std::span<const std::uint8_t> bits);
  /// Conjunction of positive literals, used as a quantification set.
  Bdd var_set(std::span<const VarId> vars);

  // -- operations ------------------------------------------------------

  Bdd apply(BoolOp op, const Bdd &a, const Bdd &b);
  Bdd negate(const Bdd &a);
  Bdd ite(const Bdd &f, const Bdd &g, const Bdd &h);
  Bdd cofactor(const Bdd &a, VarId v, bool value);
  Bdd quantify(Quantifier kind, std::span<const VarId> vars, const Bdd &a);
  Bdd exists(std::span<const VarId> vars, const Bdd &a) {
    return quantify(Quantifier::Exists, vars, a);
  }
  Bdd forall(std::span<const VarId> vars, const Bdd &a) {
    return quantify(Quantifier::Forall, vars, a);
  }
  /// Relational product: exists vars . (a and b), without building a and b.
  Bdd and_exists(const Bdd &a, const Bdd &b, std::span<const VarId> vars);
  /// Substitutes to[i] for from[i] simultaneously. Both lists must have
  /// equal length; every variable may appear at most once in each list.
  Bdd rename(const Bdd &a, std::span<const VarId> from,
             std::span<const VarId> to);

  // -- inspection ------------------------------------------------------

  /// Nodes reachable from the root, terminals included.
  std::size_t node_count(const Bdd &a) const;
  /// Live nodes in the manager; runs a sweep first so the count is exact.
  std::size_t total_nodes();
  /// Nodes currently held in the unique table, including unswept dead ones.
  std::size_t table_nodes() const { return table_nodes_; }
  std::vector<VarId> support(const Bdd &a) const;
  /// `assignment[v]` is the value of variable v.
  bool eval(const Bdd &a, std::span<const std::uint8_t> assignment) const;
  /// Calls `visit` once per satisfying assignment of `a` restricted to
  /// `support`; the span passed holds one bit per support entry, in the
  /// order given. Throws UsageError if `a` depends on a variable outside
  /// `support`.
  void for_each_sat(
      const Bdd &a, std::span<const VarId> support,
      const std::function<void(std::span<const std::uint8_t>)> &visit) const;
  std::vector<std::vector<std::uint8_t>>
  sat_all(const Bdd &a, std::span<const VarId> support) const;
  double sat_count(const Bdd &a, std::span<const VarId> support) const;

  // -- maintenance -----------------------------------------------------

  ReorderReport reorder(ReorderMethod method);
  void collect_garbage();
  /// Verifies reduction, ordering, uniqueness and reference counts of the
  /// whole table. Throws std::logic_error on the first violation.
  void check_invariants() const;
  const ManagerStats &stats() const { return stats_; }

private:
  friend class Bdd;

  struct Node {
    VarId var;
    NodeId lo;
    NodeId hi;
    std::uint32_t ref;
    NodeId next; // unique-table chain
  };

  struct Subtable {
    std::vector<NodeId> buckets;
    std::size_t keys = 0;
  };

  struct CacheEntry {
    std::uint32_t op;
    NodeId a;
    NodeId b;
    NodeId c;
    NodeId result;
  };

  enum class Op : std::uint32_t {
    And = 1, Or, Xor, Not, Ite, Restrict, Exists, Forall, AndExists, Permute
  };

  static constexpr VarId kTerminalVar = 0xffffffffu;
  static constexpr VarId kFreeVar = 0xfffffffeu;
  static constexpr NodeId kNil = 0xffffffffu;
  static constexpr std::uint32_t kTerminalLevel = 0xffffffffu;

  // handle reference counting
  void ref(NodeId n) noexcept {
    if (n > kTrueNode)
      ++nodes_[n].ref;
  }
  void deref(NodeId n) noexcept {
    if (n > kTrueNode)
      --nodes_[n].ref;
  }
  void deref_eager(NodeId n);
  Bdd wrap(NodeId n) { return Bdd(this, n); }
  void require_own(const Bdd &a) const;

  std::uint32_t level(NodeId n) const {
    return n <= kTrueNode ? kTerminalLevel : var2level_[nodes_[n].var];
  }

  NodeId mk(VarId v, NodeId lo, NodeId hi);
  NodeId allocate_node();
  void subtable_insert(Subtable &t, NodeId n);
  void subtable_erase(Subtable &t, NodeId n);
  void subtable_grow(Subtable &t);
  static std::size_t node_hash(NodeId lo, NodeId hi) noexcept;
  void maybe_gc();

  bool cache_find(Op op, NodeId a, NodeId b, NodeId c, NodeId &out);
  void cache_put(Op op, NodeId a, NodeId b, NodeId c, NodeId result);
  void cache_clear();

  NodeId apply_rec(Op op, NodeId f, NodeId g);
  NodeId not_rec(NodeId f);
  NodeId ite_rec(NodeId f, NodeId g, NodeId h);
  NodeId restrict_rec(NodeId f, VarId v, bool value);
  NodeId quant_rec(Op op, NodeId f, NodeId cube);
  NodeId and_exists_rec(NodeId f, NodeId g, NodeId cube);
  NodeId permute_rec(NodeId f, std::uint32_t perm_id);
  NodeId var_set_node(std::span<const VarId> vars);

  // reordering (bdd_reorder.cpp)
  std::size_t swap_adjacent(std::uint32_t level);
  ReorderReport sift();
  ReorderReport anneal();
  std::vector<NodeId> subtable_nodes(const Subtable &t) const;

  ManagerConfig config_;
  std::vector<Node> nodes_;
  std::vector<NodeId> free_list_;
  std::vector<Subtable> subtables_;
  std::vector<std::uint32_t> var2level_;
  std::vector<VarId> level2var_;
  std::vector<CacheEntry> cache_;
  std::vector<std::vector<VarId>> perms_;
  std::size_t table_nodes_ = 0;
  std::size_t gc_limit_ = 0;
  ManagerStats stats_;
};

} // namespace refsyn::bdd
