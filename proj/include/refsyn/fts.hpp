#pragma once

// Finite transition systems (Q, U, ->, L) with an explicit transition list
// that is always present and an optional symbolic BDD relation kept in sync.

#include "refsyn/bdd.hpp"
#include "refsyn/bitset.hpp"
#include "refsyn/encoding.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace refsyn {

struct Transition {
  StateId from;
  ActionId action;
  StateId to;
  friend auto operator<=>(const Transition &, const Transition &) = default;
};

/// Quantifier pair of a controllable predecessor: `actions` ranges over the
/// controller's choices, `successors` over the nondeterministic outcomes.
struct Quant {
  bdd::Quantifier actions;
  bdd::Quantifier successors;
  friend bool operator==(const Quant &, const Quant &) = default;
};

inline constexpr Quant kExistsExists{bdd::Quantifier::Exists,
                                     bdd::Quantifier::Exists};
inline constexpr Quant kExistsForall{bdd::Quantifier::Exists,
                                     bdd::Quantifier::Forall};
inline constexpr Quant kForallForall{bdd::Quantifier::Forall,
                                     bdd::Quantifier::Forall};
inline constexpr Quant kForallExists{bdd::Quantifier::Forall,
                                     bdd::Quantifier::Exists};

std::string to_string(Quant q);

/// Range of a universal action quantifier. `Enabled`: only actions with at
/// least one outgoing transition from the state, and the state needs one.
/// `All`: every action of U, disabled ones satisfying (forall, forall)
/// vacuously and failing (forall, exists).
enum class ActionScope { Enabled, All };

/// COO transition list with a lazily built per-(state, action) successor
/// index. Edits invalidate the index of the source state only.
class ListRep {
public:
  bool insert(const Transition &t);
  bool erase(const Transition &t);
  /// Removes every transition into or out of q; returns how many.
  std::size_t erase_incident(StateId q);
  bool contains(const Transition &t) const;

  const std::vector<Transition> &triples() const { return triples_; }
  std::size_t size() const { return triples_.size(); }

  /// Successors of (q, u). Rebuilds stale parts of the index first.
  std::span<const StateId> successors(StateId q, ActionId u) const;
  void set_shape(std::size_t state_bound, std::size_t n_actions);

  /// Number of triples read by pre computations (index rebuilds excluded).
  std::size_t touched() const { return touched_; }
  void reset_touched() const { touched_ = 0; }
  void count_touch(std::size_t n) const { touched_ += n; }

private:
  static std::uint64_t key(const Transition &t);
  void mark_dirty(StateId q);
  void refresh_index() const;

  std::vector<Transition> triples_;
  std::unordered_map<std::uint64_t, std::size_t> position_;
  std::size_t state_bound_ = 0;
  std::size_t n_actions_ = 0;

  mutable std::vector<std::vector<std::vector<StateId>>> index_;
  mutable std::vector<std::uint8_t> dirty_;
  mutable std::vector<StateId> dirty_list_;
  mutable std::size_t touched_ = 0;
};

/// Symbolic view: B_T over (from, action, to) variables plus the domain
/// functions B_Q and B_U. Owns its BDD manager.
class SymbolicRep {
public:
  SymbolicRep(std::unique_ptr<StateEncoding> encoding, std::size_t n_actions,
              bdd::ManagerConfig config);
  SymbolicRep(const SymbolicRep &) = delete;
  SymbolicRep &operator=(const SymbolicRep &) = delete;

  bdd::Manager &manager() { return *manager_; }
  const StateEncoding &encoding() const { return *encoding_; }
  const VarGroup &group(VarRole role) const;
  std::size_t var_count() const { return manager_->var_count(); }

  const bdd::Bdd &transitions() const { return trans_; }
  const bdd::Bdd &states() const { return states_; }
  const bdd::Bdd &action_domain() const { return actions_dom_; }
  /// Pairs (q, u) with at least one successor.
  const bdd::Bdd &enabled();

  bdd::Bdd state(StateId q, VarRole role = VarRole::StateFrom);
  bdd::Bdd action(ActionId u);
  bdd::Bdd transition(const Transition &t);
  bdd::Bdd set(const Bitset &states, VarRole role = VarRole::StateFrom);
  /// Decodes a function over the from-variables into explicit states.
  Bitset to_bitset(const bdd::Bdd &a, std::size_t state_bound);
  bdd::Bdd rename(const bdd::Bdd &a, VarRole from, VarRole to);

  /// Controllable predecessor of a set given over the from-variables.
  bdd::Bdd pre(const bdd::Bdd &x, Quant quant,
               ActionScope scope = ActionScope::Enabled);
  /// Same operator taking the target set over the to-variables.
  bdd::Bdd pre_to(const bdd::Bdd &x_to, Quant quant,
                  ActionScope scope = ActionScope::Enabled);

  // edits; Fts keeps the explicit and symbolic views consistent
  void add_state(StateId q);
  void split_state(StateId parent, StateId child);
  void remove_state(StateId q);
  void add_transition(const Transition &t);
  void remove_transition(const Transition &t);
  void add_transitions(std::span<const Transition> ts);
  void remove_incident(StateId q);

private:
  friend class Fts;
  void create_initial_vars();
  void include_states(std::span<const StateId> live);
  void widen(const Widening &w);

  // manager first: destroyed after every handle below
  std::unique_ptr<bdd::Manager> manager_;
  std::unique_ptr<StateEncoding> encoding_;
  std::size_t n_actions_;
  VarGroup from_{VarRole::StateFrom, {}};
  VarGroup to_{VarRole::StateTo, {}};
  VarGroup act_{VarRole::Action, {}};
  bdd::Bdd trans_;
  bdd::Bdd states_;
  bdd::Bdd actions_dom_;
  bdd::Bdd enabled_;
  bool enabled_valid_ = false;
};

class Fts {
public:
  explicit Fts(std::size_t n_actions = 1);
  Fts(Fts &&) noexcept;
  Fts &operator=(Fts &&) noexcept;
  ~Fts();

  /// Deep copy of states, transitions and labels (no symbolic view).
  Fts copy_explicit() const;

  std::size_t action_count() const { return n_actions_; }
  /// Exclusive upper bound of state ids; the universe of state Bitsets.
  std::size_t state_bound() const { return live_.universe(); }
  std::size_t state_count() const { return live_count_; }
  bool is_live(StateId q) const { return q < state_bound() && live_.test(q); }
  const Bitset &live_states() const { return live_; }

  StateId add_state();
  /// Adds a child of q (which keeps its id) and drops the transitions
  /// incident to q. Labels of q stay; the child starts unlabelled.
  StateId split_state(StateId q);
  /// Removes q with its transitions and labels. Removing the highest id
  /// shrinks state_bound().
  void remove_state(StateId q);

  bool add_transition(const Transition &t);
  bool remove_transition(const Transition &t);
  std::size_t remove_incident(StateId q);
  std::size_t transition_count() const { return list_.size(); }
  const ListRep &list() const { return list_; }

  void define_label(const std::string &prop);
  void set_label(const std::string &prop, StateId q, bool value = true);
  bool has_label(const std::string &prop) const;
  const Bitset &label(const std::string &prop) const;
  std::vector<std::string> propositions() const;

  void attach_symbolic(EncodingKind kind, bdd::ManagerConfig config = {});
  void detach_symbolic();
  bool has_symbolic() const { return sym_ != nullptr; }
  SymbolicRep &symbolic();
  const SymbolicRep &symbolic() const;

  /// Explicit controllable predecessor.
  Bitset list_pre(const Bitset &x, Quant quant,
                  ActionScope scope = ActionScope::Enabled) const;

  /// Compares states, actions, transitions and labels.
  friend bool operator==(const Fts &a, const Fts &b);

private:
  void require_live(StateId q, const char *what) const;
  void grow_bound(std::size_t bound);

  std::size_t n_actions_;
  Bitset live_;
  std::size_t live_count_ = 0;
  ListRep list_;
  std::map<std::string, Bitset> labels_;
  std::unique_ptr<SymbolicRep> sym_;
};

/// Text format:
///   fts <state_bound> <n_actions>
///   dead <id>...          (optional, ids below the bound that are absent)
///   <q> <u> <q'>          (one line per transition)
///   label <name>
///   <id>...               (any number of lines)
///   end
/// Lines starting with '#' are comments.
void write_fts(std::ostream &out, const Fts &fts);
Fts read_fts(std::istream &in);

} // namespace refsyn
