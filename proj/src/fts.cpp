#include "refsyn/fts.hpp"

#include "refsyn/error.hpp"

#include <algorithm>

namespace refsyn {

std::string to_string(Quant q) {
  auto s = [](bdd::Quantifier k) {
    return k == bdd::Quantifier::Exists ? "exists" : "forall";
  };
  return std::string("(") + s(q.actions) + "," + s(q.successors) + ")";
}

// ---------------------------------------------------------------------------
// ListRep

std::uint64_t ListRep::key(const Transition &t) {
  if (t.from >= (1u << 24) || t.to >= (1u << 24) || t.action >= (1u << 16))
    throw UsageError("transition ids exceed the supported range");
  return (std::uint64_t{t.from} << 40) | (std::uint64_t{t.action} << 24) |
         t.to;
}

void ListRep::set_shape(std::size_t state_bound, std::size_t n_actions) {
  if (n_actions != n_actions_) {
    n_actions_ = n_actions;
    index_.clear();
    dirty_.clear();
    dirty_list_.clear();
  }
  const std::size_t old = index_.size();
  index_.resize(state_bound);
  for (std::size_t q = old; q < state_bound; ++q)
    index_[q].assign(n_actions_, {});
  dirty_.resize(state_bound, 0);
  std::erase_if(dirty_list_, [&](StateId q) { return q >= state_bound; });
  state_bound_ = state_bound;
}

void ListRep::mark_dirty(StateId q) {
  if (q < dirty_.size() && !dirty_[q]) {
    dirty_[q] = 1;
    dirty_list_.push_back(q);
  }
}

bool ListRep::insert(const Transition &t) {
  const auto k = key(t);
  if (position_.contains(k))
    return false;
  position_.emplace(k, triples_.size());
  triples_.push_back(t);
  mark_dirty(t.from);
  return true;
}

bool ListRep::erase(const Transition &tr) {
  const Transition t = tr;
  const auto it = position_.find(key(t));
  if (it == position_.end())
    return false;
  const std::size_t pos = it->second;
  position_.erase(it);
  if (pos + 1 != triples_.size()) {
    triples_[pos] = triples_.back();
    position_[key(triples_[pos])] = pos;
  }
  triples_.pop_back();
  mark_dirty(t.from);
  return true;
}

std::size_t ListRep::erase_incident(StateId q) {
  std::size_t removed = 0;
  std::size_t w = 0;
  for (std::size_t r = 0; r < triples_.size(); ++r) {
    const Transition t = triples_[r];
    if (t.from == q || t.to == q) {
      position_.erase(key(t));
      mark_dirty(t.from);
      ++removed;
      continue;
    }
    if (w != r) {
      triples_[w] = t;
      position_[key(t)] = w;
    }
    ++w;
  }
  triples_.resize(w);
  return removed;
}

bool ListRep::contains(const Transition &t) const {
  return position_.contains(key(t));
}

void ListRep::refresh_index() const {
  if (dirty_list_.empty())
    return;
  for (StateId q : dirty_list_)
    for (auto &succ : index_[q])
      succ.clear();
  for (const auto &t : triples_)
    if (dirty_[t.from])
      index_[t.from][t.action].push_back(t.to);
  for (StateId q : dirty_list_)
    dirty_[q] = 0;
  dirty_list_.clear();
}

std::span<const StateId> ListRep::successors(StateId q, ActionId u) const {
  if (q >= index_.size() || u >= n_actions_)
    throw UsageError("successors: id out of range");
  refresh_index();
  return index_[q][u];
}

// ---------------------------------------------------------------------------
// Fts

Fts::Fts(std::size_t n_actions) : n_actions_(n_actions) {
  if (n_actions == 0)
    throw UsageError("an Fts needs at least one action");
  list_.set_shape(0, n_actions_);
}

Fts::Fts(Fts &&) noexcept = default;
Fts &Fts::operator=(Fts &&) noexcept = default;
Fts::~Fts() = default;

Fts Fts::copy_explicit() const {
  Fts out(n_actions_);
  out.live_ = live_;
  out.live_count_ = live_count_;
  out.list_ = list_;
  out.labels_ = labels_;
  return out;
}

void Fts::require_live(StateId q, const char *what) const {
  if (!is_live(q))
    throw UsageError(std::string(what) + ": state " + std::to_string(q) +
                     " is not live");
}

void Fts::grow_bound(std::size_t bound) {
  live_.resize(bound);
  for (auto &[_, set] : labels_)
    set.resize(bound);
  list_.set_shape(bound, n_actions_);
}

StateId Fts::add_state() {
  const auto q = static_cast<StateId>(state_bound());
  grow_bound(q + 1);
  live_.set(q);
  ++live_count_;
  if (sym_)
    sym_->add_state(q);
  return q;
}

StateId Fts::split_state(StateId q) {
  require_live(q, "split_state");
  remove_incident(q);
  const auto child = static_cast<StateId>(state_bound());
  grow_bound(child + 1);
  live_.set(child);
  ++live_count_;
  if (sym_)
    sym_->split_state(q, child);
  return child;
}

void Fts::remove_state(StateId q) {
  require_live(q, "remove_state");
  remove_incident(q);
  live_.reset(q);
  --live_count_;
  for (auto &[_, set] : labels_)
    set.reset(q);
  if (sym_)
    sym_->remove_state(q);
  if (q + 1 == state_bound())
    grow_bound(q);
}

bool Fts::add_transition(const Transition &t) {
  require_live(t.from, "add_transition");
  require_live(t.to, "add_transition");
  if (t.action >= n_actions_)
    throw UsageError("add_transition: action " + std::to_string(t.action) +
                     " out of range");
  if (!list_.insert(t))
    return false;
  if (sym_)
    sym_->add_transition(t);
  return true;
}

bool Fts::remove_transition(const Transition &tr) {
  const Transition t = tr; // tr may alias an element of the list
  if (!list_.erase(t))
    return false;
  if (sym_)
    sym_->remove_transition(t);
  return true;
}

std::size_t Fts::remove_incident(StateId q) {
  require_live(q, "remove_incident");
  const std::size_t n = list_.erase_incident(q);
  if (sym_ && n > 0)
    sym_->remove_incident(q);
  return n;
}

void Fts::define_label(const std::string &prop) {
  labels_.try_emplace(prop, Bitset(state_bound()));
}

void Fts::set_label(const std::string &prop, StateId q, bool value) {
  require_live(q, "set_label");
  auto it = labels_.try_emplace(prop, Bitset(state_bound())).first;
  it->second.assign(q, value);
}

bool Fts::has_label(const std::string &prop) const {
  return labels_.contains(prop);
}

const Bitset &Fts::label(const std::string &prop) const {
  const auto it = labels_.find(prop);
  if (it == labels_.end())
    throw UsageError("unknown proposition '" + prop + "'");
  return it->second;
}

std::vector<std::string> Fts::propositions() const {
  std::vector<std::string> out;
  for (const auto &[name, _] : labels_)
    out.push_back(name);
  return out;
}

void Fts::attach_symbolic(EncodingKind kind, bdd::ManagerConfig config) {
  auto enc = make_encoding(kind);
  live_.for_each([&](StateId q) { enc->add_state(q); });
  auto sym = std::make_unique<SymbolicRep>(std::move(enc), n_actions_, config);
  sym->include_states(live_.to_ids());
  sym->add_transitions(list_.triples());
  sym_ = std::move(sym);
}

void Fts::detach_symbolic() { sym_.reset(); }

SymbolicRep &Fts::symbolic() {
  if (!sym_)
    throw UsageError("Fts has no symbolic representation attached");
  return *sym_;
}

const SymbolicRep &Fts::symbolic() const {
  if (!sym_)
    throw UsageError("Fts has no symbolic representation attached");
  return *sym_;
}

Bitset Fts::list_pre(const Bitset &x, Quant quant, ActionScope scope) const {
  if (x.universe() != state_bound())
    throw UsageError("list_pre: set universe does not match the Fts");
  const std::size_t bound = state_bound();
  const bool all_scope =
      scope == ActionScope::All && quant.actions == bdd::Quantifier::Forall;

  // step 1: one pass over the list collects C = pre_{exists,exists}(X)
  Bitset c(bound);
  for (const auto &t : list_.triples())
    if (x.test(t.to))
      c.set(t.from);
  list_.count_touch(list_.size());
  if (quant == kExistsExists)
    return c;

  // (forall, forall) over all of U admits states outside C (vacuous ones)
  const Bitset &candidates =
      (all_scope && quant.successors == bdd::Quantifier::Forall) ? live_ : c;

  Bitset result(bound);
  candidates.for_each([&](StateId q) {
    bool any_ok = false;
    bool all_ok = true;
    bool any_enabled = false;
    for (ActionId u = 0; u < n_actions_; ++u) {
      const auto succ = list_.successors(q, u);
      if (succ.empty()) {
        // a disabled action only matters for universal action scope
        if (all_scope && quant.successors == bdd::Quantifier::Exists)
          all_ok = false;
        continue;
      }
      any_enabled = true;
      list_.count_touch(succ.size());
      bool ok;
      if (quant.successors == bdd::Quantifier::Forall)
        ok = std::all_of(succ.begin(), succ.end(),
                         [&](StateId s) { return x.test(s); });
      else
        ok = std::any_of(succ.begin(), succ.end(),
                         [&](StateId s) { return x.test(s); });
      any_ok = any_ok || ok;
      all_ok = all_ok && ok;
      if (quant.actions == bdd::Quantifier::Exists && ok)
        break;
      if (quant.actions == bdd::Quantifier::Forall && !ok)
        break;
    }
    bool member;
    if (quant.actions == bdd::Quantifier::Exists)
      member = any_ok;
    else if (all_scope)
      member = all_ok;
    else
      member = any_enabled && all_ok;
    if (member)
      result.set(q);
  });
  return result;
}

bool operator==(const Fts &a, const Fts &b) {
  if (a.n_actions_ != b.n_actions_ || !(a.live_ == b.live_) ||
      a.list_.size() != b.list_.size())
    return false;
  for (const auto &t : a.list_.triples())
    if (!b.list_.contains(t))
      return false;
  // labels with no members are equivalent to absent ones
  auto nonempty = [](const std::map<std::string, Bitset> &m) {
    std::map<std::string, std::vector<std::uint32_t>> out;
    for (const auto &[k, v] : m)
      if (!v.none())
        out.emplace(k, v.to_ids());
    return out;
  };
  return nonempty(a.labels_) == nonempty(b.labels_);
}

} // namespace refsyn
