#include "refsyn/error.hpp"
#include "refsyn/fts.hpp"

#include <algorithm>

namespace refsyn {

using bdd::Bdd;

SymbolicRep::SymbolicRep(std::unique_ptr<StateEncoding> encoding,
                         std::size_t n_actions, bdd::ManagerConfig config)
    : manager_(std::make_unique<bdd::Manager>(config)),
      encoding_(std::move(encoding)), n_actions_(n_actions) {
  if (!encoding_)
    throw UsageError("SymbolicRep needs an encoding");
  create_initial_vars();
}

void SymbolicRep::create_initial_vars() {
  auto &m = *manager_;
  // from/to bits interleaved, then the action bits
  for (std::size_t i = 0; i < encoding_->width(); ++i) {
    from_.vars.push_back(m.new_var());
    to_.vars.push_back(m.new_var());
  }
  const std::size_t action_bits = log_width(n_actions_);
  for (std::size_t i = 0; i < action_bits; ++i)
    act_.vars.push_back(m.new_var());

  actions_dom_ = m.constant(false);
  for (ActionId u = 0; u < n_actions_; ++u)
    actions_dom_ |= action(u);
  trans_ = m.constant(false);
  states_ = m.constant(false);
}

void SymbolicRep::include_states(std::span<const StateId> live) {
  for (StateId q : live)
    states_ |= state(q);
}

const VarGroup &SymbolicRep::group(VarRole role) const {
  switch (role) {
  case VarRole::StateFrom:
    return from_;
  case VarRole::StateTo:
    return to_;
  default:
    return act_;
  }
}

void SymbolicRep::widen(const Widening &w) {
  auto &m = *manager_;
  const bdd::VarId zf = m.new_var();
  const bdd::VarId zt = m.new_var();
  from_.vars.insert(from_.vars.begin() + static_cast<std::ptrdiff_t>(w.position),
                    zf);
  to_.vars.insert(to_.vars.begin() + static_cast<std::ptrdiff_t>(w.position), zt);
  trans_ &= m.nvar(zf) & m.nvar(zt);
  states_ &= m.nvar(zf);
  enabled_valid_ = false;
}

const Bdd &SymbolicRep::enabled() {
  if (!enabled_valid_) {
    enabled_ = manager_->exists(to_.vars, trans_);
    enabled_valid_ = true;
  }
  return enabled_;
}

Bdd SymbolicRep::state(StateId q, VarRole role) {
  if (role == VarRole::Action)
    throw UsageError("state(): action group is not a state group");
  return state_to_bdd(*manager_, encoding_->encode(q), group(role));
}

Bdd SymbolicRep::action(ActionId u) {
  if (u >= n_actions_)
    throw UsageError("action id " + std::to_string(u) + " out of range");
  return state_to_bdd(*manager_, log_encode(u + 1, act_.vars.size()), act_);
}

Bdd SymbolicRep::transition(const Transition &t) {
  return state(t.from, VarRole::StateFrom) & action(t.action) &
         state(t.to, VarRole::StateTo);
}

Bdd SymbolicRep::set(const Bitset &states, VarRole role) {
  Bdd acc = manager_->constant(false);
  states.for_each([&](StateId q) { acc |= state(q, role); });
  return acc;
}

Bitset SymbolicRep::to_bitset(const Bdd &a, std::size_t state_bound) {
  Bitset out(state_bound);
  BitVec bits;
  manager_->for_each_sat(a, from_.vars, [&](std::span<const std::uint8_t> row) {
    bits.bits.assign(row.begin(), row.end());
    const auto q = encoding_->decode(bits);
    if (!q || *q >= state_bound)
      throw UsageError("to_bitset: assignment " + bits.str() +
                       " encodes no live state");
    out.set(*q);
  });
  return out;
}

Bdd SymbolicRep::rename(const Bdd &a, VarRole from, VarRole to) {
  return manager_->rename(a, group(from).vars, group(to).vars);
}

Bdd SymbolicRep::pre(const Bdd &x, Quant quant, ActionScope scope) {
  auto &m = *manager_;
  {
    const auto sup = m.support(x);
    for (bdd::VarId v : sup)
      if (std::find(from_.vars.begin(), from_.vars.end(), v) == from_.vars.end())
        throw UsageError("pre: target set depends on a non-state variable");
  }
  const Bdd xp = rename(x, VarRole::StateFrom, VarRole::StateTo);
  const Bdd &t = trans_;
  const bool forall_actions = quant.actions == bdd::Quantifier::Forall;
  const bool all_scope = forall_actions && scope == ActionScope::All;

  if (quant == kExistsExists) {
    std::vector<bdd::VarId> qv = to_.vars;
    qv.insert(qv.end(), act_.vars.begin(), act_.vars.end());
    return m.and_exists(t, xp, qv);
  }

  if (quant.successors == bdd::Quantifier::Forall) {
    // (q, u) pairs with some successor outside X
    const Bdd bad = m.and_exists(t, ~xp, to_.vars);
    if (!forall_actions)
      return m.exists(act_.vars, enabled() & ~bad);
    const Bdd no_bad = ~m.exists(act_.vars, bad);
    if (all_scope)
      return states_ & no_bad;
    return m.exists(act_.vars, enabled()) & no_bad;
  }

  // forall actions, exists successor
  const Bdd some = m.and_exists(t, xp, to_.vars);
  if (all_scope)
    return states_ & ~m.exists(act_.vars, actions_dom_ & ~some);
  return m.exists(act_.vars, enabled()) &
         ~m.exists(act_.vars, enabled() & ~some);
}

Bdd SymbolicRep::pre_to(const Bdd &x_to, Quant quant, ActionScope scope) {
  for (bdd::VarId v : manager_->support(x_to))
    if (std::find(to_.vars.begin(), to_.vars.end(), v) == to_.vars.end())
      throw UsageError("pre_to: target set depends on a non-successor variable");
  return pre(rename(x_to, VarRole::StateTo, VarRole::StateFrom), quant, scope);
}

void SymbolicRep::add_state(StateId q) {
  if (auto w = encoding_->add_state(q))
    widen(*w);
  states_ |= state(q);
}

void SymbolicRep::split_state(StateId parent, StateId child) {
  if (auto w = encoding_->split(parent, child))
    widen(*w);
  states_ |= state(child);
}

void SymbolicRep::remove_state(StateId q) {
  states_ &= ~state(q);
  encoding_->remove_state(q);
}

void SymbolicRep::add_transition(const Transition &t) {
  trans_ |= transition(t);
  enabled_valid_ = false;
}

void SymbolicRep::add_transitions(std::span<const Transition> ts) {
  for (const auto &t : ts)
    trans_ |= transition(t);
  enabled_valid_ = false;
}

void SymbolicRep::remove_transition(const Transition &t) {
  trans_ &= ~transition(t);
  enabled_valid_ = false;
}

void SymbolicRep::remove_incident(StateId q) {
  trans_ &= ~state(q, VarRole::StateFrom);
  trans_ &= ~state(q, VarRole::StateTo);
  enabled_valid_ = false;
}

} // namespace refsyn
