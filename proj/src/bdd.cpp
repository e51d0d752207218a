#include "refsyn/bdd.hpp"

#include "refsyn/error.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <utility>

namespace refsyn::bdd {

// ---------------------------------------------------------------------------
// Bdd handle

Bdd::Bdd(Manager *mgr, NodeId root) noexcept : mgr_(mgr), root_(root) {
  mgr_->ref(root_);
}

Bdd::Bdd(const Bdd &other) noexcept : mgr_(other.mgr_), root_(other.root_) {
  if (mgr_)
    mgr_->ref(root_);
}

Bdd::Bdd(Bdd &&other) noexcept : mgr_(other.mgr_), root_(other.root_) {
  other.mgr_ = nullptr;
  other.root_ = kFalseNode;
}

Bdd &Bdd::operator=(const Bdd &other) noexcept {
  if (this != &other) {
    if (other.mgr_)
      other.mgr_->ref(other.root_);
    if (mgr_)
      mgr_->deref(root_);
    mgr_ = other.mgr_;
    root_ = other.root_;
  }
  return *this;
}

Bdd &Bdd::operator=(Bdd &&other) noexcept {
  if (this != &other) {
    if (mgr_)
      mgr_->deref(root_);
    mgr_ = other.mgr_;
    root_ = other.root_;
    other.mgr_ = nullptr;
    other.root_ = kFalseNode;
  }
  return *this;
}

Bdd::~Bdd() {
  if (mgr_)
    mgr_->deref(root_);
}

Bdd Bdd::operator~() const {
  if (!mgr_)
    throw UsageError("negation of an empty Bdd handle");
  return mgr_->negate(*this);
}

Bdd Bdd::operator&(const Bdd &o) const {
  if (!mgr_)
    throw UsageError("operation on an empty Bdd handle");
  return mgr_->apply(BoolOp::And, *this, o);
}

Bdd Bdd::operator|(const Bdd &o) const {
  if (!mgr_)
    throw UsageError("operation on an empty Bdd handle");
  return mgr_->apply(BoolOp::Or, *this, o);
}

Bdd Bdd::operator^(const Bdd &o) const {
  if (!mgr_)
    throw UsageError("operation on an empty Bdd handle");
  return mgr_->apply(BoolOp::Xor, *this, o);
}

Bdd &Bdd::operator&=(const Bdd &o) { return *this = *this & o; }
Bdd &Bdd::operator|=(const Bdd &o) { return *this = *this | o; }
Bdd &Bdd::operator^=(const Bdd &o) { return *this = *this ^ o; }

// ---------------------------------------------------------------------------
// Manager: storage

Manager::Manager(ManagerConfig config)
    : config_(config), cache_(std::size_t{1} << config.cache_log2),
      gc_limit_(config.gc_threshold) {
  nodes_.push_back({kTerminalVar, kFalseNode, kFalseNode, 0, kNil});
  nodes_.push_back({kTerminalVar, kTrueNode, kTrueNode, 0, kNil});
  cache_clear();
}

Manager::~Manager() = default;

std::size_t Manager::node_hash(NodeId lo, NodeId hi) noexcept {
  std::uint64_t h = (static_cast<std::uint64_t>(lo) << 32) | hi;
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  h *= 0xc4ceb9fe1a85ec53ULL;
  h ^= h >> 33;
  return static_cast<std::size_t>(h);
}

void Manager::require_own(const Bdd &a) const {
  if (a.mgr_ != this)
    throw UsageError(a.mgr_ ? "Bdd belongs to a different manager"
                            : "empty Bdd handle");
}

VarId Manager::new_var() {
  const auto v = static_cast<VarId>(var2level_.size());
  var2level_.push_back(static_cast<std::uint32_t>(level2var_.size()));
  level2var_.push_back(v);
  Subtable t;
  t.buckets.assign(16, kNil);
  subtables_.push_back(std::move(t));
  return v;
}

std::uint32_t Manager::level_of(VarId v) const {
  if (v >= var2level_.size())
    throw UsageError("unknown variable " + std::to_string(v));
  return var2level_[v];
}

VarId Manager::var_at_level(std::uint32_t level) const {
  if (level >= level2var_.size())
    throw UsageError("level out of range");
  return level2var_[level];
}

NodeId Manager::allocate_node() {
  if (!free_list_.empty()) {
    const NodeId n = free_list_.back();
    free_list_.pop_back();
    return n;
  }
  nodes_.push_back({kFreeVar, 0, 0, 0, kNil});
  return static_cast<NodeId>(nodes_.size() - 1);
}

void Manager::subtable_grow(Subtable &t) {
  std::vector<NodeId> old = std::move(t.buckets);
  t.buckets.assign(old.size() * 2, kNil);
  const std::size_t mask = t.buckets.size() - 1;
  for (NodeId head : old) {
    for (NodeId n = head; n != kNil;) {
      const NodeId next = nodes_[n].next;
      const std::size_t b = node_hash(nodes_[n].lo, nodes_[n].hi) & mask;
      nodes_[n].next = t.buckets[b];
      t.buckets[b] = n;
      n = next;
    }
  }
}

void Manager::subtable_insert(Subtable &t, NodeId n) {
  if (t.keys >= 2 * t.buckets.size())
    subtable_grow(t);
  const std::size_t b = node_hash(nodes_[n].lo, nodes_[n].hi) &
                        (t.buckets.size() - 1);
  nodes_[n].next = t.buckets[b];
  t.buckets[b] = n;
  ++t.keys;
}

void Manager::subtable_erase(Subtable &t, NodeId n) {
  const std::size_t b = node_hash(nodes_[n].lo, nodes_[n].hi) &
                        (t.buckets.size() - 1);
  NodeId *link = &t.buckets[b];
  while (*link != n) {
    if (*link == kNil)
      throw std::logic_error("bdd: node missing from its unique subtable");
    link = &nodes_[*link].next;
  }
  *link = nodes_[n].next;
  --t.keys;
}

std::vector<NodeId> Manager::subtable_nodes(const Subtable &t) const {
  std::vector<NodeId> out;
  out.reserve(t.keys);
  for (NodeId head : t.buckets)
    for (NodeId n = head; n != kNil; n = nodes_[n].next)
      out.push_back(n);
  return out;
}

NodeId Manager::mk(VarId v, NodeId lo, NodeId hi) {
  if (lo == hi)
    return lo;
  Subtable &t = subtables_[v];
  const std::size_t b = node_hash(lo, hi) & (t.buckets.size() - 1);
  for (NodeId n = t.buckets[b]; n != kNil; n = nodes_[n].next)
    if (nodes_[n].lo == lo && nodes_[n].hi == hi)
      return n;
  const NodeId n = allocate_node();
  nodes_[n] = {v, lo, hi, 0, kNil};
  ref(lo);
  ref(hi);
  subtable_insert(subtables_[v], n);
  ++table_nodes_;
  stats_.peak_table_nodes = std::max(stats_.peak_table_nodes, table_nodes_);
  return n;
}

void Manager::deref_eager(NodeId n) {
  if (n <= kTrueNode)
    return;
  if (--nodes_[n].ref != 0)
    return;
  const Node node = nodes_[n];
  subtable_erase(subtables_[node.var], n);
  nodes_[n].var = kFreeVar;
  free_list_.push_back(n);
  --table_nodes_;
  ++stats_.nodes_freed;
  deref_eager(node.lo);
  deref_eager(node.hi);
}

void Manager::collect_garbage() {
  std::vector<NodeId> work;
  for (NodeId n = 2; n < nodes_.size(); ++n)
    if (nodes_[n].var != kFreeVar && nodes_[n].ref == 0)
      work.push_back(n);
  while (!work.empty()) {
    const NodeId n = work.back();
    work.pop_back();
    const Node node = nodes_[n];
    subtable_erase(subtables_[node.var], n);
    nodes_[n].var = kFreeVar;
    free_list_.push_back(n);
    --table_nodes_;
    ++stats_.nodes_freed;
    for (NodeId c : {node.lo, node.hi})
      if (c > kTrueNode && --nodes_[c].ref == 0)
        work.push_back(c);
  }
  cache_clear();
  ++stats_.gc_runs;
  gc_limit_ = std::max(config_.gc_threshold, 2 * table_nodes_);
}

void Manager::maybe_gc() {
  if (table_nodes_ > gc_limit_)
    collect_garbage();
}

// ---------------------------------------------------------------------------
// operation cache

namespace {

inline std::size_t cache_hash(std::uint32_t op, std::uint32_t a,
                              std::uint32_t b, std::uint32_t c) {
  std::uint64_t h = a * 0x9e3779b97f4a7c15ULL;
  h ^= (static_cast<std::uint64_t>(b) + 0x632be59bd9b4e019ULL) *
       0xbf58476d1ce4e5b9ULL;
  h ^= (static_cast<std::uint64_t>(c) ^ (static_cast<std::uint64_t>(op) << 40)) *
       0x94d049bb133111ebULL;
  h ^= h >> 31;
  return static_cast<std::size_t>(h);
}

} // namespace

bool Manager::cache_find(Op op, NodeId a, NodeId b, NodeId c, NodeId &out) {
  ++stats_.cache_lookups;
  const auto code = static_cast<std::uint32_t>(op);
  const CacheEntry &e =
      cache_[cache_hash(code, a, b, c) & (cache_.size() - 1)];
  if (e.op == code && e.a == a && e.b == b && e.c == c) {
    ++stats_.cache_hits;
    out = e.result;
    return true;
  }
  return false;
}

void Manager::cache_put(Op op, NodeId a, NodeId b, NodeId c, NodeId result) {
  const auto code = static_cast<std::uint32_t>(op);
  cache_[cache_hash(code, a, b, c) & (cache_.size() - 1)] = {code, a, b, c,
                                                             result};
}

void Manager::cache_clear() {
  std::fill(cache_.begin(), cache_.end(), CacheEntry{0, 0, 0, 0, 0});
}

// ---------------------------------------------------------------------------
// recursive kernels. Node fields are copied into locals before recursing
// because mk() may reallocate nodes_.

NodeId Manager::apply_rec(Op op, NodeId f, NodeId g) {
  switch (op) {
  case Op::And:
    if (f == kFalseNode || g == kFalseNode)
      return kFalseNode;
    if (f == kTrueNode || f == g)
      return g;
    if (g == kTrueNode)
      return f;
    break;
  case Op::Or:
    if (f == kTrueNode || g == kTrueNode)
      return kTrueNode;
    if (f == kFalseNode || f == g)
      return g;
    if (g == kFalseNode)
      return f;
    break;
  case Op::Xor:
    if (f == g)
      return kFalseNode;
    if (f == kFalseNode)
      return g;
    if (g == kFalseNode)
      return f;
    if (f == kTrueNode)
      return not_rec(g);
    if (g == kTrueNode)
      return not_rec(f);
    break;
  default:
    throw std::logic_error("apply_rec: not a binary operator");
  }
  if (f > g)
    std::swap(f, g);
  NodeId r;
  if (cache_find(op, f, g, 0, r))
    return r;
  const std::uint32_t lf = level(f), lg = level(g);
  const std::uint32_t top = std::min(lf, lg);
  const VarId v = level2var_[top];
  const NodeId f0 = lf == top ? nodes_[f].lo : f;
  const NodeId f1 = lf == top ? nodes_[f].hi : f;
  const NodeId g0 = lg == top ? nodes_[g].lo : g;
  const NodeId g1 = lg == top ? nodes_[g].hi : g;
  const NodeId r0 = apply_rec(op, f0, g0);
  const NodeId r1 = apply_rec(op, f1, g1);
  r = mk(v, r0, r1);
  cache_put(op, f, g, 0, r);
  return r;
}

NodeId Manager::not_rec(NodeId f) {
  if (f <= kTrueNode)
    return f ^ 1u;
  NodeId r;
  if (cache_find(Op::Not, f, 0, 0, r))
    return r;
  const Node n = nodes_[f];
  const NodeId r0 = not_rec(n.lo);
  const NodeId r1 = not_rec(n.hi);
  r = mk(n.var, r0, r1);
  cache_put(Op::Not, f, 0, 0, r);
  return r;
}

NodeId Manager::ite_rec(NodeId f, NodeId g, NodeId h) {
  if (f == kTrueNode)
    return g;
  if (f == kFalseNode)
    return h;
  if (g == h)
    return g;
  if (f == g)
    g = kTrueNode;
  if (f == h)
    h = kFalseNode;
  if (g == kTrueNode && h == kFalseNode)
    return f;
  if (g == kFalseNode && h == kTrueNode)
    return not_rec(f);
  if (g == kTrueNode)
    return apply_rec(Op::Or, f, h);
  if (h == kFalseNode)
    return apply_rec(Op::And, f, g);
  NodeId r;
  if (cache_find(Op::Ite, f, g, h, r))
    return r;
  const std::uint32_t lf = level(f), lg = level(g), lh = level(h);
  const std::uint32_t top = std::min({lf, lg, lh});
  const VarId v = level2var_[top];
  auto lo_of = [&](NodeId n, std::uint32_t ln) {
    return ln == top ? nodes_[n].lo : n;
  };
  auto hi_of = [&](NodeId n, std::uint32_t ln) {
    return ln == top ? nodes_[n].hi : n;
  };
  const NodeId f0 = lo_of(f, lf), f1 = hi_of(f, lf);
  const NodeId g0 = lo_of(g, lg), g1 = hi_of(g, lg);
  const NodeId h0 = lo_of(h, lh), h1 = hi_of(h, lh);
  const NodeId r0 = ite_rec(f0, g0, h0);
  const NodeId r1 = ite_rec(f1, g1, h1);
  r = mk(v, r0, r1);
  cache_put(Op::Ite, f, g, h, r);
  return r;
}

NodeId Manager::restrict_rec(NodeId f, VarId v, bool value) {
  if (level(f) > var2level_[v])
    return f;
  const Node n = nodes_[f];
  if (n.var == v)
    return value ? n.hi : n.lo;
  NodeId r;
  if (cache_find(Op::Restrict, f, v, value ? 1 : 0, r))
    return r;
  const NodeId r0 = restrict_rec(n.lo, v, value);
  const NodeId r1 = restrict_rec(n.hi, v, value);
  r = mk(n.var, r0, r1);
  cache_put(Op::Restrict, f, v, value ? 1 : 0, r);
  return r;
}

NodeId Manager::quant_rec(Op op, NodeId f, NodeId cube) {
  if (f <= kTrueNode)
    return f;
  const std::uint32_t lf = level(f);
  while (cube != kTrueNode && level(cube) < lf)
    cube = nodes_[cube].hi;
  if (cube == kTrueNode)
    return f;
  NodeId r;
  if (cache_find(op, f, cube, 0, r))
    return r;
  const Node n = nodes_[f];
  const Node c = nodes_[cube];
  if (n.var == c.var) {
    const NodeId r0 = quant_rec(op, n.lo, c.hi);
    if (op == Op::Exists && r0 == kTrueNode) {
      r = kTrueNode;
    } else if (op == Op::Forall && r0 == kFalseNode) {
      r = kFalseNode;
    } else {
      const NodeId r1 = quant_rec(op, n.hi, c.hi);
      r = apply_rec(op == Op::Exists ? Op::Or : Op::And, r0, r1);
    }
  } else {
    const NodeId r0 = quant_rec(op, n.lo, cube);
    const NodeId r1 = quant_rec(op, n.hi, cube);
    r = mk(n.var, r0, r1);
  }
  cache_put(op, f, cube, 0, r);
  return r;
}

NodeId Manager::and_exists_rec(NodeId f, NodeId g, NodeId cube) {
  if (f == kFalseNode || g == kFalseNode)
    return kFalseNode;
  if (f == kTrueNode && g == kTrueNode)
    return kTrueNode;
  const std::uint32_t lf = level(f), lg = level(g);
  const std::uint32_t top = std::min(lf, lg);
  while (cube != kTrueNode && level(cube) < top)
    cube = nodes_[cube].hi;
  if (cube == kTrueNode)
    return apply_rec(Op::And, f, g);
  if (f == kTrueNode)
    return quant_rec(Op::Exists, g, cube);
  if (g == kTrueNode || f == g)
    return quant_rec(Op::Exists, f, cube);
  if (f > g)
    std::swap(f, g);
  NodeId r;
  if (cache_find(Op::AndExists, f, g, cube, r))
    return r;
  const VarId v = level2var_[top];
  const std::uint32_t lf2 = level(f), lg2 = level(g);
  const NodeId f0 = lf2 == top ? nodes_[f].lo : f;
  const NodeId f1 = lf2 == top ? nodes_[f].hi : f;
  const NodeId g0 = lg2 == top ? nodes_[g].lo : g;
  const NodeId g1 = lg2 == top ? nodes_[g].hi : g;
  const Node c = nodes_[cube];
  if (c.var == v) {
    const NodeId r0 = and_exists_rec(f0, g0, c.hi);
    if (r0 == kTrueNode) {
      r = kTrueNode;
    } else {
      const NodeId r1 = and_exists_rec(f1, g1, c.hi);
      r = apply_rec(Op::Or, r0, r1);
    }
  } else {
    const NodeId r0 = and_exists_rec(f0, g0, cube);
    const NodeId r1 = and_exists_rec(f1, g1, cube);
    r = mk(v, r0, r1);
  }
  cache_put(Op::AndExists, f, g, cube, r);
  return r;
}

NodeId Manager::permute_rec(NodeId f, std::uint32_t perm_id) {
  if (f <= kTrueNode)
    return f;
  NodeId r;
  if (cache_find(Op::Permute, f, perm_id, 0, r))
    return r;
  const Node n = nodes_[f];
  const NodeId r0 = permute_rec(n.lo, perm_id);
  const NodeId r1 = permute_rec(n.hi, perm_id);
  const auto &perm = perms_[perm_id];
  const VarId target = n.var < perm.size() ? perm[n.var] : n.var;
  const NodeId x = mk(target, kFalseNode, kTrueNode);
  r = ite_rec(x, r1, r0);
  cache_put(Op::Permute, f, perm_id, 0, r);
  return r;
}

NodeId Manager::var_set_node(std::span<const VarId> vars) {
  std::vector<VarId> sorted(vars.begin(), vars.end());
  for (VarId v : sorted)
    if (v >= var2level_.size())
      throw UsageError("unknown variable " + std::to_string(v));
  std::sort(sorted.begin(), sorted.end(), [&](VarId a, VarId b) {
    return var2level_[a] > var2level_[b];
  });
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  NodeId r = kTrueNode;
  for (VarId v : sorted)
    r = mk(v, kFalseNode, r);
  return r;
}

// ---------------------------------------------------------------------------
// public operations

Bdd Manager::constant(bool value) {
  return wrap(value ? kTrueNode : kFalseNode);
}

Bdd Manager::var(VarId v) {
  level_of(v);
  maybe_gc();
  return wrap(mk(v, kFalseNode, kTrueNode));
}

Bdd Manager::nvar(VarId v) {
  level_of(v);
  maybe_gc();
  return wrap(mk(v, kTrueNode, kFalseNode));
}

Bdd Manager::cube(std::span<const VarId> vars,
                  std::span<const std::uint8_t> bits) {
  if (vars.size() != bits.size())
    throw UsageError("cube: width mismatch between variables and bits");
  maybe_gc();
  std::vector<std::size_t> idx(vars.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    level_of(vars[i]);
    idx[i] = i;
  }
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return var2level_[vars[a]] > var2level_[vars[b]];
  });
  NodeId r = kTrueNode;
  for (std::size_t i : idx)
    r = bits[i] ? mk(vars[i], kFalseNode, r) : mk(vars[i], r, kFalseNode);
  return wrap(r);
}

Bdd Manager::var_set(std::span<const VarId> vars) {
  maybe_gc();
  return wrap(var_set_node(vars));
}

Bdd Manager::apply(BoolOp op, const Bdd &a, const Bdd &b) {
  require_own(a);
  require_own(b);
  maybe_gc();
  const Op code = op == BoolOp::And ? Op::And
                  : op == BoolOp::Or ? Op::Or
                                     : Op::Xor;
  return wrap(apply_rec(code, a.root_, b.root_));
}

Bdd Manager::negate(const Bdd &a) {
  require_own(a);
  maybe_gc();
  return wrap(not_rec(a.root_));
}

Bdd Manager::ite(const Bdd &f, const Bdd &g, const Bdd &h) {
  require_own(f);
  require_own(g);
  require_own(h);
  maybe_gc();
  return wrap(ite_rec(f.root_, g.root_, h.root_));
}

Bdd Manager::cofactor(const Bdd &a, VarId v, bool value) {
  require_own(a);
  level_of(v);
  maybe_gc();
  return wrap(restrict_rec(a.root_, v, value));
}

Bdd Manager::quantify(Quantifier kind, std::span<const VarId> vars,
                      const Bdd &a) {
  require_own(a);
  maybe_gc();
  const NodeId cube = var_set_node(vars);
  return wrap(quant_rec(kind == Quantifier::Exists ? Op::Exists : Op::Forall,
                        a.root_, cube));
}

Bdd Manager::and_exists(const Bdd &a, const Bdd &b,
                        std::span<const VarId> vars) {
  require_own(a);
  require_own(b);
  maybe_gc();
  const NodeId cube = var_set_node(vars);
  return wrap(and_exists_rec(a.root_, b.root_, cube));
}

Bdd Manager::rename(const Bdd &a, std::span<const VarId> from,
                    std::span<const VarId> to) {
  require_own(a);
  if (from.size() != to.size())
    throw UsageError("rename: variable groups differ in width");
  std::vector<VarId> perm(var_count());
  for (VarId v = 0; v < perm.size(); ++v)
    perm[v] = v;
  std::vector<char> seen_from(var_count(), 0), seen_to(var_count(), 0);
  for (std::size_t i = 0; i < from.size(); ++i) {
    level_of(from[i]);
    level_of(to[i]);
    if (seen_from[from[i]]++ || seen_to[to[i]]++)
      throw UsageError("rename: repeated variable");
    perm[from[i]] = to[i];
  }
  maybe_gc();
  std::uint32_t id = 0;
  for (; id < perms_.size(); ++id)
    if (perms_[id] == perm)
      break;
  if (id == perms_.size())
    perms_.push_back(std::move(perm));
  return wrap(permute_rec(a.root_, id));
}

// ---------------------------------------------------------------------------
// inspection

std::size_t Manager::node_count(const Bdd &a) const {
  require_own(a);
  std::unordered_set<NodeId> seen;
  std::vector<NodeId> stack{a.root_};
  while (!stack.empty()) {
    const NodeId n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second)
      continue;
    if (n > kTrueNode) {
      stack.push_back(nodes_[n].lo);
      stack.push_back(nodes_[n].hi);
    }
  }
  return seen.size();
}

std::size_t Manager::total_nodes() {
  collect_garbage();
  return table_nodes_;
}

std::vector<VarId> Manager::support(const Bdd &a) const {
  require_own(a);
  std::unordered_set<NodeId> seen;
  std::vector<char> in_support(var_count(), 0);
  std::vector<NodeId> stack{a.root_};
  while (!stack.empty()) {
    const NodeId n = stack.back();
    stack.pop_back();
    if (n <= kTrueNode || !seen.insert(n).second)
      continue;
    in_support[nodes_[n].var] = 1;
    stack.push_back(nodes_[n].lo);
    stack.push_back(nodes_[n].hi);
  }
  std::vector<VarId> out;
  for (VarId v = 0; v < in_support.size(); ++v)
    if (in_support[v])
      out.push_back(v);
  return out;
}

bool Manager::eval(const Bdd &a, std::span<const std::uint8_t> assignment) const {
  require_own(a);
  if (assignment.size() < var_count())
    throw UsageError("eval: assignment shorter than the variable count");
  NodeId n = a.root_;
  while (n > kTrueNode)
    n = assignment[nodes_[n].var] ? nodes_[n].hi : nodes_[n].lo;
  return n == kTrueNode;
}

void Manager::for_each_sat(
    const Bdd &a, std::span<const VarId> support_vars,
    const std::function<void(std::span<const std::uint8_t>)> &visit) const {
  require_own(a);
  std::vector<int> position(var_count(), -1);
  for (std::size_t i = 0; i < support_vars.size(); ++i) {
    level_of(support_vars[i]);
    position[support_vars[i]] = static_cast<int>(i);
  }
  for (VarId v : support(a))
    if (position[v] < 0)
      throw UsageError("for_each_sat: function depends on variable " +
                       std::to_string(v) + " outside the support");
  std::vector<std::size_t> by_level(support_vars.size());
  for (std::size_t i = 0; i < by_level.size(); ++i)
    by_level[i] = i;
  std::sort(by_level.begin(), by_level.end(), [&](std::size_t x, std::size_t y) {
    return var2level_[support_vars[x]] < var2level_[support_vars[y]];
  });
  std::vector<std::uint8_t> bits(support_vars.size(), 0);
  std::function<void(std::size_t, NodeId)> rec = [&](std::size_t i, NodeId n) {
    if (n == kFalseNode)
      return;
    if (i == by_level.size()) {
      visit(bits);
      return;
    }
    const std::size_t slot = by_level[i];
    const VarId v = support_vars[slot];
    const bool decides = n > kTrueNode && nodes_[n].var == v;
    bits[slot] = 0;
    rec(i + 1, decides ? nodes_[n].lo : n);
    bits[slot] = 1;
    rec(i + 1, decides ? nodes_[n].hi : n);
    bits[slot] = 0;
  };
  rec(0, a.root_);
}

std::vector<std::vector<std::uint8_t>>
Manager::sat_all(const Bdd &a, std::span<const VarId> support_vars) const {
  std::vector<std::vector<std::uint8_t>> out;
  for_each_sat(a, support_vars, [&](std::span<const std::uint8_t> bits) {
    out.emplace_back(bits.begin(), bits.end());
  });
  return out;
}

double Manager::sat_count(const Bdd &a,
                          std::span<const VarId> support_vars) const {
  require_own(a);
  std::vector<int> position(var_count(), -1);
  std::vector<VarId> sorted(support_vars.begin(), support_vars.end());
  std::sort(sorted.begin(), sorted.end(),
            [&](VarId x, VarId y) { return var2level_[x] < var2level_[y]; });
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i)
    position[sorted[i]] = static_cast<int>(i);
  for (VarId v : support(a))
    if (position[v] < 0)
      throw UsageError("sat_count: function depends on a variable outside "
                       "the support");
  const int total = static_cast<int>(sorted.size());
  auto pos = [&](NodeId n) {
    return n <= kTrueNode ? total : position[nodes_[n].var];
  };
  std::unordered_map<NodeId, double> memo;
  std::function<double(NodeId)> count = [&](NodeId n) -> double {
    if (n == kFalseNode)
      return 0.0;
    if (n == kTrueNode)
      return 1.0;
    if (auto it = memo.find(n); it != memo.end())
      return it->second;
    const int p = pos(n);
    const NodeId lo = nodes_[n].lo, hi = nodes_[n].hi;
    const double c = count(lo) * std::ldexp(1.0, pos(lo) - p - 1) +
                     count(hi) * std::ldexp(1.0, pos(hi) - p - 1);
    memo.emplace(n, c);
    return c;
  };
  return count(a.root_) * std::ldexp(1.0, pos(a.root_));
}

void Manager::check_invariants() const {
  std::size_t counted = 0;
  std::vector<std::uint32_t> parents(nodes_.size(), 0);
  for (VarId v = 0; v < subtables_.size(); ++v) {
    const Subtable &t = subtables_[v];
    std::size_t keys = 0;
    std::unordered_set<std::uint64_t> seen;
    for (NodeId n : subtable_nodes(t)) {
      const Node &node = nodes_[n];
      ++keys;
      if (node.var != v)
        throw std::logic_error("bdd: node filed under the wrong variable");
      if (node.lo == node.hi)
        throw std::logic_error("bdd: redundant node (lo == hi)");
      if (level(node.lo) <= var2level_[v] || level(node.hi) <= var2level_[v])
        throw std::logic_error("bdd: child not below its parent in the order");
      const std::uint64_t key =
          (static_cast<std::uint64_t>(node.lo) << 32) | node.hi;
      if (!seen.insert(key).second)
        throw std::logic_error("bdd: duplicate (var, lo, hi) entry");
      ++parents[node.lo];
      ++parents[node.hi];
    }
    if (keys != t.keys)
      throw std::logic_error("bdd: subtable key count out of sync");
    counted += keys;
  }
  if (counted != table_nodes_)
    throw std::logic_error("bdd: table node count out of sync");
  for (NodeId n = 2; n < nodes_.size(); ++n)
    if (nodes_[n].var != kFreeVar && nodes_[n].ref < parents[n])
      throw std::logic_error("bdd: reference count below parent count");
  for (std::size_t l = 0; l < level2var_.size(); ++l)
    if (var2level_[level2var_[l]] != l)
      throw std::logic_error("bdd: order arrays disagree");
}

} // namespace refsyn::bdd
