#include "refsyn/encoding.hpp"

#include "refsyn/error.hpp"

#include <algorithm>

namespace refsyn {

std::string BitVec::str() const {
  std::string s;
  s.reserve(bits.size());
  for (auto b : bits)
    s.push_back(b ? '1' : '0');
  return s;
}

std::size_t log_width(std::size_t count) {
  std::size_t n = 0;
  while ((std::size_t{1} << n) < count)
    ++n;
  return n;
}

BitVec log_encode(std::uint64_t q, std::size_t width) {
  if (width > 63 || q < 1 || q > (std::uint64_t{1} << width))
    throw UsageError("log_encode: state number " + std::to_string(q) +
                     " out of range for width " + std::to_string(width));
  BitVec out;
  out.bits.resize(width);
  const std::uint64_t value = q - 1;
  for (std::size_t i = 0; i < width; ++i)
    out.bits[i] = (value >> (width - 1 - i)) & 1u;
  return out;
}

std::string_view to_string(EncodingKind kind) {
  return kind == EncodingKind::Log ? "log" : "split";
}

EncodingKind encoding_kind_from_string(std::string_view name) {
  if (name == "log")
    return EncodingKind::Log;
  if (name == "split")
    return EncodingKind::Split;
  throw UsageError("unknown encoding '" + std::string(name) + "'");
}

std::unique_ptr<StateEncoding> make_encoding(EncodingKind kind) {
  if (kind == EncodingKind::Log)
    return std::make_unique<LogEncoding>();
  return std::make_unique<SplitEncoding>();
}

// ---------------------------------------------------------------------------
// LogEncoding

bool LogEncoding::contains(StateId q) const {
  return q < number_.size() && number_[q] != 0;
}

std::uint64_t LogEncoding::number(StateId q) const {
  if (!contains(q))
    throw UsageError("state " + std::to_string(q) + " is not encoded");
  return number_[q];
}

BitVec LogEncoding::encode(StateId q) const {
  return log_encode(number(q), width_);
}

std::optional<StateId> LogEncoding::decode(const BitVec &bits) const {
  if (bits.size() != width_)
    return std::nullopt;
  std::uint64_t value = 0;
  for (auto b : bits.bits)
    value = (value << 1) | (b ? 1u : 0u);
  const auto it = by_number_.find(value + 1);
  if (it == by_number_.end())
    return std::nullopt;
  return it->second;
}

std::optional<Widening> LogEncoding::add_state(StateId q) {
  if (contains(q))
    throw UsageError("state " + std::to_string(q) + " already encoded");
  std::optional<Widening> widened;
  if (numbered() == (std::uint64_t{1} << width_) && numbered() > 0) {
    ++width_;
    widened = Widening{0};
  }
  if (q >= number_.size())
    number_.resize(q + 1, 0);
  number_[q] = next_number_;
  by_number_.emplace(next_number_, q);
  ++next_number_;
  ++live_;
  return widened;
}

std::optional<Widening> LogEncoding::split(StateId parent, StateId child) {
  if (!contains(parent))
    throw UsageError("split of unencoded state " + std::to_string(parent));
  return add_state(child);
}

void LogEncoding::remove_state(StateId q) {
  const auto n = number(q);
  by_number_.erase(n);
  number_[q] = 0;
  --live_;
}

// ---------------------------------------------------------------------------
// SplitEncoding

std::string SplitEncoding::key(std::span<const std::uint8_t> bits) {
  // trailing zeros are padding; two live states never share the trimmed
  // prefix, so the key is stable under widening
  std::size_t end = bits.size();
  while (end > 0 && bits[end - 1] == 0)
    --end;
  std::string s(end, '0');
  for (std::size_t i = 0; i < end; ++i)
    s[i] = bits[i] ? '1' : '0';
  return s;
}

bool SplitEncoding::contains(StateId q) const {
  return q < entries_.size() && entries_[q].live;
}

std::size_t SplitEncoding::depth(StateId q) const {
  if (!contains(q))
    throw UsageError("state " + std::to_string(q) + " is not encoded");
  return entries_[q].depth;
}

BitVec SplitEncoding::encode(StateId q) const {
  if (!contains(q))
    throw UsageError("state " + std::to_string(q) + " is not encoded");
  return BitVec{entries_[q].bits};
}

std::optional<StateId> SplitEncoding::decode(const BitVec &bits) const {
  if (bits.size() != width())
    return std::nullopt;
  const auto it = by_key_.find(key(bits.bits));
  if (it == by_key_.end())
    return std::nullopt;
  return it->second;
}

std::optional<Widening> SplitEncoding::add_state(StateId q) {
  if (split_started_)
    throw UsageError("split encoding: states can only be added before the "
                     "first split");
  if (contains(q))
    throw UsageError("state " + std::to_string(q) + " already encoded");
  std::optional<Widening> widened;
  if (initial_count_ == (std::size_t{1} << k_) && initial_count_ > 0) {
    // grow the initial code by a leading bit, exactly like the log rule
    ++k_;
    for (auto &e : entries_) {
      if (!e.live)
        continue;
      by_key_.erase(key(e.bits));
      e.bits.insert(e.bits.begin(), 0);
      by_key_.emplace(key(e.bits), static_cast<StateId>(&e - entries_.data()));
    }
    widened = Widening{0};
  }
  if (q >= entries_.size())
    entries_.resize(q + 1);
  Entry &e = entries_[q];
  e.live = true;
  e.depth = 0;
  e.bits.assign(k_, 0);
  const std::size_t value = initial_count_;
  for (std::size_t i = 0; i < k_; ++i)
    e.bits[i] = (value >> (k_ - 1 - i)) & 1u;
  by_key_.emplace(key(e.bits), q);
  ++initial_count_;
  ++live_;
  return widened;
}

std::optional<Widening> SplitEncoding::split(StateId parent, StateId child) {
  if (!contains(parent))
    throw UsageError("split of unencoded state " + std::to_string(parent));
  if (contains(child))
    throw UsageError("split child " + std::to_string(child) +
                     " already encoded");
  split_started_ = true;
  std::optional<Widening> widened;
  const std::size_t d = entries_[parent].depth;
  if (d == max_depth_) {
    const std::size_t position = k_ + max_depth_;
    for (auto &e : entries_)
      if (e.live)
        e.bits.push_back(0);
    ++max_depth_;
    widened = Widening{position};
  }
  const std::size_t bit = k_ + d; // 0-based index of bit k+d+1
  if (child >= entries_.size())
    entries_.resize(child + 1);
  Entry &p = entries_[parent];
  by_key_.erase(key(p.bits));
  p.bits[bit] = 0;
  p.depth = static_cast<std::uint32_t>(d + 1);
  by_key_.emplace(key(p.bits), parent);

  Entry &c = entries_[child];
  c.bits = entries_[parent].bits;
  c.bits[bit] = 1;
  c.depth = static_cast<std::uint32_t>(d + 1);
  c.live = true;
  by_key_.emplace(key(c.bits), child);
  ++live_;
  return widened;
}

void SplitEncoding::remove_state(StateId q) {
  if (!contains(q))
    throw UsageError("state " + std::to_string(q) + " is not encoded");
  by_key_.erase(key(entries_[q].bits));
  entries_[q].live = false;
  --live_;
}

// ---------------------------------------------------------------------------
// BDD conversion

bdd::Bdd state_to_bdd(bdd::Manager &m, const BitVec &bits,
                      const VarGroup &group) {
  if (bits.size() != group.vars.size())
    throw UsageError("state_to_bdd: encoding width " +
                     std::to_string(bits.size()) + " does not match group "
                     "width " + std::to_string(group.vars.size()));
  return m.cube(group.vars, bits.bits);
}

bdd::Bdd set_to_bdd(bdd::Manager &m, std::span<const StateId> states,
                    const StateEncoding &enc, const VarGroup &group) {
  bdd::Bdd acc = m.constant(false);
  for (StateId q : states)
    acc |= state_to_bdd(m, enc.encode(q), group);
  return acc;
}

} // namespace refsyn
