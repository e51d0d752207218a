#pragma once

// Injective maps from abstract states to fixed-width bit vectors, and the
// conversion of encoded states and state sets to BDDs.

#include "refsyn/bdd.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace refsyn {

using StateId = std::uint32_t;
using ActionId = std::uint32_t;

/// Bits of an encoded element, most significant (first variable) first.
struct BitVec {
  std::vector<std::uint8_t> bits;

  std::size_t size() const { return bits.size(); }
  std::uint8_t operator[](std::size_t i) const { return bits[i]; }
  std::string str() const;
  friend bool operator==(const BitVec &, const BitVec &) = default;
};

/// Smallest n with 2^n >= count (0 for count <= 1).
std::size_t log_width(std::size_t count);

/// Bin(q - 1) zero-padded to `width` bits. Requires 1 <= q <= 2^width.
BitVec log_encode(std::uint64_t q, std::size_t width);

/// Reported when an encoding grows by one bit: a 0 bit was inserted into
/// every existing encoding at `position`.
struct Widening {
  std::size_t position;
};

enum class EncodingKind { Log, Split };

std::string_view to_string(EncodingKind kind);
EncodingKind encoding_kind_from_string(std::string_view name);

class StateEncoding {
public:
  virtual ~StateEncoding() = default;

  virtual EncodingKind kind() const = 0;
  virtual std::size_t width() const = 0;
  virtual bool contains(StateId q) const = 0;
  virtual BitVec encode(StateId q) const = 0;
  virtual std::optional<StateId> decode(const BitVec &bits) const = 0;
  virtual std::size_t size() const = 0;

  /// Encodes a state that does not come from a split.
  virtual std::optional<Widening> add_state(StateId q) = 0;
  /// Splits `parent` into itself (first child) and `child`.
  virtual std::optional<Widening> split(StateId parent, StateId child) = 0;
  virtual void remove_state(StateId q) = 0;

  virtual std::unique_ptr<StateEncoding> clone() const = 0;
};

/// States are numbered 1..|Q| in order of creation and encoded as
/// Bin(number - 1). A split keeps the parent's number for the first child
/// and gives the second child |Q| + 1. The width is always ceil(log2 |Q|).
class LogEncoding final : public StateEncoding {
public:
  EncodingKind kind() const override { return EncodingKind::Log; }
  std::size_t width() const override { return width_; }
  bool contains(StateId q) const override;
  BitVec encode(StateId q) const override;
  std::optional<StateId> decode(const BitVec &bits) const override;
  std::size_t size() const override { return live_; }

  std::optional<Widening> add_state(StateId q) override;
  std::optional<Widening> split(StateId parent, StateId child) override;
  void remove_state(StateId q) override;

  std::unique_ptr<StateEncoding> clone() const override {
    return std::make_unique<LogEncoding>(*this);
  }

  /// 1-based number of a state.
  std::uint64_t number(StateId q) const;
  /// Count of numbers handed out so far (|Q| in the numbering rule).
  std::uint64_t numbered() const { return next_number_ - 1; }

private:
  std::size_t width_ = 0;
  std::uint64_t next_number_ = 1;
  std::size_t live_ = 0;
  std::vector<std::uint64_t> number_; // by state id; 0 = not encoded
  std::unordered_map<std::uint64_t, StateId> by_number_;
};

/// Refinement-aware encoding. Initial states get distinct k-bit codes;
/// splitting a state of depth d sets bit k+d+1 (1-based) to 0 for the first
/// child and 1 for the second. Reaching a new largest depth first appends a
/// 0 bit to every encoding.
class SplitEncoding final : public StateEncoding {
public:
  EncodingKind kind() const override { return EncodingKind::Split; }
  std::size_t width() const override { return k_ + max_depth_; }
  bool contains(StateId q) const override;
  BitVec encode(StateId q) const override;
  std::optional<StateId> decode(const BitVec &bits) const override;
  std::size_t size() const override { return live_; }

  /// Only valid before the first split: initial states are numbered like
  /// the log encoding, which fixes k.
  std::optional<Widening> add_state(StateId q) override;
  std::optional<Widening> split(StateId parent, StateId child) override;
  void remove_state(StateId q) override;

  std::unique_ptr<StateEncoding> clone() const override {
    return std::make_unique<SplitEncoding>(*this);
  }

  std::size_t initial_bits() const { return k_; }
  std::size_t max_depth() const { return max_depth_; }
  std::size_t depth(StateId q) const;

private:
  struct Entry {
    std::vector<std::uint8_t> bits;
    std::uint32_t depth = 0;
    bool live = false;
  };
  static std::string key(std::span<const std::uint8_t> bits);

  std::size_t k_ = 0;
  std::size_t max_depth_ = 0;
  std::size_t initial_count_ = 0;
  bool split_started_ = false;
  std::size_t live_ = 0;
  std::vector<Entry> entries_;
  std::unordered_map<std::string, StateId> by_key_;
};

std::unique_ptr<StateEncoding> make_encoding(EncodingKind kind);

enum class VarRole { StateFrom, Action, StateTo };

/// Ordered BDD variables carrying one component of a transition; bit i of
/// an encoding maps to vars[i].
struct VarGroup {
  VarRole role;
  std::vector<bdd::VarId> vars;
};

/// Singleton BDD: positive literal where the bit is 1, negated where 0.
bdd::Bdd state_to_bdd(bdd::Manager &m, const BitVec &bits,
                      const VarGroup &group);

/// Disjunction of the singleton BDDs of `states`.
bdd::Bdd set_to_bdd(bdd::Manager &m, std::span<const StateId> states,
                    const StateEncoding &enc, const VarGroup &group);

} // namespace refsyn
