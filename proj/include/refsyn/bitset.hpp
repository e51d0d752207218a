#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace refsyn {

/// Fixed-universe dense bitset used as the explicit state-set type.
/// Binary operations require equal universe sizes.
class Bitset {
public:
  Bitset() = default;
  explicit Bitset(std::size_t universe, bool filled = false);

  static Bitset from_ids(std::size_t universe,
                         const std::vector<std::uint32_t> &ids);

  std::size_t universe() const { return universe_; }
  std::size_t words() const { return words_.size(); }
  const std::uint64_t *data() const { return words_.data(); }
  std::uint64_t *data() { return words_.data(); }

  bool test(std::size_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1u;
  }
  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) {
    words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
  }
  void assign(std::size_t i, bool v) { v ? set(i) : reset(i); }

  /// Grows the universe; new members are absent.
  void resize(std::size_t universe);

  std::size_t count() const;
  bool none() const;
  bool subset_of(const Bitset &other) const;

  Bitset &operator&=(const Bitset &o);
  Bitset &operator|=(const Bitset &o);
  Bitset &operator-=(const Bitset &o);

  friend Bitset operator&(Bitset a, const Bitset &b) { return a &= b; }
  friend Bitset operator|(Bitset a, const Bitset &b) { return a |= b; }
  friend Bitset operator-(Bitset a, const Bitset &b) { return a -= b; }
  friend bool operator==(const Bitset &a, const Bitset &b);

  std::vector<std::uint32_t> to_ids() const;

  template <typename F> void for_each(F &&f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits) {
        const int b = __builtin_ctzll(bits);
        f(static_cast<std::uint32_t>(w * 64 + static_cast<std::size_t>(b)));
        bits &= bits - 1;
      }
    }
  }

private:
  void trim();

  std::size_t universe_ = 0;
  std::vector<std::uint64_t> words_;
};

} // namespace refsyn
