#include "refsyn/bitset.hpp"

#include "refsyn/error.hpp"
#include "refsyn/kernels.hpp"

namespace refsyn {

namespace {

void require_same(const Bitset &a, const Bitset &b) {
  if (a.universe() != b.universe())
    throw UsageError("bitset universe mismatch");
}

} // namespace

Bitset::Bitset(std::size_t universe, bool filled)
    : universe_(universe),
      words_((universe + 63) / 64, filled ? ~std::uint64_t{0} : 0) {
  trim();
}

Bitset Bitset::from_ids(std::size_t universe,
                        const std::vector<std::uint32_t> &ids) {
  Bitset s(universe);
  for (auto id : ids) {
    if (id >= universe)
      throw UsageError("state id outside bitset universe");
    s.set(id);
  }
  return s;
}

void Bitset::trim() {
  if (universe_ % 64 != 0 && !words_.empty())
    words_.back() &= (std::uint64_t{1} << (universe_ % 64)) - 1;
}

void Bitset::resize(std::size_t universe) {
  universe_ = universe;
  words_.resize((universe + 63) / 64, 0);
  trim();
}

std::size_t Bitset::count() const {
  return kernels::bits_popcount(words_.data(), words_.size());
}

bool Bitset::none() const {
  for (auto w : words_)
    if (w)
      return false;
  return true;
}

bool Bitset::subset_of(const Bitset &other) const {
  require_same(*this, other);
  return kernels::bits_subset(words_.data(), other.words_.data(),
                              words_.size());
}

Bitset &Bitset::operator&=(const Bitset &o) {
  require_same(*this, o);
  kernels::bits_and(words_.data(), words_.data(), o.words_.data(),
                    words_.size());
  return *this;
}

Bitset &Bitset::operator|=(const Bitset &o) {
  require_same(*this, o);
  kernels::bits_or(words_.data(), words_.data(), o.words_.data(),
                   words_.size());
  return *this;
}

Bitset &Bitset::operator-=(const Bitset &o) {
  require_same(*this, o);
  kernels::bits_andnot(words_.data(), words_.data(), o.words_.data(),
                       words_.size());
  return *this;
}

bool operator==(const Bitset &a, const Bitset &b) {
  return a.universe_ == b.universe_ &&
         kernels::bits_equal(a.words_.data(), b.words_.data(),
                             a.words_.size());
}

std::vector<std::uint32_t> Bitset::to_ids() const {
  std::vector<std::uint32_t> ids;
  for_each([&](std::uint32_t i) { ids.push_back(i); });
  return ids;
}

} // namespace refsyn
