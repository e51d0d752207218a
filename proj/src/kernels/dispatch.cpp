#include "refsyn/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace refsyn::kernels {

namespace {

Isa detect() {
  if (const char *force = std::getenv("REFSYN_FORCE_SCALAR");
      force && std::strcmp(force, "0") != 0)
    return Isa::Scalar;
  return avx2_available() ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa> &current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

} // namespace

bool avx2_available() {
#if defined(REFSYN_HAVE_AVX2)
  static const bool ok =
      __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  if (isa == Isa::Avx2 && !avx2_available())
    isa = Isa::Scalar;
  current().store(isa, std::memory_order_relaxed);
}

const char *isa_name(Isa isa) {
  return isa == Isa::Avx2 ? "avx2" : "scalar";
}

#if defined(REFSYN_HAVE_AVX2)
#define REFSYN_DISPATCH(fn, ...)                                               \
  (active_isa() == Isa::Avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__))
#else
#define REFSYN_DISPATCH(fn, ...) scalar::fn(__VA_ARGS__)
#endif

void affine_image(std::span<const double> matrix,
                  std::span<const double> offset_lo,
                  std::span<const double> offset_hi, const BoxesView &in,
                  const BoxesOut &out) {
  REFSYN_DISPATCH(affine_image, matrix, offset_lo, offset_hi, in, out);
}

void intersecting(std::span<const double> qlo, std::span<const double> qhi,
                  const BoxesView &boxes, std::vector<std::uint32_t> &hits) {
  REFSYN_DISPATCH(intersecting, qlo, qhi, boxes, hits);
}

void bits_and(std::uint64_t *dst, const std::uint64_t *a,
              const std::uint64_t *b, std::size_t n) {
  REFSYN_DISPATCH(bits_and, dst, a, b, n);
}

void bits_or(std::uint64_t *dst, const std::uint64_t *a,
             const std::uint64_t *b, std::size_t n) {
  REFSYN_DISPATCH(bits_or, dst, a, b, n);
}

void bits_andnot(std::uint64_t *dst, const std::uint64_t *a,
                 const std::uint64_t *b, std::size_t n) {
  REFSYN_DISPATCH(bits_andnot, dst, a, b, n);
}

bool bits_equal(const std::uint64_t *a, const std::uint64_t *b,
                std::size_t n) {
  return REFSYN_DISPATCH(bits_equal, a, b, n);
}

bool bits_subset(const std::uint64_t *a, const std::uint64_t *b,
                 std::size_t n) {
  return REFSYN_DISPATCH(bits_subset, a, b, n);
}

std::size_t bits_popcount(const std::uint64_t *a, std::size_t n) {
  return REFSYN_DISPATCH(bits_popcount, a, n);
}

#undef REFSYN_DISPATCH

} // namespace refsyn::kernels
