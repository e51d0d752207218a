#pragma once

// Data-parallel inner loops. Every kernel has a portable scalar reference in
// kernels::scalar and, on x86-64, an AVX2 variant in kernels::avx2. The
// unqualified entry points dispatch at runtime. Both variants perform the
// same floating-point operations in the same order, so results are
// bit-identical.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace refsyn::kernels {

enum class Isa { Scalar, Avx2 };

/// ISA chosen by the dispatcher. Honors REFSYN_FORCE_SCALAR=1.
Isa active_isa();
/// Override dispatch (tests and benchmarks).
void force_isa(Isa isa);
/// True when this binary carries AVX2 code and the CPU supports it.
bool avx2_available();
const char *isa_name(Isa isa);

/// Boxes in structure-of-arrays layout: lo[d * stride + c] is the lower
/// bound of box c along axis d.
struct BoxesView {
  const double *lo = nullptr;
  const double *hi = nullptr;
  std::size_t dim = 0;
  std::size_t count = 0;
  std::size_t stride = 0;
};

struct BoxesOut {
  double *lo = nullptr;
  double *hi = nullptr;
  std::size_t stride = 0;
};

/// A double no larger than v - pad (v itself when pad is zero).
inline double widen_down(double v, double pad) {
  return pad > 0.0 ? std::nextafter(v - pad, -HUGE_VAL) : v;
}
/// A double no smaller than v + pad (v itself when pad is zero).
inline double widen_up(double v, double pad) {
  return pad > 0.0 ? std::nextafter(v + pad, HUGE_VAL) : v;
}

/// Interval image of x -> A x + offset over a batch of boxes. `matrix` is
/// row-major dim x dim; `offset_lo/hi` already contain K plus the
/// disturbance contribution. Rounding errors are tracked exactly per term
/// and each bound is pushed outward by their sum, so the result encloses
/// the exact image and is exact whenever the arithmetic was.
void affine_image(std::span<const double> matrix,
                  std::span<const double> offset_lo,
                  std::span<const double> offset_hi, const BoxesView &in,
                  const BoxesOut &out);

/// Appends to `hits` the index of every box in `boxes` whose closure meets
/// the closed query box [qlo, qhi].
void intersecting(std::span<const double> qlo, std::span<const double> qhi,
                  const BoxesView &boxes, std::vector<std::uint32_t> &hits);

// Word-wise set algebra on bitsets of `n` 64-bit words.
void bits_and(std::uint64_t *dst, const std::uint64_t *a,
              const std::uint64_t *b, std::size_t n);
void bits_or(std::uint64_t *dst, const std::uint64_t *a,
             const std::uint64_t *b, std::size_t n);
void bits_andnot(std::uint64_t *dst, const std::uint64_t *a,
                 const std::uint64_t *b, std::size_t n); // a & ~b
bool bits_equal(const std::uint64_t *a, const std::uint64_t *b, std::size_t n);
bool bits_subset(const std::uint64_t *a, const std::uint64_t *b,
                 std::size_t n); // a ⊆ b
std::size_t bits_popcount(const std::uint64_t *a, std::size_t n);

namespace scalar {
void affine_image(std::span<const double> matrix,
                  std::span<const double> offset_lo,
                  std::span<const double> offset_hi, const BoxesView &in,
                  const BoxesOut &out);
void intersecting(std::span<const double> qlo, std::span<const double> qhi,
                  const BoxesView &boxes, std::vector<std::uint32_t> &hits);
void bits_and(std::uint64_t *, const std::uint64_t *, const std::uint64_t *,
              std::size_t);
void bits_or(std::uint64_t *, const std::uint64_t *, const std::uint64_t *,
             std::size_t);
void bits_andnot(std::uint64_t *, const std::uint64_t *, const std::uint64_t *,
                 std::size_t);
bool bits_equal(const std::uint64_t *, const std::uint64_t *, std::size_t);
bool bits_subset(const std::uint64_t *, const std::uint64_t *, std::size_t);
std::size_t bits_popcount(const std::uint64_t *, std::size_t);
} // namespace scalar

namespace avx2 {
void affine_image(std::span<const double> matrix,
                  std::span<const double> offset_lo,
                  std::span<const double> offset_hi, const BoxesView &in,
                  const BoxesOut &out);
void intersecting(std::span<const double> qlo, std::span<const double> qhi,
                  const BoxesView &boxes, std::vector<std::uint32_t> &hits);
void bits_and(std::uint64_t *, const std::uint64_t *, const std::uint64_t *,
              std::size_t);
void bits_or(std::uint64_t *, const std::uint64_t *, const std::uint64_t *,
             std::size_t);
void bits_andnot(std::uint64_t *, const std::uint64_t *, const std::uint64_t *,
                 std::size_t);
bool bits_equal(const std::uint64_t *, const std::uint64_t *, std::size_t);
bool bits_subset(const std::uint64_t *, const std::uint64_t *, std::size_t);
std::size_t bits_popcount(const std::uint64_t *, std::size_t);
} // namespace avx2

} // namespace refsyn::kernels
