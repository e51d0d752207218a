#include "refsyn/kernels.hpp"

#include <algorithm>
#include <bit>
#include <cfloat>
#include <cmath>

namespace refsyn::kernels::scalar {

namespace {

// acc += a * x, accumulating a bound on the discarded rounding error.
inline void add_product(double &acc, double &err, double a, double x) {
  const double p = a * x;
  const double pe = std::fma(a, x, -p);
  const double s = acc + p;
  const double bb = s - acc;
  const double se = (acc - (s - bb)) + (p - bb);
  acc = s;
  err = err + (std::fabs(pe) + std::fabs(se));
}

} // namespace

void affine_image(std::span<const double> matrix,
                  std::span<const double> offset_lo,
                  std::span<const double> offset_hi, const BoxesView &in,
                  const BoxesOut &out) {
  const std::size_t dim = in.dim;
  const double err_scale = 1.0 + static_cast<double>(4 * dim + 4) * DBL_EPSILON;
  for (std::size_t r = 0; r < dim; ++r) {
    const double *row = matrix.data() + r * dim;
    for (std::size_t c = 0; c < in.count; ++c) {
      double acc_lo = offset_lo[r], err_lo = 0.0;
      double acc_hi = offset_hi[r], err_hi = 0.0;
      for (std::size_t j = 0; j < dim; ++j) {
        const double a = row[j];
        const double lo = in.lo[j * in.stride + c];
        const double hi = in.hi[j * in.stride + c];
        add_product(acc_lo, err_lo, a, a >= 0.0 ? lo : hi);
        add_product(acc_hi, err_hi, a, a >= 0.0 ? hi : lo);
      }
      out.lo[r * out.stride + c] = widen_down(acc_lo, err_lo * err_scale);
      out.hi[r * out.stride + c] = widen_up(acc_hi, err_hi * err_scale);
    }
  }
}

void intersecting(std::span<const double> qlo, std::span<const double> qhi,
                  const BoxesView &boxes, std::vector<std::uint32_t> &hits) {
  for (std::size_t c = 0; c < boxes.count; ++c) {
    bool meet = true;
    for (std::size_t d = 0; d < boxes.dim && meet; ++d) {
      meet = qlo[d] <= boxes.hi[d * boxes.stride + c] &&
             qhi[d] >= boxes.lo[d * boxes.stride + c];
    }
    if (meet)
      hits.push_back(static_cast<std::uint32_t>(c));
  }
}

void bits_and(std::uint64_t *dst, const std::uint64_t *a,
              const std::uint64_t *b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    dst[i] = a[i] & b[i];
}

void bits_or(std::uint64_t *dst, const std::uint64_t *a,
             const std::uint64_t *b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    dst[i] = a[i] | b[i];
}

void bits_andnot(std::uint64_t *dst, const std::uint64_t *a,
                 const std::uint64_t *b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    dst[i] = a[i] & ~b[i];
}

bool bits_equal(const std::uint64_t *a, const std::uint64_t *b,
                std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (a[i] != b[i])
      return false;
  return true;
}

bool bits_subset(const std::uint64_t *a, const std::uint64_t *b,
                 std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (a[i] & ~b[i])
      return false;
  return true;
}

std::size_t bits_popcount(const std::uint64_t *a, std::size_t n) {
  std::size_t total = 0;
  for (std::size_t i = 0; i < n; ++i)
    total += static_cast<std::size_t>(std::popcount(a[i]));
  return total;
}

} // namespace refsyn::kernels::scalar
