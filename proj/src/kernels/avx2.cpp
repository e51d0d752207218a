#include "refsyn/kernels.hpp"

#include <immintrin.h>

#include <algorithm>
#include <bit>
#include <cfloat>
#include <cmath>

namespace refsyn::kernels::avx2 {

namespace {

inline __m256d abs_pd(__m256d v) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

} // namespace

namespace {

inline void add_product(double &acc, double &err, double a, double x) {
  const double p = a * x;
  const double pe = std::fma(a, x, -p);
  const double s = acc + p;
  const double bb = s - acc;
  const double se = (acc - (s - bb)) + (p - bb);
  acc = s;
  err = err + (std::fabs(pe) + std::fabs(se));
}

inline void add_product(__m256d &acc, __m256d &err, __m256d a, __m256d x) {
  const __m256d p = _mm256_mul_pd(a, x);
  const __m256d pe = _mm256_fmsub_pd(a, x, p);
  const __m256d s = _mm256_add_pd(acc, p);
  const __m256d bb = _mm256_sub_pd(s, acc);
  const __m256d se = _mm256_add_pd(_mm256_sub_pd(acc, _mm256_sub_pd(s, bb)),
                                   _mm256_sub_pd(p, bb));
  acc = s;
  err = _mm256_add_pd(err, _mm256_add_pd(abs_pd(pe), abs_pd(se)));
}

} // namespace

// Four boxes per iteration; the tail runs the scalar body. The operation
// sequence matches the scalar kernel exactly.
void affine_image(std::span<const double> matrix,
                  std::span<const double> offset_lo,
                  std::span<const double> offset_hi, const BoxesView &in,
                  const BoxesOut &out) {
  const std::size_t dim = in.dim;
  const double err_scale = 1.0 + static_cast<double>(4 * dim + 4) * DBL_EPSILON;
  const __m256d vscale = _mm256_set1_pd(err_scale);
  const std::size_t vec_end = in.count & ~std::size_t{3};

  for (std::size_t r = 0; r < dim; ++r) {
    const double *row = matrix.data() + r * dim;
    std::size_t c = 0;
    for (; c < vec_end; c += 4) {
      __m256d acc_lo = _mm256_set1_pd(offset_lo[r]), err_lo = _mm256_setzero_pd();
      __m256d acc_hi = _mm256_set1_pd(offset_hi[r]), err_hi = _mm256_setzero_pd();
      for (std::size_t j = 0; j < dim; ++j) {
        const double a = row[j];
        const __m256d va = _mm256_set1_pd(a);
        const __m256d lo = _mm256_loadu_pd(in.lo + j * in.stride + c);
        const __m256d hi = _mm256_loadu_pd(in.hi + j * in.stride + c);
        add_product(acc_lo, err_lo, va, a >= 0.0 ? lo : hi);
        add_product(acc_hi, err_hi, va, a >= 0.0 ? hi : lo);
      }
      alignas(32) double lo_v[4], hi_v[4], plo[4], phi[4];
      _mm256_store_pd(lo_v, acc_lo);
      _mm256_store_pd(hi_v, acc_hi);
      _mm256_store_pd(plo, _mm256_mul_pd(err_lo, vscale));
      _mm256_store_pd(phi, _mm256_mul_pd(err_hi, vscale));
      for (int l = 0; l < 4; ++l) {
        out.lo[r * out.stride + c + l] = widen_down(lo_v[l], plo[l]);
        out.hi[r * out.stride + c + l] = widen_up(hi_v[l], phi[l]);
      }
    }
    for (; c < in.count; ++c) {
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
  const std::size_t vec_end = boxes.count & ~std::size_t{3};
  std::size_t c = 0;
  for (; c < vec_end; c += 4) {
    __m256d meet = _mm256_castsi256_pd(_mm256_set1_epi64x(-1));
    for (std::size_t d = 0; d < boxes.dim; ++d) {
      const __m256d lo = _mm256_loadu_pd(boxes.lo + d * boxes.stride + c);
      const __m256d hi = _mm256_loadu_pd(boxes.hi + d * boxes.stride + c);
      const __m256d a = _mm256_cmp_pd(_mm256_set1_pd(qlo[d]), hi, _CMP_LE_OQ);
      const __m256d b = _mm256_cmp_pd(_mm256_set1_pd(qhi[d]), lo, _CMP_GE_OQ);
      meet = _mm256_and_pd(meet, _mm256_and_pd(a, b));
    }
    int mask = _mm256_movemask_pd(meet);
    while (mask) {
      const int bit = std::countr_zero(static_cast<unsigned>(mask));
      hits.push_back(static_cast<std::uint32_t>(c + bit));
      mask &= mask - 1;
    }
  }
  for (; c < boxes.count; ++c) {
    bool meet = true;
    for (std::size_t d = 0; d < boxes.dim && meet; ++d) {
      meet = qlo[d] <= boxes.hi[d * boxes.stride + c] &&
             qhi[d] >= boxes.lo[d * boxes.stride + c];
    }
    if (meet)
      hits.push_back(static_cast<std::uint32_t>(c));
  }
}

namespace {

template <typename VecOp, typename WordOp>
inline void binary_words(std::uint64_t *dst, const std::uint64_t *a,
                         const std::uint64_t *b, std::size_t n, VecOp vop,
                         WordOp wop) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i *>(a + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i *>(b + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i *>(dst + i), vop(va, vb));
  }
  for (; i < n; ++i)
    dst[i] = wop(a[i], b[i]);
}

} // namespace

void bits_and(std::uint64_t *dst, const std::uint64_t *a,
              const std::uint64_t *b, std::size_t n) {
  binary_words(
      dst, a, b, n, [](__m256i x, __m256i y) { return _mm256_and_si256(x, y); },
      [](std::uint64_t x, std::uint64_t y) { return x & y; });
}

void bits_or(std::uint64_t *dst, const std::uint64_t *a,
             const std::uint64_t *b, std::size_t n) {
  binary_words(
      dst, a, b, n, [](__m256i x, __m256i y) { return _mm256_or_si256(x, y); },
      [](std::uint64_t x, std::uint64_t y) { return x | y; });
}

void bits_andnot(std::uint64_t *dst, const std::uint64_t *a,
                 const std::uint64_t *b, std::size_t n) {
  // _mm256_andnot_si256 computes ~first & second.
  binary_words(
      dst, a, b, n, [](__m256i x, __m256i y) { return _mm256_andnot_si256(y, x); },
      [](std::uint64_t x, std::uint64_t y) { return x & ~y; });
}

bool bits_equal(const std::uint64_t *a, const std::uint64_t *b,
                std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i *>(a + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i *>(b + i));
    const __m256i x = _mm256_xor_si256(va, vb);
    if (!_mm256_testz_si256(x, x))
      return false;
  }
  for (; i < n; ++i)
    if (a[i] != b[i])
      return false;
  return true;
}

bool bits_subset(const std::uint64_t *a, const std::uint64_t *b,
                 std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i *>(a + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i *>(b + i));
    // testc(vb, va) is 1 iff (~vb & va) == 0
    if (!_mm256_testc_si256(vb, va))
      return false;
  }
  for (; i < n; ++i)
    if (a[i] & ~b[i])
      return false;
  return true;
}

std::size_t bits_popcount(const std::uint64_t *a, std::size_t n) {
  // AVX2 has no vector popcount; a nibble-table (Mula) popcount over 256-bit
  // lanes followed by a horizontal sum.
  const __m256i lookup = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2,
                                          3, 3, 4, 0, 1, 1, 2, 1, 2, 2, 3, 1, 2,
                                          2, 3, 2, 3, 3, 4);
  const __m256i low_mask = _mm256_set1_epi8(0x0f);
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i *>(a + i));
    const __m256i lo = _mm256_and_si256(v, low_mask);
    const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_mask);
    const __m256i cnt = _mm256_add_epi8(_mm256_shuffle_epi8(lookup, lo),
                                        _mm256_shuffle_epi8(lookup, hi));
    acc = _mm256_add_epi64(acc, _mm256_sad_epu8(cnt, _mm256_setzero_si256()));
  }
  alignas(32) std::uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i *>(lanes), acc);
  std::size_t total = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < n; ++i)
    total += static_cast<std::size_t>(std::popcount(a[i]));
  return total;
}

} // namespace refsyn::kernels::avx2
