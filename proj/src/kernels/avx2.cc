// Compiled with -mavx2 only (no -mfma): multiply and add stay separate so the
// results match the scalar reference bit for bit.

#include <immintrin.h>

#include "muscert/kernels/kernels.h"

namespace muscert::kernels {
namespace {

__m256d expand_keep(const uint8_t* keep) {
  int32_t packed;
  __builtin_memcpy(&packed, keep, sizeof(packed));
  const __m256i wide = _mm256_cvtepu8_epi64(_mm_cvtsi32_si128(packed));
  const __m256i on = _mm256_cmpgt_epi64(wide, _mm256_setzero_si256());
  return _mm256_castsi256_pd(on);
}

void masked_copy(const double* x, const uint8_t* keep, double* out, size_t n) {
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(out + i, _mm256_and_pd(v, expand_keep(keep + i)));
  }
  for (; i < n; ++i) out[i] = keep[i] ? x[i] : 0.0;
}

void accumulate(double* acc, const double* v, size_t n) {
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i),
                                            _mm256_loadu_pd(v + i)));
  }
  for (; i < n; ++i) acc[i] += v[i];
}

void divide(double* v, double divisor, size_t n) {
  const __m256d d = _mm256_set1_pd(divisor);
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(v + i, _mm256_div_pd(_mm256_loadu_pd(v + i), d));
  }
  for (; i < n; ++i) v[i] /= divisor;
}

void matvec_colmajor(const double* wt, size_t rows, size_t cols,
                     const double* x, double* out) {
  size_t r = 0;
  // Blocks of 16 rows keep four accumulators in registers across columns.
  for (; r + 16 <= rows; r += 16) {
    __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
    __m256d a2 = _mm256_setzero_pd(), a3 = _mm256_setzero_pd();
    for (size_t j = 0; j < cols; ++j) {
      const __m256d xj = _mm256_set1_pd(x[j]);
      const double* col = wt + j * rows + r;
      a0 = _mm256_add_pd(a0, _mm256_mul_pd(_mm256_loadu_pd(col), xj));
      a1 = _mm256_add_pd(a1, _mm256_mul_pd(_mm256_loadu_pd(col + 4), xj));
      a2 = _mm256_add_pd(a2, _mm256_mul_pd(_mm256_loadu_pd(col + 8), xj));
      a3 = _mm256_add_pd(a3, _mm256_mul_pd(_mm256_loadu_pd(col + 12), xj));
    }
    _mm256_storeu_pd(out + r, a0);
    _mm256_storeu_pd(out + r + 4, a1);
    _mm256_storeu_pd(out + r + 8, a2);
    _mm256_storeu_pd(out + r + 12, a3);
  }
  for (; r + 4 <= rows; r += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (size_t j = 0; j < cols; ++j) {
      const __m256d xj = _mm256_set1_pd(x[j]);
      acc = _mm256_add_pd(acc,
                          _mm256_mul_pd(_mm256_loadu_pd(wt + j * rows + r), xj));
    }
    _mm256_storeu_pd(out + r, acc);
  }
  for (; r < rows; ++r) {
    double acc = 0.0;
    for (size_t j = 0; j < cols; ++j) acc += wt[j * rows + r] * x[j];
    out[r] = acc;
  }
}

void relu(double* v, size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    // max_pd returns the second operand unless the first is strictly greater.
    _mm256_storeu_pd(v + i, _mm256_max_pd(_mm256_loadu_pd(v + i), zero));
  }
  for (; i < n; ++i) v[i] = v[i] > 0.0 ? v[i] : 0.0;
}

void mask_and(const uint8_t* a, const uint8_t* b, uint8_t* out, size_t n) {
  size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i),
                        _mm256_and_si256(va, vb));
  }
  for (; i < n; ++i) out[i] = a[i] & b[i];
}

void mask_or(const uint8_t* a, const uint8_t* b, uint8_t* out, size_t n) {
  size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i),
                        _mm256_or_si256(va, vb));
  }
  for (; i < n; ++i) out[i] = a[i] | b[i];
}

size_t count_mismatch(const uint8_t* a, const uint8_t* b, size_t n) {
  size_t count = 0;
  size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    const auto equal =
        static_cast<uint32_t>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(va, vb)));
    count += 32 - static_cast<size_t>(__builtin_popcount(equal));
  }
  for (; i < n; ++i) count += a[i] != b[i];
  return count;
}

constexpr KernelTable kAvx2 = {
    "avx2", masked_copy, accumulate, divide,        matvec_colmajor,
    relu,   mask_and,    mask_or,    count_mismatch,
};

}  // namespace

const KernelTable* avx2_kernels() {
  return __builtin_cpu_supports("avx2") ? &kAvx2 : nullptr;
}

}  // namespace muscert::kernels
