// AArch64 variant. Built only when the target has NEON; vmulq/vaddq are used
// instead of vfmaq so rounding matches the scalar reference.

#include <arm_neon.h>

#include "muscert/kernels/kernels.h"

namespace muscert::kernels {
namespace {

void masked_copy(const double* x, const uint8_t* keep, double* out, size_t n) {
  size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const uint64_t lanes[2] = {keep[i] ? ~uint64_t{0} : 0,
                               keep[i + 1] ? ~uint64_t{0} : 0};
    const uint64x2_t m = vld1q_u64(lanes);
    const uint64x2_t v = vreinterpretq_u64_f64(vld1q_f64(x + i));
    vst1q_f64(out + i, vreinterpretq_f64_u64(vandq_u64(v, m)));
  }
  for (; i < n; ++i) out[i] = keep[i] ? x[i] : 0.0;
}

void accumulate(double* acc, const double* v, size_t n) {
  size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(acc + i, vaddq_f64(vld1q_f64(acc + i), vld1q_f64(v + i)));
  }
  for (; i < n; ++i) acc[i] += v[i];
}

void divide(double* v, double divisor, size_t n) {
  const float64x2_t d = vdupq_n_f64(divisor);
  size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(v + i, vdivq_f64(vld1q_f64(v + i), d));
  for (; i < n; ++i) v[i] /= divisor;
}

void matvec_colmajor(const double* wt, size_t rows, size_t cols,
                     const double* x, double* out) {
  size_t r = 0;
  for (; r + 2 <= rows; r += 2) {
    float64x2_t acc = vdupq_n_f64(0.0);
    for (size_t j = 0; j < cols; ++j) {
      acc = vaddq_f64(acc, vmulq_f64(vld1q_f64(wt + j * rows + r),
                                     vdupq_n_f64(x[j])));
    }
    vst1q_f64(out + r, acc);
  }
  for (; r < rows; ++r) {
    double acc = 0.0;
    for (size_t j = 0; j < cols; ++j) acc += wt[j * rows + r] * x[j];
    out[r] = acc;
  }
}

void relu(double* v, size_t n) {
  for (size_t i = 0; i < n; ++i) v[i] = v[i] > 0.0 ? v[i] : 0.0;
}

void mask_and(const uint8_t* a, const uint8_t* b, uint8_t* out, size_t n) {
  size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    vst1q_u8(out + i, vandq_u8(vld1q_u8(a + i), vld1q_u8(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] & b[i];
}

void mask_or(const uint8_t* a, const uint8_t* b, uint8_t* out, size_t n) {
  size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    vst1q_u8(out + i, vorrq_u8(vld1q_u8(a + i), vld1q_u8(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] | b[i];
}

size_t count_mismatch(const uint8_t* a, const uint8_t* b, size_t n) {
  size_t count = 0;
  size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    const uint8x16_t ne =
        vmvnq_u8(vceqq_u8(vld1q_u8(a + i), vld1q_u8(b + i)));
    count += vaddvq_u8(vshrq_n_u8(ne, 7));
  }
  for (; i < n; ++i) count += a[i] != b[i];
  return count;
}

constexpr KernelTable kNeon = {
    "neon", masked_copy, accumulate, divide,        matvec_colmajor,
    relu,   mask_and,    mask_or,    count_mismatch,
};

}  // namespace

const KernelTable* neon_kernels() { return &kNeon; }

}  // namespace muscert::kernels
