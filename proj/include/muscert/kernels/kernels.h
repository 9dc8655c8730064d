#ifndef MUSCERT_KERNELS_KERNELS_H_
#define MUSCERT_KERNELS_KERNELS_H_

// Data-parallel inner loops shared by masking, smoothing and the built-in
// models. Each kernel has a scalar reference and optional SIMD variants; all
// variants must produce bit-identical results. That holds because every kernel
// is either elementwise or parallel across independent outputs, and no variant
// contracts a multiply-add into an FMA.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace muscert::kernels {

struct KernelTable {
  const char* name;

  // out[i] = keep[i] ? x[i] : 0.0 (positive zero).
  void (*masked_copy)(const double* x, const uint8_t* keep, double* out,
                      size_t n);
  // acc[i] += v[i].
  void (*accumulate)(double* acc, const double* v, size_t n);
  // v[i] /= divisor.
  void (*divide)(double* v, double divisor, size_t n);
  // out[r] = sum_{j ascending} wt[j * rows + r] * x[j], for r < rows.
  // wt is the column-major (transposed) weight matrix.
  void (*matvec_colmajor)(const double* wt, size_t rows, size_t cols,
                          const double* x, double* out);
  // v[i] = max(v[i], 0.0), with -0.0 and NaN-free inputs mapped to +0.0.
  void (*relu)(double* v, size_t n);
  // out[i] = a[i] & b[i] for 0/1 bytes.
  void (*mask_and)(const uint8_t* a, const uint8_t* b, uint8_t* out, size_t n);
  // out[i] = a[i] | b[i] for 0/1 bytes.
  void (*mask_or)(const uint8_t* a, const uint8_t* b, uint8_t* out, size_t n);
  // Number of positions with a[i] != b[i].
  size_t (*count_mismatch)(const uint8_t* a, const uint8_t* b, size_t n);
};

const KernelTable& scalar_kernels();

// nullptr when the variant was not compiled in or the CPU lacks support.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

// Best variant for this CPU. MUSCERT_SIMD=scalar|avx2|neon in the environment
// overrides the choice (unknown or unsupported values fall back to scalar).
const KernelTable& active();

// Forces a variant by name for the remainder of the process; returns false
// when it is unavailable. Intended for tests and benchmarks.
bool select(std::string_view name);

}  // namespace muscert::kernels

#endif  // MUSCERT_KERNELS_KERNELS_H_
