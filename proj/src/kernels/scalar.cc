#include "muscert/kernels/kernels.h"

namespace muscert::kernels {
namespace {

void masked_copy(const double* x, const uint8_t* keep, double* out, size_t n) {
  for (size_t i = 0; i < n; ++i) out[i] = keep[i] ? x[i] : 0.0;
}

void accumulate(double* acc, const double* v, size_t n) {
  for (size_t i = 0; i < n; ++i) acc[i] += v[i];
}

void divide(double* v, double divisor, size_t n) {
  for (size_t i = 0; i < n; ++i) v[i] /= divisor;
}

void matvec_colmajor(const double* wt, size_t rows, size_t cols,
                     const double* x, double* out) {
  for (size_t r = 0; r < rows; ++r) out[r] = 0.0;
  for (size_t j = 0; j < cols; ++j) {
    const double xj = x[j];
    const double* col = wt + j * rows;
    for (size_t r = 0; r < rows; ++r) out[r] += col[r] * xj;
  }
}

void relu(double* v, size_t n) {
  for (size_t i = 0; i < n; ++i) v[i] = v[i] > 0.0 ? v[i] : 0.0;
}

void mask_and(const uint8_t* a, const uint8_t* b, uint8_t* out, size_t n) {
  for (size_t i = 0; i < n; ++i) out[i] = a[i] & b[i];
}

void mask_or(const uint8_t* a, const uint8_t* b, uint8_t* out, size_t n) {
  for (size_t i = 0; i < n; ++i) out[i] = a[i] | b[i];
}

size_t count_mismatch(const uint8_t* a, const uint8_t* b, size_t n) {
  size_t count = 0;
  for (size_t i = 0; i < n; ++i) count += a[i] != b[i];
  return count;
}

constexpr KernelTable kScalar = {
    "scalar", masked_copy, accumulate, divide,        matvec_colmajor,
    relu,     mask_and,    mask_or,    count_mismatch,
};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace muscert::kernels
