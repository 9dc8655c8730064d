#include "muscert/kernels/kernels.h"

#include <cstring>
#include <vector>

#include <gtest/gtest.h>

#include <cmath>

#include "muscert/lcg.h"

namespace muscert::kernels {
namespace {

std::vector<const KernelTable*> variants() {
  std::vector<const KernelTable*> out;
  if (avx2_kernels()) out.push_back(avx2_kernels());
  if (neon_kernels()) out.push_back(neon_kernels());
  return out;
}

std::vector<double> random_doubles(size_t n, Lcg& lcg) {
  std::vector<double> v(n);
  for (double& x : v) x = (lcg.next_double() - 0.5) * 1e3;
  return v;
}

std::vector<uint8_t> random_bits(size_t n, Lcg& lcg) {
  std::vector<uint8_t> v(n);
  for (auto& b : v) b = lcg.next_u32() & 1u;
  return v;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

TEST(Kernels, ScalarReference) {
  const KernelTable& s = scalar_kernels();
  const double x[3] = {1.5, -2.0, 3.0};
  const uint8_t keep[3] = {1, 0, 1};
  double out[3];
  s.masked_copy(x, keep, out, 3);
  EXPECT_EQ(out[0], 1.5);
  EXPECT_EQ(out[1], 0.0);
  EXPECT_FALSE(std::signbit(out[1]));
  // 2x3 row-major [[1,2,3],[4,5,6]] stored column-major.
  const double wt[6] = {1, 4, 2, 5, 3, 6};
  double y[2];
  s.matvec_colmajor(wt, 2, 3, x, y);
  EXPECT_EQ(y[0], 1.5 - 4.0 + 9.0);
  EXPECT_EQ(y[1], 6.0 - 10.0 + 18.0);
  double r[3] = {-1.0, -0.0, 2.0};
  s.relu(r, 3);
  EXPECT_EQ(r[0], 0.0);
  EXPECT_FALSE(std::signbit(r[1]));
  EXPECT_EQ(r[2], 2.0);
}

TEST(Kernels, SelectByName) {
  EXPECT_TRUE(select("scalar"));
  EXPECT_STREQ(active().name, "scalar");
  EXPECT_FALSE(select("bogus"));
  for (const KernelTable* v : variants()) {
    EXPECT_TRUE(select(v->name));
    EXPECT_STREQ(active().name, v->name);
  }
  select("scalar");
}

class KernelEquivalence : public ::testing::TestWithParam<size_t> {};

TEST_P(KernelEquivalence, BitIdenticalToScalar) {
  const size_t n = GetParam();
  const KernelTable& s = scalar_kernels();
  Lcg lcg(1000 + n);
  for (const KernelTable* v : variants()) {
    SCOPED_TRACE(v->name);
    const auto x = random_doubles(n, lcg);
    const auto keep = random_bits(n, lcg);
    std::vector<double> a(n), b(n);
    s.masked_copy(x.data(), keep.data(), a.data(), n);
    v->masked_copy(x.data(), keep.data(), b.data(), n);
    EXPECT_TRUE(same_bits(a, b));

    auto acc_a = random_doubles(n, lcg);
    auto acc_b = acc_a;
    s.accumulate(acc_a.data(), x.data(), n);
    v->accumulate(acc_b.data(), x.data(), n);
    EXPECT_TRUE(same_bits(acc_a, acc_b));

    s.divide(acc_a.data(), 7.0, n);
    v->divide(acc_b.data(), 7.0, n);
    EXPECT_TRUE(same_bits(acc_a, acc_b));

    auto r_a = x;
    auto r_b = x;
    if (n > 0) r_a[0] = r_b[0] = -0.0;
    s.relu(r_a.data(), n);
    v->relu(r_b.data(), n);
    EXPECT_TRUE(same_bits(r_a, r_b));

    const auto bits_a = random_bits(n, lcg);
    const auto bits_b = random_bits(n, lcg);
    std::vector<uint8_t> o1(n), o2(n);
    s.mask_and(bits_a.data(), bits_b.data(), o1.data(), n);
    v->mask_and(bits_a.data(), bits_b.data(), o2.data(), n);
    EXPECT_EQ(o1, o2);
    s.mask_or(bits_a.data(), bits_b.data(), o1.data(), n);
    v->mask_or(bits_a.data(), bits_b.data(), o2.data(), n);
    EXPECT_EQ(o1, o2);
    EXPECT_EQ(s.count_mismatch(bits_a.data(), bits_b.data(), n),
              v->count_mismatch(bits_a.data(), bits_b.data(), n));

    for (size_t cols : {size_t{1}, size_t{3}, n + 1}) {
      const size_t rows = n == 0 ? 1 : n;
      const auto wt = random_doubles(rows * cols, lcg);
      const auto in = random_doubles(cols, lcg);
      std::vector<double> y1(rows), y2(rows);
      s.matvec_colmajor(wt.data(), rows, cols, in.data(), y1.data());
      v->matvec_colmajor(wt.data(), rows, cols, in.data(), y2.data());
      EXPECT_TRUE(same_bits(y1, y2)) << "rows=" << rows << " cols=" << cols;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(TailLengths, KernelEquivalence,
                         ::testing::Range<size_t>(0, 70));

}  // namespace
}  // namespace muscert::kernels
