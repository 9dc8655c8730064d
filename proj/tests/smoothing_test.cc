#include "muscert/smoothing.h"

#include <cstring>

#include <gtest/gtest.h>

#include "muscert/error.h"
#include "muscert/kernels/kernels.h"
#include "muscert/lcg.h"
#include "muscert/selfcheck.h"
#include "test_support.h"

namespace muscert {
namespace {

using testing::indicator_model;

TEST(MusEvaluate, IndicatorExample) {
  const SmoothedModel model = indicator_model();
  EXPECT_EQ(mus_evaluate(model, InputVector{1, 1}, Mask::ones(2)),
            (Logits{0.5, 0.5}));
  EXPECT_EQ(smoothed_predict(model, InputVector{1, 1}), (Logits{0.5, 0.5}));
  EXPECT_EQ(mus_evaluate(model, InputVector{1, 1}, Mask::from_string("01")),
            (Logits{0.0, 1.0}));
}

TEST(MusEvaluate, LambdaOneIsBase) {
  Lcg lcg(1);
  for (int t = 0; t < 20; ++t) {
    auto base = random_linear_model(6, 3, 2.0, lcg.next());
    SmoothedModel model(base, FeatureGrouping::trivial(6),
                        SmoothingConfig(8, 8, lcg.next(), 6));
    const InputVector x = random_input(6, 2.0, lcg.next());
    const Mask alpha = testing::random_mask(6, lcg);
    const Logits expect =
        base->evaluate(mask_apply(x, alpha, FeatureGrouping::trivial(6)));
    const Logits got = mus_evaluate(model, x, alpha);
    for (size_t c = 0; c < 3; ++c) EXPECT_NEAR(got[c], expect[c], 1e-15);
  }
}

TEST(MusEvaluate, FullMuIgnoresAlpha) {
  Lcg lcg(2);
  auto base = random_linear_model(5, 2, 2.0, lcg.next());
  SmoothedModel model(base, FeatureGrouping::trivial(5),
                      SmoothingConfig(4, 1, 0, 5), Mask::ones(5));
  const InputVector x = random_input(5, 1.0, lcg.next());
  const Logits h = base->evaluate(x);
  for (uint64_t w = 0; w < 32; ++w) {
    const Logits g = mus_evaluate(model, x, Mask::from_word(w, 5));
    for (size_t c = 0; c < 2; ++c) EXPECT_NEAR(g[c], h[c], 1e-15);
  }
}

TEST(MusEvaluate, ExactlyQCallsAndMatchesReenumeration) {
  Lcg lcg(3);
  for (int t = 0; t < 30; ++t) {
    const size_t n = 1 + lcg.next_below(8);
    const uint64_t q = 2 + lcg.next_below(20);
    const uint64_t k = 1 + lcg.next_below(q);
    const uint64_t seed = lcg.next();
    auto base = random_linear_model(n, 3, 2.0, lcg.next());
    auto counter = std::make_shared<testing::CountingClassifier>(base);
    SmoothedModel model(counter, FeatureGrouping::trivial(n),
                        SmoothingConfig(q, k, seed, n));
    const InputVector x = random_input(n, 2.0, lcg.next());
    const Mask alpha = testing::random_mask(n, lcg);
    counter->reset();
    const Logits g = mus_evaluate(model, x, alpha);
    EXPECT_EQ(counter->calls(), q);

    Logits ref(3, 0.0);
    for (const auto& atom : testing::reference_atoms(q, k, seed, n)) {
      InputVector z(n);
      for (size_t i = 0; i < n; ++i) z[i] = alpha[i] && atom[i] ? x[i] : 0.0;
      const Logits y = base->evaluate(z);
      for (size_t c = 0; c < 3; ++c) ref[c] += y[c];
    }
    for (size_t c = 0; c < 3; ++c) {
      EXPECT_NEAR(g[c], ref[c] / static_cast<double>(q), 1e-12);
    }
  }
}

TEST(MusEvaluate, SmoothedPredictIsAllOnes) {
  Lcg lcg(4);
  auto base = random_mlp_model(7, 5, 3, 1.0, lcg.next());
  SmoothedModel model(base, FeatureGrouping::trivial(7),
                      SmoothingConfig(16, 5, 1, 7));
  const InputVector x = random_input(7, 1.0, lcg.next());
  const Logits a = smoothed_predict(model, x);
  const Logits b = mus_evaluate(model, x, Mask::ones(7));
  EXPECT_EQ(std::memcmp(a.data(), b.data(), sizeof(double) * a.size()), 0);
}

TEST(MusEvaluate, GroupedModel) {
  const auto g = FeatureGrouping::from_groups(4, {{0, 1}, {2, 3}});
  auto base = random_linear_model(4, 2, 1.0, 77);
  SmoothedModel model(base, g, SmoothingConfig(4, 4, 0, 2));
  const InputVector x{1, 2, 3, 4};
  const Logits got = mus_evaluate(model, x, Mask::from_string("10"));
  const Logits expect = base->evaluate(InputVector{1, 2, 0, 0});
  for (size_t c = 0; c < 2; ++c) EXPECT_NEAR(got[c], expect[c], 1e-15);
  EXPECT_THROW(SmoothedModel(base, g, SmoothingConfig(4, 4, 0, 3)),
               DimensionError);
}

TEST(MusEvaluate, SimdVariantsAgreeBitForBit) {
  const auto* fast = kernels::avx2_kernels() ? kernels::avx2_kernels()
                                             : kernels::neon_kernels();
  if (!fast) GTEST_SKIP() << "no SIMD variant on this machine";
  Lcg lcg(5);
  for (int t = 0; t < 20; ++t) {
    const size_t d = 1 + lcg.next_below(37);
    auto lin = random_linear_model(d, 4, 2.0, lcg.next());
    auto mlp = random_mlp_model(d, 9, 3, 1.0, lcg.next());
    const InputVector x = random_input(d, 2.0, lcg.next());
    const Mask alpha = testing::random_mask(d, lcg);
    for (ClassifierHandle base : {ClassifierHandle(lin), ClassifierHandle(mlp)}) {
      SmoothedModel model(base, FeatureGrouping::trivial(d),
                          SmoothingConfig(16, 6, lcg.next(), d));
      kernels::select("scalar");
      const Logits a = mus_evaluate(model, x, alpha);
      kernels::select(fast->name);
      const Logits b = mus_evaluate(model, x, alpha);
      kernels::select("scalar");
      ASSERT_EQ(a.size(), b.size());
      EXPECT_EQ(std::memcmp(a.data(), b.data(), sizeof(double) * a.size()), 0);
    }
  }
}

TEST(MusEvaluate, ContractViolationsSurface) {
  auto bad = make_classifier(2, 2, [](std::span<const double>) {
    return Logits{0.9, 0.9};
  });
  SmoothedModel model(bad, FeatureGrouping::trivial(2),
                      SmoothingConfig(4, 2, 0, 2));
  EXPECT_THROW(mus_evaluate(model, InputVector{1, 1}, Mask::ones(2)),
               ClassifierContractError);
  EXPECT_THROW(mus_evaluate(indicator_model(), InputVector{1, 1, 1},
                            Mask::ones(2)),
               DimensionError);
}

TEST(RmusEstimate, Extremes) {
  const auto h = testing::indicator_classifier(2);
  const auto g = FeatureGrouping::trivial(2);
  EXPECT_EQ(rmus_estimate(h, g, InputVector{1, 1}, Mask::ones(2), 1.0, 50, 3),
            (Logits{1.0, 0.0}));
  EXPECT_EQ(rmus_estimate(h, g, InputVector{1, 1}, Mask::ones(2), 0.0, 50, 3),
            (Logits{0.0, 1.0}));
  EXPECT_THROW(rmus_estimate(h, g, InputVector{1, 1}, Mask::ones(2), 0.5, 0, 3),
               ParameterError);
}

TEST(RmusEstimate, ConvergesToIidExpectation) {
  const auto h = testing::indicator_classifier(2);
  const Logits est = rmus_estimate(h, FeatureGrouping::trivial(2),
                                   InputVector{1, 1}, Mask::ones(2), 0.5,
                                   20000, 42);
  EXPECT_NEAR(est[0], 0.5, 0.02);
  EXPECT_NEAR(est[1], 0.5, 0.02);
}

TEST(MaskingEquivalence, IndicatorExample) {
  const SmoothedModel model = indicator_model();
  EXPECT_TRUE(masking_equivalence_check(model, InputVector{1, 1},
                                        Mask::from_string("01")));
  EXPECT_TRUE(masking_equivalence_check(model, InputVector{1, 1},
                                        Mask::ones(2)));
}

TEST(MaskingEquivalence, SelectiveRequiresAlphaAboveMu) {
  const SmoothedModel model =
      indicator_model().with_mu(Mask::from_string("10"));
  EXPECT_TRUE(masking_equivalence_check(model, InputVector{1, 1},
                                        Mask::from_string("11")));
  EXPECT_THROW(masking_equivalence_check(model, InputVector{1, 1},
                                         Mask::from_string("01")),
               PreconditionError);
}

TEST(AdditiveLeakage, Demo) {
  const LeakageReport r = additive_leakage_demo(1);
  EXPECT_EQ(r.additive_lhs, 1.0);
  EXPECT_EQ(r.additive_rhs, 0.0);
  EXPECT_GT(r.additive_lhs, r.additive_rhs + 0.1);
  EXPECT_NEAR(r.multiplicative_lhs, r.multiplicative_rhs, 1e-12);
  for (size_t n = 2; n <= 6; ++n) {
    const LeakageReport big = additive_leakage_demo(n);
    EXPECT_GT(big.additive_lhs, big.additive_rhs + 0.1);
    EXPECT_NEAR(big.multiplicative_lhs, big.multiplicative_rhs, 1e-12);
  }
  EXPECT_THROW(additive_leakage_demo(0), ParameterError);
}

}  // namespace
}  // namespace muscert
