#include "muscert/certify.h"

#include <set>

#include <gtest/gtest.h>

#include "json.hpp"
#include "muscert/error.h"
#include "muscert/lcg.h"
#include "muscert/selfcheck.h"
#include "test_support.h"

namespace muscert {
namespace {

using testing::indicator_model;

TEST(Radius, FormulaExamples) {
  Radius r = radius_from_gap(0.5, 1.0 / 8);
  EXPECT_EQ(r.real, 2.0);
  EXPECT_EQ(r.integer, 2u);
  r = radius_from_gap(0.2, 0.5);
  EXPECT_DOUBLE_EQ(r.real, 0.2);
  EXPECT_EQ(r.integer, 0u);
  r = radius_from_gap(0.0, 0.5);
  EXPECT_EQ(r.real, 0.0);
  EXPECT_EQ(r.integer, 0u);
  r = radius_from_gap(1.0, 1.0 / 8);
  EXPECT_EQ(r.real, 4.0);
  EXPECT_EQ(r.integer, 4u);
  r = radius_from_gap(1.0, 0.5);
  EXPECT_EQ(r.real, 1.0);
  EXPECT_EQ(r.integer, 1u);
  EXPECT_THROW(radius_from_gap(0.5, 0.0), ParameterError);
}

TEST(Consistency, IndicatorExample) {
  const SmoothedModel model = indicator_model();
  EXPECT_FALSE(consistency_check(model, InputVector{1, 1},
                                 Mask::from_string("01")));
  EXPECT_TRUE(consistency_check(model, InputVector{1, 1}, Mask::ones(2)));
}

TEST(Consistency, AllOnesAlwaysConsistent) {
  Lcg lcg(1);
  for (int t = 0; t < 30; ++t) {
    auto base = random_linear_model(5, 3, 3.0, lcg.next());
    SmoothedModel model(base, FeatureGrouping::trivial(5),
                        SmoothingConfig(8, 1 + lcg.next_below(8), t, 5));
    EXPECT_TRUE(consistency_check(model, random_input(5, 1.0, lcg.next()),
                                  Mask::ones(5)));
  }
}

TEST(CertifyExample, IndicatorRecord) {
  const CertRecord r = certify_example(indicator_model(), InputVector{1, 1},
                                       Mask::from_string("01"), "ex");
  EXPECT_EQ(r.id, "ex");
  EXPECT_EQ(r.phi, "01");
  EXPECT_EQ(r.class_full, 0u);
  EXPECT_EQ(r.class_attr, 1u);
  EXPECT_FALSE(r.consistent);
  EXPECT_EQ(r.gap_at_attr, 1.0);
  EXPECT_EQ(r.gap_at_ones, 0.0);
  EXPECT_EQ(r.r_inc_real, 1.0);
  EXPECT_EQ(r.r_inc, 1u);
  EXPECT_EQ(r.r_dec, 0u);
  EXPECT_EQ(r.lambda, 0.5);
  EXPECT_EQ(r.q, 4u);
  EXPECT_EQ(r.lambda_num, 2u);
  EXPECT_EQ(r.mu_mode, MuMode::kNone);
}

TEST(CertifyExample, AllOnesSharesGap) {
  Lcg lcg(2);
  for (int t = 0; t < 20; ++t) {
    auto base = random_linear_model(6, 3, 3.0, lcg.next());
    SmoothedModel model(base, FeatureGrouping::trivial(6),
                        SmoothingConfig(16, 2, t, 6));
    const CertRecord r = certify_example(
        model, random_input(6, 1.0, lcg.next()), Mask::ones(6), "x");
    EXPECT_TRUE(r.consistent);
    EXPECT_EQ(r.gap_at_attr, r.gap_at_ones);
    EXPECT_EQ(r.r_inc, r.r_dec);
  }
}

TEST(CertifyExample, LambdaOneGivesZeroRadii) {
  Lcg lcg(3);
  for (int t = 0; t < 50; ++t) {
    auto base = random_linear_model(4, 2, 5.0, lcg.next());
    SmoothedModel model(base, FeatureGrouping::trivial(4),
                        SmoothingConfig(4, 4, t, 4));
    const CertRecord r = certify_example(model, random_input(4, 2.0, lcg.next()),
                                         testing::random_mask(4, lcg), "x");
    EXPECT_EQ(r.r_inc, 0u);
    EXPECT_EQ(r.r_dec, 0u);
    EXPECT_LE(r.r_inc_real, 0.5);
  }
}

TEST(CertifyExample, PhiModeRecordsMode) {
  const CertRecord r =
      certify_example(indicator_model(), InputVector{1, 1},
                      Mask::from_string("10"), "ex", MuMode::kPhi);
  EXPECT_EQ(r.mu_mode, MuMode::kPhi);
  // With x0 protected the indicator always fires.
  EXPECT_EQ(r.class_full, 0u);
  EXPECT_EQ(r.class_attr, 0u);
  EXPECT_EQ(r.gap_at_attr, 1.0);
}

TEST(CertRecordJson, SchemaAndOrder) {
  const CertRecord r = certify_example(indicator_model(), InputVector{1, 1},
                                       Mask::from_string("01"), "7");
  const std::string text = cert_record_to_json(r);
  EXPECT_EQ(text.find('\n'), std::string::npos);
  const auto j = nlohmann::json::parse(text);
  EXPECT_EQ(j["type"], "cert");
  EXPECT_EQ(j["id"], "7");
  for (const char* key :
       {"phi", "class_full", "class_attr", "consistent", "gap_at_attr",
        "gap_at_ones", "r_inc_real", "r_dec_real", "r_inc", "r_dec", "lambda",
        "q", "lambda_num", "seed", "mu_mode"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_EQ(text.rfind("{\"type\":\"cert\"", 0), 0u);
}

TEST(MuMode, Parse) {
  EXPECT_EQ(parse_mu_mode("none"), MuMode::kNone);
  EXPECT_EQ(parse_mu_mode("phi"), MuMode::kPhi);
  EXPECT_THROW(parse_mu_mode("all"), ParameterError);
}

TEST(StabilityOracle, EnumeratesSupersets) {
  std::set<std::string> seen;
  // λ = 1 so every atom is all ones and the probe sees x ⊙ α directly.
  SmoothedModel probe(make_classifier(3, 2,
                                      [&](std::span<const double> z) {
                                        std::string key;
                                        for (double v : z) {
                                          key += v != 0.0 ? '1' : '0';
                                        }
                                        seen.insert(key);
                                        return Logits{1.0, 0.0};
                                      }),
                      FeatureGrouping::trivial(3), SmoothingConfig(2, 2, 0, 3));
  EXPECT_TRUE(brute_force_stability_oracle(probe, InputVector{1, 1, 1},
                                           Mask::from_string("100"), 2,
                                           StabilityMode::kIncremental));
  EXPECT_EQ(seen, (std::set<std::string>{"100", "110", "101", "111"}));

  seen.clear();
  EXPECT_TRUE(brute_force_stability_oracle(probe, InputVector{1, 1, 1},
                                           Mask::from_string("100"), 1,
                                           StabilityMode::kDecremental));
  EXPECT_EQ(seen, (std::set<std::string>{"111", "110", "101"}));

  seen.clear();
  EXPECT_TRUE(brute_force_stability_oracle(probe, InputVector{1, 1, 1},
                                           Mask::from_string("100"), 0,
                                           StabilityMode::kIncremental));
  EXPECT_EQ(seen, (std::set<std::string>{"100"}));
}

TEST(StabilityOracle, GuardsLargeEnumerations) {
  auto base = random_linear_model(24, 2, 1.0, 1);
  SmoothedModel model(base, FeatureGrouping::trivial(24),
                      SmoothingConfig(4, 1, 0, 24));
  EXPECT_THROW(brute_force_stability_oracle(model, InputVector(24, 1.0),
                                            Mask::zeros(24), 1,
                                            StabilityMode::kIncremental),
               ResourceError);
}

TEST(FullStability, Examples) {
  EXPECT_TRUE(full_stability_check(indicator_model(), InputVector{1, 1},
                                   Mask::from_string("10")));
  EXPECT_TRUE(full_stability_check(indicator_model(), InputVector{1, 1},
                                   Mask::ones(2)));
  EXPECT_FALSE(full_stability_check(indicator_model(), InputVector{1, 1},
                                    Mask::from_string("01")));
}

// With a one-hot base the gap can hit 2λr exactly, and the resulting tie
// resolves to the lowest index.
TEST(StabilityOracle, ExactTieAtBoundaryCanFlip) {
  const CertRecord r = certify_example(indicator_model(), InputVector{1, 1},
                                       Mask::from_string("01"), "x");
  EXPECT_EQ(r.r_inc_real, 1.0);
  EXPECT_FALSE(brute_force_stability_oracle(
      indicator_model(), InputVector{1, 1}, Mask::from_string("01"), r.r_inc,
      StabilityMode::kIncremental));
}

TEST(Soundness, RandomLogisticModels) {
  Lcg lcg(99);
  size_t nontrivial = 0;
  for (int t = 0; t < 200; ++t) {
    const size_t n = 1 + lcg.next_below(8);
    auto base = random_linear_model(n, 2 + lcg.next_below(2), 4.0, lcg.next());
    const uint64_t q = 16;
    SmoothedModel model(base, FeatureGrouping::trivial(n),
                        SmoothingConfig(q, 1 + lcg.next_below(4), lcg.next(), n));
    const InputVector x = random_input(n, 2.0, lcg.next());
    const Mask phi = testing::random_mask(n, lcg);
    for (MuMode mode : {MuMode::kNone, MuMode::kPhi}) {
      const CertRecord r = certify_example(model, x, phi, "x", mode);
      const SmoothedModel c = model_for_mode(model, phi, mode);
      nontrivial += r.r_inc > 0 || r.r_dec > 0;
      EXPECT_TRUE(brute_force_stability_oracle(c, x, phi, r.r_inc,
                                               StabilityMode::kIncremental));
      EXPECT_TRUE(brute_force_stability_oracle(c, x, phi, r.r_dec,
                                               StabilityMode::kDecremental));
    }
  }
  EXPECT_GT(nontrivial, 0u);
}

}  // namespace
}  // namespace muscert
