#include "muscert/core.h"

#include <gtest/gtest.h>

#include <cmath>

#include "muscert/error.h"
#include "muscert/lcg.h"
#include "test_support.h"

namespace muscert {
namespace {

TEST(MaskApply, ZeroesDroppedFeatures) {
  const InputVector x{3.0, -2.0, 5.0};
  const auto out = mask_apply(x, Mask::from_string("101"),
                              FeatureGrouping::trivial(3));
  EXPECT_EQ(out, (InputVector{3.0, 0.0, 5.0}));
  EXPECT_FALSE(std::signbit(out[1]));
}

TEST(MaskApply, AllOnesIsIdentity) {
  Lcg lcg(7);
  for (size_t d = 1; d < 20; ++d) {
    InputVector x(d);
    for (double& v : x) v = lcg.next_double() - 0.5;
    EXPECT_EQ(mask_apply(x, Mask::ones(d), FeatureGrouping::trivial(d)), x);
  }
}

TEST(MaskApply, GroupedLift) {
  const auto g = FeatureGrouping::from_groups(4, {{0, 1}, {2, 3}});
  EXPECT_EQ(mask_apply(InputVector{1, 2, 3, 4}, Mask::from_string("10"), g),
            (InputVector{1, 2, 0, 0}));
}

TEST(MaskApply, RejectsWrongLengths) {
  EXPECT_THROW(mask_apply(InputVector{1, 2}, Mask::ones(3),
                          FeatureGrouping::trivial(2)),
               DimensionError);
  EXPECT_THROW(mask_apply(InputVector{1, 2, 3}, Mask::ones(3),
                          FeatureGrouping::trivial(2)),
               DimensionError);
}

TEST(MaskLeq, Examples) {
  EXPECT_TRUE(mask_leq(Mask::from_string("010"), Mask::from_string("110")));
  EXPECT_FALSE(mask_leq(Mask::from_string("10"), Mask::from_string("01")));
  Lcg lcg(3);
  for (int t = 0; t < 50; ++t) {
    const Mask a = testing::random_mask(9, lcg);
    EXPECT_TRUE(mask_leq(a, a));
    EXPECT_TRUE(mask_leq(a & testing::random_mask(9, lcg), a));
    EXPECT_TRUE(mask_leq(a, a | testing::random_mask(9, lcg)));
  }
  EXPECT_THROW(mask_leq(Mask::ones(2), Mask::ones(3)), DimensionError);
}

TEST(L1Distance, Examples) {
  EXPECT_EQ(l1_distance(Mask::from_string("101"), Mask::from_string("111")), 1u);
  EXPECT_EQ(l1_distance(Mask::from_string("00"), Mask::from_string("11")), 2u);
  Lcg lcg(5);
  for (int t = 0; t < 50; ++t) {
    const Mask a = testing::random_mask(40, lcg);
    const Mask b = testing::random_mask(40, lcg);
    EXPECT_EQ(l1_distance(a, a), 0u);
    EXPECT_EQ(l1_distance(a, b), l1_distance(b, a));
    EXPECT_EQ(l1_distance(a, b), (a | b).popcount() - (a & b).popcount());
  }
}

TEST(TopClassAndGap, Examples) {
  auto t = top_class_and_gap(Logits{0.7, 0.2, 0.1});
  EXPECT_EQ(t.cls, 0u);
  EXPECT_DOUBLE_EQ(t.gap, 0.5);
  t = top_class_and_gap(Logits{0.5, 0.5});
  EXPECT_EQ(t.cls, 0u);
  EXPECT_EQ(t.gap, 0.0);
  t = top_class_and_gap(Logits{0.0, 1.0, 0.0});
  EXPECT_EQ(t.cls, 1u);
  EXPECT_EQ(t.gap, 1.0);
  EXPECT_THROW(top_class_and_gap(Logits{1.0}), ArityError);
}

TEST(Mask, ParsingAndWords) {
  EXPECT_EQ(Mask::from_string("1011").to_string(), "1011");
  EXPECT_EQ(Mask::from_word(0b1101, 4).to_string(), "1011");
  EXPECT_THROW(Mask::from_string("10x"), ParameterError);
  EXPECT_THROW(Mask::from_bits({0, 2}), ParameterError);
  EXPECT_EQ(Mask::from_string("0110").complement().to_string(), "1001");
}

TEST(FeatureGrouping, ValidatesPartition) {
  EXPECT_THROW(FeatureGrouping::from_groups(3, {{0, 1}}), SchemaError);
  EXPECT_THROW(FeatureGrouping::from_groups(3, {{0, 1}, {1, 2}}), SchemaError);
  EXPECT_THROW(FeatureGrouping::from_groups(2, {{0, 1}, {}}), SchemaError);
  EXPECT_THROW(FeatureGrouping::from_groups(2, {{0, 5}}), SchemaError);
  EXPECT_TRUE(FeatureGrouping::from_groups(2, {{0}, {1}}).is_trivial());
  EXPECT_FALSE(FeatureGrouping::from_groups(2, {{1}, {0}}).is_trivial());
}

TEST(FeatureGrouping, JsonRoundTrip) {
  const auto g = FeatureGrouping::from_groups(5, {{0, 4}, {1}, {2, 3}});
  const auto back = FeatureGrouping::from_json_text(g.to_json_text());
  EXPECT_EQ(back.raw_dim(), 5u);
  EXPECT_EQ(back.group_count(), 3u);
  EXPECT_EQ(back.group_of(4), 0u);
  EXPECT_EQ(back.group_of(3), 2u);
  EXPECT_THROW(FeatureGrouping::from_json_text("{"), ParseError);
  EXPECT_THROW(FeatureGrouping::from_json_text(R"({"d":2})"), SchemaError);
}

TEST(ValidateLogits, ContractChecks) {
  EXPECT_NO_THROW(validate_logits(Logits{0.25, 0.75}, 2));
  EXPECT_THROW(validate_logits(Logits{0.25, 0.75}, 3), ClassifierContractError);
  EXPECT_THROW(validate_logits(Logits{-0.1, 1.1}, 2), ClassifierContractError);
  EXPECT_THROW(validate_logits(Logits{0.5, 0.6}, 2), ClassifierContractError);
}

TEST(Classifier, DefaultGradientIsUnavailable) {
  const auto h = testing::indicator_classifier(2);
  EXPECT_FALSE(h->has_gradient());
  EXPECT_THROW(h->gradient(InputVector{1, 1}, 0), CapabilityError);
}

}  // namespace
}  // namespace muscert
