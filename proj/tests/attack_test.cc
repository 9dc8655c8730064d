#include "muscert/attack.h"

#include <bit>
#include <limits>

#include <gtest/gtest.h>

#include "muscert/certify.h"
#include "muscert/error.h"
#include "muscert/lcg.h"
#include "muscert/selfcheck.h"
#include "test_support.h"

namespace muscert {
namespace {

struct Instance {
  SmoothedModel model;
  InputVector x;
  Mask phi;
};

Instance random_instance(Lcg& lcg, size_t max_n) {
  const size_t n = 1 + lcg.next_below(max_n);
  auto base = random_linear_model(n, 2 + lcg.next_below(2), 4.0, lcg.next());
  SmoothedModel model(base, FeatureGrouping::trivial(n),
                      SmoothingConfig(16, 1 + lcg.next_below(8), lcg.next(), n));
  return {model, random_input(n, 2.0, lcg.next()), testing::random_mask(n, lcg)};
}

// Smallest number of toggled free features that changes the class, or
// SIZE_MAX when none does.
size_t minimal_flip(const Instance& in, bool incremental) {
  const Mask start = incremental ? in.phi : Mask::ones(in.phi.size());
  const size_t ref =
      top_class_and_gap(mus_evaluate(in.model, in.x, start)).cls;
  std::vector<size_t> free;
  for (size_t i = 0; i < in.phi.size(); ++i) {
    if (!in.phi[i]) free.push_back(i);
  }
  size_t best = std::numeric_limits<size_t>::max();
  for (uint64_t w = 1; w < (uint64_t{1} << free.size()); ++w) {
    const size_t k = std::popcount(w);
    if (k >= best) continue;
    Mask a = start;
    for (size_t b = 0; b < free.size(); ++b) {
      if (w >> b & 1u) a.set(free[b], incremental);
    }
    if (top_class_and_gap(mus_evaluate(in.model, in.x, a)).cls != ref) best = k;
  }
  return best;
}

TEST(ClassMargin, Definition) {
  EXPECT_DOUBLE_EQ(class_margin(Logits{0.5, 0.3, 0.2}, 0), 0.2);
  EXPECT_DOUBLE_EQ(class_margin(Logits{0.5, 0.3, 0.2}, 2), -0.3);
}

TEST(Attack, BudgetZeroFindsNothing) {
  Lcg lcg(1);
  const Instance in = random_instance(lcg, 6);
  for (auto* attack : {&attack_incremental, &attack_decremental}) {
    const AttackResult r = attack(in.model, in.x, in.phi, 0);
    EXPECT_FALSE(r.found);
    EXPECT_EQ(r.radius, 0u);
    EXPECT_FALSE(r.witness.has_value());
  }
}

TEST(Attack, BudgetAboveFreeThrows) {
  const SmoothedModel model = testing::indicator_model();
  EXPECT_THROW(attack_incremental(model, InputVector{1, 1},
                                  Mask::from_string("10"), 2),
               ParameterError);
}

TEST(Attack, NoFlipReportsExhaustedBudget) {
  auto constant = make_classifier(3, 2, [](std::span<const double>) {
    return Logits{0.8, 0.2};
  });
  SmoothedModel model(constant, FeatureGrouping::trivial(3),
                      SmoothingConfig(4, 1, 0, 3));
  const AttackResult r =
      attack_incremental(model, InputVector{1, 1, 1}, Mask::from_string("100"), 2);
  EXPECT_FALSE(r.found);
  EXPECT_EQ(r.radius, 2u);
  EXPECT_EQ(r.trace.size(), 2u);
}

TEST(Attack, GreedyIsUpperBoundOnExhaustive) {
  Lcg lcg(2);
  size_t witnesses = 0;
  for (int t = 0; t < 150; ++t) {
    const Instance in = random_instance(lcg, 10);
    const size_t free = in.phi.size() - in.phi.popcount();
    for (bool inc : {true, false}) {
      const AttackResult r = inc ? attack_incremental(in.model, in.x, in.phi, free)
                                 : attack_decremental(in.model, in.x, in.phi, free);
      const size_t exact = minimal_flip(in, inc);
      if (r.found) {
        ++witnesses;
        EXPECT_GE(r.radius, exact);
        ASSERT_TRUE(r.witness.has_value());
        EXPECT_TRUE(mask_leq(in.phi, *r.witness));
        EXPECT_EQ(l1_distance(*r.witness, inc ? in.phi : Mask::ones(in.phi.size())),
                  r.radius);
        EXPECT_NE(top_class_and_gap(mus_evaluate(in.model, in.x, *r.witness)).cls,
                  r.reference_class);
      } else {
        EXPECT_EQ(r.radius, free);
      }
    }
  }
  EXPECT_GT(witnesses, 10u);
}

TEST(Attack, TraceStepsAreArgMin) {
  Lcg lcg(3);
  for (int t = 0; t < 40; ++t) {
    const Instance in = random_instance(lcg, 8);
    const size_t free = in.phi.size() - in.phi.popcount();
    for (bool inc : {true, false}) {
      const AttackResult r = inc ? attack_incremental(in.model, in.x, in.phi, free)
                                 : attack_decremental(in.model, in.x, in.phi, free);
      Mask current = inc ? in.phi : Mask::ones(in.phi.size());
      for (const AttackStep& step : r.trace) {
        double best = std::numeric_limits<double>::infinity();
        size_t best_i = 0;
        for (size_t i = 0; i < current.size(); ++i) {
          if (in.phi[i] || current[i] == inc) continue;
          Mask probe = current;
          probe.set(i, inc);
          const double m =
              class_margin(mus_evaluate(in.model, in.x, probe), r.reference_class);
          if (m < best) {
            best = m;
            best_i = i;
          }
        }
        EXPECT_EQ(step.feature, best_i);
        EXPECT_EQ(step.margin, best);
        current.set(step.feature, inc);
      }
    }
  }
}

TEST(Attack, NeverInsideCertificate) {
  Lcg lcg(4);
  for (int t = 0; t < 300; ++t) {
    const Instance in = random_instance(lcg, 10);
    const size_t free = in.phi.size() - in.phi.popcount();
    for (MuMode mode : {MuMode::kNone, MuMode::kPhi}) {
      const CertRecord cert = certify_example(in.model, in.x, in.phi, "", mode);
      const SmoothedModel c = model_for_mode(in.model, in.phi, mode);
      const AttackResult inc = attack_incremental(c, in.x, in.phi, free);
      const AttackResult dec = attack_decremental(c, in.x, in.phi, free);
      if (inc.found) EXPECT_GT(inc.radius, cert.r_inc);
      if (dec.found) EXPECT_GT(dec.radius, cert.r_dec);
    }
  }
}

}  // namespace
}  // namespace muscert
