#ifndef MUSCERT_ATTRIBUTION_H_
#define MUSCERT_ATTRIBUTION_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "muscert/certify.h"
#include "muscert/core.h"
#include "muscert/smoothing.h"

namespace muscert {

// Continuous per-group importance, higher = more important.
struct ScoreVector {
  std::vector<double> scores;
  std::string method;

  size_t size() const { return scores.size(); }
};

// The probability function a scorer explains, together with its grouping.
// Either a base classifier or the smoothed model g(·, 1).
class ScoringTarget {
 public:
  static ScoringTarget base(ClassifierHandle base, FeatureGrouping grouping);
  static ScoringTarget smoothed(const SmoothedModel& model);

  Logits predict(std::span<const double> x) const { return predict_(x); }
  const FeatureGrouping& grouping() const { return grouping_; }
  // "base" or "smoothed".
  const std::string& kind() const { return kind_; }

 private:
  std::function<Logits(std::span<const double>)> predict_;
  FeatureGrouping grouping_;
  std::string kind_;
};

// score_i = p_c(x) − p_c(x with group i zeroed), c = predicted class at x.
ScoreVector occlusion_scores(const ScoringTarget& target,
                             std::span<const double> x);

struct GradientOptions {
  // Central differences when the classifier exposes no analytic gradient.
  bool finite_difference_fallback = true;
  double step = 1e-4;
};

// Central-difference ∂p_cls/∂x.
std::vector<double> central_difference_gradient(const Classifier& model,
                                                std::span<const double> x,
                                                size_t cls, double step);

// score_i = Σ_{j ∈ group i} |∂p_c/∂x_j| of the base classifier at x.
// Throws CapabilityError when there is no gradient and the fallback is off.
ScoreVector gradient_scores(const ClassifierHandle& base,
                            std::span<const double> x,
                            const FeatureGrouping& grouping,
                            const GradientOptions& options = {});

// Same aggregation applied to the gradient of g(x, 1): the atom average of
// base gradients with masked coordinates contributing zero.
ScoreVector smoothed_gradient_scores(const SmoothedModel& model,
                                     std::span<const double> x,
                                     const GradientOptions& options = {});

struct LinearFit {
  double intercept = 0.0;
  std::vector<double> coefficients;
};

// Weighted least squares of targets on [1, mask bits] with `ridge` added to
// the coefficient diagonal of the normal equations (the intercept is not
// penalized). Throws NumericalError when the system stays singular.
LinearFit fit_weighted_linear(const std::vector<Mask>& design,
                              std::span<const double> targets,
                              std::span<const double> weights,
                              double ridge = 1e-6);

struct LimeOptions {
  size_t samples = 256;
  double kernel_width = 0.0;  // <= 0 selects n / 4
  uint64_t rng_state = 0;
};

// Local linear surrogate over uniformly random masks z with weights
// exp(−(n − |z|)² / width²); scores are the fitted coefficients.
// Throws ParameterError when samples < n + 1.
ScoreVector lime_lite_scores(const ScoringTarget& target,
                             std::span<const double> x,
                             const LimeOptions& options = {});

struct ShapOptions {
  size_t permutations = 64;
  uint64_t rng_state = 0;
};

// Permutation-sampling Shapley estimate with the zero baseline.
// Throws ParameterError when permutations == 0.
ScoreVector shap_lite_scores(const ScoringTarget& target,
                             std::span<const double> x,
                             const ShapOptions& options = {});

// Averages over all n! orderings; n <= 8.
ScoreVector shap_exact_scores(const ScoringTarget& target,
                              std::span<const double> x);

// Group indices by descending score, ties to the lower index.
std::vector<size_t> score_order(const ScoreVector& scores);

// 1 at the k largest scores. Throws ParameterError when k > n.
Mask topk_binarize(const ScoreVector& scores, size_t k);

// First `length` entries of `ordering` set.
Mask prefix_mask(std::span<const size_t> ordering, size_t n, size_t length);

struct PrefixSearchResult {
  size_t length = 0;
  bool met = false;
  bool fell_back = false;  // monotonicity violation forced a linear scan
  size_t predicate_calls = 0;
};

// Smallest prefix length in [1, n] whose mask satisfies `predicate`, assuming
// monotonicity in the length. Verifies the answer and falls back to a linear
// scan if the assumption turns out false. Returns {n, met=false} if no prefix
// passes.
PrefixSearchResult binary_search_prefix(
    std::span<const size_t> ordering, size_t n,
    const std::function<bool(const Mask&)>& predicate);

struct GreedyOptions {
  MuMode mu_mode = MuMode::kNone;
  bool binary_search = false;
};

struct GreedyResult {
  Mask mask;
  bool met = false;
  size_t checks = 0;  // number of candidate masks certified
};

// Adds groups in score order until the prefix is consistent with
// r_inc >= r_inc_target and r_dec >= r_dec_target. Returns the all-ones mask
// with met=false when no prefix qualifies.
GreedyResult greedy_stable_attribution(const SmoothedModel& model,
                                       std::span<const double> x,
                                       const ScoreVector& scores,
                                       size_t r_inc_target, size_t r_dec_target,
                                       const GreedyOptions& options = {});

}  // namespace muscert

#endif  // MUSCERT_ATTRIBUTION_H_
