#ifndef MUSCERT_SMOOTHING_H_
#define MUSCERT_SMOOTHING_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>

#include "muscert/core.h"
#include "muscert/noise.h"

namespace muscert {

// A base classifier wrapped with multiplicative derandomized smoothing:
//   g(x, α) = (1/q) Σ_j h(x ⊙ (μ ∨ (α ∧ s_j)))
// over the q atoms s_j of the config. μ (absent = all zeros) marks protected
// features that are never dropped by the noise.
class SmoothedModel {
 public:
  // Throws DimensionError when base, grouping, config and μ disagree on sizes.
  SmoothedModel(ClassifierHandle base, FeatureGrouping grouping,
                SmoothingConfig cfg, std::optional<Mask> mu = std::nullopt);

  const ClassifierHandle& base() const { return base_; }
  const FeatureGrouping& grouping() const { return *grouping_; }
  const SmoothingConfig& cfg() const { return cfg_; }
  const NoiseAtoms& atoms() const { return *atoms_; }
  const std::optional<Mask>& mu() const { return mu_; }

  size_t n() const { return cfg_.n(); }
  size_t d() const { return grouping_->raw_dim(); }
  size_t m() const { return base_->num_classes(); }
  double lambda() const { return cfg_.lambda(); }

  // Same base, grouping and atoms with a different noise mask.
  SmoothedModel with_mu(std::optional<Mask> mu) const;

 private:
  ClassifierHandle base_;
  std::shared_ptr<const FeatureGrouping> grouping_;
  SmoothingConfig cfg_;
  std::shared_ptr<const NoiseAtoms> atoms_;
  std::optional<Mask> mu_;
};

// Exact expectation over the q atoms; the base classifier is called exactly q
// times and partial sums are accumulated in ascending atom order. Throws
// DimensionError or ClassifierContractError.
Logits mus_evaluate(const SmoothedModel& model, std::span<const double> x,
                    const Mask& alpha);

// g(x, 1).
Logits smoothed_predict(const SmoothedModel& model, std::span<const double> x);

// Monte Carlo estimate of E h(x ⊙ (α ∧ s)) with s ~ Bernoulli(λ)^n, drawing
// `samples` masks from iid_bernoulli_masks. Throws ParameterError unless
// λ ∈ [0,1] and samples >= 1.
Logits rmus_estimate(const ClassifierHandle& base,
                     const FeatureGrouping& grouping, std::span<const double> x,
                     const Mask& alpha, double lambda, size_t samples,
                     uint64_t rng_state);

// Tolerance for masking_equivalence_check.
inline constexpr double kEquivalenceTolerance = 1e-12;

// g(x, α) == g(x ⊙ α, 1) coordinatewise within kEquivalenceTolerance.
// Throws PreconditionError when μ is present and μ ⋠ α.
bool masking_equivalence_check(const SmoothedModel& model,
                               std::span<const double> x, const Mask& alpha);

// Counterexample showing additive noise leaks masked information:
// h(z) = 0 iff z = 0, x = 1, α = 0, s ∈ {+1, -1} equiprobable.
struct LeakageReport {
  size_t n = 0;
  double additive_lhs = 0.0;        // E h(x ⊙ (α + s))
  double additive_rhs = 0.0;        // E h((x ⊙ α) ⊙ (1 + s))
  double multiplicative_lhs = 0.0;  // E h(x ⊙ (α ⊙ s))
  double multiplicative_rhs = 0.0;  // E h((x ⊙ α) ⊙ (1 ⊙ s))
};

// Throws ParameterError when n == 0.
LeakageReport additive_leakage_demo(size_t n);

}  // namespace muscert

#endif  // MUSCERT_SMOOTHING_H_
