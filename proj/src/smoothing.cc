#include "muscert/smoothing.h"

#include <cmath>
#include <string>
#include <utility>

#include "muscert/kernels/kernels.h"

namespace muscert {
namespace {

void check_input(const SmoothedModel& model, std::span<const double> x,
                 const Mask& alpha) {
  if (x.size() != model.d()) {
    throw DimensionError("input has " + std::to_string(x.size()) +
                         " features, model expects " +
                         std::to_string(model.d()));
  }
  if (alpha.size() != model.n()) {
    throw DimensionError("mask has " + std::to_string(alpha.size()) +
                         " entries, model has " + std::to_string(model.n()) +
                         " feature groups");
  }
}

// Averages h(x ⊙ mask) over `masks` (each pre-combined with α and μ).
class MaskedAverager {
 public:
  MaskedAverager(const ClassifierHandle& base, const FeatureGrouping& grouping,
                 std::span<const double> x)
      : base_(base), grouping_(grouping), x_(x), masked_(x.size()),
        keep_(x.size()), sum_(base->num_classes(), 0.0) {}

  void add(const Mask& mask) {
    mask_apply_into(x_, mask, grouping_, masked_, keep_);
    const Logits y = base_->evaluate(masked_);
    validate_logits(y, sum_.size());
    kernels::active().accumulate(sum_.data(), y.data(), sum_.size());
  }

  Logits finish(size_t count) {
    kernels::active().divide(sum_.data(), static_cast<double>(count),
                             sum_.size());
    return std::move(sum_);
  }

 private:
  const ClassifierHandle& base_;
  const FeatureGrouping& grouping_;
  std::span<const double> x_;
  InputVector masked_;
  std::vector<uint8_t> keep_;
  Logits sum_;
};

}  // namespace

SmoothedModel::SmoothedModel(ClassifierHandle base, FeatureGrouping grouping,
                             SmoothingConfig cfg, std::optional<Mask> mu)
    : base_(std::move(base)),
      grouping_(std::make_shared<const FeatureGrouping>(std::move(grouping))),
      cfg_(cfg),
      mu_(std::move(mu)) {
  if (!base_) throw ParameterError("smoothed model needs a base classifier");
  if (base_->input_dim() != grouping_->raw_dim()) {
    throw DimensionError("classifier expects " +
                         std::to_string(base_->input_dim()) +
                         " features, grouping covers " +
                         std::to_string(grouping_->raw_dim()));
  }
  if (cfg_.n() != grouping_->group_count()) {
    throw DimensionError("config n=" + std::to_string(cfg_.n()) +
                         " differs from grouping group count " +
                         std::to_string(grouping_->group_count()));
  }
  if (mu_ && mu_->size() != cfg_.n()) {
    throw DimensionError("noise mask mu has length " +
                         std::to_string(mu_->size()) + ", expected " +
                         std::to_string(cfg_.n()));
  }
  atoms_ = std::make_shared<const NoiseAtoms>(enumerate_atoms(cfg_));
}

SmoothedModel SmoothedModel::with_mu(std::optional<Mask> mu) const {
  if (mu && mu->size() != n()) {
    throw DimensionError("noise mask mu has length " +
                         std::to_string(mu->size()) + ", expected " +
                         std::to_string(n()));
  }
  SmoothedModel copy = *this;
  copy.mu_ = std::move(mu);
  return copy;
}

Logits mus_evaluate(const SmoothedModel& model, std::span<const double> x,
                    const Mask& alpha) {
  check_input(model, x, alpha);
  const auto& k = kernels::active();
  const size_t n = model.n();
  MaskedAverager avg(model.base(), model.grouping(), x);
  Mask noised(n);
  std::vector<uint8_t> bits(n);
  for (const Mask& atom : model.atoms().atoms) {
    k.mask_and(alpha.bits().data(), atom.bits().data(), bits.data(), n);
    if (model.mu()) {
      k.mask_or(bits.data(), model.mu()->bits().data(), bits.data(), n);
    }
    for (size_t i = 0; i < n; ++i) noised.set(i, bits[i] != 0);
    avg.add(noised);
  }
  return avg.finish(model.atoms().atoms.size());
}

Logits smoothed_predict(const SmoothedModel& model, std::span<const double> x) {
  return mus_evaluate(model, x, Mask::ones(model.n()));
}

Logits rmus_estimate(const ClassifierHandle& base,
                     const FeatureGrouping& grouping, std::span<const double> x,
                     const Mask& alpha, double lambda, size_t samples,
                     uint64_t rng_state) {
  if (samples < 1) throw ParameterError("rmus_estimate needs samples >= 1");
  if (x.size() != grouping.raw_dim() || base->input_dim() != x.size()) {
    throw DimensionError("input, grouping and classifier dimensions differ");
  }
  if (alpha.size() != grouping.group_count()) {
    throw DimensionError("mask length differs from grouping group count");
  }
  const auto noise =
      iid_bernoulli_masks(lambda, grouping.group_count(), samples, rng_state);
  MaskedAverager avg(base, grouping, x);
  for (const Mask& s : noise) avg.add(alpha & s);
  return avg.finish(samples);
}

bool masking_equivalence_check(const SmoothedModel& model,
                               std::span<const double> x, const Mask& alpha) {
  check_input(model, x, alpha);
  if (model.mu() && !mask_leq(*model.mu(), alpha)) {
    throw PreconditionError(
        "masking equivalence requires alpha to include every protected "
        "feature of mu");
  }
  const Logits direct = mus_evaluate(model, x, alpha);
  const InputVector premasked = mask_apply(x, alpha, model.grouping());
  const Logits via_input = smoothed_predict(model, premasked);
  for (size_t c = 0; c < direct.size(); ++c) {
    if (!(std::abs(direct[c] - via_input[c]) <= kEquivalenceTolerance)) {
      return false;
    }
  }
  return true;
}

LeakageReport additive_leakage_demo(size_t n) {
  if (n == 0) throw ParameterError("additive_leakage_demo needs n >= 1");
  auto h = [](const std::vector<double>& z) {
    for (double v : z) {
      if (v != 0.0) return 1.0;
    }
    return 0.0;
  };
  const std::vector<double> x(n, 1.0);
  const std::vector<double> alpha(n, 0.0);
  const double noise_values[2] = {1.0, -1.0};

  LeakageReport report;
  report.n = n;
  for (double sv : noise_values) {
    std::vector<double> add_lhs(n), add_rhs(n), mul_lhs(n), mul_rhs(n);
    for (size_t i = 0; i < n; ++i) {
      const double masked = x[i] * alpha[i];
      add_lhs[i] = x[i] * (alpha[i] + sv);
      add_rhs[i] = masked * (1.0 + sv);
      mul_lhs[i] = x[i] * (alpha[i] * sv);
      mul_rhs[i] = masked * (1.0 * sv);
    }
    report.additive_lhs += 0.5 * h(add_lhs);
    report.additive_rhs += 0.5 * h(add_rhs);
    report.multiplicative_lhs += 0.5 * h(mul_lhs);
    report.multiplicative_rhs += 0.5 * h(mul_rhs);
  }
  return report;
}

}  // namespace muscert
