#include "muscert/attribution.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "muscert/lcg.h"
#include "muscert/noise.h"

namespace muscert {
namespace {

void check_x(const FeatureGrouping& grouping, std::span<const double> x) {
  if (x.size() != grouping.raw_dim()) {
    throw DimensionError("input has " + std::to_string(x.size()) +
                         " features, grouping expects " +
                         std::to_string(grouping.raw_dim()));
  }
}

size_t predicted_class(const ScoringTarget& target, std::span<const double> x) {
  return top_class_and_gap(target.predict(x)).cls;
}

double class_prob(const ScoringTarget& target, std::span<const double> x,
                  const Mask& keep, size_t cls) {
  return target.predict(mask_apply(x, keep, target.grouping()))[cls];
}

std::vector<double> base_gradient(const Classifier& base,
                                  std::span<const double> x, size_t cls,
                                  const GradientOptions& options) {
  if (base.has_gradient()) return base.gradient(x, cls);
  if (!options.finite_difference_fallback) {
    throw CapabilityError(
        "classifier has no gradient and finite differences are disabled");
  }
  return central_difference_gradient(base, x, cls, options.step);
}

ScoreVector group_abs_sum(const std::vector<double>& grad,
                          const FeatureGrouping& grouping, std::string method) {
  ScoreVector out{std::vector<double>(grouping.group_count(), 0.0),
                  std::move(method)};
  for (size_t g = 0; g < grouping.group_count(); ++g) {
    for (size_t j : grouping.group(g)) out.scores[g] += std::abs(grad[j]);
  }
  return out;
}

// Adds each group's marginal contribution along `order` into `totals`.
void accumulate_marginals(const ScoringTarget& target, std::span<const double> x,
                          size_t cls, std::span<const size_t> order,
                          double empty_value, std::vector<double>& totals) {
  Mask coalition(order.size());
  double previous = empty_value;
  for (size_t idx : order) {
    coalition.set(idx, true);
    const double value = class_prob(target, x, coalition, cls);
    totals[idx] += value - previous;
    previous = value;
  }
}

}  // namespace

ScoringTarget ScoringTarget::base(ClassifierHandle base,
                                  FeatureGrouping grouping) {
  if (base->input_dim() != grouping.raw_dim()) {
    throw DimensionError("classifier and grouping disagree on dimension");
  }
  ScoringTarget t;
  t.predict_ = [base = std::move(base)](std::span<const double> x) {
    return base->evaluate(x);
  };
  t.grouping_ = std::move(grouping);
  t.kind_ = "base";
  return t;
}

ScoringTarget ScoringTarget::smoothed(const SmoothedModel& model) {
  ScoringTarget t;
  t.predict_ = [model](std::span<const double> x) {
    return smoothed_predict(model, x);
  };
  t.grouping_ = model.grouping();
  t.kind_ = "smoothed";
  return t;
}

ScoreVector occlusion_scores(const ScoringTarget& target,
                             std::span<const double> x) {
  const FeatureGrouping& grouping = target.grouping();
  check_x(grouping, x);
  const Logits full = target.predict(x);
  const size_t cls = top_class_and_gap(full).cls;
  const size_t n = grouping.group_count();
  ScoreVector out{std::vector<double>(n), "occlusion"};
  Mask keep = Mask::ones(n);
  for (size_t i = 0; i < n; ++i) {
    keep.set(i, false);
    out.scores[i] = full[cls] - class_prob(target, x, keep, cls);
    keep.set(i, true);
  }
  return out;
}

std::vector<double> central_difference_gradient(const Classifier& model,
                                                std::span<const double> x,
                                                size_t cls, double step) {
  if (!(step > 0.0)) throw ParameterError("finite-difference step must be > 0");
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> g(x.size());
  for (size_t j = 0; j < x.size(); ++j) {
    probe[j] = x[j] + step;
    const double up = model.evaluate(probe)[cls];
    probe[j] = x[j] - step;
    const double down = model.evaluate(probe)[cls];
    probe[j] = x[j];
    g[j] = (up - down) / (2.0 * step);
  }
  return g;
}

ScoreVector gradient_scores(const ClassifierHandle& base,
                            std::span<const double> x,
                            const FeatureGrouping& grouping,
                            const GradientOptions& options) {
  check_x(grouping, x);
  // The scored class is fixed from the unmodified input.
  const size_t cls = top_class_and_gap(base->evaluate(x)).cls;
  return group_abs_sum(base_gradient(*base, x, cls, options), grouping,
                       "vgrad");
}

ScoreVector smoothed_gradient_scores(const SmoothedModel& model,
                                     std::span<const double> x,
                                     const GradientOptions& options) {
  const FeatureGrouping& grouping = model.grouping();
  check_x(grouping, x);
  const size_t cls = top_class_and_gap(smoothed_predict(model, x)).cls;
  std::vector<double> grad(x.size(), 0.0);
  std::vector<uint8_t> keep(x.size());
  for (const Mask& atom : model.atoms().atoms) {
    const Mask noised = model.mu() ? (*model.mu() | atom) : atom;
    grouping.expand(noised, keep);
    const InputVector masked = mask_apply(x, noised, grouping);
    const auto g = base_gradient(*model.base(), masked, cls, options);
    for (size_t j = 0; j < x.size(); ++j) {
      if (keep[j]) grad[j] += g[j];
    }
  }
  for (double& v : grad) v /= static_cast<double>(model.atoms().atoms.size());
  return group_abs_sum(grad, grouping, "vgrad-smoothed");
}

LinearFit fit_weighted_linear(const std::vector<Mask>& design,
                              std::span<const double> targets,
                              std::span<const double> weights, double ridge) {
  if (design.empty()) throw ParameterError("empty regression design");
  if (targets.size() != design.size() || weights.size() != design.size()) {
    throw DimensionError("design, targets and weights differ in length");
  }
  const size_t n = design.front().size();
  const size_t p = n + 1;
  Eigen::MatrixXd ata = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd atb = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd row(p);
  for (size_t s = 0; s < design.size(); ++s) {
    if (design[s].size() != n) throw DimensionError("ragged regression design");
    row[0] = 1.0;
    for (size_t i = 0; i < n; ++i) row[i + 1] = design[s][i] ? 1.0 : 0.0;
    ata.noalias() += weights[s] * row * row.transpose();
    atb += (weights[s] * targets[s]) * row;
  }
  ata.diagonal().tail(n).array() += ridge;
  const Eigen::LLT<Eigen::MatrixXd> llt(ata);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("weighted least squares system is singular");
  }
  const Eigen::VectorXd beta = llt.solve(atb);
  if (!beta.allFinite()) {
    throw NumericalError("weighted least squares system is singular");
  }
  LinearFit fit;
  fit.intercept = beta[0];
  fit.coefficients.assign(beta.data() + 1, beta.data() + p);
  return fit;
}

ScoreVector lime_lite_scores(const ScoringTarget& target,
                             std::span<const double> x,
                             const LimeOptions& options) {
  const FeatureGrouping& grouping = target.grouping();
  check_x(grouping, x);
  const size_t n = grouping.group_count();
  if (options.samples < n + 1) {
    throw ParameterError("lime needs at least n + 1 = " +
                         std::to_string(n + 1) + " samples");
  }
  const double width = options.kernel_width > 0.0
                           ? options.kernel_width
                           : static_cast<double>(n) / 4.0;
  const size_t cls = predicted_class(target, x);
  const auto design =
      iid_bernoulli_masks(0.5, n, options.samples, options.rng_state);
  std::vector<double> targets(design.size());
  std::vector<double> weights(design.size());
  for (size_t s = 0; s < design.size(); ++s) {
    const double off = static_cast<double>(n - design[s].popcount());
    weights[s] = std::exp(-(off * off) / (width * width));
    targets[s] = class_prob(target, x, design[s], cls);
  }
  LinearFit fit = fit_weighted_linear(design, targets, weights);
  return {std::move(fit.coefficients), "lime"};
}

ScoreVector shap_lite_scores(const ScoringTarget& target,
                             std::span<const double> x,
                             const ShapOptions& options) {
  const FeatureGrouping& grouping = target.grouping();
  check_x(grouping, x);
  if (options.permutations == 0) {
    throw ParameterError("shap needs at least one permutation");
  }
  const size_t n = grouping.group_count();
  const size_t cls = predicted_class(target, x);
  const double empty_value = class_prob(target, x, Mask::zeros(n), cls);
  std::vector<double> totals(n, 0.0);
  std::vector<size_t> order(n);
  Lcg lcg(options.rng_state);
  for (size_t p = 0; p < options.permutations; ++p) {
    std::iota(order.begin(), order.end(), size_t{0});
    for (size_t i = n; i > 1; --i) {
      std::swap(order[i - 1], order[lcg.next_below(i)]);
    }
    accumulate_marginals(target, x, cls, order, empty_value, totals);
  }
  for (double& v : totals) v /= static_cast<double>(options.permutations);
  return {std::move(totals), "shap"};
}

ScoreVector shap_exact_scores(const ScoringTarget& target,
                              std::span<const double> x) {
  const FeatureGrouping& grouping = target.grouping();
  check_x(grouping, x);
  const size_t n = grouping.group_count();
  if (n > 8) throw ResourceError("exact Shapley enumeration limited to n <= 8");
  const size_t cls = predicted_class(target, x);
  const double empty_value = class_prob(target, x, Mask::zeros(n), cls);
  std::vector<double> totals(n, 0.0);
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  size_t count = 0;
  do {
    accumulate_marginals(target, x, cls, order, empty_value, totals);
    ++count;
  } while (std::next_permutation(order.begin(), order.end()));
  for (double& v : totals) v /= static_cast<double>(count);
  return {std::move(totals), "shap-exact"};
}

std::vector<size_t> score_order(const ScoreVector& scores) {
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return scores.scores[a] > scores.scores[b];
  });
  return order;
}

Mask topk_binarize(const ScoreVector& scores, size_t k) {
  if (k > scores.size()) {
    throw ParameterError("top-k: k=" + std::to_string(k) + " exceeds n=" +
                         std::to_string(scores.size()));
  }
  const auto order = score_order(scores);
  return prefix_mask(order, scores.size(), k);
}

Mask prefix_mask(std::span<const size_t> ordering, size_t n, size_t length) {
  Mask m(n);
  for (size_t t = 0; t < length && t < ordering.size(); ++t) {
    m.set(ordering[t], true);
  }
  return m;
}

PrefixSearchResult binary_search_prefix(
    std::span<const size_t> ordering, size_t n,
    const std::function<bool(const Mask&)>& predicate) {
  PrefixSearchResult result;
  if (n == 0) return result;
  std::map<size_t, bool> cache;
  auto test = [&](size_t length) {
    auto it = cache.find(length);
    if (it != cache.end()) return it->second;
    ++result.predicate_calls;
    const bool ok = predicate(prefix_mask(ordering, n, length));
    cache.emplace(length, ok);
    return ok;
  };
  size_t lo = 1;
  size_t hi = n;
  while (lo < hi) {
    const size_t mid = lo + (hi - lo) / 2;
    if (test(mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  if (test(lo)) {
    result.length = lo;
    result.met = true;
    return result;
  }
  for (size_t length = 1; length <= n; ++length) {
    if (test(length)) {
      result.length = length;
      result.met = true;
      result.fell_back = true;
      return result;
    }
  }
  result.length = n;
  result.met = false;
  return result;
}

GreedyResult greedy_stable_attribution(const SmoothedModel& model,
                                       std::span<const double> x,
                                       const ScoreVector& scores,
                                       size_t r_inc_target, size_t r_dec_target,
                                       const GreedyOptions& options) {
  const size_t n = model.n();
  if (scores.size() != n) {
    throw DimensionError("score vector length differs from group count");
  }
  GreedyResult result;
  auto passes = [&](const Mask& candidate) {
    ++result.checks;
    const CertRecord rec =
        certify_example(model, x, candidate, std::string(), options.mu_mode);
    return rec.consistent && rec.r_inc >= r_inc_target &&
           rec.r_dec >= r_dec_target;
  };
  const auto order = score_order(scores);
  if (options.binary_search) {
    const PrefixSearchResult found = binary_search_prefix(order, n, passes);
    result.mask = found.met ? prefix_mask(order, n, found.length)
                            : Mask::ones(n);
    result.met = found.met;
    return result;
  }
  Mask current(n);
  for (size_t t = 0; t < n; ++t) {
    current.set(order[t], true);
    if (passes(current)) {
      result.mask = current;
      result.met = true;
      return result;
    }
  }
  result.mask = Mask::ones(n);
  result.met = false;
  return result;
}

}  // namespace muscert
