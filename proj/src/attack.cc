#include "muscert/attack.h"

#include <limits>
#include <string>

namespace muscert {
namespace {

AttackResult greedy_search(const SmoothedModel& model,
                           std::span<const double> x, const Mask& phi_x,
                           size_t budget, bool adding) {
  if (phi_x.size() != model.n()) {
    throw DimensionError("attribution length differs from group count");
  }
  const size_t free = model.n() - phi_x.popcount();
  if (budget > free) {
    throw ParameterError("attack budget " + std::to_string(budget) +
                         " exceeds the " + std::to_string(free) +
                         " non-attributed features");
  }
  Mask alpha = adding ? phi_x : Mask::ones(model.n());
  AttackResult result;
  result.reference_class =
      top_class_and_gap(mus_evaluate(model, x, alpha)).cls;
  const bool target_state = adding;  // value a toggled feature takes

  for (size_t step = 1; step <= budget; ++step) {
    size_t best_feature = model.n();
    double best_margin = std::numeric_limits<double>::infinity();
    Logits best_logits;
    for (size_t i = 0; i < model.n(); ++i) {
      if (phi_x[i] || alpha[i] == target_state) continue;
      alpha.set(i, target_state);
      Logits y = mus_evaluate(model, x, alpha);
      alpha.set(i, !target_state);
      const double margin = class_margin(y, result.reference_class);
      if (margin < best_margin) {
        best_margin = margin;
        best_feature = i;
        best_logits = std::move(y);
      }
    }
    alpha.set(best_feature, target_state);
    result.trace.push_back({best_feature, best_margin});
    if (top_class_and_gap(best_logits).cls != result.reference_class) {
      result.found = true;
      result.radius = step;
      result.witness = alpha;
      return result;
    }
  }
  result.radius = budget;
  return result;
}

}  // namespace

double class_margin(std::span<const double> y, size_t cls) {
  double other = -std::numeric_limits<double>::infinity();
  for (size_t c = 0; c < y.size(); ++c) {
    if (c != cls && y[c] > other) other = y[c];
  }
  return y[cls] - other;
}

AttackResult attack_incremental(const SmoothedModel& model,
                                std::span<const double> x, const Mask& phi_x,
                                size_t budget) {
  return greedy_search(model, x, phi_x, budget, /*adding=*/true);
}

AttackResult attack_decremental(const SmoothedModel& model,
                                std::span<const double> x, const Mask& phi_x,
                                size_t budget) {
  return greedy_search(model, x, phi_x, budget, /*adding=*/false);
}

}  // namespace muscert
