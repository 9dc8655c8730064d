#ifndef MUSCERT_ATTACK_H_
#define MUSCERT_ATTACK_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "muscert/core.h"
#include "muscert/smoothing.h"

namespace muscert {

// p_cls − max_{c' ≠ cls} p_c'.
double class_margin(std::span<const double> y, size_t cls);

struct AttackStep {
  size_t feature = 0;  // group toggled at this step
  double margin = 0.0; // margin of the reference class after the toggle
};

struct AttackResult {
  bool found = false;
  // Features toggled at the flip, or the exhausted budget when !found (the
  // empirical radius is then at least this value).
  size_t radius = 0;
  std::optional<Mask> witness;
  size_t reference_class = 0;
  std::vector<AttackStep> trace;
};

// Greedy margin descent over α ⪰ φ(x) starting at φ(x): each step adds the
// free group whose inclusion minimizes the margin of class(g(x, φ(x))), ties
// to the lowest index, stopping at the first class change or after `budget`
// steps. Throws ParameterError when budget > n − |φ(x)|.
AttackResult attack_incremental(const SmoothedModel& model,
                                std::span<const double> x, const Mask& phi_x,
                                size_t budget);

// Same search starting from 1 and removing free groups, against
// class(g(x, 1)). Groups of φ(x) are never removed.
AttackResult attack_decremental(const SmoothedModel& model,
                                std::span<const double> x, const Mask& phi_x,
                                size_t budget);

}  // namespace muscert

#endif  // MUSCERT_ATTACK_H_
