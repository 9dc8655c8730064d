#ifndef MUSCERT_SELFCHECK_H_
#define MUSCERT_SELFCHECK_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "muscert/models.h"

namespace muscert {

// Random built-in models with entries uniform in [-scale, scale] drawn from
// the project LCG.
std::shared_ptr<LinearSoftmaxModel> random_linear_model(size_t d, size_t m,
                                                        double scale,
                                                        uint64_t rng_state);
std::shared_ptr<MlpModel> random_mlp_model(size_t d, size_t h, size_t m,
                                           double scale, uint64_t rng_state);
// Entries uniform in [-scale, scale].
InputVector random_input(size_t d, double scale, uint64_t rng_state);

struct SelfcheckOptions {
  size_t max_n = 8;  // at most 10; the Lipschitz suite caps n at 8
  size_t trials = 20;
  uint64_t seed = 0;
  // When both are set every suite uses this single λ = lambda_num / q
  // instead of sweeping q ∈ {4, 8, 16} and its full grid.
  std::optional<uint64_t> q;
  std::optional<uint64_t> lambda_num;
};

struct SuiteReport {
  std::string name;
  size_t trials = 0;
  size_t checks = 0;
  size_t failures = 0;
  std::optional<uint64_t> failing_seed;  // trial seed of the first failure
  std::string detail;

  bool passed() const { return failures == 0; }
};

// Runs the brute-force oracle suites: lipschitz, masking_equivalence,
// lqv_marginals, certificate_soundness, shap_efficiency, gradient_fd.
// Throws ConfigError before running anything if the options are invalid.
std::vector<SuiteReport> run_selfcheck(const SelfcheckOptions& options);

}  // namespace muscert

#endif  // MUSCERT_SELFCHECK_H_
