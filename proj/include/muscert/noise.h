#ifndef MUSCERT_NOISE_H_
#define MUSCERT_NOISE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "muscert/core.h"

namespace muscert {

// Quantization q and keep-probability λ = lambda_num / q. The seed fixes the
// per-feature offset vector, so one config fully determines the q noise atoms.
class SmoothingConfig {
 public:
  // Throws ConfigError unless q > 1, 1 <= lambda_num <= q and n >= 1.
  SmoothingConfig(uint64_t q, uint64_t lambda_num, uint64_t seed, size_t n);

  uint64_t q() const { return q_; }
  uint64_t lambda_num() const { return lambda_num_; }
  uint64_t seed() const { return seed_; }
  size_t n() const { return n_; }
  double lambda() const {
    return static_cast<double>(lambda_num_) / static_cast<double>(q_);
  }

 private:
  uint64_t q_;
  uint64_t lambda_num_;
  uint64_t seed_;
  size_t n_;
};

// Integer numerators a_i of the seed vector v_i = a_i / q, with
// a_i = (x_{i+1} >> 32) mod q and x_0 = seed under the project LCG.
// Throws ConfigError when q <= 1 or n == 0.
std::vector<uint64_t> derive_seed_numerators(uint64_t seed, size_t n,
                                             uint64_t q);
std::vector<double> derive_seed_vector(uint64_t seed, size_t n, uint64_t q);

struct NoiseAtoms {
  std::vector<Mask> atoms;          // exactly q, each of length n
  std::vector<double> seed_vector;  // v, entries in {0, 1/q, ..., (q-1)/q}
};

// The q equiprobable masks of the derandomized distribution: atom j uses
// s_base = (2j + 1) / (2q), t_i = (v_i + s_base) mod 1 and s_i = [t_i <= λ].
// Evaluated in integers over 2q so no float boundary can misclassify.
NoiseAtoms enumerate_atoms(const SmoothingConfig& cfg);

// count masks of n bits; each bit consumes one LCG step from rng_state and is
// 1 iff (x >> 32) / 2^32 < lambda. Throws ParameterError unless
// 0 <= lambda <= 1.
std::vector<Mask> iid_bernoulli_masks(double lambda, size_t n, size_t count,
                                      uint64_t rng_state);

}  // namespace muscert

#endif  // MUSCERT_NOISE_H_
