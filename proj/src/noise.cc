#include "muscert/noise.h"

#include <string>

#include "muscert/lcg.h"

namespace muscert {
namespace {

// Keeps 4q inside 64 bits for the integer threshold test.
constexpr uint64_t kMaxQ = uint64_t{1} << 61;

void check_q(uint64_t q) {
  if (q <= 1) throw ConfigError("q must be > 1, got " + std::to_string(q));
  if (q > kMaxQ) throw ConfigError("q is too large: " + std::to_string(q));
}

}  // namespace

SmoothingConfig::SmoothingConfig(uint64_t q, uint64_t lambda_num,
                                 uint64_t seed, size_t n)
    : q_(q), lambda_num_(lambda_num), seed_(seed), n_(n) {
  check_q(q);
  if (lambda_num < 1 || lambda_num > q) {
    throw ConfigError("lambda-num must satisfy 1 <= k <= q (k=" +
                      std::to_string(lambda_num) +
                      ", q=" + std::to_string(q) + ")");
  }
  if (n < 1) throw ConfigError("feature-group count n must be >= 1");
}

std::vector<uint64_t> derive_seed_numerators(uint64_t seed, size_t n,
                                             uint64_t q) {
  check_q(q);
  if (n < 1) throw ConfigError("seed vector length must be >= 1");
  std::vector<uint64_t> numerators(n);
  Lcg lcg(seed);
  for (size_t i = 0; i < n; ++i) numerators[i] = (lcg.next() >> 32) % q;
  return numerators;
}

std::vector<double> derive_seed_vector(uint64_t seed, size_t n, uint64_t q) {
  const auto numerators = derive_seed_numerators(seed, n, q);
  std::vector<double> v(n);
  for (size_t i = 0; i < n; ++i) {
    v[i] = static_cast<double>(numerators[i]) / static_cast<double>(q);
  }
  return v;
}

NoiseAtoms enumerate_atoms(const SmoothingConfig& cfg) {
  const uint64_t q = cfg.q();
  const uint64_t two_q = 2 * q;
  const uint64_t threshold = 2 * cfg.lambda_num();
  const auto numerators = derive_seed_numerators(cfg.seed(), cfg.n(), q);

  NoiseAtoms out;
  out.seed_vector.resize(cfg.n());
  for (size_t i = 0; i < cfg.n(); ++i) {
    out.seed_vector[i] =
        static_cast<double>(numerators[i]) / static_cast<double>(q);
  }
  out.atoms.reserve(q);
  for (uint64_t j = 0; j < q; ++j) {
    Mask atom(cfg.n());
    for (size_t i = 0; i < cfg.n(); ++i) {
      // t_i * 2q, always odd, so it never lands exactly on the threshold.
      const uint64_t t = (2 * numerators[i] + 2 * j + 1) % two_q;
      atom.set(i, t <= threshold);
    }
    out.atoms.push_back(std::move(atom));
  }
  return out;
}

std::vector<Mask> iid_bernoulli_masks(double lambda, size_t n, size_t count,
                                      uint64_t rng_state) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ParameterError("lambda must lie in [0,1]");
  }
  std::vector<Mask> masks;
  masks.reserve(count);
  Lcg lcg(rng_state);
  for (size_t c = 0; c < count; ++c) {
    Mask m(n);
    for (size_t i = 0; i < n; ++i) m.set(i, lcg.next_unit() < lambda);
    masks.push_back(std::move(m));
  }
  return masks;
}

}  // namespace muscert
