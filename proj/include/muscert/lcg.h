#ifndef MUSCERT_LCG_H_
#define MUSCERT_LCG_H_

#include <cstdint>

namespace muscert {

// 64-bit linear congruential generator with Knuth's MMIX constants. Every
// random stream in the project is driven by this recurrence so that results
// are reproducible bit for bit across platforms and languages.
class Lcg {
 public:
  static constexpr uint64_t kMultiplier = 6364136223846793005ULL;
  static constexpr uint64_t kIncrement = 1442695040888963407ULL;

  constexpr explicit Lcg(uint64_t state) : state_(state) {}

  static constexpr uint64_t step(uint64_t x) {
    return kMultiplier * x + kIncrement;
  }

  // Advances and returns the new state.
  constexpr uint64_t next() {
    state_ = step(state_);
    return state_;
  }

  // Upper 32 bits of the next state.
  constexpr uint32_t next_u32() { return static_cast<uint32_t>(next() >> 32); }

  // (next >> 32) / 2^32, in [0, 1).
  double next_unit() { return next_u32() * 0x1p-32; }

  // 53-bit uniform in [0, 1).
  double next_double() { return static_cast<double>(next() >> 11) * 0x1p-53; }

  // Uniform integer in [0, bound) via the upper 32 bits; bound <= 2^32.
  uint64_t next_below(uint64_t bound) {
    return (static_cast<uint64_t>(next_u32()) * bound) >> 32;
  }

  constexpr uint64_t state() const { return state_; }

 private:
  uint64_t state_;
};

// Independent stream for worker `index`: one LCG step applied to seed + index.
constexpr uint64_t derive_stream(uint64_t seed, uint64_t index) {
  return Lcg::step(seed + index);
}

}  // namespace muscert

#endif  // MUSCERT_LCG_H_
