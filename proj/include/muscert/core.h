#ifndef MUSCERT_CORE_H_
#define MUSCERT_CORE_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "muscert/error.h"

namespace muscert {

// Raw feature vector x (length d) and class-probability vector (length m).
using InputVector = std::vector<double>;
using Logits = std::vector<double>;

// Binary selection over n feature groups. Every entry is exactly 0 or 1.
class Mask {
 public:
  Mask() = default;
  explicit Mask(size_t n, bool value = false) : bits_(n, value ? 1 : 0) {}

  static Mask zeros(size_t n) { return Mask(n, false); }
  static Mask ones(size_t n) { return Mask(n, true); }
  // Throws ParameterError if any entry is not 0 or 1.
  static Mask from_bits(std::vector<uint8_t> bits);
  // "1011" -> (1,0,1,1). Throws ParameterError on other characters.
  static Mask from_string(std::string_view text);
  // Bit i of `word` becomes entry i; n <= 64.
  static Mask from_word(uint64_t word, size_t n);

  size_t size() const { return bits_.size(); }
  bool operator[](size_t i) const { return bits_[i] != 0; }
  void set(size_t i, bool value) { bits_[i] = value ? 1 : 0; }
  size_t popcount() const;
  std::span<const uint8_t> bits() const { return bits_; }
  std::string to_string() const;

  Mask operator&(const Mask& other) const;
  Mask operator|(const Mask& other) const;
  Mask complement() const;

  friend bool operator==(const Mask&, const Mask&) = default;
  friend auto operator<=>(const Mask&, const Mask&) = default;

 private:
  std::vector<uint8_t> bits_;
};

// Partition of raw feature indices 0..d-1 into n non-empty groups that are
// masked jointly.
class FeatureGrouping {
 public:
  FeatureGrouping() = default;

  // Each raw feature is its own group.
  static FeatureGrouping trivial(size_t d);
  // Throws SchemaError unless `groups` partitions 0..d-1 with no empty group.
  static FeatureGrouping from_groups(size_t d,
                                     std::vector<std::vector<size_t>> groups);

  // {"d": int, "groups": [[int, ...], ...]}
  static FeatureGrouping from_json_text(std::string_view text);
  static FeatureGrouping load(const std::string& path);
  std::string to_json_text() const;
  void save(const std::string& path) const;

  size_t raw_dim() const { return group_of_.size(); }
  size_t group_count() const { return groups_.size(); }
  bool is_trivial() const { return trivial_; }
  const std::vector<size_t>& group(size_t i) const { return groups_[i]; }
  size_t group_of(size_t raw_index) const { return group_of_[raw_index]; }

  // Writes one keep byte per raw feature. alpha.size() must equal n.
  void expand(const Mask& alpha, std::span<uint8_t> raw_keep) const;

 private:
  std::vector<std::vector<size_t>> groups_;
  std::vector<size_t> group_of_;
  bool trivial_ = true;
};

// Black-box classifier R^d -> simplex over m classes. Implementations must be
// deterministic and safe to call concurrently.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual size_t input_dim() const = 0;
  virtual size_t num_classes() const = 0;
  virtual Logits evaluate(std::span<const double> x) const = 0;
  virtual bool has_gradient() const { return false; }
  // d partial derivatives of p_cls at x. Default throws CapabilityError.
  virtual std::vector<double> gradient(std::span<const double> x,
                                       size_t cls) const;
};

using ClassifierHandle = std::shared_ptr<const Classifier>;

using EvaluateFn = std::function<Logits(std::span<const double>)>;
using GradientFn =
    std::function<std::vector<double>(std::span<const double>, size_t)>;

// Adapts plain callables to the Classifier interface.
ClassifierHandle make_classifier(size_t input_dim, size_t num_classes,
                                 EvaluateFn evaluate,
                                 GradientFn gradient = nullptr);

// Throws ClassifierContractError unless y has m entries in [0,1] summing to 1
// within 1e-9.
void validate_logits(std::span<const double> y, size_t m);

// x ⊙ alpha under the grouping: raw entries whose group bit is 0 become +0.0.
InputVector mask_apply(std::span<const double> x, const Mask& alpha,
                       const FeatureGrouping& grouping);
// Allocation-free form; `out` must have d entries and `scratch` d bytes.
void mask_apply_into(std::span<const double> x, const Mask& alpha,
                     const FeatureGrouping& grouping, std::span<double> out,
                     std::span<uint8_t> scratch);

// a ⪯ b: every feature selected by a is selected by b.
bool mask_leq(const Mask& a, const Mask& b);

// Hamming distance.
size_t l1_distance(const Mask& a, const Mask& b);

struct TopClass {
  size_t cls = 0;
  double gap = 0.0;
};

// Argmax with ties to the lowest index; gap = top - runner-up (0 on a tie).
// Throws ArityError when fewer than two classes.
TopClass top_class_and_gap(std::span<const double> y);

}  // namespace muscert

#endif  // MUSCERT_CORE_H_
