#include "muscert/core.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "json.hpp"
#include "muscert/io.h"
#include "muscert/kernels/kernels.h"

namespace muscert {
namespace {

void require_same_length(const Mask& a, const Mask& b, const char* op) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(op) + ": mask lengths differ (" +
                         std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
  }
}

class FunctionClassifier final : public Classifier {
 public:
  FunctionClassifier(size_t d, size_t m, EvaluateFn evaluate,
                     GradientFn gradient)
      : d_(d), m_(m), evaluate_(std::move(evaluate)),
        gradient_(std::move(gradient)) {}

  size_t input_dim() const override { return d_; }
  size_t num_classes() const override { return m_; }
  Logits evaluate(std::span<const double> x) const override {
    return evaluate_(x);
  }
  bool has_gradient() const override { return static_cast<bool>(gradient_); }
  std::vector<double> gradient(std::span<const double> x,
                               size_t cls) const override {
    if (!gradient_) return Classifier::gradient(x, cls);
    return gradient_(x, cls);
  }

 private:
  size_t d_;
  size_t m_;
  EvaluateFn evaluate_;
  GradientFn gradient_;
};

}  // namespace

Mask Mask::from_bits(std::vector<uint8_t> bits) {
  for (size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] > 1) {
      throw ParameterError("mask entry " + std::to_string(i) +
                           " is not 0 or 1");
    }
  }
  Mask m;
  m.bits_ = std::move(bits);
  return m;
}

Mask Mask::from_string(std::string_view text) {
  std::vector<uint8_t> bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') {
      throw ParameterError("mask string may only contain '0' and '1'");
    }
    bits.push_back(c == '1');
  }
  return from_bits(std::move(bits));
}

Mask Mask::from_word(uint64_t word, size_t n) {
  if (n > 64) throw ParameterError("Mask::from_word supports n <= 64");
  Mask m(n);
  for (size_t i = 0; i < n; ++i) m.bits_[i] = (word >> i) & 1u;
  return m;
}

size_t Mask::popcount() const {
  size_t count = 0;
  for (uint8_t b : bits_) count += b;
  return count;
}

std::string Mask::to_string() const {
  std::string s(bits_.size(), '0');
  for (size_t i = 0; i < bits_.size(); ++i) s[i] = bits_[i] ? '1' : '0';
  return s;
}

Mask Mask::operator&(const Mask& other) const {
  require_same_length(*this, other, "mask and");
  Mask out(size());
  kernels::active().mask_and(bits_.data(), other.bits_.data(),
                             out.bits_.data(), size());
  return out;
}

Mask Mask::operator|(const Mask& other) const {
  require_same_length(*this, other, "mask or");
  Mask out(size());
  kernels::active().mask_or(bits_.data(), other.bits_.data(), out.bits_.data(),
                            size());
  return out;
}

Mask Mask::complement() const {
  Mask out(size());
  for (size_t i = 0; i < size(); ++i) out.bits_[i] = bits_[i] ^ 1u;
  return out;
}

FeatureGrouping FeatureGrouping::trivial(size_t d) {
  FeatureGrouping g;
  g.groups_.resize(d);
  g.group_of_.resize(d);
  for (size_t i = 0; i < d; ++i) {
    g.groups_[i] = {i};
    g.group_of_[i] = i;
  }
  g.trivial_ = true;
  return g;
}

FeatureGrouping FeatureGrouping::from_groups(
    size_t d, std::vector<std::vector<size_t>> groups) {
  constexpr size_t kUnassigned = static_cast<size_t>(-1);
  std::vector<size_t> group_of(d, kUnassigned);
  for (size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) {
      throw SchemaError("groups[" + std::to_string(g) + "] is empty");
    }
    for (size_t idx : groups[g]) {
      if (idx >= d) {
        throw SchemaError("groups[" + std::to_string(g) + "] index " +
                          std::to_string(idx) + " out of range for d=" +
                          std::to_string(d));
      }
      if (group_of[idx] != kUnassigned) {
        throw SchemaError("feature " + std::to_string(idx) +
                          " appears in more than one group");
      }
      group_of[idx] = g;
    }
  }
  for (size_t i = 0; i < d; ++i) {
    if (group_of[i] == kUnassigned) {
      throw SchemaError("feature " + std::to_string(i) +
                        " is not covered by any group");
    }
  }
  FeatureGrouping out;
  out.trivial_ = groups.size() == d;
  for (size_t g = 0; out.trivial_ && g < groups.size(); ++g) {
    out.trivial_ = groups[g].size() == 1 && groups[g][0] == g;
  }
  out.groups_ = std::move(groups);
  out.group_of_ = std::move(group_of);
  return out;
}

FeatureGrouping FeatureGrouping::from_json_text(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("grouping: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("grouping: expected an object");
  if (!doc.contains("d") || !doc["d"].is_number_unsigned()) {
    throw SchemaError("grouping: field 'd' must be a non-negative integer");
  }
  if (!doc.contains("groups") || !doc["groups"].is_array()) {
    throw SchemaError("grouping: field 'groups' must be an array");
  }
  const auto d = doc["d"].get<size_t>();
  std::vector<std::vector<size_t>> groups;
  for (size_t g = 0; g < doc["groups"].size(); ++g) {
    const auto& entry = doc["groups"][g];
    if (!entry.is_array()) {
      throw SchemaError("grouping: groups[" + std::to_string(g) +
                        "] must be an array");
    }
    std::vector<size_t> members;
    for (const auto& idx : entry) {
      if (!idx.is_number_unsigned()) {
        throw SchemaError("grouping: groups[" + std::to_string(g) +
                          "] must hold non-negative integers");
      }
      members.push_back(idx.get<size_t>());
    }
    groups.push_back(std::move(members));
  }
  return from_groups(d, std::move(groups));
}

FeatureGrouping FeatureGrouping::load(const std::string& path) {
  try {
    return from_json_text(read_text_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  } catch (const SchemaError& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

std::string FeatureGrouping::to_json_text() const {
  nlohmann::json doc;
  doc["d"] = raw_dim();
  doc["groups"] = groups_;
  return doc.dump();
}

void FeatureGrouping::save(const std::string& path) const {
  write_text_file(path, to_json_text() + "\n");
}

void FeatureGrouping::expand(const Mask& alpha,
                             std::span<uint8_t> raw_keep) const {
  if (alpha.size() != group_count()) {
    throw DimensionError("mask has " + std::to_string(alpha.size()) +
                         " entries but grouping has " +
                         std::to_string(group_count()) + " groups");
  }
  if (raw_keep.size() != raw_dim()) {
    throw DimensionError("keep buffer length differs from raw dimension");
  }
  if (trivial_) {
    auto bits = alpha.bits();
    std::copy(bits.begin(), bits.end(), raw_keep.begin());
    return;
  }
  for (size_t j = 0; j < raw_keep.size(); ++j) {
    raw_keep[j] = alpha[group_of_[j]] ? 1 : 0;
  }
}

std::vector<double> Classifier::gradient(std::span<const double>,
                                         size_t) const {
  throw CapabilityError("classifier does not expose a gradient");
}

ClassifierHandle make_classifier(size_t input_dim, size_t num_classes,
                                 EvaluateFn evaluate, GradientFn gradient) {
  return std::make_shared<FunctionClassifier>(
      input_dim, num_classes, std::move(evaluate), std::move(gradient));
}

void validate_logits(std::span<const double> y, size_t m) {
  if (y.size() != m) {
    throw ClassifierContractError("classifier returned " +
                                  std::to_string(y.size()) +
                                  " probabilities, expected " +
                                  std::to_string(m));
  }
  double sum = 0.0;
  for (size_t i = 0; i < y.size(); ++i) {
    if (!(y[i] >= 0.0 && y[i] <= 1.0)) {
      throw ClassifierContractError("classifier probability " +
                                    std::to_string(i) + " = " +
                                    format_double(y[i]) +
                                    " is outside [0,1]");
    }
    sum += y[i];
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ClassifierContractError("classifier probabilities sum to " +
                                  format_double(sum));
  }
}

void mask_apply_into(std::span<const double> x, const Mask& alpha,
                     const FeatureGrouping& grouping, std::span<double> out,
                     std::span<uint8_t> scratch) {
  if (x.size() != grouping.raw_dim()) {
    throw DimensionError("input has " + std::to_string(x.size()) +
                         " features but grouping expects " +
                         std::to_string(grouping.raw_dim()));
  }
  if (out.size() != x.size() || scratch.size() != x.size()) {
    throw DimensionError("mask_apply output buffer has the wrong length");
  }
  grouping.expand(alpha, scratch);
  kernels::active().masked_copy(x.data(), scratch.data(), out.data(),
                                x.size());
}

InputVector mask_apply(std::span<const double> x, const Mask& alpha,
                       const FeatureGrouping& grouping) {
  InputVector out(x.size());
  std::vector<uint8_t> keep(x.size());
  mask_apply_into(x, alpha, grouping, out, keep);
  return out;
}

bool mask_leq(const Mask& a, const Mask& b) {
  require_same_length(a, b, "mask_leq");
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] && !b[i]) return false;
  }
  return true;
}

size_t l1_distance(const Mask& a, const Mask& b) {
  require_same_length(a, b, "l1_distance");
  return kernels::active().count_mismatch(a.bits().data(), b.bits().data(),
                                          a.size());
}

TopClass top_class_and_gap(std::span<const double> y) {
  if (y.size() < 2) {
    throw ArityError("top_class_and_gap needs at least two classes, got " +
                     std::to_string(y.size()));
  }
  size_t best = 0;
  for (size_t i = 1; i < y.size(); ++i) {
    if (y[i] > y[best]) best = i;
  }
  double runner_up = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < y.size(); ++i) {
    if (i != best && y[i] > runner_up) runner_up = y[i];
  }
  return {best, y[best] - runner_up};
}

}  // namespace muscert
