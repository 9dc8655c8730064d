#ifndef MUSCERT_MODELS_H_
#define MUSCERT_MODELS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "muscert/core.h"
#include "muscert/data.h"

namespace muscert {

// Numerically stable softmax (max subtracted before exponentiation).
Logits softmax(std::span<const double> z);

// softmax(W x + b), W is m x d row-major.
class LinearSoftmaxModel final : public Classifier {
 public:
  // Throws SchemaError on shape mismatch or non-finite entries.
  LinearSoftmaxModel(size_t m, size_t d, std::vector<double> weights,
                     std::vector<double> bias);

  size_t input_dim() const override { return d_; }
  size_t num_classes() const override { return m_; }
  Logits evaluate(std::span<const double> x) const override;
  bool has_gradient() const override { return true; }
  // p_c (W_c − Σ_j p_j W_j).
  std::vector<double> gradient(std::span<const double> x,
                               size_t cls) const override;

  double weight(size_t row, size_t col) const { return weights_[row * d_ + col]; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& bias() const { return bias_; }
  std::vector<double> logits_pre_softmax(std::span<const double> x) const;

 private:
  size_t m_;
  size_t d_;
  std::vector<double> weights_;     // row-major m x d
  std::vector<double> transposed_;  // column-major copy for the kernel
  std::vector<double> bias_;
};

// softmax(W2 relu(W1 x + b1) + b2). The ReLU subgradient at 0 is 0.
class MlpModel final : public Classifier {
 public:
  // w1 is h x d, w2 is m x h, both row-major. Throws SchemaError.
  MlpModel(size_t d, size_t h, size_t m, std::vector<double> w1,
           std::vector<double> b1, std::vector<double> w2,
           std::vector<double> b2);

  size_t input_dim() const override { return d_; }
  size_t num_classes() const override { return m_; }
  size_t hidden_dim() const { return h_; }
  Logits evaluate(std::span<const double> x) const override;
  bool has_gradient() const override { return true; }
  std::vector<double> gradient(std::span<const double> x,
                               size_t cls) const override;

  const std::vector<double>& w1() const { return w1_; }
  const std::vector<double>& b1() const { return b1_; }
  const std::vector<double>& w2() const { return w2_; }
  const std::vector<double>& b2() const { return b2_; }

 private:
  // Fills pre-activations of the hidden layer and the output scores.
  void forward_into(std::span<const double> x, std::vector<double>& pre,
                    std::vector<double>& hidden, std::vector<double>& z) const;

  size_t d_, h_, m_;
  std::vector<double> w1_, b1_, w2_, b2_;
  std::vector<double> w1t_, w2t_;
};

struct FitReport {
  std::vector<double> epoch_loss;  // loss after each epoch's accepted step
  double final_learning_rate = 0.0;
};

// Full-batch gradient descent on mean cross-entropy. Weights start at
// 0.01 * (2u − 1) drawn row-major from the LCG; bias starts at zero. An epoch
// whose step would increase the loss halves the learning rate and retries, up
// to 20 halvings; if none helps the epoch leaves the weights unchanged.
// Throws DataError on an empty or invalid dataset.
LinearSoftmaxModel fit_logistic(const LabeledDataset& data, size_t epochs,
                                double learning_rate, uint64_t rng_state,
                                FitReport* report = nullptr);

double mean_cross_entropy(const Classifier& model, const LabeledDataset& data);
double accuracy(const Classifier& model, const LabeledDataset& data);

// Weights document:
//   {"kind": "linear", "d", "m", "weights": [[...] x m], "bias": [...]}
//   {"kind": "mlp", "d", "m", "h", "weights": [W1 (h x d), W2 (m x h)],
//    "bias": [b1, b2]}
// Floats are written in shortest round-trip form.
std::string model_to_json_text(const Classifier& model);
ClassifierHandle model_from_json_text(std::string_view text);
void save_model(const Classifier& model, const std::string& path);
// Throws ParseError (malformed document, unknown kind) or SchemaError (shape).
ClassifierHandle load_model(const std::string& path);

}  // namespace muscert

#endif  // MUSCERT_MODELS_H_
