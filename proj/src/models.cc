#include "muscert/models.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <utility>

#include "json.hpp"
#include "muscert/io.h"
#include "muscert/kernels/kernels.h"
#include "muscert/lcg.h"

namespace muscert {
namespace {

using Json = nlohmann::json;

std::vector<double> transpose(const std::vector<double>& a, size_t rows,
                              size_t cols) {
  std::vector<double> t(a.size());
  for (size_t r = 0; r < rows; ++r) {
    for (size_t c = 0; c < cols; ++c) t[c * rows + r] = a[r * cols + c];
  }
  return t;
}

void check_shape(const std::vector<double>& v, size_t expected,
                 const char* field) {
  if (v.size() != expected) {
    throw SchemaError(std::string(field) + ": expected " +
                      std::to_string(expected) + " values, got " +
                      std::to_string(v.size()));
  }
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw SchemaError(std::string(field) + ": contains a non-finite value");
    }
  }
}

void check_input_dim(std::span<const double> x, size_t d) {
  if (x.size() != d) {
    throw DimensionError("model expects " + std::to_string(d) +
                         " features, got " + std::to_string(x.size()));
  }
}

void check_class(size_t cls, size_t m) {
  if (cls >= m) {
    throw ParameterError("class index " + std::to_string(cls) +
                         " out of range for " + std::to_string(m) + " classes");
  }
}

// dp_cls/dz_k = p_cls (δ_{cls,k} − p_k).
std::vector<double> softmax_jacobian_row(const Logits& p, size_t cls) {
  std::vector<double> dz(p.size());
  for (size_t k = 0; k < p.size(); ++k) {
    dz[k] = p[cls] * ((k == cls ? 1.0 : 0.0) - p[k]);
  }
  return dz;
}

const Json& require(const Json& doc, const char* field) {
  if (!doc.contains(field)) {
    throw SchemaError(std::string("model: missing field '") + field + "'");
  }
  return doc[field];
}

size_t read_dim(const Json& doc, const char* field) {
  const Json& v = require(doc, field);
  if (!v.is_number_unsigned() || v.get<size_t>() == 0) {
    throw SchemaError(std::string("model: field '") + field +
                      "' must be a positive integer");
  }
  return v.get<size_t>();
}

std::vector<double> read_vector(const Json& v, size_t expected,
                                const std::string& field) {
  if (!v.is_array() || v.size() != expected) {
    throw SchemaError("model: field '" + field + "' must be an array of " +
                      std::to_string(expected) + " numbers");
  }
  std::vector<double> out;
  out.reserve(expected);
  for (size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) {
      throw SchemaError("model: field '" + field + "[" + std::to_string(i) +
                        "]' is not a number");
    }
    out.push_back(v[i].get<double>());
  }
  return out;
}

std::vector<double> read_matrix(const Json& v, size_t rows, size_t cols,
                                const std::string& field) {
  if (!v.is_array() || v.size() != rows) {
    throw SchemaError("model: field '" + field + "' must have " +
                      std::to_string(rows) + " rows");
  }
  std::vector<double> out;
  out.reserve(rows * cols);
  for (size_t r = 0; r < rows; ++r) {
    const auto row =
        read_vector(v[r], cols, field + "[" + std::to_string(r) + "]");
    out.insert(out.end(), row.begin(), row.end());
  }
  return out;
}

Json matrix_json(const std::vector<double>& a, size_t rows, size_t cols) {
  Json out = Json::array();
  for (size_t r = 0; r < rows; ++r) {
    out.push_back(std::vector<double>(a.begin() + r * cols,
                                      a.begin() + (r + 1) * cols));
  }
  return out;
}

double log_prob(const Logits& p, size_t label) {
  return std::log(std::max(p[label], std::numeric_limits<double>::min()));
}

// Mean cross-entropy of softmax(W x + b), via log-sum-exp.
double linear_loss(const std::vector<double>& w, const std::vector<double>& b,
                   const LabeledDataset& data) {
  double total = 0.0;
  std::vector<double> z(data.m);
  for (size_t i = 0; i < data.size(); ++i) {
    const auto& x = data.inputs[i];
    for (size_t r = 0; r < data.m; ++r) {
      double acc = 0.0;
      for (size_t j = 0; j < data.d; ++j) acc += w[r * data.d + j] * x[j];
      z[r] = acc + b[r];
    }
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - zmax);
    total += (zmax + std::log(sum)) - z[data.labels[i]];
  }
  return total / static_cast<double>(data.size());
}

}  // namespace

Logits softmax(std::span<const double> z) {
  Logits p(z.begin(), z.end());
  if (p.empty()) return p;
  const double zmax = *std::max_element(p.begin(), p.end());
  double sum = 0.0;
  for (double& v : p) {
    v = std::exp(v - zmax);
    sum += v;
  }
  for (double& v : p) v /= sum;
  return p;
}

LinearSoftmaxModel::LinearSoftmaxModel(size_t m, size_t d,
                                       std::vector<double> weights,
                                       std::vector<double> bias)
    : m_(m), d_(d), weights_(std::move(weights)), bias_(std::move(bias)) {
  if (m < 2) throw SchemaError("m: linear model needs at least 2 classes");
  if (d < 1) throw SchemaError("d: linear model needs at least 1 feature");
  check_shape(weights_, m * d, "weights");
  check_shape(bias_, m, "bias");
  transposed_ = transpose(weights_, m, d);
}

std::vector<double> LinearSoftmaxModel::logits_pre_softmax(
    std::span<const double> x) const {
  check_input_dim(x, d_);
  std::vector<double> z(m_);
  kernels::active().matvec_colmajor(transposed_.data(), m_, d_, x.data(),
                                    z.data());
  for (size_t r = 0; r < m_; ++r) z[r] += bias_[r];
  return z;
}

Logits LinearSoftmaxModel::evaluate(std::span<const double> x) const {
  return softmax(logits_pre_softmax(x));
}

std::vector<double> LinearSoftmaxModel::gradient(std::span<const double> x,
                                                 size_t cls) const {
  check_class(cls, m_);
  const Logits p = evaluate(x);
  std::vector<double> mean_row(d_, 0.0);
  for (size_t k = 0; k < m_; ++k) {
    for (size_t j = 0; j < d_; ++j) mean_row[j] += p[k] * weights_[k * d_ + j];
  }
  std::vector<double> g(d_);
  for (size_t j = 0; j < d_; ++j) {
    g[j] = p[cls] * (weights_[cls * d_ + j] - mean_row[j]);
  }
  return g;
}

MlpModel::MlpModel(size_t d, size_t h, size_t m, std::vector<double> w1,
                   std::vector<double> b1, std::vector<double> w2,
                   std::vector<double> b2)
    : d_(d), h_(h), m_(m), w1_(std::move(w1)), b1_(std::move(b1)),
      w2_(std::move(w2)), b2_(std::move(b2)) {
  if (m < 2) throw SchemaError("m: mlp needs at least 2 classes");
  if (d < 1) throw SchemaError("d: mlp needs at least 1 feature");
  if (h < 1) throw SchemaError("h: mlp hidden width must be >= 1");
  check_shape(w1_, h * d, "weights[0]");
  check_shape(b1_, h, "bias[0]");
  check_shape(w2_, m * h, "weights[1]");
  check_shape(b2_, m, "bias[1]");
  w1t_ = transpose(w1_, h, d);
  w2t_ = transpose(w2_, m, h);
}

void MlpModel::forward_into(std::span<const double> x,
                            std::vector<double>& pre,
                            std::vector<double>& hidden,
                            std::vector<double>& z) const {
  check_input_dim(x, d_);
  const auto& k = kernels::active();
  pre.resize(h_);
  k.matvec_colmajor(w1t_.data(), h_, d_, x.data(), pre.data());
  for (size_t i = 0; i < h_; ++i) pre[i] += b1_[i];
  hidden = pre;
  k.relu(hidden.data(), h_);
  z.resize(m_);
  k.matvec_colmajor(w2t_.data(), m_, h_, hidden.data(), z.data());
  for (size_t i = 0; i < m_; ++i) z[i] += b2_[i];
}

Logits MlpModel::evaluate(std::span<const double> x) const {
  std::vector<double> pre, hidden, z;
  forward_into(x, pre, hidden, z);
  return softmax(z);
}

std::vector<double> MlpModel::gradient(std::span<const double> x,
                                       size_t cls) const {
  check_class(cls, m_);
  std::vector<double> pre, hidden, z;
  forward_into(x, pre, hidden, z);
  const Logits p = softmax(z);
  const std::vector<double> dz = softmax_jacobian_row(p, cls);
  std::vector<double> dpre(h_, 0.0);
  for (size_t i = 0; i < h_; ++i) {
    if (!(pre[i] > 0.0)) continue;
    double acc = 0.0;
    for (size_t k = 0; k < m_; ++k) acc += w2_[k * h_ + i] * dz[k];
    dpre[i] = acc;
  }
  std::vector<double> g(d_, 0.0);
  for (size_t i = 0; i < h_; ++i) {
    if (dpre[i] == 0.0) continue;
    for (size_t j = 0; j < d_; ++j) g[j] += w1_[i * d_ + j] * dpre[i];
  }
  return g;
}

double mean_cross_entropy(const Classifier& model, const LabeledDataset& data) {
  if (data.size() == 0) throw DataError("empty dataset");
  double total = 0.0;
  for (size_t i = 0; i < data.size(); ++i) {
    total -= log_prob(model.evaluate(data.inputs[i]), data.labels[i]);
  }
  return total / static_cast<double>(data.size());
}

double accuracy(const Classifier& model, const LabeledDataset& data) {
  if (data.size() == 0) throw DataError("empty dataset");
  size_t correct = 0;
  for (size_t i = 0; i < data.size(); ++i) {
    correct += top_class_and_gap(model.evaluate(data.inputs[i])).cls ==
               data.labels[i];
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

LinearSoftmaxModel fit_logistic(const LabeledDataset& data, size_t epochs,
                                double learning_rate, uint64_t rng_state,
                                FitReport* report) {
  if (data.size() == 0) throw DataError("fit_logistic: empty dataset");
  data.validate();
  if (!(learning_rate > 0.0)) {
    throw ParameterError("fit_logistic: learning rate must be positive");
  }
  const size_t m = data.m;
  const size_t d = data.d;
  std::vector<double> w(m * d);
  std::vector<double> b(m, 0.0);
  Lcg lcg(rng_state);
  for (double& v : w) v = 0.01 * (2.0 * lcg.next_double() - 1.0);

  constexpr int kMaxHalvings = 20;
  const double inv_n = 1.0 / static_cast<double>(data.size());
  double lr = learning_rate;
  double loss = linear_loss(w, b, data);
  std::vector<double> gw(m * d), gb(m), z(m), w_try(m * d), b_try(m);
  for (size_t epoch = 0; epoch < epochs; ++epoch) {
    std::fill(gw.begin(), gw.end(), 0.0);
    std::fill(gb.begin(), gb.end(), 0.0);
    for (size_t i = 0; i < data.size(); ++i) {
      const auto& x = data.inputs[i];
      for (size_t r = 0; r < m; ++r) {
        double acc = 0.0;
        for (size_t j = 0; j < d; ++j) acc += w[r * d + j] * x[j];
        z[r] = acc + b[r];
      }
      const Logits p = softmax(z);
      for (size_t r = 0; r < m; ++r) {
        const double err = p[r] - (data.labels[i] == r ? 1.0 : 0.0);
        for (size_t j = 0; j < d; ++j) gw[r * d + j] += err * x[j];
        gb[r] += err;
      }
    }
    for (double& v : gw) v *= inv_n;
    for (double& v : gb) v *= inv_n;

    for (int attempt = 0; attempt <= kMaxHalvings; ++attempt) {
      for (size_t i = 0; i < w.size(); ++i) w_try[i] = w[i] - lr * gw[i];
      for (size_t i = 0; i < m; ++i) b_try[i] = b[i] - lr * gb[i];
      const double candidate = linear_loss(w_try, b_try, data);
      if (candidate <= loss) {
        w.swap(w_try);
        b.swap(b_try);
        loss = candidate;
        break;
      }
      if (attempt < kMaxHalvings) lr *= 0.5;
    }
    if (report) report->epoch_loss.push_back(loss);
  }
  if (report) report->final_learning_rate = lr;
  return LinearSoftmaxModel(m, d, std::move(w), std::move(b));
}

std::string model_to_json_text(const Classifier& model) {
  nlohmann::ordered_json doc;
  if (const auto* lin = dynamic_cast<const LinearSoftmaxModel*>(&model)) {
    doc["kind"] = "linear";
    doc["d"] = lin->input_dim();
    doc["m"] = lin->num_classes();
    doc["weights"] =
        matrix_json(lin->weights(), lin->num_classes(), lin->input_dim());
    doc["bias"] = lin->bias();
  } else if (const auto* mlp = dynamic_cast<const MlpModel*>(&model)) {
    doc["kind"] = "mlp";
    doc["d"] = mlp->input_dim();
    doc["m"] = mlp->num_classes();
    doc["h"] = mlp->hidden_dim();
    doc["weights"] = {
        matrix_json(mlp->w1(), mlp->hidden_dim(), mlp->input_dim()),
        matrix_json(mlp->w2(), mlp->num_classes(), mlp->hidden_dim())};
    doc["bias"] = {mlp->b1(), mlp->b2()};
  } else {
    throw ParameterError("only built-in linear and mlp models can be saved");
  }
  return doc.dump();
}

ClassifierHandle model_from_json_text(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("model: expected a JSON object");
  const Json& kind = require(doc, "kind");
  if (!kind.is_string()) throw ParseError("model: 'kind' must be a string");
  const std::string tag = kind.get<std::string>();
  if (tag == "linear") {
    const size_t d = read_dim(doc, "d");
    const size_t m = read_dim(doc, "m");
    auto w = read_matrix(require(doc, "weights"), m, d, "weights");
    auto b = read_vector(require(doc, "bias"), m, "bias");
    return std::make_shared<LinearSoftmaxModel>(m, d, std::move(w),
                                                std::move(b));
  }
  if (tag == "mlp") {
    const size_t d = read_dim(doc, "d");
    const size_t m = read_dim(doc, "m");
    const size_t h = read_dim(doc, "h");
    const Json& weights = require(doc, "weights");
    const Json& bias = require(doc, "bias");
    if (!weights.is_array() || weights.size() != 2) {
      throw SchemaError("model: field 'weights' must hold two matrices");
    }
    if (!bias.is_array() || bias.size() != 2) {
      throw SchemaError("model: field 'bias' must hold two vectors");
    }
    auto w1 = read_matrix(weights[0], h, d, "weights[0]");
    auto w2 = read_matrix(weights[1], m, h, "weights[1]");
    auto b1 = read_vector(bias[0], h, "bias[0]");
    auto b2 = read_vector(bias[1], m, "bias[1]");
    return std::make_shared<MlpModel>(d, h, m, std::move(w1), std::move(b1),
                                      std::move(w2), std::move(b2));
  }
  throw ParseError("model: unknown kind '" + tag +
                   "' (supported kinds: linear, mlp)");
}

void save_model(const Classifier& model, const std::string& path) {
  write_text_file(path, model_to_json_text(model) + "\n");
}

ClassifierHandle load_model(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return model_from_json_text(text);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  } catch (const SchemaError& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

}  // namespace muscert
