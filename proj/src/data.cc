#include "muscert/data.h"

#include <charconv>
#include <cmath>
#include <numbers>
#include <string>

#include "muscert/io.h"
#include "muscert/lcg.h"

namespace muscert {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

std::optional<double> parse_number(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::string line_context(size_t line_no) {
  return "line " + std::to_string(line_no) + ": ";
}

}  // namespace

void LabeledDataset::validate() const {
  if (inputs.size() != labels.size()) {
    throw DataError("dataset has mismatched input and label counts");
  }
  for (size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].size() != d) {
      throw DataError("example " + std::to_string(i) + " has " +
                      std::to_string(inputs[i].size()) +
                      " features, expected " + std::to_string(d));
    }
    if (labels[i] >= m) {
      throw DataError("example " + std::to_string(i) + " label " +
                      std::to_string(labels[i]) + " outside [0, " +
                      std::to_string(m) + ")");
    }
    for (double v : inputs[i]) {
      if (!std::isfinite(v)) {
        throw DataError("example " + std::to_string(i) +
                        " contains a non-finite value");
      }
    }
  }
}

LabeledDataset parse_csv_dataset(std::string_view text,
                                 std::optional<size_t> label_column,
                                 std::optional<size_t> num_classes) {
  LabeledDataset data;
  size_t expected_fields = 0;
  bool first_row = true;
  size_t line_no = 0;
  size_t max_label = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const std::string_view line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;

    const auto fields = split_fields(line);
    std::vector<std::optional<double>> values;
    values.reserve(fields.size());
    bool all_numeric = true;
    for (auto f : fields) {
      values.push_back(parse_number(f));
      all_numeric = all_numeric && values.back().has_value();
    }
    if (first_row) {
      first_row = false;
      expected_fields = fields.size();
      if (expected_fields < 2) {
        throw ParseError(line_context(line_no) +
                         "need at least one feature and a label column");
      }
      if (label_column && *label_column >= expected_fields) {
        throw ParseError(line_context(line_no) + "label column " +
                         std::to_string(*label_column) + " out of range");
      }
      if (!all_numeric) continue;  // header
    }
    if (fields.size() != expected_fields) {
      throw ParseError(line_context(line_no) + "expected " +
                       std::to_string(expected_fields) + " fields, got " +
                       std::to_string(fields.size()));
    }
    const size_t label_idx = label_column.value_or(expected_fields - 1);
    InputVector x;
    x.reserve(expected_fields - 1);
    for (size_t c = 0; c < fields.size(); ++c) {
      if (!values[c]) {
        throw ParseError(line_context(line_no) + "field " + std::to_string(c) +
                         " ('" + std::string(fields[c]) +
                         "') is not a number");
      }
      if (c != label_idx) {
        if (!std::isfinite(*values[c])) {
          throw ParseError(line_context(line_no) + "field " +
                           std::to_string(c) + " is not finite");
        }
        x.push_back(*values[c]);
      }
    }
    const double label = *values[label_idx];
    if (!(label >= 0.0) || label != std::floor(label) || label > 1e9) {
      throw ParseError(line_context(line_no) + "label '" +
                       std::string(fields[label_idx]) +
                       "' is not a non-negative integer");
    }
    const auto y = static_cast<size_t>(label);
    max_label = std::max(max_label, y);
    data.inputs.push_back(std::move(x));
    data.labels.push_back(y);
  }
  if (data.inputs.empty()) throw DataError("dataset contains no rows");
  data.d = expected_fields - 1;
  data.m = num_classes.value_or(std::max<size_t>(max_label + 1, 2));
  data.validate();
  return data;
}

LabeledDataset load_csv_dataset(const std::string& path,
                                std::optional<size_t> label_column,
                                std::optional<size_t> num_classes) {
  const std::string text = read_text_file(path);
  try {
    return parse_csv_dataset(text, label_column, num_classes);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::string dataset_to_csv(const LabeledDataset& data) {
  std::string out;
  for (size_t i = 0; i < data.size(); ++i) {
    for (double v : data.inputs[i]) {
      out += format_double(v);
      out += ',';
    }
    out += std::to_string(data.labels[i]);
    out += '\n';
  }
  return out;
}

void save_csv_dataset(const LabeledDataset& data, const std::string& path) {
  write_text_file(path, dataset_to_csv(data));
}

LabeledDataset synth_blobs(size_t n_per_class, size_t d, size_t m,
                           double separation, uint64_t rng_state) {
  if (d < 1) throw ParameterError("synth_blobs needs d >= 1");
  if (m < 2) throw ParameterError("synth_blobs needs m >= 2");
  LabeledDataset data;
  data.d = d;
  data.m = m;
  Lcg lcg(rng_state);
  bool have_spare = false;
  double spare = 0.0;
  auto gaussian = [&]() {
    if (have_spare) {
      have_spare = false;
      return spare;
    }
    // u1 in (0, 1] keeps the logarithm finite.
    const double u1 = 1.0 - lcg.next_double();
    const double u2 = lcg.next_double();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare = radius * std::sin(angle);
    have_spare = true;
    return radius * std::cos(angle);
  };
  for (size_t c = 0; c < m; ++c) {
    InputVector center(d, 0.0);
    const double sign = (c / d) % 2 == 0 ? 1.0 : -1.0;
    center[c % d] = sign * separation;
    for (size_t i = 0; i < n_per_class; ++i) {
      InputVector x(d);
      for (size_t j = 0; j < d; ++j) x[j] = center[j] + gaussian();
      data.inputs.push_back(std::move(x));
      data.labels.push_back(c);
    }
  }
  return data;
}

}  // namespace muscert
