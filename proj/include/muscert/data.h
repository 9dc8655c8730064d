#ifndef MUSCERT_DATA_H_
#define MUSCERT_DATA_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "muscert/core.h"

namespace muscert {

// Labeled feature vectors with uniform dimension d and labels in [0, m).
struct LabeledDataset {
  std::vector<InputVector> inputs;
  std::vector<size_t> labels;
  size_t d = 0;
  size_t m = 0;

  size_t size() const { return inputs.size(); }
  // Throws DataError when the invariants do not hold.
  void validate() const;
};

// Comma-separated rows of decimals. The label is the last column unless
// `label_column` selects another one (0-based). A first row with any
// non-numeric field is treated as a header. m = max label + 1 unless
// `num_classes` is given. Throws ParseError naming the row (1-based line).
LabeledDataset parse_csv_dataset(std::string_view text,
                                 std::optional<size_t> label_column = {},
                                 std::optional<size_t> num_classes = {});
LabeledDataset load_csv_dataset(const std::string& path,
                                std::optional<size_t> label_column = {},
                                std::optional<size_t> num_classes = {});

// Label in the last column, shortest round-trip decimals, no header.
std::string dataset_to_csv(const LabeledDataset& data);
void save_csv_dataset(const LabeledDataset& data, const std::string& path);

// m unit-variance isotropic Gaussian clusters; class c is centred at
// separation * (±e_{c mod d}), the sign flipping on every pass over the d
// axes. Box-Muller on the project LCG, class-major sample order.
// Throws ParameterError unless d >= 1 and m >= 2.
LabeledDataset synth_blobs(size_t n_per_class, size_t d, size_t m,
                           double separation, uint64_t rng_state);

}  // namespace muscert

#endif  // MUSCERT_DATA_H_
