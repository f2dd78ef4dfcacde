#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "famex/dataset.hpp"

namespace testing {

inline std::filesystem::path data_file(const std::string& name) {
  return std::filesystem::path(FAMEX_DATA_DIR) / name;
}

// Columns given feature-major; class names are the decimal label codes.
inline famex::Dataset make_dataset(const std::vector<std::vector<double>>& columns, const std::vector<int>& labels,
                                   std::string name = "synthetic") {
  famex::Dataset ds;
  ds.name = std::move(name);
  ds.samples = famex::Matrix(labels.size(), columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    ds.feature_names.push_back("f" + std::to_string(c));
    for (std::size_t r = 0; r < labels.size(); ++r) ds.samples(r, c) = columns[c][r];
  }
  ds.labels = labels;
  int max_label = 0;
  for (const int v : labels) max_label = std::max(max_label, v);
  for (int k = 0; k <= max_label; ++k) ds.class_names.push_back(std::to_string(k));
  return ds;
}

// Random classification data: `informative` columns are label plus noise,
// the rest are noise.
inline famex::Dataset random_dataset(std::mt19937_64& gen, std::size_t rows, std::size_t features,
                                     std::size_t informative, int classes = 2) {
  std::uniform_int_distribution<int> label(0, classes - 1);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<int> y(rows);
  for (auto& v : y) v = label(gen);
  for (int k = 0; k < classes && static_cast<std::size_t>(k) < rows; ++k) y[static_cast<std::size_t>(k)] = k;
  std::vector<std::vector<double>> cols(features, std::vector<double>(rows));
  for (std::size_t c = 0; c < features; ++c) {
    for (std::size_t r = 0; r < rows; ++r) {
      cols[c][r] = noise(gen) + (c < informative ? 2.0 * y[r] : 0.0);
    }
  }
  return make_dataset(cols, y);
}

}  // namespace testing
