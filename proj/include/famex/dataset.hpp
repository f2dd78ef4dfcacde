#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "famex/matrix.hpp"

namespace famex {

enum class DataErrorKind {
  file_not_found,
  parse_error,
  class_column_not_found,
  non_numeric_column,
  too_few_classes,
  too_few_features,
  too_few_rows,
  empty_column,
};

std::string_view to_string(DataErrorKind kind);

class DataError : public std::runtime_error {
 public:
  DataError(DataErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  DataErrorKind kind() const { return kind_; }

 private:
  DataErrorKind kind_;
};

// Tabular classification data. Labels are dense codes into class_names;
// codes follow the lexicographic order of the raw class strings.
struct Dataset {
  std::string name;
  std::vector<std::string> feature_names;
  Matrix samples;
  std::vector<int> labels;
  std::vector<std::string> class_names;
  // Raw data rows discarded by the missing-value rule.
  std::size_t dropped_rows = 0;

  std::size_t rows() const { return samples.rows(); }
  std::size_t features() const { return samples.cols(); }
  std::size_t class_count() const { return class_names.size(); }
};

// Which column holds the class. Default is the last column.
struct ClassColumn {
  struct Last {};
  std::variant<Last, std::string, std::size_t> selector = Last{};

  static ClassColumn last() { return {}; }
  static ClassColumn by_name(std::string name) { return {std::move(name)}; }
  static ClassColumn by_index(std::size_t index) { return {index}; }

  // Command-line form. The text is kept as a name; at load time a header
  // with that exact name wins, otherwise an integer is taken as an index.
  static ClassColumn parse(std::string_view text);
};

struct LoadOptions {
  ClassColumn class_column;
  bool drop_missing = true;
  std::string missing_marker = "?";
};

Dataset parse_csv(std::string_view text, std::string name, const LoadOptions& options = {});
Dataset load_csv(const std::filesystem::path& path, const LoadOptions& options = {});

// Checks the Dataset invariants; throws DataError on violation.
void validate(const Dataset& dataset);

// Keeps only the given feature columns, in the given order.
Dataset select_features(const Dataset& dataset, std::span<const std::size_t> columns);

struct DiscretizedColumn {
  std::vector<int> bins;
  int bin_count = 1;
  std::vector<double> edges;
};

// Equal-width binning over [min, max]. The maximum falls in the last bin and
// a constant column collapses to one bin.
DiscretizedColumn discretize(std::span<const double> column, int bin_count);

}  // namespace famex
