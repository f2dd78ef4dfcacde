#include "famex/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace famex {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

struct CsvRecord {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

// RFC 4180 style: quoted fields may contain commas, doubled quotes and newlines.
std::vector<CsvRecord> split_records(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  std::vector<CsvRecord> records;
  CsvRecord current;
  std::string field;
  bool in_quotes = false;
  bool field_quoted = false;
  std::size_t line = 1;
  current.line = line;

  auto end_field = [&] {
    current.fields.push_back(field_quoted ? field : std::string(trim(field)));
    field.clear();
    field_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    const bool blank = current.fields.size() == 1 && current.fields[0].empty();
    if (!blank) records.push_back(std::move(current));
    current = CsvRecord{};
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (trim(field).empty()) {
          field.clear();
          in_quotes = true;
          field_quoted = true;
        } else {
          field.push_back(c);
        }
        break;
      case ',':
        end_field();
        break;
      case '\n':
        end_record();
        current.line = ++line;
        break;
      default:
        // Whitespace after a closing quote (including the CR of CRLF) is not content.
        if (field_quoted && (c == ' ' || c == '\t' || c == '\r')) break;
        field.push_back(c);
    }
  }
  if (in_quotes) {
    throw DataError(DataErrorKind::parse_error,
                    "parse error at line " + std::to_string(current.line) + ": unterminated quote");
  }
  end_record();
  return records;
}

std::optional<double> parse_number(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::optional<std::size_t> parse_index(std::string_view s) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

std::size_t resolve_class_column(const ClassColumn& selector, const std::vector<std::string>& header) {
  const auto not_found = [](const std::string& what) {
    return DataError(DataErrorKind::class_column_not_found, "class column not found: " + what);
  };
  if (std::holds_alternative<ClassColumn::Last>(selector.selector)) return header.size() - 1;
  if (const auto* index = std::get_if<std::size_t>(&selector.selector)) {
    if (*index >= header.size()) throw not_found("index " + std::to_string(*index));
    return *index;
  }
  const auto& name = std::get<std::string>(selector.selector);
  const auto it = std::find(header.begin(), header.end(), name);
  if (it != header.end()) return static_cast<std::size_t>(it - header.begin());
  if (const auto index = parse_index(name); index && *index < header.size()) return *index;
  throw not_found("'" + name + "'");
}

}  // namespace

ClassColumn ClassColumn::parse(std::string_view text) {
  if (text.empty() || text == "last") return last();
  return by_name(std::string(text));
}

Dataset parse_csv(std::string_view text, std::string name, const LoadOptions& options) {
  const auto records = split_records(text);
  if (records.empty()) throw DataError(DataErrorKind::parse_error, "parse error: missing header row");

  const auto& header = records.front().fields;
  {
    std::set<std::string> seen;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (!seen.insert(header[c]).second) {
        throw DataError(DataErrorKind::parse_error,
                        "parse error at line " + std::to_string(records.front().line) + ", column " +
                            std::to_string(c + 1) + ": duplicate column name '" + header[c] + "'");
      }
    }
  }
  const std::size_t class_col = resolve_class_column(options.class_column, header);
  if (header.size() < 3) {
    throw DataError(DataErrorKind::too_few_features,
                    "need at least 2 feature columns besides the class, found " +
                        std::to_string(header.size() - 1));
  }

  const std::size_t width = header.size();
  const std::size_t feature_count = width - 1;
  std::vector<std::size_t> feature_cols;
  for (std::size_t c = 0; c < width; ++c) {
    if (c != class_col) feature_cols.push_back(c);
  }

  struct Pending {
    std::vector<double> values;
    std::string label;
    // Location of the first missing or unparseable cell, if any.
    std::optional<std::pair<std::size_t, std::size_t>> bad_cell;
  };
  std::vector<Pending> pending;
  pending.reserve(records.size() - 1);
  std::vector<std::size_t> numeric_count(feature_count, 0);
  std::vector<std::optional<std::size_t>> first_garbage_line(feature_count);

  const auto is_missing = [&](const std::string& cell) {
    return cell.empty() || cell == options.missing_marker;
  };

  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != width) {
      throw DataError(DataErrorKind::parse_error,
                      "parse error at line " + std::to_string(rec.line) + ": expected " +
                          std::to_string(width) + " fields, found " + std::to_string(rec.fields.size()));
    }
    Pending row;
    row.values.resize(feature_count, 0.0);
    for (std::size_t f = 0; f < feature_count; ++f) {
      const auto& cell = rec.fields[feature_cols[f]];
      if (is_missing(cell)) {
        if (!row.bad_cell) row.bad_cell = {rec.line, feature_cols[f] + 1};
        continue;
      }
      if (const auto v = parse_number(cell)) {
        row.values[f] = *v;
        ++numeric_count[f];
      } else {
        if (!row.bad_cell) row.bad_cell = {rec.line, feature_cols[f] + 1};
        if (!first_garbage_line[f]) first_garbage_line[f] = rec.line;
      }
    }
    row.label = rec.fields[class_col];
    if (is_missing(row.label) && !row.bad_cell) row.bad_cell = {rec.line, class_col + 1};
    pending.push_back(std::move(row));
  }

  for (std::size_t f = 0; f < feature_count; ++f) {
    if (numeric_count[f] == 0 && first_garbage_line[f]) {
      throw DataError(DataErrorKind::non_numeric_column,
                      "column '" + header[feature_cols[f]] + "' is not numeric (first value at line " +
                          std::to_string(*first_garbage_line[f]) + ")");
    }
  }

  Dataset ds;
  ds.name = std::move(name);
  for (const auto c : feature_cols) ds.feature_names.push_back(header[c]);

  std::vector<const Pending*> kept;
  for (const auto& row : pending) {
    if (row.bad_cell) {
      if (!options.drop_missing) {
        throw DataError(DataErrorKind::parse_error,
                        "parse error at line " + std::to_string(row.bad_cell->first) + ", column " +
                            std::to_string(row.bad_cell->second) + ": missing or non-numeric value");
      }
      ++ds.dropped_rows;
      continue;
    }
    kept.push_back(&row);
  }

  std::set<std::string> classes;
  for (const auto* row : kept) classes.insert(row->label);
  ds.class_names.assign(classes.begin(), classes.end());
  std::map<std::string, int> code;
  for (std::size_t k = 0; k < ds.class_names.size(); ++k) code[ds.class_names[k]] = static_cast<int>(k);

  ds.samples = Matrix(kept.size(), feature_count);
  ds.labels.reserve(kept.size());
  for (std::size_t r = 0; r < kept.size(); ++r) {
    std::copy(kept[r]->values.begin(), kept[r]->values.end(), ds.samples.row(r).begin());
    ds.labels.push_back(code.at(kept[r]->label));
  }
  validate(ds);
  return ds;
}

Dataset load_csv(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(DataErrorKind::file_not_found, "file not found: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), path.stem().string(), options);
}

void validate(const Dataset& ds) {
  if (ds.features() < 2 || ds.feature_names.size() != ds.features()) {
    throw DataError(DataErrorKind::too_few_features,
                    "need at least 2 features, found " + std::to_string(ds.features()));
  }
  if (ds.rows() < 2) {
    throw DataError(DataErrorKind::too_few_rows,
                    "need at least 2 complete rows, found " + std::to_string(ds.rows()));
  }
  if (ds.labels.size() != ds.rows()) {
    throw DataError(DataErrorKind::parse_error, "label count does not match row count");
  }
  std::set<int> distinct(ds.labels.begin(), ds.labels.end());
  if (distinct.size() < 2) {
    throw DataError(DataErrorKind::too_few_classes,
                    "need at least 2 classes, found " + std::to_string(distinct.size()));
  }
  std::set<std::string> names(ds.feature_names.begin(), ds.feature_names.end());
  if (names.size() != ds.feature_names.size()) {
    throw DataError(DataErrorKind::parse_error, "feature names are not unique");
  }
}

Dataset select_features(const Dataset& ds, std::span<const std::size_t> columns) {
  Dataset out;
  out.name = ds.name;
  for (const auto c : columns) out.feature_names.push_back(ds.feature_names.at(c));
  out.samples = ds.samples.select_columns(columns);
  out.labels = ds.labels;
  out.class_names = ds.class_names;
  out.dropped_rows = ds.dropped_rows;
  return out;
}

DiscretizedColumn discretize(std::span<const double> column, int bin_count) {
  if (column.empty()) throw DataError(DataErrorKind::empty_column, "cannot discretize an empty column");
  if (bin_count < 1) throw std::invalid_argument("bin count must be at least 1");

  const auto [lo_it, hi_it] = std::minmax_element(column.begin(), column.end());
  const double lo = *lo_it;
  const double hi = *hi_it;

  DiscretizedColumn out;
  out.bins.assign(column.size(), 0);
  if (!(hi > lo)) {
    out.bin_count = 1;
    out.edges = {lo, hi};
    return out;
  }

  out.bin_count = bin_count;
  const double width = (hi - lo) / bin_count;
  out.edges.resize(static_cast<std::size_t>(bin_count) + 1);
  for (int b = 0; b <= bin_count; ++b) out.edges[static_cast<std::size_t>(b)] = lo + width * b;
  out.edges.back() = hi;

  for (std::size_t i = 0; i < column.size(); ++i) {
    const int b = static_cast<int>(std::floor((column[i] - lo) / width));
    out.bins[i] = std::clamp(b, 0, bin_count - 1);
  }
  return out;
}

std::string_view to_string(DataErrorKind kind) {
  switch (kind) {
    case DataErrorKind::file_not_found: return "file_not_found";
    case DataErrorKind::parse_error: return "parse_error";
    case DataErrorKind::class_column_not_found: return "class_column_not_found";
    case DataErrorKind::non_numeric_column: return "non_numeric_column";
    case DataErrorKind::too_few_classes: return "too_few_classes";
    case DataErrorKind::too_few_features: return "too_few_features";
    case DataErrorKind::too_few_rows: return "too_few_rows";
    case DataErrorKind::empty_column: return "empty_column";
  }
  return "parse_error";
}

}  // namespace famex
