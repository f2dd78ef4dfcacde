#include "famex/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

namespace famex {
namespace {

double entropy_of_counts(const auto& counts, double total) {
  double h = 0.0;
  for (const auto& [key, count] : counts) {
    if (count == 0) continue;
    const double p = static_cast<double>(count) / total;
    h -= p * std::log2(p);
  }
  return h;
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
  if (x.size() < 2) throw std::invalid_argument("pearson: need at least 2 values");

  const auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double e) { return e == v.front(); });
  };
  if (constant(x) || constant(y)) return 0.0;

  const double n = static_cast<double>(x.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mean_x += x[i];
    mean_y += y[i];
  }
  mean_x /= n;
  mean_y /= n;

  double cov = 0.0;
  double var_x = 0.0;
  double var_y = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    cov += dx * dy;
    var_x += dx * dx;
    var_y += dy * dy;
  }
  cov /= n;
  var_x /= n;
  var_y /= n;
  if (var_x <= 0.0 || var_y <= 0.0) return 0.0;
  return std::clamp(cov / std::sqrt(var_x * var_y), -1.0, 1.0);
}

CorrelationMatrix correlation_matrix(const Dataset& dataset, bool absolute) {
  const std::size_t n = dataset.features();
  std::vector<std::vector<double>> columns;
  columns.reserve(n);
  for (std::size_t j = 0; j < n; ++j) columns.push_back(dataset.samples.column(j));

  CorrelationMatrix corr{n, std::vector<double>(n * n, 0.0), absolute};
  for (std::size_t i = 0; i < n; ++i) {
    corr.at(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      double r = pearson(columns[i], columns[j]);
      if (absolute) r = std::abs(r);
      corr.at(i, j) = r;
      corr.at(j, i) = r;
    }
  }
  return corr;
}

double entropy(std::span<const int> labels) {
  if (labels.empty()) throw std::invalid_argument("entropy: empty input");
  std::map<int, std::size_t> counts;
  for (const int v : labels) ++counts[v];
  return entropy_of_counts(counts, static_cast<double>(labels.size()));
}

double joint_entropy(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw std::invalid_argument("joint_entropy: length mismatch");
  if (a.empty()) throw std::invalid_argument("joint_entropy: empty input");
  std::map<std::pair<int, int>, std::size_t> counts;
  for (std::size_t i = 0; i < a.size(); ++i) ++counts[{a[i], b[i]}];
  return entropy_of_counts(counts, static_cast<double>(a.size()));
}

double mutual_information(const DiscretizedColumn& feature, std::span<const int> labels) {
  if (feature.bins.size() != labels.size()) {
    throw std::invalid_argument("mutual_information: length mismatch");
  }
  const double mi = entropy(labels) + entropy(feature.bins) - joint_entropy(labels, feature.bins);
  return std::max(mi, 0.0);
}

MutualInformationVector mi_classif(const Dataset& dataset, int bin_count) {
  MutualInformationVector out;
  out.bin_count = bin_count;
  out.values.reserve(dataset.features());
  for (std::size_t j = 0; j < dataset.features(); ++j) {
    const auto column = dataset.samples.column(j);
    out.values.push_back(mutual_information(discretize(column, bin_count), dataset.labels));
  }
  return out;
}

}  // namespace famex
