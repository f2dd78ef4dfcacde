#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "famex/dataset.hpp"

namespace famex {

// Symmetric n x n correlation matrix, row-major.
struct CorrelationMatrix {
  std::size_t n = 0;
  std::vector<double> values;
  bool absolute = true;

  double at(std::size_t i, std::size_t j) const { return values[i * n + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * n + j]; }
};

// Pearson r with population (1/n) moments. Returns 0 when either input has
// zero variance, so a constant feature carries no redundancy.
double pearson(std::span<const double> x, std::span<const double> y);

// |r| (or signed r when absolute is false) over all feature pairs.
CorrelationMatrix correlation_matrix(const Dataset& dataset, bool absolute = true);

// Shannon entropies in bits over empirical frequencies of integer codes.
double entropy(std::span<const int> labels);
double joint_entropy(std::span<const int> a, std::span<const int> b);

// MI(C, f) = H(C) + H(f) - H(C, f), clamped at zero.
double mutual_information(const DiscretizedColumn& feature, std::span<const int> labels);

struct MutualInformationVector {
  std::vector<double> values;
  int bin_count = 0;
};

// Per-feature MI against the class after equal-width discretization.
MutualInformationVector mi_classif(const Dataset& dataset, int bin_count);

}  // namespace famex
