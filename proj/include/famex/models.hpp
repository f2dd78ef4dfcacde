#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "famex/matrix.hpp"

namespace famex {

enum class ClassifierKind { svm, decision_tree, random_forest, naive_bayes };

std::string_view to_string(ClassifierKind kind);
ClassifierKind parse_classifier_kind(std::string_view text);
std::vector<ClassifierKind> all_classifier_kinds();

// Classifier choice plus hyperparameters. Unknown keys or unparseable values
// are rejected at construction; omitted keys take the defaults below.
//
//   svm            C=1.0 epochs=1000
//   decision_tree  max_depth=10 min_samples_leaf=1 max_features=0 (all)
//   random_forest  n_trees=100 max_depth=0 (unbounded) min_samples_leaf=1
//                  max_features=0 (floor(sqrt(n)))
//   naive_bayes    var_smoothing=1e-9
class ClassifierSpec {
 public:
  explicit ClassifierSpec(ClassifierKind kind, const std::map<std::string, std::string>& hyperparameters = {},
                          std::uint64_t seed = 42);

  ClassifierKind kind() const { return kind_; }
  std::uint64_t seed() const { return seed_; }
  double param(const std::string& key) const { return params_.at(key); }
  const std::map<std::string, double>& params() const { return params_; }

  ClassifierSpec with_seed(std::uint64_t seed) const;

  // Parses "key=value".
  static std::pair<std::string, std::string> parse_assignment(std::string_view text);

 private:
  ClassifierKind kind_;
  std::map<std::string, double> params_;
  std::uint64_t seed_;
};

class Classifier {
 public:
  virtual ~Classifier() = default;

  std::size_t feature_count() const { return feature_count_; }

  // One label per row. Throws std::invalid_argument on a column mismatch.
  std::vector<int> predict(const Matrix& X) const;

 protected:
  explicit Classifier(std::size_t feature_count) : feature_count_(feature_count) {}
  virtual int predict_row(std::span<const double> x) const = 0;

 private:
  std::size_t feature_count_;
};

// Deterministic given spec (including its seed) and data.
// Throws std::invalid_argument on empty data, size mismatch or a single class.
std::unique_ptr<Classifier> train(const ClassifierSpec& spec, const Matrix& X, std::span<const int> y);

double accuracy(std::span<const int> truth, std::span<const int> predicted);

// Fold id in [0, k) for every sample. Each class is shuffled and dealt
// round-robin, so per-class fold counts differ by at most one.
std::vector<std::size_t> stratified_fold_assignment(std::span<const int> y, std::size_t k, std::uint64_t seed);

struct CvResult {
  std::vector<double> fold_accuracies;
  double mean = 0.0;
  double std = 0.0;  // population
  std::size_t folds = 0;
  std::uint64_t seed = 0;
};

// Fold f trains with spec.with_seed(derive_seed(seed, f)).
CvResult stratified_kfold(const Matrix& X, std::span<const int> y, std::size_t k, const ClassifierSpec& spec,
                          std::uint64_t seed);

struct HoldoutSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Per class, round(test_fraction * count) samples go to test, kept at least
// one on each side when the class has two or more members.
HoldoutSplit stratified_holdout(std::span<const int> y, double test_fraction, std::uint64_t seed);

template <typename T>
std::vector<T> gather(std::span<const T> values, std::span<const std::size_t> indices) {
  std::vector<T> out;
  out.reserve(indices.size());
  for (const auto i : indices) out.push_back(values[i]);
  return out;
}

}  // namespace famex
