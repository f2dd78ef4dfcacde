#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <stdexcept>

#include "classifiers.hpp"

namespace famex {
namespace {

const std::map<std::string, double>& defaults(ClassifierKind kind) {
  static const std::map<std::string, double> svm{{"C", 1.0}, {"epochs", 1000}};
  static const std::map<std::string, double> tree{{"max_depth", 10}, {"min_samples_leaf", 1}, {"max_features", 0}};
  static const std::map<std::string, double> forest{
      {"n_trees", 100}, {"max_depth", 0}, {"min_samples_leaf", 1}, {"max_features", 0}};
  static const std::map<std::string, double> bayes{{"var_smoothing", 1e-9}};
  switch (kind) {
    case ClassifierKind::svm: return svm;
    case ClassifierKind::decision_tree: return tree;
    case ClassifierKind::random_forest: return forest;
    case ClassifierKind::naive_bayes: return bayes;
  }
  return svm;
}

bool is_count(const std::string& key) {
  return key == "epochs" || key == "max_depth" || key == "min_samples_leaf" || key == "max_features" ||
         key == "n_trees";
}

}  // namespace

std::string_view to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::svm: return "svm";
    case ClassifierKind::decision_tree: return "decision_tree";
    case ClassifierKind::random_forest: return "random_forest";
    case ClassifierKind::naive_bayes: return "naive_bayes";
  }
  return "svm";
}

ClassifierKind parse_classifier_kind(std::string_view text) {
  if (text == "svm") return ClassifierKind::svm;
  if (text == "decision_tree" || text == "dt") return ClassifierKind::decision_tree;
  if (text == "random_forest" || text == "rf") return ClassifierKind::random_forest;
  if (text == "naive_bayes" || text == "nb") return ClassifierKind::naive_bayes;
  throw std::invalid_argument("unknown classifier '" + std::string(text) +
                              "' (expected svm, decision_tree, random_forest or naive_bayes)");
}

std::vector<ClassifierKind> all_classifier_kinds() {
  return {ClassifierKind::svm, ClassifierKind::decision_tree, ClassifierKind::random_forest,
          ClassifierKind::naive_bayes};
}

ClassifierSpec::ClassifierSpec(ClassifierKind kind, const std::map<std::string, std::string>& hyperparameters,
                               std::uint64_t seed)
    : kind_(kind), params_(defaults(kind)), seed_(seed) {
  for (const auto& [key, text] : hyperparameters) {
    if (!params_.contains(key)) {
      throw std::invalid_argument("unknown hyperparameter '" + key + "' for " + std::string(to_string(kind)));
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value) || value < 0.0) {
      throw std::invalid_argument("invalid value '" + text + "' for hyperparameter '" + key + "'");
    }
    if (is_count(key) && value != std::floor(value)) {
      throw std::invalid_argument("hyperparameter '" + key + "' must be an integer");
    }
    params_[key] = value;
  }
  if (kind == ClassifierKind::svm && !(params_["C"] > 0.0)) throw std::invalid_argument("svm C must be positive");
  if (kind == ClassifierKind::svm && params_["epochs"] < 1) throw std::invalid_argument("svm epochs must be >= 1");
  if (kind == ClassifierKind::random_forest && params_["n_trees"] < 1) {
    throw std::invalid_argument("n_trees must be >= 1");
  }
  if (params_.contains("min_samples_leaf") && params_["min_samples_leaf"] < 1) {
    throw std::invalid_argument("min_samples_leaf must be >= 1");
  }
}

ClassifierSpec ClassifierSpec::with_seed(std::uint64_t seed) const {
  ClassifierSpec copy = *this;
  copy.seed_ = seed;
  return copy;
}

std::pair<std::string, std::string> ClassifierSpec::parse_assignment(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw std::invalid_argument("expected key=value, got '" + std::string(text) + "'");
  }
  return {std::string(text.substr(0, eq)), std::string(text.substr(eq + 1))};
}

std::vector<int> Classifier::predict(const Matrix& X) const {
  if (X.rows() > 0 && X.cols() != feature_count_) {
    throw std::invalid_argument("predict: model expects " + std::to_string(feature_count_) + " features, got " +
                                std::to_string(X.cols()));
  }
  std::vector<int> out;
  out.reserve(X.rows());
  for (std::size_t r = 0; r < X.rows(); ++r) out.push_back(predict_row(X.row(r)));
  return out;
}

namespace detail {

ClassIndex index_classes(std::span<const int> y) {
  ClassIndex out;
  const std::set<int> distinct(y.begin(), y.end());
  out.classes.assign(distinct.begin(), distinct.end());
  out.codes.reserve(y.size());
  for (const int v : y) {
    out.codes.push_back(static_cast<int>(std::lower_bound(out.classes.begin(), out.classes.end(), v) -
                                         out.classes.begin()));
  }
  return out;
}

}  // namespace detail

std::unique_ptr<Classifier> train(const ClassifierSpec& spec, const Matrix& X, std::span<const int> y) {
  if (X.rows() == 0 || X.cols() == 0) throw std::invalid_argument("train: empty data");
  if (X.rows() != y.size()) throw std::invalid_argument("train: row count does not match label count");
  const auto classes = detail::index_classes(y);
  if (classes.classes.size() < 2) throw std::invalid_argument("train: training set has a single class");
  switch (spec.kind()) {
    case ClassifierKind::svm: return detail::train_linear_svm(spec, X, classes);
    case ClassifierKind::decision_tree: return detail::train_decision_tree(spec, X, classes);
    case ClassifierKind::random_forest: return detail::train_random_forest(spec, X, classes);
    case ClassifierKind::naive_bayes: return detail::train_naive_bayes(spec, X, classes);
  }
  throw std::invalid_argument("train: unknown classifier kind");
}

double accuracy(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) throw std::invalid_argument("accuracy: length mismatch");
  if (truth.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += truth[i] == predicted[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

}  // namespace famex
