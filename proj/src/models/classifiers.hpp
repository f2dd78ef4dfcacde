#pragma once

#include <memory>
#include <span>
#include <vector>

#include "famex/models.hpp"

namespace famex::detail {

// Sorted distinct labels and each sample's index into them.
struct ClassIndex {
  std::vector<int> classes;
  std::vector<int> codes;
};
ClassIndex index_classes(std::span<const int> y);

std::unique_ptr<Classifier> train_linear_svm(const ClassifierSpec& spec, const Matrix& X, const ClassIndex& y);
std::unique_ptr<Classifier> train_decision_tree(const ClassifierSpec& spec, const Matrix& X, const ClassIndex& y);
std::unique_ptr<Classifier> train_random_forest(const ClassifierSpec& spec, const Matrix& X, const ClassIndex& y);
std::unique_ptr<Classifier> train_naive_bayes(const ClassifierSpec& spec, const Matrix& X, const ClassIndex& y);

// CART tree over class codes, shared by the tree and the forest.
class CartTree {
 public:
  struct Options {
    std::size_t max_depth = 0;  // 0 = unbounded
    std::size_t min_samples_leaf = 1;
    std::size_t max_features = 0;  // 0 = all
  };

  CartTree(const Matrix& X, std::span<const int> codes, std::size_t class_count, std::span<const std::size_t> rows,
           const Options& options, std::uint64_t seed);

  int predict_code(std::span<const double> x) const;

 private:
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    int code = 0;
  };
  std::vector<Node> nodes_;
};

}  // namespace famex::detail
