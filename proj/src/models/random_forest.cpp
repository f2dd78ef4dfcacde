#include <algorithm>
#include <cmath>

#include "classifiers.hpp"
#include "famex/rng.hpp"

namespace famex::detail {
namespace {

class RandomForest final : public Classifier {
 public:
  RandomForest(std::size_t features, std::vector<CartTree> trees, std::vector<int> classes)
      : Classifier(features), trees_(std::move(trees)), classes_(std::move(classes)) {}

 protected:
  int predict_row(std::span<const double> x) const override {
    std::vector<std::size_t> votes(classes_.size(), 0);
    for (const auto& tree : trees_) ++votes[static_cast<std::size_t>(tree.predict_code(x))];
    // Ties go to the lowest class code.
    return classes_[static_cast<std::size_t>(std::max_element(votes.begin(), votes.end()) - votes.begin())];
  }

 private:
  std::vector<CartTree> trees_;
  std::vector<int> classes_;
};

}  // namespace

std::unique_ptr<Classifier> train_random_forest(const ClassifierSpec& spec, const Matrix& X, const ClassIndex& y) {
  CartTree::Options options;
  options.max_depth = static_cast<std::size_t>(spec.param("max_depth"));
  options.min_samples_leaf = static_cast<std::size_t>(spec.param("min_samples_leaf"));
  options.max_features = static_cast<std::size_t>(spec.param("max_features"));
  if (options.max_features == 0) {
    options.max_features = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(X.cols()))));
  }

  const auto n_trees = static_cast<std::size_t>(spec.param("n_trees"));
  const std::size_t m = X.rows();
  std::vector<CartTree> trees;
  trees.reserve(n_trees);
  std::vector<std::size_t> sample(m);
  for (std::size_t t = 0; t < n_trees; ++t) {
    Rng rng(derive_seed(spec.seed(), t, 0));
    for (auto& s : sample) s = rng.uniform_index(m);
    std::sort(sample.begin(), sample.end());
    trees.emplace_back(X, y.codes, y.classes.size(), sample, options, derive_seed(spec.seed(), t, 1));
  }
  return std::make_unique<RandomForest>(X.cols(), std::move(trees), y.classes);
}

}  // namespace famex::detail
