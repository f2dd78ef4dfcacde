#include <algorithm>
#include <numeric>

#include "classifiers.hpp"
#include "famex/rng.hpp"

namespace famex::detail {
namespace {

double gini_sum(const std::vector<std::size_t>& counts, std::size_t total) {
  if (total == 0) return 0.0;
  double sum_sq = 0.0;
  for (const auto c : counts) sum_sq += static_cast<double>(c) * static_cast<double>(c);
  // total * gini = total - sum(c^2) / total
  return static_cast<double>(total) - sum_sq / static_cast<double>(total);
}

int majority(const std::vector<std::size_t>& counts) {
  return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& X, std::span<const int> codes, std::size_t class_count, const CartTree::Options& options,
              std::uint64_t seed)
      : X_(X), codes_(codes), class_count_(class_count), options_(options), rng_(seed) {
    features_.resize(X.cols());
    std::iota(features_.begin(), features_.end(), 0);
  }

  struct Split {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double impurity = 0.0;
  };

  std::vector<std::size_t> counts_of(std::span<const std::size_t> rows) const {
    std::vector<std::size_t> counts(class_count_, 0);
    for (const auto r : rows) ++counts[static_cast<std::size_t>(codes_[r])];
    return counts;
  }

  Split best_split(std::span<const std::size_t> rows, const std::vector<std::size_t>& counts) {
    const std::size_t n = rows.size();
    const std::size_t min_leaf = options_.min_samples_leaf;
    Split best;
    best.impurity = gini_sum(counts, n);

    std::span<const std::size_t> candidates(features_);
    if (options_.max_features > 0 && options_.max_features < features_.size()) {
      // Partial Fisher-Yates: the first max_features entries become a uniform sample.
      for (std::size_t i = 0; i < options_.max_features; ++i) {
        std::swap(features_[i], features_[i + rng_.uniform_index(features_.size() - i)]);
      }
      candidates = candidates.first(options_.max_features);
      sampled_.assign(candidates.begin(), candidates.end());
      std::sort(sampled_.begin(), sampled_.end());
      candidates = sampled_;
    }

    std::vector<std::size_t> sorted(rows.begin(), rows.end());
    std::vector<std::size_t> left(class_count_);
    for (const auto f : candidates) {
      std::sort(sorted.begin(), sorted.end(), [&](std::size_t a, std::size_t b) {
        const double va = X_(a, f);
        const double vb = X_(b, f);
        return va < vb || (va == vb && a < b);
      });
      std::fill(left.begin(), left.end(), 0);
      std::vector<std::size_t> right = counts;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const auto c = static_cast<std::size_t>(codes_[sorted[i]]);
        ++left[c];
        --right[c];
        const double here = X_(sorted[i], f);
        const double next = X_(sorted[i + 1], f);
        if (!(here < next)) continue;
        const std::size_t n_left = i + 1;
        if (n_left < min_leaf || n - n_left < min_leaf) continue;
        const double impurity = gini_sum(left, n_left) + gini_sum(right, n - n_left);
        if (!best.found || impurity < best.impurity) {
          best.found = true;
          best.feature = f;
          best.threshold = here + (next - here) / 2.0;
          if (!(best.threshold < next)) best.threshold = here;
          best.impurity = impurity;
        }
      }
    }
    return best;
  }

 private:
  const Matrix& X_;
  std::span<const int> codes_;
  std::size_t class_count_;
  CartTree::Options options_;
  Rng rng_;
  std::vector<std::size_t> features_;
  std::vector<std::size_t> sampled_;
};

class DecisionTree final : public Classifier {
 public:
  DecisionTree(std::size_t features, CartTree tree, std::vector<int> classes)
      : Classifier(features), tree_(std::move(tree)), classes_(std::move(classes)) {}

 protected:
  int predict_row(std::span<const double> x) const override { return classes_[tree_.predict_code(x)]; }

 private:
  CartTree tree_;
  std::vector<int> classes_;
};

}  // namespace

CartTree::CartTree(const Matrix& X, std::span<const int> codes, std::size_t class_count,
                   std::span<const std::size_t> rows, const Options& options, std::uint64_t seed) {
  TreeBuilder builder(X, codes, class_count, options, seed);

  struct Task {
    int node;
    std::vector<std::size_t> rows;
    std::size_t depth;
  };
  nodes_.push_back({});
  std::vector<Task> stack;
  stack.push_back({0, std::vector<std::size_t>(rows.begin(), rows.end()), 0});

  // Depth-first with the left child processed first, so node layout and RNG
  // consumption follow a fixed order.
  while (!stack.empty()) {
    Task task = std::move(stack.back());
    stack.pop_back();
    const auto counts = builder.counts_of(task.rows);
    nodes_[static_cast<std::size_t>(task.node)].code = majority(counts);

    const bool pure = std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }) <= 1;
    const bool depth_reached = options.max_depth > 0 && task.depth >= options.max_depth;
    if (pure || depth_reached || task.rows.size() < 2 * options.min_samples_leaf) continue;

    const auto split = builder.best_split(task.rows, counts);
    if (!split.found) continue;

    std::vector<std::size_t> left_rows;
    std::vector<std::size_t> right_rows;
    for (const auto r : task.rows) (X(r, split.feature) <= split.threshold ? left_rows : right_rows).push_back(r);

    const int left = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    const int right = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    auto& node = nodes_[static_cast<std::size_t>(task.node)];
    node.feature = static_cast<int>(split.feature);
    node.threshold = split.threshold;
    node.left = left;
    node.right = right;
    stack.push_back({right, std::move(right_rows), task.depth + 1});
    stack.push_back({left, std::move(left_rows), task.depth + 1});
  }
}

int CartTree::predict_code(std::span<const double> x) const {
  std::size_t i = 0;
  while (nodes_[i].feature >= 0) {
    const auto& node = nodes_[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right);
  }
  return nodes_[i].code;
}

std::unique_ptr<Classifier> train_decision_tree(const ClassifierSpec& spec, const Matrix& X, const ClassIndex& y) {
  CartTree::Options options;
  options.max_depth = static_cast<std::size_t>(spec.param("max_depth"));
  options.min_samples_leaf = static_cast<std::size_t>(spec.param("min_samples_leaf"));
  options.max_features = static_cast<std::size_t>(spec.param("max_features"));
  std::vector<std::size_t> rows(X.rows());
  std::iota(rows.begin(), rows.end(), 0);
  CartTree tree(X, y.codes, y.classes.size(), rows, options, spec.seed());
  return std::make_unique<DecisionTree>(X.cols(), std::move(tree), y.classes);
}

}  // namespace famex::detail
