#include <cmath>
#include <numeric>

#include "classifiers.hpp"
#include "famex/rng.hpp"

namespace famex::detail {
namespace {

// Hinge-loss linear classifier on standardized inputs, trained with the
// Pegasos stochastic subgradient schedule (step 1/(lambda t), lambda = 1/(C m)).
// The last weight is an intercept on a constant 1 input.
class LinearSvm final : public Classifier {
 public:
  LinearSvm(std::vector<double> mean, std::vector<double> scale, std::vector<std::vector<double>> weights,
            std::vector<int> classes)
      : Classifier(mean.size()),
        mean_(std::move(mean)),
        scale_(std::move(scale)),
        weights_(std::move(weights)),
        classes_(std::move(classes)) {}

 protected:
  int predict_row(std::span<const double> x) const override {
    std::vector<double> z(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) z[j] = (x[j] - mean_[j]) / scale_[j];
    if (weights_.size() == 1) return classes_[score(weights_[0], z) >= 0.0 ? 1 : 0];
    std::size_t best = 0;
    double best_score = score(weights_[0], z);
    for (std::size_t c = 1; c < weights_.size(); ++c) {
      const double s = score(weights_[c], z);
      if (s > best_score) {
        best_score = s;
        best = c;
      }
    }
    return classes_[best];
  }

 private:
  static double score(const std::vector<double>& w, std::span<const double> z) {
    double s = w.back();
    for (std::size_t j = 0; j < z.size(); ++j) s += w[j] * z[j];
    return s;
  }

  std::vector<double> mean_;
  std::vector<double> scale_;
  std::vector<std::vector<double>> weights_;
  std::vector<int> classes_;
};

std::vector<double> pegasos(const Matrix& Z, const std::vector<double>& target, double C, std::size_t epochs,
                            std::uint64_t seed) {
  const std::size_t m = Z.rows();
  const std::size_t d = Z.cols();
  const double lambda = 1.0 / (C * static_cast<double>(m));
  const double radius = 1.0 / std::sqrt(lambda);
  std::vector<double> w(d + 1, 0.0);
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);

  std::size_t t = 0;
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (const auto i : order) {
      ++t;
      const double eta = 1.0 / (lambda * static_cast<double>(t));
      const auto x = Z.row(i);
      double margin = w[d];
      for (std::size_t j = 0; j < d; ++j) margin += w[j] * x[j];
      margin *= target[i];

      const double shrink = 1.0 - eta * lambda;
      for (auto& v : w) v *= shrink;
      if (margin < 1.0) {
        const double step = eta * target[i];
        for (std::size_t j = 0; j < d; ++j) w[j] += step * x[j];
        w[d] += step;
      }
      double norm2 = 0.0;
      for (const double v : w) norm2 += v * v;
      if (norm2 > radius * radius) {
        const double f = radius / std::sqrt(norm2);
        for (auto& v : w) v *= f;
      }
    }
  }
  return w;
}

}  // namespace

std::unique_ptr<Classifier> train_linear_svm(const ClassifierSpec& spec, const Matrix& X, const ClassIndex& y) {
  const std::size_t m = X.rows();
  const std::size_t d = X.cols();
  std::vector<double> mean(d, 0.0);
  std::vector<double> scale(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < m; ++i) mean[j] += X(i, j);
    mean[j] /= static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i) scale[j] += (X(i, j) - mean[j]) * (X(i, j) - mean[j]);
    scale[j] = std::sqrt(scale[j] / static_cast<double>(m));
    if (!(scale[j] > 0.0)) scale[j] = 1.0;
  }
  Matrix Z(m, d);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < d; ++j) Z(i, j) = (X(i, j) - mean[j]) / scale[j];
  }

  const double C = spec.param("C");
  const auto epochs = static_cast<std::size_t>(spec.param("epochs"));
  const std::size_t k = y.classes.size();
  std::vector<std::vector<double>> weights;
  // Binary problems use one separator (positive = second class); otherwise one-vs-rest.
  const std::size_t machines = k == 2 ? 1 : k;
  for (std::size_t c = 0; c < machines; ++c) {
    const int positive = k == 2 ? 1 : static_cast<int>(c);
    std::vector<double> target(m);
    for (std::size_t i = 0; i < m; ++i) target[i] = y.codes[i] == positive ? 1.0 : -1.0;
    weights.push_back(pegasos(Z, target, C, epochs, derive_seed(spec.seed(), c)));
  }
  return std::make_unique<LinearSvm>(std::move(mean), std::move(scale), std::move(weights), y.classes);
}

}  // namespace famex::detail
