#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "classifiers.hpp"

namespace famex::detail {
namespace {

class GaussianNaiveBayes final : public Classifier {
 public:
  GaussianNaiveBayes(std::size_t features, std::vector<double> log_prior, std::vector<std::vector<double>> mean,
                     std::vector<std::vector<double>> var, std::vector<int> classes)
      : Classifier(features),
        log_prior_(std::move(log_prior)),
        mean_(std::move(mean)),
        var_(std::move(var)),
        classes_(std::move(classes)) {}

 protected:
  int predict_row(std::span<const double> x) const override {
    std::size_t best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < classes_.size(); ++c) {
      double score = log_prior_[c];
      for (std::size_t j = 0; j < x.size(); ++j) {
        const double d = x[j] - mean_[c][j];
        score -= 0.5 * (std::log(2.0 * std::numbers::pi * var_[c][j]) + d * d / var_[c][j]);
      }
      if (score > best_score) {
        best_score = score;
        best = c;
      }
    }
    return classes_[best];
  }

 private:
  std::vector<double> log_prior_;
  std::vector<std::vector<double>> mean_;
  std::vector<std::vector<double>> var_;
  std::vector<int> classes_;
};

}  // namespace

std::unique_ptr<Classifier> train_naive_bayes(const ClassifierSpec& spec, const Matrix& X, const ClassIndex& y) {
  const std::size_t m = X.rows();
  const std::size_t d = X.cols();
  const std::size_t k = y.classes.size();

  // Smoothing is relative to the largest per-feature variance of the whole set.
  double max_var = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double mu = 0.0;
    for (std::size_t i = 0; i < m; ++i) mu += X(i, j);
    mu /= static_cast<double>(m);
    double v = 0.0;
    for (std::size_t i = 0; i < m; ++i) v += (X(i, j) - mu) * (X(i, j) - mu);
    max_var = std::max(max_var, v / static_cast<double>(m));
  }
  double epsilon = spec.param("var_smoothing") * max_var;
  if (!(epsilon > 0.0)) epsilon = std::numeric_limits<double>::min();

  std::vector<std::size_t> count(k, 0);
  std::vector<std::vector<double>> mean(k, std::vector<double>(d, 0.0));
  std::vector<std::vector<double>> var(k, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    const auto c = static_cast<std::size_t>(y.codes[i]);
    ++count[c];
    for (std::size_t j = 0; j < d; ++j) mean[c][j] += X(i, j);
  }
  for (std::size_t c = 0; c < k; ++c) {
    for (auto& v : mean[c]) v /= static_cast<double>(count[c]);
  }
  for (std::size_t i = 0; i < m; ++i) {
    const auto c = static_cast<std::size_t>(y.codes[i]);
    for (std::size_t j = 0; j < d; ++j) var[c][j] += (X(i, j) - mean[c][j]) * (X(i, j) - mean[c][j]);
  }
  std::vector<double> log_prior(k);
  for (std::size_t c = 0; c < k; ++c) {
    for (auto& v : var[c]) v = v / static_cast<double>(count[c]) + epsilon;
    log_prior[c] = std::log(static_cast<double>(count[c]) / static_cast<double>(m));
  }
  return std::make_unique<GaussianNaiveBayes>(d, std::move(log_prior), std::move(mean), std::move(var), y.classes);
}

}  // namespace famex::detail
