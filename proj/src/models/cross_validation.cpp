#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "famex/models.hpp"
#include "famex/rng.hpp"

namespace famex {
namespace {

std::map<int, std::vector<std::size_t>> members_by_class(std::span<const int> y) {
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < y.size(); ++i) groups[y[i]].push_back(i);
  return groups;
}

}  // namespace

std::vector<std::size_t> stratified_fold_assignment(std::span<const int> y, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("cross-validation needs k >= 2");
  auto groups = members_by_class(y);
  for (const auto& [label, members] : groups) {
    if (members.size() < k) {
      throw std::invalid_argument("class " + std::to_string(label) + " has " + std::to_string(members.size()) +
                                  " members, fewer than k = " + std::to_string(k));
    }
  }
  Rng rng(seed);
  std::vector<std::size_t> fold(y.size(), 0);
  std::size_t offset = 0;
  for (auto& [label, members] : groups) {
    rng.shuffle(std::span<std::size_t>(members));
    for (std::size_t i = 0; i < members.size(); ++i) fold[members[i]] = (offset + i) % k;
    offset = (offset + members.size()) % k;
  }
  return fold;
}

CvResult stratified_kfold(const Matrix& X, std::span<const int> y, std::size_t k, const ClassifierSpec& spec,
                          std::uint64_t seed) {
  if (X.rows() != y.size()) throw std::invalid_argument("cross-validation: row count does not match labels");
  const auto fold = stratified_fold_assignment(y, k, seed);

  CvResult result;
  result.folds = k;
  result.seed = seed;
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
    for (std::size_t i = 0; i < fold.size(); ++i) (fold[i] == f ? test_rows : train_rows).push_back(i);
    const auto model = train(spec.with_seed(derive_seed(seed, f)), X.select_rows(train_rows),
                             gather(y, std::span<const std::size_t>(train_rows)));
    const auto predicted = model->predict(X.select_rows(test_rows));
    result.fold_accuracies.push_back(accuracy(gather(y, std::span<const std::size_t>(test_rows)), predicted));
  }
  const double n = static_cast<double>(k);
  result.mean = std::accumulate(result.fold_accuracies.begin(), result.fold_accuracies.end(), 0.0) / n;
  double ss = 0.0;
  for (const double a : result.fold_accuracies) ss += (a - result.mean) * (a - result.mean);
  result.std = std::sqrt(ss / n);
  return result;
}

HoldoutSplit stratified_holdout(std::span<const int> y, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("holdout fraction must be in (0, 1)");
  }
  auto groups = members_by_class(y);
  Rng rng(seed);
  HoldoutSplit split;
  for (auto& [label, members] : groups) {
    rng.shuffle(std::span<std::size_t>(members));
    auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(members.size())));
    if (members.size() >= 2) n_test = std::clamp<std::size_t>(n_test, 1, members.size() - 1);
    for (std::size_t i = 0; i < members.size(); ++i) (i < n_test ? split.test : split.train).push_back(members[i]);
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

}  // namespace famex
