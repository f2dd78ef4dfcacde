#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "famex/models.hpp"
#include "famex/rng.hpp"
#include "helpers.hpp"

using namespace famex;

namespace {

struct Data {
  Matrix X;
  std::vector<int> y;
};

// Two Gaussian classes centred at -offset and +offset on every axis.
Data blobs(std::size_t n, std::size_t dims, double offset, std::uint64_t seed, int classes = 2) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  Data d{Matrix(n, dims), {}};
  for (std::size_t r = 0; r < n; ++r) {
    const int label = static_cast<int>(r % static_cast<std::size_t>(classes));
    d.y.push_back(label);
    for (std::size_t c = 0; c < dims; ++c) {
      const double centre = classes == 2 ? (label == 0 ? -offset : offset)
                                         : offset * std::cos(2.0 * 3.141592653589793 * (label + 0.5 * c) / classes);
      d.X(r, c) = centre + z(gen);
    }
  }
  return d;
}

double train_accuracy(const ClassifierSpec& spec, const Data& d) {
  return accuracy(d.y, train(spec, d.X, d.y)->predict(d.X));
}

}  // namespace

TEST_SUITE("models") {
  TEST_CASE("linear svm separates a separable blob") {
    const auto d = blobs(100, 2, 4.0, 1);
    CHECK(train_accuracy(ClassifierSpec(ClassifierKind::svm), d) == 1.0);
  }

  TEST_CASE("linear svm one-vs-rest on three classes") {
    Data d{Matrix(90, 2), {}};
    std::mt19937_64 gen(3);
    std::normal_distribution<double> z(0.0, 0.3);
    const double centres[3][2] = {{0, 5}, {5, 0}, {-5, -5}};
    for (std::size_t r = 0; r < 90; ++r) {
      const int label = static_cast<int>(r % 3);
      d.y.push_back(label * 10);  // non-contiguous labels map back correctly
      d.X(r, 0) = centres[label][0] + z(gen);
      d.X(r, 1) = centres[label][1] + z(gen);
    }
    CHECK(train_accuracy(ClassifierSpec(ClassifierKind::svm), d) == 1.0);
  }

  TEST_CASE("depth-1 tree learns a threshold") {
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Data d{Matrix(60, 3), {}};
    for (std::size_t r = 0; r < 60; ++r) {
      for (std::size_t c = 0; c < 3; ++c) d.X(r, c) = u(gen);
      d.y.push_back(d.X(r, 0) > 0.4 ? 1 : 0);
    }
    CHECK(train_accuracy(ClassifierSpec(ClassifierKind::decision_tree, {{"max_depth", "1"}}), d) == 1.0);
  }

  TEST_CASE("unbounded tree memorizes unique rows") {
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    Data d{Matrix(80, 2), {}};
    for (std::size_t r = 0; r < 80; ++r) {
      d.X(r, 0) = u(gen);
      d.X(r, 1) = u(gen);
      d.y.push_back(coin(gen));
    }
    d.y[0] = 0;
    d.y[1] = 1;
    const auto model = train(ClassifierSpec(ClassifierKind::decision_tree, {{"max_depth", "0"}}), d.X, d.y);
    CHECK(model->predict(d.X) == d.y);
  }

  TEST_CASE("gaussian naive bayes on separated classes") {
    const auto train_set = blobs(200, 1, 5.0, 5);
    const auto test_set = blobs(200, 1, 5.0, 6);
    const auto model = train(ClassifierSpec(ClassifierKind::naive_bayes), train_set.X, train_set.y);
    CHECK(accuracy(test_set.y, model->predict(test_set.X)) > 0.99);
  }

  TEST_CASE("naive bayes tolerates a constant feature") {
    auto d = blobs(60, 2, 3.0, 8);
    for (std::size_t r = 0; r < 60; ++r) d.X(r, 1) = 7.0;
    CHECK(train_accuracy(ClassifierSpec(ClassifierKind::naive_bayes), d) > 0.9);
  }

  TEST_CASE("every classifier beats the majority baseline on planted signal") {
    std::mt19937_64 gen(10);
    std::normal_distribution<double> z(0.0, 1.0);
    Data train_set{Matrix(300, 4), {}}, test_set{Matrix(300, 4), {}};
    for (auto* d : {&train_set, &test_set}) {
      for (std::size_t r = 0; r < 300; ++r) {
        const int label = r % 3 == 0 ? 1 : 0;  // 2:1 imbalance, majority rate 2/3
        d->y.push_back(label);
        d->X(r, 0) = label + 0.2 * z(gen);
        for (std::size_t c = 1; c < 4; ++c) d->X(r, c) = z(gen);
      }
    }
    for (const auto kind : all_classifier_kinds()) {
      CAPTURE(to_string(kind));
      const auto model = train(ClassifierSpec(kind), train_set.X, train_set.y);
      CHECK(accuracy(test_set.y, model->predict(test_set.X)) > 0.9);
    }
  }

  TEST_CASE("training is deterministic for a fixed seed") {
    const auto d = blobs(120, 3, 0.7, 12);
    const auto test_set = blobs(60, 3, 0.7, 13);
    for (const auto kind : all_classifier_kinds()) {
      CAPTURE(to_string(kind));
      const ClassifierSpec spec(kind, {}, 99);
      CHECK(train(spec, d.X, d.y)->predict(test_set.X) == train(spec, d.X, d.y)->predict(test_set.X));
    }
  }

  TEST_CASE("predict edge cases") {
    const auto d = blobs(20, 2, 3.0, 14);
    for (const auto kind : all_classifier_kinds()) {
      const auto model = train(ClassifierSpec(kind), d.X, d.y);
      CHECK(model->feature_count() == 2);
      CHECK(model->predict(Matrix(0, 2)).empty());
      CHECK_THROWS_AS(model->predict(Matrix(3, 5)), std::invalid_argument);
    }
  }

  TEST_CASE("train rejects bad input") {
    const auto d = blobs(10, 2, 1.0, 15);
    const ClassifierSpec spec(ClassifierKind::svm);
    CHECK_THROWS_AS(train(spec, Matrix(), {}), std::invalid_argument);
    CHECK_THROWS_AS(train(spec, d.X, std::vector<int>(9, 0)), std::invalid_argument);
    CHECK_THROWS_AS(train(spec, d.X, std::vector<int>(10, 1)), std::invalid_argument);
  }

  TEST_CASE("classifier specs") {
    CHECK(parse_classifier_kind("svm") == ClassifierKind::svm);
    CHECK(parse_classifier_kind("dt") == ClassifierKind::decision_tree);
    CHECK(parse_classifier_kind("rf") == ClassifierKind::random_forest);
    CHECK(parse_classifier_kind("nb") == ClassifierKind::naive_bayes);
    CHECK_THROWS_AS(parse_classifier_kind("knn"), std::invalid_argument);

    const ClassifierSpec svm(ClassifierKind::svm);
    CHECK(svm.param("C") == 1.0);
    CHECK(svm.param("epochs") == 1000.0);
    CHECK(svm.seed() == 42);
    CHECK(ClassifierSpec(ClassifierKind::random_forest).param("n_trees") == 100.0);
    CHECK(ClassifierSpec(ClassifierKind::decision_tree).param("max_depth") == 10.0);
    CHECK(ClassifierSpec(ClassifierKind::naive_bayes).param("var_smoothing") == 1e-9);
    CHECK(ClassifierSpec(ClassifierKind::svm, {{"C", "0.5"}}).param("C") == 0.5);

    CHECK_THROWS_AS(ClassifierSpec(ClassifierKind::svm, {{"gamma", "1"}}), std::invalid_argument);
    CHECK_THROWS_AS(ClassifierSpec(ClassifierKind::svm, {{"C", "abc"}}), std::invalid_argument);
    CHECK_THROWS_AS(ClassifierSpec(ClassifierKind::svm, {{"C", "0"}}), std::invalid_argument);
    CHECK_THROWS_AS(ClassifierSpec(ClassifierKind::decision_tree, {{"max_depth", "2.5"}}), std::invalid_argument);
    CHECK_THROWS_AS(ClassifierSpec(ClassifierKind::random_forest, {{"n_trees", "0"}}), std::invalid_argument);

    const auto kv = ClassifierSpec::parse_assignment("C=2");
    CHECK(kv.first == "C");
    CHECK(kv.second == "2");
    CHECK_THROWS_AS(ClassifierSpec::parse_assignment("C2"), std::invalid_argument);
  }

  TEST_CASE("accuracy") {
    CHECK(accuracy(std::vector<int>{1, 0, 1, 1}, std::vector<int>{1, 1, 1, 0}) == 0.5);
    CHECK_THROWS_AS(accuracy(std::vector<int>{1}, std::vector<int>{1, 0}), std::invalid_argument);
  }

  TEST_CASE("k=2 on four samples puts one of each class in every fold") {
    const std::vector<int> y{0, 0, 1, 1};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto fold = stratified_fold_assignment(y, 2, seed);
      CHECK(fold[0] != fold[1]);
      CHECK(fold[2] != fold[3]);
    }
  }

  TEST_CASE("fold assignment partitions and stratifies") {
    std::vector<int> y;
    for (int i = 0; i < 103; ++i) y.push_back(i % 7 == 0 ? 2 : i % 3 == 0 ? 1 : 0);
    const std::size_t k = 5;
    const auto fold = stratified_fold_assignment(y, k, 17);
    REQUIRE(fold.size() == y.size());
    std::vector<std::size_t> sizes(k, 0);
    for (const auto f : fold) {
      REQUIRE(f < k);
      ++sizes[f];
    }
    CHECK(*std::max_element(sizes.begin(), sizes.end()) - *std::min_element(sizes.begin(), sizes.end()) <= 1);
    for (int label = 0; label < 3; ++label) {
      std::vector<std::size_t> per(k, 0);
      for (std::size_t i = 0; i < y.size(); ++i) per[fold[i]] += y[i] == label;
      CHECK(*std::max_element(per.begin(), per.end()) - *std::min_element(per.begin(), per.end()) <= 1);
    }
    CHECK(stratified_fold_assignment(y, k, 17) == fold);
    CHECK(stratified_fold_assignment(y, k, 18) != fold);
    CHECK_THROWS_AS(stratified_fold_assignment(y, 1, 0), std::invalid_argument);
    CHECK_THROWS_AS(stratified_fold_assignment(std::vector<int>{0, 0, 0, 1}, 2, 0), std::invalid_argument);
  }

  TEST_CASE("cross-validation with a perfect feature scores 1") {
    Data d{Matrix(40, 2), {}};
    for (std::size_t r = 0; r < 40; ++r) {
      d.y.push_back(static_cast<int>(r % 2));
      d.X(r, 0) = static_cast<double>(r % 2);
      d.X(r, 1) = static_cast<double>(r);
    }
    for (std::size_t k = 2; k <= 6; ++k) {
      const auto cv = stratified_kfold(d.X, d.y, k, ClassifierSpec(ClassifierKind::decision_tree), 1);
      CHECK(cv.mean == 1.0);
      CHECK(cv.std == 0.0);
      CHECK(cv.fold_accuracies.size() == k);
      CHECK(cv.folds == k);
    }
  }

  TEST_CASE("cross-validation on random labels is near chance") {
    std::mt19937_64 gen(77);
    std::normal_distribution<double> z(0.0, 1.0);
    Data d{Matrix(500, 3), {}};
    for (std::size_t r = 0; r < 500; ++r) {
      d.y.push_back(static_cast<int>(r % 2));
      for (std::size_t c = 0; c < 3; ++c) d.X(r, c) = z(gen);
    }
    Rng rng(5);
    rng.shuffle(std::span<int>(d.y));
    for (const auto kind : all_classifier_kinds()) {
      CAPTURE(to_string(kind));
      const auto spec = kind == ClassifierKind::random_forest
                            ? ClassifierSpec(kind, {{"n_trees", "25"}})
                            : kind == ClassifierKind::svm ? ClassifierSpec(kind, {{"epochs", "50"}}) : ClassifierSpec(kind);
      const auto cv = stratified_kfold(d.X, d.y, 10, spec, 3);
      CHECK(cv.mean >= 0.4);
      CHECK(cv.mean <= 0.6);
      for (const double a : cv.fold_accuracies) {
        CHECK(a >= 0.0);
        CHECK(a <= 1.0);
      }
    }
  }

  TEST_CASE("stratified holdout") {
    std::vector<int> y(40, 0);
    for (std::size_t i = 0; i < 12; ++i) y[i] = 1;
    const auto split = stratified_holdout(y, 0.25, 4);
    CHECK(split.test.size() == 10);  // 3 of 12 plus 7 of 28
    CHECK(split.train.size() == 30);
    CHECK(std::is_sorted(split.test.begin(), split.test.end()));
    std::set<std::size_t> all(split.train.begin(), split.train.end());
    all.insert(split.test.begin(), split.test.end());
    CHECK(all.size() == 40);
    CHECK_THROWS_AS(stratified_holdout(y, 1.0, 0), std::invalid_argument);
  }
}
