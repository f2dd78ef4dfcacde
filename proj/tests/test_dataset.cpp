#include <doctest.h>

#include <cmath>
#include <fstream>
#include <functional>

#include "famex/dataset.hpp"
#include "helpers.hpp"

using namespace famex;

namespace {

DataErrorKind error_kind(const std::function<void()>& f) {
  try {
    f();
  } catch (const DataError& e) {
    return e.kind();
  }
  FAIL("expected a DataError");
  return DataErrorKind::parse_error;
}

}  // namespace

TEST_SUITE("dataset") {
  TEST_CASE("wisconsin loads with rows holding '?' dropped") {
    const auto ds = load_csv(testing::data_file("wisconsin.csv"));
    CHECK(ds.name == "wisconsin");
    CHECK(ds.rows() == 683);
    CHECK(ds.features() == 9);
    CHECK(ds.dropped_rows == 16);
    CHECK(ds.class_names == std::vector<std::string>{"2", "4"});
    CHECK(ds.feature_names.front() == "Clump Thickness");
    CHECK(ds.feature_names[5] == "Bare Nuclei");
  }

  TEST_CASE("bundled datasets have the expected shapes") {
    const auto pima = load_csv(testing::data_file("pima.csv"));
    CHECK(pima.rows() == 768);
    CHECK(pima.features() == 8);
    const auto wine = load_csv(testing::data_file("winequality-red.csv"));
    CHECK(wine.rows() == 1599);
    CHECK(wine.features() == 11);
    CHECK(wine.class_count() == 6);
  }

  TEST_CASE("small csv passes through unchanged") {
    const auto ds = parse_csv("a,b,class\n1,2,x\n3,4,y\n5,6,x\n", "t");
    CHECK(ds.rows() == 3);
    CHECK(ds.features() == 2);
    CHECK(ds.samples(2, 1) == 6.0);
    CHECK(ds.labels == std::vector<int>{0, 1, 0});
    CHECK(ds.dropped_rows == 0);
  }

  TEST_CASE("row with an empty cell is dropped") {
    const std::string text = "a,b,class\n1,2,x\n3,4,y\n5,,x\n7,8,y\n";
    const auto ds = parse_csv(text, "t");
    CHECK(ds.rows() == 3);
    CHECK(ds.dropped_rows == 1);
    CHECK(ds.samples(2, 0) == 7.0);

    LoadOptions strict;
    strict.drop_missing = false;
    try {
      parse_csv(text, "t", strict);
      FAIL("expected parse error");
    } catch (const DataError& e) {
      CHECK(e.kind() == DataErrorKind::parse_error);
      CHECK(std::string(e.what()).find("line 4") != std::string::npos);
      CHECK(std::string(e.what()).find("column 2") != std::string::npos);
    }
  }

  TEST_CASE("class column by name, by index and unknown") {
    const std::string text = "label,a,b\nx,1,2\ny,3,4\nx,5,7\n";
    LoadOptions by_name;
    by_name.class_column = ClassColumn::parse("label");
    const auto ds = parse_csv(text, "t", by_name);
    CHECK(ds.feature_names == std::vector<std::string>{"a", "b"});
    CHECK(ds.labels == std::vector<int>{0, 1, 0});

    LoadOptions by_index;
    by_index.class_column = ClassColumn::parse("0");
    CHECK(parse_csv(text, "t", by_index).feature_names == ds.feature_names);

    LoadOptions unknown;
    unknown.class_column = ClassColumn::parse("outcome");
    CHECK(error_kind([&] { parse_csv(text, "t", unknown); }) == DataErrorKind::class_column_not_found);
    unknown.class_column = ClassColumn::by_index(7);
    CHECK(error_kind([&] { parse_csv(text, "t", unknown); }) == DataErrorKind::class_column_not_found);
  }

  TEST_CASE("a header named like an index wins over the index") {
    LoadOptions o;
    o.class_column = ClassColumn::parse("2");
    const auto ds = parse_csv("2,a,b\nx,1,2\ny,3,4\n", "t", o);
    CHECK(ds.feature_names == std::vector<std::string>{"a", "b"});
  }

  TEST_CASE("malformed input is diagnosed") {
    CHECK(error_kind([] { parse_csv("", "t"); }) == DataErrorKind::parse_error);
    CHECK(error_kind([] { parse_csv("a,b,c\n1,2\n", "t"); }) == DataErrorKind::parse_error);
    CHECK(error_kind([] { parse_csv("a,a,c\n1,2,x\n3,4,y\n", "t"); }) == DataErrorKind::parse_error);
    CHECK(error_kind([] { parse_csv("a,b,c\nq,2,x\nr,4,y\n", "t"); }) == DataErrorKind::non_numeric_column);
    CHECK(error_kind([] { parse_csv("a,b,c\n1,2,x\n3,4,x\n", "t"); }) == DataErrorKind::too_few_classes);
    CHECK(error_kind([] { parse_csv("a,c\n1,x\n3,y\n", "t"); }) == DataErrorKind::too_few_features);
    CHECK(error_kind([] { parse_csv("a,b,c\n1,2,x\n", "t"); }) == DataErrorKind::too_few_rows);
    CHECK(error_kind([] { load_csv("/nonexistent/file.csv"); }) == DataErrorKind::file_not_found);
  }

  TEST_CASE("quotes, BOM and CRLF") {
    const auto ds = parse_csv("\xEF\xBB\xBF\"x, one\",\"b\"\"q\",class\r\n\"1.5\",2,\"p,q\"\r\n3,4,r\r\n", "t");
    CHECK(ds.feature_names == std::vector<std::string>{"x, one", "b\"q"});
    CHECK(ds.samples(0, 0) == 1.5);
    CHECK(ds.class_names == std::vector<std::string>{"p,q", "r"});
  }

  TEST_CASE("class codes follow sorted class strings") {
    const auto ds = parse_csv("a,b,c\n1,2,zeta\n3,4,alpha\n5,6,mid\n", "t");
    CHECK(ds.class_names == std::vector<std::string>{"alpha", "mid", "zeta"});
    CHECK(ds.labels == std::vector<int>{2, 0, 1});
  }

  TEST_CASE("select_features keeps the requested order") {
    const auto ds = parse_csv("a,b,c,class\n1,2,3,x\n4,5,6,y\n", "t");
    const std::vector<std::size_t> cols{2, 0};
    const auto sub = select_features(ds, cols);
    CHECK(sub.feature_names == std::vector<std::string>{"c", "a"});
    CHECK(sub.samples(1, 0) == 6.0);
    CHECK(sub.labels == ds.labels);
  }

  TEST_CASE("discretize examples") {
    const std::vector<double> a{0, 1, 2, 3};
    CHECK(discretize(a, 2).bins == std::vector<int>{0, 0, 1, 1});

    const std::vector<double> constant{5, 5, 5};
    const auto c = discretize(constant, 10);
    CHECK(c.bin_count == 1);
    CHECK(c.bins == std::vector<int>{0, 0, 0});

    std::vector<double> tenths;
    for (int i = 0; i < 10; ++i) tenths.push_back(i / 10.0);
    const auto t = discretize(tenths, 5);
    CHECK(t.bin_count == 5);
    // Edges at 0, 0.18, 0.36, 0.54, 0.72, 0.9: two values fall between each pair.
    std::vector<int> per_bin(5, 0);
    for (const int b : t.bins) ++per_bin[static_cast<std::size_t>(b)];
    CHECK(per_bin == std::vector<int>{2, 2, 2, 2, 2});
    CHECK(t.edges.size() == 6);
    CHECK(t.edges[1] == doctest::Approx(0.18));
  }

  TEST_CASE("discretize agrees with an edge-scanning oracle") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(-3.0, 11.0);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<double> x(40);
      for (auto& v : x) v = u(gen);
      const int B = 1 + trial % 12;
      const auto d = discretize(x, B);
      REQUIRE(d.bin_count == B);
      for (std::size_t i = 0; i < x.size(); ++i) {
        const auto b = static_cast<std::size_t>(d.bins[i]);
        CHECK(x[i] >= d.edges[b] - 1e-12);
        CHECK(x[i] <= d.edges[b + 1] + 1e-12);
      }
    }
    CHECK_THROWS_AS(discretize(std::vector<double>{}, 3), DataError);
    CHECK_THROWS_AS(discretize(std::vector<double>{1, 2}, 0), std::invalid_argument);
  }
}
