#include "famex/baselines.hpp"

#include <algorithm>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "famex/rng.hpp"
#include "famex/scoring.hpp"
#include "json.hpp"

namespace famex {
namespace {

std::string number_text(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

int majority_label(std::span<const int> y) {
  std::map<int, std::size_t> counts;
  for (const int v : y) ++counts[v];
  // Ties resolve to the smallest label.
  return std::max_element(counts.begin(), counts.end(),
                          [](const auto& a, const auto& b) { return a.second < b.second; })
      ->first;
}

}  // namespace

std::string_view to_string(ImportanceMethod method) {
  switch (method) {
    case ImportanceMethod::famex: return "famex";
    case ImportanceMethod::pfi: return "pfi";
    case ImportanceMethod::shapley_mc: return "shapley_mc";
  }
  return "famex";
}

ImportanceMethod parse_importance_method(std::string_view text) {
  if (text == "famex") return ImportanceMethod::famex;
  if (text == "pfi") return ImportanceMethod::pfi;
  if (text == "shapley_mc" || text == "shapley") return ImportanceMethod::shapley_mc;
  throw std::invalid_argument("unknown method '" + std::string(text) + "' (expected famex, pfi or shapley_mc)");
}

std::vector<ImportanceMethod> all_importance_methods() {
  return {ImportanceMethod::famex, ImportanceMethod::pfi, ImportanceMethod::shapley_mc};
}

std::string importance_to_json(const ImportanceVector& importance, std::span<const std::string> feature_names) {
  if (feature_names.size() != importance.values.size()) {
    throw std::invalid_argument("importance_to_json: name count does not match values");
  }
  const auto order = rank_order(importance.values);
  std::vector<std::size_t> rank(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r + 1;

  nlohmann::ordered_json scores = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < importance.values.size(); ++i) {
    scores.push_back({{"name", feature_names[i]}, {"importance_score", importance.values[i]}, {"rank", rank[i]}});
  }
  nlohmann::ordered_json metadata = nlohmann::ordered_json::object();
  for (const auto& [k, v] : importance.metadata) metadata[k] = v;
  const nlohmann::ordered_json doc = {{"method", to_string(importance.method)},
                                      {"seed", importance.seed},
                                      {"metadata", std::move(metadata)},
                                      {"scores", std::move(scores)}};
  return doc.dump(2) + "\n";
}

ImportanceVector permutation_importance(const ClassifierSpec& spec, const Matrix& X, std::span<const int> y,
                                        std::size_t repeats, std::uint64_t seed, double holdout_fraction) {
  if (repeats < 1) throw std::invalid_argument("permutation importance needs repeats >= 1");
  if (X.rows() != y.size()) throw std::invalid_argument("permutation importance: row count does not match labels");

  const auto split = stratified_holdout(y, holdout_fraction, derive_seed(seed, 0));
  const auto model = train(spec.with_seed(derive_seed(seed, 1)), X.select_rows(split.train),
                           gather(y, std::span<const std::size_t>(split.train)));
  const Matrix test = X.select_rows(split.test);
  const auto truth = gather(y, std::span<const std::size_t>(split.test));
  const double baseline = accuracy(truth, model->predict(test));

  ImportanceVector out;
  out.method = ImportanceMethod::pfi;
  out.seed = seed;
  out.values.assign(X.cols(), 0.0);
  std::vector<double> column(test.rows());
  for (std::size_t f = 0; f < X.cols(); ++f) {
    double total = 0.0;
    for (std::size_t r = 0; r < repeats; ++r) {
      Matrix shuffled = test;
      for (std::size_t i = 0; i < test.rows(); ++i) column[i] = test(i, f);
      Rng rng(derive_seed(seed, 2, f, r));
      rng.shuffle(std::span<double>(column));
      for (std::size_t i = 0; i < test.rows(); ++i) shuffled(i, f) = column[i];
      total += baseline - accuracy(truth, model->predict(shuffled));
    }
    out.values[f] = total / static_cast<double>(repeats);
  }
  out.metadata = {{"classifier", std::string(to_string(spec.kind()))},
                  {"repeats", std::to_string(repeats)},
                  {"holdout_fraction", number_text(holdout_fraction)},
                  {"baseline_accuracy", number_text(baseline)}};
  return out;
}

CharacteristicFunction retrain_accuracy_game(const ClassifierSpec& spec, const Matrix& X, std::span<const int> y,
                                             std::uint64_t seed, double holdout_fraction) {
  if (X.rows() != y.size()) throw std::invalid_argument("shapley: row count does not match labels");
  struct State {
    Matrix train_x;
    Matrix test_x;
    std::vector<int> train_y;
    std::vector<int> test_y;
    ClassifierSpec spec;
    std::map<std::vector<std::size_t>, double> cache;
  };
  const auto split = stratified_holdout(y, holdout_fraction, derive_seed(seed, 0));
  auto state = std::make_shared<State>(State{X.select_rows(split.train), X.select_rows(split.test),
                                             gather(y, std::span<const std::size_t>(split.train)),
                                             gather(y, std::span<const std::size_t>(split.test)),
                                             spec.with_seed(derive_seed(seed, 1)),
                                             {}});

  return [state](std::span<const std::size_t> members) -> double {
    std::vector<std::size_t> key(members.begin(), members.end());
    if (const auto it = state->cache.find(key); it != state->cache.end()) return it->second;
    double value = 0.0;
    if (key.empty()) {
      const int label = majority_label(state->train_y);
      const auto hits = std::count(state->test_y.begin(), state->test_y.end(), label);
      value = static_cast<double>(hits) / static_cast<double>(state->test_y.size());
    } else {
      const auto model = train(state->spec, state->train_x.select_columns(key), state->train_y);
      value = accuracy(state->test_y, model->predict(state->test_x.select_columns(key)));
    }
    state->cache.emplace(std::move(key), value);
    return value;
  };
}

std::vector<double> monte_carlo_shapley(const CharacteristicFunction& game, std::size_t players,
                                        std::size_t permutations, std::uint64_t seed) {
  if (permutations < 1) throw std::invalid_argument("shapley needs permutations >= 1");
  std::vector<double> phi(players, 0.0);
  std::vector<std::size_t> order(players);
  std::vector<std::size_t> coalition;
  for (std::size_t p = 0; p < permutations; ++p) {
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, p));
    rng.shuffle(std::span<std::size_t>(order));
    coalition.clear();
    double previous = game(coalition);
    for (const auto player : order) {
      coalition.insert(std::upper_bound(coalition.begin(), coalition.end(), player), player);
      const double current = game(coalition);
      phi[player] += current - previous;
      previous = current;
    }
  }
  for (auto& v : phi) v /= static_cast<double>(permutations);
  return phi;
}

ImportanceVector shapley_importance(const ClassifierSpec& spec, const Matrix& X, std::span<const int> y,
                                    std::size_t permutations, std::uint64_t seed, double holdout_fraction) {
  const auto game = retrain_accuracy_game(spec, X, y, seed, holdout_fraction);
  ImportanceVector out;
  out.method = ImportanceMethod::shapley_mc;
  out.seed = seed;
  out.values = monte_carlo_shapley(game, X.cols(), permutations, derive_seed(seed, 2));

  std::vector<std::size_t> all(X.cols());
  std::iota(all.begin(), all.end(), 0);
  out.metadata = {{"classifier", std::string(to_string(spec.kind()))},
                  {"permutations", std::to_string(permutations)},
                  {"holdout_fraction", number_text(holdout_fraction)},
                  {"v_empty", number_text(game({}))},
                  {"v_all", number_text(game(all))}};
  return out;
}

}  // namespace famex
