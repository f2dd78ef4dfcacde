#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "famex/models.hpp"

namespace famex {

enum class ImportanceMethod { famex, pfi, shapley_mc };

std::string_view to_string(ImportanceMethod method);
ImportanceMethod parse_importance_method(std::string_view text);
std::vector<ImportanceMethod> all_importance_methods();

struct ImportanceVector {
  ImportanceMethod method = ImportanceMethod::famex;
  std::vector<double> values;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> metadata;
};

// {"method","seed","metadata",
//  "scores":[{"name","importance_score","rank"}]} with ranks by rank_order.
std::string importance_to_json(const ImportanceVector& importance, std::span<const std::string> feature_names);

// Trains on a stratified split and scores on the held-out part:
// value_i = baseline accuracy - mean accuracy over `repeats` shuffles of column i.
ImportanceVector permutation_importance(const ClassifierSpec& spec, const Matrix& X, std::span<const int> y,
                                        std::size_t repeats, std::uint64_t seed, double holdout_fraction = 0.25);

// v(S) for a coalition given as ascending feature indices.
using CharacteristicFunction = std::function<double(std::span<const std::size_t>)>;

// v(S) = held-out accuracy of spec retrained on columns S; v({}) is the
// accuracy of predicting the training majority class. Values are memoized.
CharacteristicFunction retrain_accuracy_game(const ClassifierSpec& spec, const Matrix& X, std::span<const int> y,
                                             std::uint64_t seed, double holdout_fraction = 0.25);

// Mean marginal contribution over `permutations` random orderings.
// Ordering p is drawn from Rng(derive_seed(seed, p)).
std::vector<double> monte_carlo_shapley(const CharacteristicFunction& game, std::size_t players,
                                        std::size_t permutations, std::uint64_t seed);

ImportanceVector shapley_importance(const ClassifierSpec& spec, const Matrix& X, std::span<const int> y,
                                    std::size_t permutations, std::uint64_t seed, double holdout_fraction = 0.25);

}  // namespace famex
