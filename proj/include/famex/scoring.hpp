#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "famex/dataset.hpp"
#include "famex/fam.hpp"
#include "famex/stats.hpp"

namespace famex {

// Raised when no feature carries any class information (mean MI is zero).
class DegenerateInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FeatureScore {
  std::string name;
  Grade grade = Grade::low;
  double similarity_score = 0.0;
  double relevance = 0.0;  // MI in bits
  double relevance_score = 0.0;
  double importance_score = 0.0;
};

struct FeatureScores {
  std::vector<FeatureScore> features;

  std::vector<double> importances() const;
};

struct FamexParams {
  int bin_count = 10;
  FamParams fam;

  friend bool operator==(const FamexParams&, const FamexParams&) = default;
};

// grade^2 / mean(grade). Grades outside {1,2,3} are rejected.
std::vector<double> similarity_scores(std::span<const int> grades);
std::vector<double> similarity_scores(std::span<const Grade> grades);

// mi / mean(mi); throws DegenerateInputError if every mi is zero.
std::vector<double> relevance_scores(std::span<const double> mi);

std::vector<double> importance_scores(std::span<const double> relevance, std::span<const double> similarity);

// The full pipeline: association map grades, MI relevance, importance.
FeatureScores famex(const Dataset& dataset, const FamexParams& params = {});

// Indices by descending value; ties keep ascending index.
std::vector<std::size_t> rank_order(std::span<const double> values);

std::vector<std::string> rank_features(const FeatureScores& scores);

// [{"name","grade","similarity_score","relevance","relevance_score","importance_score","rank"}]
std::string scores_to_json(const FeatureScores& scores);
std::string scores_to_table(const FeatureScores& scores, bool markdown = false);

}  // namespace famex
