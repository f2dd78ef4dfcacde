#include "famex/scoring.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace famex {

std::vector<double> FeatureScores::importances() const {
  std::vector<double> out;
  out.reserve(features.size());
  for (const auto& f : features) out.push_back(f.importance_score);
  return out;
}

std::vector<double> similarity_scores(std::span<const int> grades) {
  if (grades.empty()) throw std::invalid_argument("similarity_scores: empty grade list");
  double sum = 0.0;
  for (const int g : grades) sum += grade_value(grade_from_int(g));
  const double mean = sum / static_cast<double>(grades.size());
  std::vector<double> out;
  out.reserve(grades.size());
  for (const int g : grades) out.push_back(static_cast<double>(g * g) / mean);
  return out;
}

std::vector<double> similarity_scores(std::span<const Grade> grades) {
  std::vector<int> values;
  values.reserve(grades.size());
  for (const Grade g : grades) values.push_back(grade_value(g));
  return similarity_scores(std::span<const int>(values));
}

std::vector<double> relevance_scores(std::span<const double> mi) {
  if (mi.empty()) throw std::invalid_argument("relevance_scores: empty MI vector");
  const double mean = std::accumulate(mi.begin(), mi.end(), 0.0) / static_cast<double>(mi.size());
  if (!(mean > 0.0)) {
    throw DegenerateInputError("no feature carries class information (mean mutual information is 0)");
  }
  std::vector<double> out;
  out.reserve(mi.size());
  for (const double v : mi) out.push_back(v / mean);
  return out;
}

std::vector<double> importance_scores(std::span<const double> relevance, std::span<const double> similarity) {
  if (relevance.size() != similarity.size()) throw std::invalid_argument("importance_scores: length mismatch");
  std::vector<double> out;
  out.reserve(relevance.size());
  for (std::size_t i = 0; i < relevance.size(); ++i) {
    if (!(similarity[i] > 0.0)) throw std::invalid_argument("importance_scores: similarity must be positive");
    out.push_back(relevance[i] / similarity[i]);
  }
  return out;
}

FeatureScores famex(const Dataset& dataset, const FamexParams& params) {
  const auto graph = build_fam_graph(dataset, params.fam);
  const auto grades = graph.grades();
  const auto similarity = similarity_scores(std::span<const Grade>(grades));
  const auto mi = mi_classif(dataset, params.bin_count);
  const auto relevance = relevance_scores(mi.values);
  const auto importance = importance_scores(relevance, similarity);

  FeatureScores scores;
  for (std::size_t i = 0; i < dataset.features(); ++i) {
    scores.features.push_back(
        {dataset.feature_names[i], grades[i], similarity[i], mi.values[i], relevance[i], importance[i]});
  }
  return scores;
}

std::vector<std::size_t> rank_order(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  return order;
}

std::vector<std::string> rank_features(const FeatureScores& scores) {
  const auto values = scores.importances();
  std::vector<std::string> names;
  for (const auto i : rank_order(values)) names.push_back(scores.features[i].name);
  return names;
}

std::string scores_to_json(const FeatureScores& scores) {
  const auto order = rank_order(scores.importances());
  std::vector<std::size_t> rank(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = r + 1;

  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < scores.features.size(); ++i) {
    const auto& f = scores.features[i];
    doc.push_back({{"name", f.name},
                   {"grade", grade_value(f.grade)},
                   {"similarity_score", f.similarity_score},
                   {"relevance", f.relevance},
                   {"relevance_score", f.relevance_score},
                   {"importance_score", f.importance_score},
                   {"rank", rank[i]}});
  }
  return doc.dump(2) + "\n";
}

std::string scores_to_table(const FeatureScores& scores, bool markdown) {
  int name_width = 7;
  for (const auto& f : scores.features) name_width = std::max(name_width, static_cast<int>(f.name.size()));

  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  if (markdown) {
    out << "| Rank | Feature | Grade | Similarity | Relevance (bits) | Relevance score | Importance |\n";
    out << "|---:|---|---:|---:|---:|---:|---:|\n";
  } else {
    out << std::left << std::setw(4) << "Rank" << "  " << std::setw(name_width) << "Feature" << std::right << "  "
        << std::setw(5) << "Grade" << "  " << std::setw(10) << "Similarity" << "  " << std::setw(9) << "Relevance"
        << "  " << std::setw(9) << "RelScore" << "  " << std::setw(10) << "Importance" << "\n";
  }
  std::size_t rank = 1;
  for (const auto i : rank_order(scores.importances())) {
    const auto& f = scores.features[i];
    if (markdown) {
      out << "| " << rank << " | " << f.name << " | " << grade_value(f.grade) << " | " << f.similarity_score << " | "
          << f.relevance << " | " << f.relevance_score << " | " << f.importance_score << " |\n";
    } else {
      out << std::left << std::setw(4) << rank << "  " << std::setw(name_width) << f.name << std::right << "  "
          << std::setw(5) << grade_value(f.grade) << "  " << std::setw(10) << f.similarity_score << "  "
          << std::setw(9) << f.relevance << "  " << std::setw(9) << f.relevance_score << "  " << std::setw(10)
          << f.importance_score << "\n";
    }
    ++rank;
  }
  return out.str();
}

}  // namespace famex
