#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "famex/dataset.hpp"
#include "famex/stats.hpp"

namespace famex {

// Redundancy level of a feature in the association map.
enum class Grade : int { low = 1, moderate = 2, high = 3 };

inline int grade_value(Grade g) { return static_cast<int>(g); }
Grade grade_from_int(int value);

// green / yellow / red
std::string_view grade_color(Grade g);

struct FamParams {
  double threshold_low = 0.67;
  double threshold_high = 0.9;
  // |r| is compared at this many decimals, the precision the thresholds are
  // stated in. Negative compares raw values.
  int correlation_decimals = 2;

  friend bool operator==(const FamParams&, const FamParams&) = default;
};

// Throws std::invalid_argument unless 0 <= low <= high <= 1.
void validate(const FamParams& params);

// Per feature i with c_hi = #{j != i : |r_ij| >= high} and
// c_lo = #{j != i : |r_ij| >= low}: high if c_hi >= 1 or c_lo >= 3,
// low if c_lo == 0, moderate otherwise. The diagonal is ignored.
std::vector<Grade> grade_features(const CorrelationMatrix& corr, double threshold_low,
                                  double threshold_high);

struct FamVertex {
  std::size_t index = 0;
  std::string name;
  Grade grade = Grade::low;

  friend bool operator==(const FamVertex&, const FamVertex&) = default;
};

struct FamEdge {
  std::size_t source = 0;  // source < target
  std::size_t target = 0;
  double weight = 0.0;

  friend bool operator==(const FamEdge&, const FamEdge&) = default;
};

struct FamGraph {
  std::vector<FamVertex> vertices;
  std::vector<FamEdge> edges;
  double threshold_low = 0.67;
  double threshold_high = 0.9;

  std::vector<Grade> grades() const;
  std::size_t degree(std::size_t vertex) const;

  friend bool operator==(const FamGraph&, const FamGraph&) = default;
};

// |correlation| with a zeroed diagonal, rounded per params.correlation_decimals.
CorrelationMatrix association_matrix(const Dataset& dataset, const FamParams& params = {});

FamGraph build_fam_graph(const Dataset& dataset, const FamParams& params = {});

enum class GraphFormat { dot, json };
GraphFormat parse_graph_format(std::string_view text);

std::string export_graph(const FamGraph& graph, GraphFormat format);
FamGraph parse_graph_json(std::string_view text);

}  // namespace famex
