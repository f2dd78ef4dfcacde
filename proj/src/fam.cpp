#include "famex/fam.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace famex {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string dot_escape(std::string_view s) {
  std::string out;
  for (const char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

// Rounded to 3 decimals, printed without trailing zeros.
std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", std::round(v * 1000.0) / 1000.0);
  return buf;
}

}  // namespace

Grade grade_from_int(int value) {
  if (value < 1 || value > 3) {
    throw std::invalid_argument("similarity grade must be 1, 2 or 3, got " + std::to_string(value));
  }
  return static_cast<Grade>(value);
}

std::string_view grade_color(Grade g) {
  switch (g) {
    case Grade::low: return "green";
    case Grade::moderate: return "yellow";
    case Grade::high: return "red";
  }
  return "green";
}

void validate(const FamParams& params) {
  if (!(params.threshold_low >= 0.0 && params.threshold_low <= params.threshold_high &&
        params.threshold_high <= 1.0)) {
    throw std::invalid_argument("thresholds must satisfy 0 <= low <= high <= 1");
  }
}

std::vector<Grade> grade_features(const CorrelationMatrix& corr, double threshold_low,
                                  double threshold_high) {
  const std::size_t n = corr.n;
  if (corr.values.size() != n * n) throw std::invalid_argument("correlation matrix is not square");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (corr.at(i, j) != corr.at(j, i)) {
        throw std::invalid_argument("correlation matrix is not symmetric at (" + std::to_string(i) +
                                    ", " + std::to_string(j) + ")");
      }
    }
  }

  std::vector<Grade> grades(n, Grade::low);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t c_lo = 0;
    std::size_t c_hi = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double r = std::abs(corr.at(i, j));
      if (r >= threshold_low) ++c_lo;
      if (r >= threshold_high) ++c_hi;
    }
    if (c_hi >= 1 || c_lo >= 3) {
      grades[i] = Grade::high;
    } else if (c_lo == 0) {
      grades[i] = Grade::low;
    } else {
      grades[i] = Grade::moderate;
    }
  }
  return grades;
}

std::vector<Grade> FamGraph::grades() const {
  std::vector<Grade> out;
  out.reserve(vertices.size());
  for (const auto& v : vertices) out.push_back(v.grade);
  return out;
}

std::size_t FamGraph::degree(std::size_t vertex) const {
  std::size_t d = 0;
  for (const auto& e : edges) d += (e.source == vertex) + (e.target == vertex);
  return d;
}

CorrelationMatrix association_matrix(const Dataset& dataset, const FamParams& params) {
  auto corr = correlation_matrix(dataset, true);
  const double scale = params.correlation_decimals >= 0 ? std::pow(10.0, params.correlation_decimals) : 0.0;
  for (std::size_t i = 0; i < corr.n; ++i) {
    for (std::size_t j = 0; j < corr.n; ++j) {
      double& r = corr.at(i, j);
      if (i == j) {
        r = 0.0;
      } else if (scale > 0.0) {
        r = std::round(r * scale) / scale;
      }
    }
  }
  return corr;
}

FamGraph build_fam_graph(const Dataset& dataset, const FamParams& params) {
  validate(params);
  const auto corr = association_matrix(dataset, params);
  const auto grades = grade_features(corr, params.threshold_low, params.threshold_high);

  FamGraph graph;
  graph.threshold_low = params.threshold_low;
  graph.threshold_high = params.threshold_high;
  for (std::size_t i = 0; i < corr.n; ++i) {
    graph.vertices.push_back({i, dataset.feature_names[i], grades[i]});
  }
  for (std::size_t i = 0; i < corr.n; ++i) {
    for (std::size_t j = i + 1; j < corr.n; ++j) {
      if (corr.at(i, j) >= params.threshold_low) graph.edges.push_back({i, j, corr.at(i, j)});
    }
  }
  return graph;
}

GraphFormat parse_graph_format(std::string_view text) {
  if (text == "dot") return GraphFormat::dot;
  if (text == "json") return GraphFormat::json;
  throw std::invalid_argument("unknown graph format '" + std::string(text) + "' (expected dot or json)");
}

std::string export_graph(const FamGraph& graph, GraphFormat format) {
  if (format == GraphFormat::json) {
    ordered_json features = ordered_json::array();
    for (const auto& v : graph.vertices) {
      features.push_back({{"index", v.index},
                          {"name", v.name},
                          {"grade", grade_value(v.grade)},
                          {"color", grade_color(v.grade)}});
    }
    ordered_json edges = ordered_json::array();
    for (const auto& e : graph.edges) {
      edges.push_back({{"source", e.source}, {"target", e.target}, {"weight", e.weight}});
    }
    ordered_json doc = {{"features", std::move(features)},
                        {"edges", std::move(edges)},
                        {"thresholds", {{"low", graph.threshold_low}, {"high", graph.threshold_high}}}};
    return doc.dump(2) + "\n";
  }

  std::ostringstream out;
  out << "graph FAM {\n";
  out << "  node [shape=ellipse, style=filled];\n";
  for (const auto& v : graph.vertices) {
    out << "  f" << v.index << " [label=\"" << dot_escape(v.name) << "\", fillcolor=" << grade_color(v.grade)
        << ", tooltip=\"grade " << grade_value(v.grade) << "\"];\n";
  }
  for (const auto& e : graph.edges) {
    out << "  f" << e.source << " -- f" << e.target << " [label=\"" << short_number(e.weight)
        << "\", weight=" << short_number(e.weight) << "];\n";
  }
  out << "}\n";
  return out.str();
}

FamGraph parse_graph_json(std::string_view text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    FamGraph graph;
    graph.threshold_low = doc.at("thresholds").at("low").get<double>();
    graph.threshold_high = doc.at("thresholds").at("high").get<double>();
    for (const auto& f : doc.at("features")) {
      const Grade g = grade_from_int(f.at("grade").get<int>());
      if (f.at("color").get<std::string>() != grade_color(g)) {
        throw std::invalid_argument("graph json: color does not match grade");
      }
      graph.vertices.push_back({f.at("index").get<std::size_t>(), f.at("name").get<std::string>(), g});
    }
    for (const auto& e : doc.at("edges")) {
      FamEdge edge{e.at("source").get<std::size_t>(), e.at("target").get<std::size_t>(),
                   e.at("weight").get<double>()};
      if (edge.source >= edge.target || edge.target >= graph.vertices.size()) {
        throw std::invalid_argument("graph json: edge endpoints must satisfy source < target < vertex count");
      }
      graph.edges.push_back(edge);
    }
    return graph;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("graph json: ") + e.what());
  }
}

}  // namespace famex
