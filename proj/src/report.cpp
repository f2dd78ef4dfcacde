#include <algorithm>
#include <cstdio>
#include <sstream>

#include "famex/harness.hpp"
#include "json.hpp"

namespace famex {
namespace {

using nlohmann::ordered_json;

std::string percent(double mean, double std) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f ± %.2f", 100.0 * mean, 100.0 * std);
  return buf;
}

// Display width, counting UTF-8 code points rather than bytes.
std::size_t width(const std::string& s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) { return (c & 0xC0) != 0x80; }));
}

using Grid = std::vector<std::vector<std::string>>;

void render_grid(std::ostringstream& out, const Grid& grid, bool markdown) {
  std::vector<std::size_t> widths(grid.front().size(), 0);
  for (const auto& row : grid) {
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], width(row[c]));
  }
  const auto line = [&](const std::vector<std::string>& row) {
    if (markdown) out << "| ";
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << row[c];
      const bool last = c + 1 == row.size();
      if (!last || markdown) out << std::string(widths[c] - width(row[c]), ' ');
      if (markdown) out << (last ? " |" : " | ");
      else if (!last) out << "  ";
    }
    out << '\n';
  };
  line(grid.front());
  if (markdown) {
    out << '|';
    for (std::size_t c = 0; c < widths.size(); ++c) out << (c == 0 ? ":" : "") << std::string(widths[c] + 1, '-')
                                                        << (c == 0 ? "" : ":") << '|';
    out << '\n';
  } else {
    std::size_t total = 0;
    for (const auto w : widths) total += w + 2;
    out << std::string(total - 2, '-') << '\n';
  }
  for (std::size_t r = 1; r < grid.size(); ++r) line(grid[r]);
}

std::vector<std::string> header_row(const ExperimentSettings& s, const std::string& first) {
  std::vector<std::string> row{first};
  for (const auto m : s.methods) {
    for (const auto sub : s.subsets) row.push_back(std::string(to_string(m)) + " " + std::string(to_string(sub)));
  }
  return row;
}

ordered_json settings_to_json_object(const ExperimentSettings& s) {
  ordered_json methods = ordered_json::array();
  for (const auto m : s.methods) methods.push_back(to_string(m));
  ordered_json classifiers = ordered_json::array();
  for (const auto c : s.classifiers) classifiers.push_back(to_string(c));
  ordered_json subsets = ordered_json::array();
  for (const auto sub : s.subsets) subsets.push_back(to_string(sub));
  ordered_json hyper = ordered_json::object();
  for (const auto& [kind, values] : s.hyperparameters) {
    ordered_json kv = ordered_json::object();
    for (const auto& [k, v] : values) kv[k] = v;
    hyper[std::string(to_string(kind))] = std::move(kv);
  }
  return {{"methods", methods},
          {"classifiers", classifiers},
          {"subsets", subsets},
          {"top_fraction", s.top_fraction},
          {"bottom_fraction", s.bottom_fraction},
          {"folds", s.folds},
          {"iterations", s.iterations},
          {"seed", s.seed},
          {"bins", s.famex.bin_count},
          {"threshold_low", s.famex.fam.threshold_low},
          {"threshold_high", s.famex.fam.threshold_high},
          {"correlation_decimals", s.famex.fam.correlation_decimals},
          {"explainer", to_string(s.explainer)},
          {"pfi_repeats", s.pfi_repeats},
          {"shapley_permutations", s.shapley_permutations},
          {"hyperparameters", hyper}};
}

ExperimentSettings settings_from_object(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("settings must be a JSON object");
  ExperimentSettings s;
  for (const auto& [key, v] : j.items()) {
    if (key == "methods") {
      s.methods.clear();
      for (const auto& m : v) s.methods.push_back(parse_importance_method(m.get<std::string>()));
    } else if (key == "classifiers") {
      s.classifiers.clear();
      for (const auto& c : v) s.classifiers.push_back(parse_classifier_kind(c.get<std::string>()));
    } else if (key == "subsets") {
      s.subsets.clear();
      for (const auto& sub : v) s.subsets.push_back(parse_subset(sub.get<std::string>()));
    } else if (key == "top_fraction") {
      s.top_fraction = v.get<double>();
    } else if (key == "bottom_fraction") {
      s.bottom_fraction = v.get<double>();
    } else if (key == "folds") {
      s.folds = v.get<std::size_t>();
    } else if (key == "iterations") {
      s.iterations = v.get<std::size_t>();
    } else if (key == "seed") {
      s.seed = v.get<std::uint64_t>();
    } else if (key == "bins") {
      s.famex.bin_count = v.get<int>();
    } else if (key == "threshold_low") {
      s.famex.fam.threshold_low = v.get<double>();
    } else if (key == "threshold_high") {
      s.famex.fam.threshold_high = v.get<double>();
    } else if (key == "correlation_decimals") {
      s.famex.fam.correlation_decimals = v.get<int>();
    } else if (key == "explainer") {
      s.explainer = parse_classifier_kind(v.get<std::string>());
    } else if (key == "pfi_repeats") {
      s.pfi_repeats = v.get<std::size_t>();
    } else if (key == "shapley_permutations") {
      s.shapley_permutations = v.get<std::size_t>();
    } else if (key == "hyperparameters") {
      for (const auto& [kind, values] : v.items()) {
        auto& target = s.hyperparameters[parse_classifier_kind(kind)];
        for (const auto& [k, value] : values.items()) {
          target[k] = value.is_string() ? value.get<std::string>() : value.dump();
        }
      }
    } else {
      throw std::invalid_argument("unknown setting '" + key + "'");
    }
  }
  return s;
}

std::string render_json(const EvaluationReport& report) {
  ordered_json cells = ordered_json::array();
  for (const auto& c : report.cells) {
    cells.push_back({{"dataset", c.dataset},
                     {"method", to_string(c.method)},
                     {"classifier", to_string(c.classifier)},
                     {"subset", to_string(c.subset)},
                     {"mean", c.mean},
                     {"std", c.std},
                     {"features", c.features}});
  }
  ordered_json averages = ordered_json::array();
  for (const auto& a : report.averages) {
    averages.push_back({{"method", to_string(a.method)},
                        {"classifier", to_string(a.classifier)},
                        {"subset", to_string(a.subset)},
                        {"mean", a.mean},
                        {"std", a.std}});
  }
  const ordered_json doc = {{"datasets", report.datasets},
                            {"config", settings_to_json_object(report.settings)},
                            {"cells", std::move(cells)},
                            {"averages", std::move(averages)}};
  return doc.dump(2) + "\n";
}

std::string render_grids(const EvaluationReport& report, bool markdown) {
  const auto& s = report.settings;
  std::ostringstream out;
  bool first = true;
  for (const auto classifier : s.classifiers) {
    if (!first) out << '\n';
    first = false;
    out << (markdown ? "### " : "") << "Classifier: " << to_string(classifier) << "\n\n";
    Grid grid{header_row(s, "dataset")};
    for (const auto& ds : report.datasets) {
      std::vector<std::string> row{ds};
      for (const auto m : s.methods) {
        for (const auto sub : s.subsets) {
          const auto* cell = report.find(ds, m, classifier, sub);
          row.push_back(cell ? percent(cell->mean, cell->std) : "-");
        }
      }
      grid.push_back(std::move(row));
    }
    std::vector<std::string> avg{"Average"};
    for (const auto m : s.methods) {
      for (const auto sub : s.subsets) {
        const auto* a = report.find_average(m, classifier, sub);
        avg.push_back(a ? percent(a->mean, a->std) : "-");
      }
    }
    grid.push_back(std::move(avg));
    render_grid(out, grid, markdown);
  }

  if (s.classifiers.size() > 1) {
    out << '\n' << (markdown ? "### " : "") << "Average over datasets\n\n";
    Grid grid{header_row(s, "classifier")};
    for (const auto classifier : s.classifiers) {
      std::vector<std::string> row{std::string(to_string(classifier))};
      for (const auto m : s.methods) {
        for (const auto sub : s.subsets) {
          const auto* a = report.find_average(m, classifier, sub);
          row.push_back(a ? percent(a->mean, a->std) : "-");
        }
      }
      grid.push_back(std::move(row));
    }
    render_grid(out, grid, markdown);
  }
  return out.str();
}

}  // namespace

ReportFormat parse_report_format(std::string_view text) {
  if (text == "table") return ReportFormat::table;
  if (text == "json") return ReportFormat::json;
  if (text == "markdown" || text == "md") return ReportFormat::markdown;
  throw std::invalid_argument("unknown format '" + std::string(text) + "' (expected table, json or markdown)");
}

std::string settings_to_json(const ExperimentSettings& settings) {
  return settings_to_json_object(settings).dump(2) + "\n";
}

ExperimentSettings settings_from_json(std::string_view text) {
  try {
    return settings_from_object(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed settings JSON: ") + e.what());
  }
}

std::string render_report(const EvaluationReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::json: return render_json(report);
    case ReportFormat::markdown: return render_grids(report, true);
    case ReportFormat::table: return render_grids(report, false);
  }
  return render_grids(report, false);
}

EvaluationReport parse_report_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    EvaluationReport report;
    report.datasets = j.at("datasets").get<std::vector<std::string>>();
    report.settings = settings_from_object(j.at("config"));
    for (const auto& c : j.at("cells")) {
      report.cells.push_back({c.at("dataset").get<std::string>(),
                              parse_importance_method(c.at("method").get<std::string>()),
                              parse_classifier_kind(c.at("classifier").get<std::string>()),
                              parse_subset(c.at("subset").get<std::string>()), c.at("mean").get<double>(),
                              c.at("std").get<double>(), c.at("features").get<std::vector<std::string>>()});
    }
    for (const auto& a : j.at("averages")) {
      report.averages.push_back({parse_importance_method(a.at("method").get<std::string>()),
                                 parse_classifier_kind(a.at("classifier").get<std::string>()),
                                 parse_subset(a.at("subset").get<std::string>()), a.at("mean").get<double>(),
                                 a.at("std").get<double>()});
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed report JSON: ") + e.what());
  }
}

}  // namespace famex
