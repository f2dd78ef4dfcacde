#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "famex/baselines.hpp"
#include "famex/dataset.hpp"
#include "famex/models.hpp"
#include "famex/scoring.hpp"

namespace famex {

enum class Subset { top, bottom };
std::string_view to_string(Subset subset);
Subset parse_subset(std::string_view text);

// Everything about an experiment except the data itself.
struct ExperimentSettings {
  std::vector<ImportanceMethod> methods = all_importance_methods();
  std::vector<ClassifierKind> classifiers = all_classifier_kinds();
  std::vector<Subset> subsets = {Subset::top, Subset::bottom};
  double top_fraction = 0.3;
  double bottom_fraction = 0.3;
  std::size_t folds = 10;
  std::size_t iterations = 10;
  std::uint64_t seed = 42;
  FamexParams famex;
  // Model that PFI and Shapley explain.
  ClassifierKind explainer = ClassifierKind::random_forest;
  std::size_t pfi_repeats = 10;
  std::size_t shapley_permutations = 128;
  std::map<ClassifierKind, std::map<std::string, std::string>> hyperparameters;

  ClassifierSpec spec(ClassifierKind kind, std::uint64_t seed) const;
  friend bool operator==(const ExperimentSettings&, const ExperimentSettings&) = default;
};

struct ExperimentConfig {
  std::vector<Dataset> datasets;
  ExperimentSettings settings;
};

// Throws std::invalid_argument describing the first problem found.
void validate(const ExperimentSettings& settings);
void validate(const ExperimentConfig& config);

class ExperimentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ReportCell {
  std::string dataset;
  ImportanceMethod method = ImportanceMethod::famex;
  ClassifierKind classifier = ClassifierKind::svm;
  Subset subset = Subset::top;
  double mean = 0.0;  // over iterations of the per-iteration CV mean accuracy
  double std = 0.0;   // population std across iterations
  std::vector<std::string> features;

  friend bool operator==(const ReportCell&, const ReportCell&) = default;
};

struct ReportAverage {
  ImportanceMethod method = ImportanceMethod::famex;
  ClassifierKind classifier = ClassifierKind::svm;
  Subset subset = Subset::top;
  double mean = 0.0;
  double std = 0.0;

  friend bool operator==(const ReportAverage&, const ReportAverage&) = default;
};

struct EvaluationReport {
  std::vector<std::string> datasets;
  ExperimentSettings settings;
  std::vector<ReportCell> cells;
  std::vector<ReportAverage> averages;

  const ReportCell* find(std::string_view dataset, ImportanceMethod method, ClassifierKind classifier,
                         Subset subset) const;
  const ReportAverage* find_average(ImportanceMethod method, ClassifierKind classifier, Subset subset) const;

  friend bool operator==(const EvaluationReport&, const EvaluationReport&) = default;
};

// k = ceil(fraction * n); top takes the first k names, bottom the last k.
std::vector<std::string> select_subset(std::span<const std::string> ranking, double fraction, Subset end);

// Importance of every feature under one method, with the seeds the harness uses.
ImportanceVector compute_importance(const Dataset& dataset, ImportanceMethod method,
                                    const ExperimentSettings& settings);

std::vector<std::string> ranking_of(const Dataset& dataset, const ImportanceVector& importance);

// Called after each finished cell with (done, total).
using ProgressCallback = std::function<void(std::size_t, std::size_t)>;

EvaluationReport run_experiment(const ExperimentConfig& config, const ProgressCallback& progress = {});

// Per-(method, classifier, subset) means over dataset cells, in settings order.
std::vector<ReportAverage> compute_averages(const EvaluationReport& report);

enum class ReportFormat { table, json, markdown };
ReportFormat parse_report_format(std::string_view text);

// Settings as the "config" object of the JSON report. Parsing starts from
// the defaults, so any key may be omitted; unknown keys are rejected with
// std::invalid_argument.
std::string settings_to_json(const ExperimentSettings& settings);
ExperimentSettings settings_from_json(std::string_view text);

std::string render_report(const EvaluationReport& report, ReportFormat format);
EvaluationReport parse_report_json(std::string_view text);

}  // namespace famex
