#include "famex/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "famex/rng.hpp"

namespace famex {
namespace {

// Seed streams. Importance seeds depend on (master seed, method) and CV
// shuffles on (master seed, iteration), so every method, subset and
// classifier is evaluated on the same folds.
constexpr std::uint64_t kImportanceStream = 101;
constexpr std::uint64_t kIterationStream = 202;

std::string describe(const std::string& dataset, ImportanceMethod method, ClassifierKind classifier, Subset subset) {
  std::ostringstream out;
  out << "dataset=" << dataset << " method=" << to_string(method) << " classifier=" << to_string(classifier)
      << " subset=" << to_string(subset);
  return out.str();
}

}  // namespace

std::string_view to_string(Subset subset) { return subset == Subset::top ? "top" : "bottom"; }

Subset parse_subset(std::string_view text) {
  if (text == "top") return Subset::top;
  if (text == "bottom") return Subset::bottom;
  throw std::invalid_argument("unknown subset '" + std::string(text) + "' (expected top or bottom)");
}

ClassifierSpec ExperimentSettings::spec(ClassifierKind kind, std::uint64_t spec_seed) const {
  const auto it = hyperparameters.find(kind);
  return ClassifierSpec(kind, it == hyperparameters.end() ? std::map<std::string, std::string>{} : it->second,
                        spec_seed);
}

void validate(const ExperimentSettings& s) {
  const auto in_unit = [](double f) { return f > 0.0 && f <= 1.0; };
  if (s.methods.empty()) throw std::invalid_argument("no importance methods selected");
  if (s.classifiers.empty()) throw std::invalid_argument("no classifiers selected");
  if (s.subsets.empty()) throw std::invalid_argument("no subsets selected");
  if (!in_unit(s.top_fraction)) throw std::invalid_argument("top fraction must be in (0, 1]");
  if (!in_unit(s.bottom_fraction)) throw std::invalid_argument("bottom fraction must be in (0, 1]");
  if (s.folds < 2) throw std::invalid_argument("folds must be >= 2");
  if (s.iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (s.famex.bin_count < 1) throw std::invalid_argument("bin count must be >= 1");
  if (s.pfi_repeats < 1) throw std::invalid_argument("PFI repeats must be >= 1");
  if (s.shapley_permutations < 1) throw std::invalid_argument("Shapley permutations must be >= 1");
  validate(s.famex.fam);
  for (const auto kind : all_classifier_kinds()) (void)s.spec(kind, 0);
}

void validate(const ExperimentConfig& config) {
  if (config.datasets.empty()) throw std::invalid_argument("no datasets given");
  validate(config.settings);
  for (const auto& ds : config.datasets) {
    validate(ds);
    std::map<int, std::size_t> counts;
    for (const int v : ds.labels) ++counts[v];
    for (const auto& [label, count] : counts) {
      if (count < config.settings.folds) {
        throw std::invalid_argument("dataset " + ds.name + ": class '" +
                                    ds.class_names[static_cast<std::size_t>(label)] + "' has " +
                                    std::to_string(count) + " rows, fewer than " +
                                    std::to_string(config.settings.folds) + " folds");
      }
    }
  }
}

const ReportCell* EvaluationReport::find(std::string_view dataset, ImportanceMethod method,
                                         ClassifierKind classifier, Subset subset) const {
  for (const auto& c : cells) {
    if (c.dataset == dataset && c.method == method && c.classifier == classifier && c.subset == subset) return &c;
  }
  return nullptr;
}

const ReportAverage* EvaluationReport::find_average(ImportanceMethod method, ClassifierKind classifier,
                                                    Subset subset) const {
  for (const auto& a : averages) {
    if (a.method == method && a.classifier == classifier && a.subset == subset) return &a;
  }
  return nullptr;
}

std::vector<std::string> select_subset(std::span<const std::string> ranking, double fraction, Subset end) {
  if (ranking.empty()) throw std::invalid_argument("select_subset: empty ranking");
  if (!(fraction > 0.0 && fraction <= 1.0)) throw std::invalid_argument("select_subset: fraction must be in (0, 1]");
  const double n = static_cast<double>(ranking.size());
  // The epsilon keeps 0.7 * 10 from becoming 8 through representation error.
  auto k = static_cast<std::size_t>(std::ceil(fraction * n - 1e-9));
  k = std::clamp<std::size_t>(k, 1, ranking.size());
  if (end == Subset::top) return {ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(k)};
  return {ranking.end() - static_cast<std::ptrdiff_t>(k), ranking.end()};
}

ImportanceVector compute_importance(const Dataset& dataset, ImportanceMethod method,
                                    const ExperimentSettings& settings) {
  const std::uint64_t seed = derive_seed(settings.seed, kImportanceStream, static_cast<std::uint64_t>(method));
  switch (method) {
    case ImportanceMethod::famex: {
      ImportanceVector out;
      out.method = method;
      out.seed = settings.seed;
      out.values = famex(dataset, settings.famex).importances();
      out.metadata = {{"bins", std::to_string(settings.famex.bin_count)}};
      return out;
    }
    case ImportanceMethod::pfi:
      return permutation_importance(settings.spec(settings.explainer, seed), dataset.samples, dataset.labels,
                                    settings.pfi_repeats, seed);
    case ImportanceMethod::shapley_mc:
      return shapley_importance(settings.spec(settings.explainer, seed), dataset.samples, dataset.labels,
                                settings.shapley_permutations, seed);
  }
  throw std::invalid_argument("unknown importance method");
}

std::vector<std::string> ranking_of(const Dataset& dataset, const ImportanceVector& importance) {
  std::vector<std::string> names;
  for (const auto i : rank_order(importance.values)) names.push_back(dataset.feature_names[i]);
  return names;
}

EvaluationReport run_experiment(const ExperimentConfig& config, const ProgressCallback& progress) {
  validate(config);
  const auto& s = config.settings;

  EvaluationReport report;
  report.settings = s;
  for (const auto& ds : config.datasets) report.datasets.push_back(ds.name);

  const std::size_t total = config.datasets.size() * s.methods.size() * s.classifiers.size() * s.subsets.size();
  std::size_t done = 0;

  for (const auto& ds : config.datasets) {
    // (classifier, sorted columns) -> (mean, std); methods often agree on a subset.
    std::map<std::pair<ClassifierKind, std::vector<std::size_t>>, std::pair<double, double>> evaluated;

    for (const auto method : s.methods) {
      std::vector<std::string> ranking;
      try {
        ranking = ranking_of(ds, compute_importance(ds, method, s));
      } catch (const std::exception& e) {
        throw ExperimentError("dataset=" + ds.name + " method=" + std::string(to_string(method)) + ": " + e.what());
      }

      for (const auto classifier : s.classifiers) {
        for (const auto subset : s.subsets) {
          ReportCell cell;
          cell.dataset = ds.name;
          cell.method = method;
          cell.classifier = classifier;
          cell.subset = subset;
          try {
            cell.features =
                select_subset(ranking, subset == Subset::top ? s.top_fraction : s.bottom_fraction, subset);
            std::vector<std::size_t> columns;
            for (const auto& name : cell.features) {
              columns.push_back(static_cast<std::size_t>(
                  std::find(ds.feature_names.begin(), ds.feature_names.end(), name) - ds.feature_names.begin()));
            }
            std::sort(columns.begin(), columns.end());

            auto key = std::make_pair(classifier, columns);
            auto it = evaluated.find(key);
            if (it == evaluated.end()) {
              const Matrix X = ds.samples.select_columns(columns);
              std::vector<double> per_iteration;
              for (std::size_t iter = 0; iter < s.iterations; ++iter) {
                const auto cv = stratified_kfold(X, ds.labels, s.folds, s.spec(classifier, 0),
                                                 derive_seed(s.seed, kIterationStream, iter));
                per_iteration.push_back(cv.mean);
              }
              const double n = static_cast<double>(per_iteration.size());
              const double mean = std::accumulate(per_iteration.begin(), per_iteration.end(), 0.0) / n;
              double ss = 0.0;
              for (const double a : per_iteration) ss += (a - mean) * (a - mean);
              it = evaluated.emplace(std::move(key), std::make_pair(mean, std::sqrt(ss / n))).first;
            }
            cell.mean = it->second.first;
            cell.std = it->second.second;
          } catch (const std::exception& e) {
            throw ExperimentError(describe(ds.name, method, classifier, subset) + ": " + e.what());
          }
          report.cells.push_back(std::move(cell));
          ++done;
          if (progress) progress(done, total);
        }
      }
    }
  }
  report.averages = compute_averages(report);
  return report;
}

std::vector<ReportAverage> compute_averages(const EvaluationReport& report) {
  std::vector<ReportAverage> out;
  const auto& s = report.settings;
  for (const auto method : s.methods) {
    for (const auto classifier : s.classifiers) {
      for (const auto subset : s.subsets) {
        ReportAverage avg{method, classifier, subset, 0.0, 0.0};
        std::size_t n = 0;
        for (const auto& c : report.cells) {
          if (c.method == method && c.classifier == classifier && c.subset == subset) {
            avg.mean += c.mean;
            avg.std += c.std;
            ++n;
          }
        }
        if (n == 0) continue;
        avg.mean /= static_cast<double>(n);
        avg.std /= static_cast<double>(n);
        out.push_back(avg);
      }
    }
  }
  return out;
}

}  // namespace famex
