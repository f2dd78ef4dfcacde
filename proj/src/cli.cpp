#include "famex/cli.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "famex/dataset.hpp"
#include "famex/fam.hpp"
#include "famex/harness.hpp"
#include "famex/scoring.hpp"
#include "famex/server.hpp"

namespace famex {
namespace {

// Bad flag values found after CLI11 parsing; reported like parse errors.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct Flags {
  std::vector<std::string> paths;
  std::string class_col;
  int bins = 10;
  std::string thresholds = "0.67,0.9";
  int corr_decimals = 2;
  double top = 0.3;
  double bottom = 0.3;
  std::string classifiers = "svm,decision_tree,random_forest,naive_bayes";
  std::size_t folds = 10;
  std::size_t iters = 10;
  std::uint64_t seed = 42;
  std::string method = "famex";
  std::string explainer = "random_forest";
  std::size_t repeats = 10;
  std::size_t permutations = 128;
  std::vector<std::string> hyper;
  std::string format;
  std::string out;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string static_dir;
  std::size_t workers = 2;
};

FamexParams famex_params(const Flags& f) {
  FamexParams p;
  p.bin_count = f.bins;
  if (p.bin_count < 1) throw UsageError("--bins must be >= 1");
  const auto parts = split_list(f.thresholds);
  if (parts.size() != 2) throw UsageError("--thresholds expects 'low,high'");
  try {
    p.fam.threshold_low = std::stod(parts[0]);
    p.fam.threshold_high = std::stod(parts[1]);
  } catch (const std::exception&) {
    throw UsageError("--thresholds expects two numbers, got '" + f.thresholds + "'");
  }
  p.fam.correlation_decimals = f.corr_decimals;
  try {
    validate(p.fam);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--thresholds: ") + e.what());
  }
  return p;
}

ExperimentSettings experiment_settings(const Flags& f, bool all_methods) {
  ExperimentSettings s;
  try {
    s.methods = all_methods ? all_importance_methods()
                            : std::vector<ImportanceMethod>{parse_importance_method(f.method)};
    s.classifiers.clear();
    for (const auto& name : split_list(f.classifiers)) s.classifiers.push_back(parse_classifier_kind(name));
    s.top_fraction = f.top;
    s.bottom_fraction = f.bottom;
    s.folds = f.folds;
    s.iterations = f.iters;
    s.seed = f.seed;
    s.famex = famex_params(f);
    s.explainer = parse_classifier_kind(f.explainer);
    s.pfi_repeats = f.repeats;
    s.shapley_permutations = f.permutations;
    for (const auto& h : f.hyper) {
      // kind:key=value
      const auto colon = h.find(':');
      if (colon == std::string::npos) throw UsageError("--param expects classifier:key=value, got '" + h + "'");
      auto [key, value] = ClassifierSpec::parse_assignment(std::string_view(h).substr(colon + 1));
      s.hyperparameters[parse_classifier_kind(std::string_view(h).substr(0, colon))][key] = value;
    }
    validate(s);
  } catch (const UsageError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return s;
}

LoadOptions load_options(const Flags& f) {
  LoadOptions o;
  if (!f.class_col.empty()) o.class_column = ClassColumn::parse(f.class_col);
  return o;
}

Dataset load(const std::string& path, const Flags& f) {
  auto ds = load_csv(path, load_options(f));
  validate(ds);
  return ds;
}

void emit(const std::string& text, const Flags& f, std::ostream& out) {
  if (f.out.empty()) {
    out << text << std::flush;
    return;
  }
  std::ofstream file(f.out, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + f.out);
  file << text;
  if (!file.flush()) throw std::runtime_error("cannot write " + f.out);
}

ReportFormat report_format(const Flags& f) {
  if (f.format.empty()) return ReportFormat::table;
  try {
    return parse_report_format(f.format);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

int cmd_score(const Flags& f, std::ostream& out) {
  const auto params = famex_params(f);
  const auto format = report_format(f);
  const auto scores = famex(load(f.paths.front(), f), params);
  emit(format == ReportFormat::json ? scores_to_json(scores)
                                    : scores_to_table(scores, format == ReportFormat::markdown),
       f, out);
  return 0;
}

int cmd_graph(const Flags& f, std::ostream& out) {
  const auto params = famex_params(f);
  GraphFormat format = GraphFormat::dot;
  if (!f.format.empty()) {
    try {
      format = parse_graph_format(f.format);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  } else if (std::filesystem::path(f.out).extension() == ".json") {
    format = GraphFormat::json;
  }
  emit(export_graph(build_fam_graph(load(f.paths.front(), f), params.fam), format), f, out);
  return 0;
}

int cmd_evaluate(const Flags& f, bool all_methods, std::ostream& out) {
  ExperimentConfig config;
  config.settings = experiment_settings(f, all_methods);
  const auto format = report_format(f);
  for (const auto& p : f.paths) config.datasets.push_back(load(p, f));
  try {
    validate(config);
  } catch (const std::invalid_argument& e) {
    throw ExperimentError(e.what());
  }
  emit(render_report(run_experiment(config), format), f, out);
  return 0;
}

int cmd_serve(const Flags& f, std::ostream& err) {
  if (f.port < 0 || f.port > 65535) throw UsageError("--port must be in [0, 65535]");
  ServerOptions options;
  options.static_dir = f.static_dir;
  options.workers = f.workers;
  Api api(options);
  HttpServer server(api, options);
  const int port = server.bind(f.host, f.port);
  err << "listening on http://" << f.host << ":" << port << std::endl;
  server.listen();
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"FAMeX feature importance toolkit", "famex"};
  app.require_subcommand(1);
  Flags f;

  const auto add_data = [&](CLI::App* cmd, bool many) {
    if (many) cmd->add_option("datasets", f.paths, "CSV files")->required();
    else cmd->add_option("dataset", f.paths, "CSV file")->required()->expected(1);
    cmd->add_option("--class-col", f.class_col, "Class column name or index (default: last)");
  };
  const auto add_famex = [&](CLI::App* cmd, bool bins) {
    if (bins) cmd->add_option("--bins", f.bins, "Equal-width bins for mutual information")->capture_default_str();
    cmd->add_option("--thresholds", f.thresholds, "Association thresholds low,high")->capture_default_str();
    cmd->add_option("--corr-decimals", f.corr_decimals, "Decimals |r| is rounded to before grading (<0: none)")
        ->capture_default_str();
  };
  const auto add_harness = [&](CLI::App* cmd) {
    cmd->add_option("--top", f.top, "Top fraction of ranked features")->capture_default_str();
    cmd->add_option("--bottom", f.bottom, "Bottom fraction of ranked features")->capture_default_str();
    cmd->add_option("--classifiers", f.classifiers, "Comma-separated classifiers")->capture_default_str();
    cmd->add_option("--folds", f.folds, "Cross-validation folds")->capture_default_str();
    cmd->add_option("--iters", f.iters, "Cross-validation repetitions")->capture_default_str();
    cmd->add_option("--seed", f.seed, "Master seed")->capture_default_str();
    cmd->add_option("--explainer", f.explainer, "Model explained by pfi and shapley_mc")->capture_default_str();
    cmd->add_option("--repeats", f.repeats, "Permutation importance repeats")->capture_default_str();
    cmd->add_option("--permutations", f.permutations, "Shapley permutations")->capture_default_str();
    cmd->add_option("--param", f.hyper, "Classifier hyperparameter, classifier:key=value (repeatable)");
  };
  const auto add_output = [&](CLI::App* cmd, const std::string& formats) {
    cmd->add_option("--format", f.format, formats);
    cmd->add_option("--out", f.out, "Write output to this file");
  };

  auto* score = app.add_subcommand("score", "FAMeX scores for every feature");
  add_data(score, false);
  add_famex(score, true);
  add_output(score, "table, json or markdown (default table)");

  auto* graph = app.add_subcommand("graph", "Export the feature association map");
  add_data(graph, false);
  add_famex(graph, false);
  add_output(graph, "dot or json (default dot, json when --out ends in .json)");

  auto* evaluate = app.add_subcommand("evaluate", "Top/bottom subset accuracy for one importance method");
  add_data(evaluate, true);
  add_famex(evaluate, true);
  add_harness(evaluate);
  evaluate->add_option("--method", f.method, "famex, pfi or shapley_mc")->capture_default_str();
  add_output(evaluate, "table, json or markdown (default table)");

  auto* compare = app.add_subcommand("compare", "Top/bottom subset accuracy for every importance method");
  add_data(compare, true);
  add_famex(compare, true);
  add_harness(compare);
  add_output(compare, "table, json or markdown (default table)");

  auto* serve = app.add_subcommand("serve", "HTTP API for the web UI");
  serve->add_option("--port", f.port, "Port (0 picks a free one)")->capture_default_str();
  serve->add_option("--host", f.host, "Bind address")->capture_default_str();
  serve->add_option("--static", f.static_dir, "Directory of UI assets served under /");
  serve->add_option("--workers", f.workers, "Evaluation worker threads")->capture_default_str();

  std::vector<const char*> argv{"famex"};
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (score->parsed()) return cmd_score(f, out);
    if (graph->parsed()) return cmd_graph(f, out);
    if (evaluate->parsed()) return cmd_evaluate(f, false, out);
    if (compare->parsed()) return cmd_evaluate(f, true, out);
    if (serve->parsed()) return cmd_serve(f, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\nRun with --help for usage.\n";
    return 2;
  } catch (const DataError& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace famex
