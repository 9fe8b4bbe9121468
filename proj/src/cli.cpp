#include "riskcut/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "riskcut/experiments.hpp"
#include "riskcut/io.hpp"
#include "riskcut/metrics.hpp"
#include "riskcut/solver.hpp"

namespace riskcut::cli {
namespace {

using nlohmann::json;

// Rounds to 12 significant digits so the shortest-form JSON output matches.
json num(double value) {
  if (!std::isfinite(value)) return nullptr;
  return std::strtod(format_number(value).c_str(), nullptr) + 0.0;
}

json num(const std::optional<double>& value) { return value ? num(*value) : json(nullptr); }

std::string cell(const std::optional<double>& value) {
  return value ? format_number(*value) : std::string();
}

json fit_json(const FitReport& fit) {
  json j;
  j["gamma"] = num(fit.gamma);
  j["status"] = to_string(fit.status);
  if (fit.interval) {
    j["c"] = num(fit.interval->center());
    j["d"] = num(fit.interval->half_width());
    j["l"] = num(fit.interval->lower());
    j["u"] = num(fit.interval->upper());
  } else {
    j["c"] = j["d"] = j["l"] = j["u"] = nullptr;
  }
  j["objective"] = num(fit.objective);
  j["dual_objective"] = num(fit.dual_objective);
  j["tie_flag"] = fit.tie_flag;
  return j;
}

json summary_json(const Summary& s) {
  if (s.count == 0) return {{"count", 0}};
  return {{"count", s.count},
          {"median", num(s.median)},
          {"mean", num(s.mean)},
          {"min", num(s.min)},
          {"max", num(s.max)}};
}

json vec_json(const Eigen::Vector3d& v) { return json::array({num(v(0)), num(v(1)), num(v(2))}); }

json run_summary_json(const RunSummary& summary, const std::string& study_name) {
  const StudySpec& spec = summary.spec;
  json j;
  j["study"] = study_name;
  j["runs"] = spec.runs;
  j["seed"] = spec.base_seed;
  j["n"] = spec.n;
  if (spec.study == Study::Study2) {
    j["test_n"] = spec.test_n;
    json beta = json::array();
    for (double b : spec.beta) beta.push_back(num(b));
    j["beta"] = beta;
  } else {
    j["noise_rate"] = num(spec.noise_rate);
  }
  j["n_failed"] = summary.n_failed;
  j["aurc_train"] = summary_json(summary.aurc_train);
  if (summary.aurc_test.count > 0) j["aurc_test"] = summary_json(summary.aurc_test);
  json rows = json::array();
  for (const auto& g : summary.per_gamma) {
    json row;
    row["gamma"] = num(g.gamma);
    row["n_converged"] = g.n_converged;
    row["c"] = summary_json(g.center);
    row["d"] = summary_json(g.half_width);
    row["l"] = summary_json(g.lower);
    row["u"] = summary_json(g.upper);
    row["coverage"] = summary_json(g.coverage);
    row["acc_nonreject"] = summary_json(g.acc_nonreject);
    row["acc_all"] = summary_json(g.acc_all);
    if (g.test_coverage.count > 0) {
      row["test_coverage"] = summary_json(g.test_coverage);
      row["test_acc_nonreject"] = summary_json(g.test_acc_nonreject);
      row["test_acc_all"] = summary_json(g.test_acc_all);
    }
    rows.push_back(row);
  }
  j["per_gamma"] = rows;
  return j;
}

json study3_json(const Study3Summary& summary) {
  const StudySpec& spec = summary.spec;
  json j;
  j["study"] = "3";
  j["runs"] = spec.runs;
  j["seed"] = spec.base_seed;
  j["n1"] = spec.n1;
  j["n2"] = spec.n2;
  j["cost"] = num(spec.svm_cost);
  j["coverage_target"] = num(spec.coverage_target);
  j["n_failed"] = summary.n_failed;
  j["truth"] = vec_json(summary.truth);
  json methods = json::array();
  for (const auto& m : summary.methods) {
    methods.push_back(
        {{"method", m.method}, {"count", m.count}, {"bias", vec_json(m.bias)}, {"sd", vec_json(m.sd)}});
  }
  j["methods"] = methods;
  j["coverage"] = summary_json(summary.coverage);
  return j;
}

std::string bound_message(const Dataset& data, double gamma) {
  std::ostringstream msg;
  msg << "gamma = " << format_number(gamma)
      << " does not converge; the interval problem needs gamma > 1/(2*min class count) = "
      << format_number(feasibility_bound(data)) << " (n+ = " << data.count_positive()
      << ", n- = " << data.count_negative() << ")";
  return msg.str();
}

void emit(const std::string& path, std::ostream& out, const std::string& text) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw DataError("cannot write " + path);
  file << text;
  if (!file) throw DataError("failed writing " + path);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    char* end = nullptr;
    const double value = std::strtod(token.c_str(), &end);
    if (token.empty() || *end != '\0') throw UsageError("invalid grid value '" + token + "'");
    grid.push_back(value);
  }
  if (grid.empty()) throw UsageError("empty gamma grid");
  return grid;
}

StudySpec study_spec(const CliConfig& config) {
  StudySpec spec;
  if (config.command == "two-step" || config.study == "3") {
    spec = StudySpec::defaults(Study::Study3);
    spec.n1 = config.n1;
    spec.n2 = config.n2;
    spec.svm_cost = config.cost;
    spec.coverage_target = config.coverage_target;
  } else if (config.study == "1") {
    spec = StudySpec::defaults(Study::Study1Clean);
  } else if (config.study == "1n") {
    spec = StudySpec::defaults(Study::Study1Noisy);
  } else if (config.study == "2") {
    spec = StudySpec::defaults(Study::Study2);
    spec.beta = config.signal == "weak" ? weak_signal_beta() : strong_signal_beta();
  } else {
    throw UsageError("unknown study '" + config.study + "'");
  }
  if (config.n) spec.n = *config.n;
  if (!config.grid.empty()) spec.gamma_grid = config.grid;
  spec.runs = config.runs;
  spec.base_seed = config.seed;
  spec.threads = config.threads;
  try {
    validate(spec);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return spec;
}

int run_fit(const CliConfig& config, std::ostream& out, std::ostream& err) {
  const Dataset data = read_dataset_csv(config.input);
  require_both_classes(data);
  const FitReport fit = config.hard_margin ? solve_hard_margin(data) : solve_interval(data, *config.gamma);
  emit(config.output, out, dump(fit_json(fit)));
  if (!fit.converged()) {
    err << bound_message(data, fit.gamma) << "\n";
    return kNonConvergence;
  }
  return kOk;
}

int run_sweep(const CliConfig& config, std::ostream& out, std::ostream& err) {
  const Dataset data = read_dataset_csv(config.input);
  require_both_classes(data);
  const std::vector<double> grid =
      config.grid.empty() ? auto_gamma_grid(data, config.grid_points) : config.grid;
  std::ostringstream csv;
  csv << "gamma,status,c,d,l,u,coverage,selective_risk,acc_nonreject,acc_all\n";
  int code = kOk;
  for (const auto& row : gamma_sweep(data, grid)) {
    csv << format_number(row.gamma) << ',' << to_string(row.fit.status);
    if (row.fit.interval) {
      const auto& iv = *row.fit.interval;
      const auto& ev = *row.evaluation;
      csv << ',' << format_number(iv.center()) << ',' << format_number(iv.half_width()) << ','
          << format_number(iv.lower()) << ',' << format_number(iv.upper()) << ','
          << format_number(ev.coverage) << ',' << cell(ev.selective_risk) << ','
          << cell(ev.acc_nonreject) << ',' << format_number(ev.acc_all);
    } else {
      csv << ",,,,,,,,";
      err << bound_message(data, row.gamma) << "\n";
      code = kNonConvergence;
    }
    csv << '\n';
  }
  emit(config.output, out, csv.str());
  return code;
}

int run_rc_curve(const CliConfig& config, std::ostream& out) {
  const Dataset data = read_dataset_csv(config.input);
  const RcCurve curve = rc_curve(data);
  std::ostringstream csv;
  csv << "coverage,risk,k,gamma,l,u\n";
  for (const auto& p : curve.points) {
    csv << format_number(p.coverage) << ',' << format_number(p.risk) << ','
        << (p.rank_k ? std::to_string(*p.rank_k) : std::string()) << ',' << cell(p.gamma) << ','
        << format_number(p.interval.lower()) << ',' << format_number(p.interval.upper()) << '\n';
  }
  if (!config.aurc) {
    emit(config.output, out, csv.str());
    return kOk;
  }
  if (!config.output.empty()) emit(config.output, out, csv.str());
  emit("", out, dump({{"aurc", num(aurc(curve))}, {"points", curve.points.size()}}));
  return kOk;
}

int run_roc(const CliConfig& config, std::ostream& out) {
  const Dataset data = read_dataset_csv(config.input);
  emit(config.output, out, dump({{"auc", num(roc_auc(data))}}));
  return kOk;
}

int run_simulate(const CliConfig& config, std::ostream& out) {
  const StudySpec spec = study_spec(config);
  const StudyResult result = run_replicated(spec);
  json j;
  if (const auto* s3 = std::get_if<Study3Summary>(&result)) {
    j = study3_json(*s3);
  } else {
    j = run_summary_json(std::get<RunSummary>(result), config.study);
    if (spec.study == Study::Study2) j["signal"] = config.signal;
  }
  emit(config.output, out, dump(j));
  return kOk;
}

}  // namespace

std::optional<CliConfig> parse_args(int argc, const char* const* argv, std::ostream& out) {
  CliConfig config;
  CLI::App app{"Cutoff-interval fitting and evaluation for binary risk scores", "riskcut"};
  app.require_subcommand(1, 1);

  auto add_input = [&](CLI::App* sub) {
    sub->add_option("-i,--input,input", config.input, "CSV with header label,score")
        ->required()
        ->check(CLI::ExistingFile);
  };
  auto add_output = [&](CLI::App* sub) {
    sub->add_option("-o,--output", config.output, "Output file (default stdout)");
  };
  std::string grid_text;
  std::optional<double> gamma;

  auto* fit = app.add_subcommand("fit", "Fit the cutoff interval for one penalty level");
  add_input(fit);
  add_output(fit);
  auto* gamma_opt = fit->add_option("-g,--gamma", gamma, "Penalty level gamma > 0");
  auto* hard_opt = fit->add_flag("--hard-margin", config.hard_margin, "Gamma -> infinity limit");
  gamma_opt->excludes(hard_opt);

  auto* sweep = app.add_subcommand("sweep", "Fit and evaluate over a gamma grid");
  add_input(sweep);
  add_output(sweep);
  sweep->add_option("--grid", grid_text, "Comma-separated ascending gamma values");
  sweep->add_option("--points", config.grid_points, "Points of the automatic grid")
      ->check(CLI::Range(2, 100000));

  auto* rc = app.add_subcommand("rc-curve", "Risk-coverage curve over all interval solutions");
  add_input(rc);
  add_output(rc);
  rc->add_flag("--aurc", config.aurc, "Print the area under the curve as JSON");

  auto* roc = app.add_subcommand("roc", "ROC AUC of the scores");
  add_input(roc);
  add_output(roc);

  auto* sim = app.add_subcommand("simulate", "Replicated simulation study");
  sim->add_option("--study", config.study, "1, 1n, 2 or 3")
      ->check(CLI::IsMember({"1", "1n", "2", "3"}));
  sim->add_option("--signal", config.signal, "Study 2 signal strength")
      ->check(CLI::IsMember({"strong", "weak"}));
  sim->add_option("--n", config.n, "Training size (studies 1 and 2)");
  sim->add_option("--grid", grid_text, "Comma-separated ascending gamma values");
  add_output(sim);

  auto* two = app.add_subcommand("two-step", "Regular vs two-step vs main-set-only SVM");
  add_output(two);
  two->add_option("--n1", config.n1, "Main set size");
  two->add_option("--n2", config.n2, "Contamination set size");
  two->add_option("--cost", config.cost, "SVM cost");
  two->add_option("--coverage-target", config.coverage_target, "Coverage of the selected interval");

  for (auto* sub : {sim, two}) {
    sub->add_option("--runs", config.runs, "Replications")->check(CLI::PositiveNumber);
    sub->add_option("--seed", config.seed, "Base seed");
    sub->add_option("--threads", config.threads, "Worker threads")->check(CLI::Range(1u, 256u));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return std::nullopt;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  config.command = app.get_subcommands().front()->get_name();
  if (config.command == "fit") {
    if (!gamma && !config.hard_margin) throw UsageError("fit needs --gamma or --hard-margin");
    if (gamma && !(*gamma > 0.0 && std::isfinite(*gamma))) {
      throw UsageError("--gamma must be a positive finite number");
    }
    config.gamma = gamma;
  }
  if (!grid_text.empty()) config.grid = parse_grid(grid_text);
  return config;
}

int run_command(const CliConfig& config, std::ostream& out, std::ostream& err) {
  if (config.command == "fit") return run_fit(config, out, err);
  if (config.command == "sweep") {
    for (std::size_t i = 0; i < config.grid.size(); ++i) {
      if (!(config.grid[i] > 0.0) || (i > 0 && !(config.grid[i] > config.grid[i - 1]))) {
        throw UsageError("gamma grid must be positive and strictly ascending");
      }
    }
    return run_sweep(config, out, err);
  }
  if (config.command == "rc-curve") return run_rc_curve(config, out);
  if (config.command == "roc") return run_roc(config, out);
  if (config.command == "simulate" || config.command == "two-step") return run_simulate(config, out);
  throw UsageError("unknown command '" + config.command + "'");
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    const auto config = parse_args(argc, argv, out);
    if (!config) return kOk;
    return run_command(*config, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
}

}  // namespace riskcut::cli
