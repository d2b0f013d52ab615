#include "gsi/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>
#include <json.hpp>

#include "gsi/csv_io.hpp"
#include "gsi/error.hpp"
#include "gsi/evaluation.hpp"
#include "gsi/report_io.hpp"
#include "gsi/synthgen.hpp"

namespace gsi {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NumericalFailure:
    case ErrorKind::DivergenceDetected:
      return kExitNumerical;
    default:
      return kExitData;
  }
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void apply_threads(int threads) {
#ifdef _OPENMP
  if (threads > 0) {
    omp_set_num_threads(threads);
  } else if (const char* env = std::getenv("GSI_NUM_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(n);
  }
#else
  (void)threads;
#endif
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::vector<std::string> read_label_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ParseError, "cannot open subset file '" + path + "'");
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

// Options shared by every estimator-running subcommand.
struct EstimatorOptions {
  std::string estimators = "gsi_ab";
  std::size_t k = 1;
  double lambda = 0.0;
  int max_iters = 2000;
  double step = 0.1;
  double tol = 1e-8;
  double cutoff = 1e-12;
  bool standardize = false;
  std::string control;

  void add_to(CLI::App* app, bool many) {
    app->add_option(many ? "--estimators" : "--estimator", estimators,
                    many ? "Comma-separated estimator names" : "Estimator name")
        ->capture_default_str();
    app->add_option("--k", k, "Minimum training-set size for greedy donor selection")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app->add_option("--lambda", lambda, "Cross-dimension penalty for gsi_reg_*")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    app->add_option("--max-iters", max_iters)->capture_default_str();
    app->add_option("--step", step, "Initial step (dimensionless)")->capture_default_str();
    app->add_option("--tol", tol)->capture_default_str();
    app->add_option("--svd-cutoff", cutoff)->capture_default_str();
    app->add_flag("--standardize", standardize, "Standardize each output dimension");
    app->add_option("--control", control, "Control label in A (fixed_action_effect)");
  }

  std::vector<EstimatorConfig> configs(const LongFormDataset& data) const {
    std::vector<EstimatorConfig> out;
    for (const auto& name : split_list(estimators)) {
      const auto kind = parse_estimator(name);
      if (!kind) throw UsageError("unknown estimator '" + name + "'");
      EstimatorConfig cfg;
      cfg.kind = *kind;
      cfg.k = k;
      cfg.standardize = standardize;
      cfg.solver.lambda = lambda;
      cfg.solver.max_iters = max_iters;
      cfg.solver.initial_step = step;
      cfg.solver.tolerance = tol;
      cfg.solver.svd_cutoff_factor = cutoff;
      if (cfg.kind == EstimatorKind::FixedActionEffect) {
        if (control.empty()) throw UsageError("fixed_action_effect needs --control");
        cfg.control_index = data.a_index(control);
      }
      out.push_back(cfg);
    }
    if (out.empty()) throw UsageError("no estimator given");
    return out;
  }
};

// Dataset plus optional row subset and target selection.
struct DataOptions {
  std::string path;
  std::string subset;
  std::string targets = "all";
  std::uint64_t seed = 0;

  void add_to(CLI::App* app, bool with_targets) {
    app->add_option("--data", path, "Long-form CSV (a_id,b_id,y0,...)")->required();
    app->add_option("--a-subset", subset, "File listing A labels to keep, one per line");
    if (with_targets) {
      app->add_option("--targets", targets, "'all' or a count of sampled observed cells")
          ->capture_default_str();
      app->add_option("--seed", seed, "Seed for target sampling")->capture_default_str();
    }
  }

  std::pair<LongFormDataset, IncompleteTensor> load() const {
    auto [data, tensor] = load_csv(path);
    if (!subset.empty()) {
      data = data.restrict_a(read_label_file(subset));
      tensor = data.to_tensor();
    }
    return {std::move(data), std::move(tensor)};
  }

  std::optional<std::vector<Cell>> cells(const IncompleteTensor& t) const {
    if (targets == "all") return std::nullopt;
    std::size_t n = 0;
    try {
      n = std::stoul(targets);
    } catch (const std::exception&) {
      throw UsageError("--targets must be 'all' or a positive count");
    }
    if (n == 0) throw UsageError("--targets must be positive");
    return sample_observed_cells(t, n, seed);
  }
};

std::string resolve_estimator(const EvaluationReport& rep, const std::string& name) {
  std::vector<std::string> hits;
  for (const auto& e : rep.estimators) {
    if (e == name) return e;
    if (e.rfind(name + "[", 0) == 0) hits.push_back(e);
  }
  if (hits.size() != 1) {
    fail(ErrorKind::InvalidArgument,
         "estimator '" + name + "' " + (hits.empty() ? "not in report" : "is ambiguous"));
  }
  return hits.front();
}

void print_vector(std::ostream& out, std::span<const double> v) {
  for (std::size_t d = 0; d < v.size(); ++d) out << (d ? " " : "") << format_double(v[d]);
  out << '\n';
}

void print_labels(std::ostream& out, const std::vector<std::string>& labels,
                  const IndexList& idx) {
  for (std::size_t n = 0; n < idx.size(); ++n) out << (n ? "," : "") << labels[idx[n]];
  out << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Causal imputation over incomplete interaction tensors", "gsi"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: GSI_NUM_THREADS or OpenMP)");
  app.fallthrough();

  // generate
  auto* gen = app.add_subcommand("generate", "Write a synthetic latent-factor dataset");
  SyntheticSpec spec;
  std::string model = "multi", gen_out, truth_out;
  gen->add_option("--model", model, "single | multi")
      ->check(CLI::IsMember({"single", "multi"}))
      ->capture_default_str();
  gen->add_option("--na", spec.n_a)->capture_default_str();
  gen->add_option("--nb", spec.n_b)->capture_default_str();
  gen->add_option("--dim", spec.dim)->capture_default_str();
  gen->add_option("--rank", spec.rank)->capture_default_str();
  gen->add_option("--noise", spec.noise_std)->capture_default_str();
  gen->add_option("--missing", spec.missing_fraction)->capture_default_str();
  gen->add_option("--seed", spec.seed)->capture_default_str();
  gen->add_option("--out", gen_out, "CSV output path")->required();
  gen->add_option("--truth", truth_out, "Truth sidecar (default: <out>.truth.json)");

  // impute
  auto* imp = app.add_subcommand("impute", "Estimate one missing cell");
  DataOptions imp_data;
  EstimatorOptions imp_est;
  std::string a_label, b_label;
  imp_data.add_to(imp, false);
  imp_est.add_to(imp, false);
  imp->add_option("--a", a_label, "Target label in A")->required();
  imp->add_option("--b", b_label, "Target label in B")->required();

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "Mask-and-impute sweep to a JSON report");
  DataOptions bench_data;
  EstimatorOptions bench_est;
  std::string report_out, columns_out, pair_arg, alt_arg = "less", metric_arg = "nrmse";
  bool no_timestamp = false;
  bench_data.add_to(bench, true);
  bench_est.add_to(bench, true);
  bench->add_option("--out", report_out, "JSON report path")->required();
  bench->add_option("--nrmse-columns", columns_out, "Per-estimator NRMSE column CSV");
  bench->add_option("--compare", pair_arg, "Add a Wilcoxon comparison 'est_a,est_b'");
  bench->add_option("--alternative", alt_arg, "less | greater | two-sided")->capture_default_str();
  bench->add_option("--metric", metric_arg, "Metric for --compare")->capture_default_str();
  bench->add_flag("--no-timestamp", no_timestamp, "Omit generated_at for byte-stable output");

  // tune
  auto* tune = app.add_subcommand("tune", "Grid search over k and lambda");
  DataOptions tune_data;
  EstimatorOptions tune_est;
  tune_est.estimators = "gsi_reg_ab";
  std::string k_grid = "1", lambda_grid = "0", tune_metric = "nrmse", selection = "mean",
              tune_out;
  tune_data.add_to(tune, true);
  tune_est.add_to(tune, false);
  tune->add_option("--k-values", k_grid, "Comma-separated k grid")->capture_default_str();
  tune->add_option("--lambdas", lambda_grid, "Comma-separated lambda grid")->capture_default_str();
  tune->add_option("--metric", tune_metric)->capture_default_str();
  tune->add_option("--selection", selection, "mean | median")
      ->check(CLI::IsMember({"mean", "median"}))
      ->capture_default_str();
  tune->add_option("--out", tune_out, "Optional JSON score table");

  // compare
  auto* cmp = app.add_subcommand("compare", "Wilcoxon signed-rank test between two estimators");
  std::string cmp_report, cmp_pair, cmp_alt = "less", cmp_metric = "nrmse";
  cmp->add_option("--report", cmp_report)->required();
  cmp->add_option("--pair", cmp_pair, "'est_a,est_b'")->required();
  cmp->add_option("--alternative", cmp_alt)->capture_default_str();
  cmp->add_option("--metric", cmp_metric)->capture_default_str();

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  apply_threads(threads);

  try {
    if (*gen) {
      spec.model = model == "single" ? LatentModel::SingleLatent : LatentModel::MultiLatent;
      const SyntheticInstance inst = generate(spec);
      std::vector<std::string> al, bl;
      for (Index i = 0; i < spec.n_a; ++i) al.push_back("a" + std::to_string(i));
      for (Index j = 0; j < spec.n_b; ++j) bl.push_back("b" + std::to_string(j));
      save_csv(gen_out, LongFormDataset::from_tensor(inst.observed_tensor, al, bl));
      if (truth_out.empty()) truth_out = gen_out + ".truth.json";
      std::ofstream tf(truth_out);
      if (!tf) fail(ErrorKind::InvalidArgument, "cannot write '" + truth_out + "'");
      tf << synthetic_truth_json(inst, al, bl).dump() << '\n';
      out << "wrote " << gen_out << " (" << inst.observed_tensor.observed_count()
          << " observed cells) and " << truth_out << '\n';
      return kExitOk;
    }

    if (*imp) {
      const auto [data, tensor] = imp_data.load();
      const auto configs = imp_est.configs(data);
      if (configs.size() != 1) throw UsageError("impute takes exactly one estimator");
      const TargetQuery q{data.a_index(a_label), data.b_index(b_label),
                          Direction::RegressOverA};
      const Prediction p = estimate(tensor, q, configs.front());
      const bool a_side = configs.front().kind != EstimatorKind::SI_C &&
                          configs.front().kind != EstimatorKind::GSI_BA &&
                          configs.front().kind != EstimatorKind::GSIReg_BA &&
                          configs.front().kind != EstimatorKind::MeanOverB;
      out << "estimator: " << configs.front().label() << '\n';
      out << "estimate: ";
      print_vector(out, p.estimate);
      out << "donors: ";
      print_labels(out, a_side ? data.a_labels : data.b_labels, p.donors_used);
      out << "training: ";
      print_labels(out, a_side ? data.b_labels : data.a_labels, p.training_columns_used);
      return kExitOk;
    }

    if (*bench) {
      const auto [data, tensor] = bench_data.load();
      const auto configs = bench_est.configs(data);
      EvaluationReport rep = mask_and_impute(tensor, configs, bench_data.cells(tensor));
      if (!pair_arg.empty()) {
        const auto pair = split_list(pair_arg);
        const auto alt = parse_alternative(alt_arg);
        const auto metric = parse_metric(metric_arg);
        if (pair.size() != 2 || !alt || !metric) throw UsageError("bad --compare/--alternative/--metric");
        rep.comparisons.push_back(compare_estimators(rep, resolve_estimator(rep, pair[0]),
                                                     resolve_estimator(rep, pair[1]),
                                                     *metric, *alt));
      }
      ReportMeta meta;
      meta.dataset = bench_data.path;
      meta.seed = bench_data.seed;
      meta.a_labels = data.a_labels;
      meta.b_labels = data.b_labels;
      if (!no_timestamp) meta.generated_at = utc_timestamp();
      std::ofstream rf(report_out);
      if (!rf) fail(ErrorKind::InvalidArgument, "cannot write '" + report_out + "'");
      rf << report_to_json(rep, meta).dump(2) << '\n';
      if (!columns_out.empty()) {
        std::ofstream cf(columns_out);
        if (!cf) fail(ErrorKind::InvalidArgument, "cannot write '" + columns_out + "'");
        write_metric_columns(cf, rep, Metric::NRMSE);
      }
      // summary only; full precision lives in the report
      auto cell = [](const Aggregate& a, double v) {
        if (!a.count) return std::string("-");
        std::ostringstream s;
        s << std::setprecision(6) << v;
        return s.str();
      };
      out << std::left << std::setw(36) << "estimator" << std::setw(8) << "n"
          << std::setw(14) << "mean_mae" << "median_nrmse\n";
      for (std::size_t e = 0; e < rep.estimators.size(); ++e) {
        const Aggregate& m = rep.aggregates[2 * e];
        const Aggregate& n = rep.aggregates[2 * e + 1];
        out << std::setw(36) << rep.estimators[e] << std::setw(8) << m.count << std::setw(14)
            << cell(m, m.mean) << cell(n, n.median) << '\n';
      }
      for (const auto& c : rep.comparisons) {
        out << "wilcoxon " << c.estimator_a << " vs " << c.estimator_b << " ("
            << to_string(c.alternative) << "): W=" << format_double(c.result.statistic)
            << " p=" << format_double(c.result.p_value) << '\n';
      }
      return kExitOk;
    }

    if (*tune) {
      const auto [data, tensor] = tune_data.load();
      const auto configs = tune_est.configs(data);
      if (configs.size() != 1) throw UsageError("tune takes exactly one estimator");
      GridSearchSpec gs;
      gs.k_values.clear();
      gs.lambda_values.clear();
      try {
        for (const auto& s : split_list(k_grid)) gs.k_values.push_back(std::stoul(s));
        for (const auto& s : split_list(lambda_grid)) gs.lambda_values.push_back(std::stod(s));
      } catch (const std::exception&) {
        throw UsageError("bad --k-values or --lambdas list");
      }
      const auto metric = parse_metric(tune_metric);
      if (!metric) throw UsageError("bad --metric");
      gs.metric = *metric;
      gs.selection = selection == "median" ? GridSelection::MedianBest : GridSelection::MeanBest;
      const GridSearchResult res = grid_search(tensor, configs.front(), gs, tune_data.cells(tensor));
      out << "k,lambda,successes,score\n";
      for (const auto& gp : res.table) {
        out << gp.k << ',' << format_double(gp.lambda) << ',' << gp.successes << ','
            << (gp.successes ? format_double(gp.score) : "") << '\n';
      }
      out << "best k=" << res.best_k << " lambda=" << format_double(res.best_lambda) << '\n';
      if (!tune_out.empty()) {
        nlohmann::ordered_json j;
        j["best_k"] = res.best_k;
        j["best_lambda"] = res.best_lambda;
        j["metric"] = to_string(gs.metric);
        j["selection"] = selection;
        for (const auto& gp : res.table) {
          j["table"].push_back({{"k", gp.k}, {"lambda", gp.lambda}, {"successes", gp.successes},
                                {"score", gp.successes ? nlohmann::ordered_json(gp.score) : nullptr}});
        }
        std::ofstream tf(tune_out);
        tf << j.dump(2) << '\n';
      }
      return kExitOk;
    }

    if (*cmp) {
      std::ifstream in(cmp_report);
      if (!in) fail(ErrorKind::ParseError, "cannot open '" + cmp_report + "'");
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::ParseError, std::string("report is not JSON: ") + e.what());
      }
      const EvaluationReport rep = report_from_json(j);
      const auto pair = split_list(cmp_pair);
      const auto alt = parse_alternative(cmp_alt);
      const auto metric = parse_metric(cmp_metric);
      if (pair.size() != 2 || !alt || !metric) throw UsageError("bad --pair/--alternative/--metric");
      const Comparison c = compare_estimators(rep, resolve_estimator(rep, pair[0]),
                                              resolve_estimator(rep, pair[1]), *metric, *alt);
      out << "a: " << c.estimator_a << "\nb: " << c.estimator_b << '\n';
      out << "metric: " << to_string(c.metric) << "\nalternative: " << to_string(c.alternative)
          << '\n';
      out << "pairs: " << c.n_pairs << " (non-zero differences: " << c.result.n << ")\n";
      out << "W: " << format_double(c.result.statistic) << '\n';
      out << "p: " << format_double(c.result.p_value) << (c.result.exact ? " (exact)" : " (normal approx.)")
          << '\n';
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
    return exit_code_for(e.kind());
  }
  return kExitUsage;
}

}  // namespace gsi
