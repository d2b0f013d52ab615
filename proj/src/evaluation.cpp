#include "gsi/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "gsi/error.hpp"
#include "gsi/rng.hpp"

namespace gsi {

namespace {

TargetRecord score_target(const IncompleteTensor& masked, const Cell& cell,
                          std::span<const double> truth,
                          const EstimatorConfig& config) {
  TargetRecord rec;
  rec.target = cell;
  rec.estimator = config.label();
  rec.standardized = config.standardize;
  try {
    const TargetQuery q{cell.a, cell.b, Direction::RegressOverA};
    ScaledPrediction sp = estimate_scaled(masked, q, config);
    std::vector<double> est = std::move(sp.prediction.estimate);
    std::vector<double> ref(truth.begin(), truth.end());
    if (sp.scaler) {
      est = sp.scaler->forward(est);
      ref = sp.scaler->forward(ref);
    }
    rec.mae = mae(est, ref);
    try {
      rec.nrmse = nrmse(est, ref);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateTruth) throw;
    }
  } catch (const Error& e) {
    rec.mae.reset();
    rec.nrmse.reset();
    rec.status = std::string(to_string(e.kind()));
  }
  return rec;
}

EvaluationReport make_shell(const IncompleteTensor& tensor,
                            const std::vector<EstimatorConfig>& configs,
                            const std::optional<std::vector<Cell>>& targets) {
  if (configs.empty()) fail(ErrorKind::InvalidArgument, "no estimator configured");
  for (const auto& c : configs) c.validate();
  EvaluationReport rep;
  for (const auto& c : configs) rep.estimators.push_back(c.label());
  rep.targets = targets ? *targets : observed_cells(tensor);
  for (const Cell& c : rep.targets) {
    tensor.check_index(c.a, c.b);
    if (!tensor.observed(c.a, c.b)) {
      fail(ErrorKind::InvalidArgument, "evaluation target (" + std::to_string(c.a) +
                                           ", " + std::to_string(c.b) +
                                           ") is not observed");
    }
  }
  rep.per_target.resize(rep.targets.size() * configs.size());
  return rep;
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

double median_of(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<Cell> observed_cells(const IncompleteTensor& tensor) {
  std::vector<Cell> out;
  for (Index i = 0; i < tensor.n_a(); ++i) {
    for (Index j = 0; j < tensor.n_b(); ++j) {
      if (tensor.observed(i, j)) out.push_back({i, j});
    }
  }
  return out;
}

std::vector<Cell> sample_observed_cells(const IncompleteTensor& tensor,
                                        std::size_t count, std::uint64_t seed) {
  std::vector<Cell> all = observed_cells(tensor);
  if (count >= all.size()) return all;
  CounterRng rng(seed, 0x7a);
  for (std::size_t s = 0; s < count; ++s) {
    const std::size_t pick = s + static_cast<std::size_t>(rng.below(all.size() - s));
    std::swap(all[s], all[pick]);
  }
  all.resize(count);
  std::sort(all.begin(), all.end(), [](const Cell& x, const Cell& y) {
    return x.a != y.a ? x.a < y.a : x.b < y.b;
  });
  return all;
}

std::vector<std::optional<double>> EvaluationReport::column(
    const std::string& estimator, Metric metric) const {
  const auto it = std::find(estimators.begin(), estimators.end(), estimator);
  if (it == estimators.end()) {
    fail(ErrorKind::InvalidArgument, "estimator '" + estimator + "' not in report");
  }
  const auto e = static_cast<std::size_t>(it - estimators.begin());
  std::vector<std::optional<double>> out;
  out.reserve(targets.size());
  for (std::size_t t = 0; t < targets.size(); ++t) out.push_back(record(t, e).metric(metric));
  return out;
}

EvaluationReport mask_and_impute(const IncompleteTensor& tensor,
                                 const std::vector<EstimatorConfig>& configs,
                                 const std::optional<std::vector<Cell>>& targets) {
  EvaluationReport rep = make_shell(tensor, configs, targets);
  const auto nt = static_cast<std::ptrdiff_t>(rep.targets.size());
  const std::size_t nc = configs.size();

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t t = 0; t < nt; ++t) {
    const Cell cell = rep.targets[static_cast<std::size_t>(t)];
    const IncompleteTensor masked = tensor.hidden(cell.a, cell.b);
    const auto truth = tensor.cell(cell.a, cell.b);
    for (std::size_t c = 0; c < nc; ++c) {
      rep.per_target[static_cast<std::size_t>(t) * nc + c] =
          score_target(masked, cell, truth, configs[c]);
    }
  }
  compute_aggregates(rep);
  return rep;
}

EvaluationReport mask_and_impute_serial(
    const IncompleteTensor& tensor, const std::vector<EstimatorConfig>& configs,
    const std::optional<std::vector<Cell>>& targets) {
  EvaluationReport rep = make_shell(tensor, configs, targets);
  IncompleteTensor work = tensor;
  const std::size_t nc = configs.size();
  for (std::size_t t = 0; t < rep.targets.size(); ++t) {
    const Cell cell = rep.targets[t];
    const std::vector<double> truth(work.cell(cell.a, cell.b).begin(),
                                    work.cell(cell.a, cell.b).end());
    work.set_observed(cell.a, cell.b, false);
    for (std::size_t c = 0; c < nc; ++c) {
      rep.per_target[t * nc + c] = score_target(work, cell, truth, configs[c]);
    }
    work.set_observed(cell.a, cell.b, true);
  }
  compute_aggregates(rep);
  return rep;
}

void compute_aggregates(EvaluationReport& report) {
  report.aggregates.clear();
  for (const auto& name : report.estimators) {
    for (Metric m : {Metric::MAE, Metric::NRMSE}) {
      Aggregate agg;
      agg.estimator = name;
      agg.metric = m;
      std::vector<double> vals;
      const auto e = static_cast<std::size_t>(
          std::find(report.estimators.begin(), report.estimators.end(), name) -
          report.estimators.begin());
      for (std::size_t t = 0; t < report.targets.size(); ++t) {
        const TargetRecord& r = report.record(t, e);
        if (r.status != "ok") ++agg.failures;
        if (auto v = r.metric(m)) vals.push_back(*v);
      }
      agg.count = vals.size();
      if (!vals.empty()) {
        agg.mean = mean_of(vals);
        double ss = 0.0;
        for (double v : vals) ss += (v - agg.mean) * (v - agg.mean);
        agg.std = std::sqrt(ss / static_cast<double>(vals.size()));
        agg.median = median_of(vals);
      }
      report.aggregates.push_back(agg);
    }
  }
}

Comparison compare_estimators(const EvaluationReport& report,
                              const std::string& estimator_a,
                              const std::string& estimator_b, Metric metric,
                              Alternative alternative) {
  const auto ca = report.column(estimator_a, metric);
  const auto cb = report.column(estimator_b, metric);
  std::vector<double> a, b;
  for (std::size_t t = 0; t < ca.size(); ++t) {
    if (ca[t] && cb[t]) {
      a.push_back(*ca[t]);
      b.push_back(*cb[t]);
    }
  }
  if (a.empty()) {
    fail(ErrorKind::InvalidArgument, "no target where both estimators succeeded");
  }
  Comparison cmp;
  cmp.estimator_a = estimator_a;
  cmp.estimator_b = estimator_b;
  cmp.metric = metric;
  cmp.alternative = alternative;
  cmp.n_pairs = a.size();
  cmp.result = wilcoxon_signed_rank(a, b, alternative);
  return cmp;
}

GridSearchResult grid_search(const IncompleteTensor& tensor,
                             const EstimatorConfig& base_config,
                             const GridSearchSpec& spec,
                             const std::optional<std::vector<Cell>>& targets) {
  if (spec.k_values.empty() || spec.lambda_values.empty()) {
    fail(ErrorKind::InvalidArgument, "grid search needs non-empty k and lambda lists");
  }
  std::vector<Index> ks = spec.k_values;
  std::vector<double> lambdas = spec.lambda_values;
  std::sort(ks.begin(), ks.end());
  std::sort(lambdas.begin(), lambdas.end());

  GridSearchResult out;
  const GridPoint* best = nullptr;
  for (Index k : ks) {
    for (double lambda : lambdas) {
      EstimatorConfig cfg = base_config;
      cfg.k = k;
      cfg.solver.lambda = lambda;
      const EvaluationReport rep = mask_and_impute(tensor, {cfg}, targets);
      std::vector<double> vals;
      for (const auto& r : rep.per_target) {
        if (auto v = r.metric(spec.metric)) vals.push_back(*v);
      }
      GridPoint gp{k, lambda, vals.size(), 0.0};
      if (!vals.empty()) {
        gp.score = spec.selection == GridSelection::MeanBest ? mean_of(vals)
                                                             : median_of(std::move(vals));
      }
      out.table.push_back(gp);
    }
  }
  // Table is ordered by (k, lambda) ascending, so strict < keeps the
  // smallest k and lambda among equal scores.
  for (const auto& gp : out.table) {
    if (gp.successes == 0) continue;
    if (!best || gp.score < best->score) best = &gp;
  }
  if (!best) fail(ErrorKind::InvalidArgument, "no grid point produced a successful estimate");
  out.best_k = best->k;
  out.best_lambda = best->lambda;
  return out;
}

}  // namespace gsi
