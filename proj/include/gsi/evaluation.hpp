#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gsi/estimators.hpp"
#include "gsi/metrics.hpp"
#include "gsi/wilcoxon.hpp"

namespace gsi {

struct Cell {
  Index a = 0;
  Index b = 0;
  bool operator==(const Cell&) const = default;
};

struct TargetRecord {
  Cell target;
  std::string estimator;           // EstimatorConfig::label()
  std::optional<double> mae;
  std::optional<double> nrmse;     // empty when the truth vector is constant
  std::string status = "ok";       // "ok" or the failure kind
  bool standardized = false;       // metric computed on the standardized scale

  std::optional<double> metric(Metric m) const {
    return m == Metric::MAE ? mae : nrmse;
  }
  bool operator==(const TargetRecord&) const = default;
};

struct Aggregate {
  std::string estimator;
  Metric metric = Metric::MAE;
  std::size_t count = 0;      // targets with a value for this metric
  std::size_t failures = 0;   // targets where the estimator failed
  double mean = 0.0;
  double median = 0.0;
  double std = 0.0;
};

struct Comparison {
  std::string estimator_a;
  std::string estimator_b;
  Metric metric = Metric::NRMSE;
  std::string test = "wilcoxon_signed_rank";
  Alternative alternative = Alternative::Less;
  std::size_t n_pairs = 0;    // targets where both estimators produced a value
  WilcoxonResult result;
};

struct EvaluationReport {
  std::vector<std::string> estimators;
  std::vector<Cell> targets;
  /// targets.size() * estimators.size() records, target-major.
  std::vector<TargetRecord> per_target;
  std::vector<Aggregate> aggregates;
  std::vector<Comparison> comparisons;

  const TargetRecord& record(std::size_t target, std::size_t estimator) const {
    return per_target[target * estimators.size() + estimator];
  }
  /// Values of `metric` for one estimator, one per target (nullopt on failure).
  std::vector<std::optional<double>> column(const std::string& estimator,
                                            Metric metric) const;
};

/// All observed cells in row-major order.
std::vector<Cell> observed_cells(const IncompleteTensor& tensor);
/// `count` distinct observed cells chosen uniformly (seeded), row-major order.
std::vector<Cell> sample_observed_cells(const IncompleteTensor& tensor,
                                        std::size_t count, std::uint64_t seed);

/// Hides each target in turn, runs every config and scores against the
/// hidden value. Estimator failures are recorded, never thrown. Targets are
/// processed in parallel (OpenMP); record order is deterministic.
EvaluationReport mask_and_impute(const IncompleteTensor& tensor,
                                 const std::vector<EstimatorConfig>& configs,
                                 const std::optional<std::vector<Cell>>& targets = {});

/// Single-threaded reference: literally toggles the mask on a working copy.
EvaluationReport mask_and_impute_serial(
    const IncompleteTensor& tensor, const std::vector<EstimatorConfig>& configs,
    const std::optional<std::vector<Cell>>& targets = {});

/// Fills report.aggregates (both metrics, successes only).
void compute_aggregates(EvaluationReport& report);

/// Wilcoxon on targets where both estimators have a value for `metric`.
Comparison compare_estimators(const EvaluationReport& report,
                              const std::string& estimator_a,
                              const std::string& estimator_b, Metric metric,
                              Alternative alternative);

enum class GridSelection { MeanBest, MedianBest };

struct GridSearchSpec {
  std::vector<Index> k_values{1};
  std::vector<double> lambda_values{0.0};
  Metric metric = Metric::NRMSE;
  GridSelection selection = GridSelection::MeanBest;
};

struct GridPoint {
  Index k = 1;
  double lambda = 0.0;
  std::size_t successes = 0;
  double score = 0.0;  // meaningful only when successes > 0
};

struct GridSearchResult {
  Index best_k = 1;
  double best_lambda = 0.0;
  std::vector<GridPoint> table;
};

/// Argmin over the grid (ties: smaller k, then smaller lambda). Points with no
/// successful target are excluded.
GridSearchResult grid_search(const IncompleteTensor& tensor,
                             const EstimatorConfig& base_config,
                             const GridSearchSpec& spec,
                             const std::optional<std::vector<Cell>>& targets = {});

double median_of(std::vector<double> values);

}  // namespace gsi
