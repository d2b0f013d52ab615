#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gsi/regression.hpp"
#include "gsi/tensor.hpp"

namespace gsi {

enum class EstimatorKind {
  MeanOverA,
  MeanOverB,
  TwoWayMean,
  FixedActionEffect,
  SI_A,
  SI_C,
  GSI_AB,
  GSI_BA,
  GSIReg_AB,
  GSIReg_BA,
};

/// Canonical CLI/report name, e.g. "gsi_ab".
std::string_view estimator_name(EstimatorKind kind) noexcept;
/// Accepts canonical names and the descriptive aliases
/// ("mean_over_actions", "mean_over_contexts", "gsi_reg" ...).
std::optional<EstimatorKind> parse_estimator(std::string_view name);
std::vector<EstimatorKind> all_estimator_kinds();

struct EstimatorConfig {
  EstimatorKind kind = EstimatorKind::GSI_AB;
  Index k = 1;
  SolverSettings solver{};
  bool standardize = false;
  std::optional<Index> control_index;  // FixedActionEffect only

  void validate() const;
  /// Name plus hyperparameters, stable across runs ("gsi_reg_ab[k=1,lambda=1]").
  std::string label() const;
};

struct Prediction {
  std::vector<double> estimate;
  IndexList donors_used;
  IndexList training_columns_used;
};

/// Per-dimension affine map fitted on observed entries: z = (v - mean) / scale.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const IncompleteTensor& tensor);
  IncompleteTensor apply(const IncompleteTensor& tensor) const;
  std::vector<double> forward(std::span<const double> v) const;
  std::vector<double> inverse(std::span<const double> z) const;
};

Prediction mean_over_a(const IncompleteTensor& t, const TargetQuery& target);
Prediction mean_over_b(const IncompleteTensor& t, const TargetQuery& target);
Prediction two_way_mean(const IncompleteTensor& t, const TargetQuery& target);
Prediction fixed_action_effect(const IncompleteTensor& t, const TargetQuery& target,
                               Index control_index);
Prediction si_a(const IncompleteTensor& t, const TargetQuery& target, Index k,
                double cutoff_factor = 1e-12);
Prediction si_c(const IncompleteTensor& t, const TargetQuery& target, Index k,
                double cutoff_factor = 1e-12);
Prediction gsi(const IncompleteTensor& t, const TargetQuery& target, Index k,
               Direction direction, double cutoff_factor = 1e-12);
Prediction gsi_regularized(const IncompleteTensor& t, const TargetQuery& target,
                           Index k, Direction direction,
                           const SolverSettings& solver);

/// Result of an estimate together with the scale it was computed on.
struct ScaledPrediction {
  Prediction prediction;                  // on the original scale
  std::optional<Standardizer> scaler;     // set when config.standardize
};

/// Dispatches on config.kind. The target cell must be unobserved.
Prediction estimate(const IncompleteTensor& tensor, const TargetQuery& target,
                    const EstimatorConfig& config);
ScaledPrediction estimate_scaled(const IncompleteTensor& tensor,
                                 const TargetQuery& target,
                                 const EstimatorConfig& config);

}  // namespace gsi
