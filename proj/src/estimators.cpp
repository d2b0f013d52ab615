#include "gsi/estimators.hpp"

#include <array>
#include <cmath>
#include <utility>

#include "gsi/error.hpp"
#include "gsi/format.hpp"
#include "gsi/selection.hpp"

namespace gsi {

namespace {

struct NamedKind {
  std::string_view name;
  EstimatorKind kind;
};

constexpr std::array<NamedKind, 10> kCanonical{{
    {"mean_over_a", EstimatorKind::MeanOverA},
    {"mean_over_b", EstimatorKind::MeanOverB},
    {"two_way_mean", EstimatorKind::TwoWayMean},
    {"fixed_action_effect", EstimatorKind::FixedActionEffect},
    {"si_a", EstimatorKind::SI_A},
    {"si_c", EstimatorKind::SI_C},
    {"gsi_ab", EstimatorKind::GSI_AB},
    {"gsi_ba", EstimatorKind::GSI_BA},
    {"gsi_reg_ab", EstimatorKind::GSIReg_AB},
    {"gsi_reg_ba", EstimatorKind::GSIReg_BA},
}};

constexpr std::array<NamedKind, 4> kAliases{{
    {"mean_over_actions", EstimatorKind::MeanOverA},
    {"mean_over_contexts", EstimatorKind::MeanOverB},
    {"gsi_reg", EstimatorKind::GSIReg_AB},
    {"gsi", EstimatorKind::GSI_AB},
}};

void require_unobserved(const IncompleteTensor& t, const TargetQuery& q) {
  t.check_index(q.a_index, q.b_index);
  if (t.observed(q.a_index, q.b_index)) {
    fail(ErrorKind::InvalidArgument, "target cell (" + std::to_string(q.a_index) +
                                         ", " + std::to_string(q.b_index) +
                                         ") is observed; nothing to impute");
  }
}

// Mean over observed entries of one oriented row, skipping column `skip`.
Prediction row_mean(const OrientedView& view, Index row, Index skip) {
  Prediction p;
  p.estimate.assign(view.dim(), 0.0);
  for (Index c = 0; c < view.cols(); ++c) {
    if (c == skip || !view.observed(row, c)) continue;
    p.donors_used.push_back(c);
    for (Index d = 0; d < view.dim(); ++d) p.estimate[d] += view.value(row, c, d);
  }
  if (p.donors_used.empty()) {
    fail(ErrorKind::EmptyDonorSet, "no observed entries to average");
  }
  for (double& v : p.estimate) v /= static_cast<double>(p.donors_used.size());
  return p;
}

enum class FitMode { Shared, PerDimension, Regularized };

// Plain left-to-right sum so shared and per-dimension fits round identically
// when dim = 1 (Eigen's dot reduces strided and contiguous operands differently).
template <class Weights>
double predict(const Eigen::MatrixXd& x_test, Index d, const Weights& w) {
  double s = 0.0;
  for (Index c = 0; c < static_cast<Index>(x_test.rows()); ++c) s += x_test(c, d) * w(c);
  return s;
}

Prediction synthetic_fit(const IncompleteTensor& t, const TargetQuery& target,
                         Index k, Direction direction, FitMode mode,
                         const SolverSettings& solver) {
  const TargetQuery q{target.a_index, target.b_index, direction};
  DonorSelection sel = greedy_donor_selection(t, q, k);
  const RegressionProblem problem = assemble_problem(t, q, sel);
  const Index dim = problem.dim();

  Prediction p;
  p.estimate.assign(dim, 0.0);
  if (mode == FitMode::Shared) {
    const Index nc = problem.n_train();
    Eigen::MatrixXd x(nc * dim, problem.n_donors());
    Eigen::VectorXd y(nc * dim);
    for (Index d = 0; d < dim; ++d) {
      x.middleRows(d * nc, nc) = problem.x_train[d];
      y.segment(d * nc, nc) = problem.y_train.col(d);
    }
    const Eigen::VectorXd beta =
        least_squares_min_norm(x, y, solver.svd_cutoff_factor);
    for (Index d = 0; d < dim; ++d) p.estimate[d] = predict(problem.x_test, d, beta);
  } else {
    const CoefficientSet coef =
        mode == FitMode::PerDimension
            ? fit_unregularized(problem, solver.svd_cutoff_factor)
            : fit_regularized(problem, solver);
    for (Index d = 0; d < dim; ++d) {
      p.estimate[d] = predict(problem.x_test, d, coef.beta.row(d).transpose());
    }
  }
  for (double v : p.estimate) {
    if (!std::isfinite(v)) fail(ErrorKind::NumericalFailure, "non-finite estimate");
  }
  p.donors_used = std::move(sel.donors);
  p.training_columns_used = std::move(sel.training_columns);
  return p;
}

SolverSettings with_cutoff(double cutoff) {
  SolverSettings s;
  s.svd_cutoff_factor = cutoff;
  return s;
}

Prediction dispatch(const IncompleteTensor& t, const TargetQuery& target,
                    const EstimatorConfig& cfg) {
  switch (cfg.kind) {
    case EstimatorKind::MeanOverA: return mean_over_a(t, target);
    case EstimatorKind::MeanOverB: return mean_over_b(t, target);
    case EstimatorKind::TwoWayMean: return two_way_mean(t, target);
    case EstimatorKind::FixedActionEffect:
      return fixed_action_effect(t, target, *cfg.control_index);
    case EstimatorKind::SI_A:
      return si_a(t, target, cfg.k, cfg.solver.svd_cutoff_factor);
    case EstimatorKind::SI_C:
      return si_c(t, target, cfg.k, cfg.solver.svd_cutoff_factor);
    case EstimatorKind::GSI_AB:
      return gsi(t, target, cfg.k, Direction::RegressOverA,
                 cfg.solver.svd_cutoff_factor);
    case EstimatorKind::GSI_BA:
      return gsi(t, target, cfg.k, Direction::RegressOverB,
                 cfg.solver.svd_cutoff_factor);
    case EstimatorKind::GSIReg_AB:
      return gsi_regularized(t, target, cfg.k, Direction::RegressOverA, cfg.solver);
    case EstimatorKind::GSIReg_BA:
      return gsi_regularized(t, target, cfg.k, Direction::RegressOverB, cfg.solver);
  }
  fail(ErrorKind::InvalidArgument, "unknown estimator kind");
}

}  // namespace

std::string_view estimator_name(EstimatorKind kind) noexcept {
  for (const auto& nk : kCanonical) {
    if (nk.kind == kind) return nk.name;
  }
  return "unknown";
}

std::optional<EstimatorKind> parse_estimator(std::string_view name) {
  for (const auto& nk : kCanonical) {
    if (nk.name == name) return nk.kind;
  }
  for (const auto& nk : kAliases) {
    if (nk.name == name) return nk.kind;
  }
  return std::nullopt;
}

std::vector<EstimatorKind> all_estimator_kinds() {
  std::vector<EstimatorKind> out;
  for (const auto& nk : kCanonical) out.push_back(nk.kind);
  return out;
}

void EstimatorConfig::validate() const {
  if (k < 1) fail(ErrorKind::InvalidArgument, "k must be at least 1");
  const bool is_fae = kind == EstimatorKind::FixedActionEffect;
  if (is_fae != control_index.has_value()) {
    fail(ErrorKind::InvalidArgument,
         is_fae ? "fixed_action_effect requires a control index"
                : "control index is only valid for fixed_action_effect");
  }
  solver.validate();
}

std::string EstimatorConfig::label() const {
  std::string out(estimator_name(kind));
  switch (kind) {
    case EstimatorKind::SI_A:
    case EstimatorKind::SI_C:
    case EstimatorKind::GSI_AB:
    case EstimatorKind::GSI_BA:
      out += "[k=" + std::to_string(k) + "]";
      break;
    case EstimatorKind::GSIReg_AB:
    case EstimatorKind::GSIReg_BA:
      out += "[k=" + std::to_string(k) + ",lambda=" + format_double(solver.lambda) + "]";
      break;
    default:
      break;
  }
  if (standardize) out += "[std]";
  return out;
}

Standardizer Standardizer::fit(const IncompleteTensor& t) {
  const Index dim = t.dim();
  Standardizer s;
  s.mean.assign(dim, 0.0);
  s.scale.assign(dim, 1.0);
  Index n = 0;
  for (Index i = 0; i < t.n_a(); ++i) {
    for (Index j = 0; j < t.n_b(); ++j) {
      if (!t.observed(i, j)) continue;
      ++n;
      for (Index d = 0; d < dim; ++d) s.mean[d] += t.value(i, j, d);
    }
  }
  if (n == 0) fail(ErrorKind::InvalidArgument, "tensor has no observed entries");
  for (double& m : s.mean) m /= static_cast<double>(n);
  std::vector<double> var(dim, 0.0);
  for (Index i = 0; i < t.n_a(); ++i) {
    for (Index j = 0; j < t.n_b(); ++j) {
      if (!t.observed(i, j)) continue;
      for (Index d = 0; d < dim; ++d) {
        const double r = t.value(i, j, d) - s.mean[d];
        var[d] += r * r;
      }
    }
  }
  for (Index d = 0; d < dim; ++d) {
    const double sd = std::sqrt(var[d] / static_cast<double>(n));
    s.scale[d] = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

IncompleteTensor Standardizer::apply(const IncompleteTensor& t) const {
  const Index dim = t.dim();
  std::vector<double> vals(t.raw_values().begin(), t.raw_values().end());
  std::vector<std::uint8_t> mask(t.mask().begin(), t.mask().end());
  for (Index c = 0; c < mask.size(); ++c) {
    for (Index d = 0; d < dim; ++d) {
      double& v = vals[c * dim + d];
      v = mask[c] ? (v - mean[d]) / scale[d] : 0.0;
    }
  }
  return IncompleteTensor(t.n_a(), t.n_b(), dim, std::move(vals), std::move(mask));
}

std::vector<double> Standardizer::forward(std::span<const double> v) const {
  std::vector<double> out(v.size());
  for (Index d = 0; d < v.size(); ++d) out[d] = (v[d] - mean[d]) / scale[d];
  return out;
}

std::vector<double> Standardizer::inverse(std::span<const double> z) const {
  std::vector<double> out(z.size());
  for (Index d = 0; d < z.size(); ++d) out[d] = z[d] * scale[d] + mean[d];
  return out;
}

Prediction mean_over_a(const IncompleteTensor& t, const TargetQuery& target) {
  t.check_index(target.a_index, target.b_index);
  const OrientedView view(t, Direction::RegressOverB);
  return row_mean(view, target.b_index, target.a_index);
}

Prediction mean_over_b(const IncompleteTensor& t, const TargetQuery& target) {
  t.check_index(target.a_index, target.b_index);
  const OrientedView view(t, Direction::RegressOverA);
  return row_mean(view, target.a_index, target.b_index);
}

Prediction two_way_mean(const IncompleteTensor& t, const TargetQuery& target) {
  const Prediction col = mean_over_a(t, target);
  const Prediction row = mean_over_b(t, target);
  const Index dim = t.dim();
  std::vector<double> grand(dim, 0.0);
  Index n = 0;
  for (Index i = 0; i < t.n_a(); ++i) {
    for (Index j = 0; j < t.n_b(); ++j) {
      if (!t.observed(i, j) || (i == target.a_index && j == target.b_index)) continue;
      ++n;
      for (Index d = 0; d < dim; ++d) grand[d] += t.value(i, j, d);
    }
  }
  Prediction p;
  p.estimate.resize(dim);
  for (Index d = 0; d < dim; ++d) {
    p.estimate[d] = row.estimate[d] + col.estimate[d] - grand[d] / static_cast<double>(n);
  }
  p.donors_used = col.donors_used;
  p.training_columns_used = row.donors_used;
  return p;
}

Prediction fixed_action_effect(const IncompleteTensor& t, const TargetQuery& target,
                               Index control_index) {
  t.check_index(target.a_index, target.b_index);
  const Index i = target.a_index;
  const Index j = target.b_index;
  const Index a0 = control_index;
  if (a0 >= t.n_a()) fail(ErrorKind::InvalidArgument, "control index out of range");
  if (a0 == i || !t.observed(a0, j)) {
    fail(ErrorKind::MissingControl, "control entry for the target column is unobserved");
  }
  const Index dim = t.dim();
  std::vector<double> offset(dim, 0.0);
  Prediction p;
  for (Index c = 0; c < t.n_b(); ++c) {
    if (c == j || !t.observed(i, c) || !t.observed(a0, c)) continue;
    p.training_columns_used.push_back(c);
    for (Index d = 0; d < dim; ++d) offset[d] += t.value(i, c, d) - t.value(a0, c, d);
  }
  if (p.training_columns_used.empty()) {
    fail(ErrorKind::MissingControl, "target row shares no observed column with control");
  }
  const double n = static_cast<double>(p.training_columns_used.size());
  p.estimate.resize(dim);
  for (Index d = 0; d < dim; ++d) p.estimate[d] = t.value(a0, j, d) + offset[d] / n;
  p.donors_used = {a0};
  return p;
}

Prediction si_a(const IncompleteTensor& t, const TargetQuery& target, Index k,
                double cutoff_factor) {
  return synthetic_fit(t, target, k, Direction::RegressOverA, FitMode::Shared,
                       with_cutoff(cutoff_factor));
}

Prediction si_c(const IncompleteTensor& t, const TargetQuery& target, Index k,
                double cutoff_factor) {
  return synthetic_fit(t, target, k, Direction::RegressOverB, FitMode::Shared,
                       with_cutoff(cutoff_factor));
}

Prediction gsi(const IncompleteTensor& t, const TargetQuery& target, Index k,
               Direction direction, double cutoff_factor) {
  return synthetic_fit(t, target, k, direction, FitMode::PerDimension,
                       with_cutoff(cutoff_factor));
}

Prediction gsi_regularized(const IncompleteTensor& t, const TargetQuery& target,
                           Index k, Direction direction,
                           const SolverSettings& solver) {
  return synthetic_fit(t, target, k, direction, FitMode::Regularized, solver);
}

ScaledPrediction estimate_scaled(const IncompleteTensor& tensor,
                                 const TargetQuery& target,
                                 const EstimatorConfig& config) {
  config.validate();
  require_unobserved(tensor, target);
  ScaledPrediction out;
  if (!config.standardize) {
    out.prediction = dispatch(tensor, target, config);
    return out;
  }
  Standardizer scaler = Standardizer::fit(tensor);
  out.prediction = dispatch(scaler.apply(tensor), target, config);
  out.prediction.estimate = scaler.inverse(out.prediction.estimate);
  out.scaler = std::move(scaler);
  return out;
}

Prediction estimate(const IncompleteTensor& tensor, const TargetQuery& target,
                    const EstimatorConfig& config) {
  return estimate_scaled(tensor, target, config).prediction;
}

}  // namespace gsi
