#pragma once

#include <vector>

#include <Eigen/Dense>

#include "gsi/selection.hpp"

namespace gsi {

struct SolverSettings {
  double lambda = 0.0;
  int max_iters = 2000;
  /// Dimensionless; the effective step at iteration t is
  /// initial_step / (sqrt(t) * L) with L the smooth-part Lipschitz constant.
  double initial_step = 0.1;
  double tolerance = 1e-8;
  double svd_cutoff_factor = 1e-12;

  void validate() const;
};

/// beta.row(d) is the weight vector of output dimension d.
struct CoefficientSet {
  Eigen::MatrixXd beta;
};

/// Minimum-norm least-squares solution via SVD. Singular values below
/// cutoff_factor * max(p, q) * sigma_max are dropped.
Eigen::VectorXd least_squares_min_norm(const Eigen::MatrixXd& x,
                                       const Eigen::VectorXd& y,
                                       double cutoff_factor = 1e-12);

/// Independent per-dimension min-norm fits.
CoefficientSet fit_unregularized(const RegressionProblem& problem,
                                 double cutoff_factor = 1e-12);

/// (1/|B|) sum_d ||X_d b_d - y_d||^2 + lambda * sum_{d1<d2} ||b_d1 - b_d2||.
double objective(const RegressionProblem& problem, const CoefficientSet& beta,
                 double lambda);

/// Subgradient of `objective`; pairwise terms at an exact tie contribute zero.
Eigen::MatrixXd objective_subgradient(const RegressionProblem& problem,
                                      const CoefficientSet& beta, double lambda);

struct FitTrace {
  std::vector<double> best_objective;  // one entry per iterate, starting at init
  int iterations = 0;
};

/// Subgradient descent on `objective` from the unregularized solution,
/// returning the best iterate. lambda == 0 returns the initialization.
CoefficientSet fit_regularized(const RegressionProblem& problem,
                               const SolverSettings& settings,
                               FitTrace* trace = nullptr);

}  // namespace gsi
