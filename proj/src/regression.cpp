#include "gsi/regression.hpp"

#include <algorithm>
#include <cmath>

#include "gsi/error.hpp"

namespace gsi {

void SolverSettings::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    fail(ErrorKind::InvalidArgument, "lambda must be finite and non-negative");
  }
  if (max_iters < 1 || !(initial_step > 0.0) || !(tolerance > 0.0) ||
      !(svd_cutoff_factor > 0.0)) {
    fail(ErrorKind::InvalidArgument, "solver settings must be positive");
  }
}

Eigen::VectorXd least_squares_min_norm(const Eigen::MatrixXd& x,
                                       const Eigen::VectorXd& y,
                                       double cutoff_factor) {
  if (x.rows() < 1 || x.cols() < 1 || y.size() != x.rows()) {
    fail(ErrorKind::InvalidArgument, "least squares shape mismatch");
  }
  if (!x.allFinite() || !y.allFinite()) {
    fail(ErrorKind::NumericalFailure, "non-finite least squares input");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    fail(ErrorKind::NumericalFailure, "SVD did not converge");
  }
  const Eigen::VectorXd& s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  const double cut = cutoff_factor *
                     static_cast<double>(std::max(x.rows(), x.cols())) * smax;

  Eigen::VectorXd uty = svd.matrixU().transpose() * y;
  for (Eigen::Index r = 0; r < s.size(); ++r) {
    uty(r) = (s(r) > cut && s(r) > 0.0) ? uty(r) / s(r) : 0.0;
  }
  Eigen::VectorXd beta = svd.matrixV() * uty;
  if (!beta.allFinite()) {
    fail(ErrorKind::NumericalFailure, "non-finite least squares solution");
  }
  return beta;
}

CoefficientSet fit_unregularized(const RegressionProblem& problem,
                                 double cutoff_factor) {
  CoefficientSet out;
  out.beta.resize(problem.dim(), problem.n_donors());
  for (Index d = 0; d < problem.dim(); ++d) {
    out.beta.row(d) = least_squares_min_norm(problem.x_train[d],
                                             problem.y_train.col(d), cutoff_factor)
                          .transpose();
  }
  return out;
}

namespace {

double penalty(const Eigen::MatrixXd& beta) {
  double sum = 0.0;
  for (Eigen::Index p = 0; p < beta.rows(); ++p) {
    for (Eigen::Index q = p + 1; q < beta.rows(); ++q) {
      sum += (beta.row(p) - beta.row(q)).norm();
    }
  }
  return sum;
}

double loss(const RegressionProblem& problem, const Eigen::MatrixXd& beta) {
  double sum = 0.0;
  for (Index d = 0; d < problem.dim(); ++d) {
    sum += (problem.x_train[d] * beta.row(d).transpose() - problem.y_train.col(d))
               .squaredNorm();
  }
  return sum / static_cast<double>(problem.n_train());
}

Eigen::MatrixXd loss_gradient(const RegressionProblem& problem,
                              const Eigen::MatrixXd& beta) {
  Eigen::MatrixXd g(beta.rows(), beta.cols());
  const double scale = 2.0 / static_cast<double>(problem.n_train());
  for (Index d = 0; d < problem.dim(); ++d) {
    const Eigen::VectorXd r =
        problem.x_train[d] * beta.row(d).transpose() - problem.y_train.col(d);
    g.row(d) = scale * (problem.x_train[d].transpose() * r).transpose();
  }
  return g;
}

// Lipschitz constant of the smooth part: max_d (2/|B|) sigma_max(X_d)^2.
double smooth_lipschitz(const RegressionProblem& problem) {
  double l = 0.0;
  for (const auto& x : problem.x_train) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(x);
    const double s = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    l = std::max(l, 2.0 * s * s / static_cast<double>(problem.n_train()));
  }
  return l > 0.0 ? l : 1.0;
}

}  // namespace

double objective(const RegressionProblem& problem, const CoefficientSet& beta,
                 double lambda) {
  return loss(problem, beta.beta) + lambda * penalty(beta.beta);
}

Eigen::MatrixXd objective_subgradient(const RegressionProblem& problem,
                                      const CoefficientSet& beta, double lambda) {
  Eigen::MatrixXd g = loss_gradient(problem, beta.beta);
  const auto& b = beta.beta;
  for (Eigen::Index p = 0; p < b.rows(); ++p) {
    for (Eigen::Index q = p + 1; q < b.rows(); ++q) {
      const Eigen::RowVectorXd diff = b.row(p) - b.row(q);
      const double n = diff.norm();
      if (n == 0.0) continue;
      g.row(p) += lambda * diff / n;
      g.row(q) -= lambda * diff / n;
    }
  }
  return g;
}

CoefficientSet fit_regularized(const RegressionProblem& problem,
                               const SolverSettings& settings, FitTrace* trace) {
  settings.validate();
  CoefficientSet best = fit_unregularized(problem, settings.svd_cutoff_factor);
  const double initial = objective(problem, best, settings.lambda);
  if (trace) {
    trace->best_objective.assign(1, initial);
    trace->iterations = 0;
  }
  if (settings.lambda == 0.0) return best;

  const double lip = smooth_lipschitz(problem);
  double best_obj = initial;
  Eigen::MatrixXd beta = best.beta;
  const Eigen::Index dims = beta.rows();

  for (int t = 1; t <= settings.max_iters; ++t) {
    const double step = settings.initial_step / (std::sqrt(static_cast<double>(t)) * lip);
    beta -= step * loss_gradient(problem, beta);

    // Pairwise penalty steps; a pair that would cross its kink is merged at
    // its midpoint instead.
    const double shrink = step * settings.lambda;
    for (Eigen::Index p = 0; p < dims; ++p) {
      for (Eigen::Index q = p + 1; q < dims; ++q) {
        const Eigen::RowVectorXd diff = beta.row(p) - beta.row(q);
        const double n = diff.norm();
        if (n == 0.0) continue;
        if (shrink >= 0.5 * n) {
          const Eigen::RowVectorXd mid = 0.5 * (beta.row(p) + beta.row(q));
          beta.row(p) = mid;
          beta.row(q) = mid;
        } else {
          beta.row(p) -= (shrink / n) * diff;
          beta.row(q) += (shrink / n) * diff;
        }
      }
    }

    if (!beta.allFinite()) {
      fail(ErrorKind::NumericalFailure, "non-finite iterate in regularized fit");
    }
    const double obj = loss(problem, beta) + settings.lambda * penalty(beta);
    if (obj > 1e6 * initial) {
      fail(ErrorKind::DivergenceDetected, "regularized fit diverged");
    }
    bool stop = false;
    if (obj < best_obj) {
      const double gain = best_obj - obj;
      best_obj = obj;
      best.beta = beta;
      stop = gain < settings.tolerance * std::max(1.0, std::abs(best_obj));
    }
    if (trace) {
      trace->best_objective.push_back(best_obj);
      trace->iterations = t;
    }
    if (stop) break;
  }
  return best;
}

}  // namespace gsi
