#pragma once

#include <vector>

#include <Eigen/Dense>

#include "gsi/tensor.hpp"

namespace gsi {

/// Donors plus the training columns shared by every donor and the target.
/// In RegressOverB orientation "columns" are elements of A.
struct DonorSelection {
  IndexList donors;
  IndexList training_columns;
};

/// Regression slices for one target cell.
///   x_train[d] : |training| x |donors|
///   y_train    : |training| x dim
///   x_test     : |donors| x dim
struct RegressionProblem {
  std::vector<Eigen::MatrixXd> x_train;
  Eigen::MatrixXd y_train;
  Eigen::MatrixXd x_test;

  Index dim() const noexcept { return y_train.cols(); }
  Index n_train() const noexcept { return y_train.rows(); }
  Index n_donors() const noexcept { return x_test.rows(); }
};

/// Indices observed along the target's column (row for RegressOverB),
/// excluding the target itself, ascending. Throws EmptyDonorSet.
IndexList donor_set(const IncompleteTensor& tensor, const TargetQuery& target);

/// Columns observed for every donor and for the target row, excluding the
/// target column, ascending. Throws EmptyTrainingSet.
IndexList training_columns(const IncompleteTensor& tensor,
                           const TargetQuery& target, const IndexList& donors);

/// Adds donors in order of descending observation count (ties by index) and
/// stops right before the first addition that would leave fewer than `k`
/// training columns. Throws EmptyDonorSet / InfeasibleK.
DonorSelection greedy_donor_selection(const IncompleteTensor& tensor,
                                      const TargetQuery& target, Index k);

RegressionProblem assemble_problem(const IncompleteTensor& tensor,
                                   const TargetQuery& target,
                                   const DonorSelection& selection);

}  // namespace gsi
