#include "gsi/selection.hpp"

#include <algorithm>
#include <string>

#include "gsi/error.hpp"

namespace gsi {

namespace {

void check_target(const IncompleteTensor& tensor, const TargetQuery& target) {
  tensor.check_index(target.a_index, target.b_index);
}

// Target row's observed columns, minus the target column.
IndexList target_columns(const OrientedView& view, Index row, Index col) {
  IndexList cols;
  for (Index c = 0; c < view.cols(); ++c) {
    if (c != col && view.observed(row, c)) cols.push_back(c);
  }
  return cols;
}

IndexList restrict_to_row(const OrientedView& view, const IndexList& cols,
                          Index row) {
  IndexList out;
  out.reserve(cols.size());
  for (Index c : cols) {
    if (view.observed(row, c)) out.push_back(c);
  }
  return out;
}

}  // namespace

IndexList donor_set(const IncompleteTensor& tensor, const TargetQuery& target) {
  check_target(tensor, target);
  const OrientedView view(tensor, target.direction);
  const Index row = view.target_row(target);
  const Index col = view.target_col(target);
  IndexList donors;
  for (Index r = 0; r < view.rows(); ++r) {
    if (r != row && view.observed(r, col)) donors.push_back(r);
  }
  if (donors.empty()) {
    fail(ErrorKind::EmptyDonorSet,
         "no donors observed for target (" + std::to_string(target.a_index) +
             ", " + std::to_string(target.b_index) + ")");
  }
  return donors;
}

IndexList training_columns(const IncompleteTensor& tensor,
                           const TargetQuery& target, const IndexList& donors) {
  check_target(tensor, target);
  if (donors.empty()) {
    fail(ErrorKind::InvalidArgument, "training_columns needs at least one donor");
  }
  const OrientedView view(tensor, target.direction);
  IndexList cols =
      target_columns(view, view.target_row(target), view.target_col(target));
  for (Index r : donors) cols = restrict_to_row(view, cols, r);
  if (cols.empty()) {
    fail(ErrorKind::EmptyTrainingSet, "donors share no observed training column");
  }
  return cols;
}

DonorSelection greedy_donor_selection(const IncompleteTensor& tensor,
                                      const TargetQuery& target, Index k) {
  if (k < 1) fail(ErrorKind::InvalidArgument, "k must be at least 1");
  IndexList candidates = donor_set(tensor, target);
  const OrientedView view(tensor, target.direction);

  std::vector<Index> counts(view.rows(), 0);
  for (Index r : candidates) counts[r] = view.observed_in_row(r);
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](Index x, Index y) { return counts[x] > counts[y]; });

  DonorSelection sel;
  sel.training_columns =
      target_columns(view, view.target_row(target), view.target_col(target));
  for (Index r : candidates) {
    IndexList next = restrict_to_row(view, sel.training_columns, r);
    if (next.size() < k) break;
    sel.donors.push_back(r);
    sel.training_columns = std::move(next);
  }
  if (sel.donors.empty()) {
    fail(ErrorKind::InfeasibleK,
         "best donor leaves fewer than k=" + std::to_string(k) +
             " training columns");
  }
  return sel;
}

RegressionProblem assemble_problem(const IncompleteTensor& tensor,
                                   const TargetQuery& target,
                                   const DonorSelection& selection) {
  check_target(tensor, target);
  const OrientedView view(tensor, target.direction);
  const Index row = view.target_row(target);
  const Index col = view.target_col(target);
  const Index dim = view.dim();
  const Index nc = selection.training_columns.size();
  const Index nk = selection.donors.size();

  RegressionProblem p;
  p.x_train.assign(dim, Eigen::MatrixXd(nc, nk));
  p.y_train.resize(nc, dim);
  p.x_test.resize(nk, dim);
  for (Index c = 0; c < nc; ++c) {
    const Index tc = selection.training_columns[c];
    for (Index d = 0; d < dim; ++d) {
      p.y_train(c, d) = view.value(row, tc, d);
      for (Index k = 0; k < nk; ++k) {
        p.x_train[d](c, k) = view.value(selection.donors[k], tc, d);
      }
    }
  }
  for (Index k = 0; k < nk; ++k) {
    for (Index d = 0; d < dim; ++d) {
      p.x_test(k, d) = view.value(selection.donors[k], col, d);
    }
  }
  return p;
}

}  // namespace gsi
