#include "gsi/tensor.hpp"

#include <cmath>
#include <string>

#include "gsi/error.hpp"

namespace gsi {

IncompleteTensor::IncompleteTensor(Index n_a, Index n_b, Index dim)
    : n_a_(n_a),
      n_b_(n_b),
      dim_(dim),
      values_(std::make_shared<std::vector<double>>(n_a * n_b * dim, 0.0)),
      observed_(n_a * n_b, 0) {
  if (n_a == 0 || n_b == 0 || dim == 0) {
    fail(ErrorKind::InvalidArgument, "tensor extents must be positive");
  }
}

IncompleteTensor::IncompleteTensor(Index n_a, Index n_b, Index dim,
                                   std::vector<double> values,
                                   std::vector<std::uint8_t> observed)
    : n_a_(n_a),
      n_b_(n_b),
      dim_(dim),
      values_(std::make_shared<std::vector<double>>(std::move(values))),
      observed_(std::move(observed)) {
  if (n_a == 0 || n_b == 0 || dim == 0) {
    fail(ErrorKind::InvalidArgument, "tensor extents must be positive");
  }
  if (values_->size() != n_a * n_b * dim || observed_.size() != n_a * n_b) {
    fail(ErrorKind::InvalidArgument, "tensor buffer sizes do not match extents");
  }
  for (Index c = 0; c < observed_.size(); ++c) {
    if (!observed_[c]) continue;
    for (Index d = 0; d < dim; ++d) {
      if (!std::isfinite((*values_)[c * dim + d])) {
        fail(ErrorKind::InvalidArgument,
             "non-finite value at observed cell (" + std::to_string(c / n_b) +
                 ", " + std::to_string(c % n_b) + ")");
      }
    }
  }
}

void IncompleteTensor::check_index(Index i, Index j) const {
  if (i >= n_a_ || j >= n_b_) {
    fail(ErrorKind::InvalidArgument, "index (" + std::to_string(i) + ", " +
                                         std::to_string(j) + ") out of range");
  }
}

void IncompleteTensor::set(Index i, Index j, std::span<const double> v) {
  check_index(i, j);
  if (v.size() != dim_) {
    fail(ErrorKind::InvalidArgument, "cell vector has wrong dimension");
  }
  for (double x : v) {
    if (!std::isfinite(x)) {
      fail(ErrorKind::InvalidArgument, "observed values must be finite");
    }
  }
  if (values_.use_count() > 1) {
    values_ = std::make_shared<std::vector<double>>(*values_);
  }
  std::copy(v.begin(), v.end(), values_->begin() + (i * n_b_ + j) * dim_);
  observed_[i * n_b_ + j] = 1;
}

void IncompleteTensor::set_observed(Index i, Index j, bool flag) {
  check_index(i, j);
  observed_[i * n_b_ + j] = flag ? 1 : 0;
}

IncompleteTensor IncompleteTensor::hidden(Index i, Index j) const {
  check_index(i, j);
  IncompleteTensor out = *this;
  out.observed_[i * n_b_ + j] = 0;
  return out;
}

IncompleteTensor IncompleteTensor::transposed() const {
  std::vector<double> vals(values_->size());
  std::vector<std::uint8_t> obs(observed_.size());
  for (Index i = 0; i < n_a_; ++i) {
    for (Index j = 0; j < n_b_; ++j) {
      obs[j * n_a_ + i] = observed_[i * n_b_ + j];
      for (Index d = 0; d < dim_; ++d) {
        vals[(j * n_a_ + i) * dim_ + d] = (*values_)[(i * n_b_ + j) * dim_ + d];
      }
    }
  }
  IncompleteTensor out;
  out.n_a_ = n_b_;
  out.n_b_ = n_a_;
  out.dim_ = dim_;
  out.values_ = std::make_shared<std::vector<double>>(std::move(vals));
  out.observed_ = std::move(obs);
  return out;
}

Index IncompleteTensor::observed_in_row(Index i) const noexcept {
  Index n = 0;
  for (Index j = 0; j < n_b_; ++j) n += observed_[i * n_b_ + j];
  return n;
}

Index IncompleteTensor::observed_in_col(Index j) const noexcept {
  Index n = 0;
  for (Index i = 0; i < n_a_; ++i) n += observed_[i * n_b_ + j];
  return n;
}

Index IncompleteTensor::observed_count() const noexcept {
  Index n = 0;
  for (auto o : observed_) n += o;
  return n;
}

}  // namespace gsi
