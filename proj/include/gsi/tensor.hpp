#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace gsi {

using Index = std::size_t;
using IndexList = std::vector<Index>;

/// Dense n_a x n_b x dim interaction tensor with an n_a x n_b observation
/// mask. Values at unobserved cells are storage only and never read.
///
/// The value buffer is shared between copies (copy-on-write) so masking a
/// single cell for evaluation costs one mask copy, not a tensor copy.
class IncompleteTensor {
 public:
  IncompleteTensor() = default;
  IncompleteTensor(Index n_a, Index n_b, Index dim);
  /// `values` is row-major [(i * n_b + j) * dim + d]; `observed` is [i * n_b + j].
  IncompleteTensor(Index n_a, Index n_b, Index dim, std::vector<double> values,
                   std::vector<std::uint8_t> observed);

  Index n_a() const noexcept { return n_a_; }
  Index n_b() const noexcept { return n_b_; }
  Index dim() const noexcept { return dim_; }

  bool observed(Index i, Index j) const noexcept {
    return observed_[i * n_b_ + j] != 0;
  }
  std::span<const double> cell(Index i, Index j) const noexcept {
    return {values_->data() + (i * n_b_ + j) * dim_, dim_};
  }
  double value(Index i, Index j, Index d) const noexcept {
    return (*values_)[(i * n_b_ + j) * dim_ + d];
  }

  /// Stores `v` at (i, j) and marks the cell observed. Entries must be finite.
  void set(Index i, Index j, std::span<const double> v);
  void set_observed(Index i, Index j, bool flag);

  /// Copy with (i, j) marked unobserved; shares the value buffer.
  IncompleteTensor hidden(Index i, Index j) const;
  /// Axis-swapped copy: result(j, i) == this(i, j).
  IncompleteTensor transposed() const;

  Index observed_in_row(Index i) const noexcept;
  Index observed_in_col(Index j) const noexcept;
  Index observed_count() const noexcept;

  std::span<const std::uint8_t> mask() const noexcept { return observed_; }
  std::span<const double> raw_values() const noexcept { return *values_; }

  void check_index(Index i, Index j) const;

 private:
  Index n_a_ = 0;
  Index n_b_ = 0;
  Index dim_ = 0;
  std::shared_ptr<std::vector<double>> values_ =
      std::make_shared<std::vector<double>>();
  std::vector<std::uint8_t> observed_;
};

enum class Direction { RegressOverA, RegressOverB };

struct TargetQuery {
  Index a_index = 0;
  Index b_index = 0;
  Direction direction = Direction::RegressOverA;
};

/// Read-only view that presents the tensor with the regression axis as rows.
/// For RegressOverB rows are elements of B and columns are elements of A, so
/// every selection routine is written once against (row, col).
class OrientedView {
 public:
  OrientedView(const IncompleteTensor& t, Direction dir) : t_(&t), dir_(dir) {}

  Index rows() const noexcept {
    return dir_ == Direction::RegressOverA ? t_->n_a() : t_->n_b();
  }
  Index cols() const noexcept {
    return dir_ == Direction::RegressOverA ? t_->n_b() : t_->n_a();
  }
  Index dim() const noexcept { return t_->dim(); }
  bool observed(Index r, Index c) const noexcept {
    return dir_ == Direction::RegressOverA ? t_->observed(r, c)
                                           : t_->observed(c, r);
  }
  double value(Index r, Index c, Index d) const noexcept {
    return dir_ == Direction::RegressOverA ? t_->value(r, c, d)
                                           : t_->value(c, r, d);
  }
  Index observed_in_row(Index r) const noexcept {
    return dir_ == Direction::RegressOverA ? t_->observed_in_row(r)
                                           : t_->observed_in_col(r);
  }

  /// Target row/col for a query in this orientation.
  Index target_row(const TargetQuery& q) const noexcept {
    return dir_ == Direction::RegressOverA ? q.a_index : q.b_index;
  }
  Index target_col(const TargetQuery& q) const noexcept {
    return dir_ == Direction::RegressOverA ? q.b_index : q.a_index;
  }

 private:
  const IncompleteTensor* t_;
  Direction dir_;
};

}  // namespace gsi
