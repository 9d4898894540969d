#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace somdsa {

// Dense row-major matrix of doubles. Plain value type, no views into
// foreign storage.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows),
        cols_(cols),
        v_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols),
           fill) {
    assert(rows >= 0 && cols >= 0);
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int r, int c) { return v_[idx(r, c)]; }
  double operator()(int r, int c) const { return v_[idx(r, c)]; }

  std::span<double> row(int r) {
    return {v_.data() + idx(r, 0), static_cast<std::size_t>(cols_)};
  }
  std::span<const double> row(int r) const {
    return {v_.data() + idx(r, 0), static_cast<std::size_t>(cols_)};
  }

  bool same_shape(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }

  double max_abs_diff(const Matrix& o) const {
    assert(same_shape(o));
    double m = 0.0;
    for (std::size_t i = 0; i < v_.size(); ++i) {
      m = std::max(m, std::fabs(v_[i] - o.v_[i]));
    }
    return m;
  }

  bool operator==(const Matrix& o) const = default;

 private:
  std::size_t idx(int r, int c) const {
    assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
    return static_cast<std::size_t>(r) * cols_ + c;
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> v_;
};

}  // namespace somdsa
