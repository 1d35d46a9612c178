#pragma once

#include <vector>

#include "potts/rational.hpp"

namespace potts {

/// Dense matrix over the rationals, row-major. Sized for the symmetrized
/// bases that show up here (a few hundred rows), so plain Gaussian
/// elimination is fine.
class QMatrix {
 public:
  QMatrix() = default;
  QMatrix(int rows, int cols) : r_(rows), c_(cols), a_(std::size_t(rows) * cols, Rat(0)) {}

  int rows() const { return r_; }
  int cols() const { return c_; }
  Rat& at(int i, int j) { return a_[std::size_t(i) * c_ + j]; }
  const Rat& at(int i, int j) const { return a_[std::size_t(i) * c_ + j]; }

  static QMatrix identity(int n) {
    QMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  QMatrix operator*(const QMatrix& o) const {
    if (c_ != o.r_) throw invalid_input_error("QMatrix shape mismatch");
    QMatrix m(r_, o.c_);
    for (int i = 0; i < r_; ++i)
      for (int k = 0; k < c_; ++k) {
        const Rat& x = at(i, k);
        if (x == 0) continue;
        for (int j = 0; j < o.c_; ++j) {
          const Rat& y = o.at(k, j);
          if (y != 0) m.at(i, j) += x * y;
        }
      }
    return m;
  }

  bool operator==(const QMatrix& o) const { return r_ == o.r_ && c_ == o.c_ && a_ == o.a_; }

  /// In-place reduced row echelon form. Returns pivot column indices.
  std::vector<int> rref() {
    std::vector<int> pivots;
    int row = 0;
    for (int col = 0; col < c_ && row < r_; ++col) {
      int p = -1;
      for (int i = row; i < r_; ++i)
        if (at(i, col) != 0) {
          p = i;
          break;
        }
      if (p < 0) continue;
      if (p != row)
        for (int j = 0; j < c_; ++j) std::swap(at(p, j), at(row, j));
      Rat inv = Rat(1) / at(row, col);
      for (int j = col; j < c_; ++j) at(row, j) *= inv;
      for (int i = 0; i < r_; ++i) {
        if (i == row) continue;
        const Rat f = at(i, col);
        if (f == 0) continue;
        for (int j = col; j < c_; ++j) at(i, j) -= f * at(row, j);
      }
      pivots.push_back(col);
      ++row;
    }
    return pivots;
  }

  int rank() const {
    QMatrix t = *this;
    return static_cast<int>(t.rref().size());
  }

  /// Basis of the right kernel, one column vector per basis element.
  std::vector<std::vector<Rat>> kernel() const {
    QMatrix t = *this;
    std::vector<int> piv = t.rref();
    std::vector<bool> is_piv(c_, false);
    for (int p : piv) is_piv[p] = true;
    std::vector<std::vector<Rat>> basis;
    for (int free = 0; free < c_; ++free) {
      if (is_piv[free]) continue;
      std::vector<Rat> vec(c_, Rat(0));
      vec[free] = 1;
      for (std::size_t i = 0; i < piv.size(); ++i) vec[piv[i]] = -t.at(int(i), free);
      basis.push_back(std::move(vec));
    }
    return basis;
  }

  Rat det() const {
    if (r_ != c_) throw invalid_input_error("det of non-square matrix");
    QMatrix t = *this;
    Rat d(1);
    for (int col = 0; col < c_; ++col) {
      int p = -1;
      for (int i = col; i < r_; ++i)
        if (t.at(i, col) != 0) {
          p = i;
          break;
        }
      if (p < 0) return Rat(0);
      if (p != col) {
        for (int j = 0; j < c_; ++j) std::swap(t.at(p, j), t.at(col, j));
        d = -d;
      }
      d *= t.at(col, col);
      Rat inv = Rat(1) / t.at(col, col);
      for (int i = col + 1; i < r_; ++i) {
        const Rat f = t.at(i, col) * inv;
        if (f == 0) continue;
        for (int j = col; j < c_; ++j) t.at(i, j) -= f * t.at(col, j);
      }
    }
    return d;
  }

 private:
  int r_ = 0, c_ = 0;
  std::vector<Rat> a_;
};

/// Column-space basis of M: returns (basis columns, pivot row indices) with
/// the defining property basis[pivot_rows] = identity (reduced column
/// echelon), so coordinates w.r.t. the basis are read off the pivot rows.
inline void column_space_basis(const QMatrix& M, QMatrix* basis, std::vector<int>* pivot_rows) {
  // row-reduce the transpose
  QMatrix t(M.cols(), M.rows());
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j) t.at(j, i) = M.at(i, j);
  std::vector<int> piv = t.rref();
  int m = static_cast<int>(piv.size());
  *basis = QMatrix(M.rows(), m);
  for (int b = 0; b < m; ++b)
    for (int i = 0; i < M.rows(); ++i) basis->at(i, b) = t.at(b, i);
  *pivot_rows = piv;
}

}  // namespace potts
