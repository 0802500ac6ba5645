#ifndef EFFHAM_MATRIX_HPP
#define EFFHAM_MATRIX_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "effham/errors.hpp"

namespace effham {

using Complex = std::complex<double>;

/// Dense complex matrix in binary64 precision, row-major storage.
///
/// Sized for the problems at hand (dimension up to a few tens); everything
/// is plain loops over contiguous storage, no blocking, no views.
class Matrix {
 public:
  Matrix() = default;

  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}

  /// Row-by-row construction, mainly for tests and presets.
  Matrix(std::initializer_list<std::initializer_list<Complex>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
      if (row.size() != cols_) throw IndexError("ragged matrix initializer");
      for (const Complex& v : row) data_.push_back(v);
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix real_diagonal(std::span<const double> d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  static Matrix column(std::span<const Complex> v) {
    Matrix m(v.size(), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  /// Entries in row-major order.
  std::span<const Complex> data() const { return data_; }

  Matrix adjoint() const {
    Matrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
  }

  Matrix operator+(const Matrix& o) const {
    require_same_shape(o, "+");
    Matrix out = *this;
    for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] += o.data_[k];
    return out;
  }

  Matrix operator-(const Matrix& o) const {
    require_same_shape(o, "-");
    Matrix out = *this;
    for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] -= o.data_[k];
    return out;
  }

  Matrix operator-() const {
    Matrix out = *this;
    for (Complex& v : out.data_) v = -v;
    return out;
  }

  Matrix& operator+=(const Matrix& o) {
    require_same_shape(o, "+=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }

  Matrix operator*(const Matrix& o) const {
    if (cols_ != o.rows_)
      throw IndexError("matrix product shape mismatch: " + shape_string() + " * " +
                       o.shape_string());
    Matrix out(rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t k = 0; k < cols_; ++k) {
        const Complex a = (*this)(i, k);
        if (a == 0.0) continue;
        for (std::size_t j = 0; j < o.cols_; ++j) out(i, j) += a * o(k, j);
      }
    return out;
  }

  friend Matrix operator*(const Complex& s, const Matrix& m) {
    Matrix out = m;
    for (Complex& v : out.data_) v *= s;
    return out;
  }
  friend Matrix operator*(double s, const Matrix& m) { return Complex(s) * m; }
  Matrix operator*(double s) const { return Complex(s) * *this; }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  /// Largest entry modulus.
  double max_abs() const {
    double m = 0.0;
    for (const Complex& v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  double frobenius() const {
    double s = 0.0;
    for (const Complex& v : data_) s += std::norm(v);
    return std::sqrt(s);
  }

  bool all_finite() const {
    for (const Complex& v : data_)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
  }

  void require_finite(const std::string& what) const {
    if (!all_finite()) throw InvalidValue(what + ": non-finite matrix entry");
  }

  /// max-norm test of A against its adjoint, relative to 1 + max|A|.
  bool is_hermitian(double rel_tol = 1e-10) const {
    if (!is_square()) return false;
    double dev = 0.0;
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = i; j < cols_; ++j)
        dev = std::max(dev, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return dev <= rel_tol * (1.0 + max_abs());
  }

  /// (A + A†)/2; removes round-off drift from assembled Hamiltonians.
  Matrix hermitized() const {
    Matrix out(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j)
        out(i, j) = 0.5 * ((*this)(i, j) + std::conj((*this)(j, i)));
    return out;
  }

  Matrix submatrix(std::span<const std::size_t> row_idx,
                   std::span<const std::size_t> col_idx) const {
    Matrix out(row_idx.size(), col_idx.size());
    for (std::size_t i = 0; i < row_idx.size(); ++i) {
      if (row_idx[i] >= rows_) throw IndexError("row index out of range");
      for (std::size_t j = 0; j < col_idx.size(); ++j) {
        if (col_idx[j] >= cols_) throw IndexError("column index out of range");
        out(i, j) = (*this)(row_idx[i], col_idx[j]);
      }
    }
    return out;
  }

  std::string shape_string() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
  }

 private:
  void require_same_shape(const Matrix& o, const char* op) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw IndexError(std::string("shape mismatch in ") + op + ": " + shape_string() +
                       " vs " + o.shape_string());
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).max_abs(); }

}  // namespace effham

#endif  // EFFHAM_MATRIX_HPP
