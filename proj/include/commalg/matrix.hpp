#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "commalg/scalar.hpp"

namespace commalg {

/// Dense row-major matrix over one scalar domain. Products keep the order of
/// scalar factors, so the same code serves noncommutative entries.
template <class S>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, const S& fill)
      : rows_(rows), cols_(cols), data_(rows * cols, fill), zero_(fill) {}

  static Matrix zeros(const Domain<S>& d, std::size_t rows, std::size_t cols) {
    return Matrix(rows, cols, d.zero());
  }
  static Matrix identity(const Domain<S>& d, std::size_t n) {
    Matrix m(n, n, d.zero());
    for (std::size_t i = 0; i < n; ++i) m(i, i) = d.one();
    return m;
  }
  static Matrix scalar(const Domain<S>& d, std::size_t n, const S& s) {
    Matrix m(n, n, d.zero());
    for (std::size_t i = 0; i < n; ++i) m(i, i) = s;
    return m;
  }
  static Matrix diagonal(const Domain<S>& d, const std::vector<S>& entries) {
    Matrix m(entries.size(), entries.size(), d.zero());
    for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
    return m;
  }
  /// e_{ij} with 0-based indices.
  static Matrix unit(const Domain<S>& d, std::size_t n, std::size_t i, std::size_t j) {
    Matrix m(n, n, d.zero());
    m(i, j) = d.one();
    return m;
  }
  static Matrix from_rows(const Domain<S>& d, const std::vector<std::vector<S>>& rows) {
    require(!rows.empty(), Errc::ShapeMismatch, "matrix needs at least one row");
    Matrix m(rows.size(), rows.front().size(), d.zero());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      require(rows[i].size() == m.cols_, Errc::ShapeMismatch, "ragged matrix rows");
      for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }
  const S& zero() const { return zero_; }

  S& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const S& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const std::vector<S>& data() const { return data_; }

  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    require(r0 + nr <= rows_ && c0 + nc <= cols_, Errc::ShapeMismatch, "block out of range");
    Matrix m(nr, nc, zero_);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) m(i, j) = (*this)(r0 + i, c0 + j);
    return m;
  }
  void set_block(std::size_t r0, std::size_t c0, const Matrix& b) {
    require(r0 + b.rows_ <= rows_ && c0 + b.cols_ <= cols_, Errc::ShapeMismatch,
            "block out of range");
    for (std::size_t i = 0; i < b.rows_; ++i)
      for (std::size_t j = 0; j < b.cols_; ++j) (*this)(r0 + i, c0 + j) = b(i, j);
  }
  Matrix column(std::size_t j) const { return block(0, j, rows_, 1); }
  Matrix row(std::size_t i) const { return block(i, 0, 1, cols_); }

  Matrix transpose() const {
    Matrix m(cols_, rows_, zero_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
    return m;
  }

  /// Structural equality (exact comparison of entries).
  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  Matrix& operator+=(const Matrix& b) {
    check_same_shape(b);
    for (std::size_t t = 0; t < data_.size(); ++t) data_[t] = data_[t] + b.data_[t];
    return *this;
  }
  Matrix& operator-=(const Matrix& b) {
    check_same_shape(b);
    for (std::size_t t = 0; t < data_.size(); ++t) data_[t] = data_[t] - b.data_[t];
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator-(Matrix a) {
    for (auto& x : a.data_) x = -x;
    return a;
  }
  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    require(a.cols_ == b.rows_, Errc::ShapeMismatch,
            "cannot multiply " + a.shape() + " by " + b.shape());
    Matrix m(a.rows_, b.cols_, a.zero_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const S& aik = a(i, k);
        for (std::size_t j = 0; j < b.cols_; ++j) m(i, j) = m(i, j) + aik * b(k, j);
      }
    return m;
  }
  /// Left scalar multiple s * A (entries s * a_ij).
  friend Matrix operator*(const S& s, Matrix a) {
    for (auto& x : a.data_) x = s * x;
    return a;
  }
  /// Right scalar multiple A * s (entries a_ij * s).
  friend Matrix operator*(Matrix a, const S& s) {
    for (auto& x : a.data_) x = x * s;
    return a;
  }

  std::string shape() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

 private:
  void check_same_shape(const Matrix& b) const {
    require(rows_ == b.rows_ && cols_ == b.cols_, Errc::ShapeMismatch,
            shape() + " vs " + b.shape());
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<S> data_;
  S zero_{};
};

template <class S>
Matrix<S> direct_sum(const Matrix<S>& a, const Matrix<S>& b) {
  Matrix<S> m(a.rows() + b.rows(), a.cols() + b.cols(), a.rows() ? a.zero() : b.zero());
  m.set_block(0, 0, a);
  m.set_block(a.rows(), a.cols(), b);
  return m;
}

template <class S>
Matrix<S> hstack(const Matrix<S>& a, const Matrix<S>& b) {
  require(a.rows() == b.rows(), Errc::ShapeMismatch, "hstack row mismatch");
  Matrix<S> m(a.rows(), a.cols() + b.cols(), a.zero());
  m.set_block(0, 0, a);
  m.set_block(0, a.cols(), b);
  return m;
}

template <class S>
Matrix<S> vstack(const Matrix<S>& a, const Matrix<S>& b) {
  require(a.cols() == b.cols(), Errc::ShapeMismatch, "vstack column mismatch");
  Matrix<S> m(a.rows() + b.rows(), a.cols(), a.zero());
  m.set_block(0, 0, a);
  m.set_block(a.rows(), 0, b);
  return m;
}

/// [[a, b], [c, d]] from four blocks with matching shapes.
template <class S>
Matrix<S> block2x2(const Matrix<S>& a, const Matrix<S>& b, const Matrix<S>& c,
                   const Matrix<S>& d) {
  return vstack(hstack(a, b), hstack(c, d));
}

template <class S>
Matrix<S> commutator(const Matrix<S>& a, const Matrix<S>& b) {
  require(a.square() && b.square() && a.rows() == b.rows(), Errc::ShapeMismatch,
          "commutator needs equal square sizes");
  return a * b - b * a;
}

template <class S>
S trace(const Matrix<S>& a) {
  require(a.square(), Errc::ShapeMismatch, "trace of non-square matrix");
  S t = a.zero();
  for (std::size_t i = 0; i < a.rows(); ++i) t = t + a(i, i);
  return t;
}

template <class S>
Matrix<S> map_entries(const Matrix<S>& a, auto&& fn) {
  Matrix<S> m = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = fn(a(i, j));
  return m;
}

/// Reversal permutation J (anti-identity); J M J turns lower triangular into upper.
template <class S>
Matrix<S> reversal(const Domain<S>& d, std::size_t n) {
  Matrix<S> j(n, n, d.zero());
  for (std::size_t i = 0; i < n; ++i) j(i, n - 1 - i) = d.one();
  return j;
}

template <class S>
bool is_zero_matrix(const Domain<S>& d, const Matrix<S>& a) {
  for (const auto& x : a.data())
    if (!d.is_zero(x)) return false;
  return true;
}

template <class S>
double max_norm(const Domain<S>& d, const Matrix<S>& a) {
  double m = 0.0;
  for (const auto& x : a.data()) m = std::max(m, d.magnitude(x));
  return m;
}

/// max |a_ij - b_ij| / max(1, max|a_ij|). Exact domains return 0 or 1.
template <class S>
double relative_residual(const Domain<S>& d, const Matrix<S>& reference, const Matrix<S>& other) {
  require(reference.rows() == other.rows() && reference.cols() == other.cols(),
          Errc::ShapeMismatch, "residual of mismatched shapes");
  if constexpr (Domain<S>::exact) {
    return reference == other ? 0.0 : 1.0;
  } else {
    double diff = 0.0;
    for (std::size_t t = 0; t < reference.data().size(); ++t)
      diff = std::max(diff, d.magnitude(reference.data()[t] - other.data()[t]));
    return diff / std::max(1.0, max_norm(d, reference));
  }
}

/// Exact equality on exact domains; entrywise tolerance scaled by max(1, ||A||) otherwise.
template <class S>
bool approx_equal(const Domain<S>& d, const Matrix<S>& a, const Matrix<S>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  if constexpr (Domain<S>::exact)
    return a == b;
  else
    return relative_residual(d, a, b) <= d.tolerance();
}

template <class S>
bool is_upper_triangular(const Domain<S>& d, const Matrix<S>& a) {
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < std::min(i, a.cols()); ++j)
      if (!d.is_zero(a(i, j))) return false;
  return true;
}

template <class S>
bool is_lower_triangular(const Domain<S>& d, const Matrix<S>& a) {
  return is_upper_triangular(d, a.transpose());
}

template <class S>
bool is_diagonal(const Domain<S>& d, const Matrix<S>& a) {
  return is_upper_triangular(d, a) && is_lower_triangular(d, a);
}

template <class S>
std::vector<S> diagonal_of(const Matrix<S>& a) {
  std::vector<S> out;
  for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) out.push_back(a(i, i));
  return out;
}

/// Converts entries between domains (e.g. rational quaternions to floats).
template <class To, class From>
Matrix<To> convert(const Matrix<From>& a, auto&& fn) {
  Matrix<To> m(a.rows(), a.cols(), fn(a.zero()));
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) m(i, j) = fn(a(i, j));
  return m;
}

}  // namespace commalg
