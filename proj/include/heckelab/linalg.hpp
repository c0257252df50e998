#pragma once
// Dense linear algebra sized for this project (matrices up to a few hundred
// rows): LU with partial pivoting, solves, inverse, and tolerance-based
// reduced row echelon for basis extraction. Templated on the entry type and
// valid for real and complex entries at either precision.

#include "heckelab/scalar.hpp"
#include <numeric>
#include <stdexcept>
#include <vector>

namespace heckelab::linalg {

template <class T> struct Matrix {
  int rows = 0, cols = 0;
  std::vector<T> a; // row-major

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), a(size_t(r) * size_t(c), T(0)) {}

  T& operator()(int i, int j) { return a[size_t(i) * cols + size_t(j)]; }
  const T& operator()(int i, int j) const {
    return a[size_t(i) * cols + size_t(j)];
  }

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }
};

template <class T> auto abs_of(const T& x) {
  using std::abs;
  return abs(x);
}

template <class T> Matrix<T> transpose(const Matrix<T>& m) {
  Matrix<T> out(m.cols, m.rows);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) out(j, i) = m(i, j);
  return out;
}

template <class T> Matrix<T> matmul(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.cols != b.rows) throw std::invalid_argument("matmul shape mismatch");
  Matrix<T> c(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int k = 0; k < a.cols; ++k) {
      const T& aik = a(i, k);
      for (int j = 0; j < b.cols; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

template <class T>
std::vector<T> matvec(const Matrix<T>& a, const std::vector<T>& x) {
  if (int(x.size()) != a.cols)
    throw std::invalid_argument("matvec shape mismatch");
  std::vector<T> y(size_t(a.rows), T(0));
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) y[size_t(i)] += a(i, j) * x[size_t(j)];
  return y;
}

// In-place LU factorization with partial pivoting; returns the row
// permutation applied (piv[i] = original index of row now at i).
// Throws on exact numerical singularity.
template <class T> std::vector<int> lu_factor(Matrix<T>& m) {
  if (m.rows != m.cols) throw std::invalid_argument("lu_factor needs square");
  int n = m.rows;
  std::vector<int> piv(static_cast<size_t>(n));
  std::iota(piv.begin(), piv.end(), 0);
  for (int k = 0; k < n; ++k) {
    int p = k;
    auto best = abs_of(m(k, k));
    for (int i = k + 1; i < n; ++i) {
      auto v = abs_of(m(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (!(best > 0))
      throw std::runtime_error("singular matrix in LU factorization");
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
      std::swap(piv[size_t(k)], piv[size_t(p)]);
    }
    for (int i = k + 1; i < n; ++i) {
      m(i, k) /= m(k, k);
      const T& lik = m(i, k);
      for (int j = k + 1; j < n; ++j) m(i, j) -= lik * m(k, j);
    }
  }
  return piv;
}

template <class T>
std::vector<T> lu_solve(const Matrix<T>& lu, const std::vector<int>& piv,
                        const std::vector<T>& b) {
  int n = lu.rows;
  if (int(b.size()) != n) throw std::invalid_argument("lu_solve shape");
  std::vector<T> x(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) x[size_t(i)] = b[size_t(piv[size_t(i)])];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) x[size_t(i)] -= lu(i, j) * x[size_t(j)];
  for (int i = n - 1; i >= 0; --i) {
    for (int j = i + 1; j < n; ++j) x[size_t(i)] -= lu(i, j) * x[size_t(j)];
    x[size_t(i)] /= lu(i, i);
  }
  return x;
}

template <class T>
std::vector<T> solve(Matrix<T> m, const std::vector<T>& b) {
  auto piv = lu_factor(m);
  return lu_solve(m, piv, b);
}

template <class T> Matrix<T> inverse(Matrix<T> m) {
  int n = m.rows;
  auto piv = lu_factor(m);
  Matrix<T> inv(n, n);
  std::vector<T> e(size_t(n), T(0));
  for (int j = 0; j < n; ++j) {
    e[size_t(j)] = T(1);
    auto col = lu_solve(m, piv, e);
    e[size_t(j)] = T(0);
    for (int i = 0; i < n; ++i) inv(i, j) = col[size_t(i)];
  }
  return inv;
}

struct EchelonResult {
  int rank = 0;
  std::vector<int> pivot_cols;
};

// Reduced row echelon with magnitude pivoting. Pivot decisions are made
// per column relative to that column's largest initial magnitude, so
// columns of very different scales (coefficient growth along a series)
// are handled uniformly. Entries below tol * column-scale count as zero.
template <class T>
EchelonResult reduced_row_echelon(Matrix<T>& m, double tol = 1e-12) {
  using RT = decltype(abs_of(T(0)));
  std::vector<RT> col_scale(size_t(m.cols), RT(0));
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) {
      auto v = abs_of(m(i, j));
      if (v > col_scale[size_t(j)]) col_scale[size_t(j)] = v;
    }
  EchelonResult res;
  int r = 0;
  for (int c = 0; c < m.cols && r < m.rows; ++c) {
    if (!(col_scale[size_t(c)] > 0)) continue;
    int p = r;
    auto best = abs_of(m(r, c));
    for (int i = r + 1; i < m.rows; ++i) {
      auto v = abs_of(m(i, c));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (!(best > RT(tol) * col_scale[size_t(c)])) continue;
    if (p != r)
      for (int j = 0; j < m.cols; ++j) std::swap(m(r, j), m(p, j));
    T d = m(r, c);
    for (int j = 0; j < m.cols; ++j) m(r, j) /= d;
    for (int i = 0; i < m.rows; ++i) {
      if (i == r) continue;
      T f = m(i, c);
      if (!(abs_of(f) > 0)) continue;
      for (int j = 0; j < m.cols; ++j) m(i, j) -= f * m(r, j);
    }
    res.pivot_cols.push_back(c);
    ++r;
  }
  res.rank = r;
  return res;
}

} // namespace heckelab::linalg
