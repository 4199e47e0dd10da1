#pragma once

#include <cassert>
#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <type_traits>
#include <vector>

#include "asep/error.hpp"

namespace asep {

/// Dense row-major matrix. All reductions in this project walk it in
/// row-major order so that results are bitwise reproducible.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T(0))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) noexcept {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }
  const T& operator()(std::size_t i, std::size_t j) const noexcept {
    assert(i < rows_ && j < cols_);
    return data_[i * cols_ + j];
  }

  std::span<T> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
  std::span<const T> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }

  std::span<const T> data() const noexcept { return data_; }
  std::span<T> data() noexcept { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using cplx = std::complex<double>;
using ComplexMatrix = Matrix<cplx>;

template <class T>
Matrix<T> multiply(const Matrix<T>& a, const Matrix<T>& b) {
  assert(a.cols() == b.rows());
  Matrix<T> c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const T aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

namespace detail {

template <class C>
auto magnitude(const C& z) {
  using std::abs;
  using std::sqrt;
  if constexpr (std::is_same_v<C, std::complex<double>>) {
    return std::abs(z);
  } else {
    // Scaled hypot; boost's complex128 abs trips a numeric_limits bug under C++20.
    using Real = std::decay_t<decltype(z.real())>;
    const Real a = abs(z.real()), b = abs(z.imag());
    const Real big = a > b ? a : b;
    if (big == Real(0)) return Real(0);
    const Real ra = a / big, rb = b / big;
    return Real(big * sqrt(ra * ra + rb * rb));
  }
}

}  // namespace detail

/// Determinant by LU factorization with row pivoting on the largest modulus.
/// Generic over the scalar so the extended-precision path reuses it.
template <class C>
C lu_determinant(Matrix<C> m) {
  if (!m.square()) throw Error(ErrorKind::invalid_argument, "determinant of a non-square matrix");
  const std::size_t n = m.rows();
  C det(1);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    auto best = detail::magnitude(m(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      auto mag = detail::magnitude(m(i, k));
      if (mag > best) {
        best = mag;
        piv = i;
      }
    }
    if (best == 0) throw Error(ErrorKind::singular, "zero pivot column in LU factorization");
    if (piv != k) {
      auto rk = m.row(k);
      auto rp = m.row(piv);
      for (std::size_t j = k; j < n; ++j) std::swap(rk[j], rp[j]);
      det = -det;
    }
    const C pivot = m(k, k);
    det *= pivot;
    for (std::size_t i = k + 1; i < n; ++i) {
      const C factor = m(i, k) / pivot;
      if (factor == C(0)) continue;
      auto ri = m.row(i);
      auto rk = m.row(k);
      for (std::size_t j = k + 1; j < n; ++j) ri[j] -= factor * rk[j];
    }
  }
  return det;
}

/// In-place Householder reduction to upper Hessenberg form. The result is
/// unitarily similar to the input, so det(I - mu H) = det(I - mu A).
template <class C>
void hessenberg_reduce(Matrix<C>& a) {
  using std::conj;
  using std::sqrt;
  using Real = decltype(detail::magnitude(C{}));
  const std::size_t n = a.rows();
  if (n < 3) return;
  std::vector<C> v(n);
  std::vector<C> tmp(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    Real norm2(0);
    for (std::size_t i = k + 1; i < n; ++i) {
      Real m = detail::magnitude(a(i, k));
      norm2 += m * m;
    }
    Real norm = sqrt(norm2);
    if (norm == 0) continue;
    const C x0 = a(k + 1, k);
    const Real x0_mag = detail::magnitude(x0);
    const C phase = x0_mag == 0 ? C(1) : x0 / x0_mag;
    const C alpha = -phase * norm;
    Real vnorm2(0);
    for (std::size_t i = k + 1; i < n; ++i) {
      v[i] = a(i, k);
      if (i == k + 1) v[i] -= alpha;
      Real m = detail::magnitude(v[i]);
      vnorm2 += m * m;
    }
    if (vnorm2 == 0) continue;
    const Real vnorm = sqrt(vnorm2);
    for (std::size_t i = k + 1; i < n; ++i) v[i] /= vnorm;

    // a <- (I - 2 v v^H) a, rows k+1.., columns k..
    for (std::size_t j = 0; j < n; ++j) tmp[j] = C(0);
    for (std::size_t i = k + 1; i < n; ++i) {
      const C cv = conj(v[i]);
      auto ri = a.row(i);
      for (std::size_t j = k; j < n; ++j) tmp[j] += cv * ri[j];
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const C s = C(2) * v[i];
      auto ri = a.row(i);
      for (std::size_t j = k; j < n; ++j) ri[j] -= s * tmp[j];
    }
    // a <- a (I - 2 v v^H), all rows, columns k+1..
    for (std::size_t i = 0; i < n; ++i) {
      auto ri = a.row(i);
      C dot(0);
      for (std::size_t j = k + 1; j < n; ++j) dot += ri[j] * v[j];
      dot *= C(2);
      for (std::size_t j = k + 1; j < n; ++j) ri[j] -= dot * conj(v[j]);
    }
    a(k + 1, k) = alpha;
    for (std::size_t i = k + 2; i < n; ++i) a(i, k) = C(0);
  }
}

/// det(I - mu H) for upper Hessenberg H, O(n^2) via adjacent-row pivoting.
/// `work` is scratch storage of n*n entries.
template <class C>
C hessenberg_shifted_det(const Matrix<C>& h, const C& mu, std::vector<C>& work) {
  const std::size_t n = h.rows();
  work.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j0 = i == 0 ? 0 : i - 1;
    for (std::size_t j = j0; j < n; ++j) {
      C v = -mu * h(i, j);
      if (i == j) v += C(1);
      work[i * n + j] = v;
    }
  }
  C det(1);
  for (std::size_t k = 0; k < n; ++k) {
    C* rk = work.data() + k * n;
    if (k + 1 < n) {
      C* rn = work.data() + (k + 1) * n;
      if (detail::magnitude(rn[k]) > detail::magnitude(rk[k])) {
        for (std::size_t j = k; j < n; ++j) std::swap(rk[j], rn[j]);
        det = -det;
      }
      if (rk[k] == C(0)) return C(0);
      const C factor = rn[k] / rk[k];
      if (factor != C(0))
        for (std::size_t j = k + 1; j < n; ++j) rn[j] -= factor * rk[j];
    }
    det *= rk[k];
  }
  return det;
}

}  // namespace asep
