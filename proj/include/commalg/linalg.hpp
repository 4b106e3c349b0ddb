#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <random>
#include <vector>

#include "commalg/matrix.hpp"

namespace commalg {

using Rng = std::mt19937_64;
inline constexpr std::uint64_t kDefaultSeed = 20250101;

template <class S>
struct Reduction {
  Matrix<S> reduced;    // reduced row-echelon form R
  Matrix<S> transform;  // P with P * A = R
  std::size_t rank = 0;
  std::vector<std::size_t> pivots;  // pivot column of each nonzero row
};

namespace detail {

template <class S>
double zero_threshold(const Domain<S>& d, const Matrix<S>& a) {
  if constexpr (Domain<S>::exact)
    return 0.0;
  else
    return d.tolerance() * std::max(1.0, max_norm(d, a));
}

template <class S>
bool negligible(const Domain<S>& d, const S& x, double threshold) {
  if constexpr (Domain<S>::exact)
    return d.is_zero(x);
  else
    return d.magnitude(x) <= threshold;
}

}  // namespace detail

/// Gauss-Jordan elimination with row operations applied on the left.
template <class S>
Reduction<S> row_reduce(const Domain<S>& d, const Matrix<S>& a) {
  const std::size_t m = a.rows(), n = a.cols();
  Matrix<S> r = a;
  Matrix<S> p = Matrix<S>::identity(d, m);
  const double thr = detail::zero_threshold(d, a);
  Reduction<S> out;
  std::size_t row = 0;
  for (std::size_t col = 0; col < n && row < m; ++col) {
    std::optional<std::size_t> piv;
    if constexpr (Domain<S>::exact) {
      for (std::size_t i = row; i < m; ++i)
        if (!d.is_zero(r(i, col))) {
          piv = i;
          break;
        }
    } else {
      double best = thr;
      for (std::size_t i = row; i < m; ++i) {
        double mag = d.magnitude(r(i, col));
        if (mag > best) {
          best = mag;
          piv = i;
        }
      }
    }
    if (!piv) {
      if constexpr (!Domain<S>::exact)
        for (std::size_t i = row; i < m; ++i) r(i, col) = d.zero();
      continue;
    }
    if (*piv != row)
      for (std::size_t j = 0; j < std::max(n, m); ++j) {
        if (j < n) std::swap(r(row, j), r(*piv, j));
        if (j < m) std::swap(p(row, j), p(*piv, j));
      }
    const S s = d.inv(r(row, col));
    for (std::size_t j = 0; j < n; ++j) r(row, j) = s * r(row, j);
    for (std::size_t j = 0; j < m; ++j) p(row, j) = s * p(row, j);
    r(row, col) = d.one();
    for (std::size_t i = 0; i < m; ++i) {
      if (i == row || d.is_zero(r(i, col))) continue;
      const S f = r(i, col);
      for (std::size_t j = 0; j < n; ++j) r(i, j) = r(i, j) - f * r(row, j);
      for (std::size_t j = 0; j < m; ++j) p(i, j) = p(i, j) - f * p(row, j);
      r(i, col) = d.zero();
    }
    out.pivots.push_back(col);
    ++row;
  }
  out.rank = row;
  out.reduced = std::move(r);
  out.transform = std::move(p);
  return out;
}

template <class S>
std::size_t rank(const Domain<S>& d, const Matrix<S>& a) {
  return row_reduce(d, a).rank;
}

template <class S>
bool is_invertible(const Domain<S>& d, const Matrix<S>& a) {
  return a.square() && rank(d, a) == a.rows();
}

template <class S>
Matrix<S> inverse(const Domain<S>& d, const Matrix<S>& a) {
  require(a.square(), Errc::ShapeMismatch, "inverse of " + a.shape() + " matrix");
  auto red = row_reduce(d, a);
  if (red.rank < a.rows())
    fail(Errc::Singular, "matrix has rank " + std::to_string(red.rank) + " < " +
                             std::to_string(a.rows()));
  return red.transform;
}

/// Columns spanning the right null space {v : A v = 0}.
template <class S>
Matrix<S> right_null_space(const Domain<S>& d, const Matrix<S>& a) {
  auto red = row_reduce(d, a);
  const std::size_t n = a.cols();
  std::vector<bool> is_pivot(n, false);
  for (auto c : red.pivots) is_pivot[c] = true;
  std::vector<std::size_t> free;
  for (std::size_t c = 0; c < n; ++c)
    if (!is_pivot[c]) free.push_back(c);
  Matrix<S> basis(n, free.size(), d.zero());
  for (std::size_t t = 0; t < free.size(); ++t) {
    basis(free[t], t) = d.one();
    for (std::size_t r = 0; r < red.pivots.size(); ++r)
      basis(red.pivots[r], t) = -red.reduced(r, free[t]);
  }
  return basis;
}

/// Solves A X = B for square invertible A.
template <class S>
Matrix<S> solve(const Domain<S>& d, const Matrix<S>& a, const Matrix<S>& b) {
  return inverse(d, a) * b;
}

/// Appends columns from `candidates` (default e_1..e_n) until the columns of
/// `cols` span the whole space. `cols` must have independent columns.
template <class S>
Matrix<S> complete_basis(const Domain<S>& d, const Matrix<S>& cols,
                         const std::vector<Matrix<S>>& candidates = {}) {
  const std::size_t n = cols.rows();
  Matrix<S> basis = cols;
  std::size_t r = cols.cols() ? rank(d, cols) : 0;
  require(r == cols.cols(), Errc::InvalidArgument, "basis seed columns are dependent");
  auto try_add = [&](const Matrix<S>& v) {
    if (basis.cols() == n) return;
    Matrix<S> ext = basis.cols() ? hstack(basis, v) : v;
    if (rank(d, ext) == basis.cols() + 1) basis = ext;
  };
  for (const auto& v : candidates) try_add(v);
  for (std::size_t i = 0; i < n && basis.cols() < n; ++i) {
    Matrix<S> e(n, 1, d.zero());
    e(i, 0) = d.one();
    try_add(e);
  }
  return basis;
}

/// Euclidean length of a column.
template <class S>
double column_norm(const Domain<S>& d, const Matrix<S>& v) {
  double s = 0.0;
  for (const auto& x : v.data()) {
    double m = d.magnitude(x);
    s += m * m;
  }
  return std::sqrt(s);
}

/// Extends `cols` by orthonormal vectors spanning its orthogonal complement
/// (Gram-Schmidt on e_1..e_n, largest residual first). Floating point only.
template <class S>
Matrix<S> orthogonal_completion(const Domain<S>& d, const Matrix<S>& cols) {
  static_assert(!Domain<S>::exact, "orthogonal_completion is for floating point");
  const std::size_t n = cols.rows();
  auto cj = [](const S& x) {
    if constexpr (Domain<S>::quaternion)
      return x.conj();
    else
      return x;
  };
  // <u, x> = sum conj(u_i) x_i; x - u <u, x> removes the u component (right span).
  auto project_out = [&](Matrix<S>& x, const Matrix<S>& u) {
    S ip = d.zero();
    for (std::size_t i = 0; i < n; ++i) ip = ip + cj(u(i, 0)) * x(i, 0);
    for (std::size_t i = 0; i < n; ++i) x(i, 0) = x(i, 0) - u(i, 0) * ip;
  };
  std::vector<Matrix<S>> ortho;
  auto add_ortho = [&](Matrix<S> x) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& u : ortho) project_out(x, u);
    double nx = column_norm(d, x);
    if (nx <= 1e-12) return false;
    x = x * S(1.0 / nx);
    ortho.push_back(x);
    return true;
  };
  for (std::size_t j = 0; j < cols.cols(); ++j)
    require(add_ortho(cols.column(j)), Errc::InvalidArgument, "basis seed columns are dependent");
  Matrix<S> basis = cols;
  while (basis.cols() < n) {
    Matrix<S> best;
    double best_norm = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      Matrix<S> e = basis_vector(d, n, i);
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& u : ortho) project_out(e, u);
      double ne = column_norm(d, e);
      if (ne > best_norm) {
        best_norm = ne;
        best = e;
      }
    }
    require(add_ortho(best), Errc::InvalidArgument, "orthogonal completion failed");
    basis = hstack(basis, ortho.back());
  }
  return basis;
}

template <class S>
Matrix<S> mult_commutator(const Domain<S>& d, const Matrix<S>& a, const Matrix<S>& b) {
  return a * b * inverse(d, a) * inverse(d, b);
}

/// P^-1 A P.
template <class S>
Matrix<S> conjugate(const Domain<S>& d, const Matrix<S>& a, const Matrix<S>& p) {
  return inverse(d, p) * a * p;
}

/// A = lambda I with lambda in the center.
template <class S>
bool is_central_matrix(const Domain<S>& d, const Matrix<S>& a) {
  if (!a.square()) return false;
  const S lam = a(0, 0);
  if (!d.is_central(lam)) return false;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (!d.is_zero(a(i, j) - (i == j ? lam : d.zero()))) return false;
  return true;
}

/// A = lambda I for some (possibly noncentral) scalar lambda.
template <class S>
bool is_scalar_matrix(const Domain<S>& d, const Matrix<S>& a) {
  if (!a.square()) return false;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (!d.is_zero(a(i, j) - (i == j ? a(0, 0) : d.zero()))) return false;
  return true;
}

/// Determinant over a commutative domain.
template <class S>
S determinant(const Domain<S>& d, const Matrix<S>& a) {
  static_assert(Domain<S>::commutative, "determinant needs a commutative domain");
  require(a.square(), Errc::ShapeMismatch, "determinant of non-square matrix");
  Matrix<S> m = a;
  const std::size_t n = a.rows();
  S det = d.one();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && d.is_zero(m(piv, c))) ++piv;
    if (piv == n) return d.zero();
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(c, j), m(piv, j));
      det = -det;
    }
    det = det * m(c, c);
    const S s = d.inv(m(c, c));
    for (std::size_t i = c + 1; i < n; ++i) {
      if (d.is_zero(m(i, c))) continue;
      const S f = m(i, c) * s;
      for (std::size_t j = c; j < n; ++j) m(i, j) = m(i, j) - f * m(c, j);
    }
  }
  return det;
}

// ---------------------------------------------------------------------------
// Quaternion matrices through the complex embedding q = z + w j.

template <class T>
std::vector<std::vector<std::complex<double>>> complex_embedding(const Matrix<Quaternion<T>>& a) {
  const std::size_t n = a.rows();
  std::vector<std::vector<std::complex<double>>> c(2 * n,
                                                    std::vector<std::complex<double>>(2 * n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const auto& q = a(i, j);
      std::complex<double> z(detail::to_double(q.a), detail::to_double(q.b));
      std::complex<double> w(detail::to_double(q.c), detail::to_double(q.d));
      c[2 * i][2 * j] = z;
      c[2 * i][2 * j + 1] = w;
      c[2 * i + 1][2 * j] = -std::conj(w);
      c[2 * i + 1][2 * j + 1] = std::conj(z);
    }
  return c;
}

inline std::complex<double> complex_determinant(std::vector<std::vector<std::complex<double>>> m) {
  const std::size_t n = m.size();
  std::complex<double> det = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t i = c + 1; i < n; ++i)
      if (std::abs(m[i][c]) > std::abs(m[piv][c])) piv = i;
    if (m[piv][c] == 0.0) return 0.0;
    if (piv != c) {
      std::swap(m[piv], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (std::size_t i = c + 1; i < n; ++i) {
      const auto f = m[i][c] / m[c][c];
      for (std::size_t j = c; j < n; ++j) m[i][j] -= f * m[c][j];
    }
  }
  return det;
}

/// Positive real Dieudonne determinant: sqrt(det) of the 2n x 2n complex image.
template <class T>
double dieudonne_value(const Domain<Quaternion<T>>&, const Matrix<Quaternion<T>>& a) {
  require(a.square(), Errc::ShapeMismatch, "Dieudonne value of non-square matrix");
  return std::sqrt(std::abs(complex_determinant(complex_embedding(a))));
}

/// Membership in SL_n: det = 1 over fields, Dieudonne value 1 over float H.
template <class S>
bool sl_test(const Domain<S>& d, const Matrix<S>& a) {
  require(a.square(), Errc::ShapeMismatch, "sl_test of non-square matrix");
  if constexpr (Domain<S>::commutative) {
    S det = determinant(d, a);
    if (d.is_zero(det)) fail(Errc::Singular, "sl_test of a singular matrix");
    return d.equal(det, d.one());
  } else if constexpr (Domain<S>::exact) {
    if (a.rows() != 1)
      fail(Errc::DomainMismatch, "SL test over H(Q) is only exact for 1x1 matrices");
    if (d.is_zero(a(0, 0))) fail(Errc::Singular, "sl_test of a singular matrix");
    return a(0, 0).norm() == 1;
  } else {
    double v = dieudonne_value(d, a);
    if (v <= d.tolerance()) fail(Errc::Singular, "sl_test of a singular matrix");
    return std::fabs(v - 1.0) <= std::max(d.tolerance(), 1e-9) * 10 * a.rows();
  }
}

// ---------------------------------------------------------------------------

/// p(A) for p given by coefficients c_0..c_m (central scalars).
template <class S>
Matrix<S> poly_eval(const Domain<S>& d, const std::vector<S>& coeffs, const Matrix<S>& a) {
  Matrix<S> acc = Matrix<S>::zeros(d, a.rows(), a.cols());
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
    acc = acc * a + Matrix<S>::scalar(d, a.rows(), *it);
  return acc;
}

template <class S>
S poly_eval(const Domain<S>&, const std::vector<S>& coeffs, const S& x) {
  S acc = coeffs.empty() ? S{} : coeffs.back() - coeffs.back();
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

/// Coefficients of prod (t - r_i), lowest degree first.
template <class S>
std::vector<S> poly_from_roots(const Domain<S>& d, const std::vector<S>& roots) {
  std::vector<S> c{d.one()};
  for (const auto& r : roots) {
    std::vector<S> next(c.size() + 1, d.zero());
    for (std::size_t k = 0; k < c.size(); ++k) {
      next[k + 1] = next[k + 1] + c[k];
      next[k] = next[k] - r * c[k];
    }
    c = std::move(next);
  }
  return c;
}

/// Standard basis column e_i (0-based).
template <class S>
Matrix<S> basis_vector(const Domain<S>& d, std::size_t n, std::size_t i) {
  Matrix<S> e(n, 1, d.zero());
  e(i, 0) = d.one();
  return e;
}

/// Multipliers tried in e_i + e_j * c searches.
template <class S>
std::vector<S> search_multipliers(const Domain<S>& d) {
  if constexpr (Domain<S>::quaternion)
    return {d.one(), S::i(), S::j(), S::k()};
  else
    return {d.one()};
}

template <class S>
S random_scalar(const Domain<S>& d, std::mt19937_64& rng);

/// v with {v, A v} right-independent. Order: e_i, then e_i + e_j c, then random.
template <class S>
Matrix<S> non_eigenvector(const Domain<S>& d, const Matrix<S>& a, std::mt19937_64* rng = nullptr) {
  require(a.square(), Errc::ShapeMismatch, "non_eigenvector of non-square matrix");
  const std::size_t n = a.rows();
  if (is_central_matrix(d, a)) fail(Errc::CentralInput, "every vector is an eigenvector");
  auto works = [&](const Matrix<S>& v) { return rank(d, hstack(v, a * v)) == 2; };
  for (std::size_t i = 0; i < n; ++i) {
    auto e = basis_vector(d, n, i);
    if (works(e)) return e;
  }
  for (const auto& c : search_multipliers(d))
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        auto v = basis_vector(d, n, i);
        v(j, 0) = c;
        if (works(v)) return v;
      }
  std::mt19937_64 local(0x5eed);
  std::mt19937_64& g = rng ? *rng : local;
  for (int attempt = 0; attempt < 64; ++attempt) {
    Matrix<S> v(n, 1, d.zero());
    for (std::size_t i = 0; i < n; ++i) v(i, 0) = random_scalar(d, g);
    if (!is_zero_matrix(d, v) && works(v)) return v;
  }
  fail(Errc::RetryExhausted, "no non-eigenvector found");
}

// ---------------------------------------------------------------------------
// Real linearization of quaternion equations.

/// 4x4 matrix of x -> q x on coordinates (a, b, c, d).
template <class T>
Matrix<T> left_mult_matrix(const Domain<T>& d, const Quaternion<T>& q) {
  return Matrix<T>::from_rows(d, {{q.a, T(-q.b), T(-q.c), T(-q.d)},
                                  {q.b, q.a, T(-q.d), q.c},
                                  {q.c, q.d, q.a, T(-q.b)},
                                  {q.d, T(-q.c), q.b, q.a}});
}

/// 4x4 matrix of x -> x q.
template <class T>
Matrix<T> right_mult_matrix(const Domain<T>& d, const Quaternion<T>& q) {
  return Matrix<T>::from_rows(d, {{q.a, T(-q.b), T(-q.c), T(-q.d)},
                                  {q.b, q.a, q.d, T(-q.c)},
                                  {q.c, T(-q.d), q.a, q.b},
                                  {q.d, q.c, T(-q.b), q.a}});
}

/// Solves a x - x b = c for a quaternion x (a, b nonconjugate).
template <class T>
Quaternion<T> solve_quaternion_sylvester(const Domain<T>& d, const Quaternion<T>& a,
                                         const Quaternion<T>& b, const Quaternion<T>& c) {
  Matrix<T> m = left_mult_matrix(d, a) - right_mult_matrix(d, b);
  Matrix<T> rhs = Matrix<T>::from_rows(d, {{c.a}, {c.b}, {c.c}, {c.d}});
  if (!is_invertible(d, m)) fail(Errc::ConjugateDiagonal, "a x - x b = c is singular");
  Matrix<T> x = solve(d, m, rhs);
  return {x(0, 0), x(1, 0), x(2, 0), x(3, 0)};
}

/// Basis (as quaternion columns) of the right eigenspace {v : A v = v alpha}.
template <class T>
Matrix<Quaternion<T>> right_eigenspace(const Domain<T>& d, const Matrix<Quaternion<T>>& a,
                                       const Quaternion<T>& alpha) {
  const std::size_t n = a.rows();
  Matrix<T> big(4 * n, 4 * n, T(0));
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      Matrix<T> blk = left_mult_matrix(d, a(r, c));
      if (r == c) blk -= right_mult_matrix(d, alpha);
      big.set_block(4 * r, 4 * c, blk);
    }
  Matrix<T> ns = right_null_space(d, big);
  Matrix<Quaternion<T>> out(n, ns.cols(), Quaternion<T>());
  for (std::size_t k = 0; k < ns.cols(); ++k)
    for (std::size_t r = 0; r < n; ++r)
      out(r, k) = {ns(4 * r, k), ns(4 * r + 1, k), ns(4 * r + 2, k), ns(4 * r + 3, k)};
  return out;
}

// ---------------------------------------------------------------------------
// Seeded random scalars and matrices.

template <class S>
S random_scalar(const Domain<S>& d, std::mt19937_64& rng) {
  if constexpr (std::is_same_v<S, Fp>) {
    return Fp(d.p, static_cast<std::int64_t>(rng() % d.p));
  } else if constexpr (std::is_same_v<S, Rational>) {
    std::uniform_int_distribution<long> num(-9, 9), den(1, 4);
    Rational r(num(rng), den(rng));
    r.canonicalize();
    return r;
  } else if constexpr (std::is_same_v<S, double>) {
    return std::normal_distribution<double>(0.0, 1.0)(rng);
  } else if constexpr (std::is_same_v<S, QuatQ>) {
    Domain<Rational> q;
    return {random_scalar(q, rng), random_scalar(q, rng), random_scalar(q, rng),
            random_scalar(q, rng)};
  } else {
    std::normal_distribution<double> g(0.0, 1.0);
    return {g(rng), g(rng), g(rng), g(rng)};
  }
}

template <class S>
Matrix<S> random_matrix(const Domain<S>& d, std::size_t rows, std::size_t cols,
                        std::mt19937_64& rng) {
  Matrix<S> m(rows, cols, d.zero());
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = random_scalar(d, rng);
  return m;
}

template <class S>
Matrix<S> random_invertible(const Domain<S>& d, std::size_t n, std::mt19937_64& rng) {
  for (;;) {
    Matrix<S> m = random_matrix(d, n, n, rng);
    if (is_invertible(d, m)) return m;
  }
}

}  // namespace commalg
