#pragma once

// Similarity decompositions over division rings. Every routine returns a
// conjugator P together with P^-1 A P.

#include <random>
#include <string>
#include <vector>

#include "commalg/linalg.hpp"
#include "commalg/scalars.hpp"

namespace commalg {

template <class S>
struct SimilarityCertificate {
  std::string kind;
  Matrix<S> input;
  Matrix<S> conjugator;
  Matrix<S> canonical;
};

template <class S>
SimilarityCertificate<S> make_similarity(const Domain<S>& d, std::string kind, const Matrix<S>& a,
                                         const Matrix<S>& p) {
  return {std::move(kind), a, p, conjugate(d, a, p)};
}

/// P^-1 input P == canonical (exactly, or within tolerance).
template <class S>
bool replay(const Domain<S>& d, const SimilarityCertificate<S>& c) {
  return approx_equal(d, c.input * c.conjugator, c.conjugator * c.canonical) &&
         is_invertible(d, c.conjugator);
}

namespace detail {

template <class S>
void require_square(const Matrix<S>& a, const char* what) {
  require(a.square(), Errc::ShapeMismatch, std::string(what) + " needs a square matrix");
}

template <class S>
bool all_coefficients_central(const Domain<S>& d, const std::vector<S>& p) {
  for (const auto& c : p)
    if (!d.is_central(c)) return false;
  return true;
}

/// Candidate completion vectors for retry number `attempt`: rotated standard
/// basis first, then random vectors.
template <class S>
std::vector<Matrix<S>> completion_candidates(const Domain<S>& d, std::size_t n, int attempt,
                                             Rng& rng) {
  std::vector<Matrix<S>> out;
  if (attempt < static_cast<int>(n)) {
    for (std::size_t t = 0; t < n; ++t) out.push_back(basis_vector(d, n, (t + attempt) % n));
  } else {
    for (std::size_t t = 0; t < n; ++t) {
      Matrix<S> v(n, 1, d.zero());
      for (std::size_t i = 0; i < n; ++i) v(i, 0) = random_scalar(d, rng);
      out.push_back(v);
    }
  }
  return out;
}

/// Non-eigenvector for retry `attempt`: the deterministic search first, then random.
template <class S>
Matrix<S> retry_vector(const Domain<S>& d, const Matrix<S>& m, int attempt, Rng& rng) {
  if (attempt < 2 * static_cast<int>(m.rows())) return non_eigenvector(d, m, &rng);
  for (;;) {
    Matrix<S> v(m.rows(), 1, d.zero());
    for (std::size_t i = 0; i < m.rows(); ++i) v(i, 0) = random_scalar(d, rng);
    if (rank(d, hstack(v, m * v)) == 2) return v;
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------

/// Similar form with (1,1) entry 0: P = (v, Av, completion).
template <class S>
SimilarityCertificate<S> rowen_form(const Domain<S>& d, const Matrix<S>& a) {
  detail::require_square(a, "rowen_form");
  require(a.rows() >= 2, Errc::InvalidArgument, "rowen_form needs n >= 2");
  if (is_central_matrix(d, a)) fail(Errc::CentralInput, "central matrices have no such form");
  if (d.is_zero(a(0, 0))) return make_similarity(d, "rowen", a, Matrix<S>::identity(d, a.rows()));
  Matrix<S> v = non_eigenvector(d, a);
  Matrix<S> p = complete_basis(d, hstack(v, a * v));
  auto cert = make_similarity(d, "rowen", a, p);
  cert.canonical(0, 0) = d.zero();  // exact by construction; clears float residue
  return cert;
}

/// Solves A X - X B = C given central-coefficient p with p(A) = 0 and p(B)
/// invertible, or p(B) = 0 and p(A) invertible.
template <class S>
Matrix<S> sylvester_solve(const Domain<S>& d, const Matrix<S>& a, const Matrix<S>& b,
                          const Matrix<S>& c, const std::vector<S>& p) {
  detail::require_square(a, "sylvester_solve");
  detail::require_square(b, "sylvester_solve");
  require(c.rows() == a.rows() && c.cols() == b.rows(), Errc::ShapeMismatch,
          "C must be " + std::to_string(a.rows()) + "x" + std::to_string(b.rows()));
  if (!detail::all_coefficients_central(d, p))
    fail(Errc::HypothesisViolated, "p must have central coefficients");
  const Matrix<S> pa = poly_eval(d, p, a), pb = poly_eval(d, p, b);
  const bool a_root = is_zero_matrix(d, pa), b_root = is_zero_matrix(d, pb);
  // X0 = sum_k c_k sum_{i+j=k-1} A^i C B^j, so A X0 - X0 B = p(A) C - C p(B).
  Matrix<S> x0 = Matrix<S>::zeros(d, c.rows(), c.cols());
  std::vector<Matrix<S>> bpow{Matrix<S>::identity(d, b.rows())};
  for (std::size_t k = 1; k < p.size(); ++k) bpow.push_back(bpow.back() * b);
  Matrix<S> apow = Matrix<S>::identity(d, a.rows());
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    Matrix<S> ac = apow * c;
    for (std::size_t k = i + 1; k < p.size(); ++k)
      if (!d.is_zero(p[k])) x0 += (ac * bpow[k - 1 - i]) * p[k];
    apow = apow * a;
  }
  if (a_root && is_invertible(d, pb)) return -(x0 * inverse(d, pb));
  if (b_root && is_invertible(d, pa)) return inverse(d, pa) * x0;
  fail(Errc::HypothesisViolated, "need p(A) = 0 with p(B) invertible (or the mirror)");
}

/// [[B, alpha], [0, a]] ~ B + (a) via [[I, y], [0, 1]] with B y - y a = -alpha.
template <class S>
SimilarityCertificate<S> block_merge_similarity(const Domain<S>& d, const Matrix<S>& b,
                                                const Matrix<S>& alpha, const S& a,
                                                const std::vector<S>& p) {
  const std::size_t n = b.rows();
  Matrix<S> am = Matrix<S>::scalar(d, 1, a);
  Matrix<S> y = sylvester_solve(d, b, am, -alpha, p);
  Matrix<S> input = block2x2(b, alpha, Matrix<S>::zeros(d, 1, n), am);
  Matrix<S> q = block2x2(Matrix<S>::identity(d, n), y, Matrix<S>::zeros(d, 1, n),
                         Matrix<S>::identity(d, 1));
  return {"block_merge", input, q, direct_sum(b, am)};
}

/// [[B, 0], [ell, a]] ~ B + (a) via [[I, 0], [z, 1]] with a z - z B = -ell.
template <class S>
SimilarityCertificate<S> block_merge_similarity_lower(const Domain<S>& d, const Matrix<S>& b,
                                                      const Matrix<S>& ell, const S& a,
                                                      const std::vector<S>& p) {
  const std::size_t n = b.rows();
  Matrix<S> am = Matrix<S>::scalar(d, 1, a);
  Matrix<S> z = sylvester_solve(d, am, b, -ell, p);
  Matrix<S> input = block2x2(b, Matrix<S>::zeros(d, n, 1), ell, am);
  Matrix<S> q = block2x2(Matrix<S>::identity(d, n), Matrix<S>::zeros(d, n, 1), z,
                         Matrix<S>::identity(d, 1));
  return {"block_merge_lower", input, q, direct_sum(b, am)};
}

// ---------------------------------------------------------------------------

template <class S>
struct LHU {
  Matrix<S> conjugator, lower, diag, upper;
  S last;  // h_n
};

namespace detail {

template <class S>
bool lhu_step(const Domain<S>& d, const Matrix<S>& m, const std::vector<S>& h, std::size_t next,
              LHU<S>& out, Rng& rng) {
  const std::size_t k = m.rows();
  if (k == 1 || next == h.size()) {
    require(k == 1, Errc::InvalidArgument, "too few prescribed pivots");
    out = {Matrix<S>::identity(d, 1), Matrix<S>::identity(d, 1), m, Matrix<S>::identity(d, 1),
           m(0, 0)};
    return true;
  }
  const S h1 = h[next];
  const S h1inv = d.inv(h1);
  for (int attempt = 0; attempt < 64; ++attempt) {
    Matrix<S> v = retry_vector(d, m, attempt, rng);
    Matrix<S> w = m * v - v * h1;
    S sub_diag = d.one();
    Matrix<S> q;
    if constexpr (Domain<S>::exact) {
      q = complete_basis(d, hstack(v, w), completion_candidates(d, k, attempt, rng));
    } else {
      // Unit columns and an orthonormal completion keep P well conditioned.
      v = v * S(1.0 / column_norm(d, v));
      w = m * v - v * h1;
      const double nw = column_norm(d, w);
      w = w * S(1.0 / nw);
      sub_diag = S(nw);
      q = orthogonal_completion(d, hstack(v, w));
    }
    Matrix<S> c = conjugate(d, m, q);
    // First column is (h1, |w|, 0, ...) by construction.
    c(0, 0) = h1;
    c(1, 0) = sub_diag;
    for (std::size_t i = 2; i < k; ++i) c(i, 0) = d.zero();
    Matrix<S> b = c.block(0, 1, 1, k - 1), col = c.block(1, 0, k - 1, 1);
    Matrix<S> schur = c.block(1, 1, k - 1, k - 1) - col * h1inv * b;
    if (k - 1 >= 2 && next + 1 < h.size() && is_central_matrix(d, schur)) continue;
    LHU<S> sub;
    if (!lhu_step(d, schur, h, next + 1, sub, rng)) continue;
    Matrix<S> y = inverse(d, sub.conjugator) * col * h1inv;
    Matrix<S> z = h1inv * (b * sub.conjugator);
    out.conjugator = q * direct_sum(Matrix<S>::identity(d, 1), sub.conjugator);
    out.lower = block2x2(Matrix<S>::identity(d, 1), Matrix<S>::zeros(d, 1, k - 1), y, sub.lower);
    out.diag = direct_sum(Matrix<S>::scalar(d, 1, h1), sub.diag);
    out.upper = block2x2(Matrix<S>::identity(d, 1), z, Matrix<S>::zeros(d, k - 1, 1), sub.upper);
    out.last = sub.last;
    return true;
  }
  return false;
}

}  // namespace detail

/// P^-1 A P = L H U with H = diag(h_1, ..., h_{n-1}, h_n), the first n-1 prescribed.
template <class S>
LHU<S> lhu_decompose(const Domain<S>& d, const Matrix<S>& a, const std::vector<S>& h, Rng& rng) {
  detail::require_square(a, "lhu_decompose");
  const std::size_t n = a.rows();
  require(n >= 2, Errc::InvalidArgument, "lhu_decompose needs n >= 2");
  require(h.size() == n - 1, Errc::InvalidArgument,
          "expected " + std::to_string(n - 1) + " prescribed pivots");
  for (const auto& x : h) require(!d.is_zero(x), Errc::InvalidArgument, "pivots must be nonzero");
  if (is_central_matrix(d, a)) fail(Errc::CentralInput, "central matrices have no LHU form");
  if (!is_invertible(d, a)) fail(Errc::Singular, "lhu_decompose needs an invertible matrix");
  LHU<S> out;
  if (!detail::lhu_step(d, a, h, 0, out, rng))
    fail(Errc::RetryExhausted, "no basis completion keeps the Schur complement noncentral");
  return out;
}

template <class S>
LHU<S> lhu_decompose(const Domain<S>& d, const Matrix<S>& a, const std::vector<S>& h) {
  Rng rng(kDefaultSeed);
  return lhu_decompose(d, a, h, rng);
}

// ---------------------------------------------------------------------------

/// Quaternion conjugacy: equal real parts and equal norms. Fields: equality.
template <class S>
bool scalars_conjugate(const Domain<S>& d, const S& x, const S& y) {
  if constexpr (Domain<S>::quaternion) {
    return d.base_is_zero(x.a - y.a) && d.base_is_zero(x.norm() - y.norm());
  } else {
    return d.equal(x, y);
  }
}

enum class DiagMode { CentralDistinct, Nonconjugate };

namespace detail {

/// x with a x - x b = c.
template <class S>
S solve_scalar_sylvester(const Domain<S>& d, const S& a, const S& b, const S& c) {
  if (d.is_central(b)) return d.inv(a - b) * c;
  if (d.is_central(a)) return c * d.inv(a - b);
  if constexpr (Domain<S>::quaternion) {
    Domain<typename Domain<S>::Base> base;
    if constexpr (!Domain<S>::exact) base = Domain<double>{d.tolerance()};
    return solve_quaternion_sylvester(base, a, b, c);
  } else {
    return d.inv(a - b) * c;
  }
}

template <class S>
Matrix<S> diagonalize_upper(const Domain<S>& d, const Matrix<S>& t) {
  const std::size_t n = t.rows();
  Matrix<S> p = Matrix<S>::identity(d, n);
  for (std::size_t j = 1; j < n; ++j)
    for (std::size_t i = j; i-- > 0;) {
      S rhs = d.zero();
      for (std::size_t k = i + 1; k <= j; ++k) rhs = rhs - t(i, k) * p(k, j);
      p(i, j) = solve_scalar_sylvester(d, t(i, i), t(j, j), rhs);
    }
  return p;
}

}  // namespace detail

/// P^-1 T P = diag(T) for triangular T with pairwise nonconjugate diagonal.
template <class S>
SimilarityCertificate<S> diagonalize_tri_distinct(const Domain<S>& d, const Matrix<S>& t,
                                                  DiagMode mode = DiagMode::Nonconjugate) {
  detail::require_square(t, "diagonalize_tri_distinct");
  const std::size_t n = t.rows();
  const bool upper = is_upper_triangular(d, t);
  if (!upper && !is_lower_triangular(d, t)) fail(Errc::NotTriangular, "input is not triangular");
  auto diag = diagonal_of(t);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (scalars_conjugate(d, diag[i], diag[j]))
        fail(Errc::ConjugateDiagonal, "diagonal entries " + std::to_string(i + 1) + " and " +
                                          std::to_string(j + 1) + " are conjugate");
  if (mode == DiagMode::CentralDistinct)
    for (std::size_t i = 0; i + 1 < n; ++i)
      if (!d.is_central(diag[i]))
        fail(Errc::HypothesisViolated, "diagonal entry " + std::to_string(i + 1) + " is not central");
  Matrix<S> p;
  if (upper) {
    p = detail::diagonalize_upper(d, t);
  } else {
    Matrix<S> j = reversal(d, n);
    p = j * detail::diagonalize_upper(d, j * t * j) * j;
  }
  SimilarityCertificate<S> cert{"diagonalize", t, p, Matrix<S>::diagonal(d, diag)};
  return cert;
}

// ---------------------------------------------------------------------------

/// P^-1 N P = J_{m1}(0) + J_{m2}(0) + ... with m1 >= m2 >= ...
template <class S>
SimilarityCertificate<S> nilpotent_jordan(const Domain<S>& d, const Matrix<S>& nmat,
                                          std::vector<std::size_t>* block_sizes = nullptr) {
  detail::require_square(nmat, "nilpotent_jordan");
  const std::size_t n = nmat.rows();
  std::vector<Matrix<S>> powers{Matrix<S>::identity(d, n)};
  while (powers.size() <= n && !is_zero_matrix(d, powers.back()))
    powers.push_back(powers.back() * nmat);
  if (!is_zero_matrix(d, powers.back())) fail(Errc::NotNilpotent, "N^n != 0");
  const std::size_t index = powers.size() - 1;  // N^index = 0
  struct Chain {
    Matrix<S> head;
    std::size_t len;
  };
  std::vector<Chain> chains;
  for (std::size_t j = index; j >= 1; --j) {
    // Span of ker N^(j-1) plus images of longer chains at height j.
    Matrix<S> span(n, 0, d.zero());
    auto add = [&](const Matrix<S>& v) {
      Matrix<S> ext = span.cols() ? hstack(span, v) : v;
      if (rank(d, ext) > span.cols()) {
        span = ext;
        return true;
      }
      return false;
    };
    if (j > 1) {
      Matrix<S> k0 = right_null_space(d, powers[j - 1]);
      for (std::size_t c = 0; c < k0.cols(); ++c) add(k0.column(c));
    }
    for (const auto& ch : chains) add(powers[ch.len - j] * ch.head);
    Matrix<S> kj = right_null_space(d, powers[j]);
    for (std::size_t c = 0; c < kj.cols(); ++c)
      if (add(kj.column(c))) chains.push_back({kj.column(c), j});
  }
  Matrix<S> p(n, 0, d.zero());
  std::vector<std::size_t> sizes;
  for (const auto& ch : chains) {
    for (std::size_t t = ch.len; t-- > 0;) {
      Matrix<S> col = powers[t] * ch.head;
      p = p.cols() ? hstack(p, col) : col;
    }
    sizes.push_back(ch.len);
  }
  if (block_sizes) *block_sizes = sizes;
  Matrix<S> canon = Matrix<S>::zeros(d, n, n);
  std::size_t off = 0;
  for (auto m : sizes) {
    for (std::size_t t = 0; t + 1 < m; ++t) canon(off + t, off + t + 1) = d.one();
    off += m;
  }
  return {"nilpotent_jordan", nmat, p, canon};
}

/// Partition of n given by the nilpotent Jordan blocks of N.
template <class S>
std::vector<std::size_t> jordan_partition(const Domain<S>& d, const Matrix<S>& nmat) {
  std::vector<std::size_t> sizes;
  nilpotent_jordan(d, nmat, &sizes);
  return sizes;
}

/// P^-1 A P = G + N with G invertible and N nilpotent (im A^n + ker A^n).
template <class S>
SimilarityCertificate<S> fitting_split(const Domain<S>& d, const Matrix<S>& a,
                                       std::size_t* invertible_size = nullptr) {
  detail::require_square(a, "fitting_split");
  const std::size_t n = a.rows();
  require(n >= 2, Errc::InvalidArgument, "fitting_split needs n >= 2");
  if (is_invertible(d, a)) fail(Errc::Invertible, "A is invertible");
  Matrix<S> an = Matrix<S>::identity(d, n);
  for (std::size_t t = 0; t < n; ++t) an = an * a;
  if (is_zero_matrix(d, an)) fail(Errc::Nilpotent, "A is nilpotent");
  auto red = row_reduce(d, an);
  Matrix<S> image(n, 0, d.zero());
  for (auto c : red.pivots) image = image.cols() ? hstack(image, an.column(c)) : an.column(c);
  Matrix<S> kernel = right_null_space(d, an);
  Matrix<S> p = hstack(image, kernel);
  auto cert = make_similarity(d, "fitting", a, p);
  const std::size_t g = image.cols();
  // Off-diagonal blocks vanish exactly; clear float residue.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if ((i < g) != (j < g)) cert.canonical(i, j) = d.zero();
  if (invertible_size) *invertible_size = g;
  return cert;
}

// ---------------------------------------------------------------------------

/// alpha with alpha^2 = -1 in the domain, if one exists (i for quaternions).
template <class S>
std::optional<S> find_skew_involution(const Domain<S>& d) {
  if constexpr (Domain<S>::quaternion) {
    return S::i();
  } else if constexpr (std::is_same_v<S, Fp>) {
    if (d.p == 2) return d.one();
    for (std::uint32_t v = 1; v < d.p; ++v)
      if (Fp(d.p, v) * Fp(d.p, v) == -d.one()) return Fp(d.p, v);
    return std::nullopt;
  } else {
    return std::nullopt;
  }
}

/// Canonical form of a skew involution: diag(alpha I_r, -alpha I_{n-r}); over
/// GF(2) (A^2 = I) the form [[I_r, I_r], [0, I_r]] + I_{n-2r}.
template <class S>
SimilarityCertificate<S> skew_involution_form(const Domain<S>& d, const Matrix<S>& a,
                                              std::optional<S> alpha = std::nullopt,
                                              std::size_t* r_out = nullptr) {
  detail::require_square(a, "skew_involution_form");
  const std::size_t n = a.rows();
  const Matrix<S> id = Matrix<S>::identity(d, n);
  if (!approx_equal(d, a * a, -id)) fail(Errc::NotSkewInvolution, "A^2 != -I");
  if (!alpha) alpha = find_skew_involution(d);
  if (!alpha)
    fail(Errc::NoScalarSkewInvolution, "the scalar domain has no alpha with alpha^2 = -1");
  require(d.equal((*alpha) * (*alpha), -d.one()), Errc::InvalidArgument, "alpha^2 != -1");

  if constexpr (std::is_same_v<S, Fp>) {
    if (d.p == 2) {
      const Matrix<S> nm = a + id;  // N^2 = 0
      Matrix<S> heads(n, 0, d.zero()), images(n, 0, d.zero());
      for (std::size_t i = 0; i < n; ++i) {
        auto e = basis_vector(d, n, i);
        Matrix<S> img = nm * e;
        Matrix<S> ext = images.cols() ? hstack(images, img) : img;
        if (rank(d, ext) > images.cols()) {
          images = ext;
          heads = heads.cols() ? hstack(heads, e) : e;
        }
      }
      const std::size_t r = images.cols();
      Matrix<S> p = r ? hstack(images, heads) : Matrix<S>(n, 0, d.zero());
      Matrix<S> ker = right_null_space(d, nm);
      for (std::size_t c = 0; c < ker.cols() && p.cols() < n; ++c) {
        Matrix<S> ext = p.cols() ? hstack(p, ker.column(c)) : ker.column(c);
        if (rank(d, ext) > p.cols()) p = ext;
      }
      if (r_out) *r_out = r;
      Matrix<S> canon = id;
      for (std::size_t t = 0; t < r; ++t) canon(t, r + t) = d.one();
      return {"skew_involution", a, p, canon};
    }
  }

  const std::size_t r = rank(d, a + Matrix<S>::scalar(d, n, *alpha));
  Matrix<S> p;
  if constexpr (Domain<S>::quaternion) {
    using T = typename Domain<S>::Base;
    Domain<T> base;
    if constexpr (!Domain<S>::exact) base = Domain<double>{d.tolerance()};
    // {v : A v = v alpha} is a right C-space; a C-basis of it is an H-basis,
    // and multiplying on the right by beta (anticommuting with alpha) maps it
    // onto {v : A v = -v alpha}.
    Matrix<S> plus = right_eigenspace(base, a, *alpha);
    Matrix<S> basis(n, 0, d.zero());
    for (std::size_t c = 0; c < plus.cols() && basis.cols() < n; ++c) {
      Matrix<S> ext = basis.cols() ? hstack(basis, plus.column(c)) : plus.column(c);
      if (rank(d, ext) > basis.cols()) basis = ext;
    }
    require(basis.cols() == n, Errc::NotSkewInvolution, "eigenspace too small");
    const S beta = detail::pure_orthogonal(*alpha);
    p = basis;
    for (std::size_t c = r; c < n; ++c)
      for (std::size_t i = 0; i < n; ++i) p(i, c) = basis(i, c) * beta;
  } else {
    // Char != 2: (A - alpha)(A + alpha) = 0 and r = dim ker(A - alpha I).
    Matrix<S> plus = right_null_space(d, a - Matrix<S>::scalar(d, n, *alpha));
    Matrix<S> minus = right_null_space(d, a + Matrix<S>::scalar(d, n, *alpha));
    p = plus.cols() ? (minus.cols() ? hstack(plus, minus) : plus) : minus;
  }
  std::vector<S> diag;
  for (std::size_t t = 0; t < n; ++t) diag.push_back(t < r ? *alpha : -*alpha);
  if (r_out) *r_out = r;
  return {"skew_involution", a, p, Matrix<S>::diagonal(d, diag)};
}

// ---------------------------------------------------------------------------

template <class S>
struct CommutatorPair {
  Matrix<S> x, y;
};

/// [X, Y] = T for triangular T of trace zero; X is the (upper or lower) shift.
template <class S>
CommutatorPair<S> tri_zero_trace_commutator(const Domain<S>& d, const Matrix<S>& t) {
  detail::require_square(t, "tri_zero_trace_commutator");
  const std::size_t n = t.rows();
  if (!d.is_zero(trace(t))) fail(Errc::NonzeroTrace, "trace is " + d.format(trace(t)));
  const bool upper = is_upper_triangular(d, t);
  if (!upper && !is_lower_triangular(d, t)) fail(Errc::NotTriangular, "input is not triangular");
  if (!upper) {
    Matrix<S> j = reversal(d, n);
    auto inner = tri_zero_trace_commutator(d, j * t * j);
    return {j * inner.x * j, j * inner.y * j};
  }
  Matrix<S> x = Matrix<S>::zeros(d, n, n), y = Matrix<S>::zeros(d, n, n);
  for (std::size_t k = 0; k + 1 < n; ++k) x(k, k + 1) = d.one();
  // [X, Y]_ij = Y_{i+1,j} - Y_{i,j-1}.
  S s = d.zero();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    s = s + t(i, i);
    y(i + 1, i) = s;
  }
  for (std::size_t e = 1; e < n; ++e) {
    // Chain y_k = Y_{k, k+e-1}, seeded with 0.
    for (std::size_t i = 0; i + e < n; ++i) y(i + 1, i + e) = y(i, i + e - 1) + t(i, i + e);
  }
  return {x, y};
}

/// Similar form with zero diagonal for a trace-zero matrix over a field.
template <class S>
SimilarityCertificate<S> zero_diagonal_form(const Domain<S>& d, const Matrix<S>& a, Rng& rng) {
  static_assert(Domain<S>::commutative, "zero_diagonal_form works over fields");
  detail::require_square(a, "zero_diagonal_form");
  const std::size_t n = a.rows();
  if (!d.is_zero(trace(a))) fail(Errc::NonzeroTrace, "trace is " + d.format(trace(a)));
  if (is_zero_matrix(d, a)) return {"zero_diagonal", a, Matrix<S>::identity(d, n), a};
  if (is_scalar_matrix(d, a))
    fail(Errc::CentralInput, "a nonzero scalar matrix is not similar to a zero-diagonal one");

  // Recursive step on the trailing block; returns conjugator Q with zero diagonal.
  auto step = [&](auto&& self, const Matrix<S>& m) -> std::optional<Matrix<S>> {
    const std::size_t k = m.rows();
    if (k == 1) return Matrix<S>::identity(d, 1);
    if (is_zero_matrix(d, m)) return Matrix<S>::identity(d, k);
    for (int attempt = 0; attempt < 64; ++attempt) {
      Matrix<S> q;
      if (d.is_zero(m(0, 0)) && attempt == 0) {
        q = Matrix<S>::identity(d, k);
      } else {
        Matrix<S> v = detail::retry_vector(d, m, attempt, rng);
        q = complete_basis(d, hstack(v, m * v), detail::completion_candidates(d, k, attempt, rng));
      }
      Matrix<S> c = conjugate(d, m, q);
      Matrix<S> trailing = c.block(1, 1, k - 1, k - 1);
      if (k - 1 >= 2 && is_scalar_matrix(d, trailing) && !is_zero_matrix(d, trailing)) continue;
      auto sub = self(self, trailing);
      if (!sub) continue;
      return q * direct_sum(Matrix<S>::identity(d, 1), *sub);
    }
    return std::nullopt;
  };
  auto q = step(step, a);
  if (!q) fail(Errc::RetryExhausted, "zero_diagonal_form exhausted its retries");
  return make_similarity(d, "zero_diagonal", a, *q);
}

template <class S>
SimilarityCertificate<S> zero_diagonal_form(const Domain<S>& d, const Matrix<S>& a) {
  Rng rng(kDefaultSeed);
  return zero_diagonal_form(d, a, rng);
}

}  // namespace commalg
