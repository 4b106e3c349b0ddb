#pragma once

// Scalar-level constructions: unit-norm differences, unit quaternions as
// commutators of skew involutions, square roots, pure quaternions as additive
// commutators, the two-commutator scalar oracle, and zero-sum unit families
// over fields.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "commalg/scalar.hpp"

namespace commalg {

template <class S>
struct ScalarPair {
  S first;
  S second;
};

/// h = [a1, b1] * [a2, b2] with both brackets nonzero pure quaternions.
template <class S>
struct ScalarCommutatorPair {
  S a1, b1, a2, b2;
};

namespace detail {

template <class T>
Quaternion<T> cross(const Quaternion<T>& x, const Quaternion<T>& y) {
  return {T(0), T(x.c * y.d - x.d * y.c), T(x.d * y.b - x.b * y.d), T(x.b * y.c - x.c * y.b)};
}

/// A nonzero pure quaternion orthogonal to the pure quaternion v. Projects the
/// basis vector i, j or k on which v has the smallest component (first on
/// ties); if v = 0 returns i. Normalized only in floating point.
template <class T>
Quaternion<T> pure_orthogonal(const Quaternion<T>& v) {
  Quaternion<T> basis[3] = {Quaternion<T>::i(), Quaternion<T>::j(), Quaternion<T>::k()};
  double comps[3] = {std::fabs(to_double(v.b)), std::fabs(to_double(v.c)),
                     std::fabs(to_double(v.d))};
  int pick = 0;
  for (int t = 1; t < 3; ++t)
    if (comps[t] < comps[pick]) pick = t;
  T nv = v.norm();
  if (base_is_zero(nv)) return basis[0];
  T coef = T(dot(basis[pick], v) / nv);
  Quaternion<T> a = basis[pick] - coef * v;
  if constexpr (std::is_same_v<T, double>) a = (1.0 / std::sqrt(a.norm())) * a;
  return a;
}

}  // namespace detail

/// Splits q with ||q|| <= 2 as q = u - v where N(u) = N(v) = 1.
inline ScalarPair<QuatF> quat_diff_unit_norms(const QuatFloat& d, const QuatF& q) {
  const double len = std::sqrt(q.norm());
  if (len > 2.0 + d.tol)
    fail(Errc::NormTooLarge, "||q|| = " + detail::format_double(len) + " > 2");
  if (len <= d.tol) return {QuatF(1.0), QuatF(1.0)};
  const QuatF e = (1.0 / len) * q;
  // Unit w orthogonal to e, scanning 1, i, j, k.
  const QuatF basis[4] = {QuatF(1.0), QuatF::i(), QuatF::j(), QuatF::k()};
  QuatF w;
  for (const auto& b : basis) {
    QuatF r = b - dot(b, e) * e;
    double rn = std::sqrt(r.norm());
    if (rn > 0.5) {
      w = (1.0 / rn) * r;
      break;
    }
  }
  const double half = std::min(len, 2.0) / 2.0;
  const double s = std::sqrt(std::max(0.0, 1.0 - half * half));
  const QuatF v = (-half) * e + s * w;
  const QuatF u = v + q;
  return {u, v};
}

/// Writes a unit quaternion u as a b a^-1 b^-1 with a^2 = b^2 = -1.
inline ScalarPair<QuatF> unit_quaternion_commutator(const QuatFloat& d, const QuatF& u) {
  if (std::fabs(u.norm() - 1.0) > d.tol)
    fail(Errc::NotUnitNorm, "N(u) = " + detail::format_double(u.norm()));
  const QuatF im = u.imag();
  const double im_len = std::sqrt(im.norm());
  const double theta = std::clamp(std::atan2(im_len, u.a), 0.0, std::numbers::pi);
  const QuatF axis = im_len > 0.0 ? (1.0 / im_len) * im : QuatF::k();
  const QuatF p = detail::pure_orthogonal(axis);
  const QuatF r = detail::cross(axis, p);
  const double phi = std::numbers::pi - theta / 2.0;
  return {p, std::cos(phi) * p + std::sin(phi) * r};
}

/// k with k^2 = u for a unit quaternion u; returns i for u = -1.
inline QuatF quat_sqrt(const QuatFloat& d, const QuatF& u) {
  if (std::fabs(u.norm() - 1.0) > d.tol)
    fail(Errc::NotUnitNorm, "N(u) = " + detail::format_double(u.norm()));
  const QuatF im = u.imag();
  const double im_len = std::sqrt(im.norm());
  if (im_len == 0.0) return u.a > 0 ? QuatF(1.0) : QuatF::i();
  const double theta = std::clamp(std::atan2(im_len, u.a), 0.0, std::numbers::pi);
  return QuatF(std::cos(theta / 2.0)) + (std::sin(theta / 2.0) / im_len) * im;
}

/// [a, b] = v for a nonzero pure quaternion v, with a, b pure and a orthogonal to v.
template <class T>
ScalarPair<Quaternion<T>> pure_as_commutator(const Domain<Quaternion<T>>& d,
                                             const Quaternion<T>& v) {
  if (!d.is_pure(v)) fail(Errc::NotPure, d.format(v) + " has nonzero real part");
  if (d.is_zero(v)) fail(Errc::ZeroInput, "pure_as_commutator(0)");
  Quaternion<T> pv = v.imag();
  Quaternion<T> a = detail::pure_orthogonal(pv);
  // [a, b] = 2 a x b and a x (v x a) = N(a) v.
  T scale = T(T(1) / T(2 * a.norm()));
  Quaternion<T> b = scale * detail::cross(pv, a);
  return {a, b};
}

/// h = [a1, b1] [a2, b2] for nonzero h, both brackets noncentral.
template <class T>
ScalarCommutatorPair<Quaternion<T>> quaternion_scalar_oracle(const Domain<Quaternion<T>>& d,
                                                             const Quaternion<T>& h) {
  if (d.is_zero(h)) fail(Errc::ZeroInput, "quaternion_scalar_oracle(0)");
  Quaternion<T> p = detail::pure_orthogonal(h.imag());
  Quaternion<T> q = d.inv(p) * h;
  q.a = T(0);  // p orthogonal to Im h makes p^-1 h pure
  auto first = pure_as_commutator(d, p);
  auto second = pure_as_commutator(d, q);
  return {first.first, first.second, second.first, second.second};
}

/// Number of elements of a finite field domain, 0 for infinite ones.
template <class S>
std::uint64_t field_size(const Domain<S>& d) {
  if constexpr (std::is_same_v<S, Fp>)
    return d.p;
  else
    return 0;
}

/// n nonzero field elements summing to zero: 1, ..., 1, a, -((n-2) + a).
template <class S>
std::vector<S> zero_sum_units(const Domain<S>& d, int n) {
  static_assert(Domain<S>::commutative, "zero_sum_units needs a field");
  require(n > 1, Errc::InvalidArgument, "zero_sum_units needs n > 1");
  if (field_size(d) == 2) {
    if (n % 2 != 0)
      fail(Errc::InfeasibleCase, "GF(2) has no " + std::to_string(n) + " units summing to 0");
    return std::vector<S>(n, d.one());
  }
  std::vector<S> xs(n - 2, d.one());
  const S base = d.from_int(n - 2);
  S a = d.one();
  for (std::int64_t t = 1;; ++t) {
    a = d.from_int(t);
    if (!d.is_zero(a) && !d.is_zero(base + a)) break;
  }
  xs.push_back(a);
  xs.push_back(-(base + a));
  return xs;
}

/// All elements of GF(p): 0, 1, ..., p-1.
inline std::vector<Fp> enumerate_field(const FieldGF& d) {
  std::vector<Fp> out;
  out.reserve(d.p);
  for (std::uint32_t v = 0; v < d.p; ++v) out.emplace_back(d.p, v);
  return out;
}

template <class S>
std::vector<S> enumerate_field(const Domain<S>& d) {
  fail(Errc::InfiniteDomain, "cannot enumerate " + d.descriptor().name());
}

}  // namespace commalg
