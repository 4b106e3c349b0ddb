#pragma once

// Scalar domains: prime fields GF(p), the rationals, and the quaternions over
// the rationals or over binary floating point. Each scalar type S comes with a
// `Domain<S>` object that supplies constants, zero tests, inverses, the center
// test and the textual syntax used by the CLI and by certificates.

#include <gmpxx.h>

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <vector>

#include "commalg/error.hpp"

namespace commalg {

using Rational = mpq_class;

inline bool is_prime(std::uint64_t p) {
  if (p < 2) return false;
  for (std::uint64_t d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

// ---------------------------------------------------------------------------
// GF(p)

/// Element of GF(p). Carries its modulus so mixed-field arithmetic is caught.
struct Fp {
  std::uint32_t p = 2;
  std::uint32_t v = 0;

  Fp() = default;
  Fp(std::uint32_t modulus, std::int64_t value) : p(modulus) {
    std::int64_t r = value % static_cast<std::int64_t>(modulus);
    if (r < 0) r += modulus;
    v = static_cast<std::uint32_t>(r);
  }

  friend bool operator==(const Fp& a, const Fp& b) { return a.p == b.p && a.v == b.v; }
};

namespace detail {
inline void same_field(const Fp& a, const Fp& b) {
  if (a.p != b.p)
    fail(Errc::DomainMismatch,
         "GF(" + std::to_string(a.p) + ") vs GF(" + std::to_string(b.p) + ")");
}
}  // namespace detail

inline Fp operator+(const Fp& a, const Fp& b) {
  detail::same_field(a, b);
  return Fp(a.p, static_cast<std::int64_t>(a.v) + b.v);
}
inline Fp operator-(const Fp& a, const Fp& b) {
  detail::same_field(a, b);
  return Fp(a.p, static_cast<std::int64_t>(a.v) - b.v);
}
inline Fp operator-(const Fp& a) { return Fp(a.p, -static_cast<std::int64_t>(a.v)); }
inline Fp operator*(const Fp& a, const Fp& b) {
  detail::same_field(a, b);
  return Fp(a.p, static_cast<std::int64_t>(static_cast<std::uint64_t>(a.v) * b.v % a.p));
}
inline Fp& operator+=(Fp& a, const Fp& b) { return a = a + b; }
inline Fp& operator-=(Fp& a, const Fp& b) { return a = a - b; }
inline Fp& operator*=(Fp& a, const Fp& b) { return a = a * b; }

inline Fp fp_pow(Fp base, std::uint64_t e) {
  Fp r(base.p, 1);
  while (e) {
    if (e & 1) r = r * base;
    base = base * base;
    e >>= 1;
  }
  return r;
}

inline Fp fp_inv(const Fp& a) {
  if (a.v == 0) fail(Errc::ZeroInverse, "inverse of 0 in GF(" + std::to_string(a.p) + ")");
  return fp_pow(a, a.p - 2);
}

// ---------------------------------------------------------------------------
// Quaternions a + bi + cj + dk over a commutative base T.

template <class T>
struct Quaternion {
  T a{}, b{}, c{}, d{};

  Quaternion() : a(0), b(0), c(0), d(0) {}
  Quaternion(T re) : a(std::move(re)), b(0), c(0), d(0) {}  // NOLINT: real embedding
  Quaternion(T a_, T b_, T c_, T d_)
      : a(std::move(a_)), b(std::move(b_)), c(std::move(c_)), d(std::move(d_)) {}

  static Quaternion i() { return {T(0), T(1), T(0), T(0)}; }
  static Quaternion j() { return {T(0), T(0), T(1), T(0)}; }
  static Quaternion k() { return {T(0), T(0), T(0), T(1)}; }

  Quaternion conj() const { return {a, T(-b), T(-c), T(-d)}; }
  T norm() const { return T(a * a + b * b + c * c + d * d); }
  T real() const { return a; }
  Quaternion imag() const { return {T(0), b, c, d}; }

  friend bool operator==(const Quaternion& x, const Quaternion& y) {
    return x.a == y.a && x.b == y.b && x.c == y.c && x.d == y.d;
  }
};

template <class T>
Quaternion<T> operator+(const Quaternion<T>& x, const Quaternion<T>& y) {
  return {T(x.a + y.a), T(x.b + y.b), T(x.c + y.c), T(x.d + y.d)};
}
template <class T>
Quaternion<T> operator-(const Quaternion<T>& x, const Quaternion<T>& y) {
  return {T(x.a - y.a), T(x.b - y.b), T(x.c - y.c), T(x.d - y.d)};
}
template <class T>
Quaternion<T> operator-(const Quaternion<T>& x) {
  return {T(-x.a), T(-x.b), T(-x.c), T(-x.d)};
}
template <class T>
Quaternion<T> operator*(const Quaternion<T>& x, const Quaternion<T>& y) {
  return {T(x.a * y.a - x.b * y.b - x.c * y.c - x.d * y.d),
          T(x.a * y.b + x.b * y.a + x.c * y.d - x.d * y.c),
          T(x.a * y.c - x.b * y.d + x.c * y.a + x.d * y.b),
          T(x.a * y.d + x.b * y.c - x.c * y.b + x.d * y.a)};
}
template <class T>
Quaternion<T> operator*(const T& s, const Quaternion<T>& x) {
  return {T(s * x.a), T(s * x.b), T(s * x.c), T(s * x.d)};
}
template <class T>
Quaternion<T> operator*(const Quaternion<T>& x, const T& s) {
  return s * x;
}
template <class T>
Quaternion<T>& operator+=(Quaternion<T>& x, const Quaternion<T>& y) { return x = x + y; }
template <class T>
Quaternion<T>& operator-=(Quaternion<T>& x, const Quaternion<T>& y) { return x = x - y; }
template <class T>
Quaternion<T>& operator*=(Quaternion<T>& x, const Quaternion<T>& y) { return x = x * y; }

template <class T>
T dot(const Quaternion<T>& x, const Quaternion<T>& y) {
  return T(x.a * y.a + x.b * y.b + x.c * y.c + x.d * y.d);
}

using QuatQ = Quaternion<Rational>;
using QuatF = Quaternion<double>;

// ---------------------------------------------------------------------------
// Runtime description of a domain (CLI flags, certificates).

struct ScalarDomain {
  enum class Kind { PrimeField, Rational, QuaternionRational, QuaternionFloat };

  Kind kind = Kind::Rational;
  std::uint32_t p = 0;
  double tolerance = 0.0;

  static ScalarDomain prime_field(std::uint32_t p) {
    require(is_prime(p), Errc::InvalidArgument, std::to_string(p) + " is not prime");
    return {Kind::PrimeField, p, 0.0};
  }
  static ScalarDomain rational() { return {Kind::Rational, 0, 0.0}; }
  static ScalarDomain quaternion_rational() { return {Kind::QuaternionRational, 0, 0.0}; }
  static ScalarDomain quaternion_float(double tol = 1e-9) {
    require(tol > 0, Errc::InvalidArgument, "tolerance must be positive");
    return {Kind::QuaternionFloat, 0, tol};
  }

  bool exact() const { return kind != Kind::QuaternionFloat; }
  bool is_quaternion() const {
    return kind == Kind::QuaternionRational || kind == Kind::QuaternionFloat;
  }

  std::string name() const {
    switch (kind) {
      case Kind::PrimeField: return "GF(" + std::to_string(p) + ")";
      case Kind::Rational: return "Q";
      case Kind::QuaternionRational: return "H(Q)";
      case Kind::QuaternionFloat: return "H(float)";
    }
    return "?";
  }

  friend bool operator==(const ScalarDomain&, const ScalarDomain&) = default;
};

// ---------------------------------------------------------------------------
// Textual scalar syntax.

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

/// Exact rational from "a", "a/b" or a plain decimal "1.25".
inline Rational parse_rational(std::string_view text) {
  std::string_view s = trim(text);
  if (s.empty()) throw SyntaxError(0, "empty number");
  bool neg = false;
  std::size_t pos = 0;
  if (s[pos] == '+' || s[pos] == '-') neg = s[pos++] == '-';
  std::string digits(s.substr(pos));
  if (digits.empty()) throw SyntaxError(pos, "missing digits");
  Rational r;
  auto slash = digits.find('/');
  auto dotpos = digits.find('.');
  auto all_digits = [](std::string_view t) {
    if (t.empty()) return false;
    for (char ch : t)
      if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
    return true;
  };
  if (slash != std::string::npos) {
    std::string num = digits.substr(0, slash), den = digits.substr(slash + 1);
    if (!all_digits(num)) throw SyntaxError(pos, "bad numerator '" + num + "'");
    if (!all_digits(den)) throw SyntaxError(pos + slash + 1, "bad denominator '" + den + "'");
    mpz_class n(num), d(den);
    if (d == 0) fail(Errc::ZeroInverse, "zero denominator");
    r = Rational(n, d);
  } else if (dotpos != std::string::npos) {
    std::string ip = digits.substr(0, dotpos), fp = digits.substr(dotpos + 1);
    if (ip.empty()) ip = "0";
    if (!all_digits(ip) || (!fp.empty() && !all_digits(fp)))
      throw SyntaxError(pos, "bad decimal '" + digits + "'");
    mpz_class scale = 1;
    for (std::size_t t = 0; t < fp.size(); ++t) scale *= 10;
    r = Rational(mpz_class(ip + fp), scale);
  } else {
    if (!all_digits(digits)) throw SyntaxError(pos, "bad integer '" + digits + "'");
    r = Rational(mpz_class(digits));
  }
  r.canonicalize();
  return neg ? Rational(-r) : r;
}

inline double parse_double(std::string_view text) {
  std::string_view s = trim(text);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.find('/') != std::string_view::npos) return parse_rational(s).get_d();
  double x = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw SyntaxError(static_cast<std::size_t>(ptr - s.data()), "bad number '" + std::string(s) + "'");
  return x;
}

inline std::string format_rational(const Rational& r) { return r.get_str(); }

inline std::string format_double(double x) {
  if (x == 0) return "0";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  (void)ec;
  return std::string(buf, ptr);
}

template <class T>
std::string format_base(const T& x) {
  if constexpr (std::is_same_v<T, double>)
    return format_double(x);
  else
    return format_rational(x);
}

template <class T>
double to_double(const T& x) {
  if constexpr (std::is_same_v<T, double>)
    return x;
  else
    return x.get_d();
}

template <class T>
bool base_is_zero(const T& x) {
  if constexpr (std::is_same_v<T, double>)
    return x == 0.0;
  else
    return sgn(x) == 0;
}

template <class T>
bool base_is_negative(const T& x) {
  if constexpr (std::is_same_v<T, double>)
    return std::signbit(x) && x != 0.0;
  else
    return sgn(x) < 0;
}

template <class T>
std::string format_quaternion(const Quaternion<T>& q) {
  std::string out;
  const T* parts[4] = {&q.a, &q.b, &q.c, &q.d};
  const char* units[4] = {"", "i", "j", "k"};
  for (int t = 0; t < 4; ++t) {
    const T& x = *parts[t];
    if (base_is_zero(x)) continue;
    bool neg = base_is_negative(x);
    T mag = neg ? T(-x) : x;
    std::string body = format_base(mag);
    if (t > 0 && body == "1") body.clear();
    if (neg)
      out += "-";
    else if (!out.empty())
      out += "+";
    out += body;
    out += units[t];
  }
  return out.empty() ? "0" : out;
}

/// Parses "a+bi+cj+dk" with any subset of terms in any order.
template <class T>
Quaternion<T> parse_quaternion(std::string_view text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  if (s.empty()) throw SyntaxError(0, "empty quaternion");
  Quaternion<T> q;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t start = pos;
    bool neg = false;
    if (s[pos] == '+' || s[pos] == '-') neg = s[pos++] == '-';
    std::size_t body_start = pos;
    while (pos < s.size()) {
      char ch = s[pos];
      if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.' || ch == '/') {
        ++pos;
      } else if ((ch == 'e' || ch == 'E') && pos > body_start) {
        ++pos;
        if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) ++pos;
      } else {
        break;
      }
    }
    std::string body = s.substr(body_start, pos - body_start);
    int unit = 0;
    if (pos < s.size() && (s[pos] == 'i' || s[pos] == 'j' || s[pos] == 'k')) {
      unit = s[pos] == 'i' ? 1 : s[pos] == 'j' ? 2 : 3;
      ++pos;
    }
    if (body.empty() && unit == 0) throw SyntaxError(start, "expected a term");
    if (pos < s.size() && s[pos] != '+' && s[pos] != '-')
      throw SyntaxError(pos, std::string("unexpected character '") + s[pos] + "'");
    T coef;
    if (body.empty()) {
      coef = T(1);
    } else if constexpr (std::is_same_v<T, double>) {
      coef = parse_double(body);
    } else {
      coef = parse_rational(body);
    }
    if (neg) coef = T(-coef);
    T* slot = unit == 0 ? &q.a : unit == 1 ? &q.b : unit == 2 ? &q.c : &q.d;
    *slot = T(*slot + coef);
  }
  return q;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Domain objects.

template <class S>
struct Domain;

template <>
struct Domain<Fp> {
  using Scalar = Fp;
  using Base = Fp;
  static constexpr bool exact = true;
  static constexpr bool commutative = true;
  static constexpr bool quaternion = false;

  std::uint32_t p = 2;

  Domain() = default;
  explicit Domain(std::uint32_t modulus) : p(modulus) {
    require(is_prime(modulus), Errc::InvalidArgument, std::to_string(modulus) + " is not prime");
  }

  Fp zero() const { return Fp(p, 0); }
  Fp one() const { return Fp(p, 1); }
  Fp from_int(std::int64_t k) const { return Fp(p, k); }
  Fp from_rational(const Rational& r) const {
    mpz_class num = r.get_num() % p, den = r.get_den() % p;
    if (num < 0) num += p;
    Fp d(p, den.get_si());
    return Fp(p, num.get_si()) * fp_inv(d);
  }
  bool is_zero(const Fp& x) const { return x.v == 0; }
  bool equal(const Fp& x, const Fp& y) const { return x == y; }
  Fp inv(const Fp& x) const { return fp_inv(x); }
  bool is_central(const Fp&) const { return true; }
  double magnitude(const Fp& x) const { return x.v ? 1.0 : 0.0; }
  double tolerance() const { return 0.0; }
  ScalarDomain descriptor() const { return ScalarDomain::prime_field(p); }

  std::string format(const Fp& x) const { return std::to_string(x.v); }
  Fp parse(std::string_view s) const { return from_rational(detail::parse_rational(s)); }
};

template <>
struct Domain<Rational> {
  using Scalar = Rational;
  using Base = Rational;
  static constexpr bool exact = true;
  static constexpr bool commutative = true;
  static constexpr bool quaternion = false;

  Rational zero() const { return Rational(0); }
  Rational one() const { return Rational(1); }
  Rational from_int(std::int64_t k) const { return Rational(static_cast<long>(k)); }
  Rational from_rational(const Rational& r) const { return r; }
  bool is_zero(const Rational& x) const { return sgn(x) == 0; }
  bool equal(const Rational& x, const Rational& y) const { return x == y; }
  Rational inv(const Rational& x) const {
    if (sgn(x) == 0) fail(Errc::ZeroInverse, "inverse of 0 in Q");
    return Rational(1 / x);
  }
  bool is_central(const Rational&) const { return true; }
  double magnitude(const Rational& x) const { return std::fabs(x.get_d()); }
  double tolerance() const { return 0.0; }
  ScalarDomain descriptor() const { return ScalarDomain::rational(); }

  std::string format(const Rational& x) const { return detail::format_rational(x); }
  Rational parse(std::string_view s) const { return detail::parse_rational(s); }
};

/// Real numbers as doubles. Internal helper domain for real linearizations of
/// quaternion problems; not exposed through the CLI.
template <>
struct Domain<double> {
  using Scalar = double;
  using Base = double;
  static constexpr bool exact = false;
  static constexpr bool commutative = true;
  static constexpr bool quaternion = false;

  double tol = 1e-9;

  Domain() = default;
  explicit Domain(double t) : tol(t) {}

  double zero() const { return 0.0; }
  double one() const { return 1.0; }
  double from_int(std::int64_t k) const { return static_cast<double>(k); }
  double from_rational(const Rational& r) const { return r.get_d(); }
  bool is_zero(double x) const { return std::fabs(x) <= tol; }
  bool equal(double x, double y) const { return std::fabs(x - y) <= tol; }
  double inv(double x) const {
    if (x == 0.0) fail(Errc::ZeroInverse, "inverse of 0");
    return 1.0 / x;
  }
  bool is_central(double) const { return true; }
  double magnitude(double x) const { return std::fabs(x); }
  double tolerance() const { return tol; }
  ScalarDomain descriptor() const { return ScalarDomain::rational(); }

  std::string format(double x) const { return detail::format_double(x); }
  double parse(std::string_view s) const { return detail::parse_double(s); }
};

template <class T>
struct Domain<Quaternion<T>> {
  using Scalar = Quaternion<T>;
  using Base = T;
  static constexpr bool exact = !std::is_same_v<T, double>;
  static constexpr bool commutative = false;
  static constexpr bool quaternion = true;

  double tol = exact ? 0.0 : 1e-9;

  Domain() = default;
  explicit Domain(double t) : tol(t) {
    if constexpr (!exact) require(t > 0, Errc::InvalidArgument, "tolerance must be positive");
  }

  Scalar zero() const { return Scalar(); }
  Scalar one() const { return Scalar(T(1)); }
  Scalar from_int(std::int64_t k) const { return Scalar(T(static_cast<long>(k))); }
  Scalar from_rational(const Rational& r) const {
    if constexpr (exact)
      return Scalar(r);
    else
      return Scalar(r.get_d());
  }
  Scalar from_base(const T& x) const { return Scalar(x); }

  bool base_is_zero(const T& x) const {
    if constexpr (exact)
      return sgn(x) == 0;
    else
      return std::fabs(x) <= tol;
  }
  bool is_zero(const Scalar& x) const {
    return base_is_zero(x.a) && base_is_zero(x.b) && base_is_zero(x.c) && base_is_zero(x.d);
  }
  bool equal(const Scalar& x, const Scalar& y) const { return is_zero(x - y); }
  Scalar inv(const Scalar& x) const {
    T n = x.norm();
    if (detail::base_is_zero(n)) fail(Errc::ZeroInverse, "inverse of the zero quaternion");
    T r = T(T(1) / n);
    return x.conj() * r;
  }
  bool is_central(const Scalar& x) const {
    return base_is_zero(x.b) && base_is_zero(x.c) && base_is_zero(x.d);
  }
  bool is_pure(const Scalar& x) const { return base_is_zero(x.a); }
  double magnitude(const Scalar& x) const {
    if constexpr (exact)
      return std::sqrt(x.norm().get_d());
    else
      return std::sqrt(x.norm());
  }
  double tolerance() const { return tol; }
  ScalarDomain descriptor() const {
    if constexpr (exact)
      return ScalarDomain::quaternion_rational();
    else
      return ScalarDomain::quaternion_float(tol);
  }

  std::string format(const Scalar& x) const { return detail::format_quaternion(x); }
  Scalar parse(std::string_view s) const { return detail::parse_quaternion<T>(s); }
};

using FieldGF = Domain<Fp>;
using FieldQ = Domain<Rational>;
using QuatRational = Domain<QuatQ>;
using QuatFloat = Domain<QuatF>;

// ---------------------------------------------------------------------------
// Scalar operations shared by every domain.

template <class S>
S inv(const Domain<S>& d, const S& s) {
  return d.inv(s);
}

template <class S>
bool is_central(const Domain<S>& d, const S& s) {
  return d.is_central(s);
}

/// N(q) = a^2 + b^2 + c^2 + d^2.
template <class T>
T quat_norm(const Quaternion<T>& q) {
  return q.norm();
}

/// Base-field number of a scalar for the Fp/Q embeddings used by polynomials.
template <class S>
S scalar_from_rational(const Domain<S>& d, const Rational& r) {
  return d.from_rational(r);
}

}  // namespace commalg
