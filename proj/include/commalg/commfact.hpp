#pragma once

// Factorizations: products of two additive commutators over fields and H,
// products of multiplicative commutators of skew involutions in SL_n(H),
// SL differences, and the 2x2 Waring-type splittings.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "commalg/canonical.hpp"
#include "commalg/freealg.hpp"

namespace commalg {

enum class PartTag { Commutator, MultCommutator, Factor, InverseFactor, Difference };

inline std::string part_tag_name(PartTag t) {
  switch (t) {
    case PartTag::Commutator: return "Commutator";
    case PartTag::MultCommutator: return "MultCommutator";
    case PartTag::Factor: return "Factor";
    case PartTag::InverseFactor: return "InverseFactor";
    case PartTag::Difference: return "Difference";
  }
  return "?";
}

inline PartTag parse_part_tag(const std::string& s) {
  for (PartTag t : {PartTag::Commutator, PartTag::MultCommutator, PartTag::Factor,
                    PartTag::InverseFactor, PartTag::Difference})
    if (part_tag_name(t) == s) return t;
  fail(Errc::InvalidArgument, "unknown part tag '" + s + "'");
}

// Side-condition flags a part may claim.
inline constexpr const char* kFlagInvertible = "invertible";
inline constexpr const char* kFlagSkew = "skew_involutions";
inline constexpr const char* kFlagSL = "special_linear";

template <class S>
struct Part {
  PartTag tag;
  std::vector<Matrix<S>> operands;
  std::map<std::string, bool> flags;
  int group = 0;  // difference rule: 1 multiplies to the minuend, 2 to the subtrahend
};

/// evaluate(poly, args) should reproduce parts[part].operands[operand].
template <class S>
struct Witness {
  std::string poly;
  std::size_t part = 0;
  std::size_t operand = 0;
  std::vector<Matrix<S>> args;
};

template <class S>
struct FactorizationCertificate {
  std::string kind;
  Matrix<S> input;
  std::vector<Part<S>> parts;
  std::string replay_rule = "product";  // or "difference"
  std::uint64_t seed = kDefaultSeed;
  double tolerance = 0.0;       // relative replay tolerance, 0 on exact domains
  double flag_tolerance = 0.0;  // skew-involution and SL checks
  std::vector<Witness<S>> witnesses;
};

template <class S>
Matrix<S> part_value(const Domain<S>& d, const Part<S>& p) {
  auto need = [&](std::size_t k) {
    require(p.operands.size() == k, Errc::ShapeMismatch,
            part_tag_name(p.tag) + " expects " + std::to_string(k) + " operands");
  };
  switch (p.tag) {
    case PartTag::Commutator:
      need(2);
      return commutator(p.operands[0], p.operands[1]);
    case PartTag::MultCommutator:
      need(2);
      return mult_commutator(d, p.operands[0], p.operands[1]);
    case PartTag::Factor:
      need(1);
      return p.operands[0];
    case PartTag::InverseFactor:
      need(1);
      return inverse(d, p.operands[0]);
    case PartTag::Difference:
      need(2);
      return p.operands[0] - p.operands[1];
  }
  fail(Errc::InvalidArgument, "bad part tag");
}

struct ReplayReport {
  bool ok = true;
  double residual = 0.0;
  std::vector<std::string> failures;

  void flag(std::string why) {
    ok = false;
    failures.push_back(std::move(why));
  }
};

namespace detail {

template <class S>
bool close(const Domain<S>& d, const Matrix<S>& ref, const Matrix<S>& got, double tol) {
  if constexpr (Domain<S>::exact)
    return ref == got;
  else
    return relative_residual(d, ref, got) <= tol;
}

template <class S>
Matrix<S> product_of(const Domain<S>& d, const std::vector<Matrix<S>>& fs, std::size_t n) {
  Matrix<S> acc = Matrix<S>::identity(d, n);
  for (const auto& f : fs) acc = acc * f;
  return acc;
}

template <class S>
void check_flags(const Domain<S>& d, const FactorizationCertificate<S>& c, std::size_t idx,
                 const Matrix<S>& value, ReplayReport& rep) {
  const Part<S>& p = c.parts[idx];
  const std::string where = "part " + std::to_string(idx) + ": ";
  for (const auto& [name, claimed] : p.flags) {
    if (!claimed) continue;
    if (name == kFlagInvertible) {
      if (!is_invertible(d, value)) rep.flag(where + "claimed invertible but is singular");
    } else if (name == kFlagSkew) {
      for (const auto& z : p.operands) {
        Matrix<S> sq = z * z + Matrix<S>::identity(d, z.rows());
        bool good;
        if constexpr (Domain<S>::exact)
          good = is_zero_matrix(d, sq);
        else
          good = max_norm(d, sq) <= c.flag_tolerance;
        if (!good) rep.flag(where + "operand is not a skew involution");
      }
    } else if (name == kFlagSL) {
      for (const auto& z : p.operands) {
        bool good = false;
        if constexpr (Domain<S>::commutative) {
          good = d.equal(determinant(d, z), d.one());
        } else if constexpr (!Domain<S>::exact) {
          good = std::fabs(dieudonne_value(d, z) - 1.0) <= c.flag_tolerance;
        } else {
          good = z.rows() == 1 && z(0, 0).norm() == 1;
        }
        if (!good) rep.flag(where + "operand is not in SL_n");
      }
    } else {
      rep.flag(where + "unknown flag '" + name + "'");
    }
  }
}

}  // namespace detail

/// Recombines the parts per the replay rule and checks every claimed flag and witness.
template <class S>
ReplayReport replay_factorization(const Domain<S>& d, const FactorizationCertificate<S>& c) {
  ReplayReport rep;
  const std::size_t n = c.input.rows();
  std::vector<Matrix<S>> values;
  try {
    for (std::size_t k = 0; k < c.parts.size(); ++k) {
      for (const auto& m : c.parts[k].operands)
        if (m.rows() != n || m.cols() != n) {
          rep.flag("part " + std::to_string(k) + ": operand has the wrong shape");
          return rep;
        }
      values.push_back(part_value(d, c.parts[k]));
      detail::check_flags(d, c, k, values.back(), rep);
    }
  } catch (const Error& e) {
    rep.flag(e.what());
    return rep;
  }
  auto compare = [&](const Matrix<S>& ref, const Matrix<S>& got, const std::string& what) {
    double r = relative_residual(d, ref, got);
    rep.residual = std::max(rep.residual, r);
    if (!detail::close(d, ref, got, c.tolerance)) rep.flag(what + " does not replay");
  };
  if (c.replay_rule == "product") {
    compare(c.input, detail::product_of(d, values, n), "product");
  } else if (c.replay_rule == "difference") {
    if (c.parts.empty() || c.parts[0].tag != PartTag::Difference) {
      rep.flag("difference rule needs a leading Difference part");
      return rep;
    }
    compare(c.input, values[0], "difference");
    std::vector<Matrix<S>> g1, g2;
    for (std::size_t k = 1; k < c.parts.size(); ++k) {
      if (c.parts[k].group == 1) g1.push_back(values[k]);
      else if (c.parts[k].group == 2) g2.push_back(values[k]);
      else rep.flag("part " + std::to_string(k) + " has no group");
    }
    if (!g1.empty()) compare(c.parts[0].operands[0], detail::product_of(d, g1, n), "minuend");
    if (!g2.empty()) compare(c.parts[0].operands[1], detail::product_of(d, g2, n), "subtrahend");
  } else {
    rep.flag("unknown replay rule '" + c.replay_rule + "'");
  }
  for (const auto& w : c.witnesses) {
    try {
      require(w.part < c.parts.size() && w.operand < c.parts[w.part].operands.size(),
              Errc::InvalidArgument, "witness points outside the parts");
      Matrix<S> got = evaluate(d, parse_poly(w.poly), w.args);
      const Matrix<S>& target = c.parts[w.part].operands[w.operand];
      double tol = std::max(c.tolerance, c.flag_tolerance);
      if (!detail::close(d, target, got, tol))
        rep.flag("witness for part " + std::to_string(w.part) + " operand " +
                 std::to_string(w.operand) + " does not evaluate to it");
    } catch (const Error& e) {
      rep.flag(std::string("witness: ") + e.what());
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Regularizing shifts.

/// Thrown when every central shift A - lambda I is singular; carries the shifts.
class NoLambdaError : public Error {
 public:
  NoLambdaError(const std::string& what, std::vector<std::string> shifts)
      : Error(Errc::NoLambda, what), shifts_(std::move(shifts)) {}

  const std::vector<std::string>& singular_shifts() const noexcept { return shifts_; }

 private:
  std::vector<std::string> shifts_;
};

namespace detail {

/// All of GF(q), or 0, 1, -1, ..., 2n, -2n in characteristic zero.
template <class S>
std::vector<S> lambda_candidates(const Domain<S>& d, std::size_t n) {
  if constexpr (std::is_same_v<S, Fp>) {
    return enumerate_field(d);
  } else {
    std::vector<S> out{d.zero()};
    for (std::int64_t k = 1; k <= static_cast<std::int64_t>(2 * n); ++k) {
      out.push_back(d.from_int(k));
      out.push_back(d.from_int(-k));
    }
    return out;
  }
}

}  // namespace detail

/// Central lambda with A - lambda I invertible. Exact domains take the first
/// candidate; floating point takes the best conditioned one.
template <class S>
S find_regularizing_lambda(const Domain<S>& d, const Matrix<S>& a) {
  detail::require_square(a, "find_regularizing_lambda");
  const std::size_t n = a.rows();
  std::vector<std::string> singular;
  std::optional<S> best;
  double best_norm = 0.0;
  for (const S& lam : detail::lambda_candidates(d, n)) {
    Matrix<S> shifted = a - Matrix<S>::scalar(d, n, lam);
    if (!is_invertible(d, shifted)) {
      singular.push_back(d.format(lam));
      continue;
    }
    if constexpr (Domain<S>::exact) {
      return lam;
    } else {
      double nrm = max_norm(d, inverse(d, shifted));
      if (!best || nrm < best_norm) {
        best = lam;
        best_norm = nrm;
      }
    }
  }
  if (best) return *best;
  std::string list;
  for (const auto& s : singular) list += (list.empty() ? "" : ", ") + s;
  throw NoLambdaError("A - lambda I is singular for every lambda in {" + list + "}",
                      std::move(singular));
}

/// Companion matrix of the monic polynomial c_0 + c_1 x + ... + x^n.
template <class S>
Matrix<S> companion(const Domain<S>& d, const std::vector<S>& monic) {
  require(monic.size() >= 2, Errc::InvalidArgument, "companion needs degree >= 1");
  const std::size_t n = monic.size() - 1;
  Matrix<S> c = Matrix<S>::zeros(d, n, n);
  for (std::size_t i = 1; i < n; ++i) c(i, i - 1) = d.one();
  for (std::size_t i = 0; i < n; ++i) c(i, n - 1) = -monic[i];
  return c;
}

// ---------------------------------------------------------------------------
// Fields.

template <class S>
struct MatrixPair {
  Matrix<S> first, second;
};

namespace detail {

/// Nonzero w with sum w_i c_i = 0.
template <class S>
std::optional<std::vector<S>> nonzero_annihilator(const Domain<S>& d, const std::vector<S>& c) {
  std::vector<std::size_t> nz;
  for (std::size_t i = 0; i < c.size(); ++i)
    if (!d.is_zero(c[i])) nz.push_back(i);
  std::vector<S> w(c.size(), d.one());
  if (nz.empty()) return w;
  if (nz.size() == 1) return std::nullopt;
  const std::size_t last = nz.back();
  S s = d.zero();
  for (std::size_t t = 0; t + 1 < nz.size(); ++t) s = s + c[nz[t]];
  if (d.is_zero(s)) {
    if (field_size(d) == 2) return std::nullopt;
    w[nz[0]] = d.from_int(2);
    s = s + c[nz[0]];
  }
  w[last] = -(s * d.inv(c[last]));
  return w;
}

/// A = W^-1 (W A) with W a weighted full-cycle permutation, trace(W A) = 0.
template <class S>
std::optional<MatrixPair<S>> cycle_pair(const Domain<S>& d, const Matrix<S>& a, std::size_t shift,
                                        bool avoid_scalar) {
  const std::size_t n = a.rows();
  std::vector<S> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = a((i + shift) % n, i);
  auto w = nonzero_annihilator(d, c);
  if (!w) return std::nullopt;
  Matrix<S> wm = Matrix<S>::zeros(d, n, n), winv = Matrix<S>::zeros(d, n, n);
  for (std::size_t i = 0; i < n; ++i) {
    wm(i, (i + shift) % n) = (*w)[i];
    winv((i + shift) % n, i) = d.inv((*w)[i]);
  }
  Matrix<S> second = wm * a;
  if (avoid_scalar && is_scalar_matrix(d, second) && !is_zero_matrix(d, second))
    return std::nullopt;
  return MatrixPair<S>{winv, second};
}

template <class S>
MatrixPair<S> trace_zero_pair(const Domain<S>& d, const Matrix<S>& a, Rng& rng, bool avoid_scalar) {
  static_assert(Domain<S>::commutative, "trace_zero_pair_field works over fields");
  detail::require_square(a, "trace_zero_pair_field");
  const std::size_t n = a.rows();
  require(n >= 2, Errc::InvalidArgument, "trace_zero_pair_field needs n >= 2");
  auto try_cycles = [&](const Matrix<S>& m) -> std::optional<MatrixPair<S>> {
    for (std::size_t s = 1; s < n; ++s)
      if (std::gcd(s, n) == 1)
        if (auto pr = cycle_pair(d, m, s, avoid_scalar)) return pr;
    return std::nullopt;
  };
  if (auto pr = try_cycles(a)) return *pr;
  for (int attempt = 0; attempt < 64; ++attempt) {
    Matrix<S> q = random_invertible(d, n, rng);
    Matrix<S> qinv = inverse(d, q);
    if (auto pr = try_cycles(qinv * a * q))
      return {q * pr->first * qinv, q * pr->second * qinv};
  }
  if (field_size(d) == 2 && n == 2)
    fail(Errc::Degenerate2x2GF2, "no weighted cycle splits this matrix over GF(2)");
  fail(Errc::RetryExhausted, "trace_zero_pair_field exhausted its retries");
}

}  // namespace detail

/// A = B C with trace(B) = trace(C) = 0 and B invertible.
template <class S>
MatrixPair<S> trace_zero_pair_field(const Domain<S>& d, const Matrix<S>& a, Rng& rng) {
  return detail::trace_zero_pair(d, a, rng, false);
}

template <class S>
MatrixPair<S> trace_zero_pair_field(const Domain<S>& d, const Matrix<S>& a) {
  Rng rng(kDefaultSeed);
  return trace_zero_pair_field(d, a, rng);
}

/// [X, Y] = M with X = diag(0, 1, ..., n-1) and Y_ij = M_ij / (i - j).
template <class S>
CommutatorPair<S> commutator_from_zero_diagonal(const Domain<S>& d, const Matrix<S>& m) {
  static_assert(Domain<S>::commutative, "commutator_from_zero_diagonal works over fields");
  detail::require_square(m, "commutator_from_zero_diagonal");
  const std::size_t n = m.rows();
  for (std::size_t i = 0; i < n; ++i)
    require(d.is_zero(m(i, i)), Errc::InvalidArgument, "diagonal must be zero");
  const std::uint64_t q = field_size(d);
  if (q != 0 && q < n)
    fail(Errc::FieldTooSmall, "need " + std::to_string(n) + " distinct field elements");
  Matrix<S> x = Matrix<S>::zeros(d, n, n), y = Matrix<S>::zeros(d, n, n);
  for (std::size_t i = 0; i < n; ++i) x(i, i) = d.from_int(static_cast<std::int64_t>(i));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && !d.is_zero(m(i, j))) y(i, j) = m(i, j) * d.inv(x(i, i) - x(j, j));
  return {x, y};
}

namespace detail {

template <class S>
FactorizationCertificate<S> two_brackets([[maybe_unused]] const Domain<S>& d, std::string kind, const Matrix<S>& a,
                                         const CommutatorPair<S>& first,
                                         const CommutatorPair<S>& second, std::uint64_t seed) {
  FactorizationCertificate<S> cert;
  cert.kind = std::move(kind);
  cert.input = a;
  cert.parts.push_back({PartTag::Commutator, {first.x, first.y}, {{kFlagInvertible, true}}});
  cert.parts.push_back({PartTag::Commutator, {second.x, second.y}, {}});
  cert.seed = seed;
  if constexpr (!Domain<S>::exact) cert.tolerance = 1e-6;
  return cert;
}

template <class S>
CommutatorPair<S> conjugate_pair(const Domain<S>& d, const CommutatorPair<S>& c,
                                 const Matrix<S>& p) {
  Matrix<S> pinv = inverse(d, p);
  return {p * c.x * pinv, p * c.y * pinv};
}

/// [X, Y] = M for a trace-zero field matrix M that is zero or noncentral.
template <class S>
CommutatorPair<S> field_commutator(const Domain<S>& d, const Matrix<S>& m, Rng& rng) {
  auto zd = zero_diagonal_form(d, m, rng);
  return conjugate_pair(d, commutator_from_zero_diagonal(d, zd.canonical), zd.conjugator);
}

}  // namespace detail

/// A = [X1, Y1] [X2, Y2] over GF(q) with q > n or over Q; first bracket invertible.
template <class S>
FactorizationCertificate<S> two_commutators_field(const Domain<S>& d, const Matrix<S>& a,
                                                  Rng& rng, std::uint64_t seed = kDefaultSeed) {
  static_assert(Domain<S>::commutative, "two_commutators_field works over fields");
  detail::require_square(a, "two_commutators_field");
  const std::size_t n = a.rows();
  require(n >= 2, Errc::InvalidArgument, "two_commutators_field needs n >= 2");
  const std::uint64_t q = field_size(d);
  if (q != 0 && q <= n)
    fail(Errc::FieldTooSmall, "need q > n, got q = " + std::to_string(q));
  auto pr = detail::trace_zero_pair(d, a, rng, true);
  auto first = detail::field_commutator(d, pr.first, rng);
  auto second = detail::field_commutator(d, pr.second, rng);
  return detail::two_brackets(d, "two_commutators_field", a, first, second, seed);
}

template <class S>
FactorizationCertificate<S> two_commutators_field(const Domain<S>& d, const Matrix<S>& a) {
  Rng rng(kDefaultSeed);
  return two_commutators_field(d, a, rng, kDefaultSeed);
}

// ---------------------------------------------------------------------------
// Quaternions.

template <class S>
struct TwoCommutators {
  CommutatorPair<S> first, second;
};

namespace detail {

/// lambda I = [a1 I, b1 I] [a2 I, b2 I]; zero uses [iI, jI] * [0, 0].
template <class T>
TwoCommutators<Quaternion<T>> scalar_two_commutators(const Domain<Quaternion<T>>& d,
                                                     std::size_t n, const Quaternion<T>& lam) {
  using S = Quaternion<T>;
  auto sc = [&](const S& x) { return Matrix<S>::scalar(d, n, x); };
  if (d.is_zero(lam)) {
    Matrix<S> z = Matrix<S>::zeros(d, n, n);
    return {{sc(S::i()), sc(S::j())}, {z, z}};
  }
  auto o = quaternion_scalar_oracle(d, lam);
  return {{sc(o.a1), sc(o.b1)}, {sc(o.a2), sc(o.b2)}};
}

template <class T>
TwoCommutators<Quaternion<T>> q_gt_n_step(const Domain<Quaternion<T>>& d,
                                          const Matrix<Quaternion<T>>& a) {
  using S = Quaternion<T>;
  using M = Matrix<S>;
  const std::size_t n = a.rows();
  if (n == 1 || is_central_matrix(d, a)) return scalar_two_commutators(d, n, a(0, 0));
  auto rowen = rowen_form(d, a);
  const M& c0 = rowen.canonical;
  const std::size_t m = n - 1;
  M b = c0.block(0, 1, 1, m), col = c0.block(1, 0, m, 1), e = c0.block(1, 1, m, m);
  auto sub = q_gt_n_step(d, e);
  M g = commutator(sub.first.x, sub.first.y);
  // d = [d1, d2] = [i, j] = 2k.
  const S d1 = S::i(), d2 = S::j();
  const S dinv = d.inv(d1 * d2 - d2 * d1);
  auto one = [&](const S& x) { return M::scalar(d, 1, x); };
  M x1 = direct_sum(one(d1), sub.first.x), y1 = direct_sum(one(d2), sub.first.y);
  const M& e3 = sub.second.x;
  const M& e4 = sub.second.y;
  const S lam = find_regularizing_lambda(d, e3);
  M r = inverse(d, e3 - M::scalar(d, m, lam));
  M x2 = direct_sum(one(lam), e3);
  M y2 = block2x2(M::zeros(d, 1, 1), -(dinv * b * r), r * inverse(d, g) * col, e4);
  const M& p = rowen.conjugator;
  return {conjugate_pair(d, {x1, y1}, p), conjugate_pair(d, {x2, y2}, p)};
}

template <class S>
void check_residual(const Domain<S>& d, const FactorizationCertificate<S>& cert) {
  if constexpr (!Domain<S>::exact) {
    auto rep = replay_factorization(d, cert);
    if (!rep.ok)
      fail(Errc::NormResidual, cert.kind + " replay residual " +
                                   detail::format_double(rep.residual) + " exceeds " +
                                   detail::format_double(cert.tolerance));
  }
}

}  // namespace detail

/// A = [diag(d1, E1), diag(d2, E2)] * [diag(lambda, E3), Y] after a zero-corner
/// similarity, recursing on E; the first bracket is invertible.
template <class T>
FactorizationCertificate<Quaternion<T>> q_gt_n_recursion(const Domain<Quaternion<T>>& d,
                                                         const Matrix<Quaternion<T>>& a,
                                                         std::uint64_t seed = kDefaultSeed) {
  detail::require_square(a, "q_gt_n_recursion");
  require(a.rows() >= 2, Errc::InvalidArgument, "q_gt_n_recursion needs n >= 2");
  auto tc = detail::q_gt_n_step(d, a);
  auto cert = detail::two_brackets(d, "q_gt_n_recursion", a, tc.first, tc.second, seed);
  detail::check_residual(d, cert);
  return cert;
}

/// Product of two commutators over H. Nonsingular noncentral A with n >= 3
/// goes through L H U; the rest through the zero-corner recursion.
template <class T>
FactorizationCertificate<Quaternion<T>> two_commutators_quaternion(
    const Domain<Quaternion<T>>& d, const Matrix<Quaternion<T>>& a, Rng& rng,
    std::uint64_t seed = kDefaultSeed) {
  using S = Quaternion<T>;
  using M = Matrix<S>;
  detail::require_square(a, "two_commutators_quaternion");
  const std::size_t n = a.rows();
  require(n >= 2, Errc::InvalidArgument, "two_commutators_quaternion needs n >= 2");
  if (is_central_matrix(d, a)) {
    auto tc = detail::scalar_two_commutators(d, n, a(0, 0));
    return detail::two_brackets(d, "two_commutators_quaternion", a, tc.first, tc.second, seed);
  }
  if (n < 3 || !is_invertible(d, a)) {
    auto cert = q_gt_n_recursion(d, a, seed);
    cert.kind = "two_commutators_quaternion";
    return cert;
  }
  std::vector<S> xs, hs;
  const auto units = zero_sum_units(FieldQ{}, static_cast<int>(n - 1));
  double mu = 1.0;
  if constexpr (!Domain<S>::exact) {
    // Floating point: scale the pivots to the size of Ddet(A)^(1/n).
    double logs = 0.0;
    for (const auto& x : units) logs += std::log(std::fabs(x.get_d()));
    const double target = std::log(dieudonne_value(d, a)) / static_cast<double>(n);
    mu = std::exp(target / 2.0 - logs / static_cast<double>(units.size()));
  }
  for (const auto& x : units) {
    if constexpr (Domain<S>::exact)
      xs.push_back(d.from_rational(x));
    else
      xs.push_back(S(mu * x.get_d()));
    hs.push_back(xs.back() * xs.back());
  }
  auto lhu = lhu_decompose(d, a, hs, rng);
  auto o = quaternion_scalar_oracle(d, lhu.last);
  if constexpr (!Domain<S>::exact) {
    // Equal norms for the two pure factors of h_n.
    const double s = std::pow(lhu.last.norm(), 0.25);
    o.b1 = s * o.b1;
    o.b2 = (1.0 / s) * o.b2;
  }
  const S hp = o.a1 * o.b1 - o.b1 * o.a1, hpp = o.a2 * o.b2 - o.b2 * o.a2;
  std::vector<S> d1(xs), d2(xs);
  d1.push_back(hp);
  d2.push_back(hpp);
  M l1 = lhu.lower * M::diagonal(d, d1), u1 = M::diagonal(d, d2) * lhu.upper;
  const std::size_t m = n - 1;
  M l2 = l1.block(0, 0, m, m), ell = l1.block(m, 0, 1, m);
  M u2 = u1.block(0, 0, m, m), uc = u1.block(0, m, m, 1);
  auto p = poly_from_roots(d, xs);
  auto c1 = block_merge_similarity_lower(d, l2, ell, hp, p);
  auto c2 = block_merge_similarity(d, u2, uc, hpp, p);
  auto lc = tri_zero_trace_commutator(d, l2), ucm = tri_zero_trace_commutator(d, u2);
  auto one = [&](const S& x) { return M::scalar(d, 1, x); };
  CommutatorPair<S> first{direct_sum(lc.x, one(o.a1)), direct_sum(lc.y, one(o.b1))};
  CommutatorPair<S> second{direct_sum(ucm.x, one(o.a2)), direct_sum(ucm.y, one(o.b2))};
  first = detail::conjugate_pair(d, first, lhu.conjugator * c1.conjugator);
  second = detail::conjugate_pair(d, second, lhu.conjugator * c2.conjugator);
  auto cert = detail::two_brackets(d, "two_commutators_quaternion", a, first, second, seed);
  detail::check_residual(d, cert);
  return cert;
}

template <class T>
FactorizationCertificate<Quaternion<T>> two_commutators_quaternion(
    const Domain<Quaternion<T>>& d, const Matrix<Quaternion<T>>& a) {
  Rng rng(kDefaultSeed);
  return two_commutators_quaternion(d, a, rng, kDefaultSeed);
}

// ---------------------------------------------------------------------------
// Skew involutions in SL_n(H).

namespace detail {

/// [[0, a], [-a^-1, 0]]: squares to -I; with K = [[0, 1], [-1, 0]] it gives
/// S K S^-1 K^-1 = diag(a^2, a^-2).
inline Matrix<QuatF> skew_block(const QuatFloat& d, const QuatF& a) {
  return Matrix<QuatF>::from_rows(d, {{QuatF(0.0), a}, {-d.inv(a), QuatF(0.0)}});
}

/// (S, K) with S K S^-1 K^-1 = diag(prefix..., pairs...): an optional (-1)
/// corner realized by (i, j), then blocks from the given a's.
inline CommutatorPair<QuatF> skew_pair(const QuatFloat& d, bool corner,
                                       const std::vector<QuatF>& as) {
  Matrix<QuatF> s(0, 0, QuatF()), k(0, 0, QuatF());
  if (corner) {
    s = Matrix<QuatF>::scalar(d, 1, QuatF::i());
    k = Matrix<QuatF>::scalar(d, 1, QuatF::j());
  }
  const auto kb = Matrix<QuatF>::from_rows(d, {{QuatF(0.0), QuatF(1.0)}, {QuatF(-1.0), QuatF(0.0)}});
  for (const auto& a : as) {
    s = s.rows() ? direct_sum(s, skew_block(d, a)) : skew_block(d, a);
    k = k.rows() ? direct_sum(k, kb) : kb;
  }
  return {s, k};
}

}  // namespace detail

/// A in SL_n(H) as a product of at most two multiplicative commutators of skew involutions.
inline FactorizationCertificate<QuatF> skew_commutators_sl(const QuatFloat& d,
                                                           const Matrix<QuatF>& a, Rng& rng,
                                                           std::uint64_t seed = kDefaultSeed) {
  using M = Matrix<QuatF>;
  detail::require_square(a, "skew_commutators_sl");
  const std::size_t n = a.rows();
  require(n >= 2, Errc::InvalidArgument, "skew_commutators_sl needs n >= 2");
  if (!sl_test(d, a)) fail(Errc::NotSL, "Dieudonne value " + detail::format_double(dieudonne_value(d, a)));
  FactorizationCertificate<QuatF> cert;
  cert.kind = "skew_commutators_sl";
  cert.input = a;
  cert.seed = seed;
  cert.tolerance = 1e-6;
  cert.flag_tolerance = 1e-7;
  auto push = [&](const M& s, const M& k) {
    cert.parts.push_back({PartTag::MultCommutator, {s, k}, {{kFlagSkew, true}}});
  };
  const M id = M::identity(d, n);
  if (approx_equal(d, a, id)) {
    push(M::scalar(d, n, QuatF::i()), M::scalar(d, n, QuatF::i()));
    return cert;
  }
  if (approx_equal(d, a, -id)) {
    push(M::scalar(d, n, QuatF::i()), M::scalar(d, n, QuatF::j()));
    return cert;
  }
  auto lhu = lhu_decompose(d, a, std::vector<QuatF>(n - 1, QuatF(1.0)), rng);
  QuatF t = lhu.last;
  t = (1.0 / std::sqrt(t.norm())) * t;
  auto xy = unit_quaternion_commutator(d, t);
  const bool odd = n % 2 == 1;
  const std::size_t off = odd ? 1 : 0, pairs = (n - off) / 2;
  for (int attempt = 0; attempt < 16; ++attempt) {
    // Free reals: h_i distinct outside {0, +-1}, and the scale c != 1 of y.
    const double c = 2.0 + attempt;
    std::vector<double> hs;
    for (std::size_t i = 0; i + 1 < pairs; ++i) hs.push_back(2.0 + attempt + static_cast<double>(i) + 1.0 / 3.0);
    const QuatF cy = c * xy.second;
    std::vector<QuatF> u(n, QuatF(1.0)), v;
    if (odd) {
      u[0] = QuatF(-1.0);
      v.push_back(QuatF(-1.0));
    }
    for (double h : hs) {
      v.push_back(QuatF(h * h));
      v.push_back(QuatF(1.0 / (h * h)));
    }
    v.push_back(d.inv(cy));
    v.push_back(cy);
    u[n - 1] = xy.first;
    std::vector<QuatF> vinv;
    for (const auto& e : v) vinv.push_back(d.inv(e));
    M um = M::diagonal(d, u), vm = M::diagonal(d, v);
    M m1 = M::diagonal(d, [&] {
             std::vector<QuatF> ui;
             for (const auto& e : u) ui.push_back(d.inv(e));
             return ui;
           }()) *
           lhu.lower * um * vm;
    M m2 = M::diagonal(d, vinv) * lhu.upper;
    SimilarityCertificate<QuatF> s1, s2;
    try {
      s1 = diagonalize_tri_distinct(d, m1, DiagMode::Nonconjugate);
      s2 = diagonalize_tri_distinct(d, m2, DiagMode::Nonconjugate);
    } catch (const Error& e) {
      if (e.code() == Errc::ConjugateDiagonal) continue;
      throw;
    }
    const QuatF k = std::sqrt(c) * quat_sqrt(d, xy.second);
    std::vector<QuatF> a1, a2;
    for (double h : hs) {
      a1.push_back(QuatF(h));
      a2.push_back(QuatF(1.0 / h));
    }
    a1.push_back(d.inv(k));
    a2.push_back(k);
    auto sk1 = detail::skew_pair(d, odd, a1);
    auto sk2 = detail::skew_pair(d, odd, a2);
    auto f1 = detail::conjugate_pair(d, sk1, lhu.conjugator * um * s1.conjugator);
    auto f2 = detail::conjugate_pair(d, sk2, lhu.conjugator * s2.conjugator);
    push(f1.x, f1.y);
    push(f2.x, f2.y);
    detail::check_residual(d, cert);
    return cert;
  }
  fail(Errc::RetryExhausted, "no choice of free reals gave a nonconjugate diagonal");
}

inline FactorizationCertificate<QuatF> skew_commutators_sl(const QuatFloat& d,
                                                           const Matrix<QuatF>& a) {
  Rng rng(kDefaultSeed);
  return skew_commutators_sl(d, a, rng, kDefaultSeed);
}

// ---------------------------------------------------------------------------
// SL differences.

namespace detail {

/// Random element of SL_n: unit upper times unit lower.
template <class S>
Matrix<S> random_unipotent_product(const Domain<S>& d, std::size_t n, Rng& rng) {
  Matrix<S> u = Matrix<S>::identity(d, n), l = Matrix<S>::identity(d, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      u(i, j) = random_scalar(d, rng);
      l(j, i) = random_scalar(d, rng);
    }
  return u * l;
}

}  // namespace detail

/// A = B - C with B, C in SL_n. B = G (I + t e_ij) or (I + t e_ij) G with
/// G in SL_n (G = I first), scanning positions i != j.
template <class S>
MatrixPair<S> sl_difference(const Domain<S>& d, const Matrix<S>& a, Rng& rng) {
  detail::require_square(a, "sl_difference");
  const std::size_t n = a.rows();
  require(n >= 2, Errc::InvalidArgument, "sl_difference needs n >= 2");
  const Matrix<S> id = Matrix<S>::identity(d, n);
  if (is_zero_matrix(d, a)) return {id, id};
  for (int attempt = 0; attempt < 64; ++attempt) {
    Matrix<S> g = attempt == 0 ? id : detail::random_unipotent_product(d, n, rng);
    for (std::size_t slot = 0; slot < 2 * n * n; ++slot) {
      const std::size_t side = slot / (n * n), i = slot / n % n, j = slot % n;
      if (i == j) continue;
      if constexpr (Domain<S>::commutative) {
        // det(G (I + t e_ij) - A) = alpha t + beta.
        auto b_at = [&](const S& t) {
          Matrix<S> e = id;
          e(i, j) = t;
          return side == 0 ? g * e : e * g;
        };
        const S beta = determinant(d, b_at(d.zero()) - a);
        const S alpha = determinant(d, b_at(d.one()) - a) - beta;
        std::optional<S> t;
        if (!d.is_zero(alpha))
          t = (d.one() - beta) * d.inv(alpha);
        else if (d.equal(beta, d.one()))
          t = d.zero();
        if (!t) continue;
        Matrix<S> b = b_at(*t);
        return {b, b - a};
      } else {
        static_assert(!Domain<S>::exact, "sl_difference over H needs floating point");
        // Ddet(M + u x e_j^T) = Ddet(M) |1 + (M^-1 u)_j x|, and the row version
        // likewise, so x has a closed form once M = G - A is invertible.
        const Matrix<S> m = g - a;
        const double dm = dieudonne_value(d, m);
        if (dm < 1e-8) continue;
        const Matrix<S> minv = inverse(d, m);
        QuatF coef(0.0);
        for (std::size_t k = 0; k < n; ++k)
          coef = coef + (side == 0 ? minv(j, k) * g(k, i) : g(j, k) * minv(k, i));
        if (coef.norm() < 1e-12) continue;
        const QuatF x = side == 0 ? d.inv(coef) * QuatF(1.0 / dm - 1.0)
                                  : QuatF(1.0 / dm - 1.0) * d.inv(coef);
        Matrix<S> e = id;
        e(i, j) = x;
        Matrix<S> b = side == 0 ? g * e : e * g;
        Matrix<S> c = b - a;
        if (std::fabs(dieudonne_value(d, c) - 1.0) <= 1e-10 &&
            std::fabs(dieudonne_value(d, b) - 1.0) <= 1e-10)
          return {b, c};
      }
    }
  }
  fail(Errc::RetryExhausted, "every shear position left det(B - A) constant");
}

template <class S>
MatrixPair<S> sl_difference(const Domain<S>& d, const Matrix<S>& a) {
  Rng rng(kDefaultSeed);
  return sl_difference(d, a, rng);
}

template <class S>
FactorizationCertificate<S> sl_difference_certificate(const Domain<S>& d, const Matrix<S>& a,
                                                      Rng& rng,
                                                      std::uint64_t seed = kDefaultSeed) {
  auto pr = sl_difference(d, a, rng);
  FactorizationCertificate<S> cert;
  cert.kind = "sl_difference";
  cert.input = a;
  cert.replay_rule = "difference";
  cert.parts.push_back({PartTag::Difference, {pr.first, pr.second}, {{kFlagSL, true}}});
  cert.seed = seed;
  if constexpr (!Domain<S>::exact) {
    cert.tolerance = 1e-8;
    cert.flag_tolerance = 1e-7;
  }
  return cert;
}

// ---------------------------------------------------------------------------
// Differences of products of commutators with polynomial-image operands.

struct WitnessShape {
  int arity;   // 2: c [x1, x2]; 3: c S_3, evaluated at (1, x2, x3)
  Rational scale;
};

/// Recognizes c [x1, x2] and c S_3; anything else is refused.
inline WitnessShape witness_shape(const FreePoly& f) {
  require(f.characteristic() == 0, Errc::UnsupportedPolynomial, "need real coefficients");
  const int m = f.nvars();
  if (!f.is_zero() && is_multilinear(f) && m >= 2 && m <= 4) {
    Word ident;
    for (int v = 1; v <= m; ++v) ident.push_back(v);
    for (const auto& t : f.terms())
      if (t.word == ident && f == t.coeff * standard_poly(m)) {
        if (m == 4) fail(Errc::UnsupportedPolynomial, "S_4 vanishes identically on H");
        return {m, t.coeff};
      }
  }
  fail(Errc::UnsupportedPolynomial,
       to_string(f) + " is outside the supported family {c[x1,x2], c S_3}");
}

namespace detail {

/// Substitution tuple with p(args) = Z for a skew involution Z.
inline std::vector<Matrix<QuatF>> skew_witness(const QuatFloat& d, const WitnessShape& w,
                                               const Matrix<QuatF>& z) {
  using M = Matrix<QuatF>;
  const std::size_t n = z.rows();
  std::size_t r = 0;
  auto form = skew_involution_form(d, z, {}, &r);
  // +-i = [+-j / (2c), k].
  const double half = 1.0 / (2.0 * w.scale.get_d());
  std::vector<QuatF> first;
  for (std::size_t t = 0; t < n; ++t) first.push_back((t < r ? half : -half) * QuatF::j());
  const M& p = form.conjugator;
  const M pinv = inverse(d, p);
  M x1 = p * M::diagonal(d, first) * pinv;
  M x2 = p * M::scalar(d, n, QuatF::k()) * pinv;
  if (w.arity == 2) return {x1, x2};
  return {M::identity(d, n), x1, x2};
}

}  // namespace detail

/// A = A1 A2 A1^-1 A2^-1 A3 A4 A3^-1 A4^-1 - A5 A6 A5^-1 A6^-1 A7 A8 A7^-1 A8^-1
/// with A_i in p_i(M_n(H)), each A_i witnessed by an explicit substitution.
inline FactorizationCertificate<QuatF> theorem_real_decomposition(
    const QuatFloat& d, const Matrix<QuatF>& a, const std::vector<FreePoly>& polys, Rng& rng,
    std::uint64_t seed = kDefaultSeed) {
  using M = Matrix<QuatF>;
  require(polys.size() == 8, Errc::ArityMismatch, "expected 8 polynomials");
  std::vector<WitnessShape> shapes;
  for (const auto& p : polys) shapes.push_back(witness_shape(p));
  detail::require_square(a, "theorem_real_decomposition");
  const std::size_t n = a.rows();
  auto diff = sl_difference(d, a, rng);
  FactorizationCertificate<QuatF> cert;
  cert.kind = "theorem_real_decomposition";
  cert.input = a;
  cert.replay_rule = "difference";
  cert.seed = seed;
  cert.tolerance = 1e-5;
  cert.flag_tolerance = 1e-7;
  cert.parts.push_back({PartTag::Difference, {diff.first, diff.second}, {{kFlagSL, true}}});
  int group = 1;
  for (const M* half : {&diff.first, &diff.second}) {
    auto f = skew_commutators_sl(d, *half, rng, seed);
    while (f.parts.size() < 2) {
      M ii = M::scalar(d, n, QuatF::i());
      f.parts.push_back({PartTag::MultCommutator, {ii, ii}, {{kFlagSkew, true}}});
    }
    for (auto& p : f.parts) {
      p.group = group;
      cert.parts.push_back(p);
    }
    ++group;
  }
  for (std::size_t idx = 0; idx < 8; ++idx) {
    std::size_t part = 1 + idx / 2, operand = idx % 2;
    const M& z = cert.parts[part].operands[operand];
    cert.witnesses.push_back(
        {to_string(polys[idx]), part, operand, detail::skew_witness(d, shapes[idx], z)});
  }
  auto rep = replay_factorization(d, cert);
  if (!rep.ok) fail(Errc::NormResidual, "theorem_real_decomposition: " + rep.failures.front());
  return cert;
}

// ---------------------------------------------------------------------------
// 2x2 splittings.

enum class WaringCase { Diagonal, BNonzero, CNonzero };

inline std::string waring_case_name(WaringCase c) {
  switch (c) {
    case WaringCase::Diagonal: return "b=c=0";
    case WaringCase::BNonzero: return "b!=0";
    case WaringCase::CNonzero: return "c!=0";
  }
  return "?";
}

template <class S>
struct WaringSplit {
  WaringCase which;
  FactorizationCertificate<S> cert;
  std::vector<S> thetas;  // generator of the subfield each non-conjugator factor lives over
};

/// The displayed identity for a forced case (which must apply).
template <class S>
WaringSplit<S> waring_case_split(const Domain<S>& d, const Matrix<S>& m, WaringCase which) {
  require(m.rows() == 2 && m.cols() == 2, Errc::ShapeMismatch, "waring_split_2x2 needs a 2x2 matrix");
  const S a = m(0, 0), b = m(0, 1), c = m(1, 0), dd = m(1, 1);
  const S zero = d.zero(), one = d.one();
  auto mk = [&](S p, S q, S r, S s) { return Matrix<S>::from_rows(d, {{p, q}, {r, s}}); };
  WaringSplit<S> out{which, {}, {}};
  out.cert.kind = "waring_split_2x2";
  out.cert.input = m;
  if constexpr (!Domain<S>::exact) out.cert.tolerance = 1e-9;
  auto& parts = out.cert.parts;
  switch (which) {
    case WaringCase::Diagonal:
      require(d.is_zero(b) && d.is_zero(c), Errc::HypothesisViolated, "matrix is not diagonal");
      parts.push_back({PartTag::Factor, {mk(zero, a, one, zero)}, {}});
      parts.push_back({PartTag::Factor, {mk(zero, dd, one, zero)}, {}});
      out.thetas = {a, dd};
      break;
    case WaringCase::BNonzero: {
      require(!d.is_zero(b), Errc::HypothesisViolated, "b = 0");
      const S bi = d.inv(b);
      const S t1 = bi * a - dd * bi, t2 = c * b - dd * bi * a * b;
      Matrix<S> q = mk(bi, zero, bi * a, one);
      parts.push_back({PartTag::Factor, {mk(-one, zero, t1, one)}, {}});
      parts.push_back({PartTag::InverseFactor, {q}, {}});
      parts.push_back({PartTag::Factor, {mk(zero, -one, t2, zero)}, {}});
      parts.push_back({PartTag::Factor, {q}, {}});
      out.thetas = {t1, t2};
      break;
    }
    case WaringCase::CNonzero: {
      require(!d.is_zero(c), Errc::HypothesisViolated, "c = 0");
      const S ci = d.inv(c);
      const S t1 = a * ci * dd * c - b * c, t2 = ci * dd - a * ci;
      Matrix<S> r = mk(one, -(a * ci), zero, ci);
      parts.push_back({PartTag::InverseFactor, {r}, {}});
      parts.push_back({PartTag::Factor, {mk(zero, t1, one, zero)}, {}});
      parts.push_back({PartTag::Factor, {r}, {}});
      parts.push_back({PartTag::Factor, {mk(one, t2, zero, -one)}, {}});
      out.thetas = {t1, t2};
      break;
    }
  }
  return out;
}

/// First applicable case in the order b = c = 0, b != 0, c != 0.
template <class S>
WaringSplit<S> waring_split_2x2(const Domain<S>& d, const Matrix<S>& m) {
  require(m.rows() == 2 && m.cols() == 2, Errc::ShapeMismatch, "waring_split_2x2 needs a 2x2 matrix");
  if (d.is_zero(m(0, 1)) && d.is_zero(m(1, 0))) return waring_case_split(d, m, WaringCase::Diagonal);
  if (!d.is_zero(m(0, 1))) return waring_case_split(d, m, WaringCase::BNonzero);
  return waring_case_split(d, m, WaringCase::CNonzero);
}

}  // namespace commalg
