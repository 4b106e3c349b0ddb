#pragma once

// Noncommutative polynomials in x1, x2, ... with coefficients in Q or GF(p).

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "commalg/matrix.hpp"

namespace commalg {

using Word = std::vector<int>;

struct Term {
  Rational coeff;
  Word word;
  friend bool operator==(const Term&, const Term&) = default;
};

/// Length first, then lexicographic.
inline bool word_less(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

class FreePoly {
 public:
  /// p = 0 means rational coefficients, otherwise GF(p).
  explicit FreePoly(std::uint32_t p = 0) : p_(p) {
    if (p) require(is_prime(p), Errc::InvalidArgument, std::to_string(p) + " is not prime");
  }
  FreePoly(std::uint32_t p, std::vector<Term> terms) : FreePoly(p) {
    terms_ = std::move(terms);
    canonicalize();
  }

  static FreePoly variable(int i, std::uint32_t p = 0) { return FreePoly(p, {{Rational(1), {i}}}); }
  static FreePoly constant(const Rational& c, std::uint32_t p = 0) { return FreePoly(p, {{c, {}}}); }

  std::uint32_t characteristic() const { return p_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  int nvars() const {
    int m = 0;
    for (const auto& t : terms_)
      for (int v : t.word) m = std::max(m, v);
    return m;
  }
  std::size_t degree() const {
    std::size_t d = 0;
    for (const auto& t : terms_) d = std::max(d, t.word.size());
    return d;
  }

  friend bool operator==(const FreePoly& a, const FreePoly& b) {
    return a.p_ == b.p_ && a.terms_ == b.terms_;
  }

  friend FreePoly operator+(const FreePoly& a, const FreePoly& b) {
    a.check_same(b);
    auto t = a.terms_;
    t.insert(t.end(), b.terms_.begin(), b.terms_.end());
    return FreePoly(a.p_, std::move(t));
  }
  friend FreePoly operator-(const FreePoly& a) {
    auto t = a.terms_;
    for (auto& x : t) x.coeff = -x.coeff;
    return FreePoly(a.p_, std::move(t));
  }
  friend FreePoly operator-(const FreePoly& a, const FreePoly& b) { return a + (-b); }
  friend FreePoly operator*(const FreePoly& a, const FreePoly& b) {
    a.check_same(b);
    std::vector<Term> t;
    for (const auto& x : a.terms_)
      for (const auto& y : b.terms_) {
        Word w = x.word;
        w.insert(w.end(), y.word.begin(), y.word.end());
        t.push_back({Rational(x.coeff * y.coeff), std::move(w)});
      }
    return FreePoly(a.p_, std::move(t));
  }
  friend FreePoly operator*(const Rational& c, const FreePoly& a) {
    auto t = a.terms_;
    for (auto& x : t) x.coeff *= c;
    return FreePoly(a.p_, std::move(t));
  }

 private:
  void check_same(const FreePoly& b) const {
    require(p_ == b.p_, Errc::DomainMismatch, "polynomials over different coefficient fields");
  }

  Rational reduce(const Rational& c) const {
    if (!p_) return c;
    mpz_class num = c.get_num() % p_, den = c.get_den() % p_;
    if (den == 0) fail(Errc::ZeroInverse, "denominator divisible by " + std::to_string(p_));
    mpz_class inv;
    mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), mpz_class(p_).get_mpz_t());
    mpz_class r = (num * inv) % p_;
    if (r < 0) r += p_;
    return Rational(r);
  }

  void canonicalize() {
    std::map<Word, Rational, decltype(&word_less)> acc(&word_less);
    for (auto& t : terms_) {
      auto [it, fresh] = acc.try_emplace(t.word, t.coeff);
      if (!fresh) it->second += t.coeff;
    }
    terms_.clear();
    for (auto& [w, c] : acc) {
      Rational r = reduce(c);
      if (sgn(r) != 0) terms_.push_back({r, w});
    }
  }

  std::uint32_t p_ = 0;
  std::vector<Term> terms_;
};

// ---------------------------------------------------------------------------
// Text form.

namespace detail {

class PolyParser {
 public:
  PolyParser(std::string_view s, std::uint32_t p) : s_(s), p_(p) {}

  FreePoly parse() {
    skip();
    if (pos_ == s_.size()) throw SyntaxError(pos_, "empty polynomial");
    std::vector<Term> terms;
    bool negate = false;
    if (peek() == '-' || peek() == '+') {
      negate = s_[pos_] == '-';
      ++pos_;
    }
    terms.push_back(term(negate));
    for (skip(); pos_ < s_.size(); skip()) {
      char c = s_[pos_];
      if (c != '+' && c != '-') throw SyntaxError(pos_, std::string("unexpected '") + c + "'");
      ++pos_;
      terms.push_back(term(c == '-'));
    }
    return FreePoly(p_, std::move(terms));
  }

 private:
  char peek() {
    skip();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  mpz_class integer() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) throw SyntaxError(pos_, "expected integer");
    return mpz_class(std::string(s_.substr(start, pos_ - start)));
  }

  Term term(bool negate) {
    Term t{Rational(negate ? -1 : 1), {}};
    char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c))) {
      mpz_class num = integer();
      mpz_class den = 1;
      if (peek() == '/') {
        ++pos_;
        std::size_t at = pos_;
        den = integer();
        if (den == 0) throw SyntaxError(at, "zero denominator");
      }
      Rational q(num, den);
      q.canonicalize();
      t.coeff *= q;
      if (peek() != '*') return t;  // constant term
      ++pos_;
    }
    factor(t.word);
    while (peek() == '*') {
      ++pos_;
      factor(t.word);
    }
    return t;
  }

  void factor(Word& w) {
    skip();
    std::size_t start = pos_;
    if (pos_ >= s_.size()) throw SyntaxError(pos_, "expected variable");
    if (s_[pos_] != 'x') {
      if (std::isalpha(static_cast<unsigned char>(s_[pos_]))) {
        while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        fail(Errc::UnknownVariable,
             "'" + std::string(s_.substr(start, pos_ - start)) + "' at offset " +
                 std::to_string(start));
      }
      throw SyntaxError(pos_, "expected variable");
    }
    ++pos_;
    std::size_t digits = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (digits == pos_ || s_[digits] == '0')
      fail(Errc::UnknownVariable, "'" + std::string(s_.substr(start, pos_ - start)) +
                                      "' at offset " + std::to_string(start) +
                                      " (variables are x1, x2, ...)");
    int index = std::stoi(std::string(s_.substr(digits, pos_ - digits)));
    int power = 1;
    if (peek() == '^') {
      ++pos_;
      std::size_t at = pos_;
      mpz_class e = integer();
      if (e < 1 || e > 64) throw SyntaxError(at, "exponent out of range 1..64");
      power = static_cast<int>(e.get_si());
    }
    for (int k = 0; k < power; ++k) w.push_back(index);
  }

  std::string_view s_;
  std::uint32_t p_;
  std::size_t pos_ = 0;
};

inline std::string format_word(const Word& w) {
  std::string out;
  for (std::size_t i = 0; i < w.size();) {
    std::size_t j = i;
    while (j < w.size() && w[j] == w[i]) ++j;
    if (!out.empty()) out += '*';
    out += 'x' + std::to_string(w[i]);
    if (j - i > 1) out += '^' + std::to_string(j - i);
    i = j;
  }
  return out;
}

}  // namespace detail

inline FreePoly parse_poly(std::string_view text, std::uint32_t p = 0) {
  return detail::PolyParser(text, p).parse();
}

inline std::string to_string(const FreePoly& f) {
  if (f.is_zero()) return "0";
  std::string out;
  for (const auto& t : f.terms()) {
    Rational c = t.coeff;
    bool neg = sgn(c) < 0;
    if (neg) c = -c;
    if (out.empty())
      out += neg ? "-" : "";
    else
      out += neg ? " - " : " + ";
    if (t.word.empty()) {
      out += c.get_str();
    } else {
      if (c != 1) out += c.get_str() + "*";
      out += detail::format_word(t.word);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace detail {

template <class S>
S embed_coefficient(const Domain<S>& d, std::uint32_t p, const Rational& c) {
  if constexpr (std::is_same_v<S, Fp>) {
    require(p == d.p, Errc::DomainMismatch,
            "coefficients over " + (p ? "GF(" + std::to_string(p) + ")" : std::string("Q")) +
                " do not embed in GF(" + std::to_string(d.p) + ")");
  } else {
    require(p == 0, Errc::DomainMismatch,
            "GF(" + std::to_string(p) + ") coefficients do not embed in a characteristic-0 domain");
  }
  return d.from_rational(c);
}

}  // namespace detail

/// f(a_1, ..., a_m) by word-wise products.
template <class S>
Matrix<S> evaluate(const Domain<S>& d, const FreePoly& f, const std::vector<Matrix<S>>& args) {
  require(args.size() >= static_cast<std::size_t>(f.nvars()), Errc::ArityMismatch,
          "polynomial uses " + std::to_string(f.nvars()) + " variables, got " +
              std::to_string(args.size()) + " arguments");
  require(!args.empty() || f.nvars() == 0, Errc::ArityMismatch, "no arguments");
  const std::size_t n = args.empty() ? 1 : args.front().rows();
  for (const auto& a : args)
    require(a.square() && a.rows() == n, Errc::ShapeMismatch, "arguments must share a square size");
  Matrix<S> acc = Matrix<S>::zeros(d, n, n);
  for (const auto& t : f.terms()) {
    S c = detail::embed_coefficient(d, f.characteristic(), t.coeff);
    Matrix<S> prod = Matrix<S>::scalar(d, n, c);
    for (int v : t.word) prod = prod * args[v - 1];
    acc += prod;
  }
  return acc;
}

/// Scalar evaluation f(s_1, ..., s_m) inside a division ring.
template <class S>
S evaluate_scalar(const Domain<S>& d, const FreePoly& f, const std::vector<S>& args) {
  require(args.size() >= static_cast<std::size_t>(f.nvars()), Errc::ArityMismatch,
          "too few arguments");
  S acc = d.zero();
  for (const auto& t : f.terms()) {
    S prod = detail::embed_coefficient(d, f.characteristic(), t.coeff);
    for (int v : t.word) prod = prod * args[v - 1];
    acc = acc + prod;
  }
  return acc;
}

inline bool is_multilinear(const FreePoly& f) {
  const int m = f.nvars();
  for (const auto& t : f.terms()) {
    if (t.word.size() != static_cast<std::size_t>(m)) return false;
    Word w = t.word;
    std::sort(w.begin(), w.end());
    for (int i = 0; i < m; ++i)
      if (w[i] != i + 1) return false;
  }
  return true;
}

/// Sorts every word ascending and merges like terms.
inline FreePoly tilde_normalize(const FreePoly& f) {
  auto terms = f.terms();
  for (auto& t : terms) std::sort(t.word.begin(), t.word.end());
  return FreePoly(f.characteristic(), std::move(terms));
}

inline Rational coefficient_sum(const FreePoly& f) {
  if (!is_multilinear(f)) fail(Errc::NotMultilinear, to_string(f) + " is not multilinear");
  Rational s = 0;
  for (const auto& t : f.terms()) s += t.coeff;
  if (f.characteristic()) {
    mpz_class r = s.get_num() % f.characteristic();
    if (r < 0) r += f.characteristic();
    return Rational(r);
  }
  return s;
}

inline int permutation_sign(const Word& w) {
  int sign = 1;
  for (std::size_t i = 0; i < w.size(); ++i)
    for (std::size_t j = i + 1; j < w.size(); ++j)
      if (w[i] > w[j]) sign = -sign;
  return sign;
}

/// S_m = sum over permutations of sign * x_s(1) ... x_s(m).
inline FreePoly standard_poly(int m, std::uint32_t p = 0) {
  require(m >= 2, Errc::InvalidArgument, "standard polynomial needs m >= 2");
  if (m > 7) fail(Errc::BudgetExceeded, "S_" + std::to_string(m) + " has more than 7! terms");
  Word w(m);
  std::iota(w.begin(), w.end(), 1);
  std::vector<Term> terms;
  do terms.push_back({Rational(permutation_sign(w)), w});
  while (std::next_permutation(w.begin(), w.end()));
  return FreePoly(p, std::move(terms));
}

/// p(x1 x2) - p(x2 x1) for p = beta_0 + beta_1 t + ... + beta_m t^m.
inline FreePoly p_commutator_poly(const std::vector<Rational>& beta, std::uint32_t p = 0) {
  require(beta.size() >= 2, Errc::InvalidArgument, "p must have degree >= 1");
  std::vector<Term> terms;
  for (std::size_t k = 1; k < beta.size(); ++k) {
    Word xy, yx;
    for (std::size_t r = 0; r < k; ++r) {
      xy.insert(xy.end(), {1, 2});
      yx.insert(yx.end(), {2, 1});
    }
    terms.push_back({beta[k], xy});
    terms.push_back({Rational(-beta[k]), yx});
  }
  return FreePoly(p, std::move(terms));
}

/// Parses a univariate polynomial in x ("x^2 + x") into coefficients beta_0..beta_m.
inline std::vector<Rational> parse_univariate(std::string_view text) {
  std::string s(text);
  std::string rewritten;
  for (std::size_t i = 0; i < s.size(); ++i) {
    rewritten += s[i];
    if (s[i] == 'x' && (i + 1 == s.size() || !std::isdigit(static_cast<unsigned char>(s[i + 1]))))
      rewritten += '1';
  }
  FreePoly f = parse_poly(rewritten);
  require(f.nvars() <= 1, Errc::UnknownVariable, "univariate polynomial must use only x");
  std::vector<Rational> beta(f.degree() + 1, Rational(0));
  for (const auto& t : f.terms()) beta[t.word.size()] = t.coeff;
  if (beta.size() < 2) beta.resize(2, Rational(0));
  return beta;
}

}  // namespace commalg
