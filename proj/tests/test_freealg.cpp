#include <gtest/gtest.h>

#include <random>

#include "commalg/freealg.hpp"
#include "commalg/linalg.hpp"

using namespace commalg;

namespace {

FreePoly random_poly(std::mt19937_64& rng, std::uint32_t p, int vars, int max_len, int terms) {
  std::vector<Term> t;
  std::uniform_int_distribution<int> var(1, vars), len(0, max_len), c(-5, 5);
  for (int k = 0; k < terms; ++k) {
    Word w(len(rng));
    for (auto& x : w) x = var(rng);
    int num = c(rng);
    t.push_back({Rational(num == 0 ? 1 : num), w});
  }
  return FreePoly(p, t);
}

}  // namespace

TEST(Freealg, ParseExamples) {
  auto f = parse_poly("x1*x2 - x2*x1");
  EXPECT_EQ(f, FreePoly(0, {{Rational(1), {1, 2}}, {Rational(-1), {2, 1}}}));
  EXPECT_EQ(parse_poly("x1"), FreePoly::variable(1));
  auto g = parse_poly("x2^2*x1*x3^6*x1 - x3*x1*x2^2*x3^5");
  EXPECT_EQ(g.terms().size(), 2u);
  EXPECT_EQ(g.degree(), 10u);
  EXPECT_EQ(g.nvars(), 3);
  EXPECT_EQ(parse_poly(" 1/2 * x1 ^ 2 + 3"), FreePoly(0, {{Rational(1, 2), {1, 1}}, {Rational(3), {}}}));
}

TEST(Freealg, ParseErrors) {
  try {
    parse_poly("x1 + * x2");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.offset(), 5u);
  }
  try {
    parse_poly("x1 + y2");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnknownVariable);
  }
  try {
    parse_poly("x0");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnknownVariable);
  }
  EXPECT_THROW(parse_poly(""), SyntaxError);
  EXPECT_THROW(parse_poly("x1 x2"), SyntaxError);
  EXPECT_THROW(parse_poly("1/0*x1"), SyntaxError);
}

TEST(Freealg, CanonicalForm) {
  auto f = parse_poly("x2 + x1*x1 + x1 - x2 + x1^2");
  EXPECT_EQ(to_string(f), "x1 + 2*x1^2");
  auto g = parse_poly("x1*x2 + x2*x1", 2);
  EXPECT_EQ(to_string(g), "x1*x2 + x2*x1");
  EXPECT_TRUE(parse_poly("x1 + x1", 2).is_zero());
  EXPECT_EQ(to_string(parse_poly("x1 - x1")), "0");
}

TEST(Freealg, ParsePrintRoundTrip) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 100; ++t) {
    std::uint32_t p = t % 3 == 0 ? 0 : (t % 3 == 1 ? 2 : 7);
    auto f = random_poly(rng, p, 3, 5, 1 + t % 6);
    EXPECT_EQ(parse_poly(to_string(f), p), f) << to_string(f);
  }
}

TEST(Freealg, EvaluateExamples) {
  FieldGF f2{2};
  auto e11 = Matrix<Fp>::unit(f2, 2, 0, 0), e12 = Matrix<Fp>::unit(f2, 2, 0, 1),
       e21 = Matrix<Fp>::unit(f2, 2, 1, 0);
  auto c = parse_poly("x1*x2 - x2*x1", 2);
  EXPECT_EQ(evaluate(f2, c, {e11, e12}), e12);
  std::mt19937_64 rng(2);
  FieldQ q;
  auto a = random_matrix(q, 3, 3, rng);
  EXPECT_EQ(evaluate(q, FreePoly::variable(1), {a}), a);
  auto s2 = standard_poly(2);
  auto qe12 = Matrix<Rational>::unit(q, 2, 0, 1), qe21 = Matrix<Rational>::unit(q, 2, 1, 0);
  EXPECT_EQ(evaluate(q, s2, {qe12, qe21}),
            Matrix<Rational>::diagonal(q, {Rational(1), Rational(-1)}));
  EXPECT_THROW(evaluate(q, s2, {qe12}), Error);
  EXPECT_THROW(evaluate(f2, s2, {e11, e12}), Error);  // Q coefficients into GF(2)
  QuatRational h;
  auto iI = Matrix<QuatQ>::scalar(h, 1, QuatQ::i()), jI = Matrix<QuatQ>::scalar(h, 1, QuatQ::j());
  EXPECT_EQ(evaluate(h, s2, {iI, jI})(0, 0), h.parse("2k"));
}

TEST(Freealg, Multilinear) {
  EXPECT_TRUE(is_multilinear(parse_poly("x1*x2 - x2*x1")));
  EXPECT_FALSE(is_multilinear(parse_poly("x1^2")));
  EXPECT_FALSE(is_multilinear(parse_poly("x1*x3")));
  EXPECT_TRUE(is_multilinear(standard_poly(3)));
  // Products over disjoint variable sets stay multilinear.
  auto f = parse_poly("x1*x2 - 2*x2*x1");
  auto g = parse_poly("x3*x4 + x4*x3");
  EXPECT_TRUE(is_multilinear(f * g));
}

TEST(Freealg, TildeNormalize) {
  auto f = parse_poly("x2^2*x1*x3^6*x1 - x3*x1*x2^2*x3^5");
  EXPECT_EQ(tilde_normalize(f), parse_poly("x1^2*x2^2*x3^6 - x1*x2^2*x3^6"));
  EXPECT_EQ(tilde_normalize(parse_poly("x1*x2")), parse_poly("x1*x2"));
  EXPECT_TRUE(tilde_normalize(parse_poly("x1*x2 - x2*x1")).is_zero());
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    auto a = random_poly(rng, 0, 3, 3, 3), b = random_poly(rng, 0, 3, 3, 3);
    EXPECT_EQ(tilde_normalize(tilde_normalize(a)), tilde_normalize(a));
    EXPECT_EQ(tilde_normalize(a * b), tilde_normalize(tilde_normalize(a) * tilde_normalize(b)));
  }
}

TEST(Freealg, CoefficientSum) {
  EXPECT_EQ(coefficient_sum(parse_poly("x1*x2 - x2*x1")), 0);
  EXPECT_EQ(coefficient_sum(parse_poly("x1*x2")), 1);
  EXPECT_EQ(coefficient_sum(standard_poly(3)), 0);
  for (int m = 2; m <= 5; ++m) EXPECT_EQ(coefficient_sum(standard_poly(m)), 0);
  EXPECT_THROW(coefficient_sum(parse_poly("x1^2")), Error);
}

TEST(Freealg, StandardPoly) {
  EXPECT_EQ(standard_poly(2), parse_poly("x1*x2 - x2*x1"));
  auto s3 = standard_poly(3);
  ASSERT_EQ(s3.terms().size(), 6u);
  // Independent sign oracle: count inversions by transposition sorting.
  for (const auto& t : s3.terms()) {
    Word w = t.word;
    int swaps = 0;
    for (std::size_t i = 0; i < w.size(); ++i)
      while (w[i] != static_cast<int>(i) + 1) {
        std::swap(w[i], w[w[i] - 1]);
        ++swaps;
      }
    EXPECT_EQ(t.coeff, swaps % 2 ? -1 : 1);
  }
  EXPECT_EQ(standard_poly(7).terms().size(), 5040u);
  try {
    standard_poly(8);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::BudgetExceeded);
  }
}

TEST(Freealg, PCommutatorPoly) {
  EXPECT_EQ(p_commutator_poly({0, 1}), parse_poly("x1*x2 - x2*x1"));
  EXPECT_EQ(p_commutator_poly({0, 0, 1}), parse_poly("x1*x2*x1*x2 - x2*x1*x2*x1"));
  EXPECT_EQ(parse_univariate("x^2 + x"), (std::vector<Rational>{0, 1, 1}));
  // p(ab) - p(ba) = [a, sum_k beta_k (ba)^(k-1) b] on random pairs.
  std::mt19937_64 rng(4);
  FieldQ q;
  std::vector<Rational> beta = {3, 1, -2, 5};
  auto pc = p_commutator_poly(beta);
  for (int t = 0; t < 200; ++t) {
    auto a = random_matrix(q, 3, 3, rng), b = random_matrix(q, 3, 3, rng);
    Matrix<Rational> inner = Matrix<Rational>::zeros(q, 3, 3), pw = b;
    for (std::size_t k = 1; k < beta.size(); ++k) {
      inner += beta[k] * pw;
      pw = b * a * pw;
    }
    EXPECT_EQ(evaluate(q, pc, {a, b}), commutator(a, inner));
  }
  FieldGF f5{5};
  auto pc5 = p_commutator_poly(beta, 5);
  for (int t = 0; t < 200; ++t) {
    auto a = random_matrix(f5, 2, 2, rng), b = random_matrix(f5, 2, 2, rng);
    Matrix<Fp> inner = Matrix<Fp>::zeros(f5, 2, 2), pw = b;
    for (std::size_t k = 1; k < beta.size(); ++k) {
      inner += f5.from_rational(beta[k]) * pw;
      pw = b * a * pw;
    }
    EXPECT_EQ(evaluate(f5, pc5, {a, b}), commutator(a, inner));
  }
}
