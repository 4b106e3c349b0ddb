#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "commalg/scalars.hpp"

using namespace commalg;

namespace {

QuatF random_quat(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  return {g(rng), g(rng), g(rng), g(rng)};
}

QuatF random_unit(std::mt19937_64& rng) {
  QuatF q = random_quat(rng);
  return (1.0 / std::sqrt(q.norm())) * q;
}

double dist(const QuatF& x, const QuatF& y) { return std::sqrt((x - y).norm()); }

QuatQ random_qq(std::mt19937_64& rng) {
  std::uniform_int_distribution<long> num(-7, 7), den(1, 5);
  auto r = [&] {
    Rational x(num(rng), den(rng));
    x.canonicalize();
    return x;
  };
  return {r(), r(), r(), r()};
}

}  // namespace

TEST(Scalars, FieldInverseExhaustive) {
  FieldGF f5{5};
  EXPECT_EQ(f5.inv(Fp(5, 2)).v, 3u);
  for (std::uint32_t p : {2u, 3u, 5u, 7u, 11u}) {
    FieldGF f{p};
    for (std::uint32_t a = 1; a < p; ++a) {
      Fp x(p, a);
      EXPECT_EQ((x * f.inv(x)).v, 1u);
    }
  }
  EXPECT_THROW(f5.inv(Fp(5, 0)), Error);
}

TEST(Scalars, MixedModuliRejected) {
  try {
    (void)(Fp(5, 1) + Fp(7, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DomainMismatch);
  }
}

TEST(Scalars, PrimeCheckAtConstruction) {
  EXPECT_THROW(ScalarDomain::prime_field(4), Error);
  EXPECT_NO_THROW(ScalarDomain::prime_field(7));
}

TEST(Scalars, QuaternionInverseAndCenter) {
  QuatRational h;
  EXPECT_EQ(h.inv(QuatQ::i()), -QuatQ::i());
  EXPECT_FALSE(h.is_central(QuatQ::i()));
  EXPECT_TRUE(h.is_central(QuatQ(Rational(3))));
  EXPECT_TRUE(h.is_central(h.parse("1+0i+0j+0k")));
  EXPECT_THROW(h.inv(QuatQ()), Error);
}

TEST(Scalars, QuaternionNorm) {
  QuatRational h;
  EXPECT_EQ(quat_norm(h.parse("1")), 1);
  EXPECT_EQ(quat_norm(h.parse("i+j")), 2);
  EXPECT_EQ(quat_norm(h.parse("1+i+j+k")), 4);
  std::mt19937_64 rng(1);
  for (int t = 0; t < 1000; ++t) {
    QuatQ a = random_qq(rng), b = random_qq(rng);
    EXPECT_EQ((a * b).norm(), a.norm() * b.norm());
  }
}

TEST(Scalars, RingAxiomsRandom) {
  std::mt19937_64 rng(2);
  QuatRational h;
  for (int t = 0; t < 1000; ++t) {
    QuatQ a = random_qq(rng), b = random_qq(rng), c = random_qq(rng);
    EXPECT_EQ((a * b) * c, a * (b * c));
    EXPECT_EQ(a * (b + c), a * b + a * c);
    if (!h.is_zero(a)) { EXPECT_EQ(a * h.inv(a), h.one()); }
  }
  FieldGF f7{7};
  for (int t = 0; t < 1000; ++t) {
    Fp a(7, rng() % 7), b(7, rng() % 7), c(7, rng() % 7);
    EXPECT_EQ((a * b) * c, a * (b * c));
    EXPECT_EQ(a * (b + c), a * b + a * c);
    if (a.v) { EXPECT_EQ((a * f7.inv(a)).v, 1u); }
  }
  QuatFloat hf;
  for (int t = 0; t < 1000; ++t) {
    QuatF a = random_quat(rng), b = random_quat(rng), c = random_quat(rng);
    EXPECT_LT(dist((a * b) * c, a * (b * c)), 1e-9 * (1 + std::sqrt(((a * b) * c).norm())));
    EXPECT_LT(dist(a * hf.inv(a), QuatF(1.0)), 1e-9);
  }
}

TEST(Scalars, ScalarTextRoundTrip) {
  QuatRational h;
  for (const char* s : {"0", "1", "-i", "1/2+3j-k", "i+j", "-7/3k"}) {
    QuatQ q = h.parse(s);
    EXPECT_EQ(h.parse(h.format(q)), q) << s;
  }
  EXPECT_EQ(h.parse("j + 2 - k"), QuatQ(Rational(2), Rational(0), Rational(1), Rational(-1)));
  EXPECT_THROW(h.parse("1+q"), SyntaxError);
  QuatFloat hf;
  EXPECT_DOUBLE_EQ(hf.parse("1e-05i").b, 1e-5);
  FieldGF f5{5};
  EXPECT_EQ(f5.parse("1/2").v, 3u);
}

TEST(Scalars, DiffUnitNormsExamples) {
  QuatFloat d;
  auto [u0, v0] = quat_diff_unit_norms(d, QuatF(0.0));
  EXPECT_EQ(u0, QuatF(1.0));
  EXPECT_EQ(v0, QuatF(1.0));
  auto [u2, v2] = quat_diff_unit_norms(d, QuatF(2.0));
  EXPECT_LT(dist(u2, QuatF(1.0)), 1e-12);
  EXPECT_LT(dist(v2, QuatF(-1.0)), 1e-12);
  QuatF q = QuatF::i() + QuatF::j();
  auto [u, v] = quat_diff_unit_norms(d, q);
  EXPECT_NEAR(u.norm(), 1.0, 1e-12);
  EXPECT_NEAR(v.norm(), 1.0, 1e-12);
  EXPECT_LT(dist(u - v, q), 1e-12);
  try {
    quat_diff_unit_norms(d, QuatF(3.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NormTooLarge);
  }
}

TEST(Scalars, DiffUnitNormsRandom) {
  QuatFloat d;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> r(0.0, 2.0);
  for (int t = 0; t < 1000; ++t) {
    QuatF q = r(rng) * random_unit(rng);
    auto [u, v] = quat_diff_unit_norms(d, q);
    EXPECT_NEAR(u.norm(), 1.0, 1e-10);
    EXPECT_NEAR(v.norm(), 1.0, 1e-10);
    EXPECT_LT(dist(u - v, q), 1e-10);
  }
}

TEST(Scalars, UnitCommutator) {
  QuatFloat d;
  auto [a1, b1] = unit_quaternion_commutator(d, QuatF(1.0));
  EXPECT_LT(dist(a1, QuatF::i()), 1e-12);
  EXPECT_LT(dist(b1, -QuatF::i()), 1e-12);
  auto [a2, b2] = unit_quaternion_commutator(d, QuatF(-1.0));
  EXPECT_LT(dist(a2, QuatF::i()), 1e-12);
  EXPECT_LT(dist(b2, QuatF::j()), 1e-12);
  std::mt19937_64 rng(4);
  for (int t = 0; t < 1000; ++t) {
    QuatF u = random_unit(rng);
    auto [a, b] = unit_quaternion_commutator(d, u);
    EXPECT_LT(dist(a * a, QuatF(-1.0)), 1e-9);
    EXPECT_LT(dist(b * b, QuatF(-1.0)), 1e-9);
    EXPECT_LT(dist(a * b * d.inv(a) * d.inv(b), u), 1e-9);
  }
  EXPECT_THROW(unit_quaternion_commutator(d, QuatF(2.0)), Error);
}

TEST(Scalars, QuatSqrt) {
  QuatFloat d;
  EXPECT_EQ(quat_sqrt(d, QuatF(1.0)), QuatF(1.0));
  EXPECT_EQ(quat_sqrt(d, QuatF(-1.0)), QuatF::i());
  QuatF k = quat_sqrt(d, QuatF::k());
  EXPECT_LT(dist(k * k, QuatF::k()), 1e-12);
  EXPECT_NEAR(k.a, std::cos(M_PI / 4), 1e-12);
  std::mt19937_64 rng(5);
  for (int t = 0; t < 1000; ++t) {
    QuatF u = random_unit(rng);
    QuatF s = quat_sqrt(d, u);
    EXPECT_LT(dist(s * s, u), 1e-9);
  }
  try {
    quat_sqrt(d, QuatF(0.5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotUnitNorm);
  }
}

TEST(Scalars, PureAsCommutator) {
  QuatRational h;
  auto [a, b] = pure_as_commutator(h, h.parse("2k"));
  EXPECT_EQ(a, QuatQ::i());
  EXPECT_EQ(b, QuatQ::j());
  auto [a2, b2] = pure_as_commutator(h, QuatQ::k());
  EXPECT_EQ(a2, QuatQ::i());
  EXPECT_EQ(b2, h.parse("1/2j"));
  QuatQ v = h.parse("i+j");
  auto [a3, b3] = pure_as_commutator(h, v);
  EXPECT_EQ(a3 * b3 - b3 * a3, v);
  EXPECT_THROW(pure_as_commutator(h, h.parse("1+i")), Error);
  EXPECT_THROW(pure_as_commutator(h, QuatQ()), Error);
}

TEST(Scalars, ScalarOracleExact) {
  QuatRational h;
  std::mt19937_64 rng(6);
  std::vector<QuatQ> cases = {h.parse("1"), h.parse("-1"), h.parse("1+k"), h.parse("2-3i"),
                              h.parse("i+j")};
  for (int t = 0; t < 200; ++t) cases.push_back(random_qq(rng));
  for (const auto& x : cases) {
    if (h.is_zero(x)) continue;
    auto r = quaternion_scalar_oracle(h, x);
    QuatQ c1 = r.a1 * r.b1 - r.b1 * r.a1, c2 = r.a2 * r.b2 - r.b2 * r.a2;
    EXPECT_EQ(c1 * c2, x) << h.format(x);
    EXPECT_FALSE(h.is_central(c1));
    EXPECT_FALSE(h.is_central(c2));
  }
  auto one = quaternion_scalar_oracle(h, h.one());
  EXPECT_EQ(one.a1 * one.b1 - one.b1 * one.a1, QuatQ::i());
  EXPECT_THROW(quaternion_scalar_oracle(h, QuatQ()), Error);
}

TEST(Scalars, ZeroSumUnits) {
  EXPECT_EQ(zero_sum_units(FieldGF{2}, 4), std::vector<Fp>(4, Fp(2, 1)));
  auto g5 = zero_sum_units(FieldGF{5}, 2);
  EXPECT_EQ(g5[0].v, 1u);
  EXPECT_EQ(g5[1].v, 4u);
  auto q3 = zero_sum_units(FieldQ{}, 3);
  EXPECT_EQ(q3, (std::vector<Rational>{1, 1, -2}));
  for (std::uint32_t p : {2u, 3u, 5u})
    for (int n = 2; n <= 8; ++n) {
      FieldGF f{p};
      if (p == 2 && n % 2) {
        EXPECT_THROW(zero_sum_units(f, n), Error);
        continue;
      }
      auto xs = zero_sum_units(f, n);
      Fp s = f.zero();
      for (auto x : xs) {
        EXPECT_NE(x.v, 0u);
        s += x;
      }
      EXPECT_EQ(s.v, 0u);
    }
  for (int n = 2; n <= 8; ++n) {
    auto xs = zero_sum_units(FieldQ{}, n);
    Rational s = 0;
    for (auto& x : xs) {
      EXPECT_NE(sgn(x), 0);
      s += x;
    }
    EXPECT_EQ(s, 0);
  }
}

TEST(Scalars, EnumerateField) {
  auto f3 = enumerate_field(FieldGF{3});
  ASSERT_EQ(f3.size(), 3u);
  EXPECT_EQ(f3[0].v, 0u);
  EXPECT_EQ(f3[1].v, 1u);
  EXPECT_EQ(f3[2].v, 2u);
  EXPECT_EQ(enumerate_field(FieldGF{2}).size(), 2u);
  EXPECT_THROW(enumerate_field(FieldQ{}), Error);
}
