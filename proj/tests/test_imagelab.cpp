#include <gtest/gtest.h>

#include <set>

#include "commalg/imagelab.hpp"

using namespace commalg;

namespace {

// Brute-force closure under the listed operations until nothing new appears.
ElemSet naive_closure(const FiniteRing& r, const ElemSet& s, bool with_products) {
  std::vector<Elem> l = s.list();
  std::set<Elem> cur(l.begin(), l.end());
  cur.insert(r.zero());
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<Elem> v(cur.begin(), cur.end());
    for (Elem a : v)
      for (Elem b : v) {
        grew |= cur.insert(r.sub(a, b)).second;
        if (with_products) grew |= cur.insert(r.mul(a, b)).second;
      }
  }
  ElemSet out = r.empty_set();
  for (Elem e : cur) out.insert(e);
  return out;
}

ElemSet random_subset(const FiniteRing& r, Rng& rng, std::size_t k) {
  ElemSet s = r.empty_set();
  std::uniform_int_distribution<std::size_t> pick(0, r.size() - 1);
  for (std::size_t t = 0; t < k; ++t) s.insert(r.elements()[pick(rng)]);
  return s;
}

// f(R) through generic matrix evaluation, pair by pair.
ElemSet naive_image2(const FiniteRing& r, const FreePoly& poly) {
  const FreePoly f(r.spec().p, poly.terms());
  ElemSet out = r.empty_set();
  for (Elem a : r.elements())
    for (Elem b : r.elements())
      out.insert(r.from_matrix(evaluate(r.field(), f, {r.to_matrix(a), r.to_matrix(b)})));
  return out;
}

}  // namespace

TEST(Imagelab, RingTables) {
  FiniteRing r2({2, 2}), r3({2, 3});
  EXPECT_EQ(r2.size(), 16u);
  EXPECT_EQ(r3.size(), 81u);
  EXPECT_EQ(r3.to_matrix(r3.one()), Matrix<Fp>::identity(r3.field(), 2));
  for (Elem a : r3.elements()) {
    EXPECT_EQ(r3.from_matrix(r3.to_matrix(a)), a);
    EXPECT_EQ(r3.parse(r3.format(a)), a);
    for (Elem b : r3.elements()) {
      EXPECT_EQ(r3.to_matrix(r3.mul(a, b)), r3.to_matrix(a) * r3.to_matrix(b));
      EXPECT_EQ(r3.to_matrix(r3.sub(a, b)), r3.to_matrix(a) - r3.to_matrix(b));
    }
  }
  FiniteRing t({3, 2, 1u << 20, true});
  EXPECT_EQ(t.size(), 64u);
  EXPECT_EQ(parse_ring_spec("T3x3@2").name(), "T3x3@2");
  EXPECT_EQ(parse_ring_spec(" 2x2@5 ").p, 5u);
  EXPECT_THROW(parse_ring_spec("2x3@2"), SyntaxError);
  EXPECT_THROW(parse_ring_spec("2x2@4"), Error);
  EXPECT_THROW(FiniteRing({3, 3}), Error);
}

TEST(Imagelab, Images) {
  FiniteRing r({2, 2});
  EXPECT_EQ(image_set(parse_poly("x1"), r).values, r.all());
  auto c = parse_poly("x1*x2 - x2*x1");
  auto img = image_set(c, r);
  EXPECT_TRUE(img.exhaustive);
  EXPECT_TRUE(img.values.contains(r.zero()));
  EXPECT_TRUE(img.values.contains(r.parse("0,1;0,0")));
  EXPECT_EQ(img.values, naive_image2(r, c));
  FiniteRing r3({2, 3});
  auto s2 = image_set(standard_poly(2), r3);
  EXPECT_EQ(s2.values, naive_image2(r3, standard_poly(2)));
  EXPECT_EQ(s2.values, image_set(standard_poly(2), r3).values);
  EXPECT_EQ(s2.tuples, 81u * 81u);
  // Traceless matrices of M_2(GF(3)) are exactly the commutators.
  ElemSet traceless = r3.empty_set();
  for (Elem e : r3.elements())
    if ((r3.digit(e, 0, 0) + r3.digit(e, 1, 1)) % 3 == 0) traceless.insert(e);
  EXPECT_EQ(s2.values, traceless);
  auto mixed = parse_poly("x1^2*x2 + x3 + 1");
  FiniteRing small({2, 2, 100});
  EXPECT_THROW(image_set(mixed, small), Error);
  auto sampled = image_set(mixed, small, true);
  EXPECT_FALSE(sampled.exhaustive);
  EXPECT_EQ(sampled.tuples, 100u);
  EXPECT_THROW(image_set(parse_poly("x1", 3), r), Error);
}

TEST(Imagelab, Closures) {
  FiniteRing r({2, 2});
  auto e12 = r.parse("0,1;0,0"), e21 = r.parse("0,0;1,0");
  EXPECT_EQ(additive_closure(r, r.set_of({e12})), r.set_of({r.zero(), e12}));
  EXPECT_EQ(subring_closure(r, r.set_of({e12, e21})), r.all());
  auto zo = r.set_of({r.zero(), r.one()});
  EXPECT_EQ(product_set(r, {zo, zo}), zo);
  Rng rng(5);
  for (const auto& spec : {FiniteRingSpec{2, 2}, FiniteRingSpec{2, 3}, FiniteRingSpec{3, 2, 1u << 20, true}}) {
    FiniteRing ring(spec);
    for (int t = 0; t < 30; ++t) {
      auto s = random_subset(ring, rng, 1 + t % 4);
      auto big = s;
      big |= random_subset(ring, rng, 2);
      auto a = additive_closure(ring, s), sr = subring_closure(ring, s);
      EXPECT_EQ(a, naive_closure(ring, s, false));
      EXPECT_EQ(sr, naive_closure(ring, s, true));
      // Extensive, idempotent, monotone.
      EXPECT_TRUE(s.subset_of(a));
      EXPECT_TRUE(a.subset_of(sr));
      EXPECT_EQ(additive_closure(ring, a), a);
      EXPECT_EQ(subring_closure(ring, sr), sr);
      EXPECT_TRUE(a.subset_of(additive_closure(ring, big)));
      EXPECT_TRUE(sr.subset_of(subring_closure(ring, big)));
      // (X . Y)^+ = X^+ Y^+.
      auto y = random_subset(ring, rng, 2);
      EXPECT_EQ(additive_closure(ring, product_set(ring, {s, y})),
                additive_closure(ring, product_set(ring, {a, additive_closure(ring, y)})));
    }
  }
}

TEST(Imagelab, ExceptionalSets) {
  FiniteRing r({2, 2});
  auto gf4 = m2f2_exceptional_gf4(r), klein = m2f2_exceptional_klein(r);
  EXPECT_EQ(gf4.size(), 4u);
  EXPECT_TRUE(gf4.contains(r.one()));
  EXPECT_TRUE(gf4.contains(r.parse("1,1;1,0")));
  EXPECT_TRUE(gf4.contains(r.parse("0,1;1,1")));
  // Both displayed sets square to the GF(4) copy, as the proof claims.
  EXPECT_EQ(additive_closure(r, power_set(r, klein, 2)), gf4);
  EXPECT_EQ(additive_closure(r, power_set(r, gf4, 2)), gf4);
  EXPECT_EQ(subring_closure(r, gf4), gf4);
  // The Klein set sits inside the commutators; the GF(4) copy does not.
  auto comm = additive_closure(r, commutator_set(r));
  EXPECT_EQ(comm.size(), 8u);
  EXPECT_TRUE(klein.subset_of(comm));
  EXPECT_FALSE(gf4.subset_of(comm));
}

TEST(Imagelab, Dichotomies) {
  FiniteRing r({2, 2});
  auto x = check_m2f2_dichotomies(parse_poly("x1"), r);
  EXPECT_EQ(x.ideal_verdict, Verdict::Full);
  EXPECT_EQ(x.commutator_verdict, Verdict::ContainsCommutators);
  auto c = check_m2f2_dichotomies(parse_poly("x1*x2 - x2*x1"), r);
  EXPECT_NE(c.ideal_verdict, Verdict::Refutation);
  EXPECT_NE(c.commutator_verdict, Verdict::Refutation);
  EXPECT_EQ(c.squares_additive, r.all());
  EXPECT_EQ(check_m2f2_dichotomies(parse_poly("x1 - x1 + 1"), r).ideal_verdict, Verdict::CentralValued);
  // e12^2 + e12 = e12, so x^2 + x is not an exceptional polynomial.
  auto q = check_m2f2_dichotomies(parse_poly("x1^2 + x1"), r);
  EXPECT_TRUE(q.image.contains(r.parse("0,1;0,0")));
  EXPECT_EQ(q.squares_additive, naive_closure(r, power_set(r, naive_image2(r, parse_poly("x1^2 + x1")), 2), false));
}

TEST(Imagelab, Sweep) {
  FiniteRing r({2, 2});
  auto s = sweep_m2f2(r, 3, 2);
  EXPECT_EQ(s.words.size(), 15u);
  EXPECT_EQ(s.polynomials, 1u << 15);
  EXPECT_EQ(s.refutations, 0u);
  EXPECT_TRUE(s.gf4_set_matches);
  EXPECT_EQ(s.rows.size() + s.central_valued, s.polynomials);
  // Spot-check sweep rows against the direct classifier.
  for (std::size_t k = 0; k < s.rows.size(); k += 997) {
    auto d = check_m2f2_dichotomies(parse_poly(s.rows[k].poly, 2), r);
    EXPECT_EQ(d.ideal_verdict, s.rows[k].ideal_verdict) << s.rows[k].poly;
    EXPECT_EQ(d.commutator_verdict, s.rows[k].commutator_verdict) << s.rows[k].poly;
  }
}

TEST(Imagelab, PolynomialCommutators) {
  FiniteRing r3({2, 3}), r2({2, 2});
  EXPECT_EQ(p_commutator_set_check({0, 1}, r3).verdict, Verdict::EqualsCommutators);
  auto sq = p_commutator_set_check(parse_univariate("x^2"), r3);
  EXPECT_EQ(sq.verdict, Verdict::EqualsCommutators);
  EXPECT_EQ(sq.pcomm_plus, sq.comm_plus);
  for (const char* p : {"x^2", "x^3", "x^2 + x"}) {
    auto v = p_commutator_set_check(parse_univariate(p), r2);
    EXPECT_NE(v.verdict, Verdict::Refutation) << p;
  }
  // Oracle: p(ab) - p(ba) through the two-variable polynomial and generic evaluation.
  for (const char* p : {"x^2", "x^3", "x^2 + x"}) {
    auto beta = parse_univariate(p);
    for (FiniteRing* ring : {&r2, &r3}) {
      auto naive = naive_closure(*ring, naive_image2(*ring, p_commutator_poly(beta)), false);
      EXPECT_EQ(p_commutator_set_check(beta, *ring).pcomm_plus, naive) << p;
    }
  }
  EXPECT_THROW(p_commutator_set_check(parse_univariate("3*x^2 + 1"), r3), Error);
}

TEST(Imagelab, SumLength) {
  FiniteRing r3({2, 3});
  auto comm = image_set(parse_poly("x1*x2 - x2*x1"), r3).values;
  auto prof = sum_length_profile(r3, comm, 2);
  EXPECT_TRUE(prof.reaches_ring);
  EXPECT_GE(prof.minimal_N, 1u);
  EXPECT_EQ(prof.layer_sizes.back(), 81u);
  auto zero = sum_length_profile(r3, r3.set_of({r3.zero()}), 2);
  EXPECT_FALSE(zero.reaches_ring);
  EXPECT_EQ(sum_length_profile(r3, r3.all(), 1).minimal_N, 1u);
  // Layer sizes are nondecreasing and the last reaches the closure.
  for (std::size_t k = 1; k < prof.layer_sizes.size(); ++k)
    EXPECT_LT(prof.layer_sizes[k - 1], prof.layer_sizes[k]);
  auto probe = standard_poly_probe(2, 2, r3);
  EXPECT_TRUE(probe.equals_ring);
  ASSERT_TRUE(probe.profile.has_value());
  EXPECT_EQ(probe.profile->minimal_N, prof.minimal_N);
  FiniteRing r2({2, 2});
  auto p1 = standard_poly_probe(2, 1, r2);
  EXPECT_TRUE(p1.image_plus_equals_commutators);
  EXPECT_FALSE(p1.equals_ring);
}

TEST(Imagelab, FullyNoncentral) {
  FiniteRing r2({2, 2}), r3({2, 3});
  EXPECT_TRUE(fully_noncentral_check(r2, r2.all()));
  EXPECT_FALSE(fully_noncentral_check(r2, center(r2)));
  EXPECT_TRUE(fully_noncentral_check(r3, r3.set_of({r3.parse("0,1;0,0")})));
  FiniteRing t({2, 2, 1u << 20, true});
  EXPECT_FALSE(fully_noncentral_check(t, t.all()));
  EXPECT_EQ(ideal_closure(t, commutator_set(t)).size(), 2u);
}

TEST(Imagelab, TildeEquivalence) {
  FiniteRing r2({2, 2});
  auto rep = tilde_equivalence_check(parse_poly("x1*x2 - x2*x1"), r2);
  EXPECT_TRUE(rep.agree);
  EXPECT_EQ(rep.ideal_size, 16u);
  EXPECT_TRUE(tilde_equivalence_check(parse_poly("x1*x2"), r2).agree);
  EXPECT_TRUE(tilde_equivalence_check(parse_poly("x2^2*x1*x2*x1 - x2*x1*x2^2"), r2).agree);
  // Upper-triangular rings have a proper commutator ideal, so the check bites.
  FiniteRing t({3, 2, 1u << 20, true});
  for (const char* f : {"x2*x1*x2 + x1", "x2*x1 - x1*x2*x1", "x1*x2 + x2*x1*x1", "x3*x1*x2 - x2"}) {
    auto tr = tilde_equivalence_check(parse_poly(f), t);
    EXPECT_TRUE(tr.agree) << f;
    EXPECT_LT(tr.ideal_size, t.size());
  }
}

TEST(Imagelab, ReportJson) {
  FiniteRing r({2, 2});
  auto rep = image_report(parse_poly("x1*x2 - x2*x1"), r);
  auto j = report_to_json(r, rep);
  EXPECT_EQ(j["ring"], "2x2@2");
  EXPECT_EQ(j["image_size"], rep.image.size());
  EXPECT_EQ(j["verdict"], "NonCentral");
  EXPECT_EQ(report_to_json(r, image_report(parse_poly("x1*x2 - x2*x1"), r)).dump(), j.dump());
}
