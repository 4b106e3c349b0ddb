#include <gtest/gtest.h>

#include "commalg/certificate.hpp"

using namespace commalg;

namespace {

void expect_verifies(const Json& j) {
  auto r = verify_certificate(j);
  EXPECT_TRUE(r.ok) << (r.failures.empty() ? "" : r.failures.front());
}

Errc verify_error(const Json& j) {
  try {
    verify_certificate(j);
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::InvalidArgument;
}

}  // namespace

TEST(Certificate, MatrixText) {
  FieldGF f5{5};
  auto m = parse_matrix(f5, "1, 0; 0, 6");
  EXPECT_EQ(m, Matrix<Fp>::identity(f5, 2));
  QuatRational h;
  auto q = parse_matrix(h, "i+j,1/2;0,-k");
  EXPECT_EQ(q(0, 1), h.parse("1/2"));
  EXPECT_EQ(parse_matrix(h, format_matrix(h, q)), q);
  EXPECT_THROW(parse_matrix(f5, "1,2;3"), SyntaxError);
  EXPECT_THROW(parse_matrix(f5, "1,,2"), SyntaxError);
  EXPECT_THROW(parse_matrix(h, "1,q"), SyntaxError);
}

TEST(Certificate, RoundTripAndTamper) {
  FieldGF f5{5};
  Rng rng(1);
  auto a = random_matrix(f5, 3, 3, rng);
  auto cert = two_commutators_field(f5, a, rng);
  Json j = certificate_to_json(f5, cert);
  expect_verifies(j);
  // Decoding and re-encoding is the identity on the text.
  EXPECT_EQ(certificate_to_json(f5, certificate_from_json(f5, j)).dump(), j.dump());
  Json bad = j;
  auto& cell = bad["parts"][1]["operands"][0][0][0];
  cell = std::to_string((std::stoi(cell.get<std::string>()) + 1) % 5);
  auto r = verify_certificate(bad);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.residual, 1.0);
  // A false invertibility claim is caught even when the product is right.
  Json claim = j;
  claim["parts"][1]["flags"]["invertible"] = true;
  auto z = Matrix<Fp>::zeros(f5, 3, 3);
  claim["input"] = matrix_to_json(f5, z);
  claim["parts"][1]["operands"][0] = matrix_to_json(f5, z);
  EXPECT_FALSE(verify_certificate(claim).ok);
}

TEST(Certificate, Malformed) {
  FieldQ q;
  auto cert = two_commutators_field(q, Matrix<Rational>::diagonal(q, {1, 2}));
  Json j = certificate_to_json(q, cert);
  expect_verifies(j);
  Json x = j;
  x.erase("input");
  EXPECT_EQ(verify_error(x), Errc::MalformedCertificate);
  x = j;
  x["domain"] = "GF(4)";
  EXPECT_EQ(verify_error(x), Errc::MalformedCertificate);
  x = j;
  x["parts"][0]["tag"] = "Bracket";
  EXPECT_EQ(verify_error(x), Errc::MalformedCertificate);
  x = j;
  x["parts"][0]["operands"][0][0][0] = "1/0";
  EXPECT_EQ(verify_error(x), Errc::MalformedCertificate);
  x = j;
  x["parts"][0]["operands"].erase(1);
  EXPECT_EQ(verify_error(x), Errc::MalformedCertificate);
  x = j;
  x["replay_rule"] = "sum";
  EXPECT_EQ(verify_error(x), Errc::MalformedCertificate);
  x = j;
  x["parts"][0]["operands"][0] = Json::array({Json::array({"1"})});
  EXPECT_EQ(verify_error(x), Errc::MalformedCertificate);
}

TEST(Certificate, QuaternionFloat) {
  QuatFloat h;
  Rng rng(2);
  auto a = random_matrix(h, 3, 3, rng);
  Json j = certificate_to_json(h, two_commutators_quaternion(h, a, rng));
  expect_verifies(j);
  EXPECT_EQ(j["domain"], "H(float)");
  // Floats print shortest round-trip, so decoding is lossless.
  EXPECT_EQ(certificate_to_json(h, certificate_from_json(h, j)).dump(), j.dump());
  auto tight = verify_certificate(j, 0.0);
  EXPECT_GT(tight.residual, 0.0);
  EXPECT_FALSE(tight.ok);
  Json bad = j;
  bad["parts"][0]["operands"][1][0][0] = "7";
  EXPECT_FALSE(verify_certificate(bad).ok);
}

TEST(Certificate, DifferenceRuleAndWitnesses) {
  FieldGF f7{7};
  Rng rng(3);
  auto sl = sl_difference_certificate(f7, random_matrix(f7, 3, 3, rng), rng);
  Json j = certificate_to_json(f7, sl);
  expect_verifies(j);
  Json bad = j;
  for (int k = 0; k < 2; ++k) {  // same shift on both sides: difference survives, det may not
    auto& e = bad["parts"][0]["operands"][k][0][1];
    e = std::to_string((std::stoi(e.get<std::string>()) + 3) % 7);
  }
  auto r = verify_certificate(bad);
  auto b = matrix_from_json(f7, bad["parts"][0]["operands"][0]);
  EXPECT_EQ(r.ok, determinant(f7, b) == f7.one() &&
                      determinant(f7, matrix_from_json(f7, bad["parts"][0]["operands"][1])) ==
                          f7.one());

  QuatFloat h;
  std::vector<FreePoly> polys(8, standard_poly(2));
  polys[3] = standard_poly(3);
  auto m = random_matrix(h, 2, 2, rng);
  Json tr = certificate_to_json(h, theorem_real_decomposition(h, m, polys, rng));
  ASSERT_TRUE(tr.contains("witnesses"));
  expect_verifies(tr);
  Json tw = tr;
  tw["witnesses"][0]["poly"] = "x1*x2 + x2*x1";
  EXPECT_FALSE(verify_certificate(tw).ok);
}

TEST(Certificate, WaringAndScalars) {
  QuatRational h;
  auto m = parse_matrix(h, "1+i,j;2,k");
  auto w = waring_split_2x2(h, m);
  expect_verifies(certificate_to_json(h, w.cert));

  // A 1x1 difference of unit quaternions, as the CLI writes it.
  QuatFloat hf;
  auto uv = quat_diff_unit_norms(hf, hf.parse("1+j"));
  FactorizationCertificate<QuatF> c;
  c.kind = "quat_diff";
  c.input = Matrix<QuatF>::scalar(hf, 1, hf.parse("1+j"));
  c.parts.push_back({PartTag::Difference,
                     {Matrix<QuatF>::scalar(hf, 1, uv.first), Matrix<QuatF>::scalar(hf, 1, uv.second)},
                     {{kFlagSL, true}}});
  c.replay_rule = "difference";
  c.tolerance = c.flag_tolerance = 1e-10;
  expect_verifies(certificate_to_json(hf, c));
}

TEST(Certificate, Deterministic) {
  FieldGF f7{7};
  auto run = [&] {
    Rng rng(kDefaultSeed);
    auto a = random_matrix(f7, 4, 4, rng);
    return certificate_to_json(f7, two_commutators_field(f7, a, rng)).dump(2);
  };
  EXPECT_EQ(run(), run());
}
