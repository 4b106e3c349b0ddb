#pragma once

// JSON certificates and an independent verifier.
//
// verify_certificate() deliberately avoids replay_factorization(): it only
// multiplies, subtracts, inverts and takes determinants, so a bug in the
// producing pipeline cannot hide behind the same bug in the checker.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "commalg/commfact.hpp"

namespace commalg {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Matrix text: rows separated by ';', entries by ','.

template <class S>
Matrix<S> parse_matrix(const Domain<S>& d, std::string_view text) {
  std::vector<std::vector<S>> rows;
  std::size_t start = 0;
  while (true) {
    std::size_t end = text.find(';', start);
    std::string_view row = text.substr(start, end == std::string_view::npos ? end : end - start);
    std::vector<S> entries;
    std::size_t cs = 0;
    while (true) {
      std::size_t ce = row.find(',', cs);
      std::string_view cell = row.substr(cs, ce == std::string_view::npos ? ce : ce - cs);
      if (detail::trim(cell).empty()) throw SyntaxError(start + cs, "empty matrix entry");
      try {
        entries.push_back(d.parse(cell));
      } catch (const SyntaxError& e) {
        throw SyntaxError(start + cs + e.offset(), "bad matrix entry '" + std::string(cell) + "'");
      }
      if (ce == std::string_view::npos) break;
      cs = ce + 1;
    }
    if (!rows.empty() && entries.size() != rows.front().size())
      throw SyntaxError(start, "ragged matrix row");
    rows.push_back(std::move(entries));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return Matrix<S>::from_rows(d, rows);
}

template <class S>
std::string format_matrix(const Domain<S>& d, const Matrix<S>& m) {
  std::string out;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (i) out += ';';
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += d.format(m(i, j));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON encoding. Scalars are strings so exact values survive and output is
// byte-stable.

template <class S>
Json matrix_to_json(const Domain<S>& d, const Matrix<S>& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json r = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(d.format(m(i, j)));
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace detail {

[[noreturn]] inline void malformed(const std::string& why) {
  fail(Errc::MalformedCertificate, why);
}

inline const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) malformed(std::string("missing field '") + key + "'");
  return j.at(key);
}

}  // namespace detail

template <class S>
Matrix<S> matrix_from_json(const Domain<S>& d, const Json& j) {
  if (!j.is_array() || j.empty()) detail::malformed("matrix must be a nonempty array of rows");
  std::vector<std::vector<S>> rows;
  for (const auto& r : j) {
    if (!r.is_array() || r.empty()) detail::malformed("matrix row must be a nonempty array");
    std::vector<S> entries;
    for (const auto& e : r) {
      if (!e.is_string()) detail::malformed("matrix entries must be strings");
      try {
        entries.push_back(d.parse(e.get<std::string>()));
      } catch (const Error& err) {
        detail::malformed(std::string("bad scalar: ") + err.what());
      }
    }
    if (!rows.empty() && entries.size() != rows.front().size())
      detail::malformed("ragged matrix");
    rows.push_back(std::move(entries));
  }
  return Matrix<S>::from_rows(d, rows);
}

template <class S>
Json certificate_to_json(const Domain<S>& d, const FactorizationCertificate<S>& c) {
  Json j;
  j["kind"] = c.kind;
  j["domain"] = d.descriptor().name();
  j["input"] = matrix_to_json(d, c.input);
  Json parts = Json::array();
  for (const auto& p : c.parts) {
    Json jp;
    jp["tag"] = part_tag_name(p.tag);
    Json ops = Json::array();
    for (const auto& m : p.operands) ops.push_back(matrix_to_json(d, m));
    jp["operands"] = std::move(ops);
    Json flags = Json::object();
    for (const auto& [k, v] : p.flags) flags[k] = v;
    jp["flags"] = std::move(flags);
    if (p.group) jp["group"] = p.group;
    parts.push_back(std::move(jp));
  }
  j["parts"] = std::move(parts);
  j["replay_rule"] = c.replay_rule;
  j["seed"] = c.seed;
  j["tolerances"] = {{"replay", c.tolerance}, {"flags", c.flag_tolerance}};
  if (!c.witnesses.empty()) {
    Json ws = Json::array();
    for (const auto& w : c.witnesses) {
      Json args = Json::array();
      for (const auto& m : w.args) args.push_back(matrix_to_json(d, m));
      ws.push_back({{"poly", w.poly}, {"part", w.part}, {"operand", w.operand}, {"args", args}});
    }
    j["witnesses"] = std::move(ws);
  }
  return j;
}

template <class S>
FactorizationCertificate<S> certificate_from_json(const Domain<S>& d, const Json& j) {
  using detail::field;
  using detail::malformed;
  FactorizationCertificate<S> c;
  try {
    c.kind = j.contains("kind") ? j.at("kind").get<std::string>() : std::string();
    c.input = matrix_from_json(d, field(j, "input"));
    const Json& parts = field(j, "parts");
    if (!parts.is_array()) malformed("parts must be an array");
    for (const auto& jp : parts) {
      Part<S> p;
      try {
        p.tag = parse_part_tag(field(jp, "tag").get<std::string>());
      } catch (const Error& e) {
        if (e.code() == Errc::MalformedCertificate) throw;
        malformed(e.what());
      }
      const Json& ops = field(jp, "operands");
      if (!ops.is_array()) malformed("operands must be an array");
      for (const auto& m : ops) p.operands.push_back(matrix_from_json(d, m));
      if (jp.contains("flags")) {
        if (!jp.at("flags").is_object()) malformed("flags must be an object");
        for (auto it = jp.at("flags").begin(); it != jp.at("flags").end(); ++it)
          p.flags[it.key()] = it.value().template get<bool>();
      }
      if (jp.contains("group")) p.group = jp.at("group").get<int>();
      c.parts.push_back(std::move(p));
    }
    c.replay_rule = field(j, "replay_rule").get<std::string>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("tolerances")) {
      const Json& t = j.at("tolerances");
      if (t.contains("replay")) c.tolerance = t.at("replay").get<double>();
      if (t.contains("flags")) c.flag_tolerance = t.at("flags").get<double>();
    }
    if (j.contains("witnesses"))
      for (const auto& jw : j.at("witnesses")) {
        Witness<S> w;
        w.poly = field(jw, "poly").get<std::string>();
        w.part = field(jw, "part").get<std::size_t>();
        w.operand = field(jw, "operand").get<std::size_t>();
        for (const auto& m : field(jw, "args")) w.args.push_back(matrix_from_json(d, m));
        c.witnesses.push_back(std::move(w));
      }
  } catch (const nlohmann::json::exception& e) {
    malformed(e.what());
  }
  return c;
}

// ---------------------------------------------------------------------------
// Independent verification.

struct VerifyResult {
  bool ok = true;
  double residual = 0.0;
  std::string domain;
  std::vector<std::string> failures;
};

namespace detail {

template <class S>
double gap(const Domain<S>& d, const Matrix<S>& ref, const Matrix<S>& got) {
  if constexpr (Domain<S>::exact) return ref == got ? 0.0 : 1.0;
  double diff = 0.0, scale = 1.0;
  for (std::size_t k = 0; k < ref.data().size(); ++k) {
    diff = std::max(diff, d.magnitude(ref.data()[k] - got.data()[k]));
    scale = std::max(scale, d.magnitude(ref.data()[k]));
  }
  return diff / scale;
}

template <class S>
bool within(double g, double tol) {
  return Domain<S>::exact ? g == 0.0 : g <= tol;
}

template <class S>
VerifyResult verify_typed(const Domain<S>& d, const FactorizationCertificate<S>& c,
                          std::optional<double> tol_override) {
  VerifyResult r;
  r.domain = d.descriptor().name();
  const double tol = tol_override ? *tol_override : c.tolerance;
  const double ftol = tol_override ? *tol_override : c.flag_tolerance;
  auto bad = [&](std::string why) {
    r.ok = false;
    r.failures.push_back(std::move(why));
  };
  auto compare = [&](const Matrix<S>& ref, const Matrix<S>& got, const std::string& what) {
    double g = gap(d, ref, got);
    r.residual = std::max(r.residual, g);
    if (!within<S>(g, tol)) bad(what + " does not reconstruct the input");
  };

  const std::size_t n = c.input.rows();
  if (!c.input.square()) malformed("input is not square");
  const Matrix<S> id = Matrix<S>::identity(d, n);
  std::vector<Matrix<S>> vals;
  for (std::size_t k = 0; k < c.parts.size(); ++k) {
    const Part<S>& p = c.parts[k];
    const std::string where = "part " + std::to_string(k);
    const std::size_t want = p.tag == PartTag::Factor || p.tag == PartTag::InverseFactor ? 1 : 2;
    if (p.operands.size() != want) malformed(where + ": wrong operand count");
    for (const auto& m : p.operands)
      if (m.rows() != n || m.cols() != n) malformed(where + ": operand shape differs from input");
    const auto& x = p.operands[0];
    auto inv = [&](const Matrix<S>& m) -> std::optional<Matrix<S>> {
      try {
        return inverse(d, m);
      } catch (const Error&) {
        return std::nullopt;
      }
    };
    Matrix<S> v;
    switch (p.tag) {
      case PartTag::Commutator: v = x * p.operands[1] - p.operands[1] * x; break;
      case PartTag::Difference: v = x - p.operands[1]; break;
      case PartTag::Factor: v = x; break;
      case PartTag::InverseFactor: {
        auto xi = inv(x);
        if (!xi) {
          bad(where + ": inverse factor is singular");
          return r;
        }
        v = *xi;
        break;
      }
      case PartTag::MultCommutator: {
        auto xi = inv(x), yi = inv(p.operands[1]);
        if (!xi || !yi) {
          bad(where + ": multiplicative commutator of a singular matrix");
          return r;
        }
        v = x * p.operands[1] * *xi * *yi;
        break;
      }
    }
    for (const auto& [flag, on] : p.flags) {
      if (!on) continue;
      if (flag == kFlagInvertible) {
        auto vi = inv(v);
        if (!vi || !within<S>(gap(d, id, v * *vi), std::max(tol, 1e-12)))
          bad(where + ": not invertible");
      } else if (flag == kFlagSkew) {
        for (const auto& z : p.operands)
          if (!within<S>(gap(d, Matrix<S>::zeros(d, n, n), z * z + id), ftol))
            bad(where + ": operand squares to something other than -I");
      } else if (flag == kFlagSL) {
        for (const auto& z : p.operands) {
          double off;
          if constexpr (Domain<S>::commutative) {
            off = d.equal(determinant(d, z), d.one()) ? 0.0 : 1.0;
          } else if constexpr (Domain<S>::exact) {
            if (n != 1) fail(Errc::DomainMismatch, "SL membership over H(Q) needs n = 1");
            off = z(0, 0).norm() == 1 ? 0.0 : 1.0;
          } else {
            off = std::fabs(dieudonne_value(d, z) - 1.0);
          }
          if (!within<S>(off, ftol)) bad(where + ": operand not in SL_n");
        }
      } else {
        malformed(where + ": unknown flag '" + flag + "'");
      }
    }
    vals.push_back(std::move(v));
  }

  auto prod = [&](std::size_t from, int group) {
    Matrix<S> acc = id;
    for (std::size_t k = from; k < vals.size(); ++k)
      if (group < 0 || c.parts[k].group == group) acc = acc * vals[k];
    return acc;
  };
  if (c.replay_rule == "product") {
    compare(c.input, prod(0, -1), "product of parts");
  } else if (c.replay_rule == "difference") {
    if (vals.empty() || c.parts[0].tag != PartTag::Difference)
      malformed("difference rule needs a leading Difference part");
    compare(c.input, vals[0], "difference");
    bool g1 = false, g2 = false;
    for (std::size_t k = 1; k < c.parts.size(); ++k) {
      g1 |= c.parts[k].group == 1;
      g2 |= c.parts[k].group == 2;
    }
    if (g1) compare(c.parts[0].operands[0], prod(1, 1), "group 1 product");
    if (g2) compare(c.parts[0].operands[1], prod(1, 2), "group 2 product");
  } else {
    malformed("unknown replay rule '" + c.replay_rule + "'");
  }

  for (const auto& w : c.witnesses) {
    if (w.part >= c.parts.size() || w.operand >= c.parts[w.part].operands.size())
      malformed("witness points outside the parts");
    FreePoly f;
    try {
      f = parse_poly(w.poly);
    } catch (const Error& e) {
      malformed(std::string("witness polynomial: ") + e.what());
    }
    double g = gap(d, c.parts[w.part].operands[w.operand], evaluate(d, f, w.args));
    if (!within<S>(g, std::max(tol, ftol)))
      bad("witness " + w.poly + " misses part " + std::to_string(w.part));
  }
  return r;
}

}  // namespace detail

/// Dispatches on the recorded domain and replays. Throws MalformedCertificate
/// for structural problems; a mismatch is reported through ok = false.
inline VerifyResult verify_certificate(const Json& j, std::optional<double> tol_override = {}) {
  const std::string dom = detail::field(j, "domain").is_string()
                              ? j.at("domain").get<std::string>()
                              : (detail::malformed("domain must be a string"), std::string());
  auto run = [&](const auto& d) {
    try {
      return detail::verify_typed(d, certificate_from_json(d, j), tol_override);
    } catch (const Error& e) {
      if (e.code() == Errc::MalformedCertificate) throw;
      detail::malformed(e.what());
    }
  };
  if (dom == "Q") return run(FieldQ{});
  if (dom == "H(Q)") return run(QuatRational{});
  if (dom == "H(float)") return run(QuatFloat{});
  if (dom.size() > 4 && dom.rfind("GF(", 0) == 0 && dom.back() == ')') {
    std::uint32_t p = 0;
    try {
      p = static_cast<std::uint32_t>(std::stoul(dom.substr(3, dom.size() - 4)));
      return run(FieldGF{p});
    } catch (const std::logic_error&) {
    } catch (const Error& e) {
      if (e.code() != Errc::InvalidArgument) throw;
    }
  }
  detail::malformed("unknown domain '" + dom + "'");
}

}  // namespace commalg
