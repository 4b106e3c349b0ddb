#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "commalg/certificate.hpp"
#include "commalg/imagelab.hpp"

using namespace commalg;

namespace {

enum Exit : int {
  kOk = 0,
  kMismatch = 1,
  kParse = 2,
  kPrecondition = 3,
  kRetry = 4,
  kBudget = 5,
};

struct RunConfig {
  std::uint64_t seed = kDefaultSeed;
  std::optional<double> tolerance;
  std::uint64_t budget = std::uint64_t(1) << 24;
  std::string output = "-";
  std::string format = "json";

  double tol() const { return tolerance.value_or(1e-9); }

  Json to_json() const {
    Json j;
    j["seed"] = seed;
    if (tolerance)
      j["tolerance"] = *tolerance;
    else
      j["tolerance"] = nullptr;
    j["budget"] = budget;
    j["output"] = output;
    j["format"] = format;
    return j;
  }
};

// Explicit flags win over the environment, which wins over the defaults.
void apply_env(RunConfig& cfg, bool seed_given, bool tol_given) {
  if (const char* s = std::getenv("COMMALG_SEED"); s && !seed_given) {
    try {
      cfg.seed = std::stoull(s);
    } catch (const std::logic_error&) {
      throw SyntaxError(0, std::string("COMMALG_SEED is not an integer: ") + s);
    }
  }
  if (const char* t = std::getenv("COMMALG_TOLERANCE"); t && !tol_given) {
    try {
      cfg.tolerance = std::stod(t);
    } catch (const std::logic_error&) {
      throw SyntaxError(0, std::string("COMMALG_TOLERANCE is not a number: ") + t);
    }
  }
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.output == "-" || cfg.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.output, std::ios::binary);
  if (!out) fail(Errc::InvalidArgument, "cannot write " + cfg.output);
  out << text;
}

// What the caller must change, keyed by the failed precondition.
std::string hint(Errc e) {
  switch (e) {
    case Errc::NormTooLarge: return "a difference of two unit quaternions has norm at most 2";
    case Errc::NotUnitNorm: return "the input must be a unit quaternion";
    case Errc::NotSL: return "the input must have determinant (Dieudonne value) 1";
    case Errc::FieldTooSmall: return "the field must have more than n elements";
    case Errc::DomainMismatch: return "this factorization is not available over the chosen domain";
    case Errc::ShapeMismatch: return "the matrix has the wrong shape";
    case Errc::Degenerate2x2GF2: return "M_2(GF(2)) is a degenerate case";
    default: return {};
  }
}

int report_error(const Error& e) {
  std::cerr << "error: " << e.what() << "\n";
  switch (e.code()) {
    case Errc::SyntaxError:
    case Errc::UnknownVariable:
    case Errc::MalformedCertificate:
      return kParse;
    case Errc::RetryExhausted:
      return kRetry;
    case Errc::BudgetExceeded:
      return kBudget;
    default:
      if (auto h = hint(e.code()); !h.empty()) std::cerr << "precondition: " << h << "\n";
      return kPrecondition;
  }
}

// ---------------------------------------------------------------------------
// factor

struct FactorArgs {
  std::string kind, input, domain;
  std::optional<std::uint32_t> field;
};

template <class S>
FactorizationCertificate<S> produce(const Domain<S>& d, const FactorArgs& a, std::uint64_t seed) {
  constexpr bool quat = !Domain<S>::commutative;
  constexpr bool quat_float = std::is_same_v<S, QuatF>;
  auto wrong = [&]() -> FactorizationCertificate<S> {
    fail(Errc::DomainMismatch, a.kind + " is not available over " + d.descriptor().name());
  };
  Rng rng(seed);
  if (a.kind == "quat-diff" || a.kind == "quat-comm") {
    if constexpr (quat_float) {
      const QuatF q = d.parse(a.input);
      FactorizationCertificate<S> c;
      c.input = Matrix<S>::scalar(d, 1, q);
      c.seed = seed;
      c.tolerance = c.flag_tolerance = 1e-10;
      if (a.kind == "quat-diff") {
        auto uv = quat_diff_unit_norms(d, q);
        c.kind = "quat_diff";
        c.replay_rule = "difference";
        c.parts.push_back({PartTag::Difference,
                           {Matrix<S>::scalar(d, 1, uv.first), Matrix<S>::scalar(d, 1, uv.second)},
                           {{kFlagSL, true}}});
      } else {
        auto ab = unit_quaternion_commutator(d, q);
        c.kind = "quat_comm";
        c.parts.push_back({PartTag::MultCommutator,
                           {Matrix<S>::scalar(d, 1, ab.first), Matrix<S>::scalar(d, 1, ab.second)},
                           {{kFlagSkew, true}}});
      }
      return c;
    } else {
      return wrong();
    }
  }
  const Matrix<S> m = parse_matrix(d, a.input);
  if (a.kind == "two-comm") {
    if constexpr (quat)
      return two_commutators_quaternion(d, m, rng, seed);
    else
      return two_commutators_field(d, m, rng, seed);
  }
  if (a.kind == "qgtn") {
    if constexpr (quat) return q_gt_n_recursion(d, m, seed);
    return wrong();
  }
  if (a.kind == "skew") {
    if constexpr (quat_float) return skew_commutators_sl(d, m, rng, seed);
    return wrong();
  }
  if (a.kind == "sl-diff") {
    if constexpr (Domain<S>::commutative || quat_float) return sl_difference_certificate(d, m, rng, seed);
    return wrong();
  }
  if (a.kind == "waring2") {
    auto w = waring_split_2x2(d, m);
    w.cert.seed = seed;
    return w.cert;
  }
  fail(Errc::InvalidArgument, "unknown factorization " + a.kind);
}

std::string text_summary(const Json& cert, const VerifyResult& v) {
  std::ostringstream o;
  o << "kind: " << cert["kind"].get<std::string>() << "\n";
  o << "domain: " << cert["domain"].get<std::string>() << "\n";
  o << "input: " << cert["input"].dump() << "\n";
  o << "replay_rule: " << cert["replay_rule"].get<std::string>() << "\n";
  std::size_t k = 0;
  for (const auto& p : cert["parts"]) {
    o << "part " << k++ << ": " << p["tag"].get<std::string>();
    for (const auto& op : p["operands"]) o << " " << op.dump();
    if (!p["flags"].empty()) o << " flags=" << p["flags"].dump();
    o << "\n";
  }
  o << "replay: " << (v.ok ? "ok" : "FAILED") << " residual=" << detail::format_double(v.residual)
    << "\n";
  for (const auto& f : v.failures) o << "failure: " << f << "\n";
  return o.str();
}

template <class S>
int factor_in(const Domain<S>& d, const FactorArgs& a, const RunConfig& cfg) {
  const Json cert = certificate_to_json(d, produce(d, a, cfg.seed));
  const VerifyResult v = verify_certificate(cert);
  if (cfg.format == "text") {
    emit(cfg, text_summary(cert, v));
  } else {
    Json out = cert;
    out["replay"] = {{"ok", v.ok}, {"residual", v.residual}};
    out["run_config"] = cfg.to_json();
    emit(cfg, out.dump(2) + "\n");
  }
  if (!v.ok) std::cerr << "replay failed, residual " << detail::format_double(v.residual) << "\n";
  return v.ok ? kOk : kMismatch;
}

int run_factor(const FactorArgs& a, const RunConfig& cfg) {
  const bool quat_kind = a.kind == "quat-diff" || a.kind == "quat-comm" || a.kind == "skew";
  std::string dom = a.domain;
  if (a.field) {
    if (!dom.empty() && dom != "GF") fail(Errc::InvalidArgument, "--field conflicts with --domain " + dom);
    return factor_in(FieldGF{*a.field}, a, cfg);
  }
  if (dom.empty()) dom = (quat_kind || a.kind == "qgtn") ? "H" : "Q";
  if (dom == "Q") return factor_in(FieldQ{}, a, cfg);
  if (dom == "HQ") return factor_in(QuatRational{}, a, cfg);
  if (dom == "H") return factor_in(QuatFloat{cfg.tol()}, a, cfg);
  fail(Errc::InvalidArgument, "domain must be Q, HQ, H or given by --field");
}

// ---------------------------------------------------------------------------
// explore

struct ExploreArgs {
  std::string mode, ring = "2x2@2", poly = "x1*x2 - x2*x1";
  std::size_t max_deg = 3, k = 2, max_power = 2;
  bool sampling = false;
};

// Lets "x" stand for x1 so univariate input reads naturally.
std::string bare_x(const std::string& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    out += s[i];
    const bool ident_before = i > 0 && std::isalnum(static_cast<unsigned char>(s[i - 1]));
    if (s[i] == 'x' && !ident_before &&
        (i + 1 == s.size() || !std::isdigit(static_cast<unsigned char>(s[i + 1]))))
      out += '1';
  }
  return out;
}

Json dichotomy_json(const FiniteRing& r, const DichotomyReport& d) {
  Json j;
  j["exhaustive"] = d.exhaustive;
  j["image_size"] = d.image.size();
  j["additive_closure"] = set_to_json(r, d.additive);
  j["squares_additive_closure"] = set_to_json(r, d.squares_additive);
  j["ideal_verdict"] = verdict_name(d.ideal_verdict);
  j["commutator_verdict"] = verdict_name(d.commutator_verdict);
  return j;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

int run_explore(const ExploreArgs& a, RunConfig cfg) {
  FiniteRingSpec spec = parse_ring_spec(a.ring);
  spec.budget = cfg.budget;
  const FiniteRing r(spec);
  Json out;
  out["mode"] = a.mode;
  out["ring"] = spec.name();
  int code = kOk;

  if (a.mode == "sweep") {
    require(spec.n == 2 && spec.p == 2 && !spec.upper, Errc::DomainMismatch,
            "the sweep runs on 2x2@2 only");
    const SweepReport s = sweep_m2f2(r, a.max_deg, 2, cfg.budget);
    if (s.refutations) code = kMismatch;
    if (cfg.format == "json") {
      out["max_deg"] = a.max_deg;
      out["polynomials"] = s.polynomials;
      out["central_valued"] = s.central_valued;
      out["ideal_counts"] = s.ideal_counts;
      out["commutator_counts"] = s.commutator_counts;
      out["refutations"] = s.refutations;
      out["exceptional_set_matches"] = s.gf4_set_matches;
      out["gf4_witness"] = s.gf4_witness ? Json(*s.gf4_witness) : Json(nullptr);
      out["klein_witness"] = s.klein_witness ? Json(*s.klein_witness) : Json(nullptr);
      Json rows = Json::array();
      for (const auto& row : s.rows)
        rows.push_back({{"mask", row.mask},
                        {"poly", row.poly},
                        {"ideal_verdict", verdict_name(row.ideal_verdict)},
                        {"commutator_verdict", verdict_name(row.commutator_verdict)}});
      out["rows"] = std::move(rows);
      out["run_config"] = cfg.to_json();
      emit(cfg, out.dump(2) + "\n");
    } else {
      std::ostringstream o;
      o << "# run_config " << cfg.to_json().dump() << "\n";
      o << "mask,poly,ideal_verdict,commutator_verdict\n";
      for (const auto& row : s.rows)
        o << row.mask << "," << csv_quote(row.poly) << "," << verdict_name(row.ideal_verdict) << ","
          << verdict_name(row.commutator_verdict) << "\n";
      emit(cfg, o.str());
      std::cerr << s.polynomials << " polynomials, " << s.central_valued << " central-valued, "
                << s.refutations << " refutations\n";
    }
    return code;
  }

  if (a.mode == "pcomm") {
    const auto beta = parse_univariate(a.poly);
    const PCommReport p = p_commutator_set_check(beta, r);
    out["p"] = a.poly;
    out["p_central_valued"] = p.p_central_valued;
    out["verdict"] = p.p_central_valued ? "CentralValued" : verdict_name(p.verdict);
    out["p_image_additive_size"] = p.p_image_plus.size();
    out["p_commutators_additive"] = set_to_json(r, p.pcomm_plus);
    out["commutators_additive_size"] = p.comm_plus.size();
    if (!p.p_central_valued && p.verdict == Verdict::Refutation) code = kMismatch;
  } else {
    const FreePoly f = parse_poly(bare_x(a.poly));
    out["poly"] = to_string(f);
    if (a.mode == "image") {
      const Json rep = report_to_json(r, image_report(f, r, a.max_power, a.sampling, cfg.seed));
      out.erase("poly");
      out.update(rep);
    } else if (a.mode == "dichotomy") {
      require(spec.n == 2 && spec.p == 2 && !spec.upper, Errc::DomainMismatch,
              "the dichotomy check runs on 2x2@2 only");
      const DichotomyReport d = check_m2f2_dichotomies(f, r);
      out.update(dichotomy_json(r, d));
      if (d.ideal_verdict == Verdict::Refutation || d.commutator_verdict == Verdict::Refutation)
        code = kMismatch;
    } else if (a.mode == "sumlen") {
      const auto img = image_set(f, r, a.sampling, cfg.seed);
      const SumLengthProfile s = sum_length_profile(r, img.values, a.k);
      out["k"] = a.k;
      out["exhaustive"] = img.exhaustive;
      out["image_size"] = img.values.size();
      out["closure_size"] = s.closure_size;
      out["reaches_ring"] = s.reaches_ring;
      out["minimal_N"] = s.minimal_N;
      out["layer_sizes"] = s.layer_sizes;
    } else {
      fail(Errc::InvalidArgument, "unknown explore mode " + a.mode);
    }
  }
  if (cfg.format == "text") {
    std::ostringstream o;
    for (auto it = out.begin(); it != out.end(); ++it)
      o << it.key() << ": " << (it.value().is_string() ? it.value().get<std::string>() : it.value().dump())
        << "\n";
    emit(cfg, o.str());
  } else {
    out["run_config"] = cfg.to_json();
    emit(cfg, out.dump(2) + "\n");
  }
  return code;
}

// ---------------------------------------------------------------------------
// verify

int run_verify(const std::string& path, const RunConfig& cfg) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read " << path << "\n";
    return kParse;
  }
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: MalformedCertificate: " << e.what() << "\n";
    return kParse;
  }
  const VerifyResult v = verify_certificate(j, cfg.tolerance);
  std::ostringstream o;
  if (cfg.format == "text") {
    o << (v.ok ? "ok" : "mismatch") << " domain=" << v.domain
      << " residual=" << detail::format_double(v.residual) << "\n";
    for (const auto& f : v.failures) o << "failure: " << f << "\n";
  } else {
    Json out;
    out["ok"] = v.ok;
    out["domain"] = v.domain;
    out["residual"] = v.residual;
    out["failures"] = v.failures;
    out["run_config"] = cfg.to_json();
    o << out.dump(2) << "\n";
  }
  emit(cfg, o.str());
  if (!v.ok) std::cerr << "max residual " << detail::format_double(v.residual) << "\n";
  return v.ok ? kOk : kMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"commalg: commutator factorizations and polynomial images"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::optional<double> tol_flag;
  std::optional<std::uint64_t> seed_flag;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed_flag, "RNG seed");
    sub->add_option("--tolerance", tol_flag, "numeric tolerance");
    sub->add_option("--budget", cfg.budget, "work budget for finite enumeration");
    sub->add_option("-o,--output", cfg.output, "output path, - for stdout");
  };

  FactorArgs fa;
  auto* factor = app.add_subcommand("factor", "factor a matrix or quaternion and certify it");
  factor->add_option("kind", fa.kind, "factorization")
      ->required()
      ->check(CLI::IsMember({"two-comm", "qgtn", "skew", "sl-diff", "quat-diff", "quat-comm", "waring2"}));
  factor->add_option("input", fa.input, "matrix as \"a,b;c,d\" or a quaternion")->required();
  factor->add_option("--field", fa.field, "work over GF(p)");
  factor->add_option("--domain", fa.domain, "Q, HQ (exact quaternions) or H (float quaternions)")
      ->check(CLI::IsMember({"Q", "HQ", "H", "GF"}));
  factor->add_option("--format", cfg.format, "json or text")->check(CLI::IsMember({"json", "text"}));
  common(factor);

  ExploreArgs ea;
  std::string explore_format;
  auto* explore = app.add_subcommand("explore", "images of polynomials on finite matrix rings");
  explore->add_option("mode", ea.mode, "analysis")
      ->required()
      ->check(CLI::IsMember({"image", "dichotomy", "pcomm", "sumlen", "sweep"}));
  explore->add_option("--ring", ea.ring, "ring such as 2x2@2 or T3x3@2");
  explore->add_option("--p,--poly", ea.poly, "polynomial in x1, x2, ... (univariate in x for pcomm)");
  explore->add_option("--max-deg", ea.max_deg, "sweep degree bound");
  explore->add_option("--k", ea.k, "product length for sumlen");
  explore->add_option("--max-power", ea.max_power, "largest product power reported by image");
  explore->add_flag("--allow-sampling", ea.sampling, "sample instead of failing over budget");
  explore->add_option("--format", explore_format, "json, text or csv (sweep defaults to csv)")
      ->check(CLI::IsMember({"json", "text", "csv"}));
  common(explore);

  std::string path;
  auto* verify = app.add_subcommand("verify", "re-verify a certificate file");
  verify->add_option("path", path, "certificate JSON")->required();
  verify->add_option("--format", cfg.format, "json or text")->check(CLI::IsMember({"json", "text"}));
  common(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kParse;
  }

  try {
    if (seed_flag) cfg.seed = *seed_flag;
    if (tol_flag) cfg.tolerance = tol_flag;
    apply_env(cfg, seed_flag.has_value(), tol_flag.has_value());
    if (cfg.tolerance && !(*cfg.tolerance >= 0))
      fail(Errc::InvalidArgument, "tolerance must be nonnegative");
    if (*factor) return run_factor(fa, cfg);
    if (*explore) {
      if (explore_format.empty()) explore_format = ea.mode == "sweep" ? "csv" : "json";
      if (explore_format == "csv" && ea.mode != "sweep")
        fail(Errc::InvalidArgument, "csv output is only available for sweep");
      cfg.format = explore_format;
      return run_explore(ea, cfg);
    }
    return run_verify(path, cfg);
  } catch (const Error& e) {
    if (*verify && e.code() != Errc::SyntaxError) {
      std::cerr << "error: " << (e.code() == Errc::MalformedCertificate ? "" : "MalformedCertificate: ")
                << e.what() << "\n";
      return kParse;
    }
    return report_error(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kPrecondition;
  }
}
