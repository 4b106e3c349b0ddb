#pragma once

// Exhaustive laboratory over small matrix rings M_n(GF(p)) (and their
// upper-triangular subrings). Elements are packed base p into dense ids,
// sums and products come from lookup tables, and element sets are bitsets,
// so closures are cheap fixed-point iterations.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "commalg/freealg.hpp"
#include "commalg/linalg.hpp"

namespace commalg {

using Elem = std::uint16_t;

/// n x n matrices over GF(p); upper = only the upper-triangular subring.
struct FiniteRingSpec {
  std::size_t n = 2;
  std::uint32_t p = 2;
  std::uint64_t budget = std::uint64_t(1) << 24;
  bool upper = false;

  std::string name() const {
    return std::string(upper ? "T" : "") + std::to_string(n) + "x" + std::to_string(n) + "@" +
           std::to_string(p);
  }
};

/// "2x2@3" or "T3x3@2".
inline FiniteRingSpec parse_ring_spec(std::string_view text) {
  FiniteRingSpec s;
  std::string t(detail::trim(text));
  if (!t.empty() && t[0] == 'T') {
    s.upper = true;
    t.erase(0, 1);
  }
  const auto x = t.find('x'), at = t.find('@');
  if (x == std::string::npos || at == std::string::npos || at < x)
    throw SyntaxError(0, "ring spec must look like 2x2@3");
  try {
    std::size_t r = std::stoul(t.substr(0, x)), c = std::stoul(t.substr(x + 1, at - x - 1));
    if (r != c) throw SyntaxError(x, "ring must be square");
    s.n = r;
    s.p = static_cast<std::uint32_t>(std::stoul(t.substr(at + 1)));
  } catch (const std::logic_error&) {
    throw SyntaxError(0, "ring spec must look like 2x2@3");
  }
  require(s.n >= 1, Errc::InvalidArgument, "ring size must be positive");
  require(is_prime(s.p), Errc::InvalidArgument, std::to_string(s.p) + " is not prime");
  return s;
}

// ---------------------------------------------------------------------------

/// Subset of the id space.
class ElemSet {
 public:
  ElemSet() = default;
  explicit ElemSet(std::size_t universe) : universe_(universe), bits_((universe + 63) / 64, 0) {}

  std::size_t universe() const { return universe_; }
  bool contains(Elem e) const { return bits_[e >> 6] >> (e & 63) & 1; }
  bool insert(Elem e) {
    std::uint64_t& w = bits_[e >> 6];
    const std::uint64_t m = std::uint64_t(1) << (e & 63);
    if (w & m) return false;
    w |= m;
    return true;
  }
  std::size_t size() const {
    std::size_t c = 0;
    for (auto w : bits_) c += std::popcount(w);
    return c;
  }
  bool empty() const { return size() == 0; }
  std::vector<Elem> list() const {
    std::vector<Elem> out;
    for (std::size_t k = 0; k < bits_.size(); ++k)
      for (std::uint64_t w = bits_[k]; w; w &= w - 1)
        out.push_back(static_cast<Elem>(k * 64 + std::countr_zero(w)));
    return out;
  }
  bool subset_of(const ElemSet& o) const {
    for (std::size_t k = 0; k < bits_.size(); ++k)
      if (bits_[k] & ~o.bits_[k]) return false;
    return true;
  }
  ElemSet& operator|=(const ElemSet& o) {
    for (std::size_t k = 0; k < bits_.size(); ++k) bits_[k] |= o.bits_[k];
    return *this;
  }
  friend bool operator==(const ElemSet&, const ElemSet&) = default;

 private:
  std::size_t universe_ = 0;
  std::vector<std::uint64_t> bits_;
};

class FiniteRing {
 public:
  static constexpr std::size_t kMaxIds = 4096;

  explicit FiniteRing(const FiniteRingSpec& spec) : spec_(spec), field_(spec.p) {
    const std::size_t nn = spec.n * spec.n;
    std::uint64_t ids = 1;
    for (std::size_t k = 0; k < nn; ++k) {
      ids *= spec.p;
      require(ids <= kMaxIds, Errc::BudgetExceeded,
              spec.name() + " has more than " + std::to_string(kMaxIds) + " matrices");
    }
    ids_ = static_cast<std::size_t>(ids);
    digits_.assign(ids_ * nn, 0);
    for (std::size_t id = 0; id < ids_; ++id) {
      std::size_t v = id;
      for (std::size_t k = 0; k < nn; ++k) {
        digits_[id * nn + k] = static_cast<std::uint8_t>(v % spec.p);
        v /= spec.p;
      }
    }
    members_ = ElemSet(ids_);
    for (std::size_t id = 0; id < ids_; ++id) {
      bool in = true;
      if (spec.upper)
        for (std::size_t i = 0; i < spec.n; ++i)
          for (std::size_t j = 0; j < i; ++j) in &= digit(static_cast<Elem>(id), i, j) == 0;
      if (in) {
        members_.insert(static_cast<Elem>(id));
        elements_.push_back(static_cast<Elem>(id));
      }
    }
    add_.resize(ids_ * ids_);
    mul_.resize(ids_ * ids_);
    neg_.resize(ids_);
    std::vector<std::uint32_t> buf(nn);
    for (std::size_t a = 0; a < ids_; ++a) {
      for (std::size_t k = 0; k < nn; ++k) buf[k] = (spec.p - digits_[a * nn + k]) % spec.p;
      neg_[a] = pack(buf);
      for (std::size_t b = 0; b < ids_; ++b) {
        for (std::size_t k = 0; k < nn; ++k)
          buf[k] = (digits_[a * nn + k] + digits_[b * nn + k]) % spec.p;
        add_[a * ids_ + b] = pack(buf);
      }
    }
    for (Elem a : elements_)
      for (Elem b : elements_) {
        for (std::size_t i = 0; i < spec.n; ++i)
          for (std::size_t j = 0; j < spec.n; ++j) {
            std::uint32_t s = 0;
            for (std::size_t k = 0; k < spec.n; ++k) s += digit(a, i, k) * digit(b, k, j);
            buf[i * spec.n + j] = s % spec.p;
          }
        mul_[a * ids_ + b] = pack(buf);
      }
    scale_.resize(spec.p * ids_);
    for (std::uint32_t c = 0; c < spec.p; ++c)
      for (std::size_t a = 0; a < ids_; ++a) {
        for (std::size_t k = 0; k < nn; ++k) buf[k] = c * digits_[a * nn + k] % spec.p;
        scale_[c * ids_ + a] = pack(buf);
      }
    std::vector<std::uint32_t> eye(nn, 0);
    for (std::size_t i = 0; i < spec.n; ++i) eye[i * spec.n + i] = 1;
    one_ = pack(eye);
  }

  const FiniteRingSpec& spec() const { return spec_; }
  const FieldGF& field() const { return field_; }
  std::size_t ids() const { return ids_; }
  const std::vector<Elem>& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }
  const ElemSet& all() const { return members_; }
  ElemSet empty_set() const { return ElemSet(ids_); }

  Elem zero() const { return 0; }
  Elem one() const { return one_; }
  Elem add(Elem a, Elem b) const { return add_[a * ids_ + b]; }
  Elem sub(Elem a, Elem b) const { return add_[a * ids_ + neg_[b]]; }
  Elem neg(Elem a) const { return neg_[a]; }
  Elem mul(Elem a, Elem b) const { return mul_[a * ids_ + b]; }
  Elem scale(std::uint32_t c, Elem a) const { return scale_[(c % spec_.p) * ids_ + a]; }
  Elem bracket(Elem a, Elem b) const { return sub(mul(a, b), mul(b, a)); }

  std::uint32_t digit(Elem a, std::size_t i, std::size_t j) const {
    return digits_[a * spec_.n * spec_.n + i * spec_.n + j];
  }

  Matrix<Fp> to_matrix(Elem a) const {
    Matrix<Fp> m = Matrix<Fp>::zeros(field_, spec_.n, spec_.n);
    for (std::size_t i = 0; i < spec_.n; ++i)
      for (std::size_t j = 0; j < spec_.n; ++j) m(i, j) = field_.from_int(digit(a, i, j));
    return m;
  }
  Elem from_matrix(const Matrix<Fp>& m) const {
    require(m.rows() == spec_.n && m.cols() == spec_.n, Errc::ShapeMismatch,
            "matrix does not belong to " + spec_.name());
    std::vector<std::uint32_t> buf(spec_.n * spec_.n);
    for (std::size_t i = 0; i < spec_.n; ++i)
      for (std::size_t j = 0; j < spec_.n; ++j) buf[i * spec_.n + j] = m(i, j).v;
    Elem e = pack(buf);
    require(members_.contains(e), Errc::DomainMismatch, "matrix is not in " + spec_.name());
    return e;
  }
  Elem parse(std::string_view text) const;
  std::string format(Elem a) const {
    std::string out;
    for (std::size_t i = 0; i < spec_.n; ++i) {
      if (i) out += ';';
      for (std::size_t j = 0; j < spec_.n; ++j) {
        if (j) out += ',';
        out += std::to_string(digit(a, i, j));
      }
    }
    return out;
  }

  ElemSet set_of(std::initializer_list<Elem> xs) const {
    ElemSet s(ids_);
    for (Elem x : xs) s.insert(x);
    return s;
  }
  ElemSet parse_set(std::initializer_list<const char*> xs) const {
    ElemSet s(ids_);
    for (const char* x : xs) s.insert(parse(x));
    return s;
  }

 private:
  Elem pack(const std::vector<std::uint32_t>& entries) const {
    std::size_t v = 0;
    for (std::size_t k = entries.size(); k-- > 0;) v = v * spec_.p + entries[k];
    return static_cast<Elem>(v);
  }

  FiniteRingSpec spec_;
  FieldGF field_;
  std::size_t ids_ = 0;
  std::vector<std::uint8_t> digits_;
  ElemSet members_;
  std::vector<Elem> elements_;
  std::vector<Elem> add_, mul_, neg_, scale_;
  Elem one_ = 0;
};

inline Elem FiniteRing::parse(std::string_view text) const {
  std::vector<std::vector<Fp>> rows;
  std::size_t start = 0;
  while (true) {
    auto end = text.find(';', start);
    auto row = text.substr(start, end == std::string_view::npos ? end : end - start);
    std::vector<Fp> r;
    std::size_t cs = 0;
    while (true) {
      auto ce = row.find(',', cs);
      r.push_back(field_.parse(row.substr(cs, ce == std::string_view::npos ? ce : ce - cs)));
      if (ce == std::string_view::npos) break;
      cs = ce + 1;
    }
    rows.push_back(std::move(r));
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  for (const auto& r : rows)
    if (r.size() != rows.front().size()) throw SyntaxError(0, "ragged matrix");
  return from_matrix(Matrix<Fp>::from_rows(field_, rows));
}

// ---------------------------------------------------------------------------
// Closures.

/// X^+: in characteristic p the additive subgroup is the GF(p)-span.
inline ElemSet additive_closure(const FiniteRing& r, const ElemSet& s) {
  ElemSet out = r.empty_set();
  out.insert(r.zero());
  std::vector<Elem> span{r.zero()};
  for (Elem g : s.list()) {
    if (out.contains(g)) continue;
    const std::size_t base = span.size();
    for (std::uint32_t c = 1; c < r.spec().p; ++c) {
      Elem cg = r.scale(c, g);
      for (std::size_t k = 0; k < base; ++k) {
        Elem e = r.add(span[k], cg);
        if (out.insert(e)) span.push_back(e);
      }
    }
  }
  return out;
}

namespace detail {

/// Elements of s that were needed to span it, in id order.
inline std::vector<Elem> span_basis(const FiniteRing& r, const ElemSet& s) {
  std::vector<Elem> basis;
  ElemSet cur = r.set_of({r.zero()});
  for (Elem g : s.list())
    if (!cur.contains(g)) {
      basis.push_back(g);
      ElemSet gs = cur;
      gs.insert(g);
      cur = additive_closure(r, gs);
    }
  return basis;
}

}  // namespace detail

/// Subring generated (no unit adjoined): span of all nonempty products.
inline ElemSet subring_closure(const FiniteRing& r, const ElemSet& s) {
  ElemSet cur = additive_closure(r, s);
  while (true) {
    auto basis = detail::span_basis(r, cur);
    ElemSet next = cur;
    for (Elem a : basis)
      for (Elem b : basis) next.insert(r.mul(a, b));
    next = additive_closure(r, next);
    if (next == cur) return cur;
    cur = std::move(next);
  }
}

/// { x_1 ... x_k : x_i in S_i }.
inline ElemSet product_set(const FiniteRing& r, const std::vector<ElemSet>& sets) {
  require(!sets.empty(), Errc::InvalidArgument, "product_set needs at least one set");
  ElemSet cur = sets.front();
  for (std::size_t k = 1; k < sets.size(); ++k) {
    ElemSet next = r.empty_set();
    const auto right = sets[k].list();
    for (Elem a : cur.list())
      for (Elem b : right) next.insert(r.mul(a, b));
    cur = std::move(next);
  }
  return cur;
}

inline ElemSet power_set(const FiniteRing& r, const ElemSet& s, std::size_t k) {
  return product_set(r, std::vector<ElemSet>(k, s));
}

/// { [a, b] : a in A, b in B }.
inline ElemSet bracket_set(const FiniteRing& r, const ElemSet& a, const ElemSet& b) {
  ElemSet out = r.empty_set();
  const auto bl = b.list();
  for (Elem x : a.list())
    for (Elem y : bl) out.insert(r.bracket(x, y));
  return out;
}

inline ElemSet commutator_set(const FiniteRing& r) { return bracket_set(r, r.all(), r.all()); }

/// Two-sided ideal generated in a unital ring: span of R s R.
inline ElemSet ideal_closure(const FiniteRing& r, const ElemSet& s) {
  ElemSet cur = additive_closure(r, s);
  while (true) {
    ElemSet next = cur;
    for (Elem g : detail::span_basis(r, cur))
      for (Elem x : r.elements()) {
        next.insert(r.mul(x, g));
        next.insert(r.mul(g, x));
      }
    next = additive_closure(r, next);
    if (next == cur) return cur;
    cur = std::move(next);
  }
}

inline ElemSet center(const FiniteRing& r) {
  ElemSet out = r.empty_set();
  for (Elem z : r.elements()) {
    bool c = true;
    for (Elem x : r.elements())
      if (r.mul(x, z) != r.mul(z, x)) {
        c = false;
        break;
      }
    if (c) out.insert(z);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Polynomial images.

/// Coefficients reduced mod p with words, ready for table evaluation.
struct CompiledPoly {
  std::vector<std::pair<std::uint32_t, Word>> terms;
  int nvars = 0;
};

inline CompiledPoly compile_poly(const FiniteRing& r, const FreePoly& f) {
  require(f.characteristic() == 0 || f.characteristic() == r.spec().p, Errc::DomainMismatch,
          "GF(" + std::to_string(f.characteristic()) + ") polynomial on " + r.spec().name());
  CompiledPoly c;
  c.nvars = f.nvars();
  for (const auto& t : f.terms()) {
    Fp k = r.field().from_rational(t.coeff);
    if (k.v) c.terms.push_back({k.v, t.word});
  }
  return c;
}

inline Elem eval_compiled(const FiniteRing& r, const CompiledPoly& c, const Elem* args) {
  Elem acc = r.zero();
  for (const auto& [k, w] : c.terms) {
    Elem prod = r.one();
    for (int v : w) prod = r.mul(prod, args[v - 1]);
    acc = r.add(acc, r.scale(k, prod));
  }
  return acc;
}

struct ImageResult {
  ElemSet values;
  bool exhaustive = true;
  std::uint64_t tuples = 0;
};

namespace detail {

inline std::optional<std::uint64_t> tuple_count(std::size_t n, int m, std::uint64_t cap) {
  std::uint64_t t = 1;
  for (int k = 0; k < m; ++k) {
    if (t > cap / n) return std::nullopt;
    t *= n;
  }
  return t;
}

inline unsigned worker_count(std::uint64_t work) {
  if (work < (1u << 16)) return 1;
  return std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
}

/// Calls visit(worker, tuple) over every tuple in R^m, split by the first coordinate.
template <class Visit>
void for_each_tuple(const FiniteRing& r, int m, unsigned workers, Visit&& visit) {
  const auto& el = r.elements();
  const std::size_t n = el.size();
  auto run = [&](unsigned w) {
    std::vector<Elem> args(std::max(m, 1), r.zero());
    std::vector<std::size_t> idx(std::max(m, 1), 0);
    for (std::size_t first = w; first < (m ? n : 1); first += workers) {
      std::fill(idx.begin(), idx.end(), 0);
      idx[0] = first;
      while (true) {
        for (int k = 0; k < m; ++k) args[k] = el[idx[k]];
        visit(w, args.data());
        int k = m - 1;
        while (k >= 1 && ++idx[k] == n) idx[k--] = 0;
        if (k < 1) break;
      }
    }
  };
  if (workers == 1) {
    run(0);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
  for (auto& t : pool) t.join();
}

}  // namespace detail

/// f(R). Enumerates R^m when |R|^m fits in the budget; otherwise samples
/// `budget` random tuples (if allowed) and marks the result non-exhaustive.
inline ImageResult image_set(const FreePoly& f, const FiniteRing& r, bool allow_sampling = false,
                             std::uint64_t seed = kDefaultSeed) {
  const CompiledPoly c = compile_poly(r, f);
  const int m = c.nvars;
  ImageResult out{r.empty_set(), true, 0};
  auto total = detail::tuple_count(r.size(), m, r.spec().budget);
  if (!total) {
    if (!allow_sampling)
      fail(Errc::BudgetExceeded, "|R|^" + std::to_string(m) + " substitutions exceed the budget of " +
                                     std::to_string(r.spec().budget));
    out.exhaustive = false;
    Rng rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, r.size() - 1);
    std::vector<Elem> args(m);
    for (std::uint64_t t = 0; t < r.spec().budget; ++t) {
      for (auto& a : args) a = r.elements()[pick(rng)];
      out.values.insert(eval_compiled(r, c, args.data()));
    }
    out.tuples = r.spec().budget;
    return out;
  }
  out.tuples = *total;
  const unsigned workers = detail::worker_count(*total);
  std::vector<ElemSet> partial(workers, r.empty_set());
  detail::for_each_tuple(r, m, workers, [&](unsigned w, const Elem* args) {
    partial[w].insert(eval_compiled(r, c, args));
  });
  for (const auto& s : partial) out.values |= s;
  return out;
}

inline bool is_central_valued(const FiniteRing& r, const ElemSet& image) {
  return image.subset_of(center(r));
}

// ---------------------------------------------------------------------------
// The M_2(GF(2)) dichotomies.

/// The two exceptional 4-element sets on M_2(GF(2)): a Klein four-group of
/// trace-zero matrices, and a copy of GF(4).
inline ElemSet m2f2_exceptional_klein(const FiniteRing& r) {
  return r.parse_set({"0,0;0,0", "0,1;1,0", "1,1;0,1", "1,0;1,1"});
}
inline ElemSet m2f2_exceptional_gf4(const FiniteRing& r) {
  return r.parse_set({"0,0;0,0", "1,0;0,1", "1,1;1,0", "0,1;1,1"});
}

enum class Verdict {
  CentralValued,      // hypothesis excluded
  Full,               // (f(R)^2)^+ = R
  ContainsCommutators,  // [R, R] subset of f(R)^+
  EqualsCommutators,  // p[R, R]^+ = [R, R]
  ExceptionalKlein,
  ExceptionalGF4,
  CaseTwo,            // p(R)^+ = GF(4) copy and p[R, R]^+ = {0, 1}
  Inconclusive,       // sampled run that matched no branch
  Refutation,
};

inline std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::CentralValued: return "CentralValued";
    case Verdict::Full: return "Full";
    case Verdict::ContainsCommutators: return "ContainsCommutators";
    case Verdict::EqualsCommutators: return "EqualsCommutators";
    case Verdict::ExceptionalKlein: return "ExceptionalKlein";
    case Verdict::ExceptionalGF4: return "ExceptionalGF4";
    case Verdict::CaseTwo: return "CaseTwo";
    case Verdict::Inconclusive: return "Inconclusive";
    case Verdict::Refutation: return "REFUTATION";
  }
  return "?";
}

struct DichotomyReport {
  bool exhaustive = true;
  ElemSet image, additive, squares_additive;
  Verdict ideal_verdict = Verdict::CentralValued;      // (f(R)^2)^+ branch
  Verdict commutator_verdict = Verdict::CentralValued;  // f(R)^+ branch
};

/// Precomputed sets shared by every polynomial of a sweep.
struct M2F2Context {
  explicit M2F2Context(const FiniteRing& ring)
      : r(ring),
        ctr(center(ring)),
        comm_plus(additive_closure(ring, commutator_set(ring))),
        klein(m2f2_exceptional_klein(ring)),
        gf4(m2f2_exceptional_gf4(ring)) {
    const auto& s = ring.spec();
    require(s.n == 2 && s.p == 2 && !s.upper, Errc::InvalidArgument,
            "dichotomy check runs on M_2(GF(2))");
  }
  const FiniteRing& r;
  ElemSet ctr, comm_plus, klein, gf4;
};

inline DichotomyReport classify_image(const M2F2Context& ctx, const ElemSet& image, bool exhaustive) {
  DichotomyReport rep;
  rep.exhaustive = exhaustive;
  rep.image = image;
  rep.additive = additive_closure(ctx.r, image);
  rep.squares_additive = additive_closure(ctx.r, power_set(ctx.r, image, 2));
  if (image.subset_of(ctx.ctr)) return rep;
  auto refute = [&] { return exhaustive ? Verdict::Refutation : Verdict::Inconclusive; };
  if (rep.squares_additive == ctx.r.all())
    rep.ideal_verdict = Verdict::Full;
  else if (rep.squares_additive == ctx.gf4)
    rep.ideal_verdict = Verdict::ExceptionalGF4;
  else
    rep.ideal_verdict = refute();
  if (ctx.comm_plus.subset_of(rep.additive))
    rep.commutator_verdict = Verdict::ContainsCommutators;
  else if (rep.additive == ctx.klein)
    rep.commutator_verdict = Verdict::ExceptionalKlein;
  else if (rep.additive == ctx.gf4)
    rep.commutator_verdict = Verdict::ExceptionalGF4;
  else
    rep.commutator_verdict = refute();
  return rep;
}

inline DichotomyReport check_m2f2_dichotomies(const FreePoly& f, const FiniteRing& r) {
  M2F2Context ctx(r);
  auto img = image_set(f, r, true);
  return classify_image(ctx, img.values, img.exhaustive);
}

// ---------------------------------------------------------------------------
// Sweep: every GF(2) polynomial supported on words of length <= max_deg in
// x1, x2 (constants included).

struct SweepRow {
  std::uint32_t mask = 0;
  std::string poly;
  bool central_valued = false;
  Verdict ideal_verdict = Verdict::CentralValued;
  Verdict commutator_verdict = Verdict::CentralValued;
};

struct SweepReport {
  std::vector<Word> words;
  std::vector<SweepRow> rows;  // non-central-valued polynomials only
  std::uint64_t polynomials = 0, central_valued = 0;
  std::map<std::string, std::uint64_t> ideal_counts, commutator_counts;
  std::uint64_t refutations = 0;
  // A GF(4)-branch witness and one per Klein hit, if any occur.
  std::optional<std::string> gf4_witness, klein_witness;
  bool gf4_set_matches = true;  // every exceptional (f(R)^2)^+ equals the displayed set
};

inline std::vector<Word> words_up_to(int vars, std::size_t max_len) {
  std::vector<Word> out{{}};
  std::vector<Word> layer{{}};
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<Word> next;
    for (const auto& w : layer)
      for (int v = 1; v <= vars; ++v) {
        Word x = w;
        x.push_back(v);
        next.push_back(x);
      }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

inline FreePoly poly_from_mask(const std::vector<Word>& words, std::uint32_t mask) {
  std::vector<Term> t;
  for (std::size_t k = 0; k < words.size(); ++k)
    if (mask >> k & 1) t.push_back({Rational(1), words[k]});
  return FreePoly(2, std::move(t));
}

inline SweepReport sweep_m2f2(const FiniteRing& r, std::size_t max_deg = 3, int vars = 2,
                              std::uint64_t budget = std::uint64_t(1) << 26) {
  M2F2Context ctx(r);
  SweepReport rep;
  rep.words = words_up_to(vars, max_deg);
  require(rep.words.size() <= 24, Errc::BudgetExceeded, "sweep family too large");
  const std::uint64_t family = std::uint64_t(1) << rep.words.size();
  auto tuples = detail::tuple_count(r.size(), vars, budget);
  require(tuples && family * *tuples <= budget * 64, Errc::BudgetExceeded,
          "sweep exceeds the evaluation budget");
  // Word values per substitution; a polynomial's value is the sum over its mask.
  const std::size_t nw = rep.words.size();
  std::vector<Elem> wv;
  detail::for_each_tuple(r, vars, 1, [&](unsigned, const Elem* args) {
    for (const auto& w : rep.words) {
      Elem prod = r.one();
      for (int v : w) prod = r.mul(prod, args[v - 1]);
      wv.push_back(prod);
    }
  });
  const std::size_t nt = wv.size() / nw;
  const unsigned workers = detail::worker_count(family * nt);
  std::vector<std::vector<SweepRow>> parts(workers);
  std::vector<std::thread> pool;
  auto work = [&](unsigned w) {
    for (std::uint64_t mask = w; mask < family; mask += workers) {
      ElemSet img = r.empty_set();
      for (std::size_t t = 0; t < nt; ++t) {
        Elem acc = r.zero();
        for (std::uint64_t m = mask; m; m &= m - 1) acc = r.add(acc, wv[t * nw + std::countr_zero(m)]);
        img.insert(acc);
      }
      SweepRow row;
      row.mask = static_cast<std::uint32_t>(mask);
      auto c = classify_image(ctx, img, true);
      row.central_valued = img.subset_of(ctx.ctr);
      row.ideal_verdict = c.ideal_verdict;
      row.commutator_verdict = c.commutator_verdict;
      parts[w].push_back(row);
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  std::vector<SweepRow> all;
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  std::sort(all.begin(), all.end(), [](const SweepRow& a, const SweepRow& b) { return a.mask < b.mask; });
  rep.polynomials = all.size();
  for (auto& row : all) {
    if (row.central_valued) {
      ++rep.central_valued;
      continue;
    }
    row.poly = to_string(poly_from_mask(rep.words, row.mask));
    ++rep.ideal_counts[verdict_name(row.ideal_verdict)];
    ++rep.commutator_counts[verdict_name(row.commutator_verdict)];
    if (row.ideal_verdict == Verdict::Refutation || row.commutator_verdict == Verdict::Refutation)
      ++rep.refutations;
    if (row.ideal_verdict == Verdict::ExceptionalGF4 && !rep.gf4_witness) rep.gf4_witness = row.poly;
    if (row.commutator_verdict == Verdict::ExceptionalKlein && !rep.klein_witness)
      rep.klein_witness = row.poly;
    // Either exceptional f(R)^+ must force the exceptional (f(R)^2)^+.
    if ((row.commutator_verdict == Verdict::ExceptionalKlein ||
         row.commutator_verdict == Verdict::ExceptionalGF4) &&
        row.ideal_verdict != Verdict::ExceptionalGF4)
      rep.gf4_set_matches = false;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Polynomial commutators p(ab) - p(ba).

struct PCommReport {
  Verdict verdict = Verdict::CentralValued;
  ElemSet p_image_plus, pcomm_plus, comm_plus;
  bool p_central_valued = false;
};

inline PCommReport p_commutator_set_check(const std::vector<Rational>& beta, const FiniteRing& r) {
  require(beta.size() >= 2, Errc::InvalidArgument, "p must be nonconstant");
  std::vector<std::uint32_t> b;
  for (const auto& c : beta) b.push_back(r.field().from_rational(c).v);
  require(std::any_of(b.begin() + 1, b.end(), [](std::uint32_t c) { return c != 0; }),
          Errc::InvalidArgument, "p is constant modulo " + std::to_string(r.spec().p));
  std::vector<Elem> pv(r.ids(), 0);
  ElemSet pimg = r.empty_set();
  for (Elem x : r.elements()) {
    Elem acc = r.zero();
    for (std::size_t k = b.size(); k-- > 0;) acc = r.add(r.mul(acc, x), r.scale(b[k], r.one()));
    pv[x] = acc;
    pimg.insert(acc);
  }
  ElemSet pc = r.empty_set(), cm = r.empty_set();
  for (Elem x : r.elements())
    for (Elem y : r.elements()) {
      Elem xy = r.mul(x, y), yx = r.mul(y, x);
      pc.insert(r.sub(pv[xy], pv[yx]));
      cm.insert(r.sub(xy, yx));
    }
  PCommReport rep;
  rep.p_image_plus = additive_closure(r, pimg);
  rep.pcomm_plus = additive_closure(r, pc);
  rep.comm_plus = additive_closure(r, cm);
  rep.p_central_valued = pimg.subset_of(center(r));
  if (rep.p_central_valued) return rep;
  const auto& s = r.spec();
  const bool m2f2 = s.n == 2 && s.p == 2 && !s.upper;
  if (rep.pcomm_plus == rep.comm_plus) {
    rep.verdict = Verdict::EqualsCommutators;
  } else if (m2f2 && rep.pcomm_plus == m2f2_exceptional_klein(r)) {
    rep.verdict = Verdict::ExceptionalKlein;
  } else if (m2f2 && rep.p_image_plus == m2f2_exceptional_gf4(r) &&
             rep.pcomm_plus == r.set_of({r.zero(), r.one()})) {
    rep.verdict = Verdict::CaseTwo;
  } else {
    rep.verdict = Verdict::Refutation;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Sums of products.

struct SumLengthProfile {
  bool reaches_ring = false;
  std::size_t minimal_N = 0;
  std::size_t closure_size = 0;
  std::vector<std::size_t> layer_sizes;  // |L_0|, |L_1|, ...
};

/// L_0 = {0}, L_t = L_{t-1} + (S^[k] u {0}); minimal_N is the first t with
/// L_t = (S^[k])^+.
inline SumLengthProfile sum_length_profile(const FiniteRing& r, const ElemSet& s, std::size_t k) {
  require(!s.empty(), Errc::InvalidArgument, "sum_length_profile needs a nonempty set");
  require(k >= 1, Errc::InvalidArgument, "k must be positive");
  ElemSet prods = power_set(r, s, k);
  prods.insert(r.zero());
  const ElemSet target = additive_closure(r, prods);
  SumLengthProfile out;
  out.closure_size = target.size();
  out.reaches_ring = target == r.all();
  ElemSet layer = r.set_of({r.zero()});
  out.layer_sizes.push_back(1);
  const auto pl = prods.list();
  while (!(layer == target)) {
    ElemSet next = layer;
    for (Elem a : layer.list())
      for (Elem b : pl) next.insert(r.add(a, b));
    require(!(next == layer), Errc::InvalidArgument, "sum layers stalled");
    layer = std::move(next);
    out.layer_sizes.push_back(layer.size());
  }
  out.minimal_N = out.layer_sizes.size() - 1;
  return out;
}

/// R~ [S, R] R~ = R (the rings here are unital, so R~ = R).
inline bool fully_noncentral_check(const FiniteRing& r, const ElemSet& s) {
  return ideal_closure(r, bracket_set(r, s, r.all())) == r.all();
}

struct TildeReport {
  bool agree = true;
  std::uint64_t tuples = 0;
  std::size_t ideal_size = 0;
  std::optional<std::vector<Elem>> counterexample;
};

/// f(a) and f~(a) lie in the commutator ideal together, for every a in R^m.
inline TildeReport tilde_equivalence_check(const FreePoly& f, const FiniteRing& r) {
  const FreePoly ft = tilde_normalize(f);
  const CompiledPoly c = compile_poly(r, f), ct = compile_poly(r, ft);
  const int m = std::max(c.nvars, ct.nvars);
  auto total = detail::tuple_count(r.size(), m, r.spec().budget);
  if (!total)
    fail(Errc::BudgetExceeded, "tilde check needs |R|^" + std::to_string(m) + " substitutions");
  const ElemSet ideal = ideal_closure(r, commutator_set(r));
  TildeReport rep;
  rep.tuples = *total;
  rep.ideal_size = ideal.size();
  detail::for_each_tuple(r, m, 1, [&](unsigned, const Elem* args) {
    if (rep.counterexample) return;
    if (ideal.contains(eval_compiled(r, c, args)) != ideal.contains(eval_compiled(r, ct, args))) {
      rep.agree = false;
      rep.counterexample = std::vector<Elem>(args, args + m);
    }
  });
  return rep;
}

struct StandardProbe {
  std::size_t image_size = 0;
  bool equals_ring = false;
  bool image_plus_equals_commutators = false;
  std::optional<SumLengthProfile> profile;
};

/// (S_m(R)^k)^+ against R, with the sum length when it is all of R.
inline StandardProbe standard_poly_probe(int m, std::size_t k, const FiniteRing& r) {
  auto img = image_set(standard_poly(m), r);
  StandardProbe out;
  out.image_size = img.values.size();
  out.image_plus_equals_commutators =
      additive_closure(r, img.values) == additive_closure(r, commutator_set(r));
  out.equals_ring = additive_closure(r, power_set(r, img.values, k)) == r.all();
  if (out.equals_ring) out.profile = sum_length_profile(r, img.values, k);
  return out;
}

// ---------------------------------------------------------------------------
// Reports.

struct ImageReport {
  std::string poly, ring;
  bool exhaustive = true;
  ElemSet image, additive, subring;
  std::map<std::size_t, ElemSet> product_powers;  // k -> (f(R)^[k])^+
  std::string verdict;
  std::optional<std::size_t> minimal_N;
  std::vector<std::string> witnesses;
};

/// Image with its closures; checks image <= X^+ <= subring and idempotence.
inline ImageReport image_report(const FreePoly& f, const FiniteRing& r, std::size_t max_power = 2,
                                bool allow_sampling = true, std::uint64_t seed = kDefaultSeed) {
  ImageReport rep;
  rep.poly = to_string(f);
  rep.ring = r.spec().name();
  auto img = image_set(f, r, allow_sampling, seed);
  rep.exhaustive = img.exhaustive;
  rep.image = img.values;
  rep.additive = additive_closure(r, rep.image);
  rep.subring = subring_closure(r, rep.image);
  require(rep.image.subset_of(rep.additive) && rep.additive.subset_of(rep.subring) &&
              additive_closure(r, rep.additive) == rep.additive &&
              subring_closure(r, rep.subring) == rep.subring,
          Errc::HypothesisViolated, "closure axioms failed");
  for (std::size_t k = 1; k <= max_power; ++k)
    rep.product_powers[k] = additive_closure(r, power_set(r, rep.image, k));
  rep.verdict = is_central_valued(r, rep.image) ? "CentralValued" : "NonCentral";
  return rep;
}

inline nlohmann::ordered_json set_to_json(const FiniteRing& r, const ElemSet& s) {
  auto j = nlohmann::ordered_json::array();
  for (Elem e : s.list()) j.push_back(r.format(e));
  return j;
}

inline nlohmann::ordered_json report_to_json(const FiniteRing& r, const ImageReport& rep) {
  nlohmann::ordered_json j;
  j["poly"] = rep.poly;
  j["ring"] = rep.ring;
  j["exhaustive"] = rep.exhaustive;
  j["image_size"] = rep.image.size();
  j["image"] = set_to_json(r, rep.image);
  nlohmann::ordered_json cl;
  cl["additive"] = set_to_json(r, rep.additive);
  cl["subring_size"] = rep.subring.size();
  for (const auto& [k, s] : rep.product_powers) cl["power_" + std::to_string(k) + "_additive_size"] = s.size();
  j["closures"] = std::move(cl);
  j["verdict"] = rep.verdict;
  if (rep.minimal_N) j["minimal_N"] = *rep.minimal_N;
  j["witnesses"] = rep.witnesses;
  return j;
}

}  // namespace commalg
