#include "branchlab/groups.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <thread>
#include <unordered_set>

namespace branchlab {

// ---------------------------------------------------------------------------
// matrix basics

GElem gid(const FieldParams& F) {
  GElem g;
  g.e = {scalar(1), scalar(0), scalar(0), scalar(1)};
  g.level = F.prec;
  return g;
}

GElem g_w(const FieldParams& F) {
  GElem g;
  g.e = {scalar(0), scalar(1), scalar(1), scalar(0)};
  g.level = F.prec;
  return g;
}

GElem gmul(const FieldParams& F, const GElem& a, const GElem& b) {
  GElem c;
  c.e[0] = add(F, mul(F, a.e[0], b.e[0]), mul(F, a.e[1], b.e[2]));
  c.e[1] = add(F, mul(F, a.e[0], b.e[1]), mul(F, a.e[1], b.e[3]));
  c.e[2] = add(F, mul(F, a.e[2], b.e[0]), mul(F, a.e[3], b.e[2]));
  c.e[3] = add(F, mul(F, a.e[2], b.e[1]), mul(F, a.e[3], b.e[3]));
  c.level = std::min(a.level, b.level);
  return c;
}

Scalar gdet(const FieldParams& F, const GElem& a) {
  return sub(F, mul(F, a.e[0], a.e[3]), mul(F, a.e[1], a.e[2]));
}

GElem ginv(const FieldParams& F, const GElem& a) {
  Scalar d = gdet(F, a);
  require(is_unit(F, d), "ginv: determinant is not a unit");
  Scalar di = inv(F, d);
  GElem c;
  c.e[0] = mul(F, a.e[3], di);
  c.e[1] = mul(F, neg(F, a.e[1]), di);
  c.e[2] = mul(F, neg(F, a.e[2]), di);
  c.e[3] = mul(F, a.e[0], di);
  c.level = a.level;
  return c;
}

bool is_unitary_at(const FieldParams& F, const GElem& g, unsigned level) {
  // conj(g)^T w g = w:
  //  (1,1): tr(conj(g11) g21) = 0
  //  (1,2): conj(g11) g22 + conj(g21) g12 = 1
  //  (2,1): conj(g12) g21 + conj(g22) g11 = 1
  //  (2,2): tr(conj(g12) g22) = 0
  Scalar c11 = tr(F, mul(F, conj(F, g.e[0]), g.e[2]));
  if (!is_zero_at(F, c11, level)) return false;
  Scalar c22 = tr(F, mul(F, conj(F, g.e[1]), g.e[3]));
  if (!is_zero_at(F, c22, level)) return false;
  Scalar c12 = add(F, mul(F, conj(F, g.e[0]), g.e[3]), mul(F, conj(F, g.e[2]), g.e[1]));
  if (!is_zero_at(F, sub(F, c12, scalar(1)), level)) return false;
  return true;
}

Key gkey(const FieldParams& F, const GElem& g, unsigned level) {
  require(g.level >= level, "gkey: element not known to the requested level");
  uint64_t m = F.pk(std::min(level, F.prec));
  Key k{};
  for (int i = 0; i < 4; ++i) {
    uint64_t lo = g.e[i].a0 % m, hi = g.e[i].a1 % m;
    k[i / 2] |= (lo << (32 * (i % 2)));
    k[2 + i / 2] |= (hi << (32 * (i % 2)));
  }
  return k;
}

bool gequal_at(const FieldParams& F, const GElem& a, const GElem& b, unsigned level) {
  uint64_t m = F.pk(std::min(level, F.prec));
  for (int i = 0; i < 4; ++i)
    if (a.e[i].a0 % m != b.e[i].a0 % m || a.e[i].a1 % m != b.e[i].a1 % m) return false;
  return true;
}

std::string gstr(const FieldParams& F, const GElem& g) {
  auto s = [&](const Scalar& x) {
    std::string r = std::to_string(x.a0);
    if (x.a1) r += "+" + std::to_string(x.a1) + "r";
    return r;
  };
  (void)F;
  return "[" + s(g.e[0]) + ", " + s(g.e[1]) + "; " + s(g.e[2]) + ", " + s(g.e[3]) + "]@" +
         std::to_string(g.level);
}

std::string Monomial::str() const {
  std::string s = flip ? "w." : "";
  return s + "diag(pi^" + std::to_string(a) + ",pi^" + std::to_string(b) + ")";
}

bool conj_stays_integral(const FieldParams& F, const GElem& g, const Monomial& m) {
  long s = m.shift();
  if (s > 0) return divisible(F, g.e[2], unsigned(s));
  if (s < 0) return divisible(F, g.e[1], unsigned(-s));
  return true;
}

GElem conj_by_monomial(const FieldParams& F, const GElem& g, const Monomial& m) {
  long s = m.shift();
  GElem r = g;
  if (s != 0) {
    unsigned ss = unsigned(s > 0 ? s : -s);
    require(r.level > ss, "conjugation exhausts the precision budget");
    if (s > 0) {
      require(divisible(F, g.e[2], ss), "conjugate leaves the maximal compact subgroup");
      r.e[1] = shift_up(F, g.e[1], ss);
      r.e[2] = shift_down(F, g.e[2], ss);
    } else {
      require(divisible(F, g.e[1], ss), "conjugate leaves the maximal compact subgroup");
      r.e[1] = shift_down(F, g.e[1], ss);
      r.e[2] = shift_up(F, g.e[2], ss);
    }
    r.level -= ss;
  }
  if (m.flip) {
    // m = D w: m^{-1} g m = w^{-1} (D^{-1} g D) w, and w-conjugation swaps
    // both rows and columns
    std::swap(r.e[0], r.e[3]);
    std::swap(r.e[1], r.e[2]);
  }
  return r;
}

Monomial conj_monomial(const Monomial& n, const Monomial& m) {
  // m^{-1} n m for diagonal n (no flip in n when m flips non-trivially)
  Monomial r = n;
  if (m.flip && !n.flip) std::swap(r.a, r.b);
  return r;
}

// ---------------------------------------------------------------------------
// Lie elements

LieElem lie_from_zuv(const FieldParams& F, const Laurent& z, const Laurent& u, const Laurent& v) {
  // (z se, u se; v se, z se) with se = sqrt(eps); z,u,v base-field values
  auto se = [&](const Laurent& x) {
    Laurent r = x;
    r.mant = Scalar{0, x.mant.a0};
    require(x.mant.a1 == 0, "lie_from_zuv: coefficients must be base-field values");
    return r;
  };
  LieElem X;
  X.e[0] = se(z);
  X.e[1] = se(u);
  X.e[2] = se(v);
  X.e[3] = se(z);
  (void)F;
  return X;
}

bool lie_relation_holds(const FieldParams& F, const LieElem& X) {
  // conj(X)^T w + w X = 0:
  //  (1,1): conj(x21)+x21 = 0   (2,2): conj(x12)+x12 = 0
  //  (1,2): conj(x11)+x22 = 0   (2,1): conj(x22)+x11 = 0
  auto zero = [&](const Laurent& t) {
    Scalar m = reduce(F, t.mant, t.mant_prec);
    return m == scalar(0);
  };
  if (!zero(ladd(F, lconj(F, X.e[2]), X.e[2]))) return false;
  if (!zero(ladd(F, lconj(F, X.e[1]), X.e[1]))) return false;
  if (!zero(ladd(F, lconj(F, X.e[0]), X.e[3]))) return false;
  return true;
}

long lie_depth(const FieldParams& F, const LieElem& X) {
  long d = -1000;
  bool any_exact = false;
  for (auto& t : X.e) {
    LValuation lv = lvaluation(F, t);
    if (lv.exact) {
      any_exact = true;
      d = std::max(d, -lv.v);
    }
  }
  require(any_exact, "lie_depth: element indistinguishable from zero at precision");
  return d;
}

LieElem lie_conj(const FieldParams& F, const LieElem& X, const Monomial& m) {
  long s = m.shift();
  LieElem r = X;
  r.e[1] = lshift(F, X.e[1], s);
  r.e[2] = lshift(F, X.e[2], -s);
  if (m.flip) {
    std::swap(r.e[0], r.e[3]);
    std::swap(r.e[1], r.e[2]);
  }
  return r;
}

// ---------------------------------------------------------------------------
// specs

namespace {

SpecRef make_spec(Spec s) { return std::make_shared<const Spec>(std::move(s)); }

std::string pat_name(int a, int b, int c, int d) {
  auto f = [](int x) { return x >= kBoundNever ? std::string("inf") : std::to_string(x); };
  return "pat(" + f(a) + "," + f(b) + "," + f(c) + "," + f(d) + ")";
}

}  // namespace

SpecRef spec_pattern(int b11, int b12, int b21, int b22, const std::string& name) {
  Spec s;
  s.kind = Spec::Kind::pattern;
  s.b11 = b11;
  s.b12 = b12;
  s.b21 = b21;
  s.b22 = b22;
  s.name = name.empty() ? pat_name(b11, b12, b21, b22) : name;
  return make_spec(s);
}

SpecRef spec_K() { return spec_pattern(0, 0, 0, 0, "K"); }

SpecRef spec_Kd(unsigned d) {
  if (d == 0) return spec_K();
  int b = int(d);
  return spec_pattern(b, b, b, b, "K_" + std::to_string(d));
}

SpecRef spec_B() { return spec_pattern(0, 0, kBoundNever, 0, "B"); }
SpecRef spec_Bop() { return spec_pattern(0, kBoundNever, 0, 0, "Bop"); }
SpecRef spec_BKd(unsigned d) { return spec_pattern(0, 0, int(d), 0, "BK_" + std::to_string(d)); }
SpecRef spec_BopKd(unsigned d) { return spec_pattern(0, int(d), 0, 0, "BopK_" + std::to_string(d)); }

SpecRef spec_J(unsigned d) {
  require(d >= 1, "spec_J: depth must be positive");
  int h = int((d + 1) / 2);  // ceil(d/2)
  int h1 = int((d + 2) / 2); // ceil((d+1)/2)
  return spec_pattern(h, h, h1, h, "J_" + std::to_string(d));
}

SpecRef spec_center() {
  Spec s;
  s.kind = Spec::Kind::center;
  s.name = "Z";
  return make_spec(s);
}

SpecRef spec_uni_upper() {
  Spec s;
  s.kind = Spec::Kind::uni_upper;
  s.name = "U";
  return make_spec(s);
}

SpecRef spec_torus(const FieldParams& F, const Scalar& c, const std::string& name) {
  require(c.a1 == 0, "torus parameter must lie in the base field");
  Spec s;
  s.kind = Spec::Kind::torus;
  s.tc = c;
  s.name = name.empty() ? "T(c=" + std::to_string(c.a0) + ")" : name;
  (void)F;
  return make_spec(s);
}

SpecRef spec_product(SpecRef l, SpecRef r) {
  Spec s;
  s.kind = Spec::Kind::product;
  s.left = l;
  s.right = r;
  s.name = l->name + "." + r->name;
  return make_spec(s);
}

SpecRef spec_conjugate(SpecRef base, const Monomial& m) {
  Spec s;
  s.kind = Spec::Kind::conjugate;
  s.base = base;
  s.conj = m;
  s.name = base->name + "^" + m.str();
  return make_spec(s);
}

SpecRef moy_prasad_spec(const Rat& y, const Rat& r, bool plus) {
  require(r >= Rat(0), "filtration depth must be non-negative");
  auto ceil_of = [&](const Rat& x) -> int {
    long v = plus ? x.floor() + 1 : x.ceil();
    return int(std::max<long>(v, 0));
  };
  int d = ceil_of(r);
  int up = ceil_of(r - y);
  int lo = ceil_of(r + y);
  std::string nm = "G(" + y.str() + "," + r.str() + (plus ? "+" : "") + ")";
  return spec_pattern(d, up, lo, d, nm);
}

// ---------------------------------------------------------------------------
// membership

static bool pattern_member(const FieldParams& F, const Spec& S, const GElem& g, unsigned level) {
  auto bound = [&](int b) { return std::min<long>(b, long(level)); };
  long b;
  b = bound(S.b11);
  if (b > 0 && !divisible(F, sub(F, g.e[0], scalar(1)), unsigned(b))) return false;
  b = bound(S.b12);
  if (b > 0 && !divisible(F, g.e[1], unsigned(b))) return false;
  b = bound(S.b21);
  if (b > 0 && !divisible(F, g.e[2], unsigned(b))) return false;
  b = bound(S.b22);
  if (b > 0 && !divisible(F, sub(F, g.e[3], scalar(1)), unsigned(b))) return false;
  return true;
}

static bool torus_member(const FieldParams& F, const Spec& S, const GElem& g, unsigned level) {
  if (!is_zero_at(F, sub(F, g.e[0], g.e[3]), level)) return false;
  if (!is_zero_at(F, sub(F, g.e[2], mul(F, S.tc, g.e[1])), level)) return false;
  // conj(a) b in sqrt(eps) F, at full requested level
  Scalar t = tr(F, mul(F, conj(F, g.e[0]), g.e[1]));
  return is_zero_at(F, t, level);
}

static bool center_member(const FieldParams& F, const GElem& g, unsigned level) {
  if (!is_zero_at(F, g.e[1], level) || !is_zero_at(F, g.e[2], level)) return false;
  if (!is_zero_at(F, sub(F, g.e[0], g.e[3]), level)) return false;
  return is_zero_at(F, sub(F, norm(F, g.e[0]), scalar(1)), level);
}

static bool uni_member(const FieldParams& F, const GElem& g, unsigned level) {
  if (!is_zero_at(F, sub(F, g.e[0], scalar(1)), level)) return false;
  if (!is_zero_at(F, sub(F, g.e[3], scalar(1)), level)) return false;
  if (!is_zero_at(F, g.e[2], level)) return false;
  uint64_t m = F.pk(std::min(level, F.prec));
  return g.e[1].a0 % m == 0;  // entry in sqrt(eps) O_F
}

bool member_basic(const FieldParams& F, const Spec& S, const GElem& g, unsigned level) {
  require(g.level >= level, "member: element not known to the requested level");
  switch (S.kind) {
    case Spec::Kind::pattern:
      return pattern_member(F, S, g, level);
    case Spec::Kind::torus:
      return torus_member(F, S, g, level);
    case Spec::Kind::center:
      return center_member(F, g, level);
    case Spec::Kind::uni_upper:
      return uni_member(F, g, level);
    default:
      fail("member_basic: spec kind needs a group context");
  }
}

unsigned containment_level(SpecRef S) {
  switch (S->kind) {
    case Spec::Kind::pattern: {
      int m = std::max({S->b11, S->b12, S->b21, S->b22, 0});
      require(m < kBoundNever, "containment_level: no congruence subgroup inside the spec");
      return unsigned(m);
    }
    case Spec::Kind::product:
      return containment_level(S->right);
    case Spec::Kind::conjugate: {
      long s = S->conj.shift();
      return containment_level(S->base) + unsigned(s >= 0 ? s : -s);
    }
    default:
      fail("containment_level: spec contains no congruence subgroup");
  }
}

bool member(GroupCtx& C, const SpecRef& Sref, const GElem& g, unsigned level) {
  const Spec& S = *Sref;
  require(g.level >= level, "member: element not known to the requested level");
  switch (S.kind) {
    case Spec::Kind::pattern:
      return pattern_member(C.F, S, g, level);
    case Spec::Kind::torus:
      return torus_member(C.F, S, g, level);
    case Spec::Kind::center:
      return center_member(C.F, g, level);
    case Spec::Kind::uni_upper:
      return uni_member(C.F, g, level);
    case Spec::Kind::product: {
      auto trans = factor_transversal(C, S.left, S.right, level);
      for (const GElem& t : *trans) {
        GElem x = gmul(C.F, ginv(C.F, t), g);
        if (member(C, S.right, x, level)) return true;
      }
      return false;
    }
    case Spec::Kind::conjugate: {
      if (!conj_stays_integral(C.F, g, S.conj)) return false;
      GElem x = conj_by_monomial(C.F, g, S.conj);
      if (x.level < level) fail("member: conjugate spec needs more working precision");
      return member(C, S.base, x, level);
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// enumeration

namespace {

// all lifts of g (exact unitary mod p^k) to level k+1, restricted to the
// pattern when one is given; the fiber is a torsor under the residue Lie
// algebra (q^4 classes)
void fiber_lifts(const FieldParams& F, const GElem& g, unsigned k, const Spec* pat,
                 const std::function<void(const GElem&)>& out, bool first_only = false) {
  uint64_t pkk = F.pk(k);
  // correction so that g' is exactly unitary mod p^{k+1}
  Scalar c11 = tr(F, mul(F, conj(F, g.e[0]), g.e[2]));
  Scalar c22 = tr(F, mul(F, conj(F, g.e[1]), g.e[3]));
  Scalar c12 = sub(F, add(F, mul(F, conj(F, g.e[0]), g.e[3]), mul(F, conj(F, g.e[2]), g.e[1])),
                   scalar(1));
  require(divisible(F, c11, k) && divisible(F, c12, k) && divisible(F, c22, k),
          "fiber_lifts: parent not unitary at its level");
  Scalar d11 = shift_down(F, c11, k), d12 = shift_down(F, c12, k), d22 = shift_down(F, c22, k);
  require(d11.a1 % F.p == 0 && d22.a1 % F.p == 0, "defect is not Hermitian");
  uint64_t half = inv_mod(F, 2 % F.pn);
  // Y0 = (0, -d22/2; -d11/2, -d12)
  std::array<Scalar, 4> Y0 = {scalar(0), mul_int(F, neg(F, d22), half), mul_int(F, neg(F, d11), half),
                              neg(F, d12)};
  GElem base = g;
  // base = g (I + p^k Y0) = g + p^k (g Y0)
  {
    GElem gy;
    gy.e[0] = add(F, mul(F, g.e[0], Y0[0]), mul(F, g.e[1], Y0[2]));
    gy.e[1] = add(F, mul(F, g.e[0], Y0[1]), mul(F, g.e[1], Y0[3]));
    gy.e[2] = add(F, mul(F, g.e[2], Y0[0]), mul(F, g.e[3], Y0[2]));
    gy.e[3] = add(F, mul(F, g.e[2], Y0[1]), mul(F, g.e[3], Y0[3]));
    for (int i = 0; i < 4; ++i) base.e[i] = add(F, g.e[i], shift_up(F, gy.e[i], k));
  }
  // fiber candidates: base (I + p^k Y), Y over residue Lie classes
  uint64_t q = F.q;
  bool unconstrained = pat == nullptr ||
                       (std::min<long>(pat->b11, kBoundNever) <= long(k) && std::min<long>(pat->b12, kBoundNever) <= long(k) &&
                        std::min<long>(pat->b21, kBoundNever) <= long(k) && std::min<long>(pat->b22, kBoundNever) <= long(k));
  for (uint64_t u = 0; u < q; ++u)
    for (uint64_t v = 0; v < q; ++v)
      for (uint64_t yy = 0; yy < q; ++yy)
        for (uint64_t zz = 0; zz < q; ++zz) {
          std::array<Scalar, 4> Y = {Scalar{u, v}, Scalar{0, yy}, Scalar{0, zz},
                                     Scalar{sub_mod(F, 0, u), v}};
          GElem cand;
          cand.e[0] = add(F, base.e[0],
                          shift_up(F, add(F, mul(F, base.e[0], Y[0]), mul(F, base.e[1], Y[2])), k));
          cand.e[1] = add(F, base.e[1],
                          shift_up(F, add(F, mul(F, base.e[0], Y[1]), mul(F, base.e[1], Y[3])), k));
          cand.e[2] = add(F, base.e[2],
                          shift_up(F, add(F, mul(F, base.e[2], Y[0]), mul(F, base.e[3], Y[2])), k));
          cand.e[3] = add(F, base.e[3],
                          shift_up(F, add(F, mul(F, base.e[2], Y[1]), mul(F, base.e[3], Y[3])), k));
          cand.level = k + 1;
          if (!unconstrained && !pattern_member(F, *pat, cand, k + 1)) continue;
          out(cand);
          if (first_only) return;
        }
  (void)pkk;
}

// extends a level-k member to an exact member at working precision by one
// deterministic lift per remaining level
GElem exactify_pattern(const FieldParams& F, GElem g, unsigned k, const Spec* pat) {
  while (k < F.prec) {
    bool done = false;
    fiber_lifts(F, g, k, pat,
                [&](const GElem& c) {
                  if (!done) {
                    g = c;
                    done = true;
                  }
                },
                true);
    require(done, "exactify: no lift found (pattern not smooth?)");
    ++k;
  }
  g.level = F.prec;
  return g;
}

void dfs_pattern(const FieldParams& F, const Spec& S, GElem g, unsigned k, unsigned level,
                 uint64_t& count, uint64_t cap, const std::function<void(const GElem&)>& fn) {
  if (k == level) {
    GElem out = exactify_pattern(F, std::move(g), k, &S);
    if (++count > cap) fail("enumeration exceeds the configured cardinality cap");
    fn(out);
    return;
  }
  fiber_lifts(F, g, k, &S,
              [&](const GElem& c) { dfs_pattern(F, S, c, k + 1, level, count, cap, fn); });
}

std::vector<GElem> pattern_seeds(const FieldParams& F, const Spec& S) {
  // residue-level members: unitary mod p plus the mod-p congruences
  std::vector<GElem> seeds;
  uint64_t q = F.p;
  std::vector<Scalar> cands[4];
  for (int i = 0; i < 4; ++i) {
    int b = i == 0 ? S.b11 : i == 1 ? S.b12 : i == 2 ? S.b21 : S.b22;
    bool diag = (i == 0 || i == 3);
    if (b > 0) {
      cands[i] = {diag ? scalar(1) : scalar(0)};
    } else {
      for (uint64_t a = 0; a < q; ++a)
        for (uint64_t c = 0; c < q; ++c) cands[i].push_back(Scalar{a, c});
    }
  }
  for (auto& e0 : cands[0])
    for (auto& e1 : cands[1])
      for (auto& e2 : cands[2])
        for (auto& e3 : cands[3]) {
          GElem g;
          g.e = {e0, e1, e2, e3};
          g.level = 1;
          if (is_unitary_at(F, g, 1)) seeds.push_back(g);
        }
  return seeds;
}

}  // namespace

static void stream_pattern(GroupCtx& C, const Spec& S, unsigned level,
                           const std::function<void(const GElem&)>& fn) {
  const FieldParams& F = C.F;
  uint64_t count = 0;
  for (GElem seed : pattern_seeds(F, S)) {
    if (level == 1) {
      GElem out = exactify_pattern(F, seed, 1, &S);
      if (++count > C.cap) fail("enumeration exceeds the configured cardinality cap");
      fn(out);
    } else {
      dfs_pattern(F, S, seed, 1, level, count, C.cap, fn);
    }
  }
}

static const std::vector<Scalar>& norm_one_reps(GroupCtx& C) {
  if (C.norm_one_full.empty()) C.norm_one_full = enumerate_norm_one(C.F, C.F.prec);
  return C.norm_one_full;
}

static void stream_torus(GroupCtx& C, const Spec& S, unsigned level,
                         const std::function<void(const GElem&)>& fn) {
  const FieldParams& F = C.F;
  std::unordered_set<Key, KeyHash> seen;
  auto emit = [&](const Scalar& a, const Scalar& b) {
    GElem g;
    g.e = {a, b, mul(F, S.tc, b), a};
    g.level = F.prec;
    Key k = gkey(F, g, level);
    if (seen.insert(k).second) fn(g);
  };
  if (is_unit(F, S.tc)) {
    require(S.tc == scalar(1), "only the torus with unit parameter 1 is enumerable directly");
    uint64_t half = inv_mod(F, 2 % F.pn);
    const auto& e1 = norm_one_reps(C);
    for (const Scalar& c1 : e1)
      for (const Scalar& c2 : e1) {
        Scalar a = mul_int(F, add(F, c1, c2), half);
        Scalar b = mul_int(F, sub(F, c1, c2), half);
        emit(a, b);
      }
    return;
  }
  // v(c) >= 1: for each b, a runs over solve_norm(1 - c N(b)) * E^1 subject to
  // tr(conj(a) b) = 0
  const auto& e1 = norm_one_reps(C);
  for (uint64_t b0 = 0; b0 < F.pn; ++b0)
    for (uint64_t b1 = 0; b1 < F.pn; ++b1) {
      Scalar b{b0, b1};
      Scalar tau = sub(F, scalar(1), mul(F, S.tc, norm(F, b)));
      Scalar a0 = solve_norm(F, tau);
      for (const Scalar& z : e1) {
        Scalar a = mul(F, a0, z);
        if (!(tr(F, mul(F, conj(F, a), b)) == scalar(0))) continue;
        emit(a, b);
      }
    }
}

static void stream_center(GroupCtx& C, unsigned level, const std::function<void(const GElem&)>& fn) {
  const FieldParams& F = C.F;
  std::unordered_set<Key, KeyHash> seen;
  for (const Scalar& z : norm_one_reps(C)) {
    GElem g;
    g.e = {z, scalar(0), scalar(0), z};
    g.level = F.prec;
    if (seen.insert(gkey(F, g, level)).second) fn(g);
  }
}

static void stream_uni(GroupCtx& C, unsigned level, const std::function<void(const GElem&)>& fn) {
  const FieldParams& F = C.F;
  std::unordered_set<Key, KeyHash> seen;
  for (uint64_t b = 0; b < F.pn; ++b) {
    GElem g;
    g.e = {scalar(1), Scalar{0, b}, scalar(0), scalar(1)};
    g.level = F.prec;
    if (seen.insert(gkey(F, g, level)).second) fn(g);
  }
}

void stream_elements(GroupCtx& C, SpecRef S, unsigned level,
                     const std::function<void(const GElem&)>& fn) {
  require(level >= 1 && level <= C.F.prec, "stream_elements: bad level");
  switch (S->kind) {
    case Spec::Kind::pattern:
      stream_pattern(C, *S, level, fn);
      return;
    case Spec::Kind::torus:
      stream_torus(C, *S, level, fn);
      return;
    case Spec::Kind::center:
      stream_center(C, level, fn);
      return;
    case Spec::Kind::uni_upper:
      stream_uni(C, level, fn);
      return;
    case Spec::Kind::product: {
      auto trans = factor_transversal(C, S->left, S->right, level);
      stream_elements(C, S->right, level, [&](const GElem& x) {
        for (const GElem& t : *trans) fn(gmul(C.F, t, x));
      });
      return;
    }
    case Spec::Kind::conjugate: {
      // enumerate m x m^{-1}; the base must be enumerable at a deeper level
      Monomial mi = S->conj.inverse();
      stream_elements(C, S->base, level, [&](const GElem& x) {
        if (!conj_stays_integral(C.F, x, mi)) fail("conjugate spec enumeration leaves K");
        GElem y = conj_by_monomial(C.F, x, mi);
        require(y.level >= level, "conjugate spec enumeration needs more precision");
        fn(y);
      });
      return;
    }
  }
}

// ---------------------------------------------------------------------------
// cache

namespace {

uint64_t name_hash(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (char c : s) {
    h ^= uint64_t(uint8_t(c));
    h *= 1099511628211ull;
  }
  return h;
}

constexpr uint32_t kCacheVersion = 1;

bool cache_load(GroupCtx& C, const std::string& name, unsigned level, std::vector<GElem>& out) {
  if (C.cache_dir.empty()) return false;
  std::string path = C.cache_dir + "/enum_" + std::to_string(name_hash(name)) + "_" +
                     std::to_string(level) + ".bin";
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  uint32_t ver = 0, prec = 0, lev = 0;
  uint64_t p = 0, h = 0, n = 0;
  in.read(reinterpret_cast<char*>(&ver), 4);
  in.read(reinterpret_cast<char*>(&p), 8);
  in.read(reinterpret_cast<char*>(&prec), 4);
  in.read(reinterpret_cast<char*>(&lev), 4);
  in.read(reinterpret_cast<char*>(&h), 8);
  in.read(reinterpret_cast<char*>(&n), 8);
  if (!in || ver != kCacheVersion || p != C.F.p || prec != C.F.prec || lev != level ||
      h != name_hash(name))
    return false;
  out.resize(n);
  for (auto& g : out) {
    uint32_t buf[8];
    in.read(reinterpret_cast<char*>(buf), sizeof buf);
    for (int i = 0; i < 4; ++i) g.e[i] = Scalar{buf[2 * i], buf[2 * i + 1]};
    g.level = C.F.prec;
  }
  return bool(in);
}

void cache_store(GroupCtx& C, const std::string& name, unsigned level,
                 const std::vector<GElem>& v) {
  if (C.cache_dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(C.cache_dir, ec);
  std::string path = C.cache_dir + "/enum_" + std::to_string(name_hash(name)) + "_" +
                     std::to_string(level) + ".bin";
  std::ofstream out(path, std::ios::binary);
  if (!out) return;
  uint32_t ver = kCacheVersion, prec = C.F.prec, lev = level;
  uint64_t p = C.F.p, h = name_hash(name), n = v.size();
  out.write(reinterpret_cast<const char*>(&ver), 4);
  out.write(reinterpret_cast<const char*>(&p), 8);
  out.write(reinterpret_cast<const char*>(&prec), 4);
  out.write(reinterpret_cast<const char*>(&lev), 4);
  out.write(reinterpret_cast<const char*>(&h), 8);
  out.write(reinterpret_cast<const char*>(&n), 8);
  for (const auto& g : v) {
    uint32_t buf[8];
    for (int i = 0; i < 4; ++i) {
      buf[2 * i] = uint32_t(g.e[i].a0);
      buf[2 * i + 1] = uint32_t(g.e[i].a1);
    }
    out.write(reinterpret_cast<const char*>(buf), sizeof buf);
  }
}

}  // namespace

std::shared_ptr<const std::vector<GElem>> elements(GroupCtx& C, SpecRef S, unsigned level) {
  auto key = std::make_pair(S->name, level);
  {
    std::lock_guard<std::mutex> lk(C.mu);
    auto it = C.elem_memo.find(key);
    if (it != C.elem_memo.end()) return it->second;
  }
  auto vec = std::make_shared<std::vector<GElem>>();
  if (!cache_load(C, S->name, level, *vec)) {
    stream_elements(C, S, level, [&](const GElem& g) { vec->push_back(g); });
    if (vec->size() >= 50000) cache_store(C, S->name, level, *vec);
  }
  std::lock_guard<std::mutex> lk(C.mu);
  auto [it, ok] = C.elem_memo.emplace(key, vec);
  (void)ok;
  return it->second;
}

uint64_t cardinality(GroupCtx& C, SpecRef S, unsigned level) {
  auto key = std::make_pair(S->name, level);
  {
    std::lock_guard<std::mutex> lk(C.mu);
    auto it = C.elem_memo.find(key);
    if (it != C.elem_memo.end()) return it->second->size();
    auto ic = C.card_memo.find(key);
    if (ic != C.card_memo.end()) return ic->second;
  }
  uint64_t n = 0;
  if (S->kind == Spec::Kind::product) {
    n = factor_transversal(C, S->left, S->right, level)->size() * cardinality(C, S->right, level);
  } else {
    stream_elements(C, S, level, [&](const GElem&) { ++n; });
  }
  std::lock_guard<std::mutex> lk(C.mu);
  C.card_memo[key] = n;
  return n;
}

void parallel_stream(GroupCtx& C, SpecRef S, unsigned level, unsigned nthreads,
                     const std::function<void(unsigned, const GElem&)>& fn) {
  if (nthreads <= 1 || S->kind != Spec::Kind::pattern) {
    stream_elements(C, S, level, [&](const GElem& g) { fn(0, g); });
    return;
  }
  const FieldParams& F = C.F;
  std::vector<GElem> seeds = pattern_seeds(F, *S);
  std::vector<std::thread> workers;
  for (unsigned tid = 0; tid < nthreads; ++tid) {
    workers.emplace_back([&, tid]() {
      uint64_t count = 0;
      for (size_t i = tid; i < seeds.size(); i += nthreads) {
        if (level == 1) {
          GElem out = exactify_pattern(F, seeds[i], 1, S.get());
          fn(tid, out);
        } else {
          dfs_pattern(F, *S, seeds[i], 1, level, count, C.cap, [&](const GElem& g) { fn(tid, g); });
        }
      }
    });
  }
  for (auto& w : workers) w.join();
}

std::shared_ptr<const std::vector<GElem>> left_transversal(GroupCtx& C, SpecRef H, unsigned level) {
  auto key = std::make_tuple(std::string("K/"), H->name, level);
  {
    std::lock_guard<std::mutex> lk(C.mu);
    auto it = C.transversal_memo.find(key);
    if (it != C.transversal_memo.end()) return it->second;
  }
  auto reps = std::make_shared<std::vector<GElem>>();
  std::vector<GElem> inv_reps;
  stream_elements(C, spec_K(), level, [&](const GElem& g) {
    for (const GElem& xi : inv_reps)
      if (member(C, H, gmul(C.F, xi, g), level)) return;
    reps->push_back(g);
    inv_reps.push_back(ginv(C.F, g));
  });
  std::lock_guard<std::mutex> lk(C.mu);
  auto [it, ok] = C.transversal_memo.emplace(key, reps);
  (void)ok;
  return it->second;
}

std::shared_ptr<const std::vector<GElem>> factor_transversal(GroupCtx& C, SpecRef left,
                                                             SpecRef right, unsigned level) {
  auto key = std::make_tuple(left->name, right->name, level);
  {
    std::lock_guard<std::mutex> lk(C.mu);
    auto it = C.transversal_memo.find(key);
    if (it != C.transversal_memo.end()) return it->second;
  }
  auto reps = std::make_shared<std::vector<GElem>>();
  std::vector<GElem> inv_reps;
  stream_elements(C, left, level, [&](const GElem& g) {
    for (const GElem& xi : inv_reps)
      if (member(C, right, gmul(C.F, xi, g), level)) return;
    reps->push_back(g);
    inv_reps.push_back(ginv(C.F, g));
  });
  std::lock_guard<std::mutex> lk(C.mu);
  auto [it, ok] = C.transversal_memo.emplace(key, reps);
  (void)ok;
  return it->second;
}

// ---------------------------------------------------------------------------
// constructive decompositions

std::pair<GElem, GElem> factor_B_Kd(const FieldParams& F, const GElem& a, unsigned d) {
  require(d >= 1, "factor_B_Kd: d must be positive");
  require(divisible(F, a.e[2], std::min(d, a.level)), "factor_B_Kd: element not in B K_d");
  require(is_unit(F, a.e[3]), "factor_B_Kd: lower-right entry must be a unit");
  GElem b, k;
  b.e = {inv(F, conj(F, a.e[3])), a.e[1], scalar(0), a.e[3]};
  b.level = a.level;
  k.e = {scalar(1), scalar(0), mul(F, a.e[2], inv(F, a.e[3])), scalar(1)};
  k.level = a.level;
  require(gequal_at(F, gmul(F, b, k), a, a.level), "factor_B_Kd: product check failed");
  return {b, k};
}

BopTFactorization decompose_Bop_T(const FieldParams& F, const GElem& k, const Scalar& c) {
  const Scalar x = k.e[0], y = k.e[1], z = k.e[2], w = k.e[3];
  BopTFactorization out;
  auto finish = [&](GElem b, GElem t, bool used_w, unsigned result_level) {
    b.level = t.level = result_level;
    require(gequal_at(F, used_w ? gmul(F, gmul(F, b, g_w(F)), t) : gmul(F, b, t), k, result_level),
            "decompose_Bop_T: product check failed");
    out.b = b;
    out.t = t;
    out.used_w = used_w;
  };
  auto torus_elem = [&](const Scalar& a, const Scalar& b12) {
    GElem t;
    t.e = {a, b12, mul(F, c, b12), a};
    t.level = k.level;
    return t;
  };
  if (is_zero_at(F, y, k.level)) {
    finish(k, gid(F), false, k.level);
    return out;
  }
  if (!is_unit(F, y)) {
    // y in p_E \ {0}: x is a unit and k = (x 0; z xbar^{-1}) (1 m; 0 1)
    require(is_unit(F, x), "decompose_Bop_T: expected unit diagonal");
    Scalar m = mul(F, y, inv(F, x));
    GElem b1;
    b1.e = {x, scalar(0), z, inv(F, conj(F, x))};
    b1.level = k.level;
    Scalar tau = sub(F, scalar(1), mul(F, mul(F, m, m), c));
    Scalar a = solve_norm(F, tau);
    GElem b2;
    b2.e = {a, scalar(0), neg(F, mul(F, mul(F, inv(F, conj(F, a)), m), c)), inv(F, conj(F, a))};
    b2.level = k.level;
    GElem t = torus_elem(inv(F, a), mul(F, m, inv(F, a)));
    finish(gmul(F, b1, b2), t, false, k.level);
    return out;
  }
  // y a unit: k = (y 0; w ybar^{-1}) (m 1; 1 0) with m = x y^{-1} in sqrt(eps) O_F
  Scalar m = mul(F, x, inv(F, y));
  GElem b1;
  b1.e = {y, scalar(0), w, inv(F, conj(F, y))};
  b1.level = k.level;
  if (is_unit(F, m)) {
    Scalar tau = sub(F, c, mul(F, m, m));
    Scalar a = solve_norm(F, tau);
    GElem b2;
    b2.e = {a, scalar(0), neg(F, mul(F, inv(F, conj(F, a)), m)), inv(F, conj(F, a))};
    b2.level = k.level;
    // t = (a^{-1} m, a^{-1}; a^{-1} c, a^{-1} m)
    GElem t;
    t.e = {mul(F, inv(F, a), m), inv(F, a), mul(F, inv(F, a), c), mul(F, inv(F, a), m)};
    t.level = k.level;
    finish(gmul(F, b1, b2), t, false, k.level);
    return out;
  }
  // m in sqrt(eps) p_F: the w-coset
  // needs m^2 / c integral: v(m) >= 1 >= v(c)
  unsigned vc = val_int(F, c.a0);
  require(vc <= 1, "decompose_Bop_T: unexpected torus parameter");
  Scalar m2_over_c;
  if (vc == 0) {
    m2_over_c = mul(F, mul(F, m, m), inv(F, c));
  } else {
    Scalar m2 = mul(F, m, m);
    require(divisible(F, m2, 1), "decompose_Bop_T: valuation mismatch");
    Scalar unit_part = scalar(c.a0 / F.p);
    m2_over_c = mul(F, shift_down(F, m2, 1), inv(F, unit_part));
  }
  Scalar tau = sub(F, scalar(1), m2_over_c);
  Scalar a = solve_norm(F, tau);
  Scalar m_over_c;
  if (vc == 0) {
    m_over_c = mul(F, m, inv(F, c));
  } else {
    require(divisible(F, m, 1), "decompose_Bop_T: valuation mismatch");
    Scalar unit_part = scalar(c.a0 / F.p);
    m_over_c = mul(F, shift_down(F, m, 1), inv(F, unit_part));
  }
  GElem b2;
  b2.e = {a, scalar(0), neg(F, mul(F, inv(F, conj(F, a)), m_over_c)), inv(F, conj(F, a))};
  b2.level = k.level;
  // t = (a^{-1}, a^{-1} m / c; a^{-1} m, a^{-1})
  GElem t;
  t.e = {inv(F, a), mul(F, inv(F, a), m_over_c), mul(F, inv(F, a), m), inv(F, a)};
  t.level = k.level;
  GElem b = gmul(F, b1, b2);
  // dividing by the torus parameter costs v(c) digits of precision
  unsigned rl = k.level - vc;
  if (vc == 0) {
    // unramified torus: w lies in the torus itself, fold it into t
    finish(b, gmul(F, g_w(F), t), false, rl);
  } else {
    finish(b, t, true, rl);
  }
  return out;
}

LieElem mp_isomorphism(const FieldParams& F, const GElem& g, const Rat& y, const Rat& r,
                       const Rat& s) {
  require(Rat(2) * r >= s && s > r, "mp_isomorphism: need 2r >= s > r");
  // membership in G_{y,r} at the coset level
  SpecRef Gyr = moy_prasad_spec(y, r);
  unsigned lvl = unsigned(std::min<long>(long(g.level), s.ceil()));
  require(pattern_member(F, *Gyr, g, lvl), "mp_isomorphism: element outside G_{y,r}");
  LieElem X;
  for (int i = 0; i < 4; ++i) {
    Scalar d = g.e[i];
    if (i == 0 || i == 3) d = sub(F, d, scalar(1));
    X.e[i] = Laurent{0, d, g.level};
  }
  return X;
}

// ---------------------------------------------------------------------------
// double cosets

std::vector<GElem> intersection_conj(GroupCtx& C, SpecRef H1, SpecRef H2, const GElem& g,
                                     unsigned level) {
  std::vector<GElem> out;
  GElem gi = ginv(C.F, g);
  stream_elements(C, H1, level, [&](const GElem& h) {
    GElem x = gmul(C.F, gi, gmul(C.F, h, g));
    if (member(C, H2, x, level)) out.push_back(h);
  });
  return out;
}

namespace {

bool in_double_coset(GroupCtx& C, SpecRef H1, SpecRef H2, const GElem& rep, const GElem& x,
                     unsigned level) {
  // x in H1 rep H2  <=>  exists h1: (h1 rep)^{-1} x in H2
  auto h1 = elements(C, H1, level);
  GElem ri = ginv(C.F, rep);
  for (const GElem& h : *h1) {
    GElem t = gmul(C.F, ri, gmul(C.F, ginv(C.F, h), x));
    if (member(C, H2, t, level)) return true;
  }
  return false;
}

}  // namespace

CosetSystem find_double_cosets(GroupCtx& C, SpecRef H1, SpecRef H2, unsigned level) {
  CosetSystem sys;
  sys.H1 = H1;
  sys.H2 = H2;
  sys.level = level;
  uint64_t total = cardinality(C, spec_K(), level);
  uint64_t n1 = cardinality(C, H1, level);
  uint64_t n2 = cardinality(C, H2, level);
  uint64_t mass = 0;
  auto K = elements(C, spec_K(), level);
  for (const GElem& x : *K) {
    if (mass >= total) break;
    bool covered = false;
    for (const GElem& r : sys.reps)
      if (in_double_coset(C, H1, H2, r, x, level)) {
        covered = true;
        break;
      }
    if (covered) continue;
    uint64_t isz = intersection_conj(C, H1, H2, x, level).size();
    sys.reps.push_back(x);
    sys.inter_size.push_back(isz);
    require(isz > 0 && (n1 * n2) % isz == 0, "double coset mass is not integral");
    mass += n1 * n2 / isz;
  }
  require(mass == total, "double coset masses do not exhaust the group");
  sys.verified = true;
  return sys;
}

DoubleCosetReport double_coset_verify(GroupCtx& C, SpecRef H1, SpecRef H2,
                                      const std::vector<GElem>& reps, unsigned level) {
  DoubleCosetReport rep;
  for (size_t i = 0; i < reps.size() && rep.distinct; ++i)
    for (size_t j = i + 1; j < reps.size(); ++j)
      if (in_double_coset(C, H1, H2, reps[i], reps[j], level)) {
        rep.distinct = false;
        rep.detail = "representative " + std::to_string(j) + " lies in the double coset of " +
                     std::to_string(i);
        break;
      }
  uint64_t total = cardinality(C, spec_K(), level);
  uint64_t n1 = cardinality(C, H1, level);
  uint64_t n2 = cardinality(C, H2, level);
  uint64_t mass = 0;
  for (const GElem& r : reps) {
    uint64_t sz = intersection_conj(C, H1, H2, r, level).size();
    if (sz == 0 || (n1 * n2) % sz != 0) {
      rep.complete = false;
      rep.detail = "intersection size does not divide |H1||H2|";
      return rep;
    }
    mass += n1 * n2 / sz;
  }
  if (mass != total) {
    rep.complete = false;
    rep.detail = "mass " + std::to_string(mass) + " != |K| " + std::to_string(total);
  }
  return rep;
}

}  // namespace branchlab
