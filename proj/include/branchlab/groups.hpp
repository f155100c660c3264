#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "branchlab/padic.hpp"

namespace branchlab {

// 2x2 matrix over O_E/p^N satisfying the unitarity relation
// conj(g)^T w g = w  (w antidiagonal) modulo p^level.  Entries are stored to
// full working precision; `level` is the precision to which the entries are
// meaningful and the relation holds.  Conjugation by monomial matrices with
// pi-power entries lowers `level` by the shift.
struct GElem {
  std::array<Scalar, 4> e{};  // row-major: g11 g12 g21 g22
  unsigned level = 0;
};

using Key = std::array<uint64_t, 4>;

struct KeyHash {
  size_t operator()(const Key& k) const {
    uint64_t h = 1469598103934665603ull;
    for (uint64_t x : k) {
      h ^= x;
      h *= 1099511628211ull;
    }
    return size_t(h);
  }
};

GElem gid(const FieldParams& F);
GElem g_w(const FieldParams& F);  // antidiagonal (0 1; 1 0)
GElem gmul(const FieldParams& F, const GElem& a, const GElem& b);
GElem ginv(const FieldParams& F, const GElem& a);
Scalar gdet(const FieldParams& F, const GElem& a);
bool is_unitary_at(const FieldParams& F, const GElem& g, unsigned level);
Key gkey(const FieldParams& F, const GElem& g, unsigned level);
bool gequal_at(const FieldParams& F, const GElem& a, const GElem& b, unsigned level);
std::string gstr(const FieldParams& F, const GElem& g);

// monomial conjugators: (w if flip) * diag(pi^a, pi^b); these normalize the
// unitary group and act on congruence data by shifting valuations
struct Monomial {
  long a = 0;
  long b = 0;
  bool flip = false;

  static Monomial eta(long d) { return {0, d, false}; }
  static Monomial alpha(long t) { return {-t, t, false}; }
  static Monomial w() { return {0, 0, true}; }
  static Monomial alpha_w(long t) { return {-t, t, true}; }
  static Monomial alpha_eta(long t, long d = 1) { return {-t, t + d, false}; }

  bool is_identity() const { return a == 0 && b == 0 && !flip; }
  long shift() const { return b - a; }
  Monomial inverse() const {
    if (!flip) return {-a, -b, false};
    return {-b, -a, true};  // (D w)^{-1} = w^{-1} D^{-1} = (w D^{-1} w) w
  }
  std::string str() const;
};

// m^{-1} g m; requires the divisibility that keeps the result integral,
// otherwise reports that the conjugate leaves the maximal compact subgroup
GElem conj_by_monomial(const FieldParams& F, const GElem& g, const Monomial& m);
bool conj_stays_integral(const FieldParams& F, const GElem& g, const Monomial& m);
// m^{-1} n m for monomials (covers w alpha^k w^{-1} = alpha^{-k})
Monomial conj_monomial(const Monomial& n, const Monomial& m);

// Lie algebra element of u(1,1): entries as Laurent values subject to
// conj(X)^T w + w X = 0 at the working precision
struct LieElem {
  std::array<Laurent, 4> e{};
};

LieElem lie_from_zuv(const FieldParams& F, const Laurent& z, const Laurent& u, const Laurent& v);
bool lie_relation_holds(const FieldParams& F, const LieElem& X);
// largest d with X in g_{0,-d}; error when indistinguishable at precision
long lie_depth(const FieldParams& F, const LieElem& X);
LieElem lie_conj(const FieldParams& F, const LieElem& X, const Monomial& m);

// ---------------------------------------------------------------------------
// subgroup specifications

struct Spec;
using SpecRef = std::shared_ptr<const Spec>;

constexpr int kBoundNever = 1000;  // entry vanishes at every working level

struct Spec {
  enum class Kind { pattern, torus, center, uni_upper, product, conjugate };
  Kind kind = Kind::pattern;
  // pattern bounds; diagonal bounds constrain v(g_ii - 1), off-diagonal v(g_ij)
  int b11 = 0, b12 = 0, b21 = 0, b22 = 0;
  // torus: { (a, b; b*c, a) } with c in the base field
  Scalar tc;
  SpecRef left, right;  // product
  SpecRef base;         // conjugate: { m x m^{-1} | x in base }
  Monomial conj;
  std::string name;
};

SpecRef spec_pattern(int b11, int b12, int b21, int b22, const std::string& name = "");
SpecRef spec_K();
SpecRef spec_Kd(unsigned d);
SpecRef spec_B();    // upper triangular in K
SpecRef spec_Bop();  // lower triangular in K
SpecRef spec_BKd(unsigned d);
SpecRef spec_BopKd(unsigned d);
SpecRef spec_J(unsigned d);  // domain of the depth-d linear characters
SpecRef spec_center();
SpecRef spec_uni_upper();
SpecRef spec_torus(const FieldParams& F, const Scalar& c, const std::string& name = "");
SpecRef spec_product(SpecRef l, SpecRef r);
SpecRef spec_conjugate(SpecRef base, const Monomial& m);

// Moy-Prasad filtration subgroup G_{y,r} as an entry-valuation pattern,
// bounds (ceil r, ceil r-y; ceil r+y, ceil r); plus replaces each ceiling by
// the value just past r (the next filtration jump).
SpecRef moy_prasad_spec(const Rat& y, const Rat& r, bool plus = false);

// ---------------------------------------------------------------------------
// enumeration of finite quotients

struct GroupCtx {
  FieldParams F;
  unsigned jobs = 1;
  uint64_t cap = 100000000;  // refuse enumerations larger than this
  std::string cache_dir;     // empty disables the enumeration cache

  std::map<std::pair<std::string, unsigned>, std::shared_ptr<const std::vector<GElem>>> elem_memo;
  std::map<std::pair<std::string, unsigned>, uint64_t> card_memo;
  std::map<std::tuple<std::string, std::string, unsigned>, std::shared_ptr<const std::vector<GElem>>>
      transversal_memo;
  std::vector<Scalar> norm_one_full;  // E^1 representatives at working precision
  std::mutex mu;

  explicit GroupCtx(const FieldParams& f) : F(f) {}
};

bool member(GroupCtx& C, const SpecRef& S, const GElem& g, unsigned level);
// membership for the non-product kinds only (no context needed)
bool member_basic(const FieldParams& F, const Spec& S, const GElem& g, unsigned level);
// smallest m with K_m contained in S (for transversal computations)
unsigned containment_level(SpecRef S);

// streams each element of S/(S n K_level) exactly once; emitted elements are
// exact at working precision (level = F.prec)
void stream_elements(GroupCtx& C, SpecRef S, unsigned level, const std::function<void(const GElem&)>& fn);
// memoized materialization (uses the advisory cache when configured)
std::shared_ptr<const std::vector<GElem>> elements(GroupCtx& C, SpecRef S, unsigned level);
uint64_t cardinality(GroupCtx& C, SpecRef S, unsigned level);

// seed-partitioned parallel stream; fn must be thread-safe per tid
void parallel_stream(GroupCtx& C, SpecRef S, unsigned level, unsigned nthreads,
                     const std::function<void(unsigned tid, const GElem&)>& fn);

// left-coset representatives: K = union of x H, deduplicated at `level`
// (requires K_level inside H); the transversal is memoized
std::shared_ptr<const std::vector<GElem>> left_transversal(GroupCtx& C, SpecRef H, unsigned level);

// transversal of L-cosets of (left n right) in left, used for product
// membership; reps paired with their inverses
std::shared_ptr<const std::vector<GElem>> factor_transversal(GroupCtx& C, SpecRef left, SpecRef right,
                                                             unsigned level);

// ---------------------------------------------------------------------------
// constructive decompositions

// a = b k with b upper triangular in K and k in K_d; requires v(a21) >= d
std::pair<GElem, GElem> factor_B_Kd(const FieldParams& F, const GElem& a, unsigned d);

// k = b t or b w t with b lower triangular, t in the torus {(a,b;bc,a)};
// used_w is true only on the genuinely separate coset of a ramified torus
struct BopTFactorization {
  GElem b;
  GElem t;
  bool used_w = false;
};
BopTFactorization decompose_Bop_T(const FieldParams& F, const GElem& k, const Scalar& torus_c);

// Moy-Prasad isomorphism G_{y,r}/G_{y,s} -> g_{y,r}/g_{y,s}, g |-> g - I
LieElem mp_isomorphism(const FieldParams& F, const GElem& g, const Rat& y, const Rat& r, const Rat& s);

// ---------------------------------------------------------------------------
// double cosets

struct CosetSystem {
  SpecRef H1, H2;
  unsigned level = 0;
  std::vector<GElem> reps;
  std::vector<uint64_t> inter_size;  // |H1 n g H2 g^{-1}| at level
  bool verified = false;
};

// finds representatives of H1 \ K / H2 at the given level using the mass
// formula sum |H1||H2| / |H1 n g H2 g^{-1}| = |K|
CosetSystem find_double_cosets(GroupCtx& C, SpecRef H1, SpecRef H2, unsigned level);

struct DoubleCosetReport {
  bool distinct = true;
  bool complete = true;
  std::string detail;
};

DoubleCosetReport double_coset_verify(GroupCtx& C, SpecRef H1, SpecRef H2,
                                      const std::vector<GElem>& reps, unsigned level);

// elements of H1 n g H2 g^{-1} at level (filtering the H1 enumeration)
std::vector<GElem> intersection_conj(GroupCtx& C, SpecRef H1, SpecRef H2, const GElem& g,
                                     unsigned level);

}  // namespace branchlab
