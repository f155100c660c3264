#include "branchlab/depthzero.hpp"

#include <map>

namespace branchlab {

int ResidueClasses::class_of(const FieldParams& F, const GElem& g) const {
  auto it = lookup.find(gkey(F, g, 1));
  require(it != lookup.end(), "residue class lookup failed");
  return it->second;
}

namespace {

std::mutex g_dz_mu;
std::map<uint64_t, std::shared_ptr<const ResidueClasses>> g_classes;
std::map<uint64_t, std::shared_ptr<const E1Dual>> g_e1;

std::shared_ptr<const ResidueClasses> build_classes(ClassCtx& X) {
  const FieldParams& F = X.G.F;
  auto rc = std::make_shared<ResidueClasses>();
  rc->elems = *elements(X.G, spec_K(), 1);
  const auto& el = rc->elems;
  std::unordered_map<Key, int, KeyHash> index;
  for (size_t i = 0; i < el.size(); ++i) index.emplace(gkey(F, el[i], 1), int(i));

  rc->class_of_elem.assign(el.size(), -1);
  for (size_t i = 0; i < el.size(); ++i) {
    if (rc->class_of_elem[i] >= 0) continue;
    int cid = int(rc->classes.size());
    std::vector<int> members;
    for (const GElem& h : el) {
      GElem c = gmul(F, gmul(F, h, el[i]), ginv(F, h));
      int j = index.at(gkey(F, c, 1));
      if (rc->class_of_elem[j] < 0) {
        rc->class_of_elem[j] = cid;
        members.push_back(j);
      }
    }
    rc->classes.push_back(std::move(members));
  }
  for (size_t i = 0; i < el.size(); ++i)
    rc->lookup.emplace(gkey(F, el[i], 1), rc->class_of_elem[i]);

  // classify each class against the four shapes of the character table
  rc->tags.resize(rc->classes.size());
  for (size_t c = 0; c < rc->classes.size(); ++c) {
    bool tagged = false;
    for (int j : rc->classes[c]) {
      const GElem& g = el[j];
      Scalar x = reduce(F, g.e[0], 1), y12 = reduce(F, g.e[1], 1);
      Scalar y21 = reduce(F, g.e[2], 1), w = reduce(F, g.e[3], 1);
      bool diag_eq = x == w;
      ResidueClasses::Tag t;
      if (diag_eq && y12 == scalar(0) && y21 == scalar(0)) {
        t = {ResidueClasses::Kind::central, x, scalar(0)};
      } else if (diag_eq && y12 == scalar(0) && !(y21 == scalar(0))) {
        t = {ResidueClasses::Kind::unipotent, x, y21};
      } else if (!diag_eq && y12 == scalar(0) && y21 == scalar(0)) {
        t = {ResidueClasses::Kind::split, x, w};
      } else if (diag_eq && y12 == y21 && !(y12 == scalar(0))) {
        t = {ResidueClasses::Kind::anisotropic, x, y12};
      } else {
        continue;
      }
      if (tagged) {
        require(t.kind == rc->tags[c].kind, "residue class matches two different shapes");
        continue;
      }
      rc->tags[c] = t;
      tagged = true;
    }
    require(tagged, "residue class matches no shape of the character table");
  }
  return rc;
}

std::shared_ptr<const E1Dual> build_e1(ClassCtx& X) {
  const FieldParams& F = X.G.F;
  FieldParams R1 = F;
  R1.prec = 1;
  R1.pn = F.p;
  auto d = std::make_shared<E1Dual>();
  d->order = unsigned(F.q + 1);
  // find a generator of the cyclic group e^1
  std::vector<Scalar> e1;
  for (uint64_t a = 0; a < F.p; ++a)
    for (uint64_t b = 0; b < F.p; ++b) {
      Scalar z{a, b};
      if (norm(R1, z) == scalar(1)) e1.push_back(z);
    }
  require(e1.size() == d->order, "norm-one residue count mismatch");
  bool found = false;
  for (const Scalar& g : e1) {
    unsigned k = 1;
    Scalar x = g;
    while (!(x == scalar(1))) {
      x = mul(R1, x, g);
      ++k;
    }
    if (k == d->order) {
      d->gen = g;
      found = true;
      break;
    }
  }
  require(found, "no generator of e^1 found");
  Scalar x = scalar(1);
  for (unsigned k = 0; k < d->order; ++k) {
    d->dlog.emplace(x.a0 * F.p + x.a1, k);
    x = mul(R1, x, d->gen);
  }
  return d;
}

}  // namespace

const ResidueClasses& residue_classes(ClassCtx& X) {
  std::lock_guard<std::mutex> lk(g_dz_mu);
  auto& slot = g_classes[X.G.F.p];
  if (!slot) slot = build_classes(X);
  return *slot;
}

const E1Dual& e1_dual(ClassCtx& X) {
  std::lock_guard<std::mutex> lk(g_dz_mu);
  auto& slot = g_e1[X.G.F.p];
  if (!slot) slot = build_e1(X);
  return *slot;
}

unsigned E1Dual::dlog_of(const FieldParams& F, const Scalar& x) const {
  auto it = dlog.find((x.a0 % F.p) * F.p + (x.a1 % F.p));
  require(it != dlog.end(), "element not in the norm-one residue group");
  return it->second;
}

CycValue residue_char_value(ClassCtx& X, const ResidueChar& c, const Scalar& x) {
  const E1Dual& d = e1_dual(X);
  unsigned m = X.R.order();
  unsigned step = m / d.order;
  return cyc_root(X.R, uint64_t(step) * c.e % m * d.dlog_of(X.G.F, x) % m);
}

CuspidalDatum table2_character(ClassCtx& X, const ResidueChar& alpha, const ResidueChar& beta) {
  require(alpha.e % (X.G.F.q + 1) != beta.e % (X.G.F.q + 1),
          "cuspidal datum needs distinct characters");
  const FieldParams F = X.G.F;
  FieldParams R1 = F;
  R1.prec = 1;
  R1.pn = F.p;
  const ResidueClasses* rc = &residue_classes(X);
  const E1Dual* e1 = &e1_dual(X);
  unsigned m = X.R.order();
  unsigned step = m / e1->order;
  long q = long(F.q);
  unsigned ea = alpha.e % (e1->order), eb = beta.e % (e1->order);
  auto val_of = [R1, rc, e1, m, step, q, ea, eb](const GElem& g) -> CycValue {
    int cid = rc->class_of(R1, g);
    const auto& t = rc->tags[cid];
    auto root = [&](uint64_t e, long long coeff) {
      CycValue v;
      if (coeff) v.t.push_back({uint32_t(e % m), coeff});
      return v;
    };
    switch (t.kind) {
      case ResidueClasses::Kind::central: {
        uint64_t dx = e1->dlog_of(R1, t.x);
        return root(uint64_t(step) * ((ea + eb) % (e1->order)) % m * dx % m, q - 1);
      }
      case ResidueClasses::Kind::unipotent: {
        uint64_t dx = e1->dlog_of(R1, t.x);
        return root(uint64_t(step) * ((ea + eb) % (e1->order)) % m * dx % m, -1);
      }
      case ResidueClasses::Kind::split:
        return cyc_zero();
      case ResidueClasses::Kind::anisotropic: {
        Scalar xp = add(R1, t.x, t.y), xm = sub(R1, t.x, t.y);
        uint64_t dp = e1->dlog_of(R1, xp), dm = e1->dlog_of(R1, xm);
        // the sum of the two Weyl translates carries the sign
        // -delta(x^2 - y^2), with delta the quadratic character of the
        // norm-one group; fixed against the brute-force character tables
        // at q = 3 and q = 5
        long s = ((dp + dm) % 2 == 0) ? -1 : 1;
        CycValue v = root((uint64_t(step) * ea % m * dp + uint64_t(step) * eb % m * dm) % m, s);
        return cyc_add(v,
                       root((uint64_t(step) * ea % m * dm + uint64_t(step) * eb % m * dp) % m, s));
      }
    }
    return cyc_zero();
  };
  CuspidalDatum out;
  out.alpha = alpha;
  out.beta = beta;
  out.theta = ResidueChar{(alpha.e + beta.e) % unsigned(F.q + 1)};
  out.chi.domain = spec_K();
  out.chi.level = 1;
  out.chi.degree = q - 1;
  out.chi.eval = val_of;
  return out;
}

std::vector<CuspidalDatum> all_cuspidal_data(ClassCtx& X) {
  unsigned n = unsigned(X.G.F.q + 1);
  std::vector<CuspidalDatum> out;
  for (unsigned a = 0; a < n; ++a)
    for (unsigned b = a + 1; b < n; ++b)
      out.push_back(table2_character(X, ResidueChar{a}, ResidueChar{b}));
  return out;
}

ClassFn eta_twist(ClassCtx& X, const CuspidalDatum& sigma, unsigned d) {
  require(d >= 1, "eta_twist: d must be positive");
  const FieldParams F = X.G.F;
  require(F.prec >= d + 1, "eta_twist: needs working precision at least d+1");
  auto inner = sigma.chi.eval;
  ClassFn f;
  f.domain = spec_BKd(d);
  f.level = d + 1;
  f.degree = sigma.chi.degree;
  f.eval = [F, inner, d](const GElem& a) -> CycValue {
    require(divisible(F, a.e[2], d), "eta_twist: element violates v(a21) >= d");
    GElem r;
    r.e = {a.e[0], scalar(0), shift_down(F, a.e[2], d), inv(F, conj(F, a.e[0]))};
    r.level = std::min(a.level - d, a.level);
    require(r.level >= 1, "eta_twist: precision exhausted");
    return inner(r);
  };
  return f;
}

AbelianChar delta_character(ClassCtx& X, const AbelianGroup& Z) {
  require(Z.gens.size() == 1, "center quotient should be cyclic");
  unsigned n = Z.rel_order[0];
  require(n % 2 == 0, "norm-one quotient has even order");
  AbelianChar d;
  d.exps = {uint32_t(uint64_t(X.R.order()) / 2)};
  return d;
}

std::optional<CentralDecomposition> decompose_central(ClassCtx& X, const AbelianGroup& Z,
                                                      const AbelianChar& theta) {
  require(Z.gens.size() == 1, "center quotient should be cyclic");
  unsigned n = Z.rel_order[0];
  unsigned m = X.R.order();
  require(m % n == 0, "ring order must contain the center exponent");
  uint64_t stepm = m / n;
  require(theta.exps.size() == 1 && theta.exps[0] % stepm == 0, "theta is not a character of Z");
  uint64_t a = theta.exps[0] / stepm;  // exponent mod n on the generator
  // both k-branches can be solvable (when delta itself is a square); prefer
  // the decomposition with mu of smallest order, then the smaller k
  std::optional<CentralDecomposition> best;
  uint64_t best_order = 0;
  for (int k = 0; k <= 1; ++k) {
    uint64_t rhs = (a + n - (uint64_t(k) * (n / 2)) % n) % n;
    if (rhs % 2 != 0) continue;
    uint64_t b = rhs / 2;
    uint64_t order = n / std::gcd(b, uint64_t(n));
    if (!best || order < best_order) {
      best = CentralDecomposition{k, AbelianChar{{uint32_t(b * stepm % m)}}};
      best_order = order;
    }
  }
  return best;
}

}  // namespace branchlab
