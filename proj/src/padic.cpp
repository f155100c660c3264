#include "branchlab/padic.hpp"

#include <algorithm>

namespace branchlab {

namespace {

bool is_prime(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

uint64_t least_nonresidue(uint64_t p) {
  // squares mod p by brute force; p is small here
  std::vector<bool> sq(p, false);
  for (uint64_t x = 1; x < p; ++x) sq[(x * x) % p] = true;
  for (uint64_t e = 2; e < p; ++e)
    if (!sq[e]) return e;
  fail("no quadratic non-residue found");
}

}  // namespace

FieldParams make_params(uint64_t p, unsigned prec) {
  require(p != 2, "residual characteristic 2 is not supported");
  require(is_prime(p), "p must be prime");
  require(prec >= 1, "precision must be at least 1");
  FieldParams F;
  F.p = p;
  F.prec = prec;
  F.q = p;
  require(prec + 1 < F.ppow.size(), "precision too large");
  F.ppow[0] = 1;
  for (unsigned k = 1; k <= prec; ++k) {
    require(F.ppow[k - 1] <= (uint64_t(1) << 31) / p, "p^N exceeds supported range");
    F.ppow[k] = F.ppow[k - 1] * p;
  }
  F.pn = F.ppow[prec];
  F.epsilon = least_nonresidue(p);
  return F;
}

uint64_t add_mod(const FieldParams& F, uint64_t a, uint64_t b) {
  uint64_t s = a + b;
  return s >= F.pn ? s - F.pn : s;
}

uint64_t sub_mod(const FieldParams& F, uint64_t a, uint64_t b) {
  return a >= b ? a - b : a + F.pn - b;
}

uint64_t mul_mod(const FieldParams& F, uint64_t a, uint64_t b) { return (a * b) % F.pn; }

unsigned val_int(const FieldParams& F, uint64_t a) {
  if (a == 0) return F.prec;
  unsigned v = 0;
  while (v < F.prec && a % F.p == 0) {
    a /= F.p;
    ++v;
  }
  return v;
}

uint64_t inv_mod(const FieldParams& F, uint64_t a) {
  require(a % F.p != 0, "inverse of a non-unit");
  // extended Euclid against p^N
  int64_t r0 = int64_t(F.pn), r1 = int64_t(a % F.pn);
  int64_t s0 = 0, s1 = 1;
  while (r1 != 0) {
    int64_t qq = r0 / r1;
    int64_t r2 = r0 - qq * r1;
    int64_t s2 = s0 - qq * s1;
    r0 = r1; r1 = r2;
    s0 = s1; s1 = s2;
  }
  int64_t s = s0 % int64_t(F.pn);
  if (s < 0) s += int64_t(F.pn);
  return uint64_t(s);
}

Scalar add(const FieldParams& F, const Scalar& x, const Scalar& y) {
  return {add_mod(F, x.a0, y.a0), add_mod(F, x.a1, y.a1)};
}

Scalar sub(const FieldParams& F, const Scalar& x, const Scalar& y) {
  return {sub_mod(F, x.a0, y.a0), sub_mod(F, x.a1, y.a1)};
}

Scalar neg(const FieldParams& F, const Scalar& x) {
  return {sub_mod(F, 0, x.a0), sub_mod(F, 0, x.a1)};
}

Scalar mul(const FieldParams& F, const Scalar& x, const Scalar& y) {
  // (a + b s)(c + d s) = ac + bd eps + (ad + bc) s,  s^2 = eps
  uint64_t ac = mul_mod(F, x.a0, y.a0);
  uint64_t bd = mul_mod(F, x.a1, y.a1);
  uint64_t ad = mul_mod(F, x.a0, y.a1);
  uint64_t bc = mul_mod(F, x.a1, y.a0);
  return {add_mod(F, ac, mul_mod(F, bd, F.epsilon % F.pn)), add_mod(F, ad, bc)};
}

Scalar mul_int(const FieldParams& F, const Scalar& x, uint64_t c) {
  c %= F.pn;
  return {mul_mod(F, x.a0, c), mul_mod(F, x.a1, c)};
}

Scalar conj(const FieldParams& F, const Scalar& x) { return {x.a0, sub_mod(F, 0, x.a1)}; }

Scalar tr(const FieldParams& F, const Scalar& x) { return {add_mod(F, x.a0, x.a0), 0}; }

Scalar norm(const FieldParams& F, const Scalar& x) {
  uint64_t n = sub_mod(F, mul_mod(F, x.a0, x.a0), mul_mod(F, mul_mod(F, x.a1, x.a1), F.epsilon % F.pn));
  return {n, 0};
}

Scalar inv(const FieldParams& F, const Scalar& x) {
  Scalar n = norm(F, x);
  require(n.a0 % F.p != 0, "inverse of a non-unit scalar");
  uint64_t ni = inv_mod(F, n.a0);
  Scalar xb = conj(F, x);
  return mul_int(F, xb, ni);
}

Scalar pow(const FieldParams& F, Scalar x, uint64_t e) {
  Scalar r = scalar(1);
  while (e) {
    if (e & 1) r = mul(F, r, x);
    x = mul(F, x, x);
    e >>= 1;
  }
  return r;
}

Scalar reduce(const FieldParams& F, const Scalar& x, unsigned level) {
  uint64_t m = F.pk(std::min(level, F.prec));
  return {x.a0 % m, x.a1 % m};
}

Valuation valuation(const FieldParams& F, const Scalar& x) {
  unsigned v = std::min(val_int(F, x.a0), val_int(F, x.a1));
  return {v, v < F.prec};
}

bool is_unit(const FieldParams& F, const Scalar& x) {
  return x.a0 % F.p != 0 || x.a1 % F.p != 0;
}

bool is_zero_at(const FieldParams& F, const Scalar& x, unsigned level) {
  return divisible(F, x, std::min(level, F.prec));
}

bool divisible(const FieldParams& F, const Scalar& x, unsigned k) {
  if (k == 0) return true;
  if (k > F.prec) return false;
  uint64_t m = F.pk(k);
  return x.a0 % m == 0 && x.a1 % m == 0;
}

Scalar shift_down(const FieldParams& F, const Scalar& x, unsigned k) {
  require(divisible(F, x, k), "shift_down: entry not divisible by p^k");
  uint64_t m = F.pk(k);
  return {x.a0 / m, x.a1 / m};
}

Scalar shift_up(const FieldParams& F, const Scalar& x, unsigned k) {
  return mul_int(F, x, F.pk(std::min(k, F.prec)) % F.pn);
}

std::optional<Scalar> hensel_sqrt(const FieldParams& F, const Scalar& u) {
  require(is_unit(F, u), "hensel_sqrt: argument must be a unit");
  // squareness is decided on the residue: u is a square iff
  // ubar^((q^2-1)/2) = 1 in the residue field of E
  FieldParams R = F;  // residue-level view
  R.prec = 1;
  R.pn = F.p;
  Scalar ur = reduce(F, u, 1);
  Scalar t = pow(R, ur, (F.q * F.q - 1) / 2);
  if (!(t == scalar(1))) return std::nullopt;
  // residue root by brute force (q^2 candidates)
  Scalar r0;
  bool found = false;
  for (uint64_t a = 0; a < F.p && !found; ++a)
    for (uint64_t b = 0; b < F.p && !found; ++b) {
      Scalar c{a, b};
      if (mul(R, c, c) == ur) {
        r0 = c;
        found = true;
      }
    }
  require(found, "residue square root missing despite passing the square test");
  // Newton: r <- (r + u/r)/2 doubles the precision each step
  Scalar r = r0;
  uint64_t half = inv_mod(F, 2 % F.pn);
  for (unsigned it = 0; (1u << it) < 2 * F.prec; ++it)
    r = mul_int(F, add(F, r, mul(F, u, inv(F, r))), half);
  require(mul(F, r, r) == u, "hensel_sqrt: lift failed");
  return r;
}

Scalar solve_norm(const FieldParams& F, const Scalar& t, unsigned d) {
  require(t.a1 == 0, "solve_norm: target must lie in the base ring");
  require(t.a0 % F.p != 0, "solve_norm: target must be a unit");
  Scalar a;
  unsigned k;  // norm(a) = t holds mod p^k
  if (d == 0) {
    // residue solution by brute force over the residue field of E
    FieldParams R = F;
    R.prec = 1;
    R.pn = F.p;
    uint64_t t0 = t.a0 % F.p;
    bool found = false;
    for (uint64_t x = 0; x < F.p && !found; ++x)
      for (uint64_t y = 0; y < F.p && !found; ++y) {
        Scalar c{x, y};
        if (norm(R, c).a0 == t0 && is_unit(F, c)) {
          a = c;
          found = true;
        }
      }
    require(found, "norm map not surjective on residues");
    k = 1;
  } else {
    require(d <= F.prec, "solve_norm: level exceeds precision");
    require(sub_mod(F, t.a0, 1) % F.pk(d) == 0, "solve_norm: target not in 1 + p^d");
    a = scalar(1);
    k = d;
  }
  // refine: a <- a (1 + p^k c) with c in F kills the defect one digit at a time
  uint64_t half = inv_mod(F, 2 % F.pn);
  while (k < F.prec) {
    uint64_t defect = sub_mod(F, t.a0, norm(F, a).a0);
    require(defect % F.pk(k) == 0, "solve_norm: lost invariant");
    uint64_t e = (defect / F.pk(k)) % F.p;
    uint64_t na = norm(F, a).a0;
    uint64_t c = mul_mod(F, mul_mod(F, e, inv_mod(F, na)), half);
    Scalar corr = add(F, scalar(1), scalar(mul_mod(F, c, F.pk(k))));
    a = mul(F, a, corr);
    ++k;
  }
  require(norm(F, a) == t, "solve_norm: refinement failed");
  return a;
}

std::vector<Scalar> enumerate_norm_one(const FieldParams& F, unsigned d) {
  require(d >= 1, "enumerate_norm_one: level must be positive");
  require(d <= F.prec, "enumerate_norm_one: level exceeds precision");
  uint64_t m = F.pk(d);
  FieldParams R = F;
  R.prec = d;
  R.pn = m;
  std::vector<Scalar> out;
  for (uint64_t a0 = 0; a0 < m; ++a0)
    for (uint64_t a1 = 0; a1 < m; ++a1) {
      Scalar x{a0, a1};
      if (norm(R, x) == scalar(1)) out.push_back(x);
    }
  uint64_t expect = (F.q + 1);
  for (unsigned i = 1; i < d; ++i) expect *= F.q;
  require(out.size() == expect, "norm-one count disagrees with (q+1)q^(d-1)");
  return out;
}

Laurent laurent_of(const FieldParams& F, const Scalar& x) {
  return Laurent{0, x, F.prec};
}

Laurent laurent(const FieldParams& F, long shift, const Scalar& mant, unsigned mant_prec) {
  require(shift >= 0, "laurent: negative shift");
  (void)F;
  return Laurent{shift, mant, mant_prec};
}

Laurent lshift(const FieldParams& F, const Laurent& x, long k) {
  // multiply the value by pi^k
  if (k == 0) return x;
  if (k < 0) return Laurent{x.shift - k, x.mant, x.mant_prec};
  long s = x.shift - k;
  if (s >= 0) return Laurent{s, x.mant, x.mant_prec};
  // value gains positive valuation: push into the mantissa
  unsigned up = unsigned(-s);
  Laurent r;
  r.shift = 0;
  r.mant = shift_up(F, x.mant, up);
  r.mant_prec = std::min<unsigned>(F.prec, x.mant_prec + up);
  return r;
}

Laurent ladd(const FieldParams& F, const Laurent& x, const Laurent& y) {
  long s = std::max(x.shift, y.shift);
  Scalar mx = shift_up(F, x.mant, unsigned(s - x.shift));
  Scalar my = shift_up(F, y.mant, unsigned(s - y.shift));
  unsigned px = std::min<unsigned>(F.prec, x.mant_prec + unsigned(s - x.shift));
  unsigned py = std::min<unsigned>(F.prec, y.mant_prec + unsigned(s - y.shift));
  return Laurent{s, add(F, mx, my), std::min(px, py)};
}

Laurent lmul(const FieldParams& F, const Laurent& x, const Laurent& y) {
  return Laurent{x.shift + y.shift, mul(F, x.mant, y.mant), std::min(x.mant_prec, y.mant_prec)};
}

Laurent lmul_scalar(const FieldParams& F, const Laurent& x, const Scalar& c) {
  return Laurent{x.shift, mul(F, x.mant, c), x.mant_prec};
}

Laurent lconj(const FieldParams& F, const Laurent& x) {
  return Laurent{x.shift, conj(F, x.mant), x.mant_prec};
}

Laurent lneg(const FieldParams& F, const Laurent& x) {
  return Laurent{x.shift, neg(F, x.mant), x.mant_prec};
}

LValuation lvaluation(const FieldParams& F, const Laurent& x) {
  Scalar m = reduce(F, x.mant, x.mant_prec);
  unsigned v = std::min({val_int(F, m.a0), val_int(F, m.a1), x.mant_prec});
  if (v >= x.mant_prec) return LValuation{long(x.mant_prec) - x.shift, false};
  return LValuation{long(v) - x.shift, true};
}

bool lvaluation_at_least(const FieldParams& F, const Laurent& x, long v) {
  long need = v + x.shift;  // mantissa valuation needed
  if (need <= 0) return true;
  require(unsigned(need) <= x.mant_prec, "insufficient precision to decide valuation");
  return divisible(F, reduce(F, x.mant, x.mant_prec), unsigned(need));
}

std::optional<Scalar> to_scalar(const FieldParams& F, const Laurent& x) {
  if (x.shift == 0) return reduce(F, x.mant, x.mant_prec);
  if (!divisible(F, x.mant, unsigned(x.shift))) return std::nullopt;
  if (unsigned(x.shift) > x.mant_prec) return std::nullopt;
  return reduce(F, shift_down(F, x.mant, unsigned(x.shift)), x.mant_prec - unsigned(x.shift));
}

}  // namespace branchlab
