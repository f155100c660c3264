#pragma once

#include <array>
#include <optional>
#include <vector>

#include "branchlab/common.hpp"

namespace branchlab {

// Base data for F = Q_p and its unramified quadratic extension E = F[sqrt(eps)].
// All arithmetic happens in the finite quotients O_F/p^N and O_E/p^N, with
// N = prec fixed per run.  The residue field has q = p elements.
struct FieldParams {
  uint64_t p = 0;
  unsigned prec = 0;     // N: compute modulo p^N
  uint64_t epsilon = 0;  // least positive quadratic non-residue mod p
  uint64_t q = 0;        // residue field size (= p)
  uint64_t pn = 0;       // p^N
  std::array<uint64_t, 40> ppow{};  // p^0 .. p^N

  uint64_t pk(unsigned k) const { return ppow[k]; }
};

FieldParams make_params(uint64_t p, unsigned prec);

// Element of O_E/p^N written as a0 + a1*sqrt(eps), both coordinates mod p^N.
struct Scalar {
  uint64_t a0 = 0;
  uint64_t a1 = 0;

  bool operator==(const Scalar& o) const { return a0 == o.a0 && a1 == o.a1; }
  bool operator!=(const Scalar& o) const { return !(*this == o); }
};

// valuation truncated at the working precision; exact=false means "at least v"
// because the element is indistinguishable from 0 at this precision.
struct Valuation {
  unsigned v = 0;
  bool exact = true;

  bool at_least(unsigned k) const { return v >= k; }
};

inline Scalar scalar(uint64_t a0, uint64_t a1 = 0) { return Scalar{a0, a1}; }

uint64_t add_mod(const FieldParams& F, uint64_t a, uint64_t b);
uint64_t sub_mod(const FieldParams& F, uint64_t a, uint64_t b);
uint64_t mul_mod(const FieldParams& F, uint64_t a, uint64_t b);
uint64_t inv_mod(const FieldParams& F, uint64_t a);  // a must be a unit mod p^N
unsigned val_int(const FieldParams& F, uint64_t a);  // min(v_p(a), N)

Scalar add(const FieldParams& F, const Scalar& x, const Scalar& y);
Scalar sub(const FieldParams& F, const Scalar& x, const Scalar& y);
Scalar neg(const FieldParams& F, const Scalar& x);
Scalar mul(const FieldParams& F, const Scalar& x, const Scalar& y);
Scalar mul_int(const FieldParams& F, const Scalar& x, uint64_t c);
Scalar conj(const FieldParams& F, const Scalar& x);   // a0 - a1*sqrt(eps)
Scalar tr(const FieldParams& F, const Scalar& x);     // x + conj(x)
Scalar norm(const FieldParams& F, const Scalar& x);   // x * conj(x)
Scalar inv(const FieldParams& F, const Scalar& x);    // conj(x)/norm(x); x must be a unit
Scalar pow(const FieldParams& F, Scalar x, uint64_t e);
Scalar reduce(const FieldParams& F, const Scalar& x, unsigned level);  // mod p^level

Valuation valuation(const FieldParams& F, const Scalar& x);
bool is_unit(const FieldParams& F, const Scalar& x);
bool is_zero_at(const FieldParams& F, const Scalar& x, unsigned level);
// true when x is divisible by p^k at the working precision
bool divisible(const FieldParams& F, const Scalar& x, unsigned k);
// x / p^k; requires divisibility, result meaningful mod p^(N-k)
Scalar shift_down(const FieldParams& F, const Scalar& x, unsigned k);
Scalar shift_up(const FieldParams& F, const Scalar& x, unsigned k);

// sqrt of a unit u when the residue of u is a square in the residue field
// of E; lifts the residue root with Newton iteration.  Non-unit input is a
// domain error.
std::optional<Scalar> hensel_sqrt(const FieldParams& F, const Scalar& u);

// Solves norm(a) = t for a base-ring unit t (a1 = 0).  With d > 0, requires
// t in 1 + p^d and returns a in 1 + p_E^d, matching the filtration-level
// surjectivity of the norm map.
Scalar solve_norm(const FieldParams& F, const Scalar& t, unsigned d = 0);

// Coset representatives of E^1 modulo E^1 n (1 + p_E^d), as scalars mod p^d.
// The count is (q+1) q^(d-1).
std::vector<Scalar> enumerate_norm_one(const FieldParams& F, unsigned d);

// pi^(-shift) * mant, with mant known modulo p^mant_prec; the represented
// value is therefore known "modulo p^(mant_prec - shift)".
struct Laurent {
  long shift = 0;  // >= 0
  Scalar mant;
  unsigned mant_prec = 0;
};

Laurent laurent_of(const FieldParams& F, const Scalar& x);
Laurent laurent(const FieldParams& F, long shift, const Scalar& mant, unsigned mant_prec);
Laurent ladd(const FieldParams& F, const Laurent& x, const Laurent& y);
Laurent lmul(const FieldParams& F, const Laurent& x, const Laurent& y);
Laurent lmul_scalar(const FieldParams& F, const Laurent& x, const Scalar& c);
Laurent lconj(const FieldParams& F, const Laurent& x);
Laurent lneg(const FieldParams& F, const Laurent& x);
// multiply by pi^k (k may be negative; negative k raises the shift)
Laurent lshift(const FieldParams& F, const Laurent& x, long k);

// possibly negative valuation of a Laurent value; exact=false means ">= v"
struct LValuation {
  long v = 0;
  bool exact = true;
};
LValuation lvaluation(const FieldParams& F, const Laurent& x);
// round-trip to Scalar; requires shift-free representation of the value
std::optional<Scalar> to_scalar(const FieldParams& F, const Laurent& x);
// true when the value is >= the given valuation at the available precision
bool lvaluation_at_least(const FieldParams& F, const Laurent& x, long v);

}  // namespace branchlab
