#pragma once

#include "branchlab/cyclotomic.hpp"
#include "branchlab/groups.hpp"

namespace branchlab {

// Finite abelian quotient S/(S n K_level) with a polycyclic generator chain:
// every element is uniquely gens[n-1]^{e_{n-1}} ... gens[0]^{e_0} with
// e_i < rel_order_i, where rel_order_i is the order of gens[i] modulo the
// subgroup generated by the earlier ones.  Characters are parametrized by
// root-of-unity values on the chain subject to the power relations.
struct AbelianGroup {
  SpecRef spec;
  unsigned level = 0;
  std::vector<GElem> elems;
  std::vector<GElem> gens;
  std::vector<GElem> gen_invs;
  std::vector<unsigned> rel_order;
  std::unordered_map<Key, std::vector<unsigned>, KeyHash> dlog;

  const std::vector<unsigned>& exponents(const FieldParams& F, const GElem& x) const;
  uint64_t order() const { return elems.size(); }
};

AbelianGroup abelian_structure(GroupCtx& C, SpecRef S, unsigned level);

// character of an AbelianGroup, stored as zeta_m exponents on the chain
struct AbelianChar {
  std::vector<uint32_t> exps;
};

// all |A| characters (requires every relative order to divide the ring order)
std::vector<AbelianChar> all_characters(const CycRing& R, const FieldParams& F,
                                        const AbelianGroup& A);

CycValue char_value(const CycRing& R, const FieldParams& F, const AbelianGroup& A,
                    const AbelianChar& chi, const GElem& x);
// exponent of the (single-root) character value at x
uint32_t char_exponent(const CycRing& R, const FieldParams& F, const AbelianGroup& A,
                       const AbelianChar& chi, const GElem& x);

bool char_is_trivial_on(const CycRing& R, GroupCtx& C, const AbelianGroup& A,
                        const AbelianChar& chi, SpecRef H, unsigned level);

AbelianChar char_mul(const CycRing& R, const AbelianChar& a, const AbelianChar& b);
AbelianChar char_conj(const CycRing& R, const AbelianChar& a);

}  // namespace branchlab
