#pragma once

#include "branchlab/cyclotomic.hpp"
#include "branchlab/duals.hpp"
#include "branchlab/groups.hpp"

namespace branchlab {

// shared state for exact character computations: group enumeration context
// plus one cyclotomic ring fixed for the whole run
struct ClassCtx {
  GroupCtx G;
  CycRing R;

  ClassCtx(const FieldParams& F, unsigned tame_extra = 1)
      : G(F), R(F.p, F.prec, unsigned(std::lcm<uint64_t>(F.q * F.q - 1, tame_extra))) {}
};

// lazily evaluated exact class function on a finite quotient: the evaluator
// is pure and safe to call concurrently; `level` is the congruence level the
// function factors through (trivial on domain n K_level)
struct ClassFn {
  SpecRef domain;
  unsigned level = 1;
  long degree = -1;
  std::function<CycValue(const GElem&)> eval;
};

// lock-free membership closure for hot loops (prefetches product transversals)
using MemberTest = std::function<bool(const GElem&)>;
MemberTest make_member(ClassCtx& X, SpecRef S, unsigned level);

ClassFn trivial_character(ClassCtx& X, SpecRef domain, unsigned level);

// exact intertwining number (1/|H|) sum chi1 conj(chi2) over the common domain
long inner_product(ClassCtx& X, const ClassFn& chi1, const ClassFn& chi2);

// induced character from chi.domain to K via a left transversal
ClassFn induce(ClassCtx& X, const ClassFn& chi);

// sum over verified double cosets of <chi1, chi2^g> on H1 n g H2 g^{-1};
// equals <Ind chi1, Ind chi2> by the Mackey formula
long mackey_pairing(ClassCtx& X, const ClassFn& chi1, const ClassFn& chi2,
                    const CosetSystem& cosets);

// dimension of the H-fixed subspace, <Res_H chi, 1>
long fixed_dim(ClassCtx& X, const ClassFn& chi, SpecRef H);

// smallest d with fixed vectors under K_{d+1}; always <= level-1
long depth_of(ClassCtx& X, const ClassFn& chi);

// pointwise equality over domain/(domain n K_level); returns the number of
// disagreeing classes (0 means equal)
uint64_t pointwise_mismatch(ClassCtx& X, SpecRef domain, unsigned level, const ClassFn& chi1,
                            const ClassFn& chi2);

// value at the identity as a plain integer
long degree_of(ClassCtx& X, const ClassFn& chi);

}  // namespace branchlab
