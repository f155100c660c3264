#pragma once

#include "branchlab/classfun.hpp"

namespace branchlab {

// Conjugacy data of the residue group U(1,1)(F_q) = K/K_1, computed once by
// brute-force partition and classified against the four shapes
//   central (x 0; 0 x), unipotent (x 0; y x), split (x 0; 0 y), x != y,
//   anisotropic (x y; y x), y != 0,
// with x (and x+y, x-y in the last case) of norm one.
struct ResidueClasses {
  enum class Kind { central, unipotent, split, anisotropic };
  struct Tag {
    Kind kind;
    Scalar x, y;  // residue parameters of the matched representative
  };
  std::vector<GElem> elems;
  std::vector<int> class_of_elem;
  std::vector<std::vector<int>> classes;  // element indices per class
  std::vector<Tag> tags;
  std::unordered_map<Key, int, KeyHash> lookup;  // key at level 1 -> class

  int class_of(const FieldParams& F, const GElem& g) const;
};

const ResidueClasses& residue_classes(ClassCtx& X);

// cyclic structure of the norm-one residue group e^1 (order q+1), shared by
// the residue characters alpha, beta, theta, delta
struct E1Dual {
  Scalar gen;  // generator of e^1
  unsigned order = 0;
  std::unordered_map<uint64_t, unsigned> dlog;  // (a0 * p + a1)... packed residue -> exponent

  unsigned dlog_of(const FieldParams& F, const Scalar& x) const;
};

const E1Dual& e1_dual(ClassCtx& X);

// character of e^1 with generator image zeta^{(m/(q+1)) e}
struct ResidueChar {
  unsigned e = 0;
};

CycValue residue_char_value(ClassCtx& X, const ResidueChar& c, const Scalar& x);

// Deligne-Lusztig cuspidal character data sigma(alpha, beta), degree q-1
struct CuspidalDatum {
  ResidueChar alpha, beta;
  ResidueChar theta;  // central character alpha*beta
  ClassFn chi;        // inflation to K, level 1
};

// the table of values on the four residue class shapes
CuspidalDatum table2_character(ClassCtx& X, const ResidueChar& alpha, const ResidueChar& beta);

// all cuspidal data up to the sigma(alpha,beta) = sigma(beta,alpha) symmetry;
// (q+1)q/2 distinct characters
std::vector<CuspidalDatum> all_cuspidal_data(ClassCtx& X);

// character of sigma^{eta^d} on B K_d, evaluated by
// sigma((a11 0; a21 pi^{-d} conj(a11)^{-1}))
ClassFn eta_twist(ClassCtx& X, const CuspidalDatum& sigma, unsigned d);

// theta = delta^k mu^2 with delta the nontrivial quadratic character of the
// norm-one group at the given level; not every theta decomposes when 4 | q+1,
// so the result is optional
struct CentralDecomposition {
  int k = 0;
  AbelianChar mu;
};
std::optional<CentralDecomposition> decompose_central(ClassCtx& X, const AbelianGroup& Z,
                                                      const AbelianChar& theta);
// the unique nontrivial quadratic character of Z at level
AbelianChar delta_character(ClassCtx& X, const AbelianGroup& Z);

}  // namespace branchlab
