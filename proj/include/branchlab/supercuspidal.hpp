#pragma once

#include "branchlab/depthzero.hpp"

namespace branchlab {

// additive character psi of E: psi(x) = psi'((x + conj x)/2), psi' trivial on
// p_F and nontrivial on O_F, realized exactly as p-power roots of unity via
// psi'(w) = exp(2 pi i {w/p})
CycValue psi_additive(ClassCtx& X, const Laurent& x);

// X = X(z) + Xtilde(u, v) in g_{0,-d} with v(z) >= -d and v(v) > v(u) = -d
struct DepthDElem {
  LieElem X;
  long d = 0;
};

DepthDElem depth_d_element(ClassCtx& X, const Laurent& z, const Laurent& u, const Laurent& v);
// nilpotent element X_{a pi^{-d}} (z = v = 0)
DepthDElem nilpotent_element(ClassCtx& X, long d, uint64_t a = 1);

// the character Psi_X(k) = psi(Tr(X (k - I))) of J_d; multiplicativity is
// sampled at construction and is a hard error if violated
ClassFn make_psi_X(ClassCtx& X, const DepthDElem& Xd);

// S_d(X, zeta) = Ind_{T(X) J_d}^K Psi_{X, zeta}
struct SdChar {
  long d = 0;
  SpecRef tx;        // centralizer T(X) inside K
  SpecRef inducing;  // T(X) J_d
  ClassFn psi_xz;    // the inducing character
  ClassFn chi;       // the induced character on K
};

// general case: T(X) a torus spec, zeta given as an evaluator on it
SdChar build_S_d(ClassCtx& X, const DepthDElem& Xd, SpecRef tx,
                 const std::function<CycValue(const GElem&)>& zeta);
// nilpotent case: T(X) = ZU, zeta = theta on Z extended trivially to U
SdChar build_S_d_nilpotent(ClassCtx& X, long d, const ResidueChar& theta, uint64_t a = 1);

// ---------------------------------------------------------------------------
// positive-depth data

enum class TorusTag { T11, Tww, T1w, T1ew };

std::string torus_name(TorusTag tag);
TorusTag parse_torus(const std::string& s);

// Anisotropic torus bookkeeping.  The torus attached to y = 1 is the
// eta-conjugate of the split-free y = 0 torus, so its constructions are done
// on the y = 0 side and every double-coset conjugator picks up one extra eta.
struct TorusData {
  TorusTag tag;
  bool ramified = false;
  Rat y;            // the point of the building: 0, 1, 1/2
  long eta_shift = 0;  // 1 when y = 1
  Scalar c;         // working-side parameter: (2,1) = c * (1,2) on the torus
  SpecRef tspec;    // K n T on the working side
};

TorusData torus_data(ClassCtx& X, TorusTag tag);

// generic character datum (T, y, r, phi) with its realizing element Gamma
struct GenericDatum {
  TorusData torus;
  Rat r, s;            // depth and s = r/2
  Laurent ucoef, vcoef;  // Gamma = u z + v Y_T on the working side
  LieElem Gamma;       // working-side realization in t_{-r}
  unsigned level = 0;  // phi factors through T/(T n K_level)
  AbelianGroup T;      // working-side torus quotient at `level`
  AbelianChar phi;
  AbelianGroup Z;      // center quotient at `level`
  AbelianChar theta;   // phi restricted to Z
  long theta_depth = 0;
};

// chooses Gamma = u z + v Y_T with the stated coefficients, verifies the
// genericity valuation, and extends the Moy-Prasad character of T_{s+} to a
// character phi of T; among the admissible extensions the one of index
// `phi_index` (ordered deterministically) is taken.  With
// require_depth_zero_central true, only extensions whose restriction to Z has
// depth zero are considered.
GenericDatum make_generic(ClassCtx& X, TorusTag tag, const Rat& r, const Laurent& u,
                          const Laurent& v, size_t phi_index = 0,
                          bool require_depth_zero_central = true);
GenericDatum make_generic_default(ClassCtx& X, TorusTag tag, const Rat& r);
// number of admissible phi for the given data
size_t count_admissible_phi(ClassCtx& X, TorusTag tag, const Rat& r, const Laurent& u,
                            const Laurent& v, bool require_depth_zero_central);

// psi(Tr(Gamma (g - I))) on G_{y,s+} (working side)
CycValue psi_gamma(ClassCtx& X, const GenericDatum& D, const GElem& g);

// the representation rho(T, y, r, phi) of G_{y,s} T as an exact character;
// one-dimensional unless the torus is unramified with even r, in which case
// it is the q-dimensional Heisenberg extension realized by induction from a
// polarization
struct RhoData {
  GenericDatum datum;
  bool heisenberg = false;
  SpecRef domain;     // working-side G_{y,s} T
  SpecRef gys;        // working-side G_{y,s}
  ClassFn chi;        // character of rho on the domain
  long degree = 1;
};

RhoData build_rho(ClassCtx& X, const GenericDatum& D);

// checks chi_{rho(phi)} = lambda * chi_{rho(phi_twisted)} for lambda = mu o det,
// and that the theta-reduction lands in {1, delta} when it exists
struct TwistReport {
  bool identity_holds = false;
  bool reduced_central_ok = false;
  std::string detail;
};
TwistReport twist_identity_check(ClassCtx& X, const GenericDatum& D, const AbelianChar& mu,
                                 size_t phi_index_hint = 0);

// mu o det as a value on any group element (mu a character of Z at D.level)
CycValue det_character_value(ClassCtx& X, const AbelianGroup& Z, const AbelianChar& mu,
                             const GElem& g);

}  // namespace branchlab
