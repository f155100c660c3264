#include "doctest.h"

#include "branchlab/supercuspidal.hpp"

using namespace branchlab;

TEST_CASE("additive character psi") {
  FieldParams F = make_params(3, 3);
  ClassCtx X(F);
  // trivial on p_E
  CHECK(cyc_equal(X.R, psi_additive(X, laurent_of(F, scalar(3))), cyc_int(1)));
  CHECK(cyc_equal(X.R, psi_additive(X, laurent_of(F, Scalar{3, 6})), cyc_int(1)));
  // psi(1) is a primitive p-th root
  CycValue v1 = psi_additive(X, laurent_of(F, scalar(1)));
  CHECK(!cyc_equal(X.R, v1, cyc_int(1)));
  CycValue v3 = cyc_mul(X.R, v1, cyc_mul(X.R, v1, v1));
  CHECK(cyc_equal(X.R, v3, cyc_int(1)));
  // the trace kills pure sqrt(eps) arguments
  CHECK(cyc_equal(X.R, psi_additive(X, laurent_of(F, Scalar{0, 2})), cyc_int(1)));
  // additive on random arguments
  std::mt19937 rng(9);
  for (int i = 0; i < 50; ++i) {
    Laurent a = laurent(F, 1, Scalar{rng() % F.pn, rng() % F.pn}, F.prec);
    Laurent b = laurent(F, 1, Scalar{rng() % F.pn, rng() % F.pn}, F.prec);
    CycValue lhs = psi_additive(X, ladd(F, a, b));
    CycValue rhs = cyc_mul(X.R, psi_additive(X, a), psi_additive(X, b));
    CHECK(cyc_equal(X.R, lhs, rhs));
  }
  // insufficient precision is a budget violation
  Laurent deep = laurent(F, 3, scalar(1), F.prec);
  CHECK_THROWS_AS(psi_additive(X, deep), error);
}

TEST_CASE("Psi_X is a depth-d character of J_d") {
  FieldParams F = make_params(3, 3);
  ClassCtx X(F);
  for (long d = 1; d <= 2; ++d) {
    DepthDElem Xd = nilpotent_element(X, d);
    ClassFn psi = make_psi_X(X, Xd);
    CHECK(cyc_equal(X.R, psi.eval(gid(F)), cyc_int(1)));
    // exhaustive multiplicativity at q = 3
    auto Jd = elements(X.G, spec_J(unsigned(d)), unsigned(d) + 1);
    for (size_t i = 0; i < Jd->size(); i += 7)
      for (size_t j = 0; j < Jd->size(); j += 11) {
        CycValue lhs = psi.eval(gmul(F, (*Jd)[i], (*Jd)[j]));
        CycValue rhs = cyc_mul(X.R, psi.eval((*Jd)[i]), psi.eval((*Jd)[j]));
        CHECK(cyc_equal(X.R, lhs, rhs));
      }
    // trivial on K_{d+1}, nontrivial on K_d
    bool nontriv = false;
    stream_elements(X.G, spec_Kd(unsigned(d) + 1), unsigned(d) + 1 == F.prec ? F.prec : unsigned(d) + 1,
                    [&](const GElem& k) { CHECK(cyc_equal(X.R, psi.eval(k), cyc_int(1))); });
    stream_elements(X.G, spec_Kd(unsigned(d)), unsigned(d) + 1, [&](const GElem& k) {
      if (member(X.G, spec_J(unsigned(d)), k, unsigned(d) + 1) &&
          !cyc_equal(X.R, psi.eval(k), cyc_int(1)))
        nontriv = true;
    });
    CHECK(nontriv);
  }
}

TEST_CASE("nilpotent S_1 at q=3: degree, irreducibility, depth") {
  FieldParams F = make_params(3, 3);
  ClassCtx X(F);
  X.G.jobs = 2;
  SdChar S = build_S_d_nilpotent(X, 1, ResidueChar{1});
  CHECK(degree_of(X, S.chi) == 8);
  CHECK(inner_product(X, S.chi, S.chi) == 1);
  CHECK(depth_of(X, S.chi) == 1);
  // independence of the unit: S_1(X_{a pi^{-1}}, theta) has the same character
  SdChar S2 = build_S_d_nilpotent(X, 1, ResidueChar{1}, 2);
  CHECK(pointwise_mismatch(X, spec_K(), 2, S.chi, S2.chi) == 0);
  // fixed vectors: trivial on K_2 so the K_2-fixed space is everything
  CHECK(fixed_dim(X, S.chi, spec_Kd(2)) == 8);
}

TEST_CASE("nilpotent S_2 at q=3: degree and depth") {
  FieldParams F = make_params(3, 3);
  ClassCtx X(F);
  X.G.jobs = 2;
  SdChar S = build_S_d_nilpotent(X, 2, ResidueChar{1});
  CHECK(degree_of(X, S.chi) == 24);
  CHECK(depth_of(X, S.chi) == 2);
  // no K_2-fixed vectors: the character has depth exactly 2
  CHECK(fixed_dim(X, S.chi, spec_Kd(2)) == 0);
}

TEST_CASE("generic data construction") {
  FieldParams F = make_params(3, 4);
  ClassCtx X(F);
  // unramified, r = 1, v = pi^{-1}, u = 0
  GenericDatum D = make_generic_default(X, TorusTag::T11, Rat(1));
  CHECK(D.level == 2);
  CHECK(D.theta_depth == 0);
  CHECK(lie_depth(F, D.Gamma) == 1);
  // parity errors
  CHECK_THROWS_AS(make_generic_default(X, TorusTag::T1w, Rat(1)), error);
  CHECK_THROWS_AS(make_generic_default(X, TorusTag::T11, Rat(1, 2)), error);
  // ramified r = 1/2 needs v of valuation -1
  GenericDatum Dr = make_generic_default(X, TorusTag::T1w, Rat(1, 2));
  CHECK(Dr.level == 1);
  LValuation vv = lvaluation(F, Dr.vcoef);
  CHECK(vv.exact);
  CHECK(vv.v == -1);
  // phi matches psi(Tr(Gamma (t-1))) on T_{s+} by construction; check depth r
  SpecRef Tr = moy_prasad_spec(Rat(0), Rat(1));
  bool nontriv = false;
  for (const GElem& t : D.T.elems)
    if (member_basic(F, *Tr, t, F.prec) && char_exponent(X.R, F, D.T, D.phi, t) != 0)
      nontriv = true;
  CHECK(nontriv);
}

TEST_CASE("rho: one-dimensional cases") {
  FieldParams F = make_params(3, 4);
  ClassCtx X(F);
  // unramified odd depth
  GenericDatum D = make_generic_default(X, TorusTag::T11, Rat(1));
  RhoData R = build_rho(X, D);
  CHECK(!R.heisenberg);
  CHECK(R.degree == 1);
  CHECK(degree_of(X, R.chi) == 1);
  CHECK(inner_product(X, R.chi, R.chi) == 1);
  // ramified r = 1/2
  GenericDatum Dr = make_generic_default(X, TorusTag::T1w, Rat(1, 2));
  RhoData Rr = build_rho(X, Dr);
  CHECK(!Rr.heisenberg);
  CHECK(Rr.degree == 1);
  CHECK(inner_product(X, Rr.chi, Rr.chi) == 1);
}

TEST_CASE("rho: heisenberg case at r = 2") {
  FieldParams F = make_params(3, 4);
  ClassCtx X(F);
  X.G.jobs = 2;
  GenericDatum D = make_generic_default(X, TorusTag::T11, Rat(2));
  RhoData R = build_rho(X, D);
  CHECK(R.heisenberg);
  CHECK(R.degree == 3);
  CHECK(degree_of(X, R.chi) == 3);
  // the isotypic identities and <chi,chi> = 1 are asserted inside build_rho
}

TEST_CASE("twist identity") {
  FieldParams F = make_params(3, 4);
  ClassCtx X(F);
  GenericDatum D = make_generic_default(X, TorusTag::T11, Rat(1));
  // lambda = 1: trivial twist
  AbelianChar mu0;
  mu0.exps.assign(D.Z.gens.size(), 0);
  TwistReport r0 = twist_identity_check(X, D, mu0);
  CHECK(r0.identity_holds);
  // mu of depth 1: a character of Z nontrivial on Z n K_1
  auto chars = all_characters(X.R, F, D.Z);
  AbelianChar mu1;
  bool found = false;
  for (const AbelianChar& c : chars) {
    for (const GElem& z : D.Z.elems) {
      if (!member_basic(F, *spec_Kd(1), z, F.prec)) continue;
      if (char_exponent(X.R, F, D.Z, c, z) != 0) {
        mu1 = c;
        found = true;
        break;
      }
    }
    if (found) break;
  }
  REQUIRE(found);
  TwistReport r1 = twist_identity_check(X, D, mu1);
  CHECK(r1.identity_holds);
  CHECK(r1.reduced_central_ok);
}
