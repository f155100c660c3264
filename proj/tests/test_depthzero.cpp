#include "doctest.h"

#include "branchlab/depthzero.hpp"
#include "support/oracles.hpp"

using namespace branchlab;

TEST_CASE("residue classes cover the group with the four shapes") {
  FieldParams F = make_params(3, 2);
  ClassCtx X(F);
  const ResidueClasses& rc = residue_classes(X);
  CHECK(rc.elems.size() == 96);
  // every element receives exactly one tag through its class
  size_t total = 0;
  for (auto& c : rc.classes) total += c.size();
  CHECK(total == 96);
  CHECK(rc.class_of(F, gid(F)) >= 0);
  // identity is central(1)
  auto t = rc.tags[rc.class_of(F, gid(F))];
  CHECK(t.kind == ResidueClasses::Kind::central);
  CHECK(reduce(F, t.x, 1) == scalar(1));
  // w-shaped element is anisotropic
  auto tw = rc.tags[rc.class_of(F, g_w(F))];
  CHECK(tw.kind == ResidueClasses::Kind::anisotropic);
}

TEST_CASE("table 2 values at q=3") {
  FieldParams F = make_params(3, 2);
  ClassCtx X(F);
  CuspidalDatum s = table2_character(X, ResidueChar{0}, ResidueChar{1});
  CHECK(degree_of(X, s.chi) == 2);  // (q-1) alpha(1) beta(1)
  // unipotent class at x=1 evaluates to -1
  GElem u = gid(F);
  u.e[2] = Scalar{0, 1};
  auto v = cyc_as_integer(X.R, s.chi.eval(u));
  REQUIRE(v.has_value());
  CHECK(*v == -1);
  // split classes evaluate to zero: diag(a, conj(a)^{-1}) with a of order 8
  bool found_split = false;
  stream_elements(X.G, spec_K(), 1, [&](const GElem& g) {
    if (found_split) return;
    if (is_zero_at(F, g.e[1], 1) && is_zero_at(F, g.e[2], 1) &&
        !is_zero_at(F, sub(F, g.e[0], g.e[3]), 1)) {
      found_split = true;
      CHECK(cyc_is_zero(X.R, s.chi.eval(g)));
    }
  });
  CHECK(found_split);
  CHECK_THROWS_AS(table2_character(X, ResidueChar{1}, ResidueChar{1}), error);
}

TEST_CASE("cuspidal data are irreducible, cuspidal and symmetric") {
  FieldParams F = make_params(3, 2);
  ClassCtx X(F);
  auto data = all_cuspidal_data(X);
  CHECK(data.size() == 6);  // (q+1)q/2
  for (auto& s : data) {
    CHECK(degree_of(X, s.chi) == 2);
    CHECK(inner_product(X, s.chi, s.chi) == 1);
  }
  // sigma(alpha,beta) = sigma(beta,alpha) as characters
  CuspidalDatum a = table2_character(X, ResidueChar{0}, ResidueChar{1});
  CuspidalDatum b = table2_character(X, ResidueChar{1}, ResidueChar{0});
  CHECK(pointwise_mismatch(X, spec_K(), 1, a.chi, b.chi) == 0);
  // cuspidality: unipotent sums vanish against every central element
  auto Z = elements(X.G, spec_center(), 1);
  auto U = elements(X.G, spec_uni_upper(), 1);
  for (auto& s : data)
    for (const GElem& z : *Z) {
      CycValue sum = cyc_zero();
      for (const GElem& u : *U) sum = cyc_add(sum, s.chi.eval(gmul(F, z, u)));
      CHECK(cyc_is_zero(X.R, sum));
    }
  // distinctness of the 6 characters
  for (size_t i = 0; i < data.size(); ++i)
    for (size_t j = i + 1; j < data.size(); ++j)
      CHECK(inner_product(X, data[i].chi, data[j].chi) == 0);
}

TEST_CASE("restriction to the opposite borel detects the central character") {
  FieldParams F = make_params(3, 2);
  ClassCtx X(F);
  auto data = all_cuspidal_data(X);
  for (size_t i = 0; i < data.size(); ++i)
    for (size_t j = 0; j < data.size(); ++j) {
      ClassFn ri = data[i].chi, rj = data[j].chi;
      ri.domain = spec_Bop();
      rj.domain = spec_Bop();
      long ip = inner_product(X, ri, rj);
      CHECK(ip == (data[i].theta.e == data[j].theta.e ? 1 : 0));
    }
}

TEST_CASE("eta twist values") {
  FieldParams F = make_params(3, 3);
  ClassCtx X(F);
  CuspidalDatum s = table2_character(X, ResidueChar{0}, ResidueChar{1});
  ClassFn tw = eta_twist(X, s, 1);
  // identity: q - 1
  auto v0 = cyc_as_integer(X.R, tw.eval(gid(F)));
  REQUIRE(v0.has_value());
  CHECK(*v0 == 2);
  // a21 = c pi^d with unit c, a11 = 1: the unipotent value -1
  GElem g = gid(F);
  g.e[2] = Scalar{0, 3};  // sqrt(eps) pi
  auto v1 = cyc_as_integer(X.R, tw.eval(g));
  REQUIRE(v1.has_value());
  CHECK(*v1 == -1);
  // a21 in p^{d+1}, a11 = z of norm one: (q-1) theta(z)
  auto Z = elements(X.G, spec_center(), 1);
  for (const GElem& z : *Z) {
    GElem h = z;
    CycValue expect = cyc_scale(residue_char_value(X, s.theta, z.e[0]), 2);
    CHECK(cyc_equal(X.R, tw.eval(h), expect));
  }
}

TEST_CASE("central character decomposition") {
  FieldParams F = make_params(3, 2);
  ClassCtx X(F);
  AbelianGroup Z = abelian_structure(X.G, spec_center(), 1);
  REQUIRE(Z.order() == 4);
  auto chars = all_characters(X.R, F, Z);
  AbelianChar delta = delta_character(X, Z);
  // trivial -> (0, trivial); delta -> (1, trivial)
  int decomposable = 0;
  for (const AbelianChar& theta : chars) {
    auto d = decompose_central(X, Z, theta);
    if (!d) continue;
    ++decomposable;
    // reconstruct delta^k mu^2 pointwise on all four elements
    for (const GElem& z : Z.elems) {
      uint64_t lhs = char_exponent(X.R, F, Z, theta, z);
      uint64_t rhs = (uint64_t(d->k) * char_exponent(X.R, F, Z, delta, z) +
                      2 * uint64_t(char_exponent(X.R, F, Z, d->mu, z))) %
                     X.R.order();
      CHECK(lhs == rhs);
    }
  }
  // at q = 3 the tame 2-part obstructs half the characters (4 | q+1); the
  // even-exponent half decomposes
  CHECK(decomposable == 2);
  auto dtriv = decompose_central(X, Z, AbelianChar{{0}});
  REQUIRE(dtriv.has_value());
  CHECK(dtriv->k == 0);
  auto ddelta = decompose_central(X, Z, delta);
  REQUIRE(ddelta.has_value());
  CHECK(ddelta->k == 1);
}

namespace {

int match_against_oracle(ClassCtx& X) {
  auto T = oracle::residue_character_table(X);
  auto cus = oracle::cuspidal_indices(X, T);
  const ResidueClasses& rc = residue_classes(X);
  auto data = all_cuspidal_data(X);
  REQUIRE(cus.size() == data.size());
  for (int i : cus) CHECK(T.degrees[i] == long(X.G.F.q) - 1);
  int matched = 0;
  for (auto& s : data) {
    for (int i : cus) {
      bool eq = true;
      for (size_t c = 0; c < rc.classes.size() && eq; ++c) {
        const GElem& rep = rc.elems[rc.classes[c][0]];
        eq = cyc_equal(X.R, s.chi.eval(rep), T.values[i][int(c)]);
      }
      if (eq) {
        ++matched;
        break;
      }
    }
  }
  return matched;
}

}  // namespace

TEST_CASE("brute-force character table agrees with the cuspidal family") {
  FieldParams F = make_params(3, 2);
  ClassCtx X(F);
  auto T = oracle::residue_character_table(X);
  CHECK(T.degrees.size() == 16);  // number of conjugacy classes at q=3
  CHECK(match_against_oracle(X) == 6);
}

TEST_CASE("brute-force cross-check at q=5") {
  FieldParams F = make_params(5, 2);
  ClassCtx X(F);
  CHECK(match_against_oracle(X) == 15);
}
