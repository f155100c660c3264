#include "doctest.h"

#include <random>

#include "branchlab/padic.hpp"

using namespace branchlab;

TEST_CASE("make_params picks the least non-residue") {
  // squares mod 3 are {1}, mod 5 are {1,4}; brute force checked in the ctor
  CHECK(make_params(3, 4).epsilon == 2);
  CHECK(make_params(5, 3).epsilon == 2);
  CHECK(make_params(7, 3).epsilon == 3);
  CHECK_THROWS_AS(make_params(2, 4), error);
  CHECK_THROWS_AS(make_params(9, 2), error);
  CHECK_THROWS_AS(make_params(5, 0), error);
}

TEST_CASE("norm and trace basics") {
  FieldParams F = make_params(3, 4);
  Scalar x{1, 1};  // 1 + sqrt(eps)
  Scalar n = norm(F, x);
  CHECK(n.a1 == 0);
  // (1+r)(1-r) = 1 - eps = -1 = p^N - 1 mod 3^4
  CHECK(n.a0 == F.pn - 1);
  CHECK(norm(F, scalar(1)) == scalar(1));
  Scalar pu = mul_int(F, Scalar{1, 2}, 3);  // p * unit
  CHECK(valuation(F, norm(F, pu)).v == 2);
}

TEST_CASE("scalar algebra properties") {
  FieldParams F = make_params(5, 3);
  std::mt19937 rng(7);
  auto rnd = [&]() { return Scalar{rng() % F.pn, rng() % F.pn}; };
  for (int i = 0; i < 200; ++i) {
    Scalar x = rnd(), y = rnd();
    CHECK(norm(F, mul(F, x, y)) == mul(F, norm(F, x), norm(F, y)));
    CHECK(tr(F, x) == tr(F, conj(F, x)));
    CHECK(conj(F, conj(F, x)) == x);
    if (is_unit(F, x)) CHECK(mul(F, x, inv(F, x)) == scalar(1));
  }
}

TEST_CASE("hensel_sqrt") {
  FieldParams F = make_params(3, 3);
  auto r = hensel_sqrt(F, scalar(4));
  REQUIRE(r.has_value());
  CHECK(mul(F, *r, *r) == scalar(4));
  CHECK((r->a0 == 2 || r->a0 == 25));
  // eps is a non-square of the base ring but a square of O_E by construction
  auto re = hensel_sqrt(F, scalar(F.epsilon));
  REQUIRE(re.has_value());
  CHECK(mul(F, *re, *re) == scalar(F.epsilon));
  // 1 + sqrt(eps) has norm -1 = 2, a non-square mod 3, so it is not a square
  CHECK(!hensel_sqrt(F, Scalar{1, 1}).has_value());
  CHECK_THROWS_AS(hensel_sqrt(F, scalar(3)), error);

  // agreement with exhaustive residue search at low precision
  FieldParams F2 = make_params(3, 2);
  for (uint64_t a0 = 0; a0 < F2.pn; ++a0)
    for (uint64_t a1 = 0; a1 < F2.pn; ++a1) {
      Scalar u{a0, a1};
      if (!is_unit(F2, u)) continue;
      bool found = false;
      Scalar root;
      for (uint64_t b0 = 0; b0 < F2.pn && !found; ++b0)
        for (uint64_t b1 = 0; b1 < F2.pn && !found; ++b1) {
          Scalar c{b0, b1};
          if (mul(F2, c, c) == u) {
            found = true;
            root = c;
          }
        }
      auto h = hensel_sqrt(F2, u);
      CHECK(h.has_value() == found);
      if (h) CHECK((*h == root || neg(F2, *h) == root || mul(F2, *h, *h) == u));
    }
}

TEST_CASE("hensel_sqrt inverts squaring") {
  FieldParams F = make_params(5, 3);
  std::mt19937 rng(11);
  for (int i = 0; i < 100; ++i) {
    Scalar r{rng() % F.pn, rng() % F.pn};
    if (!is_unit(F, r)) continue;
    Scalar u = mul(F, r, r);
    auto s = hensel_sqrt(F, u);
    REQUIRE(s.has_value());
    CHECK((*s == r || *s == neg(F, r)));
  }
}

TEST_CASE("solve_norm") {
  FieldParams F = make_params(3, 4);
  CHECK(norm(F, solve_norm(F, scalar(1))) == scalar(1));
  // t = 2: a = 1 + sqrt(eps) works since norm = 1 - 2 = -1 = 2 mod 3
  Scalar a = solve_norm(F, scalar(2));
  CHECK(norm(F, a) == scalar(2));
  // filtration level: t in 1 + p^2 gives a in 1 + p_E^2
  Scalar t = scalar(1 + 9);
  Scalar b = solve_norm(F, t, 2);
  CHECK(norm(F, b) == t);
  CHECK(divisible(F, sub(F, b, scalar(1)), 2));
  CHECK_THROWS_AS(solve_norm(F, scalar(3)), error);
  CHECK_THROWS_AS(solve_norm(F, Scalar{1, 1}), error);

  // exhaustive agreement with residue search at N = 2
  FieldParams F2 = make_params(3, 2);
  for (uint64_t t0 = 1; t0 < F2.pn; ++t0) {
    if (t0 % 3 == 0) continue;
    Scalar got = solve_norm(F2, scalar(t0));
    CHECK(norm(F2, got) == scalar(t0));
    bool exists = false;
    for (uint64_t a0 = 0; a0 < F2.pn && !exists; ++a0)
      for (uint64_t a1 = 0; a1 < F2.pn && !exists; ++a1)
        if (norm(F2, Scalar{a0, a1}) == scalar(t0)) exists = true;
    CHECK(exists);
  }
}

TEST_CASE("norm-one counts match (q+1)q^(d-1)") {
  for (uint64_t p : {3ull, 5ull, 7ull}) {
    FieldParams F = make_params(p, 3);
    uint64_t expect = p + 1;
    for (unsigned d = 1; d <= 3; ++d) {
      auto reps = enumerate_norm_one(F, d);
      CHECK(reps.size() == expect);
      expect *= p;
    }
  }
  FieldParams F = make_params(3, 2);
  CHECK_THROWS_AS(enumerate_norm_one(F, 3), error);
}

TEST_CASE("norm-one squares have index two at every level") {
  // the square classes of E^1 feed the quotient of the group by its derived
  // part; p odd makes squareness a residue-level question
  FieldParams F = make_params(3, 3);
  for (unsigned d = 1; d <= 3; ++d) {
    auto reps = enumerate_norm_one(F, d);
    FieldParams R = F;
    R.prec = d;
    R.pn = F.pk(d);
    std::vector<Scalar> sq;
    for (auto& x : reps) {
      Scalar s = mul(R, x, x);
      bool seen = false;
      for (auto& y : sq)
        if (y == s) seen = true;
      if (!seen) sq.push_back(s);
    }
    CHECK(sq.size() * 2 == reps.size());
  }
}

TEST_CASE("laurent bookkeeping") {
  FieldParams F = make_params(3, 4);
  Scalar x{7, 2};
  Laurent lx = laurent(F, 2, x, F.prec);  // pi^{-2} x
  Laurent back = lshift(F, lx, 2);        // multiply by pi^2
  auto s = to_scalar(F, back);
  REQUIRE(s.has_value());
  // equality holds modulo p^(N-m) = p^2
  CHECK(sub(F, *s, x).a0 % F.pk(2) == 0);
  CHECK(sub(F, *s, x).a1 % F.pk(2) == 0);

  Laurent sum = ladd(F, lx, laurent_of(F, scalar(1)));
  LValuation v = lvaluation(F, sum);
  CHECK(v.exact);
  CHECK(v.v == -2);
  CHECK(lvaluation_at_least(F, sum, -2));
  CHECK(!lvaluation_at_least(F, sum, -1));

  Laurent z = laurent(F, 1, scalar(0), F.prec);
  CHECK(!lvaluation(F, z).exact);
}
