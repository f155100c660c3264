#include "doctest.h"

#include "branchlab/cyclotomic.hpp"

using namespace branchlab;

TEST_CASE("root arithmetic and zero tests") {
  CycRing R(3, 4, 8);  // order 648
  unsigned m = R.order();
  CHECK(m == 648);

  // full orbit of a primitive p-th root sums to -... : 1 + z + z^2 = 0 for z of order 3
  CycValue s = cyc_zero();
  for (int j = 0; j < 3; ++j) s = cyc_add(s, cyc_root(R, j * (m / 3)));
  CHECK(cyc_is_zero(R, s));
  CHECK(!s.is_zero_syntactic());  // genuinely needs the basis reduction

  // and for the tame part: sum over all 8th roots
  s = cyc_zero();
  for (int j = 0; j < 8; ++j) s = cyc_add(s, cyc_root(R, j * (m / 8)));
  CHECK(cyc_is_zero(R, s));

  // multiplication adds exponents
  CycValue a = cyc_root(R, 5), b = cyc_root(R, m - 5);
  CHECK(cyc_equal(R, cyc_mul(R, a, b), cyc_int(1)));

  // conjugation inverts roots
  CHECK(cyc_equal(R, cyc_mul(R, a, cyc_conj(R, a)), cyc_int(1)));
}

TEST_CASE("integer extraction") {
  CycRing R(3, 3, 8);
  CycValue v = cyc_int(42);
  auto i = cyc_as_integer(R, v);
  REQUIRE(i.has_value());
  CHECK(*i == 42);
  CHECK(!cyc_as_integer(R, cyc_root(R, 1)).has_value());

  // z^k + conj(z^k) is real but not rational unless assembled fully
  CycValue w = cyc_add(cyc_root(R, 1), cyc_root(R, R.order() - 1));
  CHECK(!cyc_as_integer(R, w).has_value());

  CycAccum acc(R);
  for (unsigned j = 0; j < R.order(); ++j) acc.add(cyc_root(R, j));
  auto z = cyc_as_integer(R, acc);
  REQUIRE(z.has_value());
  CHECK(*z == 0);  // all m-th roots sum to zero for m not 1
}

TEST_CASE("kth roots") {
  CycRing R(3, 2, 8);  // order 72
  // solve x^3 = zeta^6
  auto es = kth_root_exponents(R, 3, 6);
  REQUIRE(es.size() == 3);
  for (auto e : es) CHECK((uint64_t(e) * 3) % R.order() == 6);
  // unsolvable when gcd does not divide
  CHECK(kth_root_exponents(R, 3, 1).empty());
}

TEST_CASE("pure p-power ring") {
  CycRing R(5, 2, 1);
  CHECK(R.order() == 25);
  CycValue s = cyc_zero();
  for (int j = 0; j < 5; ++j) s = cyc_add(s, cyc_root(R, j * 5));
  CHECK(cyc_is_zero(R, s));
  s = cyc_zero();
  for (int j = 0; j < 25; ++j) s = cyc_add(s, cyc_root(R, j));
  CHECK(cyc_is_zero(R, s));
  CHECK(!cyc_is_zero(R, cyc_add(cyc_root(R, 5), cyc_root(R, 10))));
}
