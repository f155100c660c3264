#include "branchlab/duals.hpp"

#include <algorithm>
#include <unordered_set>

namespace branchlab {

const std::vector<unsigned>& AbelianGroup::exponents(const FieldParams& F, const GElem& x) const {
  auto it = dlog.find(gkey(F, x, level));
  require(it != dlog.end(), "abelian dlog: element outside the group");
  return it->second;
}

AbelianGroup abelian_structure(GroupCtx& C, SpecRef S, unsigned level) {
  const FieldParams& F = C.F;
  AbelianGroup A;
  A.spec = S;
  A.level = level;
  A.elems = *elements(C, S, level);

  // commutativity spot check
  for (size_t i = 0; i < std::min<size_t>(A.elems.size(), 8); ++i)
    for (size_t j = i + 1; j < std::min<size_t>(A.elems.size(), 8); ++j)
      require(gequal_at(F, gmul(F, A.elems[i], A.elems[j]), gmul(F, A.elems[j], A.elems[i]), level),
              "abelian_structure: group is not abelian");

  // polycyclic chain by repeatedly adjoining an element of maximal relative order
  std::unordered_set<Key, KeyHash> closure;
  std::vector<GElem> closure_list = {gid(F)};
  closure.insert(gkey(F, gid(F), level));
  auto rel_order_of = [&](const GElem& g) {
    GElem x = g;
    unsigned k = 1;
    while (!closure.count(gkey(F, x, level))) {
      x = gmul(F, x, g);
      ++k;
    }
    return k;
  };
  while (closure.size() < A.elems.size()) {
    unsigned best = 0;
    const GElem* pick = nullptr;
    for (const GElem& g : A.elems) {
      if (closure.count(gkey(F, g, level))) continue;
      unsigned k = rel_order_of(g);
      if (k > best) {
        best = k;
        pick = &g;
      }
    }
    require(pick != nullptr, "abelian_structure: no generator found");
    A.gens.push_back(*pick);
    A.gen_invs.push_back(ginv(F, *pick));
    A.rel_order.push_back(best);
    std::vector<GElem> next;
    GElem pw = gid(F);
    for (unsigned e = 0; e < best; ++e) {
      for (const GElem& h : closure_list) next.push_back(gmul(F, pw, h));
      pw = gmul(F, pw, *pick);
    }
    closure_list = std::move(next);
    closure.clear();
    for (const GElem& h : closure_list) closure.insert(gkey(F, h, level));
  }

  // dlog table over the mixed-radix enumeration
  size_t n = A.gens.size();
  std::vector<unsigned> e(n, 0);
  for (;;) {
    GElem prod = gid(F);
    for (size_t i = 0; i < n; ++i)
      for (unsigned t = 0; t < e[i]; ++t) prod = gmul(F, prod, A.gens[i]);
    A.dlog.emplace(gkey(F, prod, level), e);
    size_t i = 0;
    while (i < n && ++e[i] == A.rel_order[i]) e[i++] = 0;
    if (i == n) break;
  }
  require(A.dlog.size() == A.elems.size(), "abelian_structure: chain does not span the group");
  return A;
}

std::vector<AbelianChar> all_characters(const CycRing& R, const FieldParams& F,
                                        const AbelianGroup& A) {
  std::vector<AbelianChar> acc(1);
  for (size_t i = 0; i < A.gens.size(); ++i) {
    unsigned k = A.rel_order[i];
    require(R.order() % k == 0, "ring order must contain the group exponent");
    GElem pw = gid(F);
    for (unsigned t = 0; t < k; ++t) pw = gmul(F, pw, A.gens[i]);
    const auto& de = A.exponents(F, pw);  // involves only the earlier generators
    for (size_t j = i; j < de.size(); ++j)
      require(de[j] == 0, "abelian chain relation leaks forward");
    std::vector<AbelianChar> next;
    next.reserve(acc.size() * k);
    for (const AbelianChar& chi : acc) {
      uint64_t target = 0;
      for (size_t j = 0; j < i; ++j) target += uint64_t(de[j]) * chi.exps[j];
      target %= R.order();
      auto roots = kth_root_exponents(R, k, target);
      require(roots.size() == k, "character extension count mismatch");
      for (uint32_t r : roots) {
        AbelianChar c2 = chi;
        c2.exps.push_back(r);
        next.push_back(std::move(c2));
      }
    }
    acc = std::move(next);
  }
  require(acc.size() == A.order(), "dual group size mismatch");
  return acc;
}

CycValue char_value(const CycRing& R, const FieldParams& F, const AbelianGroup& A,
                    const AbelianChar& chi, const GElem& x) {
  return cyc_root(R, char_exponent(R, F, A, chi, x));
}

uint32_t char_exponent(const CycRing& R, const FieldParams& F, const AbelianGroup& A,
                       const AbelianChar& chi, const GElem& x) {
  const auto& e = A.exponents(F, x);
  uint64_t s = 0;
  for (size_t i = 0; i < e.size(); ++i) s += uint64_t(e[i]) * chi.exps[i];
  return uint32_t(s % R.order());
}

bool char_is_trivial_on(const CycRing& R, GroupCtx& C, const AbelianGroup& A,
                        const AbelianChar& chi, SpecRef H, unsigned level) {
  bool trivial = true;
  stream_elements(C, H, level, [&](const GElem& h) {
    if (!trivial) return;
    if (char_exponent(R, C.F, A, chi, h) != 0) trivial = false;
  });
  return trivial;
}

AbelianChar char_mul(const CycRing& R, const AbelianChar& a, const AbelianChar& b) {
  AbelianChar c;
  require(a.exps.size() == b.exps.size(), "char_mul: mismatched duals");
  for (size_t i = 0; i < a.exps.size(); ++i)
    c.exps.push_back(uint32_t((uint64_t(a.exps[i]) + b.exps[i]) % R.order()));
  return c;
}

AbelianChar char_conj(const CycRing& R, const AbelianChar& a) {
  AbelianChar c;
  for (uint32_t e : a.exps) c.exps.push_back(e == 0 ? 0 : R.order() - e);
  return c;
}

}  // namespace branchlab
