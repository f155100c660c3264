#include "branchlab/classfun.hpp"

#include <algorithm>

namespace branchlab {

MemberTest make_member(ClassCtx& X, SpecRef S, unsigned level) {
  const FieldParams F = X.G.F;
  switch (S->kind) {
    case Spec::Kind::product: {
      auto trans = factor_transversal(X.G, S->left, S->right, level);
      auto invs = std::make_shared<std::vector<GElem>>();
      for (const GElem& t : *trans) invs->push_back(ginv(F, t));
      MemberTest right = make_member(X, S->right, level);
      return [F, invs, right](const GElem& g) {
        for (const GElem& ti : *invs)
          if (right(gmul(F, ti, g))) return true;
        return false;
      };
    }
    case Spec::Kind::conjugate: {
      MemberTest base = make_member(X, S->base, level);
      Monomial m = S->conj;
      return [F, base, m, level](const GElem& g) {
        if (!conj_stays_integral(F, g, m)) return false;
        GElem x = conj_by_monomial(F, g, m);
        require(x.level >= level, "member closure: conjugate needs more precision");
        return base(x);
      };
    }
    default:
      return [F, S, level](const GElem& g) { return member_basic(F, *S, g, level); };
  }
}

ClassFn trivial_character(ClassCtx& X, SpecRef domain, unsigned level) {
  (void)X;
  ClassFn f;
  f.domain = domain;
  f.level = level;
  f.degree = 1;
  f.eval = [](const GElem&) { return cyc_int(1); };
  return f;
}

long degree_of(ClassCtx& X, const ClassFn& chi) {
  auto v = cyc_as_integer(X.R, chi.eval(gid(X.G.F)));
  require(v.has_value(), "degree is not a rational integer");
  return *v;
}

namespace {

long reduce_sum(ClassCtx& X, const CycAccum& acc, uint64_t count, const std::string& what) {
  auto total = cyc_as_integer(X.R, acc);
  require(total.has_value(), what + ": sum is not a rational integer");
  require(*total % long(count) == 0, what + ": sum is not divisible by the group order");
  long v = *total / long(count);
  require(v >= 0, what + ": negative intertwining number");
  return v;
}

}  // namespace

long inner_product(ClassCtx& X, const ClassFn& chi1, const ClassFn& chi2) {
  require(chi1.domain->name == chi2.domain->name, "inner_product: domains differ");
  require(chi1.level == chi2.level, "inner_product: levels differ");
  unsigned L = chi1.level;
  unsigned jobs = std::max(1u, X.G.jobs);
  std::vector<CycAccum> accs(jobs, CycAccum(X.R));
  std::vector<uint64_t> counts(jobs, 0);
  if (jobs > 1 && chi1.domain->kind == Spec::Kind::pattern) {
    parallel_stream(X.G, chi1.domain, L, jobs, [&](unsigned tid, const GElem& g) {
      accs[tid].add(cyc_mul(X.R, chi1.eval(g), cyc_conj(X.R, chi2.eval(g))));
      ++counts[tid];
    });
    for (unsigned t = 1; t < jobs; ++t) {
      accs[0].add(accs[t]);
      counts[0] += counts[t];
    }
  } else {
    stream_elements(X.G, chi1.domain, L, [&](const GElem& g) {
      accs[0].add(cyc_mul(X.R, chi1.eval(g), cyc_conj(X.R, chi2.eval(g))));
      ++counts[0];
    });
  }
  return reduce_sum(X, accs[0], counts[0], "inner_product");
}

ClassFn induce(ClassCtx& X, const ClassFn& chi) {
  const FieldParams F = X.G.F;
  SpecRef H = chi.domain;
  unsigned mH = std::max(1u, containment_level(H));
  auto trans = left_transversal(X.G, H, mH);
  // index formula check at the character's own level
  uint64_t nK = cardinality(X.G, spec_K(), chi.level);
  uint64_t nH = cardinality(X.G, H, chi.level);
  require(nH * trans->size() == nK, "induce: transversal size disagrees with the index");
  MemberTest in_H = make_member(X, H, chi.level);
  auto invs = std::make_shared<std::vector<GElem>>();
  for (const GElem& t : *trans) invs->push_back(ginv(F, t));
  auto inner = chi.eval;
  auto reps = trans;
  ClassFn f;
  f.domain = spec_K();
  f.level = chi.level;
  f.degree = chi.degree > 0 ? long(trans->size()) * chi.degree : -1;
  f.eval = [F, reps, invs, in_H, inner](const GElem& g) {
    CycValue v = cyc_zero();
    for (size_t i = 0; i < reps->size(); ++i) {
      GElem c = gmul(F, (*invs)[i], gmul(F, g, (*reps)[i]));
      if (in_H(c)) v = cyc_add(v, inner(c));
    }
    return v;
  };
  return f;
}

long mackey_pairing(ClassCtx& X, const ClassFn& chi1, const ClassFn& chi2,
                    const CosetSystem& cosets) {
  require(cosets.verified, "mackey_pairing: unverified double-coset system refused");
  require(cosets.H1->name == chi1.domain->name && cosets.H2->name == chi2.domain->name,
          "mackey_pairing: coset system does not match the characters");
  const FieldParams F = X.G.F;
  unsigned L = std::max(chi1.level, chi2.level);
  long total = 0;
  for (const GElem& g : cosets.reps) {
    GElem gi = ginv(F, g);
    auto inter = intersection_conj(X.G, cosets.H1, cosets.H2, g, L);
    CycAccum acc(X.R);
    for (const GElem& h : inter) {
      GElem hg = gmul(F, gi, gmul(F, h, g));
      acc.add(cyc_mul(X.R, chi1.eval(h), cyc_conj(X.R, chi2.eval(hg))));
    }
    total += reduce_sum(X, acc, inter.size(), "mackey_pairing");
  }
  return total;
}

long fixed_dim(ClassCtx& X, const ClassFn& chi, SpecRef H) {
  CycAccum acc(X.R);
  uint64_t n = 0;
  stream_elements(X.G, H, chi.level, [&](const GElem& h) {
    acc.add(chi.eval(h));
    ++n;
  });
  return reduce_sum(X, acc, n, "fixed_dim");
}

long depth_of(ClassCtx& X, const ClassFn& chi) {
  for (unsigned d = 0; d + 1 <= chi.level; ++d)
    if (fixed_dim(X, chi, spec_Kd(d + 1)) > 0) return long(d);
  fail("depth_of: no fixed vectors up to the character's level");
}

uint64_t pointwise_mismatch(ClassCtx& X, SpecRef domain, unsigned level, const ClassFn& chi1,
                            const ClassFn& chi2) {
  unsigned jobs = std::max(1u, X.G.jobs);
  std::vector<uint64_t> bad(jobs, 0);
  auto check = [&](unsigned tid, const GElem& g) {
    if (!cyc_equal(X.R, chi1.eval(g), chi2.eval(g))) ++bad[tid];
  };
  if (jobs > 1 && domain->kind == Spec::Kind::pattern) {
    parallel_stream(X.G, domain, level, jobs, check);
  } else {
    stream_elements(X.G, domain, level, [&](const GElem& g) { check(0, g); });
  }
  uint64_t total = 0;
  for (uint64_t b : bad) total += b;
  return total;
}

}  // namespace branchlab
