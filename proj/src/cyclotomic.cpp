#include "branchlab/cyclotomic.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace branchlab {

namespace {

// integer polynomial helpers for the small tame part
using Poly = std::vector<long long>;  // coefficients, low degree first

Poly poly_div_exact(const Poly& a, const Poly& b) {
  // exact division of integer polynomials, b monic
  Poly r = a;
  Poly q(a.size() - b.size() + 1, 0);
  for (int i = int(q.size()) - 1; i >= 0; --i) {
    long long c = r[i + b.size() - 1];
    q[i] = c;
    if (c == 0) continue;
    for (size_t j = 0; j < b.size(); ++j) r[i + j] -= c * b[j];
  }
  for (long long rj : r) require(rj == 0, "polynomial division not exact");
  return q;
}

Poly cyclotomic_poly(unsigned n, std::map<unsigned, Poly>& memo) {
  auto it = memo.find(n);
  if (it != memo.end()) return it->second;
  Poly num(n + 1, 0);
  num[0] = -1;
  num[n] = 1;  // x^n - 1
  Poly acc = {1};
  for (unsigned d = 1; d < n; ++d) {
    if (n % d != 0) continue;
    Poly cd = cyclotomic_poly(d, memo);
    Poly next(acc.size() + cd.size() - 1, 0);
    for (size_t i = 0; i < acc.size(); ++i)
      for (size_t j = 0; j < cd.size(); ++j) next[i + j] += acc[i] * cd[j];
    acc = next;
  }
  Poly res = poly_div_exact(num, acc);
  memo[n] = res;
  return res;
}

uint64_t modinv_u(uint64_t a, uint64_t n) {
  long long r0 = (long long)n, r1 = (long long)(a % n), s0 = 0, s1 = 1;
  while (r1) {
    long long q = r0 / r1;
    long long r2 = r0 - q * r1, s2 = s0 - q * s1;
    r0 = r1; r1 = r2;
    s0 = s1; s1 = s2;
  }
  require(r0 == 1, "modinv: not coprime");
  return uint64_t((s0 % (long long)n + (long long)n) % (long long)n);
}

}  // namespace

CycRing::CycRing(uint64_t p, unsigned a, unsigned mprime) : p_(p), a_(a) {
  require(mprime >= 1, "tame part must be positive");
  require(mprime % p != 0, "tame part must be coprime to p");
  pa_ = 1;
  for (unsigned i = 0; i < a; ++i) pa_ *= unsigned(p);
  mp_ = mprime;
  m_ = pa_ * mp_;
  phi_pa_ = a == 0 ? 1 : pa_ / unsigned(p) * unsigned(p - 1);
  unsigned phi = 0;
  for (unsigned x = 0; x < mp_; ++x)
    if (std::gcd(x, mp_) == 1) ++phi;
  phi_mp_ = mp_ == 1 ? 1 : phi;
  if (pa_ > 1 && mp_ > 1) {
    binv_ = modinv_u(mp_ % pa_, pa_);
    ainv_ = modinv_u(pa_ % mp_, mp_);
  }

  // canonical rows for zeta_{m'}^j via reduction mod the m'-th cyclotomic poly
  std::map<unsigned, Poly> memo;
  Poly cyc = mp_ == 1 ? Poly{-1, 1} : cyclotomic_poly(mp_, memo);
  unsigned deg = unsigned(cyc.size()) - 1;
  require(deg == (mp_ == 1 ? 1u : phi_mp_), "cyclotomic degree mismatch");
  if (mp_ == 1) {
    tame_rows_ = {{1}};
    phi_mp_ = 1;
    return;
  }
  tame_rows_.assign(mp_, std::vector<long long>(deg, 0));
  // x^j mod cyc
  std::vector<long long> cur(deg, 0);
  cur[0] = 1;
  for (unsigned j = 0; j < mp_; ++j) {
    tame_rows_[j] = cur;
    // multiply by x, reduce
    std::vector<long long> next(deg, 0);
    long long top = cur[deg - 1];
    for (unsigned i = deg - 1; i >= 1; --i) next[i] = cur[i - 1];
    next[0] = 0;
    if (top != 0)
      for (unsigned i = 0; i < deg; ++i) next[i] -= top * cyc[i];
    cur = next;
  }
}

void CycRing::tensor_coords(unsigned e, unsigned& i_ppart, unsigned& j_tame) const {
  e %= m_;
  if (pa_ == 1) {
    i_ppart = 0;
    j_tame = e % mp_;
    return;
  }
  if (mp_ == 1) {
    i_ppart = e % pa_;
    j_tame = 0;
    return;
  }
  i_ppart = unsigned((uint64_t(e) * binv_) % pa_);
  j_tame = unsigned((uint64_t(e) * ainv_) % mp_);
}

CycValue cyc_zero() { return {}; }

CycValue cyc_int(long long c) {
  if (c == 0) return {};
  CycValue v;
  v.t.push_back({0, c});
  return v;
}

CycValue cyc_root(const CycRing& R, long long e, long long c) {
  if (c == 0) return {};
  long long m = R.order();
  long long ee = ((e % m) + m) % m;
  CycValue v;
  v.t.push_back({uint32_t(ee), c});
  return v;
}

static void normalize(CycValue& v) {
  std::sort(v.t.begin(), v.t.end());
  size_t w = 0;
  for (size_t i = 0; i < v.t.size();) {
    uint32_t e = v.t[i].first;
    long long s = 0;
    while (i < v.t.size() && v.t[i].first == e) s += v.t[i++].second;
    if (s != 0) v.t[w++] = {e, s};
  }
  v.t.resize(w);
}

CycValue cyc_add(const CycValue& x, const CycValue& y) {
  CycValue v;
  v.t.reserve(x.t.size() + y.t.size());
  v.t.insert(v.t.end(), x.t.begin(), x.t.end());
  v.t.insert(v.t.end(), y.t.begin(), y.t.end());
  normalize(v);
  return v;
}

CycValue cyc_neg(const CycValue& x) {
  CycValue v = x;
  for (auto& [e, c] : v.t) c = -c;
  return v;
}

CycValue cyc_sub(const CycRing&, const CycValue& x, const CycValue& y) {
  return cyc_add(x, cyc_neg(y));
}

CycValue cyc_mul(const CycRing& R, const CycValue& x, const CycValue& y) {
  CycValue v;
  v.t.reserve(x.t.size() * y.t.size());
  unsigned m = R.order();
  for (auto& [e1, c1] : x.t)
    for (auto& [e2, c2] : y.t) v.t.push_back({(e1 + e2) % m, c1 * c2});
  normalize(v);
  return v;
}

CycValue cyc_scale(const CycValue& x, long long c) {
  if (c == 0) return {};
  CycValue v = x;
  for (auto& [e, k] : v.t) k *= c;
  return v;
}

CycValue cyc_conj(const CycRing& R, const CycValue& x) {
  CycValue v;
  unsigned m = R.order();
  for (auto& [e, c] : x.t) v.t.push_back({e == 0 ? 0 : m - e, c});
  normalize(v);
  return v;
}

namespace {

// expand zeta_{p^a}^i over the power basis {zeta^t : t < phi(p^a)};
// relation: zeta^{phi + t} = -sum_{k<p-1} zeta^{t + k p^{a-1}}
void ppart_expand(const CycRing& R, unsigned i, std::vector<std::pair<unsigned, int>>& out) {
  out.clear();
  unsigned pa = R.p_part();
  if (pa == 1) {
    out.push_back({0, 1});
    return;
  }
  unsigned phi = R.phi_ppart();
  unsigned step = pa / unsigned(R.p());  // p^{a-1}
  if (i < phi) {
    out.push_back({i, 1});
    return;
  }
  unsigned t = i - phi;  // t < p^{a-1}
  for (unsigned k = 0; k + 1 < unsigned(R.p()); ++k) out.push_back({t + k * step, -1});
}

std::vector<long long> canonical_impl(const CycRing& R,
                                      const std::vector<std::pair<uint32_t, long long>>& terms) {
  unsigned rows = R.phi_ppart(), cols = R.phi_tame();
  std::vector<long long> M(size_t(rows) * cols, 0);
  std::vector<std::pair<unsigned, int>> pexp;
  for (auto& [e, c] : terms) {
    if (c == 0) continue;
    unsigned i, j;
    R.tensor_coords(e, i, j);
    ppart_expand(R, i, pexp);
    const auto& row = R.tame_row(j % R.tame_part());
    for (auto& [pi, ps] : pexp) {
      long long s = c * ps;
      for (unsigned jj = 0; jj < cols; ++jj)
        if (row[jj] != 0) M[size_t(pi) * cols + jj] += s * row[jj];
    }
  }
  return M;
}

}  // namespace

std::vector<long long> canonical(const CycRing& R, const CycValue& v) {
  return canonical_impl(R, v.t);
}

std::vector<long long> canonical(const CycRing& R, const CycAccum& v) {
  std::vector<std::pair<uint32_t, long long>> terms;
  for (uint32_t e = 0; e < v.c.size(); ++e)
    if (v.c[e] != 0) terms.push_back({e, v.c[e]});
  return canonical_impl(R, terms);
}

bool cyc_is_zero(const CycRing& R, const CycValue& v) {
  if (v.t.empty()) return true;
  auto M = canonical(R, v);
  return std::all_of(M.begin(), M.end(), [](long long x) { return x == 0; });
}

bool cyc_equal(const CycRing& R, const CycValue& x, const CycValue& y) {
  if (x.t == y.t) return true;
  return cyc_is_zero(R, cyc_add(x, cyc_neg(y)));
}

static std::optional<long long> integer_of_canonical(std::vector<long long> M) {
  long long c0 = M[0];
  M[0] = 0;
  if (!std::all_of(M.begin(), M.end(), [](long long x) { return x == 0; })) return std::nullopt;
  return c0;
}

std::optional<long long> cyc_as_integer(const CycRing& R, const CycValue& v) {
  return integer_of_canonical(canonical(R, v));
}

std::optional<long long> cyc_as_integer(const CycRing& R, const CycAccum& v) {
  return integer_of_canonical(canonical(R, v));
}

std::vector<uint32_t> kth_root_exponents(const CycRing& R, uint64_t k, uint64_t target) {
  uint64_t m = R.order();
  k %= m;
  if (k == 0) return {};
  uint64_t g = std::gcd(k, m);
  if (target % g != 0) return {};
  uint64_t m2 = m / g;
  uint64_t e0 = ((target / g) % m2) * modinv_u((k / g) % m2, m2) % m2;
  std::vector<uint32_t> out;
  for (uint64_t t = 0; t < g; ++t) out.push_back(uint32_t((e0 + t * m2) % m));
  return out;
}

std::string cyc_str(const CycRing& R, const CycValue& v) {
  auto i = cyc_as_integer(R, v);
  if (i) return std::to_string(*i);
  std::string s;
  for (auto& [e, c] : v.t) {
    if (!s.empty() && c >= 0) s += "+";
    if (c == -1)
      s += "-";
    else if (c != 1)
      s += std::to_string(c) + "*";
    s += "z" + std::to_string(R.order()) + "^" + std::to_string(e);
  }
  return s.empty() ? "0" : s;
}

}  // namespace branchlab
