#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "branchlab/common.hpp"

namespace branchlab {

// Exact arithmetic in Z[zeta_m] for m = p^a * m' with gcd(p, m') = 1.
// Values are sparse integer combinations of powers of zeta_m; zero tests and
// integer extraction go through the tensor basis
//   { zeta_{p^a}^i (x) zeta_{m'}^j : i < phi(p^a), j < phi(m') },
// which keeps every operation integral.  Character values, additive-character
// values and intertwining sums all live in one ring fixed per run.
class CycRing {
 public:
  CycRing(uint64_t p, unsigned a, unsigned mprime);

  unsigned order() const { return m_; }
  uint64_t p() const { return p_; }
  unsigned p_part() const { return pa_; }
  unsigned tame_part() const { return mp_; }

  // canonical coordinates of zeta_m^e in the tensor basis (single unit term)
  void tensor_coords(unsigned e, unsigned& i_ppart, unsigned& j_tame) const;

  unsigned phi_ppart() const { return phi_pa_; }
  unsigned phi_tame() const { return phi_mp_; }

  // reduction row of zeta_{m'}^j over the phi(m') power basis
  const std::vector<long long>& tame_row(unsigned j) const { return tame_rows_[j]; }

 private:
  uint64_t p_;
  unsigned a_;
  unsigned m_;
  unsigned pa_;   // p^a
  unsigned mp_;   // m'
  unsigned phi_pa_;
  unsigned phi_mp_;
  uint64_t binv_ = 0;  // (m')^{-1} mod p^a
  uint64_t ainv_ = 0;  // (p^a)^{-1} mod m'
  std::vector<std::vector<long long>> tame_rows_;
};

// sparse exact element of Z[zeta_m]: sorted (exponent, coefficient) pairs
struct CycValue {
  std::vector<std::pair<uint32_t, long long>> t;

  bool is_zero_syntactic() const { return t.empty(); }
};

CycValue cyc_zero();
CycValue cyc_int(long long c);
CycValue cyc_root(const CycRing& R, long long e, long long c = 1);
CycValue cyc_add(const CycValue& x, const CycValue& y);
CycValue cyc_sub(const CycRing& R, const CycValue& x, const CycValue& y);
CycValue cyc_neg(const CycValue& x);
CycValue cyc_mul(const CycRing& R, const CycValue& x, const CycValue& y);
CycValue cyc_scale(const CycValue& x, long long c);
CycValue cyc_conj(const CycRing& R, const CycValue& x);

// dense accumulator for streamed sums; exponents are taken mod m
struct CycAccum {
  explicit CycAccum(const CycRing& R) : c(R.order(), 0) {}
  std::vector<long long> c;

  void add(const CycValue& v, long long scale = 1) {
    for (auto& [e, k] : v.t) c[e] += k * scale;
  }
  void add(const CycAccum& o) {
    for (size_t i = 0; i < c.size(); ++i) c[i] += o.c[i];
  }
};

// canonical tensor coordinates, row-major phi(p^a) x phi(m')
std::vector<long long> canonical(const CycRing& R, const CycValue& v);
std::vector<long long> canonical(const CycRing& R, const CycAccum& v);

bool cyc_is_zero(const CycRing& R, const CycValue& v);
bool cyc_equal(const CycRing& R, const CycValue& x, const CycValue& y);
// extracts c when the value is the rational integer c
std::optional<long long> cyc_as_integer(const CycRing& R, const CycValue& v);
std::optional<long long> cyc_as_integer(const CycRing& R, const CycAccum& v);

// all e with e * k = target (mod m); empty when unsolvable
std::vector<uint32_t> kth_root_exponents(const CycRing& R, uint64_t k, uint64_t target);

std::string cyc_str(const CycRing& R, const CycValue& v);

}  // namespace branchlab
