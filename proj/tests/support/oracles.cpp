#include "oracles.hpp"

#include <algorithm>
#include <numeric>

namespace branchlab::oracle {

namespace {

// linear algebra mod ell
struct Fp {
  uint64_t ell;
  uint64_t add(uint64_t a, uint64_t b) const { return (a + b) % ell; }
  uint64_t sub(uint64_t a, uint64_t b) const { return (a + ell - b % ell) % ell; }
  uint64_t mul(uint64_t a, uint64_t b) const { return a * b % ell; }
  uint64_t pow(uint64_t a, uint64_t e) const {
    uint64_t r = 1;
    a %= ell;
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }
  uint64_t inv(uint64_t a) const { return pow(a, ell - 2); }
};

using Vec = std::vector<uint64_t>;
using Mat = std::vector<Vec>;

// solves the echelon reduction of rows in place, returns the rank
size_t echelon(const Fp& P, Mat& rows) {
  size_t rank = 0, cols = rows.empty() ? 0 : rows[0].size();
  for (size_t c = 0; c < cols && rank < rows.size(); ++c) {
    size_t piv = rank;
    while (piv < rows.size() && rows[piv][c] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[rank], rows[piv]);
    uint64_t s = P.inv(rows[rank][c]);
    for (auto& x : rows[rank]) x = P.mul(x, s);
    for (size_t r = 0; r < rows.size(); ++r) {
      if (r == rank || rows[r][c] == 0) continue;
      uint64_t f = rows[r][c];
      for (size_t cc = 0; cc < cols; ++cc) rows[r][cc] = P.sub(rows[r][cc], P.mul(f, rows[rank][cc]));
    }
    ++rank;
  }
  rows.resize(rank);
  return rank;
}

// kernel basis of the square matrix M (rows = relations)
Mat kernel(const Fp& P, Mat M) {
  size_t n = M.empty() ? 0 : M[0].size();
  // track pivots
  Mat rows = M;
  echelon(P, rows);
  std::vector<int> pivot_col;
  std::vector<bool> is_pivot(n, false);
  for (auto& r : rows) {
    for (size_t c = 0; c < n; ++c)
      if (r[c] != 0) {
        pivot_col.push_back(int(c));
        is_pivot[c] = true;
        break;
      }
  }
  Mat out;
  for (size_t fc = 0; fc < n; ++fc) {
    if (is_pivot[fc]) continue;
    Vec v(n, 0);
    v[fc] = 1;
    for (size_t r = 0; r < rows.size(); ++r) v[pivot_col[r]] = P.sub(0, rows[r][fc]);
    out.push_back(v);
  }
  return out;
}

uint64_t find_primitive_root(const Fp& P) {
  uint64_t n = P.ell - 1;
  std::vector<uint64_t> primes;
  uint64_t t = n;
  for (uint64_t d = 2; d * d <= t; ++d)
    while (t % d == 0) {
      primes.push_back(d);
      while (t % d == 0) t /= d;
    }
  if (t > 1) primes.push_back(t);
  std::sort(primes.begin(), primes.end());
  primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
  for (uint64_t z = 2; z < P.ell; ++z) {
    bool ok = true;
    for (uint64_t d : primes)
      if (P.pow(z, n / d) == 1) {
        ok = false;
        break;
      }
    if (ok) return z;
  }
  fail("no primitive root found");
}

}  // namespace

SmallGroupTable residue_character_table(ClassCtx& X) {
  const FieldParams& F = X.G.F;
  const ResidueClasses& rc = residue_classes(X);
  const auto& el = rc.elems;
  size_t r = rc.classes.size();
  size_t n = el.size();

  std::unordered_map<Key, int, KeyHash> index;
  for (size_t i = 0; i < n; ++i) index.emplace(gkey(F, el[i], 1), int(i));
  auto elem_index = [&](const GElem& g) { return index.at(gkey(F, g, 1)); };

  // element orders and the group exponent
  std::vector<unsigned> order_of(n);
  unsigned exponent = 1;
  for (size_t i = 0; i < n; ++i) {
    GElem x = el[i];
    unsigned k = 1;
    while (!gequal_at(F, x, gid(F), 1)) {
      x = gmul(F, x, el[i]);
      ++k;
    }
    order_of[i] = k;
    exponent = unsigned(std::lcm(exponent, k));
  }
  require(X.R.order() % exponent == 0, "ring order must contain the group exponent");

  // class multiplication coefficients a_{ijk}
  std::vector<std::vector<std::vector<uint64_t>>> a(
      r, std::vector<std::vector<uint64_t>>(r, std::vector<uint64_t>(r, 0)));
  for (size_t xi = 0; xi < n; ++xi)
    for (size_t yi = 0; yi < n; ++yi) {
      int k = rc.class_of_elem[elem_index(gmul(F, el[xi], el[yi]))];
      a[rc.class_of_elem[xi]][rc.class_of_elem[yi]][k]++;
    }
  for (size_t i = 0; i < r; ++i)
    for (size_t j = 0; j < r; ++j)
      for (size_t k = 0; k < r; ++k) {
        require(a[i][j][k] % rc.classes[k].size() == 0, "class algebra constants not integral");
        a[i][j][k] /= rc.classes[k].size();
      }

  // prime with ell = 1 mod exponent, large enough to separate degrees
  uint64_t ell = exponent + 1;
  auto is_prime = [](uint64_t v) {
    if (v < 2) return false;
    for (uint64_t d = 2; d * d <= v; ++d)
      if (v % d == 0) return false;
    return true;
  };
  while (!is_prime(ell) || ell * ell < 4 * n) ell += exponent;
  Fp P{ell};

  // common eigenvectors of the matrices (B_i)_{j,k} = a_{ijk}
  std::vector<Mat> B(r, Mat(r, Vec(r, 0)));
  for (size_t i = 0; i < r; ++i)
    for (size_t j = 0; j < r; ++j)
      for (size_t k = 0; k < r; ++k) B[i][j][k] = a[i][j][k] % ell;

  std::vector<Mat> spaces = {Mat()};
  {
    Mat full;
    for (size_t i = 0; i < r; ++i) {
      Vec v(r, 0);
      v[i] = 1;
      full.push_back(v);
    }
    spaces[0] = full;
  }
  for (size_t i = 0; i < r; ++i) {
    std::vector<Mat> next;
    for (Mat& W : spaces) {
      if (W.size() == 1) {
        next.push_back(W);
        continue;
      }
      // split W into eigenspaces of B_i by brute force over the eigenvalues;
      // the class-sum matrices are simultaneously diagonalizable, so the
      // pieces exhaust W
      size_t dim = W.size();
      size_t covered = 0;
      for (uint64_t lam = 0; lam < ell && covered < dim; ++lam) {
        Mat img(dim, Vec(r, 0));
        for (size_t b = 0; b < dim; ++b)
          for (size_t j = 0; j < r; ++j) {
            uint64_t s = 0;
            for (size_t k = 0; k < r; ++k) s = P.add(s, P.mul(B[i][j][k], W[b][k]));
            img[b][j] = P.sub(s, P.mul(lam % ell, W[b][j]));
          }
        // combinations x with sum_b x_b img[b] = 0
        Mat rows(r, Vec(dim, 0));
        for (size_t j = 0; j < r; ++j)
          for (size_t b = 0; b < dim; ++b) rows[j][b] = img[b][j];
        Mat ker = kernel(P, rows);
        if (ker.empty()) continue;
        Mat sub;
        for (auto& coeff : ker) {
          Vec v(r, 0);
          for (size_t b = 0; b < dim; ++b)
            for (size_t j = 0; j < r; ++j) v[j] = P.add(v[j], P.mul(coeff[b], W[b][j]));
          sub.push_back(v);
        }
        covered += sub.size();
        next.push_back(std::move(sub));
      }
      require(covered == dim, "eigen decomposition incomplete");
    }
    spaces = std::move(next);
    bool all_lines = std::all_of(spaces.begin(), spaces.end(),
                                 [](const Mat& W) { return W.size() == 1; });
    if (all_lines) break;
  }
  require(spaces.size() == r, "wrong number of common eigenvectors");

  // normalize eigenvectors at the identity class and recover degrees
  int id_class = rc.class_of_elem[elem_index(gid(F))];
  std::vector<int> inverse_class(r);
  for (size_t c = 0; c < r; ++c)
    inverse_class[c] = rc.class_of_elem[elem_index(ginv(F, el[rc.classes[c][0]]))];

  uint64_t z = find_primitive_root(P);
  uint64_t om_exp = P.pow(z, (ell - 1) / exponent);  // fixed exponent-th root of unity

  SmallGroupTable T;
  T.class_of_elem = rc.class_of_elem;
  for (Mat& W : spaces) {
    Vec w = W[0];
    require(w[id_class] != 0, "eigenvector vanishes at the identity class");
    uint64_t s = P.inv(w[id_class]);
    for (auto& x : w) x = P.mul(x, s);
    // degree from the orthogonality relation
    uint64_t denom = 0;
    for (size_t c = 0; c < r; ++c)
      denom = P.add(denom, P.mul(P.mul(w[c], w[inverse_class[c]]), P.inv(rc.classes[c].size() % ell)));
    uint64_t d2 = P.mul(n % ell, P.inv(denom));
    long deg = -1;
    for (long d = 1; uint64_t(d) * uint64_t(d) <= n; ++d)
      if (P.mul(uint64_t(d), uint64_t(d)) == d2) {
        deg = d;
        break;
      }
    require(deg > 0, "no integral degree matches the eigenvector");
    // character values mod ell
    Vec chi_mod(r);
    for (size_t c = 0; c < r; ++c)
      chi_mod[c] = P.mul(P.mul(uint64_t(deg), w[c]), P.inv(rc.classes[c].size() % ell));
    // exact lift through power maps
    std::vector<CycValue> vals(r);
    for (size_t c = 0; c < r; ++c) {
      int rep = rc.classes[c][0];
      unsigned nj = order_of[rep];
      uint64_t om = P.pow(om_exp, exponent / nj);  // fixed nj-th root of unity mod ell
      CycValue v = cyc_zero();
      for (unsigned t = 0; t < nj; ++t) {
        // m_t = (1/nj) sum_u chi(g^u) om^{-tu}
        uint64_t s2 = 0;
        GElem pw = gid(F);
        for (unsigned u = 0; u < nj; ++u) {
          int cu = rc.class_of_elem[elem_index(pw)];
          s2 = P.add(s2, P.mul(chi_mod[cu], P.pow(P.inv(om), uint64_t(t) * u % nj)));
          pw = gmul(F, pw, el[rep]);
        }
        uint64_t mt = P.mul(s2, P.inv(nj % ell));
        require(mt <= uint64_t(deg), "multiplicity lift out of range");
        if (mt)
          v = cyc_add(v, cyc_root(X.R, int64_t(uint64_t(X.R.order()) / nj * t), int64_t(mt)));
      }
      vals[c] = v;
    }
    T.degrees.push_back(deg);
    T.values.push_back(std::move(vals));
  }
  // sum of squares of degrees is the group order
  long sum = 0;
  for (long d : T.degrees) sum += d * d;
  require(uint64_t(sum) == n, "degrees do not satisfy the order relation");
  return T;
}

std::vector<int> cuspidal_indices(ClassCtx& X, const SmallGroupTable& T) {
  const FieldParams& F = X.G.F;
  const ResidueClasses& rc = residue_classes(X);
  std::unordered_map<Key, int, KeyHash> index;
  for (size_t i = 0; i < rc.elems.size(); ++i) index.emplace(gkey(F, rc.elems[i], 1), int(i));

  // central and unipotent-radical elements of the residue group
  std::vector<GElem> centrals, unis;
  for (const GElem& g : rc.elems) {
    if (is_zero_at(F, g.e[1], 1) && is_zero_at(F, g.e[2], 1) &&
        is_zero_at(F, sub(F, g.e[0], g.e[3]), 1))
      centrals.push_back(g);
    if (is_zero_at(F, g.e[2], 1) && is_zero_at(F, sub(F, g.e[0], scalar(1)), 1) &&
        is_zero_at(F, sub(F, g.e[3], scalar(1)), 1))
      unis.push_back(g);
  }
  require(centrals.size() == F.q + 1 && unis.size() == F.q, "residue subgroup sizes wrong");

  std::vector<int> out;
  for (size_t i = 0; i < T.values.size(); ++i) {
    bool cuspidal = true;
    for (const GElem& z : centrals) {
      CycValue s = cyc_zero();
      for (const GElem& u : unis) {
        int e = index.at(gkey(F, gmul(F, z, u), 1));
        s = cyc_add(s, T.values[i][T.class_of_elem[e]]);
      }
      if (!cyc_is_zero(X.R, s)) {
        cuspidal = false;
        break;
      }
    }
    if (cuspidal) out.push_back(int(i));
  }
  return out;
}

}  // namespace branchlab::oracle
