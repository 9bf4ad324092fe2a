#include "tfab/linalg.hpp"

#include <algorithm>
#include <utility>

namespace tfab {

QVec zero_vec(std::size_t n) { return QVec(n, Rat(0)); }

QVec unit_vec(std::size_t n, std::size_t i) {
  QVec v(n, Rat(0));
  v[i] = 1;
  return v;
}

bool is_zero(const QVec& v) {
  return std::all_of(v.begin(), v.end(), [](const Rat& x) { return x == 0; });
}

QMat identity(std::size_t n) {
  QMat m(n, QVec(n, Rat(0)));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

QMat transpose(const QMat& a, std::size_t cols) {
  if (!a.empty()) cols = a[0].size();
  QMat t(cols, QVec(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < cols; ++j) t[j][i] = a[i][j];
  return t;
}

QMat matmul(const QMat& a, const QMat& b) {
  if (a.empty()) return {};
  std::size_t inner = b.size();
  std::size_t cols = b.empty() ? 0 : b[0].size();
  QMat c(a.size(), QVec(cols, Rat(0)));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t k = 0; k < inner; ++k) {
      if (a[i][k] == 0) continue;
      for (std::size_t j = 0; j < cols; ++j) c[i][j] += a[i][k] * b[k][j];
    }
  return c;
}

QVec matvec(const QMat& a, const QVec& x) {
  QVec y(a.size(), Rat(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j)
      if (x[j] != 0) y[i] += a[i][j] * x[j];
  return y;
}

QVec combine(const QMat& vectors, const QVec& coeffs, std::size_t dim) {
  QVec y(dim, Rat(0));
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    if (coeffs[k] == 0) continue;
    for (std::size_t i = 0; i < dim; ++i) y[i] += coeffs[k] * vectors[k][i];
  }
  return y;
}

QVec add(const QVec& a, const QVec& b) {
  QVec c(a);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += b[i];
  return c;
}

QVec sub(const QVec& a, const QVec& b) {
  QVec c(a);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] -= b[i];
  return c;
}

QVec scale(const QVec& a, const Rat& s) {
  QVec c(a);
  for (auto& x : c) x *= s;
  return c;
}

Rat dot(const QVec& a, const QVec& b) {
  Rat s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

RowEchelon rref(QMat rows, std::size_t ncols) {
  RowEchelon out;
  std::size_t r = 0;
  for (std::size_t c = 0; c < ncols && r < rows.size(); ++c) {
    std::size_t piv = r;
    while (piv < rows.size() && rows[piv][c] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[r], rows[piv]);
    Rat inv = 1 / rows[r][c];
    for (auto& x : rows[r]) x *= inv;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][c] == 0) continue;
      Rat f = rows[i][c];
      for (std::size_t j = c; j < ncols; ++j) rows[i][j] -= f * rows[r][j];
    }
    out.pivots.push_back(c);
    ++r;
  }
  rows.resize(r);
  out.rows = std::move(rows);
  return out;
}

std::size_t rank(const QMat& rows, std::size_t ncols) { return rref(rows, ncols).pivots.size(); }

QMat nullspace(const QMat& a, std::size_t ncols) {
  RowEchelon e = rref(a, ncols);
  std::vector<bool> is_pivot(ncols, false);
  for (auto c : e.pivots) is_pivot[c] = true;
  QMat basis;
  for (std::size_t f = 0; f < ncols; ++f) {
    if (is_pivot[f]) continue;
    QVec v(ncols, Rat(0));
    v[f] = 1;
    for (std::size_t i = 0; i < e.pivots.size(); ++i) v[e.pivots[i]] = -e.rows[i][f];
    basis.push_back(std::move(v));
  }
  return basis;
}

std::optional<QVec> coordinates(const QMat& basis, const QVec& y) {
  std::size_t k = basis.size();
  std::size_t n = y.size();
  // Solve [basis^T | y].
  QMat aug(n, QVec(k + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) aug[i][j] = basis[j][i];
    aug[i][k] = y[i];
  }
  RowEchelon e = rref(std::move(aug), k + 1);
  QVec c(k, Rat(0));
  for (std::size_t i = 0; i < e.pivots.size(); ++i) {
    if (e.pivots[i] == k) return std::nullopt;
    c[e.pivots[i]] = e.rows[i][k];
  }
  return c;
}

std::optional<QMat> inverse(const QMat& a) {
  std::size_t n = a.size();
  QMat aug(n, QVec(2 * n, Rat(0)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug[i][j] = a[i][j];
    aug[i][n + i] = 1;
  }
  RowEchelon e = rref(std::move(aug), 2 * n);
  if (e.pivots.size() < n || e.pivots[n - 1] >= n) return std::nullopt;
  QMat inv(n, QVec(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv[i][j] = e.rows[i][n + j];
  return inv;
}

Rat det(QMat a) {
  std::size_t n = a.size();
  Rat d = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && a[piv][c] == 0) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      std::swap(a[piv], a[c]);
      d = -d;
    }
    d *= a[c][c];
    for (std::size_t i = c + 1; i < n; ++i) {
      if (a[i][c] == 0) continue;
      Rat f = a[i][c] / a[c][c];
      for (std::size_t j = c; j < n; ++j) a[i][j] -= f * a[c][j];
    }
  }
  return d;
}

QMat intersect_spans(const QMat& a, const QMat& b, std::size_t dim) {
  if (a.empty() || b.empty()) return {};
  // x = sum s_i a_i = sum t_j b_j  <=>  [a^T | -b^T] (s, t) = 0.
  std::size_t k = a.size() + b.size();
  QMat m(dim, QVec(k));
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < a.size(); ++j) m[i][j] = a[j][i];
    for (std::size_t j = 0; j < b.size(); ++j) m[i][a.size() + j] = -b[j][i];
  }
  QMat ns = nullspace(m, k);
  QMat vecs;
  for (const auto& st : ns) {
    QVec s(st.begin(), st.begin() + static_cast<long>(a.size()));
    vecs.push_back(combine(a, s, dim));
  }
  return rref(vecs, dim).rows;
}

bool span_contains(const QMat& basis, const QVec& y, std::size_t dim) {
  if (is_zero(y)) return true;
  if (basis.empty()) return false;
  QMat m = basis;
  m.push_back(y);
  return rank(m, dim) == rank(basis, dim);
}

ZVec to_int_primitive(const QVec& v) {
  Int l = 1;
  for (const auto& x : v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
  ZVec z(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) z[i] = v[i].get_num() * (l / v[i].get_den());
  Int g = content(z);
  if (g > 1)
    for (auto& x : z) x /= g;
  return z;
}

QVec to_rat(const ZVec& v) {
  QVec q(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) q[i] = v[i];
  return q;
}

QMat to_rat(const ZMat& m) {
  QMat q;
  q.reserve(m.size());
  for (const auto& r : m) q.push_back(to_rat(r));
  return q;
}

Int content(const ZVec& v) {
  Int g = 0;
  for (const auto& x : v) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
  return g;
}

ZMat hnf(ZMat rows, std::size_t ncols) {
  std::size_t r = 0;
  std::vector<std::size_t> pivcols;
  for (std::size_t c = 0; c < ncols && r < rows.size(); ++c) {
    for (;;) {
      // Row with smallest non-zero |entry| in column c among rows >= r.
      std::size_t best = rows.size();
      for (std::size_t i = r; i < rows.size(); ++i) {
        if (rows[i][c] == 0) continue;
        if (best == rows.size() || abs(rows[i][c]) < abs(rows[best][c])) best = i;
      }
      if (best == rows.size()) break;
      std::swap(rows[r], rows[best]);
      bool done = true;
      for (std::size_t i = r + 1; i < rows.size(); ++i) {
        if (rows[i][c] == 0) continue;
        Int q;
        mpz_fdiv_q(q.get_mpz_t(), rows[i][c].get_mpz_t(), rows[r][c].get_mpz_t());
        for (std::size_t j = c; j < ncols; ++j) rows[i][j] -= q * rows[r][j];
        if (rows[i][c] != 0) done = false;
      }
      if (done) break;
    }
    if (rows[r][c] == 0) continue;
    if (rows[r][c] < 0)
      for (auto& x : rows[r]) x = -x;
    for (std::size_t i = 0; i < r; ++i) {
      Int q;
      mpz_fdiv_q(q.get_mpz_t(), rows[i][c].get_mpz_t(), rows[r][c].get_mpz_t());
      if (q != 0)
        for (std::size_t j = c; j < ncols; ++j) rows[i][j] -= q * rows[r][j];
    }
    pivcols.push_back(c);
    ++r;
  }
  rows.resize(r);
  return rows;
}

namespace {

void swap_rows(ZMat& m, std::size_t i, std::size_t j) { std::swap(m[i], m[j]); }

void swap_cols(ZMat& m, std::size_t i, std::size_t j) {
  for (auto& row : m) std::swap(row[i], row[j]);
}

// row_i -= q * row_j
void row_sub(ZMat& m, std::size_t i, std::size_t j, const Int& q) {
  for (std::size_t k = 0; k < m[i].size(); ++k) m[i][k] -= q * m[j][k];
}

void col_sub(ZMat& m, std::size_t i, std::size_t j, const Int& q) {
  for (auto& row : m) row[i] -= q * row[j];
}

ZMat int_identity(std::size_t n) {
  ZMat m(n, ZVec(n, Int(0)));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

}  // namespace

SmithForm smith(const ZMat& a, std::size_t ncols) {
  std::size_t m = a.size();
  SmithForm s;
  s.d = a;
  for (auto& row : s.d) row.resize(ncols, Int(0));
  s.u = int_identity(m);
  s.v = int_identity(ncols);
  std::size_t t = 0;
  for (; t < std::min(m, ncols); ++t) {
    for (;;) {
      // Smallest non-zero entry in the trailing block.
      std::size_t bi = m, bj = ncols;
      for (std::size_t i = t; i < m; ++i)
        for (std::size_t j = t; j < ncols; ++j) {
          if (s.d[i][j] == 0) continue;
          if (bi == m || abs(s.d[i][j]) < abs(s.d[bi][bj])) {
            bi = i;
            bj = j;
          }
        }
      if (bi == m) break;
      swap_rows(s.d, t, bi);
      swap_rows(s.u, t, bi);
      swap_cols(s.d, t, bj);
      swap_cols(s.v, t, bj);
      bool clean = true;
      for (std::size_t i = t + 1; i < m; ++i) {
        if (s.d[i][t] == 0) continue;
        Int q;
        mpz_fdiv_q(q.get_mpz_t(), s.d[i][t].get_mpz_t(), s.d[t][t].get_mpz_t());
        row_sub(s.d, i, t, q);
        row_sub(s.u, i, t, q);
        if (s.d[i][t] != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < ncols; ++j) {
        if (s.d[t][j] == 0) continue;
        Int q;
        mpz_fdiv_q(q.get_mpz_t(), s.d[t][j].get_mpz_t(), s.d[t][t].get_mpz_t());
        col_sub(s.d, j, t, q);
        col_sub(s.v, j, t, q);
        if (s.d[t][j] != 0) clean = false;
      }
      if (clean) break;
    }
    bool any = false;
    for (std::size_t i = t; i < m && !any; ++i)
      for (std::size_t j = t; j < ncols; ++j)
        if (s.d[i][j] != 0) {
          any = true;
          break;
        }
    if (!any) break;
  }
  for (std::size_t i = 0; i < std::min(m, ncols); ++i) s.diag.push_back(s.d[i][i]);
  return s;
}

ZMat integer_kernel(const ZMat& a, std::size_t ncols) {
  if (a.empty()) {
    return int_identity(ncols);
  }
  SmithForm s = smith(a, ncols);
  ZMat out;
  for (std::size_t j = 0; j < ncols; ++j) {
    bool zero = j >= s.diag.size() || s.diag[j] == 0;
    if (!zero) continue;
    ZVec col(ncols);
    for (std::size_t i = 0; i < ncols; ++i) col[i] = s.v[i][j];
    out.push_back(std::move(col));
  }
  return out;
}

std::optional<ZVec> solve_integer(const ZMat& a, const ZVec& b, std::size_t ncols) {
  std::size_t m = a.size();
  SmithForm s = smith(a, ncols);
  // D z = U b, x = V z.
  ZVec ub(m, Int(0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < m; ++k) ub[i] += s.u[i][k] * b[k];
  ZVec z(ncols, Int(0));
  for (std::size_t i = 0; i < m; ++i) {
    Int d = i < s.diag.size() ? s.diag[i] : Int(0);
    if (d == 0) {
      if (ub[i] != 0) return std::nullopt;
      continue;
    }
    if (!mpz_divisible_p(ub[i].get_mpz_t(), d.get_mpz_t())) return std::nullopt;
    z[i] = ub[i] / d;
  }
  ZVec x(ncols, Int(0));
  for (std::size_t i = 0; i < ncols; ++i)
    for (std::size_t k = 0; k < ncols; ++k) x[i] += s.v[i][k] * z[k];
  return x;
}

ZMat lattice_saturate(const ZMat& vectors, std::size_t ambient_dim) {
  for (const auto& v : vectors)
    if (v.size() != ambient_dim) throw Error(ErrorCode::DimensionMismatch, "vector dimension");
  if (vectors.empty()) return {};
  QMat q = to_rat(vectors);
  QMat span = rref(q, ambient_dim).rows;
  if (span.empty()) return {};
  // Saturation = Z^n ∩ ker(N) where the rows of N span the orthogonal complement.
  QMat perp = nullspace(span, ambient_dim);
  ZMat n;
  for (const auto& r : perp) n.push_back(to_int_primitive(r));
  ZMat ker = integer_kernel(n, ambient_dim);
  return hnf(std::move(ker), ambient_dim);
}

std::vector<Prime> index_primes(const ZMat& vectors, std::size_t ncols) {
  if (vectors.empty()) return {};
  SmithForm s = smith(vectors, ncols);
  Int prod = 1;
  for (const auto& d : s.diag)
    if (d != 0) prod *= abs(d);
  std::vector<Prime> out;
  if (prod == 1) return out;
  for (const auto& f : prime_factors(prod)) out.push_back(to_prime(f));
  return out;
}

QMat local_span_basis(const QMat& gens, Prime p, std::size_t dim) {
  QMat rows;
  for (const auto& g : gens)
    if (!is_zero(g)) rows.push_back(g);
  QMat out;
  for (std::size_t c = 0; c < dim && !rows.empty(); ++c) {
    std::size_t best = rows.size();
    long bestv = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i][c] == 0) continue;
      long v = p_valuation(rows[i][c], p);
      if (best == rows.size() || v < bestv) {
        best = i;
        bestv = v;
      }
    }
    if (best == rows.size()) continue;
    QVec piv = std::move(rows[best]);
    rows.erase(rows.begin() + static_cast<long>(best));
    // Normalize the pivot entry to p^v (divide by a p-unit).
    Rat unit = piv[c];
    if (bestv >= 0)
      unit /= Rat(pow_int(p, static_cast<unsigned long>(bestv)));
    else
      unit *= Rat(pow_int(p, static_cast<unsigned long>(-bestv)));
    for (auto& x : piv) x /= unit;
    QMat next;
    for (auto& r : rows) {
      if (r[c] != 0) {
        Rat f = r[c] / piv[c];
        for (std::size_t j = c; j < dim; ++j) r[j] -= f * piv[j];
      }
      if (!is_zero(r)) next.push_back(std::move(r));
    }
    rows = std::move(next);
    out.push_back(std::move(piv));
  }
  return out;
}

LocalPreimage local_preimage(const QMat& c, std::size_t r, Prime p) {
  QMat a = c;
  std::size_t m = a.size();
  QMat w = identity(r);  // columns of w track the column operations
  std::vector<long> vals;
  std::size_t t = 0;
  for (; t < std::min(m, r); ++t) {
    std::size_t bi = m, bj = r;
    long bv = 0;
    for (std::size_t i = t; i < m; ++i)
      for (std::size_t j = t; j < r; ++j) {
        if (a[i][j] == 0) continue;
        long v = p_valuation(a[i][j], p);
        if (bi == m || v < bv) {
          bi = i;
          bj = j;
          bv = v;
        }
      }
    if (bi == m) break;
    std::swap(a[t], a[bi]);
    if (bj != t) {
      for (auto& row : a) std::swap(row[t], row[bj]);
      for (auto& row : w) std::swap(row[t], row[bj]);
    }
    const Rat piv = a[t][t];
    for (std::size_t i = t + 1; i < m; ++i) {
      if (a[i][t] == 0) continue;
      Rat f = a[i][t] / piv;
      for (std::size_t j = t; j < r; ++j) a[i][j] -= f * a[t][j];
    }
    for (std::size_t j = t + 1; j < r; ++j) {
      if (a[t][j] == 0) continue;
      Rat f = a[t][j] / piv;
      for (std::size_t i = t; i < m; ++i) a[i][j] -= f * a[i][t];
      for (std::size_t i = 0; i < r; ++i) w[i][j] -= f * w[i][t];
    }
    vals.push_back(bv);
  }
  LocalPreimage out;
  for (std::size_t j = 0; j < r; ++j) {
    QVec col(r);
    for (std::size_t i = 0; i < r; ++i) col[i] = w[i][j];
    if (j < vals.size()) {
      long d = vals[j];
      Rat s = d >= 0 ? Rat(1) / Rat(pow_int(p, static_cast<unsigned long>(d)))
                     : Rat(pow_int(p, static_cast<unsigned long>(-d)));
      out.lattice.push_back(scale(col, s));
    } else {
      out.divisible.push_back(std::move(col));
    }
  }
  return out;
}

namespace {

long min_valuation(const QMat& m, Prime p) {
  long best = 0;
  bool any = false;
  for (const auto& row : m)
    for (const auto& x : row) {
      if (x == 0) continue;
      long v = p_valuation(x, p);
      if (!any || v < best) best = v;
      any = true;
    }
  return best;
}

}  // namespace

QMat glue_local_lattices(std::size_t r, const std::vector<std::pair<Prime, QMat>>& bases) {
  if (r == 0) return {};
  Int q = 1;      // scaling that makes every local lattice p-integral
  Int mtot = 1;   // modulus for the congruence description
  struct Piece {
    Prime p;
    unsigned long c, e;
    const QMat* basis;
  };
  std::vector<Piece> pieces;
  for (const auto& [p, basis] : bases) {
    if (basis.size() != r) throw Error(ErrorCode::DimensionMismatch, "local basis must have full rank");
    auto inv = inverse(transpose(basis, r));
    if (!inv) throw Error(ErrorCode::DimensionMismatch, "local basis is singular");
    long c = std::max(0L, -min_valuation(basis, p));
    long a = std::max(0L, -min_valuation(*inv, p));
    pieces.push_back({p, static_cast<unsigned long>(c), static_cast<unsigned long>(a + c), &basis});
    q *= pow_int(p, static_cast<unsigned long>(c));
    mtot *= pow_int(p, static_cast<unsigned long>(a + c));
  }
  ZMat gens;
  for (std::size_t i = 0; i < r; ++i) {
    ZVec v(r, Int(0));
    v[i] = mtot;
    gens.push_back(std::move(v));
  }
  for (const auto& pc : pieces) {
    Int pe = pow_int(pc.p, pc.e);
    Int rest = mtot / pe;
    Int lift = pe == 1 ? Int(0) : rest * mod_inverse(rest, pe);
    for (const auto& b : *pc.basis) {
      ZVec g(r);
      for (std::size_t i = 0; i < r; ++i) {
        Int res = pe == 1 ? Int(0) : rat_mod(b[i] * q, pe);
        g[i] = mod_floor(res * lift, mtot);
      }
      gens.push_back(std::move(g));
    }
  }
  ZMat h = hnf(std::move(gens), r);
  QMat out;
  for (const auto& row : h) {
    QVec v(r);
    for (std::size_t i = 0; i < r; ++i) v[i] = Rat(row[i]) / Rat(q);
    for (auto& x : v) x.canonicalize();
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace tfab
