#include "tfab/homs.hpp"

#include <algorithm>
#include <numeric>

namespace tfab {

namespace {

Int lcm_den(const QVec& v) {
  Int l = 1;
  for (const auto& x : v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
  return l;
}

Int strip_primes(Int z, const std::set<Prime>& ps) {
  for (auto p : ps) {
    Int pp = static_cast<unsigned long>(p);
    mpz_remove(z.get_mpz_t(), z.get_mpz_t(), pp.get_mpz_t());
  }
  return z;
}

// c with sum c_i z_i = gcd(z); z not all zero.
ZVec bezout(const ZVec& z, Int& g) {
  ZVec c(z.size(), Int(0));
  g = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i] == 0) continue;
    if (g == 0) {
      g = abs(z[i]);
      c[i] = sgn(z[i]);
      continue;
    }
    Int ng, s, t;
    mpz_gcdext(ng.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), g.get_mpz_t(), z[i].get_mpz_t());
    for (std::size_t j = 0; j < i; ++j) c[j] *= s;
    c[i] = t;
    g = ng;
  }
  return c;
}

QVec generator_of_relation(const Relation& r) {
  QVec x(r.w.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = Rat(r.w[i]) / Rat(r.m);
    x[i].canonicalize();
  }
  return x;
}

// Residue of an S-integer s modulo h, where S inverts only primes coprime to h.
Int s_residue(const Rat& s, const Int& h) {
  if (h == 1) return 0;
  return mod_floor(s.get_num() * mod_inverse(s.get_den(), h), h);
}

QMat lattice_basis_at(const Group& g, Prime p) {
  auto it = g.model().local().find(p);
  if (it != g.model().local().end()) return it->second.lattice;
  return identity(g.rank());
}

}  // namespace

QMat SplittingFunctional::matrix() const {
  std::size_t n = functional.size();
  QMat m(n, QVec(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i][j] = line[i] * functional[j];
  return m;
}

HomLattice hom_lattice(const Group& g, const Characteristic& rho) {
  std::size_t n = g.rank();
  HomLattice out;
  for (const auto& [p, e] : rho.entries())
    if (e.is_inf()) out.inverted.insert(p);
  // Functionals vanish on Div_p(G) wherever the target has finite height.
  QMat div_rows;
  for (auto p : g.universe())
    if (!out.inverted.count(p))
      for (const auto& d : g.model().divisible_basis(p)) div_rows.push_back(d);
  QMat kq = div_rows.empty() ? identity(n) : nullspace(div_rows, n);
  if (kq.empty()) return out;
  ZMat kz;
  for (const auto& v : kq) kz.push_back(to_int_primitive(v));
  QMat kappa = to_rat(lattice_saturate(kz, n));
  std::size_t k = kappa.size();

  std::set<Prime> primes = g.universe();
  for (const auto& [p, e] : rho.entries()) primes.insert(p);
  std::vector<std::pair<Prime, QMat>> bases;
  for (auto p : primes) {
    ExtNat e = rho.at(p);
    if (e.is_inf()) continue;
    Rat scale_p(pow_int(p, e.value()));
    QMat c;
    for (const auto& b : lattice_basis_at(g, p)) {
      QVec row(k);
      for (std::size_t j = 0; j < k; ++j) row[j] = dot(kappa[j], b) * scale_p;
      c.push_back(std::move(row));
    }
    LocalPreimage pre = local_preimage(c, k, p);
    if (!pre.divisible.empty()) throw Error(ErrorCode::PreconditionViolated, "degenerate functional space");
    bases.emplace_back(p, std::move(pre.lattice));
  }
  for (const auto& t : glue_local_lattices(k, bases)) out.basis.push_back(combine(kappa, t, n));
  return out;
}

std::optional<SplittingFunctional> baer_split(const Group& g, const Element& x) {
  std::size_t n = g.rank();
  if (x.size() != n) throw Error(ErrorCode::DimensionMismatch, "element has wrong length");
  if (is_zero(x)) throw Error(ErrorCode::ZeroElement, "cannot split off the zero line");
  if (!g.member(x)) throw Error(ErrorCode::NotMember, "element is not a member");

  // Cheap necessary condition before purifying: some functional killing the relevant
  // divisible parts must be non-zero on x.
  TypeClass tau = g.type_of(x);
  QMat div_rows;
  for (auto p : g.universe())
    if (!tau.contains(p))
      for (const auto& d : g.model().divisible_basis(p)) div_rows.push_back(d);
  if (!div_rows.empty()) {
    QMat kq = nullspace(div_rows, n);
    bool nonzero = false;
    for (const auto& kv : kq) nonzero = nonzero || dot(kv, x) != 0;
    if (!nonzero) return std::nullopt;
  }

  Group r = purify(g, {x});
  Element line = *g.to_coords(r.base()[0].direction);
  HomLattice homs = hom_lattice(g, r.base()[0].chi);
  std::size_t k = homs.basis.size();
  if (k == 0) return std::nullopt;
  const std::set<Prime>& inf_primes = homs.inverted;

  // Solve sum_i s_i mu_i(line) = 1 with s over Z[1/inverted].
  QVec z(k);
  for (std::size_t i = 0; i < k; ++i) z[i] = dot(homs.basis[i], line);
  Int den = lcm_den(z);
  ZVec zi(k);
  for (std::size_t i = 0; i < k; ++i) zi[i] = z[i].get_num() * (den / z[i].get_den());
  Int gz;
  ZVec c = bezout(zi, gz);
  if (gz == 0 || strip_primes(gz, inf_primes) != 1) return std::nullopt;
  QVec s(k);
  for (std::size_t i = 0; i < k; ++i) {
    s[i] = Rat(c[i] * den) / Rat(gz);
    s[i].canonicalize();
  }

  // Canonical representative modulo the solutions of the homogeneous system.
  ZMat kernel = hnf(integer_kernel({zi}, k), k);
  for (const auto& row : kernel) {
    std::size_t j = 0;
    while (row[j] == 0) ++j;
    Int h = strip_primes(abs(row[j]), inf_primes);
    Rat rem(s_residue(s[j], h));
    Rat q = (s[j] - rem) / Rat(row[j]);
    q.canonicalize();
    for (std::size_t i = 0; i < k; ++i) s[i] -= q * Rat(row[i]);
  }

  QVec mu = combine(homs.basis, s, n);
  SplittingFunctional f{std::move(r), std::move(line), std::move(mu)};
  return f;
}

void verify_functional(const Group& g, const SplittingFunctional& f) {
  std::size_t n = g.rank();
  auto fail = [](const std::string& why) { throw Error(ErrorCode::InvalidFunctional, why); };
  if (f.functional.size() != n || f.line.size() != n) fail("dimension mismatch");
  if (f.target.rank() != 1 || f.target.ambient_dim() != g.ambient_dim()) fail("target is not a rank-1 subgroup of the ambient");
  if (dot(f.functional, f.line) != 1) fail("restriction to the target is not the identity");
  auto line_r = f.target.to_coords(g.to_ambient(f.line));
  if (!line_r) fail("line is not inside the target");
  auto image_ok = [&](const QVec& y) {
    Rat v = dot(f.functional, y);
    return f.target.member(scale(*line_r, v));
  };
  for (std::size_t i = 0; i < n; ++i) {
    QVec gen = base_generator(g, i);
    if (!image_ok(gen)) fail("image of base generator " + std::to_string(i) + " leaves the target");
    if (f.functional[i] == 0) continue;
    for (const auto& [p, e] : g.base()[i].chi.entries())
      if (e.is_inf() && !f.target.base()[0].chi.at(p).is_inf())
        fail("image of a " + std::to_string(p) + "-divisible direction is not divisible");
  }
  for (const auto& rel : g.relations())
    if (!image_ok(generator_of_relation(rel))) fail("image of a relation generator leaves the target");
}

Group kernel_presentation(const Group& g, const SplittingFunctional& f) {
  verify_functional(g, f);
  QMat ker = nullspace({f.functional}, g.rank());
  Group k = ker.empty() ? Group::zero(g.ambient_dim()) : subgroup_on_subspace(g, ker);
  if (!equal_subgroups(internal_sum({f.target, k}), g)) throw Error(ErrorCode::InvalidFunctional, "target and kernel do not span G");
  return k;
}

QMat EndDescription::to_matrix(const QVec& coeffs) const {
  QMat m(rank, QVec(rank, Rat(0)));
  for (std::size_t u = 0; u < units.size(); ++u) m[units[u].first][units[u].second] = coeffs[u];
  return m;
}

bool EndDescription::contains(const QMat& m) const {
  if (m.size() != rank) throw Error(ErrorCode::DimensionMismatch, "matrix size");
  QVec coeffs(units.size());
  std::vector<std::vector<bool>> allowed(rank, std::vector<bool>(rank, false));
  for (std::size_t u = 0; u < units.size(); ++u) {
    allowed[units[u].first][units[u].second] = true;
    coeffs[u] = m[units[u].first][units[u].second];
  }
  for (std::size_t i = 0; i < rank; ++i)
    for (std::size_t j = 0; j < rank; ++j)
      if (!allowed[i][j] && m[i][j] != 0) return false;
  return units.empty() || model.contains(coeffs);
}

EndDescription end_integrality_basis(const Group& g, std::size_t rank_cap) {
  std::size_t n = g.rank();
  if (n > rank_cap) throw Error(ErrorCode::RankCapExceeded, "rank " + std::to_string(n) + " exceeds cap " + std::to_string(rank_cap));
  EndDescription out;
  out.rank = n;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (type_le(g.base_type(j), g.base_type(i))) out.units.emplace_back(i, j);
  std::size_t k = out.units.size();
  out.model = LocalModel(k);
  if (k == 0) return out;
  for (const auto& [p, ld] : g.model().local()) {
    QMat c;
    for (const auto& b : ld.lattice)
      for (std::size_t l = ld.divisible.size(); l < n; ++l) {
        QVec row(k);
        for (std::size_t u = 0; u < k; ++u) row[u] = b[out.units[u].second] * ld.coord[l][out.units[u].first];
        c.push_back(std::move(row));
      }
    LocalPreimage pre = c.empty() ? LocalPreimage{identity(k), {}} : local_preimage(c, k, p);
    out.model.set_local(p, std::move(pre.divisible), std::move(pre.lattice));
  }
  out.lattice = out.model.integral_basis();
  return out;
}

bool is_idempotent_endomorphism(const Group& g, const QMat& e) {
  std::size_t n = g.rank();
  if (e.size() != n) throw Error(ErrorCode::DimensionMismatch, "matrix size");
  if (matmul(e, e) != e) return false;
  for (std::size_t i = 0; i < n; ++i) {
    QVec y = matvec(e, base_generator(g, i));
    if (!g.member(y)) return false;
    if (is_zero(y)) continue;
    for (const auto& [p, ex] : g.base()[i].chi.entries())
      if (ex.is_inf() && !g.model().divisible_at(y, p)) return false;
  }
  for (const auto& rel : g.relations())
    if (!g.member(matvec(e, generator_of_relation(rel)))) return false;
  return true;
}

IdempotentReport idempotent_search(const Group& g, unsigned bound, std::size_t rank_cap) {
  std::size_t n = g.rank();
  if (n > rank_cap) throw Error(ErrorCode::RankCapExceeded, "rank " + std::to_string(n) + " exceeds cap " + std::to_string(rank_cap));
  IdempotentReport rep;
  rep.bound = bound;
  rep.exhaustive_for_lines = n <= 3;
  rep.idempotents.push_back(QMat(n, QVec(n, Rat(0))));
  rep.idempotents.push_back(identity(n));
  if (n <= 1) return rep;
  auto add = [&](QMat m) {
    if (std::find(rep.idempotents.begin(), rep.idempotents.end(), m) == rep.idempotents.end()) rep.idempotents.push_back(std::move(m));
  };
  long b = bound;
  for (long norm = 1; norm <= b; ++norm) {
    std::vector<long> v(n, -norm);
    while (true) {
      long mx = 0;
      for (auto c : v) mx = std::max(mx, std::labs(c));
      std::size_t first = 0;
      while (first < n && v[first] == 0) ++first;
      long gg = 0;
      for (auto c : v) gg = std::gcd(gg, std::labs(c));
      if (mx == norm && first < n && v[first] > 0 && gg == 1) {
        QVec x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = v[i];
        std::optional<SplittingFunctional> f;
        try {
          f = baer_split(g, x);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::OutsideRepresentationClass) throw;
        }
        if (f) {
          QMat e = f->matrix();
          QMat c = identity(n);
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) c[i][j] -= e[i][j];
          add(std::move(e));
          add(std::move(c));
        }
      }
      std::size_t i = 0;
      while (i < n && v[i] == norm) v[i++] = -norm;
      if (i == n) break;
      ++v[i];
    }
  }
  return rep;
}

namespace {

void check_decomposition(const Group& g, const Decomposition& d, const char* label) {
  Group sum = internal_sum({d.a, d.h});
  if (!equal_subgroups(sum, g)) throw Error(ErrorCode::NotADecomposition, std::string(label) + " does not sum to G");
}

void check_homogeneous(const Group& a, const char* label) {
  if (!a.relations().empty()) throw Error(ErrorCode::NotHomogeneous, std::string(label) + " is not presented as completely decomposable");
  for (std::size_t i = 1; i < a.rank(); ++i)
    if (a.base_type(i) != a.base_type(0)) throw Error(ErrorCode::NotHomogeneous, std::string(label) + " has mixed types");
}

// Projection onto `h` along `a`, restricted to `src`, in base coordinates.
QMat projection_matrix(const Group& a, const Group& h, const Group& src) {
  QMat stacked = a.directions();
  for (const auto& d : h.directions()) stacked.push_back(d);
  QMat m(h.rank(), QVec(src.rank()));
  for (std::size_t j = 0; j < src.rank(); ++j) {
    auto c = coordinates(stacked, src.base()[j].direction);
    for (std::size_t i = 0; i < h.rank(); ++i) m[i][j] = (*c)[a.rank() + i];
  }
  return m;
}

}  // namespace

MonoWitness mono_equivalence_witness(const Group& g, const Decomposition& d1, const Decomposition& d2) {
  check_decomposition(g, d1, "first decomposition");
  check_decomposition(g, d2, "second decomposition");
  check_homogeneous(d1.a, "first completely decomposable summand");
  check_homogeneous(d2.a, "second completely decomposable summand");
  MonoWitness w;
  w.h2_to_h = projection_matrix(d1.a, d1.h, d2.h);
  w.h_to_h2 = projection_matrix(d2.a, d2.h, d1.h);
  bool inj1 = d2.h.rank() == 0 || tfab::rank(w.h2_to_h, d2.h.rank()) == d2.h.rank();
  bool inj2 = d1.h.rank() == 0 || tfab::rank(w.h_to_h2, d1.h.rank()) == d1.h.rank();
  if (!inj1) w.failure = "projection of the second complement into the first is not injective";
  else if (!inj2) w.failure = "projection of the first complement into the second is not injective";
  w.ok = inj1 && inj2;
  return w;
}

}  // namespace tfab
