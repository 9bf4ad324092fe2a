#include "tfab/decomp.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace tfab {

namespace {

std::vector<TypeClass> candidate_types(const Group& g) {
  std::set<TypeClass> closure;
  for (std::size_t i = 0; i < g.rank(); ++i) closure.insert(g.base_type(i));
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<TypeClass> cur(closure.begin(), closure.end());
    for (std::size_t i = 0; i < cur.size(); ++i)
      for (std::size_t j = i + 1; j < cur.size(); ++j)
        grew = closure.insert(type_meet(cur[i], cur[j])).second || grew;
  }
  std::vector<TypeClass> out(closure.begin(), closure.end());
  std::stable_sort(out.begin(), out.end(), [](const TypeClass& a, const TypeClass& b) {
    return a.inf_primes().size() > b.inf_primes().size();
  });
  return out;
}

// Primitive integer vectors on `support` with max-norm exactly `norm` and first non-zero entry positive.
std::vector<QVec> norm_shell(std::size_t n, const std::vector<std::size_t>& support, long norm) {
  std::vector<QVec> out;
  std::size_t d = support.size();
  std::vector<long> v(d, -norm);
  while (true) {
    long mx = 0, gg = 0;
    for (auto c : v) {
      mx = std::max(mx, std::labs(c));
      gg = std::gcd(gg, std::labs(c));
    }
    std::size_t first = 0;
    while (first < d && v[first] == 0) ++first;
    if (mx == norm && first < d && v[first] > 0 && gg == 1) {
      QVec x(n, Rat(0));
      for (std::size_t i = 0; i < d; ++i) x[support[i]] = v[i];
      out.push_back(std::move(x));
    }
    std::size_t i = d;
    while (i > 0 && v[i - 1] == norm) v[--i] = -norm;
    if (i == 0) break;
    ++v[i - 1];
  }
  return out;
}

}  // namespace

std::optional<Extraction> extract_rank1(const Group& g, const ExtractOptions& opt, std::size_t* examined) {
  std::size_t n = g.rank();
  if (n == 0) return std::nullopt;
  std::mt19937_64 rng(opt.seed);
  for (const auto& s : candidate_types(g)) {
    if (opt.only_type && *opt.only_type != s) continue;
    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < n; ++i)
      if (type_le(s, g.base_type(i))) support.push_back(i);
    QMat div_rows;
    for (auto p : g.universe())
      if (!s.contains(p))
        for (const auto& d : g.model().divisible_basis(p)) div_rows.push_back(d);
    QMat kq = div_rows.empty() ? identity(n) : nullspace(div_rows, n);
    if (kq.empty()) continue;
    for (long norm = 1; norm <= static_cast<long>(opt.bound); ++norm) {
      std::vector<QVec> shell;
      for (auto& x : norm_shell(n, support, norm)) {
        TypeClass t;
        bool first = true;
        for (std::size_t i = 0; i < n; ++i) {
          if (x[i] == 0) continue;
          t = first ? g.base_type(i) : type_meet(t, g.base_type(i));
          first = false;
        }
        if (t != s) continue;
        bool visible = false;
        for (const auto& k : kq) visible = visible || dot(k, x) != 0;
        if (visible) shell.push_back(std::move(x));
      }
      if (opt.seed != 0) std::shuffle(shell.begin(), shell.end(), rng);
      for (const auto& x : shell) {
        if (examined) ++*examined;
        try {
          auto f = baer_split(g, x);
          if (!f) continue;
          Group comp = kernel_presentation(g, *f);
          TypeClass type = type_of_char(f->target.base()[0].chi);
          return Extraction{g, x, std::move(*f), std::move(comp), std::move(type)};
        } catch (const Error& e) {
          if (e.code() != ErrorCode::OutsideRepresentationClass) throw;
        }
      }
    }
  }
  return std::nullopt;
}

DecompositionReport main_decomposition(const Group& g, unsigned bound, std::uint64_t seed) {
  DecompositionReport r;
  r.bound = bound;
  r.seed = seed;
  Group cur = g;
  ExtractOptions opt{bound, seed, std::nullopt};
  while (auto e = extract_rank1(cur, opt, &r.candidates_examined)) {
    r.cd_types.push_back(e->type);
    cur = e->complement;
    r.summands.push_back(std::move(*e));
  }
  std::sort(r.cd_types.begin(), r.cd_types.end());
  r.complement = cur;
  r.complement_rank = cur.rank();
  return r;
}

bool verify_report(const Group& g, const DecompositionReport& r) {
  std::vector<Group> parts;
  for (const auto& e : r.summands) {
    try {
      verify_functional(e.host, e.f);
    } catch (const Error&) {
      return false;
    }
    parts.push_back(e.f.target);
  }
  parts.push_back(r.complement);
  if (r.summands.size() + r.complement_rank != g.rank()) return false;
  try {
    return equal_subgroups(internal_sum(parts), g);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotADecomposition) return false;
    throw;
  }
}

ClippedCertificate is_clipped(const Group& g, unsigned bound, std::optional<TypeClass> only_type) {
  ClippedCertificate c;
  c.bound = bound;
  c.witness = extract_rank1(g, ExtractOptions{bound, 0, std::move(only_type)}, &c.candidates_examined);
  c.clipped_within_bound = !c.witness;
  return c;
}

bool cd_iso_test(const DecompositionReport& r1, const DecompositionReport& r2) {
  TypeMultiset a = r1.cd_types, b = r2.cd_types;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

SteinDecomposition stein_socle_decomposition(const Group& g, const TypeClass& tau) {
  SteinDecomposition out;
  out.socle = socle(g, tau);
  const Group& s = out.socle;
  Group zero = Group::zero(g.ambient_dim());
  if (s.rank() == 0) {
    out.k = out.b = zero;
    return out;
  }
  std::size_t r = s.rank();

  QMat w;
  for (auto p : s.universe())
    if (!tau.contains(p))
      for (const auto& d : s.model().divisible_basis(p)) w.push_back(d);
  out.k = w.empty() || tfab::rank(w, r) == 0 ? zero : subgroup_on_subspace(s, w);

  Characteristic rho;
  for (auto p : tau.inf_primes()) rho.set(p, ExtNat::inf());
  HomLattice homs = hom_lattice(s, rho);
  std::size_t m = homs.basis.size();
  if (m == 0) {
    out.b = zero;
  } else {
    // Solve alpha(b_j) = e_j with b_j in the Z[1/tau]-span of an integral basis of G(tau).
    QMat lam = s.model().integral_basis();
    QMat y(m, QVec(r));
    Int den = 1;
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t l = 0; l < r; ++l) {
        y[j][l] = dot(homs.basis[j], lam[l]);
        mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), y[j][l].get_den_mpz_t());
      }
    ZMat yz(m, ZVec(r));
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t l = 0; l < r; ++l) yz[j][l] = y[j][l].get_num() * (den / y[j][l].get_den());
    SmithForm sf = smith(yz, r);
    auto unit_in_ring = [&](Int d) {
      for (auto p : tau.inf_primes()) {
        Int pp = static_cast<unsigned long>(p);
        mpz_remove(d.get_mpz_t(), d.get_mpz_t(), pp.get_mpz_t());
      }
      return abs(d) == 1;
    };
    if (sf.diag.size() < m) throw Error(ErrorCode::PreconditionViolated, "socle quotient has too small rank");
    for (std::size_t i = 0; i < m; ++i)
      if (sf.diag[i] == 0 || !unit_in_ring(sf.diag[i])) throw Error(ErrorCode::PreconditionViolated, "socle quotient is not free over the type ring");
    std::vector<BaseLine> lines;
    for (std::size_t j = 0; j < m; ++j) {
      QVec yv(r, Rat(0));
      for (std::size_t i = 0; i < m; ++i) {
        yv[i] = Rat(sf.u[i][j] * den) / Rat(sf.diag[i]);
        yv[i].canonicalize();
      }
      QVec c(r, Rat(0));
      for (std::size_t l = 0; l < r; ++l)
        for (std::size_t i = 0; i < r; ++i) c[l] += Rat(sf.v[l][i]) * yv[i];
      QVec bj = combine(lam, c, r);
      lines.push_back({s.to_ambient(bj), rho});
    }
    out.b = Group::make(g.ambient_dim(), std::move(lines), {});
  }
  if (!equal_subgroups(internal_sum({out.k, out.b}), s))
    throw Error(ErrorCode::NotADecomposition, "socle complement does not reassemble G(tau)");
  return out;
}

bool tau_clipped_sum_check(const Group& a, const Group& b, const TypeClass& tau, unsigned bound) {
  if (!a.relations().empty()) throw Error(ErrorCode::PreconditionViolated, "A must be presented as completely decomposable");
  for (std::size_t i = 0; i < a.rank(); ++i)
    if (a.base_type(i) == tau) throw Error(ErrorCode::PreconditionViolated, "A has a direction of type " + tau.str());
  if (!is_clipped(b, bound, tau).clipped_within_bound) throw Error(ErrorCode::PreconditionViolated, "B has a rank-1 summand of type " + tau.str());
  Group sum = direct_sum(a, b);
  return !is_clipped(sum, bound, tau).clipped_within_bound;
}

}  // namespace tfab
