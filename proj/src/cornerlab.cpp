#include "tfab/cornerlab.hpp"

#include <algorithm>
#include <set>

namespace tfab {

bool VerifyReport::all_ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.ok; });
}

void VerifyReport::add(std::string name, bool ok, std::string detail) {
  checks.push_back({std::move(name), ok, std::move(detail)});
}

namespace {

Characteristic inf_at(Prime p) {
  Characteristic c;
  c.set(p, ExtNat::inf());
  return c;
}

void require_distinct_primes(const std::vector<Prime>& ps) {
  std::set<Prime> seen;
  for (auto p : ps) {
    if (!is_prime(p)) throw Error(ErrorCode::BadConfig, std::to_string(p) + " is not prime");
    if (!seen.insert(p).second) throw Error(ErrorCode::BadConfig, "prime " + std::to_string(p) + " used twice");
  }
}

QVec unit(std::size_t dim, std::size_t i) { return unit_vec(dim, i); }

QVec lin(std::size_t dim, std::initializer_list<std::pair<std::size_t, Int>> terms) {
  QVec v(dim, Rat(0));
  for (const auto& [i, c] : terms) v[i] += Rat(c);
  return v;
}

// A group with the given base lines (ambient vectors) and relations sum(coeff * line) / m.
struct Builder {
  std::size_t dim;
  std::vector<BaseLine> base;
  std::vector<Relation> rels;

  std::size_t line(QVec dir, Characteristic chi) {
    base.push_back({std::move(dir), std::move(chi)});
    return base.size() - 1;
  }
  void rel(std::initializer_list<std::pair<std::size_t, Int>> terms, Int m) {
    ZVec w(base.size(), Int(0));
    for (const auto& [i, c] : terms) w[i] += c;
    rels.push_back({std::move(w), std::move(m)});
  }
  Group build() const {
    std::vector<Relation> rs;
    for (auto r : rels) {
      r.w.resize(base.size(), Int(0));
      rs.push_back(std::move(r));
    }
    return Group::make(dim, base, rs);
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// Example 1

Example1Config Example1Config::defaults(std::size_t n) {
  Example1Config c;
  c.n = n;
  c.p_list = first_primes(n, {c.p, c.q});
  return c;
}

void Example1Config::validate() const {
  if (n < 1) throw Error(ErrorCode::BadConfig, "window size must be positive");
  if (p_list.size() != n) throw Error(ErrorCode::BadConfig, "need exactly N primes p_n");
  std::vector<Prime> all = p_list;
  all.push_back(p);
  all.push_back(q);
  require_distinct_primes(all);
  if (Int(static_cast<unsigned long>(p)) * s - t * Int(static_cast<unsigned long>(q)) != 1)
    throw Error(ErrorCode::BadConfig, "p s - t q must equal 1");
}

QVec Example1::a_vec(std::size_t i) const { return unit(2 * cfg.n, i - 1); }
QVec Example1::b_vec(std::size_t i) const { return unit(2 * cfg.n, cfg.n + i - 1); }
QVec Example1::c_vec(std::size_t i) const {
  return lin(2 * cfg.n, {{i - 1, Int(static_cast<unsigned long>(cfg.p))}, {cfg.n + i - 1, cfg.t}});
}
QVec Example1::d_vec(std::size_t i) const {
  return lin(2 * cfg.n, {{i - 1, Int(static_cast<unsigned long>(cfg.q))}, {cfg.n + i - 1, cfg.s}});
}

Example1 build_example1(const Example1Config& cfg) {
  cfg.validate();
  Example1 ex;
  ex.cfg = cfg;
  std::size_t n = cfg.n, dim = 2 * n;
  Int pq = Int(static_cast<unsigned long>(cfg.p * cfg.q));
  auto chain = [&](auto vec, const Int& m) {
    Builder b{dim, {}, {}};
    for (std::size_t i = 1; i <= n; ++i) b.line((ex.*vec)(i), inf_at(cfg.p_list[i - 1]));
    if (m > 1)
      for (std::size_t i = 0; i + 1 < n; ++i) b.rel({{i, Int(1)}, {i + 1, Int(-1)}}, m);
    return b.build();
  };
  ex.a = chain(&Example1::a_vec, 1);
  ex.b = chain(&Example1::b_vec, pq);
  ex.c = chain(&Example1::c_vec, Int(static_cast<unsigned long>(cfg.p)));
  ex.d = chain(&Example1::d_vec, Int(static_cast<unsigned long>(cfg.q)));
  ex.g = internal_sum({ex.a, ex.b});
  return ex;
}

VerifyReport verify_example1(const Example1Config& cfg, unsigned bound) {
  VerifyReport rep;
  rep.example = "example1";
  Example1 ex = build_example1(cfg);
  rep.add("config: p s - t q = 1", true, std::to_string(cfg.p) + "*" + cfg.s.get_str() + " - " + cfg.t.get_str() + "*" + std::to_string(cfg.q));
  rep.add("rank(G) = 2N", ex.g.rank() == 2 * cfg.n, std::to_string(ex.g.rank()));
  Group cd = internal_sum({ex.c, ex.d});
  rep.add("A + B = C + D", equal_subgroups(ex.g, cd));
  bool gens_ok = true;
  for (std::size_t i = 1; i <= cfg.n; ++i) {
    for (const auto& y : {ex.a_vec(i), ex.b_vec(i)}) {
      auto cy = cd.to_coords(y);
      gens_ok = gens_ok && cy && cd.member(*cy);
    }
  }
  rep.add("a_n, b_n in C + D", gens_ok);
  rep.add("A completely decomposable", ex.a.relations().empty());
  for (const auto& [name, grp] : {std::pair<const char*, const Group*>{"B", &ex.b}, {"C", &ex.c}, {"D", &ex.d}}) {
    auto cert = is_clipped(*grp, bound);
    rep.add(std::string(name) + " clipped within bound " + std::to_string(bound), cert.clipped_within_bound,
            std::to_string(cert.candidates_examined) + " candidates");
  }
  auto r1 = main_decomposition(ex.g, bound, 0);
  auto r2 = main_decomposition(cd, bound, 1);
  rep.add("two main decompositions agree", cd_iso_test(r1, r2) && r1.complement_rank == r2.complement_rank,
          types_str(r1.cd_types) + " / " + types_str(r2.cd_types) + ", complement rank " + std::to_string(r1.complement_rank));
  rep.add("main decomposition verifies", verify_report(ex.g, r1) && verify_report(cd, r2));
  return rep;
}

// ---------------------------------------------------------------------------
// Example 2

namespace {

Int zp(Prime p) { return Int(static_cast<unsigned long>(p)); }

// Congruences x = r mod m over the moduli that exist in the window.
Int crt_over(const std::vector<std::pair<Int, std::optional<Prime>>>& parts) {
  std::vector<Congruence> cs;
  for (const auto& [r, m] : parts)
    if (m) cs.push_back(Congruence::make(r, zp(*m)));
  return cs.empty() ? Int(0) : crt_solve(cs).residue;
}

std::optional<Prime> at(const std::map<int, Prime>& m, int i) {
  auto it = m.find(i);
  return it == m.end() ? std::nullopt : std::optional<Prime>(it->second);
}

bool divisible_by(const QVec& v, const Int& m) {
  for (const auto& x : v)
    if (x.get_den() != 1 || mpz_divisible_p(x.get_num_mpz_t(), m.get_mpz_t()) == 0) return false;
  return true;
}

}  // namespace

Example2Config Example2Config::defaults(int n) {
  Example2Config c;
  c.n = n;
  if (n < 1) throw Error(ErrorCode::BadConfig, "window size must be positive");
  auto ps = first_primes(static_cast<std::size_t>(3 * (2 * n + 1) - 2));
  std::size_t i = 0;
  for (int j = -n; j <= n; ++j) c.p[j] = ps[i++];
  for (int j = -n; j < n; ++j) c.q[j] = ps[i++];
  for (int j = -n; j < n; ++j) c.r[j] = ps[i++];
  c.k = derive_k(c);
  return c;
}

std::map<int, Int> Example2Config::derive_k(const Example2Config& cfg) {
  // (u_n + v_{n+1}) is q_n r_n-divisible in B + C exactly when k_n = 0 mod q_n, k_n = -1 mod r_n,
  // k_{n+1} = 1 mod q_n and k_{n+1} = 0 mod r_n.
  std::map<int, Int> k;
  for (int j = -cfg.n; j <= cfg.n; ++j)
    k[j] = crt_over({{Int(0), at(cfg.q, j)}, {Int(-1), at(cfg.r, j)}, {Int(1), at(cfg.q, j - 1)}, {Int(0), at(cfg.r, j - 1)}});
  return k;
}

void Example2Config::validate() const {
  if (n < 1) throw Error(ErrorCode::BadConfig, "window size must be positive");
  std::vector<Prime> all;
  for (int j = -n; j <= n; ++j) {
    if (!p.count(j) || !k.count(j)) throw Error(ErrorCode::BadConfig, "missing p_n or k_n for n = " + std::to_string(j));
    all.push_back(p.at(j));
    if (j < n) {
      if (!q.count(j) || !r.count(j)) throw Error(ErrorCode::BadConfig, "missing q_n or r_n for n = " + std::to_string(j));
      all.push_back(q.at(j));
      all.push_back(r.at(j));
    }
  }
  if (p.size() != static_cast<std::size_t>(2 * n + 1) || q.size() != static_cast<std::size_t>(2 * n) ||
      r.size() != static_cast<std::size_t>(2 * n) || k.size() != static_cast<std::size_t>(2 * n + 1))
    throw Error(ErrorCode::BadConfig, "prime or k_n index outside the window");
  require_distinct_primes(all);
}

QVec Example2::b_vec(int i) const { return unit_vec(2 * (2 * cfg.n + 1), static_cast<std::size_t>(2 * (i + cfg.n))); }
QVec Example2::c_vec(int i) const { return unit_vec(2 * (2 * cfg.n + 1), static_cast<std::size_t>(2 * (i + cfg.n) + 1)); }
QVec Example2::u_vec(int i) const {
  const Int& k = cfg.k.at(i);
  return add(scale(b_vec(i), Rat(1 + k)), scale(c_vec(i), Rat(-k)));
}
QVec Example2::v_vec(int i) const {
  const Int& k = cfg.k.at(i);
  return add(scale(b_vec(i), Rat(k)), scale(c_vec(i), Rat(1 - k)));
}

Example2 build_example2(const Example2Config& cfg) {
  cfg.validate();
  Example2 ex;
  ex.cfg = cfg;
  int n = cfg.n;
  std::size_t dim = 2 * (2 * n + 1);
  Builder bb{dim, {}, {}}, cb{dim, {}, {}};
  for (int j = -n; j <= n; ++j) {
    bb.line(ex.b_vec(j), inf_at(cfg.p.at(j)));
    cb.line(ex.c_vec(j), inf_at(cfg.p.at(j)));
  }
  for (int j = -n; j < n; ++j) {
    std::size_t i = static_cast<std::size_t>(j + n);
    bb.rel({{i, Int(1)}, {i + 1, Int(1)}}, zp(cfg.q.at(j)));
    cb.rel({{i, Int(1)}, {i + 1, Int(1)}}, zp(cfg.r.at(j)));
  }
  ex.b = bb.build();
  ex.c = cb.build();
  ex.g = internal_sum({ex.b, ex.c});
  for (int j = -n; j < n; ++j) {
    Builder e{dim, {}, {}};
    e.line(ex.u_vec(j), inf_at(cfg.p.at(j)));
    e.line(ex.v_vec(j + 1), inf_at(cfg.p.at(j + 1)));
    e.rel({{0, Int(1)}, {1, Int(1)}}, zp(cfg.q.at(j)) * zp(cfg.r.at(j)));
    ex.e_blocks.push_back(e.build());
  }
  ex.boundary_lines.push_back(Group::make(dim, {{ex.v_vec(-n), inf_at(cfg.p.at(-n))}}, {}));
  ex.boundary_lines.push_back(Group::make(dim, {{ex.u_vec(n), inf_at(cfg.p.at(n))}}, {}));
  return ex;
}

Example2Decomposition example2_main_decomposition(const Example2Config& cfg) {
  Example2 ex = build_example2(cfg);
  Example2Decomposition out;
  VerifyReport& rep = out.report;
  rep.example = "example2";
  int n = cfg.n;
  std::size_t dim = ex.g.ambient_dim();

  bool cong_ok = true;
  for (int j = -n; j <= n; ++j) {
    auto qa = at(cfg.q, j - 1), qb = at(cfg.q, j), ra = at(cfg.r, j - 1), rb = at(cfg.r, j);
    Int a = crt_over({{Int(0), qa}, {Int(0), qb}, {Int(-1), ra}, {Int(-1), rb}});
    out.alpha[j] = a;
    Int qq = (qa ? zp(*qa) : Int(1)) * (qb ? zp(*qb) : Int(1));
    Int rr = (ra ? zp(*ra) : Int(1)) * (rb ? zp(*rb) : Int(1));
    cong_ok = cong_ok && mod_floor(a, qq) == 0 && mod_floor(a + 1, rr) == 0;
    out.t[j] = add(scale(ex.b_vec(j), Rat(1 + a)), scale(ex.c_vec(j), Rat(-a)));
    out.z[j] = add(scale(ex.b_vec(j), Rat(a)), scale(ex.c_vec(j), Rat(1 - a)));
  }
  std::string alphas;
  for (const auto& [j, a] : out.alpha) alphas += (alphas.empty() ? "" : ", ") + std::to_string(j) + ":" + a.get_str();
  rep.add("alpha_n = 0 mod q_{n-1} q_n and = -1 mod r_{n-1} r_n", cong_ok, alphas);

  bool mod_q = true, mod_r = true, member_ok = true;
  for (int j = -n; j < n; ++j) {
    QVec s = add(out.t[j], out.t[j + 1]);
    mod_q = mod_q && divisible_by(sub(s, add(ex.b_vec(j), ex.b_vec(j + 1))), zp(cfg.q.at(j)));
    mod_r = mod_r && divisible_by(sub(s, add(ex.c_vec(j), ex.c_vec(j + 1))), zp(cfg.r.at(j)));
    auto y = ex.g.to_coords(scale(s, Rat(1) / Rat(zp(cfg.q.at(j)) * zp(cfg.r.at(j)))));
    member_ok = member_ok && y && ex.g.member(*y);
  }
  rep.add("t_n + t_{n+1} = b_n + b_{n+1} mod q_n", mod_q);
  rep.add("t_n + t_{n+1} = c_n + c_{n+1} mod r_n", mod_r);
  rep.add("(t_n + t_{n+1})/(q_n r_n) in G", member_ok);

  Builder hb{dim, {}, {}};
  for (int j = -n; j <= n; ++j) {
    hb.line(out.t[j], inf_at(cfg.p.at(j)));
    out.z_lines.push_back(Group::make(dim, {{out.z[j], inf_at(cfg.p.at(j))}}, {}));
  }
  for (int j = -n; j < n; ++j) {
    std::size_t i = static_cast<std::size_t>(j + n);
    hb.rel({{i, Int(1)}, {i + 1, Int(1)}}, zp(cfg.q.at(j)) * zp(cfg.r.at(j)));
  }
  out.h = hb.build();
  std::vector<Group> parts = out.z_lines;
  parts.push_back(out.h);
  std::size_t rank_sum = 0;
  for (const auto& g : parts) rank_sum += g.rank();
  rep.add("ranks add up", rank_sum == ex.g.rank(), std::to_string(rank_sum) + " = " + std::to_string(ex.g.rank()));
  bool eq = false;
  try {
    eq = equal_subgroups(internal_sum(parts), ex.g);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotADecomposition && e.code() != ErrorCode::NotFullRank) throw;
  }
  rep.add("z-lines + H = G", eq);
  return out;
}

VerifyReport verify_example2(const Example2Config& cfg, unsigned bound) {
  Example2 ex = build_example2(cfg);
  auto dec = example2_main_decomposition(cfg);
  VerifyReport rep;
  rep.example = "example2";
  int n = cfg.n;
  rep.add("rank(G) = 2 |window|", ex.g.rank() == static_cast<std::size_t>(2 * (2 * n + 1)), std::to_string(ex.g.rank()));
  bool rel_ok = true;
  for (int j = -n; j < n; ++j) {
    for (const auto& [y, m] : {std::pair{add(ex.b_vec(j), ex.b_vec(j + 1)), zp(cfg.q.at(j))},
                               std::pair{add(ex.c_vec(j), ex.c_vec(j + 1)), zp(cfg.r.at(j))},
                               std::pair{add(ex.u_vec(j), ex.v_vec(j + 1)), Int(zp(cfg.q.at(j)) * zp(cfg.r.at(j)))}}) {
      auto cy = ex.g.to_coords(scale(y, Rat(1) / Rat(m)));
      rel_ok = rel_ok && cy && ex.g.member(*cy);
    }
  }
  rep.add("B, C and E_n relation generators in G", rel_ok);
  std::vector<Group> eparts = ex.e_blocks;
  eparts.insert(eparts.end(), ex.boundary_lines.begin(), ex.boundary_lines.end());
  bool e_eq = false;
  try {
    e_eq = equal_subgroups(internal_sum(eparts), ex.g);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotADecomposition && e.code() != ErrorCode::NotFullRank) throw;
  }
  rep.add("sum of E_n and boundary lines = G", e_eq);
  for (const auto& c : dec.report.checks) rep.checks.push_back(c);
  auto cert = is_clipped(dec.h, bound);
  rep.add("H clipped within bound " + std::to_string(bound), cert.clipped_within_bound,
          std::to_string(cert.candidates_examined) + " candidates");
  return rep;
}

// ---------------------------------------------------------------------------
// Example 3

Example3Config Example3Config::defaults(std::size_t n) {
  Example3Config c;
  c.n = n;
  auto ps = first_primes(2 * n, {c.p});
  c.p_list.assign(ps.begin(), ps.begin() + static_cast<long>(n));
  c.q_list.assign(ps.begin() + static_cast<long>(n), ps.end());
  return c;
}

void Example3Config::validate() const {
  if (n < 1) throw Error(ErrorCode::BadConfig, "window size must be positive");
  if (p_list.size() != n || q_list.size() != n) throw Error(ErrorCode::BadConfig, "need exactly N primes p_n and q_n");
  std::vector<Prime> all = p_list;
  all.insert(all.end(), q_list.begin(), q_list.end());
  all.push_back(p);
  require_distinct_primes(all);
}

QVec Example3::u_vec(std::size_t i) const { return unit_vec(2 * cfg.n, 2 * (i - 1)); }
QVec Example3::x_vec(std::size_t i) const { return unit_vec(2 * cfg.n, 2 * i - 1); }

Example3 build_example3(const Example3Config& cfg) {
  cfg.validate();
  Example3 ex;
  ex.cfg = cfg;
  for (std::size_t i = 1; i <= cfg.n; ++i) {
    Builder b{2 * cfg.n, {}, {}};
    b.line(ex.u_vec(i), inf_at(cfg.p));
    b.line(ex.x_vec(i), inf_at(cfg.p_list[i - 1]));
    b.rel({{0, Int(1)}, {1, Int(1)}}, zp(cfg.q_list[i - 1]));
    ex.blocks.push_back(b.build());
  }
  ex.g = internal_sum(ex.blocks);
  return ex;
}

namespace {

// Solves A c = b over F_q; A has one row per equation.
std::optional<std::vector<Int>> solve_mod_prime(std::vector<std::vector<Int>> a, std::vector<Int> b, std::size_t ncols, const Int& q) {
  std::size_t rows = a.size();
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t col = 0; col < ncols && r < rows; ++col) {
    std::size_t piv = r;
    while (piv < rows && mod_floor(a[piv][col], q) == 0) ++piv;
    if (piv == rows) continue;
    std::swap(a[piv], a[r]);
    std::swap(b[piv], b[r]);
    Int inv = mod_inverse(a[r][col], q);
    for (std::size_t j = 0; j < ncols; ++j) a[r][j] = mod_floor(a[r][j] * inv, q);
    b[r] = mod_floor(b[r] * inv, q);
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || mod_floor(a[i][col], q) == 0) continue;
      Int f = a[i][col];
      for (std::size_t j = 0; j < ncols; ++j) a[i][j] = mod_floor(a[i][j] - f * a[r][j], q);
      b[i] = mod_floor(b[i] - f * b[r], q);
    }
    pivots.push_back(col);
    ++r;
  }
  for (std::size_t i = r; i < rows; ++i)
    if (mod_floor(b[i], q) != 0) return std::nullopt;
  std::vector<Int> x(ncols, Int(0));
  for (std::size_t i = 0; i < r; ++i) x[pivots[i]] = b[i];
  return x;
}

// Coefficients of y (base coordinates of h) over the local lattice of h at q, reduced mod q.
std::vector<Int> local_residues(const Group& h, const Element& y, Prime q) {
  auto it = h.model().local().find(q);
  QVec a = it == h.model().local().end() ? y : matvec(it->second.coord, y);
  std::vector<Int> out;
  for (const auto& x : a) out.push_back(rat_mod(x, zp(q)));
  return out;
}

Int strip_prime(Int z, Prime p) {
  Int pp = zp(p);
  mpz_remove(z.get_mpz_t(), z.get_mpz_t(), pp.get_mpz_t());
  return z;
}

// Integer vector proportional to y over Z[1/p], primitive in Z^r; fails when y is not in Z[1/p]^r.
std::optional<ZVec> primitive_over(const QVec& y, Prime p) {
  Int den = 1;
  for (const auto& x : y) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), x.get_den_mpz_t());
  if (strip_prime(den, p) != 1) return std::nullopt;
  ZVec z;
  for (const auto& x : y) z.push_back(x.get_num() * (den / x.get_den()));
  Int c = content(z);
  if (c == 0) return std::nullopt;
  for (auto& x : z) x /= c;
  return z;
}

struct LinearMap {
  QMat basis, images;  // ambient
  QVec operator()(const QVec& y) const {
    auto c = coordinates(basis, y);
    if (!c) throw Error(ErrorCode::NotASummand, "element outside the span of the summand");
    return combine(images, *c, y.size());
  }
};

bool ambient_member(const Group& g, const QVec& y) {
  auto c = g.to_coords(y);
  return c && g.member(*c);
}

}  // namespace

std::vector<std::size_t> example3_support(const Example3Config& cfg, const Group& h) {
  std::vector<std::size_t> out;
  QMat dirs = h.directions();
  Example3 shape;
  shape.cfg = cfg;
  for (std::size_t i = 1; i <= cfg.n; ++i)
    if (h.rank() > 0 && span_contains(dirs, shape.x_vec(i), 2 * cfg.n)) out.push_back(i);
  return out;
}

SplitPlan example3_analyze_summand(const Example3Config& cfg, const Group& h, std::size_t m, const std::optional<QVec>& v0_override) {
  cfg.validate();
  Example3 shape;
  shape.cfg = cfg;
  std::size_t dim = 2 * cfg.n;
  if (h.ambient_dim() != dim) throw Error(ErrorCode::DimensionMismatch, "summand lives in a different ambient space");
  auto s_set = example3_support(cfg, h);
  if (std::find(s_set.begin(), s_set.end(), m) == s_set.end()) throw Error(ErrorCode::PreconditionViolated, "m is not in the support of H");
  Group hp = p_divisible_part(h, cfg.p);
  std::size_t r = hp.rank();
  if (r + s_set.size() != h.rank()) throw Error(ErrorCode::NotASummand, "rank of H is not rank(H_p) + |S|");
  if (r == 0) throw Error(ErrorCode::NotASummand, "H has no p-divisible part");
  QMat lam;
  for (const auto& b : hp.model().integral_basis()) lam.push_back(hp.to_ambient(b));

  SplitPlan plan;
  plan.m = m;

  // w_n in H_p with (w_n + x_n)/q_n in H: a linear system over F_{q_n} in the lattice coordinates at q_n.
  for (auto n : s_set) {
    Prime q = cfg.q_list[n - 1];
    std::vector<std::vector<Int>> cols;
    for (const auto& l : lam) cols.push_back(local_residues(h, *h.to_coords(l), q));
    auto rhs = local_residues(h, *h.to_coords(shape.x_vec(n)), q);
    std::size_t eqs = rhs.size();
    std::vector<std::vector<Int>> a(eqs, std::vector<Int>(r));
    for (std::size_t i = 0; i < eqs; ++i) {
      for (std::size_t k = 0; k < r; ++k) a[i][k] = cols[k][i];
      rhs[i] = -rhs[i];
    }
    auto c = solve_mod_prime(a, rhs, r, zp(q));
    if (!c) throw Error(ErrorCode::NotASummand, "no w_n for n = " + std::to_string(n));
    QVec w = zero_vec(dim);
    for (std::size_t k = 0; k < r; ++k) w = add(w, scale(lam[k], Rat((*c)[k])));
    if (!ambient_member(h, scale(add(w, shape.x_vec(n)), Rat(1) / Rat(zp(q)))))
      throw Error(ErrorCode::NotASummand, "(w_n + x_n)/q_n not in H for n = " + std::to_string(n));
    plan.w[n] = w;
  }

  // v_0 generates a pure rank-1 subgroup of H_p; complete it to a Z[1/p]-basis.
  QVec v0 = v0_override ? *v0_override : plan.w.at(m);
  auto y = coordinates(lam, v0);
  if (!y) throw Error(ErrorCode::NormalizationFailed, "v_0 is not in the span of H_p");
  auto a = primitive_over(*y, cfg.p);
  if (!a) throw Error(ErrorCode::NormalizationFailed, "v_0 is not in H_p");
  if (v0_override) {
    Rat ratio;
    for (std::size_t k = 0; k < r; ++k)
      if ((*y)[k] != 0) ratio = (*y)[k] / Rat((*a)[k]);
    if (strip_prime(ratio.get_num(), cfg.p) != 1 || strip_prime(ratio.get_den(), cfg.p) != 1)
      throw Error(ErrorCode::NormalizationFailed, "<p^-inf v_0> is not pure in H_p");
  } else {
    v0 = combine(lam, to_rat(*a), dim);
  }
  SmithForm sf = smith(ZMat{*a}, r);
  auto vinv = inverse(to_rat(sf.v));
  if (!vinv || sf.diag.empty() || abs(sf.diag[0]) != 1) throw Error(ErrorCode::NormalizationFailed, "cannot complete v_0 to a basis");
  plan.v.push_back(v0);
  for (std::size_t k = 1; k < r; ++k) plan.v.push_back(combine(lam, (*vinv)[k], dim));

  // beta_{n,i}, k_n, T and alpha.
  for (const auto& [n, w] : plan.w) {
    Int q = zp(cfg.q_list[n - 1]);
    auto b = coordinates(plan.v, w);
    if (!b) throw Error(ErrorCode::NotASummand, "w_n outside H_p");
    plan.beta[n] = *b;
    std::optional<std::size_t> last;
    for (std::size_t i = 0; i < r; ++i)
      if (rat_mod((*b)[i], q) != 0) last = i;
    if (!last) throw Error(ErrorCode::NotASummand, "x_n / q_n would lie in H for n = " + std::to_string(n));
    plan.k[n] = *last;
    if (*last == 0) {
      plan.t_set.push_back(n);
      plan.alpha[n] = mod_inverse(rat_mod((*b)[0], q), q);
    }
  }

  // c_k by the Chinese remainder theorem so that w_n phi is q_n-divisible for n outside T.
  plan.c.assign(r, Int(0));
  plan.c[0] = 1;
  for (std::size_t k = 1; k < r; ++k) {
    std::vector<Congruence> cs;
    for (const auto& [n, kn] : plan.k) {
      if (kn != k) continue;
      Int q = zp(cfg.q_list[n - 1]);
      Int acc = 0;
      for (std::size_t i = 0; i < k; ++i) acc += rat_mod(plan.beta[n][i], q) * plan.c[i];
      cs.push_back(Congruence::make(-acc * mod_inverse(rat_mod(plan.beta[n][k], q), q), q));
    }
    if (!cs.empty()) plan.c[k] = crt_solve(cs).residue;
  }

  LinearMap phi;
  for (std::size_t k = 0; k < r; ++k) {
    plan.phi_images_v.push_back(scale(v0, Rat(plan.c[k])));
    phi.basis.push_back(plan.v[k]);
    phi.images.push_back(plan.phi_images_v.back());
  }
  std::set<std::size_t> tset(plan.t_set.begin(), plan.t_set.end());
  for (auto n : s_set) {
    plan.phi_images_x[n] = tset.count(n) ? shape.x_vec(n) : zero_vec(dim);
    phi.basis.push_back(shape.x_vec(n));
    phi.images.push_back(plan.phi_images_x[n]);
  }

  Builder bb{dim, {}, {}};
  bb.line(v0, inf_at(cfg.p));
  for (auto n : plan.t_set) {
    std::size_t i = bb.line(shape.x_vec(n), inf_at(cfg.p_list[n - 1]));
    bb.rel({{0, Int(1)}, {i, plan.alpha[n]}}, zp(cfg.q_list[n - 1]));
  }
  plan.block = bb.build();

  QMat kernel_dirs;
  for (std::size_t k = 1; k < r; ++k) kernel_dirs.push_back(*h.to_coords(sub(plan.v[k], scale(v0, Rat(plan.c[k])))));
  for (auto n : s_set)
    if (!tset.count(n)) kernel_dirs.push_back(*h.to_coords(shape.x_vec(n)));
  plan.kernel = kernel_dirs.empty() ? Group::zero(dim) : subgroup_on_subspace(h, kernel_dirs);

  // Splitting checks: phi is the identity on the block, sends each (w_n + x_n)/q_n into it, and
  // H = block + ker phi.
  for (const auto& d : {v0}) {
    if (phi(d) != d) throw Error(ErrorCode::NotASummand, "phi is not the identity on v_0");
  }
  for (auto n : plan.t_set)
    if (phi(shape.x_vec(n)) != shape.x_vec(n)) throw Error(ErrorCode::NotASummand, "phi is not the identity on x_n");
  for (const auto& [n, w] : plan.w) {
    QVec img = phi(scale(add(w, shape.x_vec(n)), Rat(1) / Rat(zp(cfg.q_list[n - 1]))));
    if (!ambient_member(plan.block, img)) throw Error(ErrorCode::NotASummand, "(w_n + x_n) phi / q_n is not in the block");
  }
  if (!contains_subgroup(h, plan.block)) throw Error(ErrorCode::NotASummand, "block is not inside H");
  bool split = false;
  try {
    split = equal_subgroups(internal_sum({plan.block, plan.kernel}), h);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotADecomposition && e.code() != ErrorCode::NotFullRank) throw;
  }
  if (!split) throw Error(ErrorCode::NotASummand, "block and kernel do not reassemble H");
  return plan;
}

FullDecomposition example3_decompose_fully(const Example3Config& cfg, const Group& h) {
  FullDecomposition out;
  Group cur = h;
  std::size_t dim = 2 * cfg.n;
  while (true) {
    auto s = example3_support(cfg, cur);
    if (s.empty()) break;
    auto plan = example3_analyze_summand(cfg, cur, s.front());
    out.blocks.push_back(plan.block);
    cur = plan.kernel;
    out.steps.push_back(std::move(plan));
  }
  if (cur.rank() > 0) {
    if (p_divisible_part(cur, cfg.p).rank() != cur.rank()) throw Error(ErrorCode::NotASummand, "leftover is not p-divisible");
    for (const auto& b : cur.model().integral_basis())
      out.blocks.push_back(Group::make(dim, {{cur.to_ambient(b), inf_at(cfg.p)}}, {}));
  }
  try {
    out.reassembles = out.blocks.empty() ? h.rank() == 0 : equal_subgroups(internal_sum(out.blocks), h);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotADecomposition && e.code() != ErrorCode::NotFullRank) throw;
  }
  return out;
}

RandomSummand random_example3_summand(const Example3& ex, std::mt19937_64& rng) {
  std::size_t n = ex.cfg.n, dim = 2 * n;
  RandomSummand out;
  // Optionally regroup a pair B_i + B_j as the line <p^-inf (u_i + u_j)> plus its rank-3 complement.
  std::optional<std::pair<std::size_t, std::size_t>> pair;
  if (n >= 2 && rng() % 2) {
    std::size_t i = rng() % n, j = rng() % (n - 1);
    if (j >= i) ++j;
    pair = std::minmax(i, j);
  }
  std::vector<Group> in, rest;
  if (pair) {
    auto [i, j] = *pair;
    auto plan = example3_analyze_summand(ex.cfg, internal_sum({ex.blocks[i], ex.blocks[j]}), i + 1, add(ex.u_vec(i + 1), ex.u_vec(j + 1)));
    bool line_in = rng() % 2;
    (line_in ? in : rest).push_back(plan.block);
    (line_in ? rest : in).push_back(plan.kernel);
  }
  for (std::size_t i = 1; i <= n; ++i) {
    if (pair && (i == pair->first + 1 || i == pair->second + 1)) continue;
    (rng() % 2 ? in : rest).push_back(ex.blocks[i - 1]);
  }
  if (in.empty()) {
    in.push_back(rest.back());
    rest.pop_back();
  }

  QMat a = identity(dim);
  // Columns are images of basis vectors; compose elementary automorphisms of G.
  std::size_t ops = 1 + rng() % (2 * n);
  for (std::size_t t = 0; t < ops; ++t) {
    std::size_t i = rng() % n;
    if (n > 1 && rng() % 3 != 0) {
      std::size_t j = rng() % (n - 1);
      if (j >= i) ++j;
      long c = static_cast<long>(rng() % 5) - 2;
      if (c == 0) c = 1;
      // u_i -> u_i + q_i c u_j
      Rat f = Rat(zp(ex.cfg.q_list[i]) * c);
      for (std::size_t row = 0; row < dim; ++row) a[row][2 * i] += f * a[row][2 * j];
    } else {
      for (std::size_t row = 0; row < dim; ++row) {
        a[row][2 * i] = -a[row][2 * i];
        a[row][2 * i + 1] = -a[row][2 * i + 1];
      }
    }
  }
  out.automorphism = a;
  if (!equal_subgroups(apply_linear(a, ex.g), ex.g)) throw Error(ErrorCode::PreconditionViolated, "automorphism does not preserve G");
  out.h = apply_linear(a, internal_sum(in));
  out.complement = rest.empty() ? Group::zero(dim) : apply_linear(a, internal_sum(rest));
  out.subset = example3_support(ex.cfg, out.h);
  return out;
}

VerifyReport verify_example3(const Example3Config& cfg, std::size_t summands, std::uint64_t seed) {
  Example3 ex = build_example3(cfg);
  VerifyReport rep;
  rep.example = "example3";
  std::size_t n = cfg.n, dim = 2 * n;
  rep.add("rank(G) = 2N", ex.g.rank() == dim, std::to_string(ex.g.rank()));
  bool gens = true;
  for (std::size_t i = 1; i <= n; ++i)
    gens = gens && ambient_member(ex.g, scale(add(ex.u_vec(i), ex.x_vec(i)), Rat(1) / Rat(zp(cfg.q_list[i - 1]))));
  rep.add("(u_n + x_n)/q_n in G", gens);
  Group gp = p_divisible_part(ex.g, cfg.p);
  QMat us;
  for (std::size_t i = 1; i <= n; ++i) us.push_back(ex.u_vec(i));
  Group u_span = Group::make(dim, [&] {
    std::vector<BaseLine> b;
    for (const auto& u : us) b.push_back({u, inf_at(cfg.p)});
    return b;
  }(), {});
  rep.add("p-divisible part = span of the u_n", equal_subgroups(gp, u_span));

  auto full = example3_decompose_fully(cfg, ex.g);
  rep.add("G splits into blocks", full.reassembles, std::to_string(full.blocks.size()) + " blocks");

  if (n >= 2) {
    Group h = internal_sum({ex.blocks[0], ex.blocks[1]});
    auto plan = example3_analyze_summand(cfg, h, 1, add(ex.u_vec(1), ex.u_vec(2)));
    Int q1 = zp(cfg.q_list[0]), q2 = zp(cfg.q_list[1]);
    // phi(u_2) = lambda (u_1 + u_2).
    LinearMap phi;
    for (std::size_t k = 0; k < plan.v.size(); ++k) {
      phi.basis.push_back(plan.v[k]);
      phi.images.push_back(plan.phi_images_v[k]);
    }
    QVec img = phi(ex.u_vec(2));
    Int lambda = mod_floor(floor_rat(img[0]), q1 * q2);
    bool ok = plan.t_set.empty() && plan.block.rank() == 1 && mod_floor(lambda - 1, q1) == 0 && mod_floor(lambda, q2) == 0;
    rep.add("rank-1 summand on u_1 + u_2 in B_1 + B_2", ok, "lambda = " + lambda.get_str());
  }

  std::mt19937_64 rng(seed);
  std::size_t good = 0;
  for (std::size_t t = 0; t < summands; ++t) {
    auto rs = random_example3_summand(ex, rng);
    bool ok = false;
    try {
      auto d = example3_decompose_fully(cfg, rs.h);
      ok = d.reassembles && equal_subgroups(internal_sum({rs.h, rs.complement}), ex.g);
    } catch (const Error&) {
    }
    if (ok) ++good;
  }
  rep.add("random summands split into blocks", good == summands, std::to_string(good) + "/" + std::to_string(summands));
  return rep;
}

}  // namespace tfab
