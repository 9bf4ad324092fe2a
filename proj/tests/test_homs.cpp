#include "doctest.h"
#include "tfab/homs.hpp"

#include <random>

using namespace tfab;

namespace {

const ExtNat INF = ExtNat::inf();

Characteristic ch(std::initializer_list<std::pair<const Prime, ExtNat>> e) { return Characteristic(std::map<Prime, ExtNat>(e)); }

QVec v(std::initializer_list<Rat> xs) {
  QVec r(xs);
  for (auto& q : r) q.canonicalize();
  return r;
}

Group sample() { return Group::standard({ch({{2, INF}}), {}}, {{{1, 1}, 3}}); }
// Rank-2 indecomposable: <e1 : 2^inf, e2 : 3^inf> + (e1 + e2)/5
Group pocket() { return Group::standard({ch({{2, INF}}), ch({{3, INF}})}, {{{1, 1}, 5}}); }

QVec rel_gen(const Relation& r) {
  QVec x(r.w.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = Rat(r.w[i]) / Rat(r.m);
  for (auto& q : x) q.canonicalize();
  return x;
}

QVec base_gen_capped(const Group& g, std::size_t i, unsigned budget) {
  QVec e(g.rank(), Rat(0));
  Int d = 1;
  for (const auto& [p, ex] : g.base()[i].chi.entries()) d *= pow_int(p, ex.is_inf() ? budget : std::min<std::uint64_t>(ex.value(), budget));
  e[i] = Rat(1) / Rat(d);
  e[i].canonicalize();
  return e;
}

// Oracle: f(y) = mu(y) x maps G into G, using only brute-force membership.
bool oracle_functional_ok(const Group& g, const QVec& x, const QVec& mu, unsigned budget) {
  auto img_ok = [&](const QVec& y) { return member_bruteforce(g, scale(x, dot(mu, y)), budget); };
  for (std::size_t i = 0; i < g.rank(); ++i)
    if (!img_ok(base_gen_capped(g, i, budget))) return false;
  for (const auto& r : g.relations())
    if (!img_ok(rel_gen(r))) return false;
  return true;
}

// Exhaustive functionals with entries a/d, d <= 6, |a| <= amax, and mu(x) = 1.
bool oracle_split_exists(const Group& g, const QVec& x, int amax) {
  std::size_t n = g.rank();
  std::size_t k = 0;
  while (x[k] == 0) ++k;
  std::vector<Rat> vals;
  for (int d = 1; d <= 6; ++d)
    for (int a = -amax; a <= amax; ++a) {
      Rat q(a, d);
      q.canonicalize();
      if (std::find(vals.begin(), vals.end(), q) == vals.end()) vals.push_back(q);
    }
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    QVec mu(n, Rat(0));
    Rat rest = 1;
    for (std::size_t i = 0, c = 0; i < n; ++i) {
      if (i == k) continue;
      mu[i] = vals[idx[c++]];
      rest -= mu[i] * x[i];
    }
    mu[k] = rest / x[k];
    if (oracle_functional_ok(g, x, mu, 5)) return true;
    std::size_t c = 0;
    while (c + 1 < n && ++idx[c] == vals.size()) idx[c++] = 0;
    if (c + 1 >= n) break;
  }
  return false;
}

Group random_group(std::mt19937& rng, std::size_t max_rank) {
  const Prime primes[] = {2, 3, 5};
  std::size_t n = 1 + rng() % max_rank;
  std::vector<Characteristic> chars(n);
  for (auto& c : chars)
    for (Prime p : primes) {
      unsigned r = rng() % 5;
      if (r == 4) c.set(p, INF);
      else if (r == 3) c.set(p, ExtNat(1));
    }
  std::vector<Relation> rels;
  std::size_t nr = rng() % 3;
  for (std::size_t j = 0; j < nr; ++j) {
    ZVec w(n);
    for (auto& x : w) x = static_cast<int>(rng() % 5) - 2;
    if (std::all_of(w.begin(), w.end(), [](const Int& z) { return z == 0; })) w[0] = 1;
    rels.push_back({w, Int(static_cast<unsigned long>(primes[rng() % 3]))});
  }
  return Group::standard(chars, rels);
}

}  // namespace

TEST_CASE("baer_split on the sample group gives f(e2) = 2 e1") {
  Group g = sample();
  auto f = baer_split(g, v({1, 0}));
  REQUIRE(f);
  verify_functional(g, *f);
  QVec img = scale(f->line, f->functional[1]);
  CHECK(img == v({2, 0}));
  CHECK(scale(f->line, f->functional[0]) == v({1, 0}));
  Group k = kernel_presentation(g, *f);
  REQUIRE(k.rank() == 1);
  CHECK(span_contains(k.directions(), v({-2, 1}), 2));
  CHECK(equal_subgroups(internal_sum({f->target, k}), g));
}

TEST_CASE("baer_split proves no splitting for the pocket group") {
  Group g = pocket();
  CHECK_FALSE(baer_split(g, v({1, 0})));
  CHECK_FALSE(baer_split(g, v({0, 1})));
  CHECK_FALSE(oracle_split_exists(g, v({1, 0}), 12));
}

TEST_CASE("baer_split in completely decomposable groups is the coordinate projection") {
  Group g = Group::standard({ch({{2, INF}}), ch({{3, ExtNat(2)}}), {}}, {});
  for (std::size_t i = 0; i < 3; ++i) {
    auto f = baer_split(g, unit_vec(3, i));
    REQUIRE(f);
    CHECK(f->matrix() == [&] {
      QMat m(3, QVec(3, Rat(0)));
      m[i][i] = 1;
      return m;
    }());
    Group k = kernel_presentation(g, *f);
    CHECK(k.rank() == 2);
  }
  CHECK_THROWS_AS(baer_split(g, v({0, 0, 0})), Error);
  CHECK_THROWS_AS(baer_split(g, v({0, Rat(1, 5), 0})), Error);
}

TEST_CASE("verify_functional rejects broken functionals") {
  Group g = sample();
  auto f = baer_split(g, v({1, 0}));
  REQUIRE(f);
  SplittingFunctional bad = *f;
  bad.functional[1] = 1;  // f(e2) = e1 breaks (e1 + e2)/3
  CHECK_THROWS_AS(verify_functional(g, bad), Error);
  bad = *f;
  bad.functional[0] = 2;
  CHECK_THROWS_AS(verify_functional(g, bad), Error);
}

TEST_CASE("baer_split agrees with the exhaustive oracle on random small groups") {
  std::mt19937 rng(41);
  int none = 0, some = 0;
  for (int t = 0; t < 60; ++t) {
    Group g = random_group(rng, 3);
    std::size_t n = g.rank();
    QVec x(n);
    for (auto& q : x) q = static_cast<int>(rng() % 3) - 1;
    if (is_zero(x)) x[0] = 1;
    std::optional<SplittingFunctional> f;
    try {
      f = baer_split(g, x);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::OutsideRepresentationClass);
      continue;
    }
    if (f) {
      ++some;
      verify_functional(g, *f);
      CHECK(dot(f->functional, x) != 0);
      Group k = kernel_presentation(g, *f);
      CHECK(k.rank() + 1 == n);
      // The oracle accepts the returned functional rescaled to x.
      QVec mu = scale(f->functional, Rat(1) / dot(f->functional, x));
      CHECK(oracle_functional_ok(g, x, mu, 5));
    } else {
      ++none;
      CHECK_FALSE(oracle_split_exists(g, x, n == 3 ? 4 : 12));
    }
  }
  CHECK(none > 0);
  CHECK(some > 0);
}

TEST_CASE("end_integrality_basis of the pocket group") {
  Group g = pocket();
  EndDescription e = end_integrality_basis(g);
  CHECK(e.units == std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}, {1, 1}});
  auto diag = [](Rat a, Rat d) { return QMat{{a, 0}, {0, d}}; };
  CHECK(e.contains(identity(2)));
  CHECK(e.contains(diag(6, 1)));
  CHECK(e.contains(diag(Rat(1, 2), 3)));
  CHECK_FALSE(e.contains(diag(1, 0)));
  CHECK_FALSE(e.contains(diag(Rat(1, 2), Rat(1, 2))));
  CHECK_FALSE(e.contains(QMat{{1, 1}, {0, 1}}));
  // Oracle: a diag(a, d) with small a, d maps generators into G iff a = d mod 5.
  for (int a = -6; a <= 6; ++a)
    for (int d = -6; d <= 6; ++d) {
      QMat m = diag(a, d);
      bool ok = true;
      for (std::size_t i = 0; i < 2; ++i) ok = ok && member_bruteforce(g, matvec(m, base_gen_capped(g, i, 5)), 6);
      ok = ok && member_bruteforce(g, matvec(m, v({Rat(1, 5), Rat(1, 5)})), 6);
      CHECK(e.contains(m) == ok);
    }
  CHECK(end_integrality_basis(Group::zero(3)).units.empty());
  std::vector<Characteristic> seven(7);
  CHECK_THROWS_AS(end_integrality_basis(Group::standard(seven, {})), Error);
}

TEST_CASE("end of a homogeneous completely decomposable group is a full matrix ring") {
  Group g = Group::standard({ch({{2, INF}}), ch({{2, INF}})}, {});
  EndDescription e = end_integrality_basis(g);
  CHECK(e.units.size() == 4);
  CHECK(e.contains(QMat{{Rat(1, 4), 3}, {-7, Rat(5, 2)}}));
  CHECK_FALSE(e.contains(QMat{{Rat(1, 3), 0}, {0, 1}}));
}

TEST_CASE("idempotent search") {
  auto rep = idempotent_search(pocket(), 50);
  CHECK(rep.only_trivial());
  CHECK(rep.exhaustive_for_lines);
  auto free2 = idempotent_search(Group::standard({{}, {}}, {}), 2);
  QMat d10{{1, 0}, {0, 0}};
  CHECK(std::find(free2.idempotents.begin(), free2.idempotents.end(), d10) != free2.idempotents.end());
  for (const auto& e : free2.idempotents) CHECK(is_idempotent_endomorphism(Group::standard({{}, {}}, {}), e));
  CHECK_THROWS_AS(idempotent_search(Group::standard(std::vector<Characteristic>(7), {}), 1), Error);
}

TEST_CASE("idempotents give verified decompositions") {
  std::mt19937 rng(43);
  for (int t = 0; t < 25; ++t) {
    Group g = random_group(rng, 3);
    auto rep = idempotent_search(g, 2);
    for (const auto& e : rep.idempotents) {
      CHECK(is_idempotent_endomorphism(g, e));
      std::size_t n = g.rank();
      QMat c = identity(n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) c[i][j] -= e[i][j];
      auto image_group = [&](const QMat& m) {
        QMat cols = transpose(m, n);
        return tfab::rank(cols, n) == 0 ? Group::zero(g.ambient_dim()) : subgroup_on_subspace(g, cols);
      };
      try {
        CHECK(equal_subgroups(internal_sum({image_group(e), image_group(c)}), g));
      } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::OutsideRepresentationClass);
      }
    }
  }
}

TEST_CASE("mono-equivalence witnesses") {
  // G = A + H with A = <a : 2^inf> and H the pocket group in the last two coordinates.
  Group a = Group::standard({ch({{2, INF}})}, {});
  Group g = direct_sum(a, pocket());
  Group a1 = subgroup_on_subspace(g, {v({1, 0, 0})});
  Group h1 = subgroup_on_subspace(g, {v({0, 1, 0}), v({0, 0, 1})});
  Decomposition d1{a1, h1};
  MonoWitness same = mono_equivalence_witness(g, d1, d1);
  CHECK(same.ok);
  CHECK(same.h2_to_h == identity(2));

  // Automorphism: a -> a + h1 and h -> h + 5 * (h1-coordinate of h) * a.
  QMat phi1{{1, 0, 0}, {1, 1, 0}, {0, 0, 1}};
  QMat phi2{{1, 5, 0}, {0, 1, 0}, {0, 0, 1}};
  QMat phi = matmul(phi2, phi1);
  Group gphi = apply_linear(phi, g);
  REQUIRE(equal_subgroups(gphi, g));
  Decomposition d2{apply_linear(phi, a1), apply_linear(phi, h1)};
  MonoWitness w = mono_equivalence_witness(g, d1, d2);
  CHECK(w.ok);
  CHECK(tfab::rank(matmul(w.h2_to_h, w.h_to_h2), 2) == 2);

  Group mixed = Group::standard({ch({{2, INF}}), ch({{3, INF}})}, {});
  Group gm = direct_sum(mixed, Group::standard({{}}, {}));
  Decomposition dm{subgroup_on_subspace(gm, {v({1, 0, 0}), v({0, 1, 0})}), subgroup_on_subspace(gm, {v({0, 0, 1})})};
  try {
    mono_equivalence_witness(gm, dm, dm);
    FAIL("expected NotHomogeneous");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotHomogeneous);
  }
  Decomposition broken{a1, subgroup_on_subspace(g, {v({0, 1, 0})})};
  CHECK_THROWS_AS(mono_equivalence_witness(g, d1, broken), Error);
}
