#include "doctest.h"
#include "tfab/decomp.hpp"

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
Group pocket() { return Group::standard({ch({{2, INF}}), ch({{3, INF}})}, {{{1, 1}, 5}}); }

// B_1 + B_2 with base order u1, x1, u2, x2.
Group two_blocks() {
  return Group::standard({ch({{2, INF}}), ch({{3, INF}}), ch({{2, INF}}), ch({{5, INF}})},
                         {{{1, 1, 0, 0}, 7}, {{0, 0, 1, 1}, 11}});
}

TypeClass T(std::initializer_list<Prime> ps) { return TypeClass(std::set<Prime>(ps)); }

}  // namespace

TEST_CASE("extract_rank1 examples") {
  auto e = extract_rank1(sample(), {});
  REQUIRE(e);
  CHECK(e->complement.rank() == 1);
  verify_functional(e->host, e->f);
  CHECK_FALSE(extract_rank1(pocket(), {5, 0, std::nullopt}));
}

TEST_CASE("rank-1 summand on u1 + u2 in two Example 3 blocks") {
  Group g = two_blocks();
  auto f = baer_split(g, v({1, 0, 1, 0}));
  REQUIRE(f);
  verify_functional(g, *f);
  // f(u2) = lambda (u1 + u2) with lambda = 0 mod 11 and 1 - lambda = 0 mod 7 in Z[1/2].
  Rat lambda = f->functional[2] * f->line[0];
  auto mod_ok = [&](const Rat& q, int m) { return mod_floor(q.get_num() * mod_inverse(q.get_den(), m), m) == 0; };
  CHECK(mod_ok(lambda, 11));
  CHECK(mod_ok(Rat(1) - lambda, 7));
  auto ext = extract_rank1(g, {});
  REQUIRE(ext);
  CHECK(ext->type == T({2}));
}

TEST_CASE("main_decomposition examples") {
  Group cd = Group::standard({ch({{2, INF}}), {}, ch({{3, INF}, {5, ExtNat(1)}})}, {});
  auto r = main_decomposition(cd, 3);
  CHECK(r.complement_rank == 0);
  CHECK(r.cd_types == TypeMultiset{T({}), T({2}), T({3})});
  CHECK(verify_report(cd, r));

  auto rp = main_decomposition(pocket(), 5);
  CHECK(rp.cd_types.empty());
  CHECK(rp.complement_rank == 2);
  CHECK(equal_subgroups(rp.complement, pocket()));

  Group g = direct_sum(Group::standard({ch({{7, INF}})}, {}), pocket());
  auto rg = main_decomposition(g, 5);
  CHECK(rg.cd_types == TypeMultiset{T({7})});
  CHECK(rg.complement_rank == 2);
  CHECK(verify_report(g, rg));
}

TEST_CASE("is_clipped and cd_iso_test") {
  CHECK(is_clipped(pocket(), 5).clipped_within_bound);
  auto z2 = is_clipped(Group::standard({{}, {}}, {}), 5);
  CHECK_FALSE(z2.clipped_within_bound);
  REQUIRE(z2.witness);
  CHECK(baer_split(z2.witness->host, z2.witness->x));
  DecompositionReport a, b, empty1, empty2;
  a.cd_types = {T({2})};
  b.cd_types = {T({3})};
  CHECK_FALSE(cd_iso_test(a, b));
  CHECK(cd_iso_test(empty1, empty2));
}

TEST_CASE("decompositions agree across seeds and automorphisms") {
  std::mt19937 rng(53);
  const Prime ps[] = {2, 3, 5, 7};
  for (int t = 0; t < 20; ++t) {
    std::size_t c = 1 + rng() % 3;
    std::vector<Characteristic> chars(c);
    for (auto& x : chars) {
      Prime p = ps[rng() % 4];
      if (rng() % 3) x.set(p, INF);
      if (rng() % 2) x.set(11, ExtNat(rng() % 3));
    }
    Group g = direct_sum(Group::standard(chars, {}), pocket());
    auto r1 = main_decomposition(g, 3, 0);
    auto r2 = main_decomposition(g, 3, 1 + rng() % 1000);
    CHECK(cd_iso_test(r1, r2));
    CHECK(r1.complement_rank == 2);
    CHECK(r2.complement_rank == 2);
    CHECK(verify_report(g, r1));
    CHECK(verify_report(g, r2));
  }
}

TEST_CASE("stein socle decomposition examples") {
  Group g = Group::standard({ch({{2, INF}}), ch({{2, INF}})}, {{{1, 1}, 3}});
  auto s = stein_socle_decomposition(g, T({2}));
  CHECK(s.k.rank() == 0);
  CHECK(equal_subgroups(s.b, g));

  Group h = Group::standard({ch({{2, INF}, {3, INF}}), ch({{2, INF}})}, {});
  auto s2 = stein_socle_decomposition(h, T({2}));
  REQUIRE(s2.k.rank() == 1);
  CHECK(span_contains(s2.k.directions(), v({1, 0}), 2));
  REQUIRE(s2.b.rank() == 1);
  CHECK(s2.b.base_type(0) == T({2}));
  CHECK(equal_subgroups(internal_sum({s2.k, s2.b}), h));

  auto s3 = stein_socle_decomposition(h, T({5}));
  CHECK(s3.socle.rank() == 0);
  CHECK(s3.k.rank() == 0);
  CHECK(s3.b.rank() == 0);
}

TEST_CASE("stein decomposition on a glued socle") {
  // Directions of type {2,3} and {2} glued by (e1 + e2)/5: the socle at {2} is all of G.
  Group g = Group::standard({ch({{2, INF}, {3, INF}}), ch({{2, INF}}), ch({{2, INF}})}, {{{1, 1, 1}, 5}});
  auto s = stein_socle_decomposition(g, T({2}));
  CHECK(equal_subgroups(internal_sum({s.k, s.b}), s.socle));
  for (std::size_t i = 0; i < s.b.rank(); ++i) CHECK(s.b.base_type(i) == T({2}));
  CHECK(s.b.relations().empty());
  CHECK(is_clipped(s.k, 5, T({2})).clipped_within_bound);
}

TEST_CASE("tau_clipped_sum_check") {
  Group a = Group::standard({ch({{7, INF}})}, {});
  CHECK_FALSE(tau_clipped_sum_check(a, pocket(), T({}), 5));
  CHECK_FALSE(tau_clipped_sum_check(Group::zero(0), pocket(), T({2}), 5));
  CHECK_THROWS_AS(tau_clipped_sum_check(Group::standard({ch({{2, INF}})}, {}), pocket(), T({2}), 5), Error);
}
