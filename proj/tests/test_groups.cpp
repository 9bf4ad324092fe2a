#include "doctest.h"
#include "tfab/group.hpp"

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

// <e1 : 2^inf, e2 : Z> + (e1 + e2)/3
Group sample() { return Group::standard({ch({{2, INF}}), {}}, {{{1, 1}, 3}}); }

Group random_group(std::mt19937& rng, std::size_t& n_out) {
  const Prime primes[] = {2, 3, 5, 7, 11, 13};
  std::size_t n = 1 + rng() % 4;
  std::vector<Prime> uni;
  std::size_t np = 1 + rng() % 3;
  while (uni.size() < np) {
    Prime p = primes[rng() % 6];
    if (std::find(uni.begin(), uni.end(), p) == uni.end()) uni.push_back(p);
  }
  std::vector<Characteristic> chars(n);
  for (auto& c : chars)
    for (Prime p : uni) {
      unsigned r = rng() % 4;
      if (r == 3) c.set(p, INF);
      else if (r == 2) c.set(p, ExtNat(1));
    }
  std::vector<Relation> rels;
  std::size_t nr = rng() % 3;
  for (std::size_t j = 0; j < nr; ++j) {
    Prime p = uni[rng() % uni.size()];
    Int m = p * (rng() % 2 ? p : Prime(1));
    if (m > 30) m = p;
    ZVec w(n);
    for (auto& x : w) x = static_cast<int>(rng() % 5) - 2;
    bool nz = std::any_of(w.begin(), w.end(), [](const Int& x) { return x != 0; });
    if (!nz) w[0] = 1;
    rels.push_back({w, m});
  }
  n_out = n;
  return Group::standard(chars, rels);
}

QVec random_element(std::mt19937& rng, std::size_t n) {
  const int dens[] = {1, 1, 2, 3, 4, 5, 6, 9, 7, 8, 25};
  QVec x(n);
  for (auto& q : x) {
    q = Rat(static_cast<int>(rng() % 9) - 4, dens[rng() % 11]);
    q.canonicalize();
  }
  return x;
}

}  // namespace

TEST_CASE("validate") {
  Group g = sample();
  CHECK(g.universe() == std::set<Prime>{2, 3});
  CHECK(g.rank() == 2);
  try {
    Group::make(2, {{v({1, 0}), {}}, {v({2, 0}), {}}}, {});
    FAIL("expected NotFullRank");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotFullRank);
  }
  Group h = Group::standard({{}, {}}, {{{2, 2}, 4}});
  REQUIRE(h.relations().size() == 1);
  CHECK(h.relations()[0] == Relation{{1, 1}, 2});
  CHECK_THROWS_AS(Group::standard({{}}, {{{0}, 3}}), Error);
  CHECK_THROWS_AS(Group::standard({ch({{4, ExtNat(1)}})}, {}), Error);
}

TEST_CASE("member examples") {
  Group g = sample();
  CHECK(g.member(v({Rat(1, 8), 0})));
  CHECK(g.member(v({Rat(1, 3), Rat(1, 3)})));
  CHECK_FALSE(g.member(v({Rat(1, 3), Rat(-1, 3)})));
  for (const auto& x : {v({Rat(1, 8), 0}), v({Rat(1, 3), Rat(1, 3)})}) CHECK(member_bruteforce(g, x, 4));
  CHECK_FALSE(member_bruteforce(g, v({Rat(1, 3), Rat(-1, 3)}), 4));
  CHECK(member_bruteforce(g, v({0, 0}), 4));
  CHECK_THROWS_AS(g.member(v({1})), Error);
}

TEST_CASE("height and characteristic examples") {
  Group g = sample();
  CHECK(g.height(v({1, 0}), 2) == INF);
  CHECK(g.height(v({1, 1}), 3) == ExtNat(1));
  CHECK(g.height(v({1, 0}), 5) == ExtNat(0));
  CHECK(g.characteristic_of(v({1, 0})) == ch({{2, INF}}));
  CHECK(g.type_of(v({1, 0})) == TypeClass({2}));
  CHECK(g.type_of(v({1, 1})).is_integers());
  CHECK(g.type_of(v({6, 0})) == g.type_of(v({1, 0})));
  CHECK_THROWS_AS(g.height(v({0, 0}), 2), Error);
  CHECK_THROWS_AS(g.height(v({Rat(1, 3), 0}), 2), Error);
}

TEST_CASE("height agrees with a brute-force oracle") {
  Group g = sample();
  // Largest k <= 4 with x / p^k found by the brute-force oracle.
  auto oracle = [&](const QVec& x, Prime p) {
    int k = 0;
    while (k < 4 && member_bruteforce(g, scale(x, Rat(1, pow_int(p, k + 1))), 6)) ++k;
    return k;
  };
  for (const auto& x : {v({1, 1}), v({2, -1}), v({3, 3}), v({Rat(1, 3), Rat(1, 3)}), v({0, 9})})
    for (Prime p : {3, 5}) CHECK(g.height(x, p) == ExtNat(oracle(x, p)));
}

TEST_CASE("purify examples") {
  Group g = sample();
  Group r = purify(g, {v({2, 0})});
  REQUIRE(r.rank() == 1);
  CHECK(r.base()[0].chi == ch({{2, INF}}));
  CHECK(equal_subgroups(purify(g, {v({1, 0}), v({0, 1})}), g));
  Group s = purify(g, {v({1, 1})});
  REQUIRE(s.rank() == 1);
  // The pure closure is generated by (e1 + e2)/3.
  QVec gen = s.to_ambient(base_generator(s, 0));
  CHECK(gen == v({Rat(1, 3), Rat(1, 3)}));
  CHECK(s.relations().empty());
  CHECK_THROWS_AS(purify(g, {}), Error);
  CHECK_THROWS_AS(purify(g, {v({0, 0})}), Error);
}

TEST_CASE("p-divisible part and socle examples") {
  Group g = sample();
  Group d = p_divisible_part(g, 2);
  REQUIRE(d.rank() == 1);
  CHECK(d.base()[0].chi.at(2) == INF);
  CHECK(span_contains(d.directions(), v({1, 0}), 2));
  // Oracle: e1/2^k in G, (a e1 + b e2)/2 not in G for b odd.
  for (int k = 0; k <= 6; ++k) CHECK(member_bruteforce(g, v({Rat(1, pow_int(2, k)), 0}), 6));
  for (int a = -3; a <= 3; ++a) CHECK_FALSE(member_bruteforce(g, v({Rat(a, 2), Rat(1, 2)}), 6));
  CHECK(p_divisible_part(g, 5).rank() == 0);
  CHECK(equal_subgroups(socle(g, TypeClass({2})), d));
  CHECK(equal_subgroups(socle(g, TypeClass()), g));
  CHECK(socle(g, TypeClass({2, 3})).rank() == 0);
}

TEST_CASE("direct sums and equality") {
  Group g = sample();
  Group h = Group::standard({ch({{5, ExtNat(2)}})}, {});
  Group s = direct_sum(g, h);
  CHECK(s.rank() == 3);
  CHECK(equal_subgroups(g, g));
  CHECK(s.member(v({Rat(1, 3), Rat(1, 3), Rat(1, 25)})));
  CHECK_FALSE(s.member(v({0, 0, Rat(1, 125)})));
  Group other = Group::standard({ch({{2, INF}}), {}}, {});
  CHECK_FALSE(equal_subgroups(g, other));
  CHECK(contains_subgroup(g, other));
  CHECK_FALSE(contains_subgroup(other, g));
}

TEST_CASE("member agrees with brute force on random pairs") {
  std::mt19937 rng(17);
  int agreed = 0;
  for (int t = 0; t < 600; ++t) {
    std::size_t n = 0;
    Group g = random_group(rng, n);
    QVec x = random_element(rng, n);
    // Bias half the samples toward members.
    if (t % 2 == 0 && !g.relations().empty()) {
      const auto& r = g.relations()[rng() % g.relations().size()];
      QVec y(n);
      for (std::size_t i = 0; i < n; ++i) y[i] = Rat(r.w[i] * static_cast<int>(1 + rng() % 3)) / Rat(r.m);
      for (auto& q : y) q.canonicalize();
      x = y;
    }
    bool m = g.member(x);
    bool b = member_bruteforce(g, x, 6);
    CHECK(m == b);
    agreed += m == b;
  }
  CHECK(agreed == 600);
}

TEST_CASE("height laws on random members") {
  std::mt19937 rng(23);
  for (int t = 0; t < 300; ++t) {
    std::size_t n = 0;
    Group g = random_group(rng, n);
    QVec x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = static_cast<int>(rng() % 7) - 3;
      y[i] = static_cast<int>(rng() % 7) - 3;
    }
    if (is_zero(x)) x[0] = 1;
    for (Prime p : {2, 3, 5}) {
      ExtNat h = g.height(x, p);
      ExtNat hp = g.height(scale(x, Rat(p)), p);
      if (h.is_inf()) CHECK(hp.is_inf());
      else CHECK(hp == h + ExtNat(1));
      QVec s = add(x, y);
      if (!is_zero(y) && !is_zero(s)) CHECK(g.height(s, p) >= min(h, g.height(y, p)));
    }
    int k = 1 + static_cast<int>(rng() % 5);
    CHECK(g.type_of(scale(x, Rat(k))) == g.type_of(x));
  }
}

TEST_CASE("purify is idempotent on random inputs") {
  std::mt19937 rng(29);
  for (int t = 0; t < 100; ++t) {
    std::size_t n = 0;
    Group g = random_group(rng, n);
    if (n < 2) continue;
    QVec x(n);
    for (auto& q : x) q = static_cast<int>(rng() % 5) - 2;
    if (is_zero(x)) x[0] = 1;
    Group r;
    try {
      r = purify(g, {x});
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::OutsideRepresentationClass);
      continue;
    }
    std::vector<Element> gens;
    for (std::size_t i = 0; i < r.rank(); ++i) {
      QVec amb = r.to_ambient(base_generator(r, i));
      gens.push_back(*g.to_coords(amb));
    }
    Group r2 = purify(g, gens);
    CHECK(equal_subgroups(r, r2));
    // Every base generator of the closure is in G.
    for (const auto& e : gens) CHECK(g.member(e));
  }
}

TEST_CASE("equal_subgroups across generator changes") {
  std::mt19937 rng(31);
  for (int t = 0; t < 100; ++t) {
    std::size_t n = 0;
    Group g = random_group(rng, n);
    // Re-present G: base directions kept, relations shuffled and extended by integer combos.
    std::vector<Relation> rels = g.relations();
    std::vector<Characteristic> chars;
    for (const auto& b : g.base()) chars.push_back(b.chi);
    if (!rels.empty()) {
      Relation r = rels[0];
      for (auto& w : r.w) w = 2 * w + r.m;
      if (std::all_of(r.w.begin(), r.w.end(), [](const Int& z) { return z == 0; })) r.w[0] = 1;
      rels.push_back(r);
      std::reverse(rels.begin(), rels.end());
    }
    Group h = Group::make(g.ambient_dim(), g.base(), rels);
    // h contains g; equal iff the extra relation already lies in g.
    CHECK(contains_subgroup(h, g));
    bool eq = equal_subgroups(g, h);
    CHECK(eq == equal_subgroups(h, g));
    CHECK(equal_subgroups(h, h));
  }
}
