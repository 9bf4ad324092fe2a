#include "doctest.h"
#include "tfab/types.hpp"

#include <random>

using namespace tfab;

namespace {

Characteristic ch(std::initializer_list<std::pair<const Prime, ExtNat>> e) { return Characteristic(std::map<Prime, ExtNat>(e)); }
const ExtNat INF = ExtNat::inf();
ExtNat n(std::uint64_t v) { return ExtNat(v); }

Characteristic random_char(std::mt19937& rng) {
  Characteristic c;
  for (Prime p : {2, 3, 5}) {
    unsigned r = rng() % 5;
    if (r == 4) c.set(p, INF);
    else c.set(p, n(r));
  }
  return c;
}

}  // namespace

TEST_CASE("characteristic canonical form and text") {
  Characteristic c = ch({{2, INF}, {3, n(0)}, {5, n(2)}});
  CHECK(c.entries().size() == 2);
  CHECK(c.str() == "2^inf * 5^2");
  CHECK(Characteristic::parse("2^inf * 5^2") == c);
  CHECK(Characteristic().str() == "Z");
  CHECK(Characteristic::parse("Z").empty());
  CHECK(Characteristic::parse("3").at(3) == n(1));
  CHECK_THROWS_AS(Characteristic::parse("4^2"), Error);
  CHECK_THROWS_AS(Characteristic::parse("2^"), Error);
}

TEST_CASE("char_compare examples") {
  CHECK(char_compare(ch({{2, INF}}), {}) == CharOrder::GE);
  CHECK(char_compare(ch({{2, n(1)}}), ch({{3, n(1)}})) == CharOrder::INCOMPARABLE);
  CHECK(char_compare(ch({{2, INF}, {3, n(2)}}), ch({{2, INF}, {3, n(2)}})) == CharOrder::EQ);
}

TEST_CASE("char_inf examples") {
  CHECK(char_inf(ch({{2, INF}, {3, n(2)}}), ch({{2, n(1)}, {3, INF}})) == ch({{2, n(1)}, {3, n(2)}}));
  Characteristic a = ch({{7, n(3)}, {11, INF}});
  CHECK(char_inf(a, a) == a);
  CHECK(char_inf(ch({{2, INF}}), {}) == Characteristic());
}

TEST_CASE("type_of_char and type_le examples") {
  CHECK(type_of_char(ch({{2, INF}, {3, n(5)}})) == TypeClass({2}));
  CHECK(type_of_char({}).is_integers());
  CHECK(type_of_char(ch({{2, INF}, {5, INF}})) == TypeClass({2, 5}));
  CHECK(type_le(TypeClass{}, TypeClass({2})));
  CHECK_FALSE(type_le(TypeClass({2}), TypeClass({3})));
  CHECK(type_le(TypeClass({2, 3}), TypeClass({2, 3})));
  CHECK(TypeClass({2, 5}).str() == "{2,5}");
  CHECK(TypeClass::parse("{2,5}") == TypeClass({2, 5}));
  CHECK(TypeClass::parse("{}") == TypeClass());
}

TEST_CASE("type laws on random characteristics") {
  std::mt19937 rng(5);
  for (int t = 0; t < 500; ++t) {
    Characteristic a = random_char(rng), b = random_char(rng);
    // Perturbing finite entries keeps the type.
    Characteristic a2 = a;
    for (const auto& [p, e] : a.entries())
      if (!e.is_inf()) a2.set(p, n(rng() % 9));
    a2.set(13, n(1 + rng() % 3));
    CHECK(type_of_char(a2) == type_of_char(a));
    CharOrder o = char_compare(a, b);
    if (o == CharOrder::LE || o == CharOrder::EQ) CHECK(type_le(type_of_char(a), type_of_char(b)));
    // char_inf is the greatest lower bound: exhaustive over the small lattice.
    Characteristic m = char_inf(a, b);
    auto le = [](const Characteristic& x, const Characteristic& y) {
      CharOrder r = char_compare(x, y);
      return r == CharOrder::LE || r == CharOrder::EQ;
    };
    CHECK(le(m, a));
    CHECK(le(m, b));
    for (int k = 0; k < 20; ++k) {
      Characteristic c = random_char(rng);
      if (le(c, a) && le(c, b)) CHECK(le(c, m));
    }
    CHECK(Characteristic::parse(a.str()) == a);
  }
}
