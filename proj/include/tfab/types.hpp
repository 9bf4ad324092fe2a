#pragma once

#include "tfab/arith.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace tfab {

/// Height data with finite support: prime -> exponent (INF allowed). Zero entries are never stored.
class Characteristic {
 public:
  Characteristic() = default;
  explicit Characteristic(const std::map<Prime, ExtNat>& entries);

  ExtNat at(Prime p) const;
  void set(Prime p, ExtNat e);
  const std::map<Prime, ExtNat>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  bool operator==(const Characteristic&) const = default;

  /// `2^inf * 3^2`, or `Z` when empty.
  std::string str() const;
  static Characteristic parse(const std::string& text);

 private:
  std::map<Prime, ExtNat> entries_;
};

/// A type, stored canonically as the set of primes where the characteristic is infinite.
class TypeClass {
 public:
  TypeClass() = default;
  explicit TypeClass(std::set<Prime> inf_primes) : primes_(std::move(inf_primes)) {}

  const std::set<Prime>& inf_primes() const { return primes_; }
  bool contains(Prime p) const { return primes_.count(p) > 0; }
  bool is_integers() const { return primes_.empty(); }

  auto operator<=>(const TypeClass&) const = default;
  bool operator==(const TypeClass&) const = default;

  /// `{2,5}`; the type of the integers is `{}`.
  std::string str() const;
  static TypeClass parse(const std::string& text);

 private:
  std::set<Prime> primes_;
};

enum class CharOrder { LE, GE, EQ, INCOMPARABLE };

CharOrder char_compare(const Characteristic& a, const Characteristic& b);
Characteristic char_inf(const Characteristic& a, const Characteristic& b);
TypeClass type_of_char(const Characteristic& a);
bool type_le(const TypeClass& t1, const TypeClass& t2);
TypeClass type_meet(const TypeClass& t1, const TypeClass& t2);

using TypeMultiset = std::vector<TypeClass>;  // kept sorted

std::string types_str(const TypeMultiset& types);

}  // namespace tfab
