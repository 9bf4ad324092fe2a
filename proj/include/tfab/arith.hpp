#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace tfab {

using Int = mpz_class;
using Rat = mpq_class;
using Prime = std::uint64_t;

enum class ErrorCode {
  Infeasible,
  NotInvertible,
  UndefinedOnZero,
  DimensionMismatch,
  NotFullRank,
  BadRelation,
  NonPrimeInUniverse,
  ZeroElement,
  NotMember,
  EmptySpan,
  OutsideRepresentationClass,
  InvalidFunctional,
  RankCapExceeded,
  NotADecomposition,
  NotHomogeneous,
  PreconditionViolated,
  BadConfig,
  NotASummand,
  NormalizationFailed,
  ParseError,
  UnknownIdentifier,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

/// Natural number or infinity. Used for heights and characteristic entries.
class ExtNat {
 public:
  constexpr ExtNat() = default;
  constexpr explicit ExtNat(std::uint64_t v) : value_(v) {}
  static constexpr ExtNat inf() {
    ExtNat r;
    r.inf_ = true;
    return r;
  }

  constexpr bool is_inf() const { return inf_; }
  /// Finite value; 0 when infinite.
  constexpr std::uint64_t value() const { return inf_ ? 0 : value_; }

  friend constexpr ExtNat operator+(ExtNat a, ExtNat b) {
    if (a.inf_ || b.inf_) return inf();
    return ExtNat(a.value_ + b.value_);
  }
  friend constexpr ExtNat min(ExtNat a, ExtNat b) { return a <= b ? a : b; }
  friend constexpr ExtNat max(ExtNat a, ExtNat b) { return a <= b ? b : a; }

  friend constexpr bool operator==(ExtNat a, ExtNat b) {
    return a.inf_ == b.inf_ && (a.inf_ || a.value_ == b.value_);
  }
  friend constexpr std::strong_ordering operator<=>(ExtNat a, ExtNat b) {
    if (a.inf_ && b.inf_) return std::strong_ordering::equal;
    if (a.inf_) return std::strong_ordering::greater;
    if (b.inf_) return std::strong_ordering::less;
    return a.value_ <=> b.value_;
  }

  std::string str() const { return inf_ ? "inf" : std::to_string(value_); }

 private:
  std::uint64_t value_ = 0;
  bool inf_ = false;
};

std::ostream& operator<<(std::ostream& os, ExtNat e);

/// residue mod modulus with 0 <= residue < modulus.
struct Congruence {
  Int residue;
  Int modulus;

  static Congruence make(const Int& r, const Int& m);
  bool operator==(const Congruence& o) const { return residue == o.residue && modulus == o.modulus; }
};

/// Least non-negative solution of a system of congruences; modulus is the lcm.
Congruence crt_solve(const std::vector<Congruence>& constraints);

/// Inverse of a modulo m in [0, m).
Int mod_inverse(const Int& a, const Int& m);

/// Non-negative residue.
Int mod_floor(const Int& a, const Int& m);

/// p-adic valuation of a non-zero rational.
long p_valuation(const Rat& q, Prime p);
long p_valuation(const Int& z, Prime p);

/// Floor of a rational.
Int floor_rat(const Rat& q);

/// Residue of a p'-integral rational modulo m (denominator coprime to m).
Int rat_mod(const Rat& q, const Int& m);

Int pow_int(Prime p, unsigned long e);

bool is_prime(Prime p);
bool is_prime(const Int& n);

/// Prime factors (distinct, ascending) of |n|, n != 0.
std::vector<Int> prime_factors(const Int& n);

/// The first `count` primes, optionally skipping a set of primes.
std::vector<Prime> first_primes(std::size_t count, const std::vector<Prime>& skip = {});

Prime to_prime(const Int& p);

std::string rat_str(const Rat& q);
Rat parse_rat(const std::string& s);

}  // namespace tfab
