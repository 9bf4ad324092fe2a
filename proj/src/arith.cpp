#include "tfab/arith.hpp"

#include <algorithm>
#include <random>

namespace tfab {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::NotInvertible: return "NotInvertible";
    case ErrorCode::UndefinedOnZero: return "UndefinedOnZero";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotFullRank: return "NotFullRank";
    case ErrorCode::BadRelation: return "BadRelation";
    case ErrorCode::NonPrimeInUniverse: return "NonPrimeInUniverse";
    case ErrorCode::ZeroElement: return "ZeroElement";
    case ErrorCode::NotMember: return "NotMember";
    case ErrorCode::EmptySpan: return "EmptySpan";
    case ErrorCode::OutsideRepresentationClass: return "OutsideRepresentationClass";
    case ErrorCode::InvalidFunctional: return "InvalidFunctional";
    case ErrorCode::RankCapExceeded: return "RankCapExceeded";
    case ErrorCode::NotADecomposition: return "NotADecomposition";
    case ErrorCode::NotHomogeneous: return "NotHomogeneous";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::BadConfig: return "BadConfig";
    case ErrorCode::NotASummand: return "NotASummand";
    case ErrorCode::NormalizationFailed: return "NormalizationFailed";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownIdentifier: return "UnknownIdentifier";
  }
  return "Unknown";
}

std::ostream& operator<<(std::ostream& os, ExtNat e) { return os << e.str(); }

Int mod_floor(const Int& a, const Int& m) {
  Int r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

Congruence Congruence::make(const Int& r, const Int& m) {
  if (m < 1) throw Error(ErrorCode::Infeasible, "modulus must be positive");
  return Congruence{mod_floor(r, m), m};
}

Congruence crt_solve(const std::vector<Congruence>& constraints) {
  if (constraints.empty()) throw Error(ErrorCode::Infeasible, "empty congruence system");
  Int r = 0, m = 1;
  for (const auto& c : constraints) {
    if (c.modulus < 1) throw Error(ErrorCode::Infeasible, "modulus must be positive");
    Int g, s, t;
    mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), m.get_mpz_t(), c.modulus.get_mpz_t());
    Int diff = c.residue - r;
    if (mod_floor(diff, g) != 0) {
      throw Error(ErrorCode::Infeasible, "congruences conflict");
    }
    // r + m * s * diff / g satisfies both.
    Int lcm = m / g * c.modulus;
    Int step = diff / g * s;
    r = mod_floor(r + m * step, lcm);
    m = lcm;
  }
  return Congruence{r, m};
}

Int mod_inverse(const Int& a, const Int& m) {
  if (m < 1) throw Error(ErrorCode::NotInvertible, "modulus must be positive");
  if (m == 1) return 0;
  Int inv;
  Int am = mod_floor(a, m);
  if (mpz_invert(inv.get_mpz_t(), am.get_mpz_t(), m.get_mpz_t()) == 0) {
    throw Error(ErrorCode::NotInvertible, a.get_str() + " mod " + m.get_str());
  }
  return mod_floor(inv, m);
}

long p_valuation(const Int& z, Prime p) {
  if (z == 0) throw Error(ErrorCode::UndefinedOnZero, "valuation of zero");
  Int pp = Int(static_cast<unsigned long>(p));
  Int rest;
  return static_cast<long>(mpz_remove(rest.get_mpz_t(), z.get_mpz_t(), pp.get_mpz_t()));
}

long p_valuation(const Rat& q, Prime p) {
  if (q == 0) throw Error(ErrorCode::UndefinedOnZero, "valuation of zero");
  return p_valuation(q.get_num(), p) - p_valuation(q.get_den(), p);
}

Int floor_rat(const Rat& q) {
  Int r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

Int rat_mod(const Rat& q, const Int& m) {
  if (m == 1) return 0;
  Int inv = mod_inverse(q.get_den(), m);
  return mod_floor(q.get_num() * inv, m);
}

Int pow_int(Prime p, unsigned long e) {
  Int r;
  mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(p), e);
  return r;
}

bool is_prime(const Int& n) {
  if (n < 2) return false;
  return mpz_probab_prime_p(n.get_mpz_t(), 40) > 0;
}

bool is_prime(Prime p) { return is_prime(Int(static_cast<unsigned long>(p))); }

namespace {

Int pollard_rho(const Int& n) {
  if (mpz_even_p(n.get_mpz_t())) return 2;
  std::mt19937_64 gen(12345);
  for (;;) {
    Int c = Int(static_cast<unsigned long>(gen() % 1000 + 1));
    Int x = 2, y = 2, d = 1;
    auto f = [&](const Int& v) { return mod_floor(v * v + c, n); };
    while (d == 1) {
      x = f(x);
      y = f(f(y));
      Int diff = abs(x - y);
      mpz_gcd(d.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
    }
    if (d != n) return d;
  }
}

void factor_into(Int n, std::vector<Int>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    out.push_back(n);
    return;
  }
  Int d = pollard_rho(n);
  factor_into(d, out);
  factor_into(n / d, out);
}

}  // namespace

std::vector<Int> prime_factors(const Int& n0) {
  if (n0 == 0) throw Error(ErrorCode::UndefinedOnZero, "factorization of zero");
  Int n = abs(n0);
  std::vector<Int> out;
  for (unsigned long p = 2; p < 1000 && n > 1; ++p) {
    if (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      out.emplace_back(p);
      while (mpz_divisible_ui_p(n.get_mpz_t(), p)) n /= p;
    }
  }
  if (n > 1) factor_into(n, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Prime> first_primes(std::size_t count, const std::vector<Prime>& skip) {
  std::vector<Prime> out;
  for (Prime p = 2; out.size() < count; ++p) {
    if (is_prime(p) && std::find(skip.begin(), skip.end(), p) == skip.end()) out.push_back(p);
  }
  return out;
}

Prime to_prime(const Int& p) {
  if (!p.fits_ulong_p()) throw Error(ErrorCode::NonPrimeInUniverse, "prime too large: " + p.get_str());
  return p.get_ui();
}

std::string rat_str(const Rat& q) { return q.get_str(); }

Rat parse_rat(const std::string& s) {
  Rat q;
  if (q.set_str(s, 10) != 0) throw Error(ErrorCode::ParseError, "bad rational '" + s + "'");
  if (q.get_den() == 0) throw Error(ErrorCode::ParseError, "zero denominator in '" + s + "'");
  q.canonicalize();
  return q;
}

}  // namespace tfab
