#pragma once

#include "tfab/group.hpp"

#include <optional>
#include <string>

namespace tfab {

/// A projection f: G -> R onto a pure rank-1 subgroup R, written f(y) = functional(y) * line
/// with y and line in the base coordinates of G.
struct SplittingFunctional {
  Group target;        // R, a rank-1 presentation in G's ambient space
  Element line;        // generator direction of R, in G coordinates
  QVec functional;     // images f(e_i) = functional[i] * line
  QMat matrix() const; // n x n matrix of f in G coordinates
};

/// Hom(G, D_rho) for the rank-1 group D_rho of rationals with characteristic rho, as functionals
/// in G coordinates: the Z[1/inverted]-span of `basis`, where `inverted` are the INF primes of rho.
struct HomLattice {
  QMat basis;
  std::set<Prime> inverted;
};
HomLattice hom_lattice(const Group& g, const Characteristic& rho);

/// Decides whether purify(G, {x}) is a direct summand, returning the canonical projection if so.
/// Throws ZeroElement, NotMember.
std::optional<SplittingFunctional> baer_split(const Group& g, const Element& x);

/// Throws InvalidFunctional naming the first violated condition.
void verify_functional(const Group& g, const SplittingFunctional& f);

/// ker f, with G = R + ker f verified. Throws InvalidFunctional.
Group kernel_presentation(const Group& g, const SplittingFunctional& f);

/// End(G) inside the algebra spanned by the allowed matrix units.
struct EndDescription {
  std::size_t rank = 0;
  std::vector<std::pair<std::size_t, std::size_t>> units;  // (row, col): e_col -> e_row allowed
  LocalModel model;  // coefficients over the units that give endomorphisms
  QMat lattice;      // Z-basis of a full sublattice of End(G) in unit coordinates

  QMat to_matrix(const QVec& coeffs) const;
  bool contains(const QMat& m) const;
};

inline constexpr std::size_t kDefaultEndRankCap = 6;

/// Throws RankCapExceeded.
EndDescription end_integrality_basis(const Group& g, std::size_t rank_cap = kDefaultEndRankCap);

struct IdempotentReport {
  std::vector<QMat> idempotents;  // always starts with 0 and the identity
  unsigned bound = 0;
  bool exhaustive_for_lines = false;  // rank <= 3: every nontrivial idempotent has a rank-1 image or kernel
  bool only_trivial() const { return idempotents.size() <= 2; }
};

/// Nontrivial idempotents x (x) mu and 1 - x (x) mu over primitive integer lines x with max-norm
/// at most `bound` in G coordinates. Throws RankCapExceeded.
IdempotentReport idempotent_search(const Group& g, unsigned bound, std::size_t rank_cap = kDefaultEndRankCap);

/// Rational matrix of an endomorphism in G coordinates is an endomorphism and idempotent.
bool is_idempotent_endomorphism(const Group& g, const QMat& e);

struct Decomposition {
  Group a;
  Group h;
};

struct MonoWitness {
  bool ok = false;
  QMat h2_to_h;  // pi_H restricted to H', in base coordinates (rows index H coordinates)
  QMat h_to_h2;  // pi_H' restricted to H
  std::string failure;
};

/// Throws NotADecomposition, NotHomogeneous.
MonoWitness mono_equivalence_witness(const Group& g, const Decomposition& d1, const Decomposition& d2);

}  // namespace tfab
