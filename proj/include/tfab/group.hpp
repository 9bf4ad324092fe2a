#pragma once

#include "tfab/linalg.hpp"
#include "tfab/types.hpp"

#include <map>
#include <set>
#include <vector>

namespace tfab {

/// Local structure at one prime: the localization is span(divisible) ⊕ Z_(p)-span(lattice).
struct LocalData {
  QMat divisible;
  QMat lattice;
  QMat coord;  // inverse of [divisible; lattice]^T, maps a vector to its coefficients
};

/// A subgroup of Q^dim described prime by prime. At primes absent from `local`, the
/// localization is the standard lattice Z_(l)^dim.
class LocalModel {
 public:
  LocalModel() = default;
  explicit LocalModel(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  const std::map<Prime, LocalData>& local() const { return local_; }
  void set_local(Prime p, QMat divisible, QMat lattice);

  bool contains(const QVec& y) const;
  /// y must be a non-zero member.
  ExtNat height(const QVec& y, Prime p) const;
  bool divisible_at(const QVec& y, Prime p) const;
  QMat divisible_basis(Prime p) const;

  /// {t in Q^r : C t in target}, where C has target.dim() rows and r columns, of full column rank.
  static LocalModel preimage(const QMat& c, std::size_t r, const LocalModel& target);

  /// Z-basis of the subgroup obtained by replacing each divisible part by the lattice spanned
  /// by its stored basis.
  QMat integral_basis() const;

 private:
  std::size_t dim_ = 0;
  std::map<Prime, LocalData> local_;
};

struct BaseLine {
  QVec direction;  // in the ambient space
  Characteristic chi;
};

/// w / m with w an integer vector over the base directions.
struct Relation {
  ZVec w;
  Int m;
  bool operator==(const Relation&) const = default;
};

using Element = QVec;  // coordinates over the base directions

/// A validated presentation G = sum_i D_{chi_i} v_i + sum_j Z (w_j / m_j).
class Group {
 public:
  Group() = default;

  /// Validates and canonicalizes. Throws NotFullRank, BadRelation, NonPrimeInUniverse, DimensionMismatch.
  static Group make(std::size_t ambient_dim, std::vector<BaseLine> base, std::vector<Relation> relations);
  /// Base directions are the standard basis of Q^n.
  static Group standard(std::vector<Characteristic> chars, std::vector<Relation> relations);
  static Group zero(std::size_t ambient_dim);

  std::size_t rank() const { return base_.size(); }
  std::size_t ambient_dim() const { return ambient_dim_; }
  const std::vector<BaseLine>& base() const { return base_; }
  const std::vector<Relation>& relations() const { return relations_; }
  const std::set<Prime>& universe() const { return universe_; }
  const LocalModel& model() const { return model_; }
  QMat directions() const;

  QVec to_ambient(const Element& x) const;
  std::optional<Element> to_coords(const QVec& ambient) const;

  bool member(const Element& x) const;
  ExtNat height(const Element& x, Prime p) const;
  Characteristic characteristic_of(const Element& x) const;
  TypeClass type_of(const Element& x) const;
  /// Type of the i-th base direction.
  TypeClass base_type(std::size_t i) const { return type_of_char(base_[i].chi); }

  /// Presentation equality (same ambient, base lines and relations in order).
  bool operator==(const Group& o) const;

 private:
  void check_dim(const Element& x) const;
  void build_model();

  std::size_t ambient_dim_ = 0;
  std::vector<BaseLine> base_;
  std::vector<Relation> relations_;
  std::set<Prime> universe_;
  LocalModel model_;
  std::vector<std::size_t> coord_rows_;  // ambient coordinates used to solve for base coordinates
  QMat coord_inv_;
};

/// Exhaustive search over coefficient representations; prime exponents capped at `budget`.
bool member_bruteforce(const Group& g, const Element& x, unsigned budget);

/// G ∩ span(basis), where basis vectors are base coordinates of G.
Group subgroup_on_subspace(const Group& g, const QMat& basis);
/// Pure closure of the given members. Throws EmptySpan, NotMember.
Group purify(const Group& g, const std::vector<Element>& s);
Group p_divisible_part(const Group& g, Prime p);
/// {x : type(x) >= tau} ∪ {0}.
Group socle(const Group& g, const TypeClass& tau);

/// External direct sum in the ambient Q^{n+m}.
Group direct_sum(const Group& g, const Group& h);
/// Internal sum of subgroups of one ambient space with independent spans.
Group internal_sum(const std::vector<Group>& parts);
/// Image under an invertible ambient linear map.
Group apply_linear(const QMat& u, const Group& g);

/// h ⊆ g as subgroups of the same ambient space.
bool contains_subgroup(const Group& g, const Group& h);
bool equal_subgroups(const Group& g, const Group& h);

/// Presentation of a model of dimension k whose coordinates map to the ambient through `ambient_basis`.
Group presentation_from_model(const LocalModel& model, const QMat& ambient_basis, std::size_t ambient_dim);

/// Base generators at their finite level: v_i / prod_{finite p} p^{chi_i(p)}, as base coordinates.
Element base_generator(const Group& g, std::size_t i);

}  // namespace tfab
