#include "tfab/group.hpp"

#include <algorithm>
#include <functional>

namespace tfab {

// ---------------------------------------------------------------------------
// LocalModel

void LocalModel::set_local(Prime p, QMat divisible, QMat lattice) {
  QMat stacked = divisible;
  stacked.insert(stacked.end(), lattice.begin(), lattice.end());
  if (stacked.size() != dim_) throw Error(ErrorCode::DimensionMismatch, "local data must span the space");
  auto coord = inverse(transpose(stacked, dim_));
  if (!coord) throw Error(ErrorCode::DimensionMismatch, "local data is not a basis");
  local_[p] = LocalData{std::move(divisible), std::move(lattice), std::move(*coord)};
}

bool LocalModel::contains(const QVec& y) const {
  if (y.size() != dim_) throw Error(ErrorCode::DimensionMismatch, "element dimension");
  Int den = 1;
  for (const auto& x : y) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), x.get_den_mpz_t());
  if (den > 1) {
    for (const auto& [p, ld] : local_) {
      Int pp = static_cast<unsigned long>(p);
      mpz_remove(den.get_mpz_t(), den.get_mpz_t(), pp.get_mpz_t());
    }
    if (den > 1) return false;
  }
  for (const auto& [p, ld] : local_) {
    QVec a = matvec(ld.coord, y);
    for (std::size_t k = ld.divisible.size(); k < dim_; ++k)
      if (a[k] != 0 && p_valuation(a[k], p) < 0) return false;
  }
  return true;
}

ExtNat LocalModel::height(const QVec& y, Prime p) const {
  auto it = local_.find(p);
  long best = 0;
  bool any = false;
  if (it == local_.end()) {
    for (const auto& x : y) {
      if (x == 0) continue;
      long v = p_valuation(x, p);
      if (!any || v < best) best = v;
      any = true;
    }
  } else {
    QVec a = matvec(it->second.coord, y);
    for (std::size_t k = it->second.divisible.size(); k < dim_; ++k) {
      if (a[k] == 0) continue;
      long v = p_valuation(a[k], p);
      if (!any || v < best) best = v;
      any = true;
    }
    if (!any) return ExtNat::inf();
  }
  if (!any) throw Error(ErrorCode::ZeroElement, "height of zero");
  if (best < 0) throw Error(ErrorCode::NotMember, "element is not a member");
  return ExtNat(static_cast<std::uint64_t>(best));
}

bool LocalModel::divisible_at(const QVec& y, Prime p) const {
  auto it = local_.find(p);
  if (it == local_.end()) return is_zero(y);
  QVec a = matvec(it->second.coord, y);
  for (std::size_t k = it->second.divisible.size(); k < dim_; ++k)
    if (a[k] != 0) return false;
  return true;
}

QMat LocalModel::divisible_basis(Prime p) const {
  auto it = local_.find(p);
  return it == local_.end() ? QMat{} : it->second.divisible;
}

namespace {

bool unimodular_at(const QMat& basis, Prime p, std::size_t dim) {
  for (const auto& row : basis)
    for (const auto& x : row)
      if (x != 0 && p_valuation(x, p) < 0) return false;
  Rat d = det(transpose(basis, dim));
  return d != 0 && p_valuation(d, p) == 0;
}

}  // namespace

LocalModel LocalModel::preimage(const QMat& c, std::size_t r, const LocalModel& target) {
  LocalModel out(r);
  if (r == 0) return out;
  std::set<Prime> primes;
  for (const auto& [p, ld] : target.local_) primes.insert(p);
  Int den = 1;
  for (const auto& row : c)
    for (const auto& x : row) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), x.get_den_mpz_t());
  if (den > 1)
    for (const auto& f : prime_factors(den)) primes.insert(to_prime(f));
  ZMat cz;
  for (const auto& row : c) {
    ZVec z(r);
    for (std::size_t j = 0; j < r; ++j) z[j] = row[j].get_num() * (den / row[j].get_den());
    cz.push_back(std::move(z));
  }
  for (auto p : index_primes(cz, r)) primes.insert(p);

  for (auto p : primes) {
    LocalPreimage pre;
    auto it = target.local_.find(p);
    if (it != target.local_.end()) {
      QMat y = matmul(it->second.coord, c);
      QMat ylat(y.begin() + static_cast<long>(it->second.divisible.size()), y.end());
      pre = local_preimage(ylat, r, p);
    } else {
      pre = local_preimage(c, r, p);
    }
    if (pre.divisible.empty() && unimodular_at(pre.lattice, p, r)) continue;
    out.set_local(p, std::move(pre.divisible), std::move(pre.lattice));
  }
  return out;
}

QMat LocalModel::integral_basis() const {
  std::vector<std::pair<Prime, QMat>> bases;
  for (const auto& [p, ld] : local_) {
    QMat b = ld.divisible;
    b.insert(b.end(), ld.lattice.begin(), ld.lattice.end());
    bases.emplace_back(p, std::move(b));
  }
  return glue_local_lattices(dim_, bases);
}

// ---------------------------------------------------------------------------
// Group

Group Group::make(std::size_t ambient_dim, std::vector<BaseLine> base, std::vector<Relation> relations) {
  Group g;
  g.ambient_dim_ = ambient_dim;
  std::size_t n = base.size();
  QMat dirs;
  for (auto& b : base) {
    if (b.direction.size() != ambient_dim) throw Error(ErrorCode::DimensionMismatch, "direction dimension");
    for (auto& x : b.direction) x.canonicalize();
    dirs.push_back(b.direction);
  }
  if (tfab::rank(dirs, ambient_dim) != n) throw Error(ErrorCode::NotFullRank, "base directions are dependent");
  for (const auto& b : base)
    for (const auto& [p, e] : b.chi.entries()) {
      if (!is_prime(p)) throw Error(ErrorCode::NonPrimeInUniverse, std::to_string(p) + " is not prime");
      g.universe_.insert(p);
    }
  for (auto& r : relations) {
    if (r.w.size() != n) throw Error(ErrorCode::DimensionMismatch, "relation length");
    if (r.m < 1) throw Error(ErrorCode::BadRelation, "relation modulus must be positive");
    Int c = content(r.w);
    if (c == 0) throw Error(ErrorCode::BadRelation, "relation vector is zero");
    Int gg;
    mpz_gcd(gg.get_mpz_t(), c.get_mpz_t(), r.m.get_mpz_t());
    if (gg > 1) {
      for (auto& x : r.w) x /= gg;
      r.m /= gg;
    }
    if (r.m == 1) continue;  // integral: already in the base subgroup
    for (const auto& f : prime_factors(r.m)) g.universe_.insert(to_prime(f));
    g.relations_.push_back(std::move(r));
  }
  g.base_ = std::move(base);
  g.build_model();
  return g;
}

Group Group::standard(std::vector<Characteristic> chars, std::vector<Relation> relations) {
  std::size_t n = chars.size();
  std::vector<BaseLine> base;
  for (std::size_t i = 0; i < n; ++i) base.push_back({unit_vec(n, i), std::move(chars[i])});
  return make(n, std::move(base), std::move(relations));
}

Group Group::zero(std::size_t ambient_dim) { return make(ambient_dim, {}, {}); }

bool Group::operator==(const Group& o) const {
  if (ambient_dim_ != o.ambient_dim_ || base_.size() != o.base_.size() || relations_ != o.relations_) return false;
  for (std::size_t i = 0; i < base_.size(); ++i)
    if (base_[i].direction != o.base_[i].direction || !(base_[i].chi == o.base_[i].chi)) return false;
  return true;
}

void Group::build_model() {
  std::size_t n = base_.size();
  model_ = LocalModel(n);
  for (auto p : universe_) {
    QMat div, gens;
    std::vector<bool> inf(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      ExtNat e = base_[i].chi.at(p);
      if (e.is_inf()) {
        inf[i] = true;
        div.push_back(unit_vec(n, i));
      } else {
        gens.push_back(scale(unit_vec(n, i), Rat(1) / Rat(pow_int(p, e.value()))));
      }
    }
    for (const auto& r : relations_) {
      long v = p_valuation(r.m, p);
      if (v == 0) continue;
      QVec w(n);
      for (std::size_t i = 0; i < n; ++i) w[i] = inf[i] ? Rat(0) : Rat(r.w[i]) / Rat(pow_int(p, static_cast<unsigned long>(v)));
      for (auto& x : w) x.canonicalize();
      gens.push_back(std::move(w));
    }
    QMat lat = local_span_basis(gens, p, n);
    model_.set_local(p, std::move(div), std::move(lat));
  }
  // Coordinate solver: pick rank-many ambient rows where the direction matrix is invertible.
  QMat dirs = directions();
  coord_rows_.clear();
  coord_inv_.clear();
  if (n == 0) return;
  RowEchelon e = rref(dirs, ambient_dim_);
  coord_rows_ = e.pivots;
  QMat sub(n, QVec(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) sub[i][j] = dirs[j][coord_rows_[i]];
  coord_inv_ = *inverse(sub);
}

QMat Group::directions() const {
  QMat d;
  for (const auto& b : base_) d.push_back(b.direction);
  return d;
}

void Group::check_dim(const Element& x) const {
  if (x.size() != rank()) throw Error(ErrorCode::DimensionMismatch, "element has wrong length");
}

QVec Group::to_ambient(const Element& x) const {
  check_dim(x);
  QVec y(ambient_dim_, Rat(0));
  for (std::size_t j = 0; j < rank(); ++j) {
    if (x[j] == 0) continue;
    for (std::size_t i = 0; i < ambient_dim_; ++i) y[i] += x[j] * base_[j].direction[i];
  }
  return y;
}

std::optional<Element> Group::to_coords(const QVec& ambient) const {
  if (ambient.size() != ambient_dim_) throw Error(ErrorCode::DimensionMismatch, "ambient dimension");
  std::size_t n = rank();
  QVec rhs(n);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = ambient[coord_rows_[i]];
  Element x = matvec(coord_inv_, rhs);
  if (to_ambient(x) != ambient) return std::nullopt;
  return x;
}

bool Group::member(const Element& x) const {
  check_dim(x);
  return model_.contains(x);
}

ExtNat Group::height(const Element& x, Prime p) const {
  check_dim(x);
  if (is_zero(x)) throw Error(ErrorCode::ZeroElement, "height of zero");
  if (!member(x)) throw Error(ErrorCode::NotMember, "element is not a member");
  return model_.height(x, p);
}

Characteristic Group::characteristic_of(const Element& x) const {
  check_dim(x);
  if (is_zero(x)) throw Error(ErrorCode::ZeroElement, "characteristic of zero");
  if (!member(x)) throw Error(ErrorCode::NotMember, "element is not a member");
  Characteristic c;
  for (auto p : universe_) c.set(p, model_.height(x, p));
  // Outside the universe the localization is standard, so heights are coordinate valuations.
  Int g = 0;
  for (const auto& v : x)
    if (v != 0) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_num_mpz_t());
  if (g > 1)
    for (const auto& f : prime_factors(g)) {
      Prime p = to_prime(f);
      if (!universe_.count(p)) c.set(p, model_.height(x, p));
    }
  return c;
}

TypeClass Group::type_of(const Element& x) const {
  check_dim(x);
  if (is_zero(x)) throw Error(ErrorCode::ZeroElement, "type of zero");
  if (!member(x)) throw Error(ErrorCode::NotMember, "element is not a member");
  std::set<Prime> ps;
  for (auto p : universe_)
    if (model_.divisible_at(x, p)) ps.insert(p);
  return TypeClass(std::move(ps));
}

Element base_generator(const Group& g, std::size_t i) {
  Element e = unit_vec(g.rank(), i);
  Int d = 1;
  for (const auto& [p, h] : g.base()[i].chi.entries())
    if (!h.is_inf()) d *= pow_int(p, h.value());
  e[i] = Rat(1) / Rat(d);
  e[i].canonicalize();
  return e;
}

// ---------------------------------------------------------------------------
// Brute-force membership

bool member_bruteforce(const Group& g, const Element& x, unsigned budget) {
  std::size_t n = g.rank();
  if (x.size() != n) throw Error(ErrorCode::DimensionMismatch, "element has wrong length");
  const auto& rels = g.relations();
  auto in_base = [&](const QVec& a) {
    for (std::size_t i = 0; i < n; ++i) {
      if (a[i] == 0) continue;
      Int den = a[i].get_den();
      if (den == 1) continue;
      for (const auto& f : prime_factors(den)) {
        Prime p = to_prime(f);
        ExtNat e = g.base()[i].chi.at(p);
        long cap = e.is_inf() ? static_cast<long>(budget) : static_cast<long>(std::min<std::uint64_t>(e.value(), budget));
        if (p_valuation(den, p) > cap) return false;
      }
    }
    return true;
  };
  QVec cur = x;
  std::function<bool(std::size_t)> rec = [&](std::size_t j) -> bool {
    if (j == rels.size()) return in_base(cur);
    const auto& r = rels[j];
    QVec step(n);
    for (std::size_t i = 0; i < n; ++i) {
      step[i] = Rat(r.w[i]) / Rat(r.m);
      step[i].canonicalize();
    }
    QVec saved = cur;
    for (Int c = 0; c < r.m; ++c) {
      if (rec(j + 1)) {
        cur = saved;
        return true;
      }
      cur = sub(cur, step);
    }
    cur = saved;
    return false;
  };
  return rec(0);
}

// ---------------------------------------------------------------------------
// Subgroups from models

namespace {

bool same_span(const QMat& a, const QMat& b) { return a == b; }

bool vec_less(const QVec& a, const QVec& b) {
  auto lead = [](const QVec& v) {
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] != 0) return i;
    return v.size();
  };
  std::size_t la = lead(a), lb = lead(b);
  if (la != lb) return la < lb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return abs(a[i]) < abs(b[i]) || (abs(a[i]) == abs(b[i]) && a[i] > b[i]);
  }
  return false;
}

// Multiply a primitive vector by the least positive integer that puts it inside the model.
QVec scale_into(const LocalModel& m, QVec d) {
  Int s = 1;
  for (const auto& [p, ld] : m.local()) {
    QVec a = matvec(ld.coord, d);
    long worst = 0;
    for (std::size_t k = ld.divisible.size(); k < m.dim(); ++k)
      if (a[k] != 0) worst = std::min(worst, p_valuation(a[k], p));
    if (worst < 0) s *= pow_int(p, static_cast<unsigned long>(-worst));
  }
  if (s != 1) d = scale(d, Rat(s));
  return d;
}

}  // namespace

Group presentation_from_model(const LocalModel& model, const QMat& ambient_basis, std::size_t ambient_dim) {
  std::size_t k = model.dim();
  if (k == 0) return Group::zero(ambient_dim);

  // Intersection-closed family of divisible subspaces plus the whole space.
  std::vector<QMat> family;
  auto add_unique = [&](QMat s) {
    if (s.empty()) return;
    for (const auto& f : family)
      if (same_span(f, s)) return;
    family.push_back(std::move(s));
  };
  for (const auto& [p, ld] : model.local()) add_unique(rref(ld.divisible, k).rows);
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      add_unique(intersect_spans(family[i], family[j], k));
      if (family.size() > 4096)
        throw Error(ErrorCode::OutsideRepresentationClass, "divisible subspaces do not admit an adapted basis");
    }
  }
  add_unique(identity(k));
  std::stable_sort(family.begin(), family.end(), [](const QMat& a, const QMat& b) { return a.size() < b.size(); });

  QMat chosen;
  for (const auto& x : family) {
    QMat cur;
    for (const auto& c : chosen)
      if (span_contains(x, c, k)) cur.push_back(c);
    for (const auto& row : x) {
      if (span_contains(cur, row, k)) continue;
      QVec z = to_rat(to_int_primitive(row));
      cur.push_back(z);
      chosen.push_back(std::move(z));
    }
  }
  for (const auto& [p, ld] : model.local()) {
    std::size_t in = 0;
    for (const auto& c : chosen)
      if (model.divisible_at(c, p)) ++in;
    if (in != ld.divisible.size())
      throw Error(ErrorCode::OutsideRepresentationClass,
                  "divisible subspaces at different primes are not simultaneously split by a basis");
  }
  std::stable_sort(chosen.begin(), chosen.end(), vec_less);
  for (auto& c : chosen) c = scale_into(model, std::move(c));

  // Model in the adapted coordinates.
  QMat cmat = transpose(chosen, k);
  LocalModel adapted = LocalModel::preimage(cmat, k, model);

  std::vector<BaseLine> base;
  for (std::size_t i = 0; i < k; ++i) {
    QVec e = unit_vec(k, i);
    Characteristic chi;
    for (const auto& [p, ld] : adapted.local()) {
      if (adapted.divisible_at(e, p))
        chi.set(p, ExtNat::inf());
      else
        chi.set(p, adapted.height(e, p));
    }
    QVec dir(ambient_dim, Rat(0));
    for (std::size_t j = 0; j < k; ++j)
      if (chosen[i][j] != 0)
        for (std::size_t a = 0; a < ambient_dim; ++a) dir[a] += chosen[i][j] * ambient_basis[j][a];
    base.push_back({std::move(dir), std::move(chi)});
  }
  std::vector<Relation> rels;
  for (const auto& [p, ld] : adapted.local()) {
    for (const auto& b0 : ld.lattice) {
      QVec b = b0;
      long e = 0;
      for (std::size_t i = 0; i < k; ++i) {
        ExtNat chi = base[i].chi.at(p);
        if (chi.is_inf()) {
          b[i] = 0;
          continue;
        }
        if (b[i] == 0) continue;
        long v = p_valuation(b[i], p);
        if (-v <= static_cast<long>(chi.value())) {
          b[i] = 0;  // already in the base subgroup at p
          continue;
        }
        e = std::max(e, -v);
      }
      if (e == 0) continue;
      Int pe = pow_int(p, static_cast<unsigned long>(e));
      ZVec w(k);
      for (std::size_t i = 0; i < k; ++i) w[i] = b[i] == 0 ? Int(0) : rat_mod(b[i] * Rat(pe), pe);
      if (content(w) == 0) continue;
      rels.push_back({std::move(w), pe});
    }
  }
  return Group::make(ambient_dim, std::move(base), std::move(rels));
}

Group subgroup_on_subspace(const Group& g, const QMat& basis) {
  std::size_t n = g.rank();
  ZMat ints;
  for (const auto& b : basis) {
    if (b.size() != n) throw Error(ErrorCode::DimensionMismatch, "subspace vector length");
    if (!is_zero(b)) ints.push_back(to_int_primitive(b));
  }
  if (ints.empty()) return Group::zero(g.ambient_dim());
  ZMat d = lattice_saturate(ints, n);
  std::size_t k = d.size();
  QMat dq = to_rat(d);
  QMat c = transpose(dq, n);  // n x k, columns are the saturated basis
  LocalModel m = LocalModel::preimage(c, k, g.model());
  QMat amb;
  for (const auto& v : dq) amb.push_back(g.to_ambient(v));
  return presentation_from_model(m, amb, g.ambient_dim());
}

Group purify(const Group& g, const std::vector<Element>& s) {
  QMat nonzero;
  for (const auto& x : s) {
    if (x.size() != g.rank()) throw Error(ErrorCode::DimensionMismatch, "element has wrong length");
    if (!g.member(x)) throw Error(ErrorCode::NotMember, "purify needs members");
    if (!is_zero(x)) nonzero.push_back(x);
  }
  if (nonzero.empty()) throw Error(ErrorCode::EmptySpan, "nothing to purify");
  return subgroup_on_subspace(g, nonzero);
}

Group p_divisible_part(const Group& g, Prime p) {
  QMat basis;
  for (std::size_t i = 0; i < g.rank(); ++i)
    if (g.base()[i].chi.at(p).is_inf()) basis.push_back(unit_vec(g.rank(), i));
  return subgroup_on_subspace(g, basis);
}

Group socle(const Group& g, const TypeClass& tau) {
  if (tau.is_integers()) return g;
  QMat basis;
  for (std::size_t i = 0; i < g.rank(); ++i)
    if (type_le(tau, g.base_type(i))) basis.push_back(unit_vec(g.rank(), i));
  return subgroup_on_subspace(g, basis);
}

Group direct_sum(const Group& g, const Group& h) {
  std::size_t n = g.ambient_dim(), m = h.ambient_dim();
  std::vector<BaseLine> base;
  for (const auto& b : g.base()) {
    QVec d = b.direction;
    d.resize(n + m, Rat(0));
    base.push_back({std::move(d), b.chi});
  }
  for (const auto& b : h.base()) {
    QVec d(n, Rat(0));
    d.insert(d.end(), b.direction.begin(), b.direction.end());
    base.push_back({std::move(d), b.chi});
  }
  std::vector<Relation> rels;
  for (const auto& r : g.relations()) {
    ZVec w = r.w;
    w.resize(g.rank() + h.rank(), Int(0));
    rels.push_back({std::move(w), r.m});
  }
  for (const auto& r : h.relations()) {
    ZVec w(g.rank(), Int(0));
    w.insert(w.end(), r.w.begin(), r.w.end());
    rels.push_back({std::move(w), r.m});
  }
  return Group::make(n + m, std::move(base), std::move(rels));
}

Group internal_sum(const std::vector<Group>& parts) {
  if (parts.empty()) throw Error(ErrorCode::EmptySpan, "internal sum of nothing");
  std::size_t amb = parts[0].ambient_dim();
  std::size_t total = 0;
  for (const auto& p : parts) {
    if (p.ambient_dim() != amb) throw Error(ErrorCode::DimensionMismatch, "ambient dimensions differ");
    total += p.rank();
  }
  std::vector<BaseLine> base;
  std::vector<Relation> rels;
  std::size_t off = 0;
  for (const auto& p : parts) {
    for (const auto& b : p.base()) base.push_back(b);
    for (const auto& r : p.relations()) {
      ZVec w(total, Int(0));
      for (std::size_t i = 0; i < p.rank(); ++i) w[off + i] = r.w[i];
      rels.push_back({std::move(w), r.m});
    }
    off += p.rank();
  }
  try {
    return Group::make(amb, std::move(base), std::move(rels));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotFullRank) throw Error(ErrorCode::NotADecomposition, "summands are not independent");
    throw;
  }
}

Group apply_linear(const QMat& u, const Group& g) {
  std::vector<BaseLine> base;
  for (const auto& b : g.base()) base.push_back({matvec(u, b.direction), b.chi});
  return Group::make(g.ambient_dim(), std::move(base), g.relations());
}

bool contains_subgroup(const Group& g, const Group& h) {
  if (g.ambient_dim() != h.ambient_dim()) throw Error(ErrorCode::DimensionMismatch, "ambient dimensions differ");
  if (h.rank() > g.rank()) return false;
  for (std::size_t i = 0; i < h.rank(); ++i) {
    auto y = g.to_coords(h.to_ambient(base_generator(h, i)));
    if (!y || !g.member(*y)) return false;
    for (const auto& [p, e] : h.base()[i].chi.entries())
      if (e.is_inf() && !g.model().divisible_at(*y, p)) return false;
  }
  for (const auto& r : h.relations()) {
    QVec x(h.rank());
    for (std::size_t i = 0; i < h.rank(); ++i) {
      x[i] = Rat(r.w[i]) / Rat(r.m);
      x[i].canonicalize();
    }
    auto y = g.to_coords(h.to_ambient(x));
    if (!y || !g.member(*y)) return false;
  }
  return true;
}

bool equal_subgroups(const Group& g, const Group& h) {
  if (g.ambient_dim() != h.ambient_dim()) throw Error(ErrorCode::DimensionMismatch, "ambient dimensions differ");
  return g.rank() == h.rank() && contains_subgroup(g, h) && contains_subgroup(h, g);
}

}  // namespace tfab
