#pragma once

#include "tfab/arith.hpp"

#include <optional>
#include <span>
#include <vector>

namespace tfab {

using QVec = std::vector<Rat>;
using ZVec = std::vector<Int>;
/// Row-major. A list of vectors is also stored this way (one vector per row).
using QMat = std::vector<QVec>;
using ZMat = std::vector<ZVec>;

QVec zero_vec(std::size_t n);
QVec unit_vec(std::size_t n, std::size_t i);
bool is_zero(const QVec& v);
QMat identity(std::size_t n);
QMat transpose(const QMat& a, std::size_t cols = 0);
QMat matmul(const QMat& a, const QMat& b);
QVec matvec(const QMat& a, const QVec& x);
/// Linear combination sum_k coeffs[k] * vectors[k].
QVec combine(const QMat& vectors, const QVec& coeffs, std::size_t dim);
QVec add(const QVec& a, const QVec& b);
QVec sub(const QVec& a, const QVec& b);
QVec scale(const QVec& a, const Rat& s);
Rat dot(const QVec& a, const QVec& b);

struct RowEchelon {
  QMat rows;                      // reduced row echelon form, non-zero rows only
  std::vector<std::size_t> pivots;
};
RowEchelon rref(QMat rows, std::size_t ncols);
std::size_t rank(const QMat& rows, std::size_t ncols);
/// Basis of {x : A x = 0}; A has `ncols` columns.
QMat nullspace(const QMat& a, std::size_t ncols);
/// Coefficients c with sum c_k basis[k] = y, if y lies in the span. Basis must be independent.
std::optional<QVec> coordinates(const QMat& basis, const QVec& y);
std::optional<QMat> inverse(const QMat& a);
Rat det(QMat a);
/// Basis of span(a) ∩ span(b).
QMat intersect_spans(const QMat& a, const QMat& b, std::size_t dim);
bool span_contains(const QMat& basis, const QVec& y, std::size_t dim);

ZVec to_int_primitive(const QVec& v);
QVec to_rat(const ZVec& v);
QMat to_rat(const ZMat& m);
Int content(const ZVec& v);

/// Row-style Hermite normal form: echelon, positive pivots, entries above pivots in [0, pivot).
ZMat hnf(ZMat rows, std::size_t ncols);

/// U * A * V = D with D diagonal (not necessarily divisibility-ordered); U, V unimodular.
struct SmithForm {
  ZMat u, v, d;
  std::vector<Int> diag;  // d[i][i] for i < min(m, n)
};
SmithForm smith(const ZMat& a, std::size_t ncols);

/// Basis of {x in Z^n : A x = 0}.
ZMat integer_kernel(const ZMat& a, std::size_t ncols);
/// Integer solution of A x = b if one exists.
std::optional<ZVec> solve_integer(const ZMat& a, const ZVec& b, std::size_t ncols);

/// Echelon basis of the saturation {x in Z^n : k x in span_Z(vectors), k >= 1}.
ZMat lattice_saturate(const ZMat& vectors, std::size_t ambient_dim);

/// Primes dividing the elementary divisors of an integer matrix (rows are vectors).
std::vector<Prime> index_primes(const ZMat& vectors, std::size_t ncols);

// --- p-local linear algebra (over the local ring Z_(p)) ---

/// Z_(p)-basis (echelon rows) of the Z_(p)-span of the given vectors.
QMat local_span_basis(const QMat& gens, Prime p, std::size_t dim);

/// {t in Q^r : C t in Z_(p)^m}, split into a divisible part and a lattice part.
struct LocalPreimage {
  QMat divisible;  // Q-basis of the divisible subspace
  QMat lattice;    // Z_(p)-basis of a complementary lattice
};
LocalPreimage local_preimage(const QMat& c, std::size_t r, Prime p);

/// Z-basis of {t : t in Z_(p)-span(bases[p]) for listed p, t in Z_(l)^r for all other l}.
/// Each listed basis must be a basis of Q^r.
QMat glue_local_lattices(std::size_t r, const std::vector<std::pair<Prime, QMat>>& bases);

}  // namespace tfab
