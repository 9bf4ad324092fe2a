#pragma once

#include "tfab/homs.hpp"

#include <cstdint>
#include <optional>

namespace tfab {

struct ExtractOptions {
  unsigned bound = 5;
  std::uint64_t seed = 0;                // 0 keeps the canonical order
  std::optional<TypeClass> only_type;    // restrict to summands of this type
};

/// A rank-1 summand found in `host`: host = f.target + complement.
struct Extraction {
  Group host;
  Element x;  // candidate that succeeded, in host coordinates
  SplittingFunctional f;
  Group complement;
  TypeClass type;
};

/// Candidate order: types from largest to smallest INF-set, then max-norm ascending, then
/// lexicographic (shuffled within a norm level when a seed is set). Candidates of type S are
/// primitive integer vectors supported on the base directions whose type contains S.
std::optional<Extraction> extract_rank1(const Group& g, const ExtractOptions& opt, std::size_t* examined = nullptr);

struct DecompositionReport {
  TypeMultiset cd_types;  // sorted
  std::vector<Extraction> summands;
  Group complement;
  std::size_t complement_rank = 0;
  unsigned bound = 0;
  std::uint64_t seed = 0;
  std::size_t candidates_examined = 0;
};

DecompositionReport main_decomposition(const Group& g, unsigned bound, std::uint64_t seed = 0);

/// Re-verifies every functional and that the summands plus complement reassemble G.
bool verify_report(const Group& g, const DecompositionReport& r);

struct ClippedCertificate {
  bool clipped_within_bound = false;
  std::optional<Extraction> witness;
  unsigned bound = 0;
  std::size_t candidates_examined = 0;
};

ClippedCertificate is_clipped(const Group& g, unsigned bound, std::optional<TypeClass> only_type = std::nullopt);

bool cd_iso_test(const DecompositionReport& r1, const DecompositionReport& r2);

struct SteinDecomposition {
  Group socle;  // G(tau)
  Group k;      // elements of G(tau) killed by every homomorphism into a rank-1 group of type tau
  Group b;      // tau-homogeneous completely decomposable complement
};

SteinDecomposition stein_socle_decomposition(const Group& g, const TypeClass& tau);

/// Whether A + B has a rank-1 summand of type tau within bound. Throws PreconditionViolated
/// when A is not completely decomposable or has a base direction of type tau.
bool tau_clipped_sum_check(const Group& a, const Group& b, const TypeClass& tau, unsigned bound);

}  // namespace tfab
