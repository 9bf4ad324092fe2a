#pragma once

#include "tfab/decomp.hpp"

#include <map>
#include <random>
#include <string>

namespace tfab {

struct Check {
  std::string name;
  bool ok = false;
  std::string detail;
};

struct VerifyReport {
  std::string example;
  std::vector<Check> checks;
  bool all_ok() const;
  void add(std::string name, bool ok, std::string detail = {});
};

// ---------------------------------------------------------------------------
// Example 1: G = A + B = C + D. Ambient coordinates a_1..a_N, b_1..b_N.

struct Example1Config {
  std::size_t n = 4;
  std::vector<Prime> p_list;  // p_1..p_N
  Prime p = 2, q = 3;
  Int t = 1, s = 2;           // p s - t q = 1

  static Example1Config defaults(std::size_t n);
  /// Throws BadConfig.
  void validate() const;
};

struct Example1 {
  Example1Config cfg;
  Group g, a, b, c, d;
  QVec a_vec(std::size_t i) const;  // 1-based
  QVec b_vec(std::size_t i) const;
  QVec c_vec(std::size_t i) const;
  QVec d_vec(std::size_t i) const;
};

Example1 build_example1(const Example1Config& cfg);
VerifyReport verify_example1(const Example1Config& cfg, unsigned bound);

// ---------------------------------------------------------------------------
// Example 2: G = B + C = sum of the E_n. Window -N..N; ambient b_n, c_n interleaved.

struct Example2Config {
  int n = 4;
  std::map<int, Prime> p, q, r;  // p on -N..N; q, r on -N..N-1
  std::map<int, Int> k;          // on -N..N

  /// Smallest distinct primes: all p_n, then q_n, then r_n, each in index order; k derived.
  static Example2Config defaults(int n);
  /// Least non-negative k_n making every (u_n + v_{n+1})/(q_n r_n) a member of G.
  static std::map<int, Int> derive_k(const Example2Config& cfg);
  void validate() const;
};

struct Example2 {
  Example2Config cfg;
  Group g, b, c;
  std::vector<Group> e_blocks;        // E_n for -N <= n < N
  std::vector<Group> boundary_lines;  // <v_{-N}> and <u_N>
  QVec b_vec(int i) const;
  QVec c_vec(int i) const;
  QVec u_vec(int i) const;
  QVec v_vec(int i) const;
};

Example2 build_example2(const Example2Config& cfg);

struct Example2Decomposition {
  std::map<int, Int> alpha;
  std::map<int, QVec> t, z;
  std::vector<Group> z_lines;
  Group h;
  VerifyReport report;
};

Example2Decomposition example2_main_decomposition(const Example2Config& cfg);
VerifyReport verify_example2(const Example2Config& cfg, unsigned bound);

// ---------------------------------------------------------------------------
// Example 3: G = sum of B_n = <p^-inf u_n, p_n^-inf x_n, (u_n + x_n)/q_n>. Ambient u_1, x_1, u_2, ...

struct Example3Config {
  std::size_t n = 4;
  Prime p = 2;
  std::vector<Prime> p_list, q_list;

  static Example3Config defaults(std::size_t n);
  void validate() const;
};

struct Example3 {
  Example3Config cfg;
  Group g;
  std::vector<Group> blocks;
  QVec u_vec(std::size_t i) const;  // 1-based
  QVec x_vec(std::size_t i) const;
};

Example3 build_example3(const Example3Config& cfg);

/// One step of the splitting algorithm on a summand H.
struct SplitPlan {
  std::size_t m = 0;
  std::vector<QVec> v;                         // Z[1/p]-basis of H_p, v[0] = v_0 (ambient)
  std::map<std::size_t, QVec> w;               // w_n in H_p with (w_n + x_n)/q_n in H
  std::map<std::size_t, std::vector<Rat>> beta;
  std::map<std::size_t, std::size_t> k;        // last index with beta not divisible by q_n
  std::vector<std::size_t> t_set;              // {n : k_n = 0}
  std::map<std::size_t, Int> alpha;            // inverse of beta_{n,0} mod q_n
  std::vector<Int> c;                          // v_k -> c_k v_0, c_0 = 1
  Group block;                                 // B_{v_0, T, alpha}
  Group kernel;
  std::vector<QVec> phi_images_v;              // images of v_k
  std::map<std::size_t, QVec> phi_images_x;    // images of x_n
};

/// Throws NotASummand, NormalizationFailed.
SplitPlan example3_analyze_summand(const Example3Config& cfg, const Group& h, std::size_t m,
                                   const std::optional<QVec>& v0_override = std::nullopt);

/// Indices n with x_n in the rational span of H.
std::vector<std::size_t> example3_support(const Example3Config& cfg, const Group& h);

struct FullDecomposition {
  std::vector<SplitPlan> steps;
  std::vector<Group> blocks;  // split blocks followed by rank-1 p-divisible lines
  bool reassembles = false;
};

FullDecomposition example3_decompose_fully(const Example3Config& cfg, const Group& h);

struct RandomSummand {
  std::vector<std::size_t> subset;  // indices n with x_n in H
  QMat automorphism;                // ambient matrix preserving G
  Group h, complement;
};

/// phi(H0) where H0 is a random sum of blocks, optionally with one pair B_i + B_j regrouped as the
/// line <p^-inf (u_i + u_j)> plus its rank-3 complement, and phi is a random automorphism of G
/// built from u_i -> u_i + q_i c u_j and sign flips of (u_i, x_i).
RandomSummand random_example3_summand(const Example3& ex, std::mt19937_64& rng);

VerifyReport verify_example3(const Example3Config& cfg, std::size_t summands, std::uint64_t seed);

}  // namespace tfab
