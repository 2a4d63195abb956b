#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "graphon/types.hpp"

namespace graphon {

using Codeword = std::vector<int>;  // entries 0 or 1

/// A binary code of length d. Stored either as an explicit word list or, for
/// cardinalities too large to list, as the span of linearly independent
/// generators over GF(2); codeword(i) enumerates both forms.
class PackingSet {
 public:
  static PackingSet from_words(int d, const std::vector<Codeword>& words);
  static PackingSet from_generators(int d, const std::vector<Codeword>& generators);

  int d() const noexcept { return d_; }
  std::uint64_t size() const noexcept;
  bool is_linear() const noexcept { return linear_; }
  Codeword codeword(std::uint64_t index) const;
  /// Exact minimum pairwise Hamming distance (d + 1 for fewer than two words).
  int min_distance() const;
  /// Both packing bounds: 4 * min_distance >= d and size >= ceil(exp(d/8)).
  bool verify() const;

  using Bits = std::vector<std::uint64_t>;
  const std::vector<Bits>& rows() const noexcept { return rows_; }

 private:
  int d_ = 0;
  bool linear_ = false;
  std::vector<Bits> rows_;  // words, or generators when linear_
};

/// ceil(exp(d/8)), saturating at UINT64_MAX.
std::uint64_t packing_target(int d);

/// Largest d that vg_packing accepts.
inline constexpr int kMaxPackingLength = 155;

/// A code with minimum distance >= d/4 and at least max(ceil(exp(d/8)), min_count)
/// words. Small targets use randomized greedy selection (exhaustive lexicographic
/// search as fallback for d <= 16); large targets grow a random linear code one
/// generator at a time. Throws RefusalError when d exceeds kMaxPackingLength or
/// the retry budget runs out.
PackingSet vg_packing(int d, std::uint64_t seed, std::uint64_t min_count = 0);

enum class HardFamily { T1, T2, FiniteK };

std::string to_string(HardFamily family);

struct HardInstance {
  ProbMatrix theta;
  HardFamily family = HardFamily::T1;
  Index n = 0;
  int k = 0;
  double constant = 0.0;  // c1, c2 or c
  Assignment assignment;
  std::vector<Codeword> codewords;  // omega (T1), the k/2 columns of B (T2), indicator of S (finite-k)
  std::vector<std::uint64_t> codeword_indices;
};

inline constexpr double kDefaultC1 = 0.1;
inline constexpr double kDefaultC2 = 0.1;

/// Q_aa = 1/2, Q_ab = Q_ba = 1/2 + (c1 k / n) omega_ab for a < b, with omega
/// listed row by row over the upper triangle. z must be contiguous equal blocks.
HardInstance t1_instance(Index n, int k, double c1, const Codeword& omega, const Assignment& z);

/// Q = [[0, B], [B^T, 0]] with column a of B equal to 1/2 + sqrt(c2 log k / n) omega_a.
/// z must put node i < n/2 in block floor(i k / n) and every other node in the second half.
HardInstance t2_instance(Index n, int k, double c2, const std::vector<Codeword>& columns,
                         const Assignment& z);

/// theta_ij = 1/2 + c / sqrt(n) when exactly one of i, j lies in S, else 1/2.
HardInstance finite_k_instance(Index n, double c, const std::vector<bool>& in_s);

/// Instances for the first `count` codewords of vg_packing(k(k-1)/2, seed).
std::vector<HardInstance> t1_family(Index n, int k, double c1, std::uint64_t seed, std::size_t count);

/// One B from vg_packing(k/2, seed, k/2) under `count` assignments from the Z
/// family (first assignment has the second half in contiguous blocks, the rest
/// are random).
std::vector<HardInstance> t2_family(Index n, int k, double c2, std::uint64_t seed, std::size_t count);

struct T1Audit {
  std::size_t pairs = 0;
  std::size_t violations = 0;
  double min_ratio = 0.0;  // min over pairs of rho^2 / ((c1/n)^2 rho_H)
};
/// Checks rho^2(theta, theta') >= (c1^2 / n^2) rho_H(omega, omega') for all pairs.
T1Audit audit_t1(const std::vector<HardInstance>& family);

struct T2Audit {
  std::size_t pairs = 0;
  std::size_t violations = 0;
  double min_ratio = 0.0;  // min over column pairs of ||B_a - B_b||^2 / (c2 k log k / (8 n))
};
/// Checks the column separation of B in every member.
T2Audit audit_t2(const std::vector<HardInstance>& family);

/// Hamming distance.
int hamming(const Codeword& a, const Codeword& b);

/// sum over i != j of KL(Ber(theta_ij) || Ber(theta'_ij)); +inf when undefined.
double kl_product_bernoulli(const ProbMatrix& theta, const ProbMatrix& theta_prime);
/// prod over i != j of (1 + (theta - theta')^2 / (theta'(1 - theta'))) - 1; +inf when undefined.
double chi2_product_bernoulli(const ProbMatrix& theta, const ProbMatrix& theta_prime);

/// 1 - (kl_diameter + log 2) / log_packing, clamped to [0, 1].
double fano_bound(double kl_diameter, double log_packing);
/// 1 - 1/packing - sqrt(chi2_diameter / packing), clamped to [0, 1].
double chi2_fano_bound(double chi2_diameter, double packing);

/// Sidecar record: family, n, k, constant, codewords, assignment (1-based).
std::string hard_instance_metadata_json(const HardInstance& instance);

}  // namespace graphon
