#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "graphon/graphon.hpp"
#include "graphon/model.hpp"
#include "graphon/types.hpp"

namespace graphon {

enum class InitMethod {
  Spectral,  // restart 0 from spectral_init, later restarts from random labels
  Random,    // every restart from iid uniform labels
  Given,     // FitOptions::initial, single restart
};

struct FitOptions {
  int restarts = 8;
  int max_iterations = 100;
  double tolerance = 1e-9;  // stop once one sweep lowers the objective by less
  InitMethod init = InitMethod::Spectral;
  std::optional<Assignment> initial;       // rows, for InitMethod::Given
  std::optional<Assignment> initial_cols;  // columns, fit_asymmetric only

  void validate() const;
};

/// Output of every symmetric fitting routine. theta_hat is assembled from
/// q_hat through z_hat; z_hat is canonically labeled.
struct FitResult {
  BlockMatrix q_hat;
  Assignment z_hat;
  ProbMatrix theta_hat;
  double objective = 0.0;
  int iterations = 0;
  int restarts_used = 0;
  std::string method;
  std::vector<double> objective_history;  // best restart, one entry per sweep
  bool init_fallback = false;             // spectral init fell back to random
};

/// L(Q, z): squared error over ordered pairs i != j.
double objective(const Adjacency& a, const BlockMatrix& q, const Assignment& z);

/// Minimizer of L(., z): the block averages of A. Unused blocks are 0.
BlockMatrix q_from_assignment(const Adjacency& a, const Assignment& z);

inline constexpr std::size_t kExactMaxNodes = 12;
inline constexpr int kExactMaxClusters = 3;

/// Global minimizer over all of Z_{n,k} by enumeration of canonical labelings.
/// Ties resolve to the lexicographically smallest canonical assignment.
/// Throws RefusalError above n = 12 or k = 3.
FitResult fit_exact(const Adjacency& a, int k);

struct SpectralInit {
  Assignment assignment;
  bool fallback = false;  // eigensolver failed; labels are uniform random
};

/// k-means (k-means++ seeding, at most 50 Lloyd steps) on the rows of the
/// eigenvectors of the k eigenvalues of largest magnitude.
SpectralInit spectral_init(const Adjacency& a, int k, std::uint64_t seed);
/// Same procedure on an arbitrary symmetric matrix.
SpectralInit spectral_init(const Matrix& m, int k, std::uint64_t seed);

/// Alternates the closed-form Q step with node-wise reassignment.
/// Best of opts.restarts runs; restart r uses derive_seed(seed, r).
FitResult fit_alternating(const Adjacency& a, int k, const FitOptions& opts, std::uint64_t seed);

enum class OracleRule {
  Interval,        // z(i) = a iff xi_i in [(a-1)/k, a/k), xi = 1 -> k
  SortedQuantile,  // equal-size groups by rank of xi
};

Assignment oracle_assignment(const LatentDesign& design, int k,
                             OracleRule rule = OracleRule::Interval);

/// (1/n^2) sum_{i != j} (theta_ij - block average of theta under the oracle z)^2.
double block_approximation_error(const GraphonSpec& spec, const LatentDesign& design, int k,
                                 OracleRule rule = OracleRule::Interval);

/// Least-squares fit with a known assignment (oracle-z estimation).
FitResult fit_given_assignment(const Adjacency& a, const Assignment& z);

struct AsymmetricFit {
  BlockMatrix q_hat;  // k x l, not symmetric
  Assignment rows;
  Assignment cols;
  double objective = 0.0;
  int iterations = 0;
  int restarts_used = 0;
  std::vector<double> objective_history;
};

/// Sum over the full n x m rectangle of (A_ij - Q[z1(i), z2(j)])^2.
double asymmetric_objective(const Matrix& a, const BlockMatrix& q, const Assignment& rows,
                            const Assignment& cols);

/// Rectangle block means; no diagonal exclusion.
BlockMatrix asymmetric_block_means(const Matrix& a, const Assignment& rows, const Assignment& cols);

/// Biclustering fit of a binary n x m matrix with k row and l column clusters.
AsymmetricFit fit_asymmetric(const Matrix& a, int k, int l, const FitOptions& opts,
                             std::uint64_t seed);

/// Canonical relabeling of z with the matching permutation of Q.
void canonicalize(BlockMatrix& q, Assignment& z);

/// Self-describing JSON text: method, n, k, objective, 1-based labels, Q.
std::string fit_result_to_json(const FitResult& fit);
FitResult fit_result_from_json(const std::string& text);

}  // namespace graphon
