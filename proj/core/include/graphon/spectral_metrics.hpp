#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "graphon/types.hpp"

namespace graphon {

struct ErrorReport {
  double mse = 0.0;         // (1/n^2) sum (theta_hat - theta)^2
  double op_norm_sq = 0.0;  // ||theta_hat - theta||_op^2
  Index n = 0;
  int k = 0;
  std::map<std::string, std::string> metadata;
};

/// (1/n^2) * squared Frobenius distance, diagonal included.
double mse_loss(const ProbMatrix& theta_hat, const ProbMatrix& theta);
double mse_loss(const Matrix& theta_hat, const Matrix& theta);

struct PowerIterationOptions {
  double tolerance = 1e-10;
  int max_iterations = 100000;
  std::uint64_t seed = 0;
};

/// Largest absolute eigenvalue of a symmetric matrix by block power iteration
/// with a Rayleigh-Ritz step. Converged when the leading Ritz pair (s, x) has
/// ||M x - s x|| <= tol * |s| and |s| moved by at most tol * |s| since the
/// previous iteration.
/// On stagnation the block is restarted around the best Ritz vector.
/// Throws NumericalError (carrying the best estimate) after max_iterations.
double operator_norm(const Matrix& m, const PowerIterationOptions& opts = {});

/// The operator-norm estimator theta_hat = A, returned as a real matrix.
Matrix adjacency_op_estimator(const Adjacency& a);

struct TrimResult {
  Adjacency trimmed;
  double threshold = 0.0;  // multiplier * average degree of the input
  std::size_t removed = 0;
};

/// Zeroes rows and columns whose degree exceeds multiplier * average degree.
Adjacency trim_adjacency(const Adjacency& a, double multiplier = 2.0);
TrimResult trim_adjacency_detailed(const Adjacency& a, double multiplier = 2.0);
/// Trims against a fixed degree threshold.
Adjacency trim_adjacency_at(const Adjacency& a, double threshold);

/// ||theta_hat - theta||_F^2 <= rank_bound * ||theta_hat - theta||_op^2, with
/// relative slack 1e-8. The operator norm comes from a dense eigensolver.
bool frobenius_vs_operator_check(const ProbMatrix& theta_hat, const ProbMatrix& theta, int rank_bound);

ErrorReport error_report(const ProbMatrix& theta_hat, const ProbMatrix& theta, int k);

}  // namespace graphon
