#include "graphon/spectral_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "graphon/error.hpp"
#include "graphon/rng.hpp"

namespace graphon {

namespace {

// A restart fires when the residual has not reached a new minimum for this
// many consecutive iterations.
constexpr int kStallWindow = 200;

// Columns in the iterated block. The convergence rate is |lambda_{b+1}| / |lambda_1|,
// so a few columns absorb near-ties between the two ends of the spectrum.
constexpr Index kBlockSize = 4;

Vector random_unit(Index n, Rng& rng) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = 2.0 * rng.uniform() - 1.0;
  const double norm = v.norm();
  if (norm == 0.0) {
    v.setZero();
    v(0) = 1.0;
    return v;
  }
  return v / norm;
}

Matrix orthonormal(const Matrix& block) {
  Eigen::HouseholderQR<Matrix> qr(block);
  return qr.householderQ() * Matrix::Identity(block.rows(), block.cols());
}

void check_symmetric(const Matrix& m, const char* who) {
  if (m.rows() != m.cols()) throw DomainError(std::string(who) + ": matrix is not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (((m - m.transpose()).cwiseAbs().array() > 1e-12 * scale).any()) {
    throw DomainError(std::string(who) + ": matrix is not symmetric");
  }
}

}  // namespace

double mse_loss(const Matrix& theta_hat, const Matrix& theta) {
  if (theta_hat.rows() != theta.rows() || theta_hat.cols() != theta.cols()) {
    throw DomainError("mse_loss: dimension mismatch");
  }
  if (theta.size() == 0) return 0.0;
  return (theta_hat - theta).squaredNorm() / (static_cast<double>(theta.rows()) * static_cast<double>(theta.cols()));
}

double mse_loss(const ProbMatrix& theta_hat, const ProbMatrix& theta) {
  return mse_loss(theta_hat.matrix(), theta.matrix());
}

double operator_norm(const Matrix& m, const PowerIterationOptions& opts) {
  check_symmetric(m, "operator_norm");
  if (!(opts.tolerance > 0.0)) throw DomainError("operator_norm: tolerance must be positive");
  if (opts.max_iterations < 1) throw DomainError("operator_norm: max_iterations must be positive");
  const Index n = m.rows();
  if (n == 0 || m.cwiseAbs().maxCoeff() == 0.0) return 0.0;

  const Index b = std::min(n, kBlockSize);
  Rng rng(opts.seed);
  Matrix v(n, b);
  for (Index c = 0; c < b; ++c) v.col(c) = random_unit(n, rng);
  v = orthonormal(v);

  double best = 0.0;
  double previous = -1.0;
  double best_residual = std::numeric_limits<double>::infinity();
  int since_improvement = 0;

  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    const Matrix w = m * v;
    const Matrix h = v.transpose() * w;
    Eigen::SelfAdjointEigenSolver<Matrix> ritz(0.5 * (h + h.transpose()));
    Index top = 0;
    for (Index c = 1; c < b; ++c) {
      if (std::abs(ritz.eigenvalues()(c)) >= std::abs(ritz.eigenvalues()(top))) top = c;
    }
    const double theta = ritz.eigenvalues()(top);
    const Vector y = ritz.eigenvectors().col(top);
    const Vector x = v * y;
    // Ritz values lie inside the spectrum, so |theta| never overshoots.
    const double sigma = std::abs(theta);
    best = std::max(best, sigma);
    const double residual = (w * y - theta * x).norm();
    // A small residual alone can come from an interior eigenvalue whose
    // eigenspace meets the block, so the leading value must also have settled.
    const bool settled = std::abs(sigma - previous) <= opts.tolerance * sigma;
    previous = sigma;
    if (settled && residual <= opts.tolerance * sigma) return sigma;

    if (residual < best_residual) {
      best_residual = residual;
      since_improvement = 0;
      v = orthonormal(w);
    } else if (++since_improvement >= kStallWindow) {
      // Keep the best Ritz vector, refresh the rest of the block.
      v.col(0) = x;
      for (Index c = 1; c < b; ++c) v.col(c) = random_unit(n, rng);
      v = orthonormal(v);
      best_residual = std::numeric_limits<double>::infinity();
      since_improvement = 0;
    } else {
      v = orthonormal(w);
    }
  }
  throw NumericalError("operator_norm: power iteration did not converge in " +
                           std::to_string(opts.max_iterations) + " iterations",
                       best);
}

Matrix adjacency_op_estimator(const Adjacency& a) { return a.matrix(); }

Adjacency trim_adjacency_at(const Adjacency& a, double threshold) {
  const Vector degrees = a.degrees();
  Matrix m = a.matrix();
  for (Index i = 0; i < m.rows(); ++i) {
    if (degrees(i) > threshold) {
      m.row(i).setZero();
      m.col(i).setZero();
    }
  }
  return Adjacency(std::move(m));
}

TrimResult trim_adjacency_detailed(const Adjacency& a, double multiplier) {
  if (!(multiplier > 0.0)) throw DomainError("trim_adjacency: multiplier must be positive");
  const Vector degrees = a.degrees();
  const double average = a.size() == 0 ? 0.0 : degrees.mean();
  const double threshold = multiplier * average;
  const auto removed = static_cast<std::size_t>((degrees.array() > threshold).count());
  return {trim_adjacency_at(a, threshold), threshold, removed};
}

Adjacency trim_adjacency(const Adjacency& a, double multiplier) {
  return trim_adjacency_detailed(a, multiplier).trimmed;
}

bool frobenius_vs_operator_check(const ProbMatrix& theta_hat, const ProbMatrix& theta, int rank_bound) {
  if (rank_bound < 1) throw DomainError("frobenius_vs_operator_check: rank_bound must be positive");
  if (theta_hat.size() != theta.size()) throw DomainError("frobenius_vs_operator_check: dimension mismatch");
  const Matrix diff = theta_hat.matrix() - theta.matrix();
  const double fro = diff.squaredNorm();
  if (diff.size() == 0) return true;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(diff, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("frobenius_vs_operator_check: eigensolver failed", fro);
  }
  const double op = solver.eigenvalues().cwiseAbs().maxCoeff();
  return fro <= static_cast<double>(rank_bound) * op * op + 1e-8 * std::max(1.0, fro);
}

ErrorReport error_report(const ProbMatrix& theta_hat, const ProbMatrix& theta, int k) {
  const Matrix diff = theta_hat.matrix() - theta.matrix();
  const double op = operator_norm(diff);
  return {mse_loss(theta_hat, theta), op * op, theta.size(), k, {}};
}

}  // namespace graphon
