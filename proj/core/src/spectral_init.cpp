#include <algorithm>
#include <limits>
#include <numeric>

#include "graphon/error.hpp"
#include "graphon/estimators.hpp"
#include "graphon/rng.hpp"
#include "kmeans.hpp"

namespace graphon {

namespace detail {

std::vector<int> random_labels(std::size_t n, int k, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<int> labels(n);
  for (auto& label : labels) label = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
  return labels;
}

std::vector<int> kmeans(const Matrix& points, int k, std::uint64_t seed, int max_iterations) {
  const Index n = points.rows();
  if (k < 1 || n < k) throw DomainError("kmeans: need 1 <= k <= number of points");
  Rng rng(seed);

  // k-means++ seeding.
  std::vector<Index> chosen;
  chosen.push_back(static_cast<Index>(rng.below(static_cast<std::uint64_t>(n))));
  Vector dist2 = (points.rowwise() - points.row(chosen[0])).rowwise().squaredNorm();
  std::vector<bool> is_center(static_cast<std::size_t>(n), false);
  is_center[static_cast<std::size_t>(chosen[0])] = true;
  while (static_cast<int>(chosen.size()) < k) {
    const double total = dist2.sum();
    Index pick = -1;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double cumulative = 0.0;
      for (Index i = 0; i < n; ++i) {
        if (dist2(i) <= 0.0) continue;
        cumulative += dist2(i);
        pick = i;
        if (cumulative > target) break;
      }
    } else {
      // Every point coincides with a center; pick among the rest uniformly.
      const auto remaining = static_cast<std::uint64_t>(n) - chosen.size();
      auto skip = rng.below(remaining);
      for (Index i = 0; i < n; ++i) {
        if (is_center[static_cast<std::size_t>(i)]) continue;
        if (skip-- == 0) {
          pick = i;
          break;
        }
      }
    }
    chosen.push_back(pick);
    is_center[static_cast<std::size_t>(pick)] = true;
    dist2 = dist2.cwiseMin((points.rowwise() - points.row(pick)).rowwise().squaredNorm());
  }

  Matrix centers(k, points.cols());
  for (int c = 0; c < k; ++c) centers.row(c) = points.row(chosen[static_cast<std::size_t>(c)]);

  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  for (int iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = (points.row(i) - centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (labels[static_cast<std::size_t>(i)] != best) {
        labels[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    if (!changed) break;
    Matrix sums = Matrix::Zero(k, points.cols());
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < n; ++i) {
      sums.row(labels[static_cast<std::size_t>(i)]) += points.row(i);
      ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centers.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      }
    }
  }
  return labels;
}

}  // namespace detail

SpectralInit spectral_init(const Matrix& m, int k, std::uint64_t seed) {
  const Index n = m.rows();
  if (m.cols() != n) throw DomainError("spectral_init: matrix is not square");
  if (k < 1 || n < k) throw DomainError("spectral_init: need 1 <= k <= n");
  if (k == n) {
    std::vector<int> labels(static_cast<std::size_t>(n));
    std::iota(labels.begin(), labels.end(), 0);
    return {Assignment(std::move(labels), k), false};
  }
  if (k == 1) return {Assignment(std::vector<int>(static_cast<std::size_t>(n), 0), 1), false};

  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) {
    return {Assignment(detail::random_labels(static_cast<std::size_t>(n), k, seed), k), true};
  }
  const Vector& values = solver.eigenvalues();
  // Leading = largest |lambda|; magnitudes equal up to rounding go to the
  // positive eigenvalue, which carries assortative block structure.
  const double tie = 1e-9 * std::max(1.0, values.cwiseAbs().maxCoeff());
  std::vector<bool> taken(static_cast<std::size_t>(n), false);
  Matrix embedding(n, k);
  for (int c = 0; c < k; ++c) {
    Index pick = -1;
    for (Index i = 0; i < n; ++i) {
      if (taken[static_cast<std::size_t>(i)]) continue;
      if (pick < 0) {
        pick = i;
        continue;
      }
      const double gap = std::abs(values(i)) - std::abs(values(pick));
      if (gap > tie || (std::abs(gap) <= tie && values(i) > values(pick))) pick = i;
    }
    taken[static_cast<std::size_t>(pick)] = true;
    embedding.col(c) = solver.eigenvectors().col(pick);
  }
  return {Assignment(detail::kmeans(embedding, k, seed), k), false};
}

SpectralInit spectral_init(const Adjacency& a, int k, std::uint64_t seed) {
  return spectral_init(a.matrix(), k, seed);
}

}  // namespace graphon
