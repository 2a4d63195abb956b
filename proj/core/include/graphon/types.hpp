#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace graphon {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Latent positions xi_1..xi_n in [0,1].
class LatentDesign {
 public:
  LatentDesign() = default;
  explicit LatentDesign(std::vector<double> xi);

  std::size_t size() const noexcept { return xi_.size(); }
  double operator[](std::size_t i) const { return xi_[i]; }
  std::span<const double> values() const noexcept { return xi_; }

 private:
  std::vector<double> xi_;
};

/// Edge-probability matrix theta: symmetric, zero diagonal, entries in [0,1].
class ProbMatrix {
 public:
  ProbMatrix() = default;
  /// Validates the invariants; throws DomainError on violation.
  explicit ProbMatrix(Matrix entries);

  static ProbMatrix zeros(Index n);

  Index size() const noexcept { return m_.rows(); }
  double operator()(Index i, Index j) const { return m_(i, j); }
  const Matrix& matrix() const noexcept { return m_; }

 private:
  Matrix m_;
};

/// Observed simple undirected graph: symmetric 0/1 matrix with zero diagonal.
class Adjacency {
 public:
  Adjacency() = default;
  explicit Adjacency(Matrix entries);

  static Adjacency empty(Index n);

  Index size() const noexcept { return m_.rows(); }
  double operator()(Index i, Index j) const { return m_(i, j); }
  const Matrix& matrix() const noexcept { return m_; }

  Vector degrees() const { return m_.rowwise().sum(); }
  std::size_t edge_count() const;

 private:
  Matrix m_;
};

/// Cluster map z: [n] -> [k]. Labels are stored 0-based; text formats
/// that face users print them 1-based.
class Assignment {
 public:
  Assignment() = default;
  Assignment(std::vector<int> labels, int k);

  std::size_t size() const noexcept { return labels_.size(); }
  int k() const noexcept { return k_; }
  int operator[](std::size_t i) const { return labels_[i]; }
  std::span<const int> labels() const noexcept { return labels_; }

  std::vector<std::size_t> cluster_sizes() const;

  /// Relabels clusters by order of first occurrence. Unused labels follow
  /// in their original order. `permutation[old] = new`.
  Assignment canonical(std::vector<int>* permutation = nullptr) const;

  friend bool operator==(const Assignment&, const Assignment&) = default;

 private:
  std::vector<int> labels_;
  int k_ = 0;
};

/// k x l block-value matrix Q with per-block "used" flags. A block is unused
/// when it contains no index pairs; its value is then the fallback 0.
class BlockMatrix {
 public:
  BlockMatrix() = default;
  BlockMatrix(Matrix q, bool symmetric);
  BlockMatrix(Matrix q, bool symmetric, Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> used);

  Index rows() const noexcept { return q_.rows(); }
  Index cols() const noexcept { return q_.cols(); }
  double operator()(Index a, Index b) const { return q_(a, b); }
  const Matrix& values() const noexcept { return q_; }
  bool symmetric() const noexcept { return symmetric_; }
  bool used(Index a, Index b) const { return used_(a, b); }
  const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& used_mask() const noexcept {
    return used_;
  }

  /// Q'[perm[a], perm[b]] = Q[a, b] for a symmetric relabeling.
  BlockMatrix permuted(std::span<const int> perm) const;
  /// Independent row/column relabeling (asymmetric case).
  BlockMatrix permuted(std::span<const int> row_perm, std::span<const int> col_perm) const;

 private:
  Matrix q_;
  bool symmetric_ = true;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> used_;
};

}  // namespace graphon
