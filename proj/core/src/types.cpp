#include "graphon/types.hpp"

#include <cmath>
#include <string>

#include "graphon/error.hpp"

namespace graphon {

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw DomainError(std::string(what) + ": matrix is not square");
  }
}

void require_symmetric_zero_diagonal(const Matrix& m, const char* what) {
  const Index n = m.rows();
  for (Index i = 0; i < n; ++i) {
    if (m(i, i) != 0.0) throw DomainError(std::string(what) + ": nonzero diagonal");
    for (Index j = 0; j < i; ++j) {
      if (m(i, j) != m(j, i)) throw DomainError(std::string(what) + ": not symmetric");
    }
  }
}

}  // namespace

LatentDesign::LatentDesign(std::vector<double> xi) : xi_(std::move(xi)) {
  if (xi_.empty()) throw DomainError("LatentDesign: empty design");
  for (double x : xi_) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("LatentDesign: entry outside [0,1]");
  }
}

ProbMatrix::ProbMatrix(Matrix entries) : m_(std::move(entries)) {
  require_square(m_, "ProbMatrix");
  require_symmetric_zero_diagonal(m_, "ProbMatrix");
  if (m_.size() > 0 && (!(m_.minCoeff() >= 0.0) || !(m_.maxCoeff() <= 1.0))) {
    throw DomainError("ProbMatrix: entry outside [0,1]");
  }
}

ProbMatrix ProbMatrix::zeros(Index n) { return ProbMatrix(Matrix::Zero(n, n)); }

Adjacency::Adjacency(Matrix entries) : m_(std::move(entries)) {
  require_square(m_, "Adjacency");
  require_symmetric_zero_diagonal(m_, "Adjacency");
  for (Index j = 0; j < m_.cols(); ++j) {
    for (Index i = 0; i < m_.rows(); ++i) {
      const double v = m_(i, j);
      if (v != 0.0 && v != 1.0) throw DomainError("Adjacency: entry is not 0/1");
    }
  }
}

Adjacency Adjacency::empty(Index n) { return Adjacency(Matrix::Zero(n, n)); }

std::size_t Adjacency::edge_count() const {
  return static_cast<std::size_t>(std::llround(m_.sum() / 2.0));
}

Assignment::Assignment(std::vector<int> labels, int k) : labels_(std::move(labels)), k_(k) {
  if (k_ < 1) throw DomainError("Assignment: k must be positive");
  for (int label : labels_) {
    if (label < 0 || label >= k_) throw DomainError("Assignment: label outside [k]");
  }
}

std::vector<std::size_t> Assignment::cluster_sizes() const {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k_), 0);
  for (int label : labels_) ++sizes[static_cast<std::size_t>(label)];
  return sizes;
}

Assignment Assignment::canonical(std::vector<int>* permutation) const {
  std::vector<int> perm(static_cast<std::size_t>(k_), -1);
  int next = 0;
  for (int label : labels_) {
    if (perm[static_cast<std::size_t>(label)] < 0) perm[static_cast<std::size_t>(label)] = next++;
  }
  for (auto& p : perm) {
    if (p < 0) p = next++;
  }
  std::vector<int> relabeled(labels_.size());
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    relabeled[i] = perm[static_cast<std::size_t>(labels_[i])];
  }
  if (permutation != nullptr) *permutation = perm;
  return Assignment(std::move(relabeled), k_);
}

BlockMatrix::BlockMatrix(Matrix q, bool symmetric)
    : BlockMatrix(q, symmetric,
                  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(q.rows(), q.cols(),
                                                                               true)) {}

BlockMatrix::BlockMatrix(Matrix q, bool symmetric,
                         Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> used)
    : q_(std::move(q)), symmetric_(symmetric), used_(std::move(used)) {
  if (used_.rows() != q_.rows() || used_.cols() != q_.cols()) {
    throw DomainError("BlockMatrix: mask shape mismatch");
  }
  if (q_.size() > 0 && (!(q_.minCoeff() >= 0.0) || !(q_.maxCoeff() <= 1.0))) {
    throw DomainError("BlockMatrix: entry outside [0,1]");
  }
  if (symmetric_) {
    require_square(q_, "BlockMatrix");
    for (Index a = 0; a < q_.rows(); ++a) {
      for (Index b = 0; b < a; ++b) {
        if (std::abs(q_(a, b) - q_(b, a)) > 1e-12) throw DomainError("BlockMatrix: not symmetric");
      }
    }
  }
}

BlockMatrix BlockMatrix::permuted(std::span<const int> perm) const {
  return permuted(perm, perm);
}

BlockMatrix BlockMatrix::permuted(std::span<const int> row_perm,
                                  std::span<const int> col_perm) const {
  Matrix q(q_.rows(), q_.cols());
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> used(q_.rows(), q_.cols());
  for (Index a = 0; a < q_.rows(); ++a) {
    for (Index b = 0; b < q_.cols(); ++b) {
      q(row_perm[static_cast<std::size_t>(a)], col_perm[static_cast<std::size_t>(b)]) = q_(a, b);
      used(row_perm[static_cast<std::size_t>(a)], col_perm[static_cast<std::size_t>(b)]) = used_(a, b);
    }
  }
  return BlockMatrix(std::move(q), symmetric_, std::move(used));
}

}  // namespace graphon
