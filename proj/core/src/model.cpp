#include "graphon/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "graphon/error.hpp"
#include "graphon/rng.hpp"

namespace graphon {

DesignSpec DesignSpec::parse(std::string_view name) {
  if (name == "iid-uniform" || name == "uniform") return {DesignKind::IidUniform, {}};
  if (name == "fixed-grid" || name == "grid") return {DesignKind::FixedGrid, {}};
  throw FormatError("unknown design '" + std::string(name) + "'");
}

LatentDesign sample_design(const DesignSpec& dist, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw DomainError("sample_design: n must be positive");
  std::vector<double> xi(n);
  switch (dist.kind) {
    case DesignKind::IidUniform: {
      Rng rng(seed);
      for (auto& x : xi) x = rng.uniform();
      break;
    }
    case DesignKind::FixedGrid:
      if (n == 1) {
        xi[0] = 0.0;
      } else {
        for (std::size_t i = 0; i < n; ++i) {
          xi[i] = static_cast<double>(i) / static_cast<double>(n - 1);
        }
      }
      break;
    case DesignKind::UserList:
      if (dist.values.size() != n) throw DomainError("sample_design: user list has wrong length");
      xi = dist.values;
      break;
  }
  return LatentDesign(std::move(xi));
}

ProbMatrix theta_from_graphon(const GraphonSpec& spec, const LatentDesign& design) {
  const auto n = static_cast<Index>(design.size());
  Matrix theta = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < i; ++j) {
      const double v = eval_graphon(spec, design[static_cast<std::size_t>(i)],
                                    design[static_cast<std::size_t>(j)]);
      theta(i, j) = v;
      theta(j, i) = v;
    }
  }
  return ProbMatrix(std::move(theta));
}

ProbMatrix theta_from_blocks(const BlockMatrix& q, const Assignment& z) {
  if (!q.symmetric() || q.rows() != z.k()) {
    throw DomainError("theta_from_blocks: need a symmetric k x k block matrix");
  }
  const auto n = static_cast<Index>(z.size());
  Matrix theta = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < i; ++j) {
      const int a = z[static_cast<std::size_t>(i)];
      const int b = z[static_cast<std::size_t>(j)];
      const double v = q(std::min(a, b), std::max(a, b));
      theta(i, j) = v;
      theta(j, i) = v;
    }
  }
  return ProbMatrix(std::move(theta));
}

ProbMatrix scale_to_sparsity(const ProbMatrix& theta, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("scale_to_sparsity: beta outside [0,1]");
  if (theta.size() == 0) return theta;
  const double top = theta.matrix().maxCoeff();
  if (top <= beta) return theta;
  Matrix scaled = theta.matrix() * (beta / top);
  // Rounding could push the largest entry a hair above beta.
  scaled = scaled.cwiseMin(beta);
  return ProbMatrix(std::move(scaled));
}

Adjacency sample_adjacency(const ProbMatrix& theta, std::uint64_t seed) {
  Rng rng(seed);
  const Index n = theta.size();
  Matrix a = Matrix::Zero(n, n);
  for (Index i = 1; i < n; ++i) {
    for (Index j = 0; j < i; ++j) {
      if (rng.uniform() < theta(i, j)) {
        a(i, j) = 1.0;
        a(j, i) = 1.0;
      }
    }
  }
  return Adjacency(std::move(a));
}

BlockAverage block_average(const Matrix& m, const Assignment& z, int a, int b) {
  if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != z.size()) {
    throw DomainError("block_average: dimension mismatch");
  }
  if (a < 0 || b < 0 || a >= z.k() || b >= z.k()) throw DomainError("block_average: bad cluster");
  double sum = 0.0;
  std::size_t count = 0;
  const auto n = z.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (z[i] != a) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (z[j] != b || i == j) continue;
      sum += m(static_cast<Index>(i), static_cast<Index>(j));
      ++count;
    }
  }
  if (count == 0) return {};
  return {sum / static_cast<double>(count), true};
}

BlockMatrix block_averages(const Matrix& m, const Assignment& z) {
  if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != z.size()) {
    throw DomainError("block_averages: dimension mismatch");
  }
  const int k = z.k();
  Matrix sums = Matrix::Zero(k, k);
  const auto n = static_cast<Index>(z.size());
  for (Index j = 0; j < n; ++j) {
    const int b = z[static_cast<std::size_t>(j)];
    for (Index i = 0; i < n; ++i) {
      if (i != j) sums(z[static_cast<std::size_t>(i)], b) += m(i, j);
    }
  }
  const auto sizes = z.cluster_sizes();
  Matrix q = Matrix::Zero(k, k);
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> used(k, k);
  const bool symmetric = (m.array() == m.transpose().array()).all();
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      const double sa = static_cast<double>(sizes[static_cast<std::size_t>(a)]);
      const double sb = static_cast<double>(sizes[static_cast<std::size_t>(b)]);
      const double pairs = a == b ? sa * (sa - 1.0) : sa * sb;
      used(a, b) = pairs > 0.0;
      if (pairs > 0.0) q(a, b) = sums(a, b) / pairs;
    }
  }
  if (symmetric) {
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < a; ++b) q(a, b) = q(b, a);
    }
  }
  return BlockMatrix(std::move(q), symmetric, std::move(used));
}

int interval_index(double x, int k) {
  if (k < 1) throw DomainError("interval_index: k must be positive");
  if (x >= 1.0) return k - 1;
  if (x <= 0.0) return 0;
  int a = static_cast<int>(std::floor(x * k));
  // Boundaries are the doubles a / k; correct the product's rounding.
  if (a < k - 1 && static_cast<double>(a + 1) / k <= x) ++a;
  if (a > 0 && static_cast<double>(a) / k > x) --a;
  return std::clamp(a, 0, k - 1);
}

bool check_design_regularity(const LatentDesign& design, int k, double lambda1, double lambda2) {
  if (k < 1 || !(lambda1 > 0.0) || !(lambda1 <= lambda2)) {
    throw DomainError("check_design_regularity: need k >= 1 and 0 < lambda1 <= lambda2");
  }
  std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
  for (double x : design.values()) ++counts[static_cast<std::size_t>(interval_index(x, k))];
  const double per = static_cast<double>(design.size()) / k;
  return std::all_of(counts.begin(), counts.end(), [&](std::size_t c) {
    const auto cd = static_cast<double>(c);
    return cd >= lambda1 * per && cd <= lambda2 * per;
  });
}

Assignment contiguous_assignment(std::size_t n, int k) {
  if (k < 1) throw DomainError("contiguous_assignment: k must be positive");
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = static_cast<int>((i * static_cast<std::size_t>(k)) / n);
  }
  return Assignment(std::move(labels), k);
}

}  // namespace graphon
