#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "graphon/graphon.hpp"
#include "graphon/types.hpp"

namespace graphon {

enum class DesignKind { IidUniform, FixedGrid, UserList };

struct DesignSpec {
  DesignKind kind = DesignKind::IidUniform;
  std::vector<double> values;  // used by UserList only

  static DesignSpec parse(std::string_view name);
};

/// Latent positions: iid U[0,1], the grid xi_i = (i-1)/(n-1), or the user's list.
LatentDesign sample_design(const DesignSpec& dist, std::size_t n, std::uint64_t seed);

/// theta_ij = f(xi_i, xi_j) off the diagonal, 0 on it.
ProbMatrix theta_from_graphon(const GraphonSpec& spec, const LatentDesign& design);

/// theta_ij = Q[z(i), z(j)] off the diagonal. Q must be symmetric.
ProbMatrix theta_from_blocks(const BlockMatrix& q, const Assignment& z);

/// Rescales so that max theta <= beta. Matrices already below beta are untouched.
ProbMatrix scale_to_sparsity(const ProbMatrix& theta, double beta);

/// Independent Bernoulli(theta_ij) for j < i, mirrored. One uniform draw per
/// lower-triangle pair in row-major order, regardless of theta.
Adjacency sample_adjacency(const ProbMatrix& theta, std::uint64_t seed);

struct BlockAverage {
  double value = 0.0;
  bool used = false;  // false: the block holds no index pair, value is 0
};

/// Mean of M over z^{-1}(a) x z^{-1}(b), excluding i == j within a cluster.
BlockAverage block_average(const Matrix& m, const Assignment& z, int a, int b);

/// All k x k block averages in one O(n^2) pass. Entries of m must lie in [0,1].
BlockMatrix block_averages(const Matrix& m, const Assignment& z);

/// Index a of the interval U_a = [a/k, (a+1)/k) containing x (0-based);
/// x = 1 belongs to the last interval.
int interval_index(double x, int k);

inline constexpr double kDefaultLambda1 = 0.5;
inline constexpr double kDefaultLambda2 = 1.5;

/// True iff every U_a holds between lambda1 n/k and lambda2 n/k design points.
bool check_design_regularity(const LatentDesign& design, int k,
                             double lambda1 = kDefaultLambda1,
                             double lambda2 = kDefaultLambda2);

/// Balanced contiguous assignment: node i goes to cluster floor(i k / n).
Assignment contiguous_assignment(std::size_t n, int k);

}  // namespace graphon
