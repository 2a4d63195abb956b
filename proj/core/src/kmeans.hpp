#pragma once

#include <cstdint>
#include <vector>

#include "graphon/types.hpp"

namespace graphon::detail {

inline constexpr int kKMeansMaxIterations = 50;

/// Lloyd's algorithm with k-means++ seeding on the rows of `points`.
/// Nearest-center ties go to the lowest center index; an empty cluster keeps
/// its previous center.
std::vector<int> kmeans(const Matrix& points, int k, std::uint64_t seed,
                        int max_iterations = kKMeansMaxIterations);

/// Uniform random labels in [0, k).
std::vector<int> random_labels(std::size_t n, int k, std::uint64_t seed);

}  // namespace graphon::detail
