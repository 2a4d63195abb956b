#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <utility>
#include <vector>

#include "graphon/estimators.hpp"
#include "graphon/types.hpp"

namespace graphon {

/// A multiset of ordered off-diagonal index pairs, stored as distinct pairs
/// (sorted by row, then column) with multiplicities.
class ObservationSet {
 public:
  struct Entry {
    Index i = 0;
    Index j = 0;
    std::size_t multiplicity = 0;
  };

  ObservationSet() = default;
  explicit ObservationSet(Index n);

  /// Adds `multiplicity` copies of (i, j). Throws DomainError for i == j or
  /// out-of-range indices.
  void add(Index i, Index j, std::size_t multiplicity = 1);

  Index n() const noexcept { return n_; }
  /// |Omega|, counting multiplicity.
  std::size_t count() const noexcept { return count_; }
  std::size_t distinct() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return count_ == 0; }
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  /// n x n matrix of multiplicities.
  Matrix multiplicities() const;

 private:
  Index n_ = 0;
  std::size_t count_ = 0;
  std::vector<Entry> entries_;
};

/// |Omega| = m_count draws, uniform with replacement over the n(n-1) ordered
/// off-diagonal pairs.
ObservationSet sample_omega(Index n, std::size_t m_count, std::uint64_t seed);

/// The observed values of A on Omega, aligned with omega.entries().
struct ObservedGraph {
  ObservationSet omega;
  std::vector<double> values;

  /// n x n matrix of multiplicity-weighted observed values, W o A.
  Matrix weighted() const;
};

ObservedGraph observe(const Adjacency& a, const ObservationSet& omega);

/// ||theta||^2 - (2 n^2 / |Omega|) sum_Omega A_ij theta_ij, theta = theta_from_blocks(q, z).
double completion_objective(const Adjacency& a, const ObservationSet& omega, const BlockMatrix& q,
                            const Assignment& z);
double completion_objective(const ObservedGraph& obs, const BlockMatrix& q, const Assignment& z);

/// Blockwise minimizer of completion_objective over Q in [0,1]^{k x k}:
/// Q_ab = clamp(n^2 S_ab / (|Omega| N_ab)), where S_ab sums the observed values
/// falling in both orientations of block (a,b) and N_ab counts the ordered
/// off-diagonal pairs there. Blocks with N_ab = 0 are 0 and flagged unused.
BlockMatrix q_from_assignment_completion(const Adjacency& a, const ObservationSet& omega,
                                         const Assignment& z);
BlockMatrix q_from_assignment_completion(const ObservedGraph& obs, const Assignment& z);

struct CompletionOptions {
  FitOptions fit;
  double min_fraction = 0.05;  // refuse when |Omega| / n^2 is below this
};

/// Alternating minimization of completion_objective. FitResult::objective is
/// the completion objective.
FitResult fit_completion(const ObservedGraph& obs, int k, const CompletionOptions& opts,
                         std::uint64_t seed);

/// theta_hat_ij for each requested pair; DomainError on i == j.
std::vector<double> predict(const ProbMatrix& theta_hat, const std::vector<std::pair<Index, Index>>& pairs);

namespace io {

/// "i j multiplicity" per distinct pair, 1-based.
void write_observations(std::ostream& out, const ObservationSet& omega);
ObservationSet read_observations(std::istream& in, Index n);

/// Masked edge list: one "i j value" line per observation (1-based, value 0 or 1).
/// Repeated lines are repeated draws.
void write_masked_edges(std::ostream& out, const ObservedGraph& obs);
ObservedGraph read_masked_edges(std::istream& in, Index n);

}  // namespace io

}  // namespace graphon
