#include "graphon/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "graphon/error.hpp"
#include "graphon/rng.hpp"
#include "kmeans.hpp"

namespace graphon {

namespace {

// Costs within this relative margin count as ties.
constexpr double kTieEpsilon = 1e-12;

bool strictly_less(double x, double y) {
  if (std::isinf(y)) return x < y;
  return x < y - kTieEpsilon * (1.0 + std::abs(y));
}

void check_fit_inputs(Index n, int k) {
  if (k < 1 || n < k) throw DomainError("fit: need n >= k >= 1");
}

// One Gauss-Seidel sweep: each node in turn moves to the cluster with the
// smallest contribution to L given Q. With symmetric Q the two ordered pairs
// (i,j), (j,i) contribute equally, so the factor 2 is dropped.
void reassign_nodes(const Matrix& a, const Matrix& q, std::vector<int>& labels, int k) {
  const auto n = static_cast<Index>(labels.size());
  std::vector<double> sizes(static_cast<std::size_t>(k), 0.0);
  for (int label : labels) sizes[static_cast<std::size_t>(label)] += 1.0;
  const Matrix q2 = q.cwiseProduct(q);
  Vector s(k);
  for (Index i = 0; i < n; ++i) {
    s.setZero();
    const auto col = a.col(i);
    for (Index j = 0; j < n; ++j) {
      if (j != i) s(labels[static_cast<std::size_t>(j)]) += col(j);
    }
    auto& own = labels[static_cast<std::size_t>(i)];
    sizes[static_cast<std::size_t>(own)] -= 1.0;
    int best = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (int g = 0; g < k; ++g) {
      double cost = 0.0;
      for (int b = 0; b < k; ++b) {
        cost += sizes[static_cast<std::size_t>(b)] * q2(g, b) - 2.0 * q(g, b) * s(b);
      }
      if (g == 0 || strictly_less(cost, best_cost)) {
        best_cost = cost;
        best = g;
      }
    }
    own = best;
    sizes[static_cast<std::size_t>(own)] += 1.0;
  }
}

struct Run {
  Assignment z;
  BlockMatrix q;
  double objective = 0.0;
  int iterations = 0;
  std::vector<double> history;
};

Run run_alternating(const Adjacency& a, Assignment z, const FitOptions& opts) {
  const int k = z.k();
  Run run{z, q_from_assignment(a, z), 0.0, 0, {}};
  run.objective = objective(a, run.q, run.z);
  run.history.push_back(run.objective);
  std::vector<int> labels(z.labels().begin(), z.labels().end());
  for (int iter = 1; iter <= opts.max_iterations; ++iter) {
    reassign_nodes(a.matrix(), run.q.values(), labels, k);
    Assignment next(labels, k);
    BlockMatrix q = q_from_assignment(a, next);
    const double value = objective(a, q, next);
    const double decrease = run.objective - value;
    run.z = std::move(next);
    run.q = std::move(q);
    run.objective = value;
    run.iterations = iter;
    run.history.push_back(value);
    if (decrease < opts.tolerance) break;
  }
  return run;
}

FitResult make_result(BlockMatrix q, Assignment z, double value, std::string method) {
  canonicalize(q, z);
  FitResult fit{q, z, theta_from_blocks(q, z), value, 0, 1, std::move(method), {value}, false};
  return fit;
}

}  // namespace

void FitOptions::validate() const {
  if (restarts < 1) throw DomainError("FitOptions: restarts must be >= 1");
  if (max_iterations < 1) throw DomainError("FitOptions: max_iterations must be >= 1");
  if (!(tolerance >= 0.0)) throw DomainError("FitOptions: tolerance must be >= 0");
  if (init == InitMethod::Given && !initial) {
    throw DomainError("FitOptions: init = given requires an initial assignment");
  }
}

double objective(const Adjacency& a, const BlockMatrix& q, const Assignment& z) {
  if (static_cast<std::size_t>(a.size()) != z.size() || q.rows() != z.k() || q.cols() != z.k()) {
    throw DomainError("objective: dimension mismatch");
  }
  const auto n = static_cast<Index>(z.size());
  double total = 0.0;
  for (Index j = 0; j < n; ++j) {
    const int b = z[static_cast<std::size_t>(j)];
    for (Index i = 0; i < n; ++i) {
      if (i == j) continue;
      const double d = a(i, j) - q(z[static_cast<std::size_t>(i)], b);
      total += d * d;
    }
  }
  return total;
}

BlockMatrix q_from_assignment(const Adjacency& a, const Assignment& z) {
  return block_averages(a.matrix(), z);
}

void canonicalize(BlockMatrix& q, Assignment& z) {
  std::vector<int> perm;
  z = z.canonical(&perm);
  q = q.permuted(perm);
}

FitResult fit_exact(const Adjacency& a, int k) {
  const auto n = static_cast<std::size_t>(a.size());
  if (n > kExactMaxNodes || k > kExactMaxClusters) {
    throw RefusalError("fit_exact: enumeration limited to n <= " + std::to_string(kExactMaxNodes) +
                       " and k <= " + std::to_string(kExactMaxClusters));
  }
  check_fit_inputs(static_cast<Index>(n), k);

  // Restricted growth strings enumerate each partition once, in lexicographic
  // order; each is its own canonical labeling.
  std::vector<int> labels(n, 0);
  std::vector<int> prefix_max(n, 0);
  double best_value = std::numeric_limits<double>::infinity();
  std::optional<Assignment> best_z;
  std::optional<BlockMatrix> best_q;

  auto evaluate = [&] {
    Assignment z(labels, k);
    BlockMatrix q = q_from_assignment(a, z);
    const double value = objective(a, q, z);
    if (strictly_less(value, best_value)) {
      best_value = value;
      best_z = std::move(z);
      best_q = std::move(q);
    }
  };

  for (;;) {
    evaluate();
    // Advance to the next restricted growth string.
    std::size_t pos = n;
    while (pos > 1) {
      --pos;
      const int limit = std::min(prefix_max[pos - 1] + 1, k - 1);
      if (labels[pos] < limit) {
        ++labels[pos];
        prefix_max[pos] = std::max(prefix_max[pos - 1], labels[pos]);
        for (std::size_t i = pos + 1; i < n; ++i) {
          labels[i] = 0;
          prefix_max[i] = prefix_max[pos];
        }
        break;
      }
      if (pos == 1) pos = 0;
    }
    if (pos == 0 || n <= 1) break;
  }

  FitResult fit = make_result(*best_q, *best_z, best_value, "exact");
  fit.iterations = 1;
  return fit;
}

FitResult fit_alternating(const Adjacency& a, int k, const FitOptions& opts, std::uint64_t seed) {
  opts.validate();
  const auto n = static_cast<std::size_t>(a.size());
  check_fit_inputs(static_cast<Index>(n), k);
  if (opts.initial && (opts.initial->size() != n || opts.initial->k() != k)) {
    throw DomainError("fit_alternating: initial assignment has wrong shape");
  }

  const int restarts = opts.init == InitMethod::Given ? 1 : opts.restarts;
  std::optional<Run> best;
  bool fallback = false;
  for (int r = 0; r < restarts; ++r) {
    const std::uint64_t run_seed = derive_seed(seed, static_cast<std::uint64_t>(r));
    Assignment start;
    if (opts.init == InitMethod::Given) {
      start = *opts.initial;
    } else if (opts.init == InitMethod::Spectral && r == 0) {
      auto init = spectral_init(a, k, run_seed);
      fallback = init.fallback;
      start = std::move(init.assignment);
    } else {
      start = Assignment(detail::random_labels(n, k, run_seed), k);
    }
    Run run = run_alternating(a, std::move(start), opts);
    if (!best || strictly_less(run.objective, best->objective)) best = std::move(run);
  }

  FitResult fit = make_result(best->q, best->z, best->objective, "alternating");
  fit.iterations = best->iterations;
  fit.restarts_used = restarts;
  fit.objective_history = std::move(best->history);
  fit.init_fallback = fallback;
  return fit;
}

FitResult fit_given_assignment(const Adjacency& a, const Assignment& z) {
  if (static_cast<std::size_t>(a.size()) != z.size()) {
    throw DomainError("fit_given_assignment: dimension mismatch");
  }
  BlockMatrix q = q_from_assignment(a, z);
  const double value = objective(a, q, z);
  FitResult fit = make_result(std::move(q), z, value, "oracle");
  fit.iterations = 1;
  return fit;
}

Assignment oracle_assignment(const LatentDesign& design, int k, OracleRule rule) {
  if (k < 1) throw DomainError("oracle_assignment: k must be positive");
  const std::size_t n = design.size();
  std::vector<int> labels(n);
  if (rule == OracleRule::Interval) {
    for (std::size_t i = 0; i < n; ++i) labels[i] = interval_index(design[i], k);
  } else {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return design[x] < design[y]; });
    for (std::size_t r = 0; r < n; ++r) {
      labels[order[r]] = static_cast<int>((r * static_cast<std::size_t>(k)) / n);
    }
  }
  return Assignment(std::move(labels), k);
}

double block_approximation_error(const GraphonSpec& spec, const LatentDesign& design, int k,
                                 OracleRule rule) {
  const ProbMatrix theta = theta_from_graphon(spec, design);
  const Assignment z = oracle_assignment(design, k, rule);
  const BlockMatrix bar = block_averages(theta.matrix(), z);
  const auto n = static_cast<Index>(design.size());
  double total = 0.0;
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      if (i == j) continue;
      const double d = theta(i, j) - bar(z[static_cast<std::size_t>(i)], z[static_cast<std::size_t>(j)]);
      total += d * d;
    }
  }
  return total / (static_cast<double>(n) * static_cast<double>(n));
}

// ---- asymmetric (biclustering) variant ------------------------------------

namespace {

Matrix indicator(const Assignment& z) {
  Matrix c = Matrix::Zero(static_cast<Index>(z.size()), z.k());
  for (std::size_t i = 0; i < z.size(); ++i) c(static_cast<Index>(i), z[i]) = 1.0;
  return c;
}

Vector sizes_of(const Assignment& z) {
  Vector s = Vector::Zero(z.k());
  for (std::size_t i = 0; i < z.size(); ++i) s(z[i]) += 1.0;
  return s;
}

// Rows of `a` reassigned given column clusters; rows do not interact, so the
// batch update is exact coordinate descent.
std::vector<int> best_row_clusters(const Matrix& a, const Matrix& q, const Assignment& cols) {
  const Matrix s = a * indicator(cols);              // n x l column-cluster sums
  const Vector m = sizes_of(cols);                   // l
  const Vector fixed = q.cwiseProduct(q) * m;        // k: sum_b m_b q_gb^2
  const Matrix cost = (-2.0 * s * q.transpose()).rowwise() + fixed.transpose();
  std::vector<int> labels(static_cast<std::size_t>(a.rows()));
  for (Index i = 0; i < a.rows(); ++i) {
    int best = 0;
    for (Index g = 1; g < q.rows(); ++g) {
      if (strictly_less(cost(i, g), cost(i, best))) best = static_cast<int>(g);
    }
    labels[static_cast<std::size_t>(i)] = best;
  }
  return labels;
}

struct AsymRun {
  Assignment rows;
  Assignment cols;
  BlockMatrix q;
  double objective = 0.0;
  int iterations = 0;
  std::vector<double> history;
};

AsymRun run_asymmetric(const Matrix& a, Assignment rows, Assignment cols, const FitOptions& opts) {
  AsymRun run{rows, cols, asymmetric_block_means(a, rows, cols), 0.0, 0, {}};
  run.objective = asymmetric_objective(a, run.q, run.rows, run.cols);
  run.history.push_back(run.objective);
  const Matrix at = a.transpose();
  for (int iter = 1; iter <= opts.max_iterations; ++iter) {
    run.rows = Assignment(best_row_clusters(a, run.q.values(), run.cols), run.rows.k());
    run.q = asymmetric_block_means(a, run.rows, run.cols);
    run.cols = Assignment(best_row_clusters(at, run.q.values().transpose(), run.rows), run.cols.k());
    run.q = asymmetric_block_means(a, run.rows, run.cols);
    const double value = asymmetric_objective(a, run.q, run.rows, run.cols);
    const double decrease = run.objective - value;
    run.objective = value;
    run.iterations = iter;
    run.history.push_back(value);
    if (decrease < opts.tolerance) break;
  }
  return run;
}

std::pair<Assignment, Assignment> svd_init(const Matrix& a, int k, int l, std::uint64_t seed) {
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Matrix& u = svd.matrixU();
  const Matrix& v = svd.matrixV();
  auto cluster = [&](const Matrix& vectors, int count, std::uint64_t s) {
    const Index dims = std::min<Index>(count, vectors.cols());
    if (count == 1) return Assignment(std::vector<int>(static_cast<std::size_t>(vectors.rows()), 0), 1);
    return Assignment(detail::kmeans(vectors.leftCols(dims), count, s), count);
  };
  return {cluster(u, k, derive_seed(seed, 0)), cluster(v, l, derive_seed(seed, 1))};
}

}  // namespace

double asymmetric_objective(const Matrix& a, const BlockMatrix& q, const Assignment& rows,
                            const Assignment& cols) {
  if (static_cast<std::size_t>(a.rows()) != rows.size() ||
      static_cast<std::size_t>(a.cols()) != cols.size() || q.rows() != rows.k() ||
      q.cols() != cols.k()) {
    throw DomainError("asymmetric_objective: dimension mismatch");
  }
  double total = 0.0;
  for (Index j = 0; j < a.cols(); ++j) {
    const int b = cols[static_cast<std::size_t>(j)];
    for (Index i = 0; i < a.rows(); ++i) {
      const double d = a(i, j) - q(rows[static_cast<std::size_t>(i)], b);
      total += d * d;
    }
  }
  return total;
}

BlockMatrix asymmetric_block_means(const Matrix& a, const Assignment& rows, const Assignment& cols) {
  if (static_cast<std::size_t>(a.rows()) != rows.size() ||
      static_cast<std::size_t>(a.cols()) != cols.size()) {
    throw DomainError("asymmetric_block_means: dimension mismatch");
  }
  const Matrix sums = indicator(rows).transpose() * a * indicator(cols);
  const Vector m1 = sizes_of(rows);
  const Vector m2 = sizes_of(cols);
  Matrix q = Matrix::Zero(rows.k(), cols.k());
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> used(rows.k(), cols.k());
  for (Index x = 0; x < q.rows(); ++x) {
    for (Index y = 0; y < q.cols(); ++y) {
      const double count = m1(x) * m2(y);
      used(x, y) = count > 0.0;
      if (count > 0.0) q(x, y) = sums(x, y) / count;
    }
  }
  return BlockMatrix(std::move(q), false, std::move(used));
}

AsymmetricFit fit_asymmetric(const Matrix& a, int k, int l, const FitOptions& opts,
                             std::uint64_t seed) {
  opts.validate();
  const Index n = a.rows();
  const Index m = a.cols();
  if (k < 1 || l < 1 || n < k || m < l) throw DomainError("fit_asymmetric: need n >= k, m >= l");
  for (Index j = 0; j < m; ++j) {
    for (Index i = 0; i < n; ++i) {
      if (a(i, j) != 0.0 && a(i, j) != 1.0) throw DomainError("fit_asymmetric: matrix is not binary");
    }
  }
  if (opts.init == InitMethod::Given &&
      (!opts.initial_cols || opts.initial->size() != static_cast<std::size_t>(n) ||
       opts.initial->k() != k || opts.initial_cols->size() != static_cast<std::size_t>(m) ||
       opts.initial_cols->k() != l)) {
    throw DomainError("fit_asymmetric: given init needs row and column assignments of the right shape");
  }

  const int restarts = opts.init == InitMethod::Given ? 1 : opts.restarts;
  std::optional<AsymRun> best;
  for (int r = 0; r < restarts; ++r) {
    const std::uint64_t run_seed = derive_seed(seed, static_cast<std::uint64_t>(r));
    Assignment rows;
    Assignment cols;
    if (opts.init == InitMethod::Given) {
      rows = *opts.initial;
      cols = *opts.initial_cols;
    } else if (opts.init == InitMethod::Spectral && r == 0) {
      std::tie(rows, cols) = svd_init(a, k, l, run_seed);
    } else {
      rows = Assignment(detail::random_labels(static_cast<std::size_t>(n), k, derive_seed(run_seed, 0)), k);
      cols = Assignment(detail::random_labels(static_cast<std::size_t>(m), l, derive_seed(run_seed, 1)), l);
    }
    AsymRun run = run_asymmetric(a, std::move(rows), std::move(cols), opts);
    if (!best || strictly_less(run.objective, best->objective)) best = std::move(run);
  }

  std::vector<int> row_perm;
  std::vector<int> col_perm;
  Assignment rows = best->rows.canonical(&row_perm);
  Assignment cols = best->cols.canonical(&col_perm);
  return {best->q.permuted(row_perm, col_perm), std::move(rows), std::move(cols), best->objective,
          best->iterations, restarts, std::move(best->history)};
}

}  // namespace graphon
