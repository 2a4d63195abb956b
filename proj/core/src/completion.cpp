#include "graphon/completion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "graphon/error.hpp"
#include "graphon/model.hpp"
#include "graphon/rng.hpp"
#include "kmeans.hpp"

namespace graphon {

ObservationSet::ObservationSet(Index n) : n_(n) {
  if (n < 2) throw DomainError("ObservationSet: need n >= 2");
}

void ObservationSet::add(Index i, Index j, std::size_t multiplicity) {
  if (i < 0 || j < 0 || i >= n_ || j >= n_) throw DomainError("ObservationSet: index out of range");
  if (i == j) throw DomainError("ObservationSet: diagonal pair");
  if (multiplicity == 0) return;
  const auto pos = std::lower_bound(entries_.begin(), entries_.end(), std::pair{i, j},
                                    [](const Entry& e, const std::pair<Index, Index>& key) {
                                      return std::pair{e.i, e.j} < key;
                                    });
  if (pos != entries_.end() && pos->i == i && pos->j == j) {
    pos->multiplicity += multiplicity;
  } else {
    entries_.insert(pos, Entry{i, j, multiplicity});
  }
  count_ += multiplicity;
}

Matrix ObservationSet::multiplicities() const {
  Matrix w = Matrix::Zero(n_, n_);
  for (const auto& e : entries_) w(e.i, e.j) = static_cast<double>(e.multiplicity);
  return w;
}

ObservationSet sample_omega(Index n, std::size_t m_count, std::uint64_t seed) {
  if (n < 2) throw DomainError("sample_omega: need n >= 2");
  const auto un = static_cast<std::uint64_t>(n);
  Rng rng(seed);
  std::map<std::pair<Index, Index>, std::size_t> counts;
  for (std::size_t t = 0; t < m_count; ++t) {
    const std::uint64_t r = rng.below(un * (un - 1));
    const auto i = static_cast<Index>(r / (un - 1));
    auto j = static_cast<Index>(r % (un - 1));
    if (j >= i) ++j;
    ++counts[{i, j}];
  }
  ObservationSet omega(n);
  for (const auto& [pair, m] : counts) omega.add(pair.first, pair.second, m);
  return omega;
}

Matrix ObservedGraph::weighted() const {
  Matrix b = Matrix::Zero(omega.n(), omega.n());
  const auto& entries = omega.entries();
  for (std::size_t t = 0; t < entries.size(); ++t) {
    b(entries[t].i, entries[t].j) = static_cast<double>(entries[t].multiplicity) * values[t];
  }
  return b;
}

ObservedGraph observe(const Adjacency& a, const ObservationSet& omega) {
  if (a.size() != omega.n()) throw DomainError("observe: dimension mismatch");
  ObservedGraph obs{omega, {}};
  obs.values.reserve(omega.distinct());
  for (const auto& e : omega.entries()) obs.values.push_back(a(e.i, e.j));
  return obs;
}

namespace {

void check_observed(const ObservedGraph& obs) {
  if (obs.omega.empty()) throw DomainError("completion: empty observation set");
  if (obs.values.size() != obs.omega.distinct()) throw DomainError("completion: values not aligned with omega");
}

// Sum of B over both orientations of each block pair.
Matrix pooled_block_sums(const Matrix& b, const Assignment& z) {
  const int k = z.k();
  Matrix s = Matrix::Zero(k, k);
  const Index n = b.rows();
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      if (b(i, j) != 0.0) s(z[static_cast<std::size_t>(i)], z[static_cast<std::size_t>(j)]) += b(i, j);
    }
  }
  return s + s.transpose() - Matrix(s.diagonal().asDiagonal());
}

BlockMatrix q_step(const Matrix& b, std::size_t omega_count, const Assignment& z) {
  const int k = z.k();
  const auto n = static_cast<double>(b.rows());
  const Matrix s = pooled_block_sums(b, z);
  const auto sizes = z.cluster_sizes();
  Matrix q = Matrix::Zero(k, k);
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> used(k, k);
  const double scale = n * n / static_cast<double>(omega_count);
  for (int a = 0; a < k; ++a) {
    for (int c = 0; c < k; ++c) {
      const auto ma = static_cast<double>(sizes[static_cast<std::size_t>(a)]);
      const auto mc = static_cast<double>(sizes[static_cast<std::size_t>(c)]);
      // Ordered pairs in (a,c) and (c,a) together.
      const double pairs = a == c ? ma * (ma - 1.0) : 2.0 * ma * mc;
      used(a, c) = pairs > 0.0;
      if (pairs > 0.0) q(a, c) = std::clamp(scale * s(a, c) / pairs, 0.0, 1.0);
    }
  }
  return BlockMatrix(std::move(q), true, std::move(used));
}

double objective_from_weighted(const Matrix& b, std::size_t omega_count, const BlockMatrix& q,
                               const Assignment& z) {
  const Index n = b.rows();
  if (static_cast<std::size_t>(n) != z.size() || q.rows() != z.k() || q.cols() != z.k()) {
    throw DomainError("completion_objective: dimension mismatch");
  }
  const double c = 2.0 * static_cast<double>(n) * static_cast<double>(n) / static_cast<double>(omega_count);
  double quad = 0.0;
  double linear = 0.0;
  for (Index j = 0; j < n; ++j) {
    const int zb = z[static_cast<std::size_t>(j)];
    for (Index i = 0; i < n; ++i) {
      if (i == j) continue;
      const double t = q(z[static_cast<std::size_t>(i)], zb);
      quad += t * t;
      linear += b(i, j) * t;
    }
  }
  return quad - c * linear;
}

bool strictly_less(double x, double y) { return x < y - 1e-12 * (1.0 + std::abs(y)); }

void reassign_nodes(const Matrix& sym, double c, const Matrix& q, std::vector<int>& labels, int k) {
  const auto n = static_cast<Index>(labels.size());
  std::vector<double> sizes(static_cast<std::size_t>(k), 0.0);
  for (int label : labels) sizes[static_cast<std::size_t>(label)] += 1.0;
  const Matrix q2 = q.cwiseProduct(q);
  Vector s(k);
  for (Index i = 0; i < n; ++i) {
    s.setZero();
    const auto col = sym.col(i);
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
        cost += 2.0 * sizes[static_cast<std::size_t>(b)] * q2(g, b) - c * q(g, b) * s(b);
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

}  // namespace

double completion_objective(const ObservedGraph& obs, const BlockMatrix& q, const Assignment& z) {
  check_observed(obs);
  return objective_from_weighted(obs.weighted(), obs.omega.count(), q, z);
}

double completion_objective(const Adjacency& a, const ObservationSet& omega, const BlockMatrix& q,
                            const Assignment& z) {
  return completion_objective(observe(a, omega), q, z);
}

BlockMatrix q_from_assignment_completion(const ObservedGraph& obs, const Assignment& z) {
  check_observed(obs);
  if (static_cast<std::size_t>(obs.omega.n()) != z.size()) {
    throw DomainError("q_from_assignment_completion: dimension mismatch");
  }
  return q_step(obs.weighted(), obs.omega.count(), z);
}

BlockMatrix q_from_assignment_completion(const Adjacency& a, const ObservationSet& omega,
                                         const Assignment& z) {
  return q_from_assignment_completion(observe(a, omega), z);
}

FitResult fit_completion(const ObservedGraph& obs, int k, const CompletionOptions& opts,
                         std::uint64_t seed) {
  check_observed(obs);
  opts.fit.validate();
  const Index n = obs.omega.n();
  const auto un = static_cast<std::size_t>(n);
  if (k < 1 || n < k) throw DomainError("fit_completion: need n >= k >= 1");
  const auto count = obs.omega.count();
  const double fraction = static_cast<double>(count) / (static_cast<double>(n) * static_cast<double>(n));
  if (fraction < opts.min_fraction) {
    std::ostringstream msg;
    msg << "fit_completion: |Omega|/n^2 = " << fraction << " is below the floor " << opts.min_fraction;
    throw RefusalError(msg.str());
  }
  if (opts.fit.initial && (opts.fit.initial->size() != un || opts.fit.initial->k() != k)) {
    throw DomainError("fit_completion: initial assignment has wrong shape");
  }

  const Matrix b = obs.weighted();
  const Matrix sym = b + b.transpose();
  const double c = 2.0 * static_cast<double>(n) * static_cast<double>(n) / static_cast<double>(count);

  struct Run {
    Assignment z;
    BlockMatrix q;
    double objective = 0.0;
    int iterations = 0;
    std::vector<double> history;
  };

  const int restarts = opts.fit.init == InitMethod::Given ? 1 : opts.fit.restarts;
  std::optional<Run> best;
  bool fallback = false;
  for (int r = 0; r < restarts; ++r) {
    const std::uint64_t run_seed = derive_seed(seed, static_cast<std::uint64_t>(r));
    Assignment start;
    if (opts.fit.init == InitMethod::Given) {
      start = *opts.fit.initial;
    } else if (opts.fit.init == InitMethod::Spectral && r == 0) {
      auto init = spectral_init(Matrix(0.5 * (c / 2.0) * sym), k, run_seed);
      fallback = init.fallback;
      start = std::move(init.assignment);
    } else {
      start = Assignment(detail::random_labels(un, k, run_seed), k);
    }

    Run run{start, q_step(b, count, start), 0.0, 0, {}};
    run.objective = objective_from_weighted(b, count, run.q, run.z);
    run.history.push_back(run.objective);
    std::vector<int> labels(run.z.labels().begin(), run.z.labels().end());
    for (int iter = 1; iter <= opts.fit.max_iterations; ++iter) {
      reassign_nodes(sym, c, run.q.values(), labels, k);
      Assignment next(labels, k);
      BlockMatrix q = q_step(b, count, next);
      const double value = objective_from_weighted(b, count, q, next);
      const double decrease = run.objective - value;
      run.z = std::move(next);
      run.q = std::move(q);
      run.objective = value;
      run.iterations = iter;
      run.history.push_back(value);
      if (decrease < opts.fit.tolerance) break;
    }
    if (!best || strictly_less(run.objective, best->objective)) best = std::move(run);
  }

  canonicalize(best->q, best->z);
  ProbMatrix theta = theta_from_blocks(best->q, best->z);
  return FitResult{std::move(best->q), std::move(best->z), std::move(theta), best->objective,
                   best->iterations, restarts, "completion", std::move(best->history), fallback};
}

std::vector<double> predict(const ProbMatrix& theta_hat, const std::vector<std::pair<Index, Index>>& pairs) {
  std::vector<double> out;
  out.reserve(pairs.size());
  const Index n = theta_hat.size();
  for (auto [i, j] : pairs) {
    if (i < 0 || j < 0 || i >= n || j >= n) throw DomainError("predict: index out of range");
    if (i == j) throw DomainError("predict: diagonal pair requested");
    out.push_back(theta_hat(i, j));
  }
  return out;
}

namespace io {

namespace {

bool next_fields(std::istream& in, std::string& line, std::size_t& line_no, std::istringstream& fields) {
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    fields.clear();
    fields.str(line);
    return true;
  }
  return false;
}

std::string where(std::string_view what, std::size_t line_no) {
  return std::string(what) + " line " + std::to_string(line_no);
}

}  // namespace

void write_observations(std::ostream& out, const ObservationSet& omega) {
  for (const auto& e : omega.entries()) out << (e.i + 1) << ' ' << (e.j + 1) << ' ' << e.multiplicity << '\n';
}

ObservationSet read_observations(std::istream& in, Index n) {
  ObservationSet omega(n);
  std::string line;
  std::size_t line_no = 0;
  std::istringstream fields;
  while (next_fields(in, line, line_no, fields)) {
    long long i = 0;
    long long j = 0;
    long long m = 0;
    std::string extra;
    if (!(fields >> i >> j >> m) || (fields >> extra) || m < 0) {
      throw FormatError(where("observation set", line_no) + ": expected 'i j multiplicity'");
    }
    if (i < 1 || j < 1 || i > n || j > n || i == j) {
      throw FormatError(where("observation set", line_no) + ": invalid pair");
    }
    omega.add(static_cast<Index>(i - 1), static_cast<Index>(j - 1), static_cast<std::size_t>(m));
  }
  return omega;
}

void write_masked_edges(std::ostream& out, const ObservedGraph& obs) {
  const auto& entries = obs.omega.entries();
  for (std::size_t t = 0; t < entries.size(); ++t) {
    for (std::size_t r = 0; r < entries[t].multiplicity; ++r) {
      out << (entries[t].i + 1) << ' ' << (entries[t].j + 1) << ' ' << (obs.values[t] != 0.0 ? 1 : 0) << '\n';
    }
  }
}

ObservedGraph read_masked_edges(std::istream& in, Index n) {
  ObservationSet omega(n);
  std::map<std::pair<Index, Index>, double> seen;
  std::string line;
  std::size_t line_no = 0;
  std::istringstream fields;
  while (next_fields(in, line, line_no, fields)) {
    long long i = 0;
    long long j = 0;
    int v = 0;
    std::string extra;
    if (!(fields >> i >> j >> v) || (fields >> extra) || (v != 0 && v != 1)) {
      throw FormatError(where("masked edge list", line_no) + ": expected 'i j value' with value 0 or 1");
    }
    if (i < 1 || j < 1 || i > n || j > n || i == j) {
      throw FormatError(where("masked edge list", line_no) + ": invalid pair");
    }
    const auto a = static_cast<Index>(i - 1);
    const auto b = static_cast<Index>(j - 1);
    const std::pair key{std::min(a, b), std::max(a, b)};
    const auto [it, inserted] = seen.emplace(key, static_cast<double>(v));
    if (!inserted && it->second != static_cast<double>(v)) {
      throw FormatError(where("masked edge list", line_no) + ": conflicting value for a repeated pair");
    }
    omega.add(a, b);
  }
  ObservedGraph obs{omega, {}};
  for (const auto& e : omega.entries()) obs.values.push_back(seen.at({std::min(e.i, e.j), std::max(e.i, e.j)}));
  return obs;
}

}  // namespace io

}  // namespace graphon
