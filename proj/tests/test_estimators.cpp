#include <gtest/gtest.h>

#include <cmath>

#include "graphon/error.hpp"
#include "graphon/estimators.hpp"
#include "graphon/model.hpp"
#include "test_support.hpp"

using namespace graphon;

namespace {

BlockMatrix identity_q() { return BlockMatrix(Matrix::Identity(2, 2), true); }

std::vector<int> labels_of(const Assignment& z) { return {z.labels().begin(), z.labels().end()}; }

// Plain block mean written out from the definition.
double naive_block_mean(const Matrix& a, const Assignment& z, int g, int h) {
  double sum = 0.0;
  double count = 0.0;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      if (i == j || z[static_cast<std::size_t>(i)] != g || z[static_cast<std::size_t>(j)] != h) continue;
      sum += a(i, j);
      count += 1.0;
    }
  }
  return count > 0 ? sum / count : 0.0;
}

void expect_block_average_identity(const Adjacency& a, const FitResult& fit) {
  const int k = fit.z_hat.k();
  for (int g = 0; g < k; ++g) {
    for (int h = 0; h < k; ++h) {
      if (!fit.q_hat.used(g, h)) continue;
      EXPECT_NEAR(fit.q_hat(g, h), naive_block_mean(a.matrix(), fit.z_hat, g, h), 1e-12);
    }
  }
  for (Index i = 0; i < a.size(); ++i) {
    EXPECT_EQ(fit.theta_hat(i, i), 0.0);
    for (Index j = 0; j < a.size(); ++j) {
      if (i != j) {
        EXPECT_EQ(fit.theta_hat(i, j), fit.q_hat(fit.z_hat[static_cast<std::size_t>(i)], fit.z_hat[static_cast<std::size_t>(j)]));
      }
    }
  }
}

}  // namespace

TEST(Objective, TwoCliqueExamples) {
  const auto a = test::two_clique();
  const Assignment z({0, 0, 1, 1}, 2);
  EXPECT_EQ(objective(a, identity_q(), z), 0.0);
  EXPECT_EQ(objective(a, BlockMatrix(Matrix::Zero(2, 2), true), z), 4.0);
}

TEST(Objective, LabelPermutationInvariance) {
  const auto a = test::random_adjacency(9, 0.4, 1);
  const auto z = test::random_assignment(9, 3, 2);
  const BlockMatrix q(test::random_symmetric(3, 0, 1, 3), true);
  const std::vector<int> perm{1, 2, 0};
  std::vector<int> relabeled;
  for (int l : z.labels()) relabeled.push_back(perm[static_cast<std::size_t>(l)]);
  EXPECT_NEAR(objective(a, q, z), objective(a, q.permuted(perm), Assignment(relabeled, 3)), 1e-12);
}

TEST(QFromAssignment, Examples) {
  const auto a = test::two_clique();
  const auto q = q_from_assignment(a, Assignment({0, 0, 1, 1}, 2));
  EXPECT_EQ(q.values(), Matrix::Identity(2, 2));
  const auto b = test::random_adjacency(10, 0.3, 4);
  const auto grand = q_from_assignment(b, Assignment(std::vector<int>(10, 0), 1));
  EXPECT_DOUBLE_EQ(grand(0, 0), b.matrix().sum() / 90.0);
}

TEST(QFromAssignment, PerturbationNeverImproves) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Index n = 6 + static_cast<Index>(seed % 7);
    const int k = 1 + static_cast<int>(seed % 4);
    const auto a = test::random_adjacency(n, 0.45, seed);
    const auto z = test::random_assignment(static_cast<std::size_t>(n), k, seed + 1000);
    const auto q = q_from_assignment(a, z);
    const double base = objective(a, q, z);
    for (int g = 0; g < k; ++g) {
      for (int h = g; h < k; ++h) {
        for (double delta : {-0.1, 0.1}) {
          Matrix p = q.values();
          p(g, h) = p(h, g) = p(g, h) + delta;
          // Perturbation may leave [0,1]; objective is defined for any real Q.
          double value = 0.0;
          for (Index i = 0; i < n; ++i) {
            for (Index j = 0; j < n; ++j) {
              if (i == j) continue;
              const double d = a(i, j) - p(z[static_cast<std::size_t>(i)], z[static_cast<std::size_t>(j)]);
              value += d * d;
            }
          }
          ASSERT_GE(value, base - 1e-12) << "seed " << seed;
        }
      }
    }
  }
}

TEST(FitExact, Examples) {
  const auto fit = fit_exact(test::two_clique(), 2);
  EXPECT_EQ(fit.objective, 0.0);
  EXPECT_EQ(labels_of(fit.z_hat), (std::vector<int>{0, 0, 1, 1}));
  EXPECT_EQ(fit.q_hat.values(), Matrix::Identity(2, 2));
  EXPECT_EQ(fit.method, "exact");

  for (int k = 1; k <= 3; ++k) {
    const auto zero = fit_exact(Adjacency::empty(6), k);
    EXPECT_EQ(zero.objective, 0.0);
    EXPECT_EQ(zero.q_hat.values(), Matrix::Zero(k, k));
  }

  const auto a = test::random_adjacency(7, 0.5, 8);
  const auto one = fit_exact(a, 1);
  const double mean = a.matrix().sum() / 42.0;
  double expected = 0.0;
  for (Index i = 0; i < 7; ++i) {
    for (Index j = 0; j < 7; ++j) {
      if (i != j) expected += (a(i, j) - mean) * (a(i, j) - mean);
    }
  }
  EXPECT_NEAR(one.objective, expected, 1e-12);
  EXPECT_EQ(labels_of(one.z_hat), std::vector<int>(7, 0));
}

TEST(FitExact, MatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Index n = 5 + static_cast<Index>(seed % 4);
    const int k = 2 + static_cast<int>(seed % 2);
    const auto a = test::random_adjacency(n, 0.5, seed + 50);
    const auto fit = fit_exact(a, k);
    EXPECT_NEAR(fit.objective, test::brute_force_min_objective(a, k), 1e-9) << "seed " << seed;
    expect_block_average_identity(a, fit);
  }
}

TEST(FitExact, SizeGuard) {
  EXPECT_THROW(fit_exact(Adjacency::empty(13), 2), RefusalError);
  EXPECT_THROW(fit_exact(Adjacency::empty(8), 4), RefusalError);
}

TEST(SpectralInit, SeparatesDisconnectedCliques) {
  Matrix m = Matrix::Zero(10, 10);
  for (Index i = 0; i < 10; ++i) {
    for (Index j = 0; j < 10; ++j) {
      if (i != j && (i < 5) == (j < 5)) m(i, j) = 1.0;
    }
  }
  const auto init = spectral_init(Adjacency(m), 2, 3);
  EXPECT_FALSE(init.fallback);
  for (std::size_t i = 1; i < 10; ++i) {
    EXPECT_EQ(init.assignment[i] == init.assignment[0], i < 5) << i;
  }
  const auto again = spectral_init(Adjacency(m), 2, 3);
  EXPECT_EQ(again.assignment, init.assignment);
}

TEST(SpectralInit, KEqualsNGivesSingletons) {
  const auto a = test::random_adjacency(6, 0.5, 1);
  const auto init = spectral_init(a, 6, 2);
  auto sizes = init.assignment.cluster_sizes();
  EXPECT_EQ(sizes, std::vector<std::size_t>(6, 1));
}

TEST(FitAlternating, Examples) {
  FitOptions opts;
  opts.restarts = 8;
  const auto fit = fit_alternating(test::two_clique(), 2, opts, 1);
  EXPECT_EQ(fit.objective, 0.0);
  const auto zero = fit_alternating(Adjacency::empty(7), 3, opts, 2);
  EXPECT_EQ(zero.objective, 0.0);
  EXPECT_LE(zero.iterations, 1);
}

TEST(FitAlternating, DominatedByExact) {
  FitOptions opts;
  opts.restarts = 50;
  int equal = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto a = test::random_adjacency(8, 0.5, seed);
    const auto exact = fit_exact(a, 2);
    const auto alt = fit_alternating(a, 2, opts, seed);
    ASSERT_GE(alt.objective, exact.objective - 1e-9);
    if (alt.objective <= exact.objective + 1e-9) ++equal;
  }
  EXPECT_GE(equal, 90);
}

TEST(FitAlternating, MonotoneHistoryAndIdentity) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Index n = 20 + static_cast<Index>(seed);
    const int k = 2 + static_cast<int>(seed % 5);
    const auto a = test::random_adjacency(n, 0.3, seed);
    FitOptions opts;
    opts.restarts = 3;
    opts.init = seed % 2 == 0 ? InitMethod::Spectral : InitMethod::Random;
    const auto fit = fit_alternating(a, k, opts, seed);
    ASSERT_FALSE(fit.objective_history.empty());
    for (std::size_t t = 1; t < fit.objective_history.size(); ++t) {
      EXPECT_LE(fit.objective_history[t], fit.objective_history[t - 1] + 1e-9);
    }
    EXPECT_NEAR(fit.objective, objective(a, fit.q_hat, fit.z_hat), 1e-9);
    expect_block_average_identity(a, fit);
    EXPECT_EQ(fit.z_hat.canonical(), fit.z_hat);
  }
}

TEST(FitAlternating, DeterministicAndGivenInit) {
  const auto a = test::random_adjacency(30, 0.4, 5);
  FitOptions opts;
  const auto f1 = fit_alternating(a, 3, opts, 77);
  const auto f2 = fit_alternating(a, 3, opts, 77);
  EXPECT_EQ(f1.z_hat, f2.z_hat);
  EXPECT_EQ(f1.objective, f2.objective);

  FitOptions given;
  given.init = InitMethod::Given;
  EXPECT_THROW(given.validate(), DomainError);
  given.initial = test::random_assignment(30, 3, 9);
  const auto g = fit_alternating(a, 3, given, 0);
  EXPECT_EQ(g.restarts_used, 1);
  EXPECT_LE(g.objective, objective(a, q_from_assignment(a, *given.initial), *given.initial) + 1e-9);

  FitOptions bad;
  bad.restarts = 0;
  EXPECT_THROW(bad.validate(), DomainError);
  EXPECT_THROW(fit_alternating(a, 31, opts, 0), DomainError);
}

TEST(Oracle, IntervalRule) {
  const LatentDesign xi({0.1, 0.6, 0.4, 0.9});
  EXPECT_EQ(labels_of(oracle_assignment(xi, 2)), (std::vector<int>{0, 1, 0, 1}));
  EXPECT_EQ(labels_of(oracle_assignment(xi, 1)), std::vector<int>(4, 0));
  const LatentDesign edge({1.0, 0.0});
  EXPECT_EQ(oracle_assignment(edge, 5)[0], 4);
  const LatentDesign shuffled({0.9, 0.1, 0.5, 0.3});
  EXPECT_EQ(labels_of(oracle_assignment(shuffled, 2, OracleRule::SortedQuantile)), (std::vector<int>{1, 0, 1, 0}));
}

TEST(Oracle, BlockApproximationError) {
  const auto grid = sample_design({DesignKind::FixedGrid, {}}, 64, 0);
  // Block graphon on halves with the grid: points at exactly 0.5 never occur for n=64.
  EXPECT_NEAR(block_approximation_error(block_graphon(2, 0.7, 0.2), grid, 2), 0.0, 1e-15);
  const auto spread = sample_design({DesignKind::FixedGrid, {}}, 8, 0);
  EXPECT_NEAR(block_approximation_error(additive_graphon(), spread, 8), 0.0, 1e-15);

  const auto big = sample_design({DesignKind::FixedGrid, {}}, 512, 0);
  double previous = block_approximation_error(additive_graphon(), big, 2);
  for (int k : {4, 8}) {
    const double current = block_approximation_error(additive_graphon(), big, k);
    EXPECT_GT(previous / current, 3.0);
    EXPECT_LT(previous / current, 5.0);
    previous = current;
  }
}

TEST(FitGiven, IdentityHolds) {
  const auto a = test::random_adjacency(25, 0.4, 12);
  const auto z = test::random_assignment(25, 4, 13);
  const auto fit = fit_given_assignment(a, z);
  EXPECT_EQ(fit.method, "oracle");
  expect_block_average_identity(a, fit);
}

TEST(Asymmetric, PerfectBlockStructureRecovered) {
  const std::vector<int> rows{0, 1, 0, 2, 1, 2, 0, 1, 2};
  const std::vector<int> cols{1, 0, 0, 1, 1, 0, 0, 1};
  const Matrix pattern{{1, 0}, {0, 1}, {1, 1}};
  Matrix a(9, 8);
  for (Index i = 0; i < 9; ++i) {
    for (Index j = 0; j < 8; ++j) a(i, j) = pattern(rows[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)]);
  }
  FitOptions opts;
  opts.restarts = 20;
  const auto fit = fit_asymmetric(a, 3, 2, opts, 4);
  EXPECT_NEAR(fit.objective, 0.0, 1e-12);
  for (Index i = 0; i < 9; ++i) {
    for (Index j = 0; j < 8; ++j) {
      EXPECT_EQ(fit.q_hat(fit.rows[static_cast<std::size_t>(i)], fit.cols[static_cast<std::size_t>(j)]), a(i, j));
    }
  }
}

TEST(Asymmetric, GrandMeanAndTranspose) {
  Rng rng(3);
  Matrix a(7, 5);
  for (Index i = 0; i < 7; ++i) {
    for (Index j = 0; j < 5; ++j) a(i, j) = rng.bernoulli(0.4) ? 1.0 : 0.0;
  }
  FitOptions opts;
  const auto one = fit_asymmetric(a, 1, 1, opts, 0);
  EXPECT_DOUBLE_EQ(one.q_hat(0, 0), a.mean());

  opts.init = InitMethod::Random;
  opts.restarts = 30;
  const auto fit = fit_asymmetric(a, 3, 2, opts, 9);
  const auto fit_t = fit_asymmetric(a.transpose(), 2, 3, opts, 9);
  // Random restarts differ between orientations; the block means of the
  // swapped assignments on the transposed matrix are the transposed Q.
  const auto q_t = asymmetric_block_means(a.transpose(), fit.cols, fit.rows);
  EXPECT_TRUE(q_t.values().isApprox(fit.q_hat.values().transpose(), 1e-15));
  EXPECT_NEAR(asymmetric_objective(a.transpose(), q_t, fit.cols, fit.rows), fit.objective, 1e-12);
  for (std::size_t t = 1; t < fit_t.objective_history.size(); ++t) {
    EXPECT_LE(fit_t.objective_history[t], fit_t.objective_history[t - 1] + 1e-12);
  }
  Matrix weighted = a;
  weighted(0, 0) = 0.5;
  EXPECT_THROW(fit_asymmetric(weighted, 2, 2, opts, 0), DomainError);
}

TEST(FitJson, RoundTrip) {
  const auto a = test::random_adjacency(12, 0.4, 6);
  const auto fit = fit_alternating(a, 3, FitOptions{}, 1);
  const std::string text = fit_result_to_json(fit);
  EXPECT_NE(text.find("\"method\": \"alternating\""), std::string::npos);
  const auto back = fit_result_from_json(text);
  EXPECT_EQ(back.z_hat, fit.z_hat);
  EXPECT_EQ(back.q_hat.values(), fit.q_hat.values());
  EXPECT_EQ(back.objective, fit.objective);
  EXPECT_EQ(back.method, fit.method);
  EXPECT_EQ(back.objective_history, fit.objective_history);
  EXPECT_THROW(fit_result_from_json("{\"method\": 3}"), FormatError);
  EXPECT_THROW(fit_result_from_json("not json"), FormatError);
}
