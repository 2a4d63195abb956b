#include <gtest/gtest.h>

#include <cmath>

#include "graphon/error.hpp"
#include "graphon/estimators.hpp"
#include "graphon/lower_bounds.hpp"
#include "graphon/model.hpp"
#include "graphon/rng.hpp"
#include "test_support.hpp"

using namespace graphon;

namespace {

// Pairwise Hamming distances over explicitly listed codewords.
int brute_min_distance(const PackingSet& set) {
  std::vector<Codeword> words;
  for (std::uint64_t t = 0; t < set.size(); ++t) words.push_back(set.codeword(t));
  int best = set.d() + 1;
  for (std::size_t a = 0; a < words.size(); ++a) {
    for (std::size_t b = a + 1; b < words.size(); ++b) {
      int dist = 0;
      for (int r = 0; r < set.d(); ++r) dist += words[a][static_cast<std::size_t>(r)] != words[b][static_cast<std::size_t>(r)];
      best = std::min(best, dist);
    }
  }
  return best;
}

ProbMatrix random_quarter_band(Index n, Rng& rng) {
  Matrix m = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) m(i, j) = m(j, i) = 0.5 + 0.25 * rng.uniform();
  }
  return ProbMatrix(m);
}

std::vector<bool> random_subset(Index n, Rng& rng) {
  std::vector<bool> s(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = rng.bernoulli(0.5);
  return s;
}

}  // namespace

TEST(Packing, SmallLengths) {
  const auto one = vg_packing(1, 0);
  EXPECT_EQ(one.size(), 2U);
  EXPECT_EQ(brute_min_distance(one), 1);
  EXPECT_TRUE(one.verify());

  const auto eight = vg_packing(8, 3);
  EXPECT_GE(eight.size(), 3U);
  EXPECT_GE(brute_min_distance(eight), 2);
  EXPECT_EQ(eight.min_distance(), brute_min_distance(eight));
}

TEST(Packing, TargetIsCeilOfExponential) {
  EXPECT_EQ(packing_target(1), 2U);
  EXPECT_EQ(packing_target(8), 3U);
  EXPECT_EQ(packing_target(16), 8U);
  EXPECT_EQ(packing_target(64), 2981U);
}

TEST(Packing, InvariantsAcrossLengthsAndSeeds) {
  for (int d : {2, 3, 5, 8, 13, 16, 21, 32, 40}) {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const auto set = vg_packing(d, seed);
      EXPECT_GE(set.size(), packing_target(d)) << d;
      EXPECT_GE(4 * brute_min_distance(set), d) << d;
    }
  }
}

TEST(Packing, LinearCodeMinDistanceMatchesEnumeration) {
  const auto set = PackingSet::from_generators(6, {{1, 1, 0, 0, 0, 0}, {0, 1, 1, 1, 0, 0}, {0, 0, 0, 1, 1, 1}});
  EXPECT_TRUE(set.is_linear());
  EXPECT_EQ(set.size(), 8U);
  EXPECT_EQ(set.min_distance(), brute_min_distance(set));
  EXPECT_THROW(PackingSet::from_generators(3, {{1, 1, 0}, {1, 1, 0}}), DomainError);
}

TEST(Packing, RefusesAboveSupportedLength) {
  EXPECT_THROW(vg_packing(kMaxPackingLength + 1, 0), RefusalError);
  EXPECT_THROW(vg_packing(0, 0), DomainError);
}

TEST(T1, SpecExampleAndDegenerate) {
  const auto z = contiguous_assignment(4, 2);
  const auto inst = t1_instance(4, 2, 0.4, {1}, z);
  EXPECT_DOUBLE_EQ(inst.theta(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(inst.theta(2, 3), 0.5);
  EXPECT_NEAR(inst.theta(0, 2), 0.7, 1e-15);
  EXPECT_NEAR(inst.theta(1, 3), 0.7, 1e-15);
  EXPECT_EQ(inst.theta(0, 0), 0.0);

  const auto flat = t1_instance(12, 3, 0.5, {0, 0, 0}, contiguous_assignment(12, 3));
  for (Index i = 0; i < 12; ++i) {
    for (Index j = 0; j < 12; ++j) EXPECT_EQ(flat.theta(i, j), i == j ? 0.0 : 0.5);
  }
  EXPECT_THROW(t1_instance(4, 2, 1.0, {1}, z), DomainError);
  EXPECT_THROW(t1_instance(4, 2, 0.1, {1}, Assignment({0, 1, 0, 1}, 2)), DomainError);
}

TEST(T1, PackingDistanceInequality) {
  for (int k : {2, 3, 4, 5}) {
    const Index n = 4 * k;
    const auto family = t1_family(n, k, 0.2, 7, 32);
    for (std::size_t a = 0; a < family.size(); ++a) {
      for (std::size_t b = a + 1; b < family.size(); ++b) {
        const double rho2 = (family[a].theta.matrix() - family[b].theta.matrix()).squaredNorm() /
                            static_cast<double>(n * n);
        const int dh = hamming(family[a].codewords.front(), family[b].codewords.front());
        EXPECT_GE(rho2, 0.2 * 0.2 / static_cast<double>(n * n) * dh - 1e-15);
      }
    }
    EXPECT_EQ(audit_t1(family).violations, 0U);
  }
}

TEST(T2, SpecExamples) {
  const auto z = contiguous_assignment(4, 2);
  const double c2 = 0.1;
  const auto zero = t2_instance(4, 2, c2, {{0}}, z);
  const auto one = t2_instance(4, 2, c2, {{1}}, z);
  EXPECT_DOUBLE_EQ(zero.theta(0, 2), 0.5);
  EXPECT_DOUBLE_EQ(one.theta(0, 2), 0.5 + std::sqrt(c2 * std::log(2.0) / 4.0));
  EXPECT_EQ(one.theta(0, 1), 0.0);  // Q has a zero diagonal block

  const auto flat_a = t2_family(64, 8, 0.0, 1, 3);
  for (const auto& inst : flat_a) {
    const auto b = t2_instance(64, 8, 0.0, inst.codewords, inst.assignment);
    EXPECT_EQ(b.theta.matrix(), inst.theta.matrix());
  }
}

TEST(T2, ColumnSeparation) {
  for (int k : {4, 8, 16}) {
    const Index n = 8 * k;
    const double c2 = 0.05;
    const auto family = t2_family(n, k, c2, 3, 4);
    for (const auto& inst : family) {
      const int half = k / 2;
      const double shift = std::sqrt(c2 * std::log(static_cast<double>(k)) / static_cast<double>(n));
      for (int a = 0; a < half; ++a) {
        for (int c = a + 1; c < half; ++c) {
          double dist = 0.0;
          for (int r = 0; r < half; ++r) {
            const double d = shift * (inst.codewords[static_cast<std::size_t>(a)][static_cast<std::size_t>(r)] -
                                      inst.codewords[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)]);
            dist += d * d;
          }
          EXPECT_GE(dist, c2 * k * std::log(static_cast<double>(k)) / (8.0 * static_cast<double>(n)) * (1 - 1e-12));
        }
      }
    }
    const auto audit = audit_t2(family);
    EXPECT_EQ(audit.violations, 0U);
    EXPECT_GT(audit.pairs, 0U);
  }
}

TEST(HardInstances, AreValidThetaK) {
  const auto t1 = t1_family(32, 4, 0.5, 2, 4);
  for (const auto& inst : t1) {
    const auto fit = fit_given_assignment(sample_adjacency(inst.theta, 1), inst.assignment);
    EXPECT_EQ(fit.theta_hat.size(), 32);
    const auto back = theta_from_blocks(block_averages(inst.theta.matrix(), inst.assignment), inst.assignment);
    EXPECT_TRUE(back.matrix().isApprox(inst.theta.matrix(), 1e-14));
  }
  const std::string meta = hard_instance_metadata_json(t1.front());
  EXPECT_NE(meta.find("\"family\""), std::string::npos);
  EXPECT_NE(meta.find("T1"), std::string::npos);
}

TEST(FiniteK, Examples) {
  const Index n = 16;
  const auto empty = finite_k_instance(n, 0.5, std::vector<bool>(16, false));
  const auto full = finite_k_instance(n, 0.5, std::vector<bool>(16, true));
  EXPECT_EQ(empty.theta.matrix(), full.theta.matrix());
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) EXPECT_EQ(empty.theta(i, j), i == j ? 0.0 : 0.5);
  }
}

TEST(FiniteK, SymmetricDifferenceIdentityByPairCounting) {
  const Index n = 8;
  const double c = 0.6;
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = random_subset(n, rng);
    const auto t = random_subset(n, rng);
    const auto x = finite_k_instance(n, c, s);
    const auto y = finite_k_instance(n, c, t);
    double sum = 0.0;
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < n; ++j) {
        const double d = x.theta(i, j) - y.theta(i, j);
        sum += d * d;
      }
    }
    int sym_diff = 0;
    for (std::size_t i = 0; i < s.size(); ++i) sym_diff += s[i] != t[i] ? 1 : 0;
    const double identity = 2.0 * c * c / static_cast<double>(n) * sym_diff * (n - sym_diff);
    EXPECT_NEAR(sum, identity, 1e-12);
  }
}

TEST(Divergences, ClosedFormExamples) {
  const ProbMatrix half(Matrix{{0, 0.5}, {0.5, 0}});
  const ProbMatrix three_q(Matrix{{0, 0.75}, {0.75, 0}});
  EXPECT_EQ(kl_product_bernoulli(half, half), 0.0);
  EXPECT_NEAR(kl_product_bernoulli(half, three_q), 0.287682, 1e-6);
  EXPECT_NEAR(kl_product_bernoulli(half, three_q), std::log(4.0 / 3.0), 1e-15);
  EXPECT_EQ(chi2_product_bernoulli(half, half), 0.0);
  // Per entry 1/3; the symmetric pair gives (4/3)^2 - 1.
  EXPECT_NEAR(chi2_product_bernoulli(half, three_q), 7.0 / 9.0, 1e-15);

  const ProbMatrix ones(Matrix{{0, 1}, {1, 0}});
  EXPECT_TRUE(std::isinf(kl_product_bernoulli(half, ones)));
  EXPECT_TRUE(std::isinf(chi2_product_bernoulli(half, ones)));
  EXPECT_EQ(kl_product_bernoulli(ones, ones), 0.0);
}

TEST(Divergences, KlMatchesNumericalIntegrationPerEntry) {
  // Bernoulli KL as an expectation over the two outcomes, written out.
  const double p = 0.5;
  const double q = 0.75;
  const double expect = p * std::log(p / q) + (1 - p) * std::log((1 - p) / (1 - q));
  EXPECT_NEAR(expect, 0.143841, 1e-6);
}

TEST(Divergences, QuadraticBoundsOnQuarterBand) {
  Rng rng(2024);
  std::size_t kl_violations = 0;
  std::size_t chi2_violations = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto n = static_cast<Index>(2 + rng.below(7));
    const auto x = random_quarter_band(n, rng);
    const auto y = random_quarter_band(n, rng);
    const double sq = (x.matrix() - y.matrix()).squaredNorm();
    if (kl_product_bernoulli(x, y) > 8.0 * sq) ++kl_violations;
    if (chi2_product_bernoulli(x, y) > std::exp(8.0 * sq)) ++chi2_violations;
    EXPECT_LE(chi2_product_bernoulli(x, y) + 1.0, std::exp(8.0 * sq) * (1 + 1e-12));
  }
  EXPECT_EQ(kl_violations, 0U);
  EXPECT_EQ(chi2_violations, 0U);
}

TEST(Fano, Examples) {
  EXPECT_NEAR(fano_bound(0.0, std::log(4.0)), 0.5, 1e-15);
  EXPECT_EQ(fano_bound(1e9, 2.0), 0.0);
  EXPECT_THROW(fano_bound(1.0, 0.0), DomainError);
  EXPECT_EQ(chi2_fano_bound(0.0, 1.0), 0.0);
  EXPECT_NEAR(chi2_fano_bound(0.0, 100.0), 0.99, 1e-15);
  EXPECT_THROW(chi2_fano_bound(1.0, 0.5), DomainError);
}

TEST(Fano, FiniteKNumerology) {
  // KL diameter 8 c^2 n and log packing c1 n give a probability >= 0.8 for small c.
  const double n = 1000.0;
  const double c1 = 1.0 / 8.0;
  const double c = 0.05;
  const double bound = fano_bound(8.0 * c * c * n, c1 * n);
  EXPECT_NEAR(bound, 1.0 - (8.0 * c * c * n + std::log(2.0)) / (c1 * n), 1e-15);
  EXPECT_GE(bound, 0.8);

  // The realized KL diameter of the construction stays under 8 c^2 n.
  Rng rng(9);
  const Index m = 40;
  const double cc = 0.5;
  for (int t = 0; t < 50; ++t) {
    const auto x = finite_k_instance(m, cc, random_subset(m, rng));
    const auto y = finite_k_instance(m, cc, random_subset(m, rng));
    EXPECT_LE(kl_product_bernoulli(x.theta, y.theta), 8.0 * cc * cc * static_cast<double>(m));
  }
}

TEST(Fano, ChiSquaredVariantPositiveAtK32) {
  const int k = 32;
  const double c1 = 0.05;
  // chi^2 diameter exp(8 c1^2 k^2) against packing exp(k(k-1)/16).
  const double chi2 = std::exp(8.0 * c1 * c1 * k * k);
  const double packing = std::exp(k * (k - 1) / 16.0);
  EXPECT_GT(chi2_fano_bound(chi2, packing), 0.0);

  // Any two instances of the construction respect that chi^2 diameter.
  Rng rng(4);
  const auto z = contiguous_assignment(128, k);
  const auto d = static_cast<std::size_t>(k * (k - 1) / 2);
  for (int t = 0; t < 5; ++t) {
    Codeword u(d);
    Codeword v(d);
    for (std::size_t r = 0; r < d; ++r) {
      u[r] = rng.bernoulli(0.5) ? 1 : 0;
      v[r] = rng.bernoulli(0.5) ? 1 : 0;
    }
    const auto x = t1_instance(128, k, c1, u, z);
    const auto y = t1_instance(128, k, c1, v, z);
    EXPECT_LE(chi2_product_bernoulli(x.theta, y.theta), chi2);
  }
}
