#include <gtest/gtest.h>

#include <sstream>

#include "graphon/error.hpp"
#include "graphon/graphon.hpp"
#include "graphon/matrix_io.hpp"
#include "graphon/model.hpp"
#include "test_support.hpp"

using namespace graphon;

TEST(Types, RejectInvalidMatrices) {
  EXPECT_THROW(LatentDesign({0.2, 1.5}), DomainError);
  EXPECT_THROW(LatentDesign(std::vector<double>{}), DomainError);
  Matrix asym = Matrix::Zero(2, 2);
  asym(0, 1) = 0.3;
  EXPECT_THROW(ProbMatrix{asym}, DomainError);
  Matrix diag = Matrix::Zero(2, 2);
  diag(0, 0) = 0.1;
  EXPECT_THROW(ProbMatrix{diag}, DomainError);
  Matrix half = Matrix::Constant(2, 2, 0.5);
  half.diagonal().setZero();
  EXPECT_NO_THROW(ProbMatrix{half});
  EXPECT_THROW(Adjacency{half}, DomainError);
  EXPECT_THROW(Assignment({0, 2}, 2), DomainError);
  EXPECT_THROW(BlockMatrix(Matrix{{0.2, 0.3}, {0.4, 0.1}}, true), DomainError);
  EXPECT_THROW(BlockMatrix(Matrix{{1.2}}, true), DomainError);
}

TEST(Types, CanonicalLabeling) {
  const Assignment z({2, 2, 0, 1, 0}, 4);
  std::vector<int> perm;
  const Assignment c = z.canonical(&perm);
  EXPECT_EQ(std::vector<int>(c.labels().begin(), c.labels().end()), (std::vector<int>{0, 0, 1, 2, 1}));
  EXPECT_EQ(perm[2], 0);
  EXPECT_EQ(perm[0], 1);
  EXPECT_EQ(perm[1], 2);
  EXPECT_EQ(perm[3], 3);  // unused label goes last
  EXPECT_EQ(c.canonical(), c);
}

TEST(Graphon, DirectEvaluation) {
  EXPECT_DOUBLE_EQ(eval_graphon(product_graphon(), 0.5, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(eval_graphon(min_graphon(), 0.3, 0.7), 0.3);
  EXPECT_THROW(eval_graphon(product_graphon(), -0.1, 0.5), DomainError);
  EXPECT_THROW(eval_graphon(product_graphon(), 0.5, 1.01), DomainError);
}

TEST(Graphon, GallerySymmetricAndInRange) {
  for (const auto& spec : graphon_gallery()) {
    for (int a = 0; a <= 40; ++a) {
      for (int b = 0; b <= 40; ++b) {
        const double x = a / 40.0;
        const double y = b / 40.0;
        const double v = eval_graphon(spec, x, y);
        EXPECT_EQ(v, eval_graphon(spec, y, x)) << spec.id();
        EXPECT_GE(v, 0.0) << spec.id();
        EXPECT_LE(v, 1.0) << spec.id();
      }
    }
  }
}

TEST(Graphon, LipschitzConditionForAlphaAtMostOne) {
  Rng rng(11);
  for (const auto& spec : graphon_gallery()) {
    if (spec.alpha > 1.0) continue;
    for (int t = 0; t < 100000; ++t) {
      const double x = rng.uniform();
      const double y = rng.uniform();
      const double x2 = rng.uniform();
      const double y2 = rng.uniform();
      const double lhs = std::abs(eval_graphon(spec, x, y) - eval_graphon(spec, x2, y2));
      const double rhs = spec.holder_bound * std::pow(std::abs(x - x2) + std::abs(y - y2), spec.alpha);
      ASSERT_LE(lhs, rhs + 1e-15) << spec.id();
    }
  }
}

TEST(Graphon, IdsRoundTrip) {
  for (const auto& spec : graphon_gallery()) {
    const auto parsed = parse_graphon(spec.id());
    EXPECT_EQ(parsed.id(), spec.id());
    EXPECT_EQ(parsed.kind, spec.kind);
    EXPECT_EQ(parsed.alpha, spec.alpha);
  }
  EXPECT_EQ(parse_graphon("sbm:2:0.6:0.2").id(), block_graphon(2, 0.6, 0.2).id());
  EXPECT_THROW(parse_graphon("wiggly"), FormatError);
  EXPECT_THROW(parse_graphon("holder:x"), FormatError);
  EXPECT_THROW(parse_graphon("block:2:0.1:0.2"), FormatError);
}

TEST(Design, GridAndDeterminism) {
  const auto grid = sample_design({DesignKind::FixedGrid, {}}, 3, 0);
  EXPECT_EQ(std::vector<double>(grid.values().begin(), grid.values().end()), (std::vector<double>{0.0, 0.5, 1.0}));
  const auto a = sample_design({DesignKind::IidUniform, {}}, 50, 9);
  const auto b = sample_design({DesignKind::IidUniform, {}}, 50, 9);
  EXPECT_TRUE(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  const auto user = sample_design({DesignKind::UserList, {0.1, 0.9}}, 2, 0);
  EXPECT_EQ(user[1], 0.9);
}

TEST(Design, UniformDesignIsRegularWithHighFrequency) {
  int regular = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto xi = sample_design({DesignKind::IidUniform, {}}, 1000, seed);
    regular += check_design_regularity(xi, 10, kDefaultLambda1, kDefaultLambda2) ? 1 : 0;
  }
  // Each interval count is Binomial(1000, 0.1); leaving [50, 150] is a > 5 sd event.
  EXPECT_GE(regular, 99);
}

TEST(Design, RegularityExamples) {
  const auto grid = sample_design({DesignKind::FixedGrid, {}}, 10, 0);
  EXPECT_TRUE(check_design_regularity(grid, 2, 0.5, 1.5));
  const LatentDesign zeros(std::vector<double>(10, 0.0));
  EXPECT_FALSE(check_design_regularity(zeros, 2, 0.5, 1.5));
  EXPECT_TRUE(check_design_regularity(zeros, 1, 0.5, 1.5));
}

TEST(Design, IntervalIndexBoundaries) {
  EXPECT_EQ(interval_index(0.0, 3), 0);
  EXPECT_EQ(interval_index(1.0 / 3.0, 3), 1);
  EXPECT_EQ(interval_index(2.0 / 3.0, 3), 2);
  EXPECT_EQ(interval_index(1.0, 3), 2);
  EXPECT_EQ(interval_index(0.3, 10), 3);
  EXPECT_EQ(interval_index(0.7, 10), 7);
}

TEST(Theta, FromGraphon) {
  const auto xi = sample_design({DesignKind::FixedGrid, {}}, 3, 0);
  const auto theta = theta_from_graphon(product_graphon(), xi);
  EXPECT_EQ(theta(1, 2), 0.5);
  EXPECT_EQ(theta(0, 1), 0.0);
  EXPECT_EQ(theta(0, 2), 0.0);
  EXPECT_EQ(theta(2, 2), 0.0);
  const auto constant = theta_from_graphon(constant_graphon(0.3), xi);
  EXPECT_EQ(constant(0, 1), 0.3);
  EXPECT_EQ(constant(1, 1), 0.0);
}

TEST(Theta, FromBlocksAndRelabeling) {
  const BlockMatrix q(Matrix{{1.0, 0.0}, {0.0, 1.0}}, true);
  const Assignment z({0, 0, 1, 1}, 2);
  const auto theta = theta_from_blocks(q, z);
  EXPECT_EQ(theta(0, 1), 1.0);
  EXPECT_EQ(theta(2, 3), 1.0);
  EXPECT_EQ(theta(0, 2), 0.0);
  EXPECT_EQ(theta(1, 3), 0.0);

  const BlockMatrix q3(Matrix{{0.1, 0.2, 0.3}, {0.2, 0.4, 0.5}, {0.3, 0.5, 0.6}}, true);
  const Assignment z3({0, 1, 2, 2, 1, 0}, 3);
  const std::vector<int> perm{2, 0, 1};
  std::vector<int> relabeled;
  for (int l : z3.labels()) relabeled.push_back(perm[static_cast<std::size_t>(l)]);
  EXPECT_EQ(theta_from_blocks(q3, z3).matrix(),
            theta_from_blocks(q3.permuted(perm), Assignment(relabeled, 3)).matrix());
}

TEST(Theta, ScaleToSparsity) {
  Matrix m = Matrix::Constant(3, 3, 0.4);
  m(0, 1) = m(1, 0) = 0.8;
  m.diagonal().setZero();
  const ProbMatrix theta(m);
  EXPECT_TRUE(scale_to_sparsity(theta, 0.4).matrix().isApprox(m / 2.0));
  EXPECT_EQ(scale_to_sparsity(theta, 1.0).matrix(), m);
  EXPECT_EQ(scale_to_sparsity(theta, 0.0).matrix(), Matrix::Zero(3, 3));
  EXPECT_EQ(scale_to_sparsity(ProbMatrix::zeros(3), 0.5).matrix(), Matrix::Zero(3, 3));
  EXPECT_LE(scale_to_sparsity(theta, 0.3).matrix().maxCoeff(), 0.3);
}

TEST(Adjacency, SamplingExtremesAndDeterminism) {
  EXPECT_EQ(sample_adjacency(ProbMatrix::zeros(6), 1).edge_count(), 0U);
  Matrix ones = Matrix::Ones(6, 6);
  ones.diagonal().setZero();
  EXPECT_EQ(sample_adjacency(ProbMatrix(ones), 1).edge_count(), 15U);
  const auto theta = theta_from_graphon(smooth_graphon(), sample_design({DesignKind::IidUniform, {}}, 40, 2));
  EXPECT_EQ(sample_adjacency(theta, 5).matrix(), sample_adjacency(theta, 5).matrix());
}

TEST(Adjacency, EdgeDensityConcentrates) {
  Matrix half = Matrix::Constant(200, 200, 0.5);
  half.diagonal().setZero();
  const ProbMatrix theta(half);
  int inside = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const double density = static_cast<double>(sample_adjacency(theta, seed).edge_count()) / (200.0 * 199.0 / 2.0);
    inside += std::abs(density - 0.5) <= 0.05 ? 1 : 0;
  }
  EXPECT_GE(inside, 990);
}

TEST(BlockAverage, SpecExample) {
  Matrix m = Matrix::Zero(4, 4);
  const double upper[6] = {1, 2, 3, 4, 5, 6};
  int t = 0;
  for (Index i = 0; i < 4; ++i) {
    for (Index j = i + 1; j < 4; ++j, ++t) m(i, j) = m(j, i) = upper[t];
  }
  const Assignment z({0, 0, 1, 1}, 2);
  EXPECT_DOUBLE_EQ(block_average(m, z, 0, 0).value, 1.0);
  EXPECT_DOUBLE_EQ(block_average(m, z, 0, 1).value, 3.5);
  EXPECT_DOUBLE_EQ(block_average(m, z, 1, 0).value, 3.5);
  EXPECT_DOUBLE_EQ(block_average(m, z, 1, 1).value, 6.0);
  const auto all = block_averages(m / 10.0, z);
  EXPECT_DOUBLE_EQ(all(0, 1), 0.35);
  EXPECT_DOUBLE_EQ(all(1, 1), 0.6);
}

TEST(BlockAverage, DegenerateBlocksFlagged) {
  const Matrix m = test::random_symmetric(3, 0, 1, 4);
  const Assignment z({0, 1, 1}, 3);
  const auto single = block_average(m, z, 0, 0);
  EXPECT_FALSE(single.used);
  EXPECT_EQ(single.value, 0.0);
  EXPECT_FALSE(block_average(m, z, 0, 2).used);
  EXPECT_TRUE(block_average(m, z, 0, 1).used);
}

TEST(BlockAverage, ConstantAndExactReconstruction) {
  Matrix c = Matrix::Constant(5, 5, 0.25);
  c.diagonal().setZero();
  const Assignment z({0, 1, 0, 1, 1}, 2);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) EXPECT_DOUBLE_EQ(block_average(c, z, a, b).value, 0.25);
  }
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const int k = 1 + static_cast<int>(seed % 4);
    const auto zz = test::random_assignment(12, k, seed);
    Matrix q = test::random_symmetric(k, 0, 1, seed + 100);
    const BlockMatrix block(q, true);
    const auto theta = theta_from_blocks(block, zz);
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        const auto avg = block_average(theta.matrix(), zz, a, b);
        if (avg.used) {
          EXPECT_NEAR(avg.value, q(a, b), 1e-14);
        }
      }
    }
  }
}

TEST(MatrixIo, CsvAndBinaryRoundTripBitExact) {
  const Matrix m = test::random_symmetric(7, -1, 1, 3);
  std::stringstream csv;
  io::write_csv(csv, m);
  EXPECT_EQ(io::read_csv(csv), m);
  std::stringstream bin;
  io::write_binary(bin, m);
  const std::string bytes = bin.str();
  ASSERT_EQ(bytes.size(), 4U + 4U + 49U * 8U);
  EXPECT_EQ(bytes.substr(0, 4), "GRL1");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 7);
  EXPECT_EQ(bytes[5], 0);
  EXPECT_EQ(io::read_binary(bin), m);
}

TEST(MatrixIo, EdgeList) {
  const auto a = test::two_clique();
  std::stringstream out;
  io::write_edge_list(out, a);
  EXPECT_EQ(out.str(), "1 2\n3 4\n");
  std::stringstream in("# comment\n1 2\n\n4 3\n");
  EXPECT_EQ(io::read_edge_list(in).matrix(), a.matrix());
  std::stringstream padded("1 2\n");
  EXPECT_EQ(io::read_edge_list(padded, 5).size(), 5);
  std::stringstream loop("2 2\n");
  EXPECT_THROW(io::read_edge_list(loop), FormatError);
  std::stringstream bad("GRLX");
  EXPECT_THROW(io::read_binary(bad), FormatError);
}
