#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "qhm/classify.hpp"
#include "qhm/embed.hpp"
#include "qhm/energy.hpp"
#include "qhm/spaces.hpp"
#include "test_support.hpp"

namespace qhm {
namespace {

using testing::all_fixtures;
using testing::euclidean_corpus;
using testing::metric_corpus;

Vector as_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), Eigen::Index(v.size()));
}

TEST(CheckQuasihypermetric, Examples) {
  EXPECT_TRUE(check_quasihypermetric(make_fixture("equilateral3_6")));
  EXPECT_TRUE(check_quasihypermetric(make_fixture("assouad5")));
  EXPECT_TRUE(check_quasihypermetric(make_fixture("discrete(1,1)")));
}

TEST(CheckStrictlyQuasihypermetric, Examples) {
  EXPECT_TRUE(check_strictly_quasihypermetric(make_fixture("equilateral3_6")));
  EXPECT_TRUE(check_strictly_quasihypermetric(make_fixture("discrete(1,1)")));

  const auto a = check_strictly_quasihypermetric(make_fixture("assouad5"));
  ASSERT_FALSE(a);
  // Proportional to (2,-2,-2,1,1); normalized so the largest entry is +1.
  const Vector w = as_vector(a.witness);
  const Vector expected = Vector{{2, -2, -2, 1, 1}} / 2.0;
  EXPECT_LT(std::min((w - expected).norm(), (w + expected).norm()), 1e-8) << w.transpose();

  EXPECT_FALSE(check_strictly_quasihypermetric(make_fixture("cycle4_arclength")));
}

TEST(CheckHypermetricBounded, AssouadWitness) {
  const auto v = check_hypermetric_bounded(make_fixture("assouad5"), 1);
  ASSERT_FALSE(v);
  EXPECT_EQ(v.witness, (std::vector<double>{1, -1, -1, 1, 1}));
  const auto s = make_fixture("assouad5");
  const SignedMeasure b(s, as_vector(v.witness));
  EXPECT_DOUBLE_EQ(energy(b), 4.0);
}

TEST(CheckHypermetricBounded, OnePointAndFourPoint) {
  EXPECT_TRUE(check_hypermetric_bounded(make_fixture("discrete(1,1)"), 3));
  EXPECT_TRUE(check_hypermetric_bounded(make_fixture("cycle4_arclength"), 3));
  EXPECT_TRUE(check_hypermetric_bounded(make_fixture("star_1_2"), 3));
}

TEST(CheckHypermetricBounded, BudgetAndBadBound) {
  const auto s = random_metric(12, 3);
  try {
    check_hypermetric_bounded(s, 3);  // 7^12 > 1e8
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBudgetExceeded);
  }
  EXPECT_THROW(check_hypermetric_bounded(s, 0), Error);
  const auto c = classify(s, 3);
  EXPECT_FALSE(c.hypermetric.has_value());
  EXPECT_FALSE(c.hypermetric_note.empty());
}

TEST(DistanceMatrixNullspace, Examples) {
  auto ns = distance_matrix_nullspace(make_fixture("equilateral3_6"));
  EXPECT_EQ(ns.rank, 3);
  EXPECT_EQ(ns.basis.cols(), 0);
  ns = distance_matrix_nullspace(make_fixture("assouad5"));
  EXPECT_EQ(ns.rank, 5);
  EXPECT_EQ(ns.basis.cols(), 0);
  ns = distance_matrix_nullspace(make_fixture("discrete(1,1)"));
  EXPECT_EQ(ns.rank, 0);
  // Circulant (0,2,4,2): eigenvalues 8, -4, 0, -4; kernel spanned by (1,-1,1,-1).
  ns = distance_matrix_nullspace(make_fixture("cycle4_arclength"));
  EXPECT_EQ(ns.rank, 3);
  ASSERT_EQ(ns.basis.cols(), 1);
  const Vector z = ns.basis.col(0) / ns.basis(0, 0);
  EXPECT_LT((z - Vector{{1, -1, 1, -1}}).norm(), 1e-12);
}

TEST(DistanceMatrixNullspace, MatchesEigenRank) {
  for (const auto& s : metric_corpus(200, 2, 8, 11)) {
    Eigen::FullPivLU<Matrix> lu(s.dist());
    lu.setThreshold(1e-10);
    EXPECT_EQ(distance_matrix_nullspace(s).rank, lu.rank());
  }
}

TEST(AssouadDeterminant, Is128) {
  // Independent check that D is non-singular.
  EXPECT_NEAR(make_fixture("assouad5").dist().determinant(), 128.0, 1e-9);
}

// Every failing verdict is re-evaluated through energy_pair.
TEST(ClassifyProperties, WitnessSoundness) {
  int qhm_fail = 0, hyper_fail = 0, strict_fail = 0;
  auto corpus = metric_corpus(400, 2, 7, 21);
  for (const auto& f : all_fixtures()) corpus.push_back(f);
  for (const auto& s : corpus) {
    const int n = s.size();
    const double band = Tolerances{}.pos_tol * n * s.diameter();
    const auto c = classify(s, 1);

    if (c.strictly_quasihypermetric.holds) {
      EXPECT_TRUE(c.quasihypermetric.holds);
    }

    if (!c.quasihypermetric) {
      ++qhm_fail;
      const Vector a = as_vector(c.quasihypermetric.witness);
      EXPECT_NEAR(a.sum(), 0.0, 1e-12 * n);
      const SignedMeasure mu(s, a);
      EXPECT_GT(energy(mu), band * a.squaredNorm());
    }
    if (c.quasihypermetric && !c.strictly_quasihypermetric) {
      ++strict_fail;
      const Vector a = as_vector(c.strictly_quasihypermetric.witness);
      EXPECT_NEAR(a.sum(), 0.0, 1e-12 * n);
      EXPECT_GT(a.norm(), 0.5);
      EXPECT_LE(std::abs(energy(SignedMeasure(s, a))), 2 * band * a.squaredNorm());
    }
    ASSERT_TRUE(c.hypermetric.has_value());
    if (!c.hypermetric->verdict) {
      ++hyper_fail;
      const Vector b = as_vector(c.hypermetric->verdict.witness);
      EXPECT_EQ(b.sum(), 1.0);
      EXPECT_LE(b.cwiseAbs().maxCoeff(), 1.0);
      EXPECT_GT(energy(SignedMeasure(s, b)), band);
    }
  }
  EXPECT_GT(qhm_fail, 0);
  EXPECT_GT(strict_fail, 0);
  EXPECT_GT(hyper_fail, 0);
}

// Quasihypermetric iff the Gram matrix is PSD, using Eigen's solver.
TEST(ClassifyProperties, SchoenbergConsistency) {
  auto corpus = metric_corpus(400, 2, 8, 5);
  for (const auto& f : all_fixtures()) corpus.push_back(f);
  for (const auto& s : corpus) {
    const int n = s.size();
    const Matrix p = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / n);
    const Matrix g = -0.5 * p * s.dist() * p;
    Eigen::SelfAdjointEigenSolver<Matrix> es(g);
    const double floor = -0.5 * Tolerances{}.pos_tol * n * s.diameter();
    EXPECT_EQ(static_cast<bool>(check_quasihypermetric(s)), es.eigenvalues().minCoeff() >= floor);
    bool embeds = true;
    try {
      s_embed(s);
    } catch (const Error&) {
      embeds = false;
    }
    EXPECT_EQ(static_cast<bool>(check_quasihypermetric(s)), embeds);
  }
}

TEST(ClassifyProperties, EuclideanImpliesStrict) {
  for (const auto& s : euclidean_corpus(300, 9, 17)) {
    EXPECT_TRUE(check_strictly_quasihypermetric(s));
  }
}

TEST(ClassifyProperties, ThreePointRow) {
  for (const auto& s : metric_corpus(300, 3, 3, 31)) {
    EXPECT_TRUE(check_quasihypermetric(s));
    EXPECT_TRUE(check_hypermetric_bounded(s, 3));
  }
}

TEST(ClassifyProperties, FourPointRow) {
  for (const auto& s : metric_corpus(300, 4, 4, 32)) {
    EXPECT_TRUE(check_quasihypermetric(s));
    EXPECT_TRUE(check_hypermetric_bounded(s, 3));
  }
}

TEST(ClassifyProperties, VerdictsAreScaleInvariant) {
  auto corpus = metric_corpus(150, 2, 7, 41);
  for (const auto& f : all_fixtures()) corpus.push_back(f);
  for (const auto& s : corpus) {
    const auto base = classify(s, 1);
    for (double lambda : {1e-3, 0.7, 13.0, 1e4}) {
      const auto c = classify(s.scaled(lambda), 1);
      EXPECT_EQ(c.quasihypermetric.holds, base.quasihypermetric.holds);
      EXPECT_EQ(c.strictly_quasihypermetric.holds, base.strictly_quasihypermetric.holds);
      EXPECT_EQ(c.hypermetric->verdict.holds, base.hypermetric->verdict.holds);
      EXPECT_EQ(c.hypermetric->verdict.witness, base.hypermetric->verdict.witness);
      EXPECT_EQ(c.matrix_rank, base.matrix_rank);
    }
  }
}

TEST(ClassifyProperties, Deterministic) {
  for (const auto& s : metric_corpus(50, 3, 8, 43)) {
    const auto a = classify(s, 1);
    const auto b = classify(s, 1);
    EXPECT_EQ(a.quasihypermetric.witness, b.quasihypermetric.witness);
    EXPECT_EQ(a.strictly_quasihypermetric.witness, b.strictly_quasihypermetric.witness);
  }
}

TEST(JacobiEigen, MatchesEigenSolver) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 9;
    Matrix a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = g(rng);
    const auto mine = jacobi_eigen(a);
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    EXPECT_LT((mine.values - es.eigenvalues()).cwiseAbs().maxCoeff(), 1e-12 * (1 + a.norm()));
    EXPECT_LT((a * mine.vectors - mine.vectors * mine.values.asDiagonal()).norm(),
              1e-11 * (1 + a.norm()));
    EXPECT_LT((mine.vectors.transpose() * mine.vectors - Matrix::Identity(n, n)).norm(), 1e-12);
  }
}

}  // namespace
}  // namespace qhm
