#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "oracles.hpp"
#include "stixelforge/loss.hpp"

using namespace stixelforge;
using namespace stixelforge::loss;

namespace {

Matrix row(std::initializer_list<double> v) {
  Matrix m(1, static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) m(0, i++) = x;
  return m;
}

Matrix random_probs(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.01, 0.99);
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

Matrix random_binary(std::mt19937_64& rng, int n) {
  std::bernoulli_distribution b(0.3);
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = b(rng) ? 1.0 : 0.0;
  return m;
}

}  // namespace

TEST(BceLoss, Examples) {
  EXPECT_NEAR(bce_loss(row({1, 0}), row({0.5, 0.5})), std::log(2.0), 1e-12);
  EXPECT_NEAR(bce_loss(row({1}), row({0.25})), -std::log(0.25), 1e-12);
  // Perfect prediction bottoms out at the clamp.
  EXPECT_NEAR(bce_loss(row({1, 0}), row({1, 0})), -std::log(1 - kEpsClamp), 1e-15);
  EXPECT_ERRC(bce_loss(row({1, 0}), row({0.5})), Errc::DimensionMismatch);
}

TEST(BceLoss, NonNegativeMinimisedAtTargetAndPermutationInvariant) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const Matrix y = random_binary(rng, 5);
    const Matrix p = random_probs(rng, 5);
    const double l = bce_loss(y, p);
    EXPECT_GE(l, 0.0);
    EXPECT_GE(l, bce_loss(y, clamp_probabilities(y)));
    Matrix yr = y.reshaped<Eigen::RowMajor>(1, 25).reverse();
    Matrix pr = p.reshaped<Eigen::RowMajor>(1, 25).reverse();
    EXPECT_NEAR(bce_loss(yr, pr), l, 1e-12);
  }
}

TEST(SumLoss, Examples) {
  EXPECT_EQ(sum_loss(Matrix::Zero(2, 2)), 0.0);
  EXPECT_EQ(sum_loss(Matrix::Constant(2, 2, 0.5)), 0.5);
  EXPECT_EQ(sum_loss(row({1, 0, 0, 1})), 0.5);
  EXPECT_ERRC(sum_loss(row({1, INFINITY})), Errc::NonFiniteInput);
}

TEST(SumLoss, Linear) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const Matrix a = random_probs(rng, 4), b = random_probs(rng, 4);
    EXPECT_NEAR(sum_loss(2.5 * a - 0.7 * b), 2.5 * sum_loss(a) - 0.7 * sum_loss(b), 1e-12);
  }
}

TEST(TotalLoss, WeightIsolation) {
  const Matrix y = Matrix::Identity(2, 2);
  const PredictionPair perfect(y, y, y, y);
  EXPECT_NEAR(total_loss(perfect, {1, 0, 1}), 0.0, 1e-6);
  const PredictionPair half(Matrix::Constant(2, 2, 0.5), Matrix::Constant(2, 2, 0.5), y, y);
  EXPECT_DOUBLE_EQ(total_loss(half, {0, 1, 0}), 0.5);
  EXPECT_ERRC(total_loss(half, {-1, 0, 0}), Errc::InvalidArgument);
}

TEST(TotalLoss, HandFixture) {
  Matrix y_occ(2, 2), p_occ(2, 2), y_cut(2, 2), p_cut(2, 2);
  y_occ << 1, 0, 0, 1;
  p_occ << 0.9, 0.2, 0.4, 0.7;
  y_cut << 1, 0, 0, 0;
  p_cut << 0.8, 0.1, 0.3, 0.05;
  const double bce_occ = -(std::log(0.9) + std::log(0.8) + std::log(0.6) + std::log(0.7)) / 4.0;
  const double sum_occ = (0.9 + 0.2 + 0.4 + 0.7) / 4.0;
  const double bce_cut = -(std::log(0.8) + std::log(0.9) + std::log(0.7) + std::log(0.95)) / 4.0;
  const double hand = 1.0 * bce_occ + 0.1 * sum_occ + 1.0 * bce_cut;
  EXPECT_NEAR(total_loss(PredictionPair(p_occ, p_cut, y_occ, y_cut), {1.0, 0.1, 1.0}), hand, 1e-12);
  EXPECT_NEAR(bce_occ, sf_test::hand_bce({1, 0, 0, 1}, {0.9, 0.2, 0.4, 0.7}), 1e-15);
}

TEST(LossGradient, Examples) {
  const PredictionPair one(row({0.5}), row({0.5}), row({1}), row({1}));
  EXPECT_NEAR(loss_gradient(one, {1, 0, 0}).occ(0, 0), -2.0, 1e-12);
  std::mt19937_64 rng(1);
  const PredictionPair four(random_probs(rng, 2), random_probs(rng, 2), random_binary(rng, 2), random_binary(rng, 2));
  const auto g = loss_gradient(four, {0, 1, 0});
  EXPECT_TRUE(g.occ.isApproxToConstant(0.25, 1e-15));
  EXPECT_TRUE(g.cut.isZero());
}

TEST(LossGradient, MatchesCentralDifferences) {
  std::mt19937_64 rng(2025);
  const double h = 1e-6;
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Matrix y_occ = random_binary(rng, 8), y_cut = random_binary(rng, 8);
    const Matrix p_occ = random_probs(rng, 8), p_cut = random_probs(rng, 8);
    const LossWeights w{std::uniform_real_distribution<double>(0.1, 2)(rng),
                        std::uniform_real_distribution<double>(0, 1)(rng),
                        std::uniform_real_distribution<double>(0.1, 2)(rng)};
    const auto g = loss_gradient(PredictionPair(p_occ, p_cut, y_occ, y_cut), w);
    for (int channel = 0; channel < 2; ++channel) {
      for (Eigen::Index i = 0; i < 64; ++i) {
        Matrix up_o = p_occ, up_c = p_cut, dn_o = p_occ, dn_c = p_cut;
        (channel == 0 ? up_o : up_c).data()[i] += h;
        (channel == 0 ? dn_o : dn_c).data()[i] -= h;
        const double fd = (total_loss(PredictionPair(up_o, up_c, y_occ, y_cut), w) -
                           total_loss(PredictionPair(dn_o, dn_c, y_occ, y_cut), w)) /
                          (2 * h);
        const double an = (channel == 0 ? g.occ : g.cut).data()[i];
        worst = std::max(worst, std::abs(fd - an) / std::max(std::abs(an), 1e-12));
      }
    }
  }
  EXPECT_LT(worst, 1e-5);
}

TEST(LossGradient, BuiltInChecker) {
  std::mt19937_64 rng(6);
  const PredictionPair p(random_probs(rng, 8), random_probs(rng, 8), random_binary(rng, 8), random_binary(rng, 8));
  EXPECT_LT(check_gradient(p, LossWeights{}).max_relative_error, 1e-5);
}

TEST(PredictionPair, ClampsAndChecksShapes) {
  const PredictionPair p(row({0, 1}), row({0.5, 0.5}), row({0, 1}), row({0, 1}));
  EXPECT_EQ(p.occ()(0, 0), kEpsClamp);
  EXPECT_EQ(p.occ()(0, 1), 1 - kEpsClamp);
  EXPECT_ERRC(PredictionPair(row({0, 1}), row({0.5}), row({0, 1}), row({0, 1})), Errc::DimensionMismatch);
}
