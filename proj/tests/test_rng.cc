#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "mg1bayes/rng.hpp"

namespace {

using mg1bayes::derive_seed;
using mg1bayes::Rng;

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, DifferentSeedsDiverge) {
  Rng a(1), b(2);
  int equal = 0;
  for (int i = 0; i < 64; ++i) equal += a.next_u64() == b.next_u64();
  EXPECT_LT(equal, 2);
}

TEST(Rng, DeriveSeedSeparatesStreamsAndIsStable) {
  EXPECT_EQ(derive_seed(7, "alpha", 0), derive_seed(7, "alpha", 0));
  EXPECT_NE(derive_seed(7, "alpha", 0), derive_seed(7, "alpha", 1));
  EXPECT_NE(derive_seed(7, "alpha", 0), derive_seed(7, "beta", 0));
  EXPECT_NE(derive_seed(7, "alpha", 0), derive_seed(8, "alpha", 0));
}

TEST(Rng, Uniform01Range) {
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    double u = rng.uniform01();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
  for (int i = 0; i < 10000; ++i) {
    double u = rng.uniform01_pos();
    EXPECT_GT(u, 0.0);
    EXPECT_LE(u, 1.0);
  }
}

// Moment bands sized at >= 5 standard errors for 1e5 draws.
TEST(Rng, UniformMoments) {
  Rng rng(11);
  double sum = 0.0, sq = 0.0;
  int n = 100000;
  for (int i = 0; i < n; ++i) {
    double u = rng.uniform01();
    sum += u;
    sq += u * u;
  }
  EXPECT_NEAR(sum / n, 0.5, 5e-3);
  EXPECT_NEAR(sq / n - 0.25, 1.0 / 12.0, 5e-3);
}

TEST(Rng, ExponentialMoments) {
  Rng rng(12);
  double sum = 0.0;
  int n = 100000;
  for (int i = 0; i < n; ++i) sum += rng.exponential(2.0);
  EXPECT_NEAR(sum / n, 0.5, 1e-2);
}

TEST(Rng, NormalMoments) {
  Rng rng(13);
  double sum = 0.0, sq = 0.0;
  int n = 100000;
  for (int i = 0; i < n; ++i) {
    double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  EXPECT_NEAR(sum / n, 0.0, 2e-2);
  EXPECT_NEAR(sq / n, 1.0, 3e-2);
}

TEST(Rng, GammaMoments) {
  Rng rng(14);
  double sum = 0.0, sq = 0.0;
  int n = 100000;
  for (int i = 0; i < n; ++i) {
    double x = rng.gamma(2.5, 2.0);
    sum += x;
    sq += x * x;
  }
  double mean = sum / n;
  EXPECT_NEAR(mean, 1.25, 2e-2);
  EXPECT_NEAR(sq / n - mean * mean, 0.625, 5e-2);
}

TEST(Rng, GammaSmallShapeMoments) {
  Rng rng(15);
  double sum = 0.0;
  int n = 100000;
  for (int i = 0; i < n; ++i) {
    double x = rng.gamma(0.3);
    EXPECT_GT(x, 0.0);
    sum += x;
  }
  EXPECT_NEAR(sum / n, 0.3, 1.5e-2);
}

TEST(Rng, BetaMomentsAndEdges) {
  Rng rng(16);
  double sum = 0.0;
  int n = 100000;
  for (int i = 0; i < n; ++i) {
    double x = rng.beta(2.0, 3.0);
    EXPECT_GE(x, 0.0);
    EXPECT_LE(x, 1.0);
    sum += x;
  }
  EXPECT_NEAR(sum / n, 0.4, 5e-3);
  // Degenerate shapes collapse to the endpoints; a vanishing first shape wins.
  EXPECT_EQ(rng.beta(0.0, 5.0), 0.0);
  EXPECT_EQ(rng.beta(5.0, 0.0), 1.0);
  EXPECT_EQ(rng.beta(0.0, 0.0), 0.0);
}

TEST(Rng, WeibullMoments) {
  Rng rng(17);
  double sum = 0.0;
  int n = 100000;
  for (int i = 0; i < n; ++i) sum += rng.weibull(2.0, 1.0);
  EXPECT_NEAR(sum / n, std::sqrt(std::acos(-1.0)) / 2.0, 1e-2);
}

}  // namespace
