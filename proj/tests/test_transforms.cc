#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "mg1bayes/transforms.hpp"

namespace {

using namespace mg1bayes;

TEST(Grids, WaitingAndPgfGridShapes) {
  std::vector<double> wz = waiting_z_grid();
  ASSERT_EQ(wz.size(), 201u);
  EXPECT_DOUBLE_EQ(wz.front(), 0.0);
  EXPECT_NEAR(wz[1], 1e-3, 1e-15);
  EXPECT_NEAR(wz.back(), 20.0, 1e-9);
  for (std::size_t i = 1; i < wz.size(); ++i) EXPECT_GT(wz[i], wz[i - 1]);

  std::vector<double> qz = pgf_z_grid();
  ASSERT_EQ(qz.size(), 101u);
  EXPECT_DOUBLE_EQ(qz.front(), 0.0);
  EXPECT_DOUBLE_EQ(qz.back(), 1.0);
  EXPECT_NEAR(qz[50], 0.5, 1e-12);
}

TEST(BuildTransforms, PriorOnlyPipelineMatchesClosedForms) {
  // lambda-posterior Gamma(1, 2) has Bayes estimate 1/2; the Dirichlet prior
  // guess Exp(1) gives mu = 1, so the plug-in queue is the rho = 1/2 case with
  // exponential services, where w(1) = 2/3, q(0) = 3/4, n(0) = 1/2.
  GammaPosterior lam{1.0, 2.0};
  BetaStacyState bs = dirichlet_as_beta_stacy(1.0, ServiceDist::exponential(1.0));
  TransformSet set = build_transforms(lam, bs);
  EXPECT_NEAR(set.lambda_hat, 0.5, 1e-12);
  EXPECT_NEAR(set.mu_hat, 1.0, 1e-3);
  EXPECT_NEAR(set.rho_hat, 0.5, 1e-3);
  EXPECT_DOUBLE_EQ(set.g(0.0), 1.0);
  EXPECT_NEAR(set.g(1.0), 0.5, 1e-3);
  auto w1 = set.w(1.0);
  ASSERT_TRUE(w1.has_value());
  EXPECT_NEAR(*w1, 2.0 / 3.0, 1e-3);
  EXPECT_NEAR(set.q(0.0), 0.75, 1e-3);
  EXPECT_NEAR(set.n(0.0), 0.5, 1e-3);
  EXPECT_FALSE(set.trunc_M.has_value());

  // Removable singularities must give the exact limit 1 even though the
  // grid-backed LST carries a tiny total-mass deficit from tail truncation
  // (a naive finite-difference evaluation across these points drowns in it).
  EXPECT_DOUBLE_EQ(*set.w(0.0), 1.0);
  EXPECT_DOUBLE_EQ(set.q(1.0), 1.0);
  EXPECT_DOUBLE_EQ(set.n(1.0), 1.0);
  // Just outside the singular window the formulas take over; the deficit
  // perturbs them by deficit/(1 - z), so stay where that is negligible.
  EXPECT_NEAR(set.q(0.9), 21.0 / 22.0, 2e-3);  // M/M/1 pgf 0.5 (3-z)/(2-z) at z = 0.9
  EXPECT_NEAR(*set.w(1e-3), 1.0, 2e-3);
}

TEST(BuildTransforms, LstIsMonotoneOnPgfRange) {
  GammaPosterior lam{1.0, 2.0};
  BetaStacyState bs = dirichlet_as_beta_stacy(1.0, ServiceDist::exponential(1.0));
  TransformSet set = build_transforms(lam, bs);
  double prev = 1.0 + 1e-12;
  for (double z = 0.0; z <= 5.0; z += 0.05) {
    double g = set.g(z);
    EXPECT_LE(g, prev + 1e-12);
    EXPECT_GE(g, 0.0);
    prev = g;
  }
}

TEST(BuildTransforms, PgfIdentityHoldsByConstruction) {
  GammaPosterior lam{1.0, 2.0};
  BetaStacyState bs = dirichlet_as_beta_stacy(1.0, ServiceDist::exponential(1.0));
  TransformSet set = build_transforms(lam, bs);
  for (double z : {0.0, 0.3, 0.7}) {
    EXPECT_NEAR(set.n(z), set.q(z) * set.g(set.lambda_hat * (1.0 - z)), 1e-12);
  }
}

TEST(BuildTransforms, UnstableEstimateKeepsLstRefusesQueues) {
  // lambda-hat = 3 with mu-hat ~ 1: rho-hat >= 1, so the queue transforms must
  // refuse while the service LST keeps working.
  GammaPosterior lam{3.0, 1.0};
  BetaStacyState bs = dirichlet_as_beta_stacy(1.0, ServiceDist::exponential(1.0));
  TransformSet set = build_transforms(lam, bs);
  EXPECT_GE(set.rho_hat, 1.0);
  EXPECT_NEAR(set.g(1.0), 0.5, 1e-3);
  EXPECT_THROW(set.w(1.0), InstabilityError);
  EXPECT_THROW(set.q(0.5), InstabilityError);
  EXPECT_THROW(set.n(0.5), InstabilityError);
}

TEST(BuildTransforms, TruncationPlumbing) {
  GammaPosterior lam{1.0, 2.0};
  // Conflicting truncations are refused.
  BetaStacyState fixed =
      dirichlet_as_beta_stacy(1.0, ServiceDist::exponential(1.0).truncated(10.0), 500, 10.0);
  EXPECT_THROW(build_transforms(lam, fixed, 5.0), ConfigError);
  // An untruncated state is truncated on demand and the bound is recorded.
  BetaStacyState open =
      dirichlet_as_beta_stacy(1.0, ServiceDist::exponential(1.0).truncated(10.0), 500);
  TransformSet set = build_transforms(lam, open, 10.0);
  ASSERT_TRUE(set.trunc_M.has_value());
  EXPECT_DOUBLE_EQ(*set.trunc_M, 10.0);
  // Same bound on an already-truncated state is a no-op, not a conflict.
  TransformSet same = build_transforms(lam, fixed, 10.0);
  EXPECT_DOUBLE_EQ(*same.trunc_M, 10.0);
}

TEST(Stability, FromDrawsCountsExactly) {
  StabilityReport all = stability_from_draws({0.5, 0.4}, {1.0, 1.0});
  EXPECT_DOUBLE_EQ(all.p_stable, 1.0);
  EXPECT_DOUBLE_EQ(all.se, 0.0);
  StabilityReport half = stability_from_draws({0.5, 0.5, 2.0, 2.0}, {1.0, 1.0, 1.0, 1.0});
  EXPECT_DOUBLE_EQ(half.p_stable, 0.5);
  EXPECT_NEAR(half.se, 0.25, 1e-12);
  EXPECT_EQ(half.k, 4u);
  EXPECT_THROW(stability_from_draws({}, {}), ConfigError);
  EXPECT_THROW(stability_from_draws({0.5}, {1.0, 1.0}), ConfigError);
}

TEST(Stability, PosteriorProbabilityIsDecisiveOnClearData) {
  MG1Truth truth{0.5, ServiceDist::exponential(1.0)};
  SampleData data = simulate_mg1(truth, 200, 3);
  GammaPosterior lam = update_gamma(GammaPosterior{1.0, 1.0}, data);
  BetaStacyState bs = posterior_update(
      dirichlet_as_beta_stacy(1.0, ServiceDist::exponential(1.0), 500), data);
  StabilityReport rep = stability_probability(lam, bs, 300, 8);
  EXPECT_GT(rep.p_stable, 0.99);
  EXPECT_EQ(rep.k, 300u);
  // Determinism.
  StabilityReport again = stability_probability(lam, bs, 300, 8);
  EXPECT_DOUBLE_EQ(rep.p_stable, again.p_stable);
}

}  // namespace
