#pragma once
// Plug-in posterior transform estimators: the posterior mean cdf and the
// Gamma posterior mean rate feed the Pollaczek-Khinchine formulas, giving
// estimates of the service LST, waiting-time LST, queue-length pgf, and
// system-size pgf, plus a Monte Carlo posterior stability probability.

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "mg1bayes/arrival_inference.hpp"
#include "mg1bayes/errors.hpp"
#include "mg1bayes/grid_cdf.hpp"
#include "mg1bayes/queue_core.hpp"
#include "mg1bayes/rng.hpp"
#include "mg1bayes/service_inference.hpp"
#include "mg1bayes/transform_set.hpp"

namespace mg1bayes {

// Default z-grid for sup-norm reports over the LST domain: {0} plus 200
// log-spaced points in [1e-3, 20]. LSTs flatten beyond; sups over all of
// R+ are reported as sups over this grid.
inline std::vector<double> waiting_z_grid() {
  std::vector<double> z;
  z.reserve(201);
  z.push_back(0.0);
  const double lo = 1e-3, hi = 20.0;
  for (int i = 0; i < 200; ++i) {
    z.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / 199.0));
  }
  return z;
}

// Uniform grid on [0, 1] for the pgf arguments.
inline std::vector<double> pgf_z_grid(std::size_t m = 101) {
  if (m < 2) throw ConfigError("pgf_z_grid: need at least two points");
  std::vector<double> z(m);
  for (std::size_t i = 0; i < m; ++i) {
    z[i] = static_cast<double>(i) / static_cast<double>(m - 1);
  }
  return z;
}

// Plug-in transform set from the two posteriors: lambda_hat = posterior mean
// rate, G = posterior mean cdf, mu_hat = int (1 - G) over the grid, and the
// Pollaczek-Khinchine formulas on top. If trunc_M is given the service
// posterior is restricted to [0, M] first (its prior guess must already live
// there). When rho_hat >= 1 the g evaluator still works but w, q, n raise
// InstabilityError when called.
inline TransformSet build_transforms(const GammaPosterior& lam_post,
                                     const BetaStacyState& bs_post,
                                     std::optional<double> trunc_M = {}) {
  lam_post.validate();
  const BetaStacyState* state = &bs_post;
  BetaStacyState truncated;
  if (trunc_M) {
    if (bs_post.trunc_M && *bs_post.trunc_M != *trunc_M) {
      throw ConfigError("build_transforms: conflicting truncation bounds");
    }
    if (!bs_post.trunc_M) {
      truncated = truncate_prior(bs_post, *trunc_M);
      state = &truncated;
    }
  }

  double lambda_hat = bayes_lambda(lam_post);
  auto ghat = std::make_shared<GridCdf>(bayes_cdf(*state));
  double mu_hat = posterior_mean_of_mean(*state).value;
  double rho_hat = lambda_hat * mu_hat;
  auto g_eval = [ghat](double z) { return z == 0.0 ? 1.0 : ghat->lst(z); };

  if (rho_hat >= 1.0) {
    TransformSet set;
    set.lambda_hat = lambda_hat;
    set.mu_hat = mu_hat;
    set.rho_hat = rho_hat;
    set.trunc_M = state->trunc_M;
    set.g = g_eval;
    set.w = [](double) -> std::optional<double> {
      throw InstabilityError("waiting-time transform undefined: rho_hat >= 1");
    };
    set.q = [](double) -> double {
      throw InstabilityError("queue-length transform undefined: rho_hat >= 1");
    };
    set.n = [](double) -> double {
      throw InstabilityError("system-size transform undefined: rho_hat >= 1");
    };
    return set;
  }

  TransformSet set = pk_transforms(lambda_hat, g_eval, rho_hat);
  set.trunc_M = state->trunc_M;
  return set;
}

// Exact transforms of a known stable truth, for experiment reference curves.
inline TransformSet transforms_from_truth(const MG1Truth& truth) {
  truth.validate();
  ServiceDist service = truth.service;
  auto g0 = [service](double z) { return lst_of_dist(service, z); };
  return pk_transforms(truth.lambda0, g0, truth.rho0());
}

struct StabilityReport {
  double p_stable = 0.0;
  double se = 0.0;
  std::size_t k = 0;
};

// Fraction of joint posterior draws (lambda_j, mu_j) with lambda_j mu_j < 1,
// with the binomial standard error.
inline StabilityReport stability_from_draws(const std::vector<double>& lambdas,
                                            const std::vector<double>& mus) {
  if (lambdas.empty() || lambdas.size() != mus.size()) {
    throw ConfigError("stability_from_draws: need equally many lambda and mu draws");
  }
  std::size_t k = lambdas.size();
  std::size_t stable = 0;
  for (std::size_t j = 0; j < k; ++j) {
    if (lambdas[j] * mus[j] < 1.0) ++stable;
  }
  double p = static_cast<double>(stable) / static_cast<double>(k);
  StabilityReport rep;
  rep.p_stable = p;
  rep.se = std::sqrt(p * (1.0 - p) / static_cast<double>(k));
  rep.k = k;
  return rep;
}

// Posterior probability that the queue is stable, P(lambda mu(G) < 1 | data):
// lambda from the Gamma posterior, mu(G) as the mean of an independent
// posterior path draw (its survival integrated over the path's grid).
inline StabilityReport stability_probability(const GammaPosterior& lam_post,
                                             const BetaStacyState& bs_post, std::size_t k,
                                             std::uint64_t seed) {
  if (k < 1) throw ConfigError("stability_probability: need k >= 1");
  std::uint64_t sub = derive_seed(seed, "stability");
  std::vector<double> lambdas = sample_lambda(lam_post, k, sub);
  std::vector<double> mus(k);
  for (std::size_t j = 0; j < k; ++j) {
    mus[j] = sample_posterior_path(bs_post, derive_seed(sub, "stability.path", j)).mean();
  }
  return stability_from_draws(lambdas, mus);
}

}  // namespace mg1bayes
