#pragma once
// Conjugate Gamma inference for the Poisson arrival rate lambda: update,
// Bayes estimate, predictive law, posterior sampling, and the lambda
// Bernstein-von Mises check.
//
// Parameterization is shape-rate throughout: Gamma(a, b) has mean a/b, and
// exponential inter-arrival data updates (a, b) to (a + n, b + sum A_i).

#include <boost/math/distributions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <vector>

#include "mg1bayes/errors.hpp"
#include "mg1bayes/queue_core.hpp"
#include "mg1bayes/rng.hpp"

namespace mg1bayes {

struct GammaPosterior {
  double a = 1.0;  // shape
  double b = 1.0;  // rate (time units)

  void validate() const {
    if (!(a > 0.0) || !(b > 0.0)) {
      throw ConfigError("GammaPosterior: hyperparameters must be positive");
    }
  }
};

inline GammaPosterior update_gamma(const GammaPosterior& prior, const SampleData& data) {
  prior.validate();
  data.validate();
  double sum = std::accumulate(data.inter_arrivals.begin(), data.inter_arrivals.end(), 0.0);
  return GammaPosterior{prior.a + static_cast<double>(data.inter_arrivals.size()),
                        prior.b + sum};
}

// Posterior mean a/b, the Bayes estimate under squared error loss.
inline double bayes_lambda(const GammaPosterior& post) {
  post.validate();
  return post.a / post.b;
}

// Predictive density of the next inter-arrival given prior (a, b) and data:
//   f(x | A, (a,b)) = (a+n) (b+S)^{a+n} / (b+S+x)^{a+n+1},  S = sum A_i.
inline double predictive(const GammaPosterior& prior, const SampleData& data, double a_next) {
  if (!(a_next > 0.0)) throw DomainError("predictive: argument must be positive");
  GammaPosterior post = update_gamma(prior, data);
  double log_f = std::log(post.a) + post.a * std::log(post.b) -
                 (post.a + 1.0) * std::log(post.b + a_next);
  return std::exp(log_f);
}

// Predictive mean (S + b) / (a + n - 1); undefined unless a + n > 1.
inline double predictive_mean(const GammaPosterior& prior, const SampleData& data) {
  GammaPosterior post = update_gamma(prior, data);
  if (!(post.a > 1.0)) {
    throw DomainError("predictive_mean: undefined moment, needs a + n > 1");
  }
  return post.b / (post.a - 1.0);
}

// k i.i.d. Gamma(a, b) draws by inverse-cdf sampling (one uniform per draw
// through the incomplete-gamma inverse), so seeded output is portable.
inline std::vector<double> sample_lambda(const GammaPosterior& post, std::size_t k,
                                         std::uint64_t seed) {
  post.validate();
  boost::math::gamma_distribution<double> dist(post.a, 1.0 / post.b);
  Rng rng(derive_seed(seed, "sample_lambda"));
  std::vector<double> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    out.push_back(boost::math::quantile(dist, rng.uniform01()));
  }
  return out;
}

inline double normal_cdf(double x, double sd) {
  return 0.5 * (1.0 + std::erf(x / (sd * std::numbers::sqrt2)));
}

// Kolmogorov-Smirnov distance between the empirical law of `sample` and a
// centered normal with standard deviation sd. The sample is sorted once.
inline double ks_distance_to_normal(std::vector<double> sample, double sd) {
  if (sample.empty()) throw DataError("ks_distance_to_normal: empty sample");
  std::sort(sample.begin(), sample.end());
  double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    double phi = normal_cdf(sample[i], sd);
    d = std::max(d, std::abs((static_cast<double>(i) + 1.0) / n - phi));
    d = std::max(d, std::abs(phi - static_cast<double>(i) / n));
  }
  return d;
}

struct BvmLambdaReport {
  std::size_t n = 0;
  std::size_t k = 0;
  double ks = 0.0;
  double target_sd = 0.0;  // lambda0: the limit is N(0, lambda0^2)
};

// Simulates n exponential inter-arrivals at rate lambda0, draws k posterior
// lambdas, and reports the KS distance of sqrt(n) (lambda - lambda_hat_n) to
// the N(0, lambda0^2) limit.
inline BvmLambdaReport bvm_lambda(double lambda0, std::size_t n, std::size_t k,
                                  std::uint64_t seed,
                                  const GammaPosterior& prior = GammaPosterior{1.0, 1.0}) {
  if (!(lambda0 > 0.0)) throw ConfigError("bvm_lambda: lambda0 must be positive");
  Rng arrivals(derive_seed(seed, "bvm_lambda.data"));
  SampleData data;
  data.inter_arrivals.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    data.inter_arrivals.push_back(arrivals.exponential(lambda0));
  }
  GammaPosterior post = update_gamma(prior, data);
  double lambda_hat = bayes_lambda(post);
  std::vector<double> draws = sample_lambda(post, k, derive_seed(seed, "bvm_lambda.draws"));
  double scale = std::sqrt(static_cast<double>(n));
  for (double& x : draws) x = scale * (x - lambda_hat);
  return BvmLambdaReport{n, k, ks_distance_to_normal(std::move(draws), lambda0), lambda0};
}

}  // namespace mg1bayes
