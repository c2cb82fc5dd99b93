#pragma once
// Bundle of queueing-transform evaluators bound to one (arrival rate, service
// law) pair: service LST g on [0, inf), waiting-time LST w on [0, inf),
// queue-length pgf q and system-size pgf n on [0, 1]. w reports an explicit
// out-of-domain marker (nullopt) where its denominator is nonpositive, which
// can happen under unstable estimates.

#include <functional>
#include <optional>

namespace mg1bayes {

struct TransformSet {
  double lambda_hat = 0.0;
  double mu_hat = 0.0;
  double rho_hat = 0.0;  // lambda_hat * mu_hat
  std::optional<double> trunc_M;

  std::function<double(double)> g;
  std::function<std::optional<double>(double)> w;
  std::function<double(double)> q;
  std::function<double(double)> n;
};

}  // namespace mg1bayes
