#pragma once
// Ground-truth M/G/1/inf-FIFO model: service-time families, data simulation,
// Lindley waiting times, and the Pollaczek-Khinchine formulas used as
// reference values throughout.

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/lognormal.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mg1bayes/errors.hpp"
#include "mg1bayes/grid_cdf.hpp"
#include "mg1bayes/quadrature.hpp"
#include "mg1bayes/rng.hpp"
#include "mg1bayes/transform_set.hpp"

namespace mg1bayes {

// Offset used to evaluate the removable 0/0 points of the transform formulas
// (z=1 for q and n, z=0 for w) as a two-sided average.
inline constexpr double kSingularityOffset = 1e-7;

// Numeric Laplace-Stieltjes transforms integrate up to the point where the
// cdf tail mass falls below this bound.
inline constexpr double kLstTailMass = 1e-10;

// Absolute tolerance of the adaptive Simpson LST quadrature.
inline constexpr double kLstQuadTol = 1e-9;

enum class ServiceFamily { exponential, weibull, gamma, lognormal, uniform, grid };

// Service-time distribution on R+. Parametric families may carry a truncation
// bound M, meaning the law conditioned on [0, M] (cdf G(t)/G(M), renormalized).
struct ServiceDist {
  ServiceFamily family = ServiceFamily::exponential;
  double p1 = 1.0;  // exponential: rate | weibull: shape | gamma: shape
                    // lognormal: log-location | uniform: lower end
  double p2 = 0.0;  // weibull: scale | gamma: rate | lognormal: log-scale
                    // uniform: upper end
  GridCdf grid;     // grid family only
  std::optional<double> trunc;

  static ServiceDist exponential(double rate) {
    require(rate > 0.0, "exponential rate must be positive");
    ServiceDist d;
    d.family = ServiceFamily::exponential;
    d.p1 = rate;
    return d;
  }

  static ServiceDist weibull(double shape, double scale) {
    require(shape > 0.0 && scale > 0.0, "weibull parameters must be positive");
    ServiceDist d;
    d.family = ServiceFamily::weibull;
    d.p1 = shape;
    d.p2 = scale;
    return d;
  }

  static ServiceDist gamma_family(double shape, double rate) {
    require(shape > 0.0 && rate > 0.0, "gamma parameters must be positive");
    ServiceDist d;
    d.family = ServiceFamily::gamma;
    d.p1 = shape;
    d.p2 = rate;
    return d;
  }

  static ServiceDist lognormal(double log_location, double log_scale) {
    require(log_scale > 0.0, "lognormal log-scale must be positive");
    ServiceDist d;
    d.family = ServiceFamily::lognormal;
    d.p1 = log_location;
    d.p2 = log_scale;
    return d;
  }

  static ServiceDist uniform(double lo, double hi) {
    require(lo >= 0.0 && hi > lo, "uniform needs 0 <= lo < hi");
    ServiceDist d;
    d.family = ServiceFamily::uniform;
    d.p1 = lo;
    d.p2 = hi;
    return d;
  }

  static ServiceDist from_grid(GridCdf g) {
    ServiceDist d;
    d.family = ServiceFamily::grid;
    d.grid = std::move(g);
    return d;
  }

  // The law conditioned on [0, M].
  ServiceDist truncated(double M) const {
    require(M > 0.0, "truncation bound must be positive");
    if (family == ServiceFamily::grid) {
      throw ConfigError("truncate a grid cdf by constructing it on [0, M]");
    }
    ServiceDist d = *this;
    double mass = base_cdf(M);
    require(mass > 0.0, "truncation bound carries no mass");
    d.trunc = M;
    return d;
  }

  double cdf(double x) const {
    if (!trunc) return base_cdf(x);
    if (x >= *trunc) return 1.0;
    return base_cdf(x) / base_cdf(*trunc);
  }

  double quantile(double u) const {
    if (u < 0.0 || u > 1.0) throw DomainError("quantile argument outside [0,1]");
    if (!trunc) return base_quantile(u);
    return base_quantile(u * base_cdf(*trunc));
  }

  double upper_support() const {
    if (trunc) return *trunc;
    if (family == ServiceFamily::uniform) return p2;
    if (family == ServiceFamily::grid) return grid.support_end();
    return base_quantile(1.0 - kLstTailMass);
  }

  double mean() const {
    if (trunc) {
      double M = *trunc;
      auto surv = [this](double x) { return 1.0 - cdf(x); };
      return detail::adaptive_simpson(surv, 0.0, M, 1e-11 * std::max(1.0, M));
    }
    switch (family) {
      case ServiceFamily::exponential: return 1.0 / p1;
      case ServiceFamily::weibull: return p2 * boost::math::tgamma(1.0 + 1.0 / p1);
      case ServiceFamily::gamma: return p1 / p2;
      case ServiceFamily::lognormal: return std::exp(p1 + 0.5 * p2 * p2);
      case ServiceFamily::uniform: return 0.5 * (p1 + p2);
      case ServiceFamily::grid: return grid.mean();
    }
    throw ConfigError("unknown service family");
  }

  double variance() const {
    if (trunc || family == ServiceFamily::grid) {
      double T = upper_support();
      auto tsurv = [this](double x) { return 2.0 * x * (1.0 - cdf(x)); };
      double m2 = detail::adaptive_simpson(tsurv, 0.0, T, 1e-11 * std::max(1.0, T * T));
      double m = mean();
      return std::max(0.0, m2 - m * m);
    }
    switch (family) {
      case ServiceFamily::exponential: return 1.0 / (p1 * p1);
      case ServiceFamily::weibull: {
        double g1 = boost::math::tgamma(1.0 + 1.0 / p1);
        double g2 = boost::math::tgamma(1.0 + 2.0 / p1);
        return p2 * p2 * (g2 - g1 * g1);
      }
      case ServiceFamily::gamma: return p1 / (p2 * p2);
      case ServiceFamily::lognormal: {
        double s2 = p2 * p2;
        return (std::exp(s2) - 1.0) * std::exp(2.0 * p1 + s2);
      }
      case ServiceFamily::uniform: return (p2 - p1) * (p2 - p1) / 12.0;
      case ServiceFamily::grid: break;
    }
    throw ConfigError("unknown service family");
  }

  // Inverse-cdf sampling: one uniform per draw, portable across platforms.
  double sample(Rng& rng) const { return quantile(rng.uniform01()); }

 private:
  static void require(bool ok, const char* msg) {
    if (!ok) throw ConfigError(std::string("ServiceDist: ") + msg);
  }

  double base_cdf(double x) const {
    if (x <= 0.0) return family == ServiceFamily::grid ? grid.eval(x) : 0.0;
    switch (family) {
      case ServiceFamily::exponential: return -std::expm1(-p1 * x);
      case ServiceFamily::weibull: return -std::expm1(-std::pow(x / p2, p1));
      case ServiceFamily::gamma:
        return boost::math::cdf(boost::math::gamma_distribution<double>(p1, 1.0 / p2), x);
      case ServiceFamily::lognormal:
        return boost::math::cdf(boost::math::lognormal_distribution<double>(p1, p2), x);
      case ServiceFamily::uniform:
        if (x <= p1) return 0.0;
        if (x >= p2) return 1.0;
        return (x - p1) / (p2 - p1);
      case ServiceFamily::grid: return grid.eval(x);
    }
    throw ConfigError("unknown service family");
  }

  double base_quantile(double u) const {
    switch (family) {
      case ServiceFamily::exponential: return u >= 1.0 ? std::numeric_limits<double>::infinity()
                                                       : -std::log1p(-u) / p1;
      case ServiceFamily::weibull: return u >= 1.0 ? std::numeric_limits<double>::infinity()
                                                   : p2 * std::pow(-std::log1p(-u), 1.0 / p1);
      case ServiceFamily::gamma:
        return boost::math::quantile(boost::math::gamma_distribution<double>(p1, 1.0 / p2), u);
      case ServiceFamily::lognormal:
        return boost::math::quantile(boost::math::lognormal_distribution<double>(p1, p2), u);
      case ServiceFamily::uniform: return p1 + u * (p2 - p1);
      case ServiceFamily::grid: return grid.quantile(u * grid.total());
    }
    throw ConfigError("unknown service family");
  }
};

// Observed inter-arrival times and (possibly right-censored) service times.
struct SampleData {
  std::vector<double> inter_arrivals;
  std::vector<double> services;
  std::vector<bool> censored;  // same length as services

  void validate() const {
    if (censored.size() != services.size()) {
      throw DataError("SampleData: censored/services length mismatch");
    }
    for (double a : inter_arrivals) {
      if (!(a > 0.0)) throw DataError("SampleData: inter-arrivals must be positive");
    }
    for (double s : services) {
      if (!(s > 0.0)) throw DataError("SampleData: services must be positive");
    }
  }

  bool any_censored() const {
    for (bool c : censored) {
      if (c) return true;
    }
    return false;
  }
};

// True data-generating M/G/1 model.
struct MG1Truth {
  double lambda0 = 1.0;
  ServiceDist service;

  void validate() const {
    if (!(lambda0 > 0.0)) throw ConfigError("MG1Truth: lambda0 must be positive");
  }

  double mu0() const { return service.mean(); }
  double rho0() const { return lambda0 * mu0(); }
  bool stable() const { return rho0() < 1.0; }
};

// n i.i.d. Exp(lambda0) inter-arrivals and n i.i.d. service draws, censored
// flags all false. Arrival and service substreams are derived from the seed
// by name, so the output is bitwise reproducible.
inline SampleData simulate_mg1(const MG1Truth& truth, std::size_t n, std::uint64_t seed) {
  truth.validate();
  Rng arrivals(derive_seed(seed, "simulate.arrivals"));
  Rng services(derive_seed(seed, "simulate.services"));
  SampleData data;
  data.inter_arrivals.reserve(n);
  data.services.reserve(n);
  data.censored.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    data.inter_arrivals.push_back(arrivals.exponential(truth.lambda0));
  }
  for (std::size_t i = 0; i < n; ++i) {
    data.services.push_back(truth.service.sample(services));
  }
  return data;
}

// W_1 = 0, W_{k+1} = max(0, W_k + S_k - A_{k+1}); system starts empty.
inline std::vector<double> lindley_waits(const SampleData& data) {
  data.validate();
  if (data.any_censored()) {
    throw DataError("lindley_waits: censored services are not supported");
  }
  if (data.inter_arrivals.size() != data.services.size()) {
    throw DataError("lindley_waits: need equally many arrivals and services");
  }
  std::size_t n = data.services.size();
  std::vector<double> w(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    w[k + 1] = std::max(0.0, w[k] + data.services[k] - data.inter_arrivals[k + 1]);
  }
  return w;
}

// Mean system size E[N] = rho + (rho^2 + lambda^2 Var[S]) / (2 (1 - rho)).
inline double pk_mean_system_size(double rho, double lambda, double var_s) {
  if (!(rho >= 0.0)) throw ConfigError("pk_mean_system_size: rho must be nonnegative");
  if (!(lambda > 0.0)) throw ConfigError("pk_mean_system_size: lambda must be positive");
  if (!(var_s >= 0.0)) throw ConfigError("pk_mean_system_size: variance must be nonnegative");
  if (rho >= 1.0) throw InstabilityError("pk_mean_system_size: rho >= 1");
  return rho + (rho * rho + lambda * lambda * var_s) / (2.0 * (1.0 - rho));
}

// Pollaczek-Khinchine transform evaluators for a stable (lambda, g, rho):
//   w(z) = z (1-rho) / (z - lambda (1 - g(z)))           on [0, inf)
//   q(z) = (1-z)(1-rho) / (g(lambda (1-z)) - z)          on [0, 1]
//   n(z) = g(lambda (1-z)) (1-z)(1-rho) / (g(lambda(1-z)) - z)
// The removable 0/0 points (w at 0, q and n at 1) evaluate to their exact
// analytic limit 1: for any proper g both the numerator and denominator
// derivatives equal +/-(1 - rho) there. Finite-difference averaging across
// these points is NOT safe here, because a grid-backed g can carry a tiny
// total-mass deficit from tail truncation, which turns the true 0/0 into a
// boundary layer of that deficit's width around the singularity.
inline TransformSet pk_transforms(double lambda, std::function<double(double)> g, double rho) {
  if (!(lambda > 0.0)) throw ConfigError("pk_transforms: lambda must be positive");
  if (!(rho >= 0.0)) throw ConfigError("pk_transforms: rho must be nonnegative");
  if (rho >= 1.0) throw InstabilityError("pk_transforms: rho >= 1");

  TransformSet set;
  set.lambda_hat = lambda;
  set.mu_hat = rho / lambda;
  set.rho_hat = rho;
  set.g = g;

  set.w = [lambda, g, rho](double z) -> std::optional<double> {
    if (z < -kSingularityOffset) throw DomainError("w: argument must be nonnegative");
    if (std::abs(z) <= kSingularityOffset) return 1.0;  // exact limit at z = 0
    double den = z - lambda * (1.0 - g(z));
    if (!(den > 0.0)) return std::nullopt;
    return z * (1.0 - rho) / den;
  };

  set.q = [lambda, g, rho](double z) {
    if (z < -kSingularityOffset || z > 1.0 + kSingularityOffset) {
      throw DomainError("q: argument must lie in [0, 1]");
    }
    if (std::abs(z - 1.0) <= kSingularityOffset) return 1.0;  // exact limit at z = 1
    double den = g(lambda * (1.0 - z)) - z;
    if (!(std::abs(den) > 0.0)) throw DomainError("q: denominator vanishes non-removably");
    return (1.0 - z) * (1.0 - rho) / den;
  };

  set.n = [lambda, g, rho](double z) {
    if (z < -kSingularityOffset || z > 1.0 + kSingularityOffset) {
      throw DomainError("n: argument must lie in [0, 1]");
    }
    if (std::abs(z - 1.0) <= kSingularityOffset) return 1.0;  // exact limit at z = 1
    double ga = g(lambda * (1.0 - z));
    double den = ga - z;
    if (!(std::abs(den) > 0.0)) throw DomainError("n: denominator vanishes non-removably");
    return ga * (1.0 - z) * (1.0 - rho) / den;
  };

  return set;
}

// g(z) = int e^{-z s} dG(s). Closed forms for the exponential and gamma
// families (and the truncated exponential); exact Stieltjes sums for grid
// cdfs; otherwise adaptive Simpson against the cdf via
//   int_0^T e^{-zt} dG = e^{-zT} G(T) + z int_0^T e^{-zt} G(t) dt,
// with T carrying all but kLstTailMass of the mass. Small negative z are
// accepted (the removable-singularity machinery evaluates there).
inline double lst_of_dist(const ServiceDist& dist, double z) {
  if (z < -1e-3) throw DomainError("lst_of_dist: argument too negative");
  if (z == 0.0) return 1.0;
  switch (dist.family) {
    case ServiceFamily::exponential: {
      double r = dist.p1;
      if (!dist.trunc) return r / (r + z);
      double M = *dist.trunc;
      return r / (r + z) * (-std::expm1(-(r + z) * M)) / (-std::expm1(-r * M));
    }
    case ServiceFamily::gamma:
      if (!dist.trunc) return std::pow(1.0 + z / dist.p2, -dist.p1);
      break;
    case ServiceFamily::grid:
      return dist.grid.lst(z);
    default:
      break;
  }
  double T = dist.upper_support();
  auto integrand = [&dist, z](double x) { return std::exp(-z * x) * dist.cdf(x); };
  double tail_point = std::exp(-z * T) * dist.cdf(T);
  return tail_point + z * detail::adaptive_simpson(integrand, 0.0, T, kLstQuadTol);
}

}  // namespace mg1bayes
