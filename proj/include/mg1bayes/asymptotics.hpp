#pragma once
// Frequentist validation harness: posterior-consistency decay tables and
// Bernstein-von Mises covariance checks for the service cdf, its LST, the
// random service mean, and the waiting-time LST.
//
// Limit covariances implemented here, for continuous truth G0 on [0, M] with
// survival S0 = 1 - G0 and the at-risk-scaled (Greenwood) variance time change
//   V0(t) = int_0^t dG0 / S0^2 = 1/S0(t) - 1       (uncensored sampling),
// under which the cdf limit process is S0(t) W(V0(t)), W standard Brownian
// motion, i.e. the G0-Brownian bridge: Cov = G0(u^v) S0(u|v). The plain
// cumulative hazard -log S0 is NOT the correct time change here: it would give
// a limit variance that the exact Dirichlet-case posterior moments (see
// posterior_second_moment_of_mean) already contradict at finite n, since
// n Var[m | data] -> Var_{G0}(S) = int int G0(s^t) S0(s|t) ds dt.
//   h(u,v)     = S0(u) S0(v) min(V0(u), V0(v))
//   gamma(u,v) = u v int int e^{-us-vt} h(s,t) ds dt
//   eta        = int int h(s,t) ds dt
//   zeta(u,v)  = waiting-LST limit covariance, assembled below from the delta
//                method around (lambda0, G0) with independent blocks
//                  N ~ Normal(0, lambda0^2)          (arrival-rate limit)
//                  Script-A with Cov = h             (cdf limit)
//                  dg(z) = z int e^{-zt} Script-A dt (LST limit)
//                  dmu   = -int Script-A             (mean limit)
// The double integrals reduce to single Stieltjes integrals in dV0 via
//   min(V0(s), V0(t)) = int 1{s >= r} 1{t >= r} dV0(r),
// giving gamma(u,v)/(uv) = int_0^M Tail_u(r) Tail_v(r) dV0(r) with
// Tail_z(r) = int_r^M e^{-zs} S0(s) ds, all O(grid) per evaluation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mg1bayes/arrival_inference.hpp"
#include "mg1bayes/errors.hpp"
#include "mg1bayes/grid_cdf.hpp"
#include "mg1bayes/queue_core.hpp"
#include "mg1bayes/rng.hpp"
#include "mg1bayes/service_inference.hpp"
#include "mg1bayes/transforms.hpp"

namespace mg1bayes {

// Cumulative-hazard values are capped where the survival drops below 1e-14;
// every integrand carrying a dA0 factor also carries survival factors that
// vanish much faster than the cap grows.
inline constexpr double kHazardCap = 32.23619130191664;  // -log(1e-14)

// Variance-time-change cap: V0 = 1/S0 - 1 stops accumulating once the survival
// falls below 1e-7. Kernel entries h(u,v) = S0 S0 min(V0, V0) past that point
// are bounded by the survival at the cap time, so the induced error is <= 1e-7.
inline constexpr double kVarTimeCap = 1e7;

// True-model quantities referenced by the covariance evaluators, with the
// cached uniform grid the Stieltjes integrals run on.
struct CovarianceRefs {
  ServiceDist service0;  // exact truth evaluators
  GridCdf G0;            // truth sampled on the grid below
  double M_bound = 0.0;
  double lambda0 = 0.0;
  double mu0 = 0.0;
  double rho0 = 0.0;
  std::function<double(double)> g0;  // true service LST
  std::function<double(double)> w0;  // true waiting-time LST

  std::vector<double> r;    // uniform grid on [0, M_bound]
  std::vector<double> S0;   // survival at r
  std::vector<double> A0v;  // capped cumulative hazard at r
  std::vector<double> V0v;  // capped variance time change at r

  // Exact cumulative hazard; domain error once G0 hits one.
  double A0(double t) const {
    double cdf = service0.cdf(t);
    if (cdf >= 1.0) throw DomainError("A0: cumulative hazard diverges, G0(t) = 1");
    return -std::log1p(-cdf);
  }

  // Variance time change V0 = int dG0/S0^2 = 1/S0 - 1 (continuous G0), capped.
  double V0(double t) const {
    double cdf = service0.cdf(t);
    if (cdf >= 1.0) throw DomainError("V0: variance time change diverges, G0(t) = 1");
    return std::min(cdf / (1.0 - cdf), kVarTimeCap);
  }

  double D0(double z) const { return z - lambda0 * (1.0 - g0(z)); }
};

inline CovarianceRefs make_covariance_refs(const MG1Truth& truth, double M_bound,
                                           int cells = 4000) {
  truth.validate();
  if (!(M_bound > 0.0)) throw ConfigError("make_covariance_refs: M_bound must be positive");
  if (cells < 10) throw ConfigError("make_covariance_refs: need at least 10 cells");
  CovarianceRefs refs;
  refs.service0 = truth.service;
  refs.M_bound = M_bound;
  refs.lambda0 = truth.lambda0;
  refs.mu0 = truth.mu0();
  refs.rho0 = truth.rho0();
  ServiceDist service = truth.service;
  refs.g0 = [service](double z) { return lst_of_dist(service, z); };
  double lambda0 = refs.lambda0, rho0 = refs.rho0;
  auto g0 = refs.g0;
  refs.w0 = [lambda0, rho0, g0](double z) {
    if (z == 0.0) return 1.0;
    double den = z - lambda0 * (1.0 - g0(z));
    if (!(den > 0.0)) throw DomainError("w0: denominator not positive");
    return z * (1.0 - rho0) / den;
  };

  std::size_t K = static_cast<std::size_t>(cells) + 1;
  refs.r.resize(K);
  refs.S0.resize(K);
  refs.A0v.resize(K);
  refs.V0v.resize(K);
  std::vector<double> g0v(K);
  for (std::size_t k = 0; k < K; ++k) {
    refs.r[k] = M_bound * static_cast<double>(k) / static_cast<double>(cells);
    double cdf = truth.service.cdf(refs.r[k]);
    refs.S0[k] = 1.0 - cdf;
    refs.A0v[k] = refs.S0[k] > 1e-14 ? -std::log(refs.S0[k]) : kHazardCap;
    refs.V0v[k] = refs.S0[k] > 0.0 ? std::min(cdf / refs.S0[k], kVarTimeCap) : kVarTimeCap;
    g0v[k] = cdf;
  }
  refs.G0 = GridCdf(refs.r, std::move(g0v));
  return refs;
}

// h(u,v) = Cov of the cdf limit process at (u, v); for continuous G0 this is
// the G0-Brownian-bridge covariance G0(min) S0(max).
inline double cov_h(const CovarianceRefs& refs, double u, double v) {
  if (u < 0.0 || v < 0.0) throw DomainError("cov_h: arguments must be nonnegative");
  if (u == 0.0 || v == 0.0) return 0.0;
  double su = 1.0 - refs.service0.cdf(u);
  double sv = 1.0 - refs.service0.cdf(v);
  if (!(su > 0.0) || !(sv > 0.0)) throw DomainError("cov_h: G0 = 1 at an argument");
  return su * sv * std::min(refs.V0(u), refs.V0(v));
}

namespace detail {

// Tail_z[k] = int_{r_k}^M e^{-zs} S0(s) ds, trapezoid on the refs grid.
inline std::vector<double> survival_tail(const CovarianceRefs& refs, double z) {
  std::size_t K = refs.r.size();
  std::vector<double> tail(K, 0.0);
  for (std::size_t k = K - 1; k >= 1; --k) {
    double fl = std::exp(-z * refs.r[k - 1]) * refs.S0[k - 1];
    double fr = std::exp(-z * refs.r[k]) * refs.S0[k];
    tail[k - 1] = tail[k] + 0.5 * (fl + fr) * (refs.r[k] - refs.r[k - 1]);
  }
  return tail;
}

// int_0^M Tail_u(r) Tail_v(r) dV0(r), trapezoid in the Stieltjes measure.
inline double tail_stieltjes(const CovarianceRefs& refs, const std::vector<double>& tu,
                             const std::vector<double>& tv) {
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < refs.r.size(); ++k) {
    double dv = refs.V0v[k + 1] - refs.V0v[k];
    if (dv <= 0.0) continue;
    acc += 0.5 * (tu[k] * tv[k] + tu[k + 1] * tv[k + 1]) * dv;
  }
  return acc;
}

// int int e^{-zt} h(s,t) ds dt over [0,M]^2.
inline double cross_integral(const CovarianceRefs& refs, double z) {
  auto t0 = survival_tail(refs, 0.0);
  auto tz = survival_tail(refs, z);
  return tail_stieltjes(refs, t0, tz);
}

}  // namespace detail

// gamma(u,v) = u v int int e^{-(us+vt)} h(s,t) ds dt.
inline double cov_gamma(const CovarianceRefs& refs, double u, double v) {
  if (u < 0.0 || v < 0.0) throw DomainError("cov_gamma: arguments must be nonnegative");
  if (u == 0.0 || v == 0.0) return 0.0;
  auto tu = detail::survival_tail(refs, u);
  auto tv = detail::survival_tail(refs, v);
  return u * v * detail::tail_stieltjes(refs, tu, tv);
}

// eta = Var of the random-mean limit = int int h(s,t) ds dt.
inline double var_eta(const CovarianceRefs& refs) {
  auto t0 = detail::survival_tail(refs, 0.0);
  return detail::tail_stieltjes(refs, t0, t0);
}

// zeta(u,v): waiting-LST limit covariance. Delta method around the truth:
// with D = D0, w = w0, K(z) = w(z)(1 - g0(z))/D(z), the centered limit is
//   Z(z) = -w(z)/(1-rho0) (mu0 N + lambda0 dmu) + K(z) N - (w(z) lambda0 / D(z)) dg(z),
// N independent of (dmu, dg), Var[N] = lambda0^2, Var[dmu] = eta,
// Cov[dg(u), dg(v)] = gamma(u,v), E[dmu dg(v)] = -v int int e^{-vt} h ds dt.
inline double cov_zeta(const CovarianceRefs& refs, double u, double v) {
  if (!(u > 0.0) || !(v > 0.0)) {
    throw DomainError("cov_zeta: arguments must be positive (z = 0 is the removable point)");
  }
  if (!(refs.rho0 < 1.0)) throw InstabilityError("cov_zeta: rho0 >= 1");
  double l2 = refs.lambda0 * refs.lambda0;
  double omr = 1.0 - refs.rho0;
  double Du = refs.D0(u), Dv = refs.D0(v);
  double wu = refs.w0(u), wv = refs.w0(v);
  double Ku = wu * (1.0 - refs.g0(u)) / Du;
  double Kv = wv * (1.0 - refs.g0(v)) / Dv;
  double gamma_uv = cov_gamma(refs, u, v);
  double eta = var_eta(refs);
  double Ju = detail::cross_integral(refs, u);
  double Jv = detail::cross_integral(refs, v);

  double t1 = wu * wv * l2 * (refs.mu0 * refs.mu0 + eta) / (omr * omr);
  double t2 = l2 * Ku * Kv;
  double t3 = l2 * wu * wv * gamma_uv / (Du * Dv);
  double t4 = -refs.mu0 * l2 / omr * (wu * Kv + wv * Ku);
  double t5 = -l2 * wu * wv / omr * (u * Ju / Du + v * Jv / Dv);
  return t1 + t2 + t3 + t4 + t5;
}

// Monte Carlo oracle for zeta: simulate the limit objects directly. Each
// replication builds Script-A(r) = S0(r) W(V0(r)) from Gaussian increments of
// a standard Brownian motion W on the variance-time-change scale, forms dg and
// dmu by trapezoid, draws the independent N, assembles Z, and accumulates the
// empirical covariance over the z grid. Row-major output.
inline std::vector<double> mc_zeta_covariance(const CovarianceRefs& refs,
                                              const std::vector<double>& z_grid,
                                              std::size_t reps, std::uint64_t seed,
                                              int cells = 1000) {
  if (reps < 2) throw ConfigError("mc_zeta_covariance: need at least 2 replications");
  if (z_grid.empty()) throw ConfigError("mc_zeta_covariance: empty grid");
  for (double z : z_grid) {
    if (!(z > 0.0)) throw DomainError("mc_zeta_covariance: grid must be positive");
  }
  std::size_t d = z_grid.size();
  std::size_t K = static_cast<std::size_t>(cells) + 1;
  double M = refs.M_bound;

  // Oracle grid caches.
  std::vector<double> rr(K), S(K), sd_inc(K, 0.0), trap(K, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    rr[k] = M * static_cast<double>(k) / static_cast<double>(cells);
    S[k] = 1.0 - refs.service0.cdf(rr[k]);
  }
  {
    double prev_v = 0.0;
    for (std::size_t k = 1; k < K; ++k) {
      double v = S[k] > 0.0 ? std::min((1.0 - S[k]) / S[k], kVarTimeCap) : kVarTimeCap;
      sd_inc[k] = std::sqrt(std::max(0.0, v - prev_v));
      prev_v = std::max(prev_v, v);
    }
    double h = M / static_cast<double>(cells);
    for (std::size_t k = 0; k < K; ++k) {
      trap[k] = (k == 0 || k + 1 == K) ? 0.5 * h : h;
    }
  }
  // Per-z weights for dg(z) = z int e^{-zr} Script-A(r) dr, and the z-level
  // constants of the limit decomposition.
  std::vector<std::vector<double>> dg_w(d, std::vector<double>(K));
  std::vector<double> wz(d), coef_n(d), coef_mu(d), coef_g(d);
  for (std::size_t i = 0; i < d; ++i) {
    double z = z_grid[i];
    for (std::size_t k = 0; k < K; ++k) dg_w[i][k] = z * std::exp(-z * rr[k]) * trap[k];
    double Dz = refs.D0(z);
    wz[i] = refs.w0(z);
    double Kz = wz[i] * (1.0 - refs.g0(z)) / Dz;
    coef_n[i] = -wz[i] * refs.mu0 / (1.0 - refs.rho0) + Kz;
    coef_mu[i] = -wz[i] * refs.lambda0 / (1.0 - refs.rho0);
    coef_g[i] = -wz[i] * refs.lambda0 / Dz;
  }

  Rng rng(derive_seed(seed, "zeta.oracle"));
  std::vector<double> mean(d, 0.0), cross(d * d, 0.0), zval(d), dg(d);
  for (std::size_t rep = 0; rep < reps; ++rep) {
    double w_path = 0.0, dmu = 0.0;
    std::fill(dg.begin(), dg.end(), 0.0);
    for (std::size_t k = 0; k < K; ++k) {
      if (k > 0) w_path += sd_inc[k] * rng.normal();
      double a_path = S[k] * w_path;
      dmu -= trap[k] * a_path;
      for (std::size_t i = 0; i < d; ++i) dg[i] += dg_w[i][k] * a_path;
    }
    double nvar = refs.lambda0 * rng.normal();
    for (std::size_t i = 0; i < d; ++i) {
      zval[i] = coef_n[i] * nvar + coef_mu[i] * dmu + coef_g[i] * dg[i];
      mean[i] += zval[i];
    }
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) cross[i * d + j] += zval[i] * zval[j];
    }
  }
  double nr = static_cast<double>(reps);
  std::vector<double> cov(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      double mij = cross[i * d + j] / nr - (mean[i] / nr) * (mean[j] / nr);
      cov[i * d + j] = mij * nr / (nr - 1.0);
    }
  }
  return cov;
}

// One (n, seed) cell of the consistency table: sup-grid errors of the five
// estimated curves against the truth plus the three scalar errors.
struct ConsistencyRow {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  double err_G = 0.0;
  double err_g = 0.0;
  double err_w = 0.0;
  double err_q = 0.0;
  double err_n = 0.0;
  double err_mu = 0.0;
  double err_lambda = 0.0;
  double err_rho = 0.0;
  bool unstable = false;  // rho_hat >= 1 or w domain violation; w/q/n errors NaN
};

struct ConsistencySpec {
  MG1Truth truth;
  GammaPosterior lambda_prior{1.0, 1.0};
  double c_total = 1.0;  // Dirichlet precision of the service prior
  ServiceDist prior_guess = ServiceDist::exponential(1.0);
  int cells = kDefaultGridCells;
  std::vector<std::size_t> n_list;
  std::vector<std::uint64_t> seeds;
  std::vector<double> z_grid = waiting_z_grid();  // LST / waiting-LST sup grid
  std::vector<double> q_grid = pgf_z_grid();      // pgf sup grid on [0, 1]
};

namespace detail {

// Exact sup |Ghat - G0| over the estimate's own grid, including the left
// limits at its atoms (where the difference jumps).
inline double sup_cdf_error(const GridCdf& ghat, const ServiceDist& truth_service) {
  double sup = 0.0;
  for (std::size_t k = 0; k < ghat.size(); ++k) {
    double g0 = truth_service.cdf(ghat.t[k]);
    sup = std::max(sup, std::abs(ghat.full[k] - g0));
  }
  for (std::size_t j = 0; j < ghat.atom_t.size(); ++j) {
    double pre = ghat.eval(ghat.atom_t[j]) - ghat.atom_m[j];
    sup = std::max(sup, std::abs(pre - truth_service.cdf(ghat.atom_t[j])));
  }
  return sup;
}

}  // namespace detail

// Consistency experiment: for each n in n_list and each seed, simulate data,
// run both posteriors, and record sup-grid errors against the truth. Unstable
// cells are flagged with NaN transform errors, never dropped. Definitional
// identities are re-verified inside every row as a build-integrity check.
inline std::vector<ConsistencyRow> consistency_experiment(const ConsistencySpec& spec) {
  spec.truth.validate();
  if (spec.n_list.empty()) throw ConfigError("consistency_experiment: empty n_list");
  if (spec.seeds.empty()) throw ConfigError("consistency_experiment: empty seed list");
  if (!spec.truth.stable()) throw InstabilityError("consistency_experiment: truth is unstable");

  TransformSet truth_set = transforms_from_truth(spec.truth);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<ConsistencyRow> rows;
  rows.reserve(spec.n_list.size() * spec.seeds.size());

  for (std::size_t n : spec.n_list) {
    for (std::uint64_t seed : spec.seeds) {
      SampleData data = simulate_mg1(spec.truth, n, derive_seed(seed, "consistency.data", n));
      GammaPosterior lam_post = update_gamma(spec.lambda_prior, data);
      BetaStacyState prior = dirichlet_as_beta_stacy(spec.c_total, spec.prior_guess, spec.cells);
      BetaStacyState bs_post = posterior_update(prior, data);
      TransformSet est = build_transforms(lam_post, bs_post);
      GridCdf ghat = bayes_cdf(bs_post);

      ConsistencyRow row;
      row.n = n;
      row.seed = seed;
      row.err_G = detail::sup_cdf_error(ghat, spec.truth.service);
      row.err_lambda = std::abs(est.lambda_hat - spec.truth.lambda0);
      row.err_mu = std::abs(est.mu_hat - spec.truth.mu0());
      row.err_rho = std::abs(est.rho_hat - spec.truth.rho0());

      for (double z : spec.z_grid) {
        row.err_g = std::max(row.err_g, std::abs(est.g(z) - truth_set.g(z)));
      }
      // Build-integrity re-checks: the estimated LST error can exceed the cdf
      // error only by grid noise, and n = q * g(lambda (1-z)) is definitional.
      if (row.err_g > row.err_G + 1e-6) {
        throw Error("consistency_experiment: LST error bound violated (internal)");
      }

      row.unstable = est.rho_hat >= 1.0;
      if (!row.unstable) {
        for (double z : {0.0, 0.3, 0.7}) {
          double lhs = est.n(z);
          double rhs = est.q(z) * est.g(est.lambda_hat * (1.0 - z));
          if (std::abs(lhs - rhs) > 1e-12) {
            throw Error("consistency_experiment: pgf identity violated (internal)");
          }
        }
        row.err_w = 0.0;
        for (double z : spec.z_grid) {
          auto west = est.w(z);
          auto wtrue = truth_set.w(z);
          if (!west || !wtrue) {
            row.unstable = true;
            break;
          }
          row.err_w = std::max(row.err_w, std::abs(*west - *wtrue));
        }
      }
      if (!row.unstable) {
        row.err_q = 0.0;
        row.err_n = 0.0;
        for (double z : spec.q_grid) {
          row.err_q = std::max(row.err_q, std::abs(est.q(z) - truth_set.q(z)));
          row.err_n = std::max(row.err_n, std::abs(est.n(z) - truth_set.n(z)));
        }
      } else {
        row.err_w = nan;
        row.err_q = nan;
        row.err_n = nan;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

enum class BvmKind { cdf, lst, mean, waiting_lst };

inline std::string bvm_kind_name(BvmKind kind) {
  switch (kind) {
    case BvmKind::cdf: return "cdf";
    case BvmKind::lst: return "lst";
    case BvmKind::mean: return "mean";
    case BvmKind::waiting_lst: return "waiting_lst";
  }
  throw ConfigError("unknown BvM kind");
}

struct BvmReport {
  std::string kind;
  std::size_t n = 0;
  std::size_t draws = 0;
  std::vector<double> grid;
  std::vector<double> emp;       // empirical covariance, row-major
  std::vector<double> theory;    // theoretical covariance, row-major
  std::vector<double> emp_mean;  // mean of the sqrt(n)-centered draws
  double max_abs_dev = 0.0;
  double max_rel_dev = 0.0;  // over entries with |theory| > 0.01
};

// Bernstein-von Mises covariance check. Simulates one dataset of size n from
// the truth, fits both posteriors, draws `draws` posterior paths (plus rate
// draws for the waiting LST), forms sqrt(n) (functional(draw) - plug-in
// center) on the grid, and compares the empirical covariance with the
// theoretical evaluator: h for the cdf, gamma for the LST, eta for the mean,
// zeta for the waiting LST. The prior must be truncated for every functional
// that integrates over [0, M] (all but the cdf).
inline BvmReport bvm_experiment(const MG1Truth& truth, const GammaPosterior& lambda_prior,
                                const BetaStacyState& prior, std::size_t n, std::size_t draws,
                                std::uint64_t seed, const std::vector<double>& grid,
                                BvmKind kind) {
  truth.validate();
  lambda_prior.validate();
  if (draws < 100) throw ConfigError("bvm_experiment: fewer than 100 draws is too noisy");
  if (kind != BvmKind::cdf && !prior.trunc_M) {
    throw ConfigError("bvm_experiment: this functional requires a truncated prior");
  }
  std::vector<double> pts = kind == BvmKind::mean ? std::vector<double>{0.0} : grid;
  if (pts.empty()) throw ConfigError("bvm_experiment: empty grid");

  SampleData data = simulate_mg1(truth, n, derive_seed(seed, "bvm.data"));
  GammaPosterior lam_post = update_gamma(lambda_prior, data);
  BetaStacyState bs_post = posterior_update(prior, data);
  GridCdf ghat = bayes_cdf(bs_post);

  double m_bound = prior.trunc_M ? *prior.trunc_M : truth.service.upper_support();
  CovarianceRefs refs = make_covariance_refs(truth, m_bound);

  // Plug-in centers.
  std::size_t d = pts.size();
  std::vector<double> center(d);
  TransformSet est;  // waiting LST only
  switch (kind) {
    case BvmKind::cdf:
      for (std::size_t i = 0; i < d; ++i) center[i] = ghat.eval(pts[i]);
      break;
    case BvmKind::lst:
      for (std::size_t i = 0; i < d; ++i) center[i] = ghat.lst(pts[i]);
      break;
    case BvmKind::mean:
      center[0] = posterior_mean_of_mean(bs_post).value;
      break;
    case BvmKind::waiting_lst:
      est = build_transforms(lam_post, bs_post);
      for (std::size_t i = 0; i < d; ++i) {
        auto w = est.w(pts[i]);
        if (!w) throw InstabilityError("bvm_experiment: plug-in waiting LST out of domain");
        center[i] = *w;
      }
      break;
  }

  std::vector<double> lambdas;
  if (kind == BvmKind::waiting_lst) {
    lambdas = sample_lambda(lam_post, draws, derive_seed(seed, "bvm.lambda"));
  }

  double scale = std::sqrt(static_cast<double>(n));
  std::vector<double> mean(d, 0.0), cross(d * d, 0.0), x(d);
  for (std::size_t j = 0; j < draws; ++j) {
    GridCdf path = sample_posterior_path(bs_post, derive_seed(seed, "bvm.path", j));
    switch (kind) {
      case BvmKind::cdf:
        for (std::size_t i = 0; i < d; ++i) x[i] = path.eval(pts[i]);
        break;
      case BvmKind::lst:
        for (std::size_t i = 0; i < d; ++i) x[i] = path.lst(pts[i]);
        break;
      case BvmKind::mean:
        x[0] = path.mean();
        break;
      case BvmKind::waiting_lst: {
        double lam = lambdas[j];
        double rho = lam * path.mean();
        for (std::size_t i = 0; i < d; ++i) {
          double z = pts[i];
          double den = z - lam * (1.0 - path.lst(z));
          if (!(den > 0.0)) {
            throw InstabilityError("bvm_experiment: waiting LST draw out of domain");
          }
          x[i] = z * (1.0 - rho) / den;
        }
        break;
      }
    }
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = scale * (x[i] - center[i]);
      mean[i] += x[i];
    }
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t k = 0; k < d; ++k) cross[i * d + k] += x[i] * x[k];
    }
  }

  BvmReport rep;
  rep.kind = bvm_kind_name(kind);
  rep.n = n;
  rep.draws = draws;
  rep.grid = pts;
  rep.emp.resize(d * d);
  rep.theory.resize(d * d);
  rep.emp_mean.resize(d);
  double nd = static_cast<double>(draws);
  for (std::size_t i = 0; i < d; ++i) rep.emp_mean[i] = mean[i] / nd;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      double mik = cross[i * d + k] / nd - rep.emp_mean[i] * rep.emp_mean[k];
      rep.emp[i * d + k] = mik * nd / (nd - 1.0);
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      double th = 0.0;
      switch (kind) {
        case BvmKind::cdf: th = cov_h(refs, pts[i], pts[k]); break;
        case BvmKind::lst: th = cov_gamma(refs, pts[i], pts[k]); break;
        case BvmKind::mean: th = var_eta(refs); break;
        case BvmKind::waiting_lst: th = cov_zeta(refs, pts[i], pts[k]); break;
      }
      rep.theory[i * d + k] = th;
      double dev = std::abs(rep.emp[i * d + k] - th);
      rep.max_abs_dev = std::max(rep.max_abs_dev, dev);
      if (std::abs(th) > 0.01) {
        rep.max_rel_dev = std::max(rep.max_rel_dev, dev / std::abs(th));
      }
    }
  }
  return rep;
}

}  // namespace mg1bayes
