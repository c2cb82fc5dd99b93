#pragma once
// Beta-Stacy prior/posterior machinery for the random service cdf G:
// product-integral posterior update under right censoring, Bayes estimate,
// posterior moments of the random mean int t dG, posterior path sampling,
// and the Dirichlet-process special case.
//
// Grid convention: the evaluation grid is the union of a uniform lattice on
// [0, T_max] and every observation time, so data atoms sit exactly on grid
// points and the continuous hazard is integrable in closed form per cell
// (piecewise-constant at-risk count, midpoint precision c). The continuous
// part of the product integral is therefore evaluated exactly,
//   exp(-int_cell c dH / (c Hbar + M)) = (c Hbar + M)|_right / (c Hbar + M)|_left,
// and data atoms contribute the exact factors 1 - dN/(c Hbar + M).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "mg1bayes/errors.hpp"
#include "mg1bayes/grid_cdf.hpp"
#include "mg1bayes/queue_core.hpp"
#include "mg1bayes/rng.hpp"

namespace mg1bayes {

inline constexpr int kDefaultGridCells = 2000;
inline constexpr double kGridQuantile = 0.999999;

// At-risk and event counting processes of a censored sample:
//   M(t) = #{i : S_i >= t}  (includes censored observations),
//   N(t) = #{i : S_i <= t, exact}.
// A censored time equal to an exact time stays at risk through the death.
struct CountingProcesses {
  std::vector<double> times;     // distinct sorted observation times
  std::vector<int> exact_count;  // exact observations at times[j]
  std::vector<int> cens_count;   // censored observations at times[j]
  int total = 0;

  static CountingProcesses build(const std::vector<double>& obs,
                                 const std::vector<double>& cens) {
    CountingProcesses cp;
    std::vector<std::pair<double, bool>> all;  // (time, is_exact)
    all.reserve(obs.size() + cens.size());
    for (double s : obs) all.emplace_back(s, true);
    for (double s : cens) all.emplace_back(s, false);
    std::sort(all.begin(), all.end());
    for (const auto& [s, exact] : all) {
      if (cp.times.empty() || cp.times.back() != s) {
        cp.times.push_back(s);
        cp.exact_count.push_back(0);
        cp.cens_count.push_back(0);
      }
      (exact ? cp.exact_count.back() : cp.cens_count.back()) += 1;
    }
    cp.total = static_cast<int>(all.size());
    return cp;
  }

  // M(t) = #{S_i >= t}.
  int at_risk(double t) const {
    auto it = std::lower_bound(times.begin(), times.end(), t);
    int before = 0;
    for (auto jt = times.begin(); jt != it; ++jt) {
      std::size_t j = static_cast<std::size_t>(jt - times.begin());
      before += exact_count[j] + cens_count[j];
    }
    return total - before;
  }

  // N(t) = #{S_i <= t, exact}.
  int exact_upto(double t) const {
    int n = 0;
    for (std::size_t j = 0; j < times.size() && times[j] <= t; ++j) n += exact_count[j];
    return n;
  }

  int exact_at(double t) const {
    auto it = std::lower_bound(times.begin(), times.end(), t);
    if (it == times.end() || *it != t) return 0;
    return exact_count[static_cast<std::size_t>(it - times.begin())];
  }
};

// Prior or posterior state of the beta-Stacy law BS(c, H) given the data seen
// so far. Derived quantities beta(t) = c(t)(1 - H(t)) and alpha(dt) = c dH
// are always computed from (c, H), never stored separately.
struct BetaStacyState {
  // Specification.
  std::function<double(double)> c;  // precision function, > 0
  ServiceDist Hsrc;                 // evaluator behind the prior guess
  int cells = kDefaultGridCells;
  std::optional<double> trunc_M;

  // Data accumulated so far.
  std::vector<double> obs;   // exact observation times, sorted
  std::vector<double> cens;  // censoring times, sorted

  // Grid representation, rebuilt whenever spec or data change.
  std::vector<double> grid;
  GridCdf H;                  // prior guess sampled on the grid
  std::vector<double> cgrid;  // c at grid points
  CountingProcesses counts;

  // Posterior summaries at grid points (after all atoms at that point):
  std::vector<double> log_surv;   // log(1 - Hn*(t_k))
  std::vector<double> hstar;      // Hn*(t_k)
  std::vector<double> cstar;      // cn*(t_k)
  std::vector<double> atom_mass;  // Hn* jump at t_k (0 off data atoms)

  // Per-cell sampler parameters (see sample_posterior_path).
  std::vector<double> cell_shape1;
  std::vector<double> cell_shape2;
  std::vector<double> atom_dn;
  std::vector<double> atom_den;

  std::size_t n() const { return obs.size() + cens.size(); }
  double beta_fn(double t) const { return c(t) * (1.0 - Hsrc.cdf(t)); }
};

namespace detail {

inline void rebuild_beta_stacy(BetaStacyState& st) {
  if (st.cells < 10) throw ConfigError("BetaStacyState: need at least 10 grid cells");
  double max_obs = 0.0;
  for (double s : st.obs) max_obs = std::max(max_obs, s);
  for (double s : st.cens) max_obs = std::max(max_obs, s);
  if (st.trunc_M) {
    if (max_obs > *st.trunc_M) {
      throw ConfigError("truncate_prior: observation beyond the truncation bound");
    }
    if (st.Hsrc.cdf(*st.trunc_M) < 1.0 - 1e-9) {
      throw ConfigError("truncate_prior: prior guess H carries mass beyond the bound");
    }
  }
  double t_max = st.trunc_M ? *st.trunc_M
                            : std::max(st.Hsrc.quantile(kGridQuantile), 2.0 * max_obs);
  if (!(t_max > 0.0)) throw ConfigError("BetaStacyState: degenerate grid span");

  // Uniform lattice joined with the observation times.
  std::vector<double> g;
  g.reserve(static_cast<std::size_t>(st.cells) + st.n() + 1);
  for (int k = 0; k <= st.cells; ++k) {
    g.push_back(t_max * static_cast<double>(k) / static_cast<double>(st.cells));
  }
  for (double s : st.obs) g.push_back(s);
  for (double s : st.cens) g.push_back(s);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  st.grid = std::move(g);

  std::size_t K = st.grid.size();
  std::vector<double> hv(K);
  st.cgrid.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    hv[k] = st.Hsrc.cdf(st.grid[k]);
    st.cgrid[k] = st.c(st.grid[k]);
    if (!(st.cgrid[k] > 0.0)) {
      throw ConfigError("BetaStacyState: precision c must be positive on the grid");
    }
  }
  if (st.trunc_M) hv[K - 1] = 1.0;
  st.H = GridCdf(st.grid, hv);
  st.counts = CountingProcesses::build(st.obs, st.cens);

  // At-risk counts and exact-death counts along the grid.
  std::vector<int> at_risk(K), dn(K, 0);
  {
    std::size_t j = 0;
    int seen = 0;  // observations strictly before grid[k]
    for (std::size_t k = 0; k < K; ++k) {
      while (j < st.counts.times.size() && st.counts.times[j] < st.grid[k]) {
        seen += st.counts.exact_count[j] + st.counts.cens_count[j];
        ++j;
      }
      at_risk[k] = st.counts.total - seen;
      if (j < st.counts.times.size() && st.counts.times[j] == st.grid[k]) {
        dn[k] = st.counts.exact_count[j];
      }
    }
  }

  st.log_surv.assign(K, 0.0);
  st.hstar.assign(K, 0.0);
  st.cstar.assign(K, 0.0);
  st.atom_mass.assign(K, 0.0);
  st.cell_shape1.assign(K, 0.0);
  st.cell_shape2.assign(K, 0.0);
  st.atom_dn.assign(K, 0.0);
  st.atom_den.assign(K, 0.0);

  double ls = 0.0;  // running log survival
  st.hstar[0] = 0.0;
  st.cstar[0] = st.cgrid[0] + static_cast<double>(at_risk[0]);  // Hbar(0) = 1, Hn*(0) = 0
  for (std::size_t k = 1; k < K; ++k) {
    double hl = 1.0 - hv[k - 1];
    double hr = 1.0 - hv[k];
    double cm = st.c(0.5 * (st.grid[k - 1] + st.grid[k]));
    if (!(cm > 0.0)) throw ConfigError("BetaStacyState: precision c must be positive");
    // M on the open cell equals M at the right endpoint: observations only
    // sit on grid points.
    double m_open = static_cast<double>(at_risk[k]);
    double den_l = cm * hl + m_open;
    double den_r = cm * hr + m_open;
    double dalpha = cm * (hv[k] - hv[k - 1]);
    double cont_log = 0.0;
    if (dalpha > 0.0) {
      if (!(den_l > 0.0)) {
        throw DegeneratePriorError("posterior_update: c Hbar + M vanishes with hazard mass left");
      }
      cont_log = den_r > 0.0 ? std::log(den_r / den_l) : -std::numeric_limits<double>::infinity();
    }
    double s_prev = ls;
    ls += cont_log;
    double log_pre = ls;  // log survival just before any atom at grid[k]

    double atom_log = 0.0;
    double dnk = static_cast<double>(dn[k]);
    double den_atom = 0.0;
    if (dn[k] > 0) {
      den_atom = st.cgrid[k] * hr + static_cast<double>(at_risk[k]);
      double rel = dnk / den_atom;  // den_atom >= at_risk >= dn >= 1
      atom_log = rel < 1.0 ? std::log1p(-rel) : -std::numeric_limits<double>::infinity();
      st.atom_mass[k] = std::exp(log_pre) * rel;
    }
    ls += atom_log;

    st.log_surv[k] = ls;
    st.hstar[k] = -std::expm1(ls);
    double num = st.cgrid[k] * hr + static_cast<double>(at_risk[k]) - dnk;
    double surv = std::exp(ls);
    st.cstar[k] = surv > 0.0 ? num / surv : std::numeric_limits<double>::infinity();

    // Path-sampler parameters. Continuous piece of the cell: a Beta relative
    // jump with mean (S_{k-1} - S_pre)/S_{k-1} and concentration c Hbar + M;
    // data atom: the exact posterior jump law Beta(dN, c Hbar + M - dN).
    double s_post_prev = std::exp(s_prev);
    double s_pre = std::exp(log_pre);
    if (s_post_prev > 0.0) {
      double vbar = 1.0 - s_pre / s_post_prev;
      double theta = cm * 0.5 * (hl + hr) + m_open;
      st.cell_shape1[k] = theta * vbar;
      st.cell_shape2[k] = theta * (1.0 - vbar);
    } else {
      st.cell_shape1[k] = 0.0;
      st.cell_shape2[k] = 1.0;  // survival already zero; draw V = 0
    }
    st.atom_dn[k] = dnk;
    st.atom_den[k] = den_atom;
  }
}

}  // namespace detail

// Prior state with no data. H may be any service distribution; trunc pins
// the F_M restriction (H must already satisfy H(M) = 1).
inline BetaStacyState beta_stacy_prior(std::function<double(double)> c, ServiceDist H,
                                       int cells = kDefaultGridCells,
                                       std::optional<double> trunc = {}) {
  BetaStacyState st;
  st.c = std::move(c);
  st.Hsrc = std::move(H);
  st.cells = cells;
  st.trunc_M = trunc;
  detail::rebuild_beta_stacy(st);
  return st;
}

// Dirichlet process with total mass c and base cdf `base`, expressed as the
// constant-precision beta-Stacy state.
inline BetaStacyState dirichlet_as_beta_stacy(double c_total, ServiceDist base,
                                              int cells = kDefaultGridCells,
                                              std::optional<double> trunc = {}) {
  if (!(c_total > 0.0)) throw ConfigError("dirichlet_as_beta_stacy: c must be positive");
  return beta_stacy_prior([c_total](double) { return c_total; }, std::move(base), cells, trunc);
}

inline BetaStacyState dirichlet_as_beta_stacy(double c_total, GridCdf base,
                                              int cells = kDefaultGridCells,
                                              std::optional<double> trunc = {}) {
  return dirichlet_as_beta_stacy(c_total, ServiceDist::from_grid(std::move(base)), cells, trunc);
}

// Conjugate update: exact observations move the event process N, censored
// observations enter the at-risk process M only. Updating with data1 then
// data2 equals updating with the concatenation (the state keeps raw data and
// recomputes, which the conjugacy theorem makes equivalent).
inline BetaStacyState posterior_update(const BetaStacyState& prior, const SampleData& data) {
  data.validate();
  BetaStacyState st = prior;
  for (std::size_t i = 0; i < data.services.size(); ++i) {
    (data.censored[i] ? st.cens : st.obs).push_back(data.services[i]);
  }
  std::sort(st.obs.begin(), st.obs.end());
  std::sort(st.cens.begin(), st.cens.end());
  detail::rebuild_beta_stacy(st);
  return st;
}

// Restricts the prior to cdfs with G(M) = 1. H must already live on [0, M];
// renormalizing silently would change the prior guess.
inline BetaStacyState truncate_prior(const BetaStacyState& state, double M_bound) {
  if (!(M_bound > 0.0)) throw ConfigError("truncate_prior: bound must be positive");
  BetaStacyState st = state;
  st.trunc_M = M_bound;
  detail::rebuild_beta_stacy(st);
  return st;
}

// Bayes estimate of G under squared error loss: the posterior mean cdf Hn*,
// with its fixed jumps at the exact observations carried as atoms.
inline GridCdf bayes_cdf(const BetaStacyState& post) {
  std::size_t K = post.grid.size();
  std::vector<double> cont(K);
  std::vector<double> at, am;
  double acc = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    if (post.atom_mass[k] > 0.0) {
      at.push_back(post.grid[k]);
      am.push_back(post.atom_mass[k]);
      acc += post.atom_mass[k];
    }
    cont[k] = std::max(0.0, post.hstar[k] - acc);
  }
  for (std::size_t k = 1; k < K; ++k) cont[k] = std::max(cont[k], cont[k - 1]);
  return GridCdf(post.grid, std::move(cont), std::move(at), std::move(am));
}

// A value computed by quadrature over the grid, with an estimate of the mass
// beyond the grid end. tail_warning flags integrands that have not decayed
// below 1e-10 at T_max (always the case for untruncated priors).
struct TailedValue {
  double value = 0.0;
  double tail_bound = 0.0;
  bool tail_warning = false;
};

namespace detail {

// Extrapolated integral of the posterior survival beyond the grid end, from
// the terminal log-slope over the last tenth of the grid.
inline double survival_tail_estimate(const BetaStacyState& st) {
  double s_end = std::exp(st.log_surv.back());
  if (s_end <= 1e-300) return 0.0;
  std::size_t K = st.grid.size();
  std::size_t k0 = static_cast<std::size_t>(0.9 * static_cast<double>(K - 1));
  double dt = st.grid[K - 1] - st.grid[k0];
  double dlog = st.log_surv[k0] - st.log_surv[K - 1];
  if (!(dlog > 0.0) || !(dt > 0.0)) return std::numeric_limits<double>::infinity();
  return s_end * dt / dlog;
}

}  // namespace detail

// Posterior expectation of the random mean int t dG(t), evaluated as the
// integral of the posterior mean survival over the grid: along each cell the
// survival interpolates linearly up to its pre-atom value, then drops by the
// atom mass.
inline TailedValue posterior_mean_of_mean(const BetaStacyState& post) {
  std::size_t K = post.grid.size();
  double acc = 0.0;
  for (std::size_t k = 1; k < K; ++k) {
    double s_prev = 1.0 - post.hstar[k - 1];
    double s_pre = 1.0 - (post.hstar[k] - post.atom_mass[k]);
    acc += 0.5 * (s_prev + s_pre) * (post.grid[k] - post.grid[k - 1]);
  }
  TailedValue out;
  out.value = acc;
  out.tail_bound = post.trunc_M ? 0.0 : detail::survival_tail_estimate(post);
  out.tail_warning = std::exp(post.log_surv.back()) > 1e-10 && !post.trunc_M;
  return out;
}

// Posterior second moment of the random mean:
//   E[m^2] = 2 int_0^inf Q(r) int_r^inf E[1 - G(s)] ds dr,
// where Q(r) = E[(1-G(r))^2] / E[1-G(r)] collects the second-moment hazard
//   exp(-int_0^r c dH / (c Hbar + M + 1)) * prod_{atoms <= r} (c Hbar + M - dN + 1)/(c Hbar + M + 1),
// from the independent-increment structure of the posterior.
inline TailedValue posterior_second_moment_of_mean(const BetaStacyState& post) {
  std::size_t K = post.grid.size();
  const std::vector<double>& t = post.grid;

  // logQ along the grid (post-atom values), plus pre-atom values per cell.
  std::vector<double> log_q(K, 0.0), log_q_pre(K, 0.0);
  std::vector<int> at_risk(K, 0), dn(K, 0);
  {
    std::size_t j = 0;
    int seen = 0;
    for (std::size_t k = 0; k < K; ++k) {
      while (j < post.counts.times.size() && post.counts.times[j] < t[k]) {
        seen += post.counts.exact_count[j] + post.counts.cens_count[j];
        ++j;
      }
      at_risk[k] = post.counts.total - seen;
      if (j < post.counts.times.size() && post.counts.times[j] == t[k]) {
        dn[k] = post.counts.exact_count[j];
      }
    }
  }

  double lq = 0.0;
  for (std::size_t k = 1; k < K; ++k) {
    double hl = 1.0 - post.H.cont[k - 1];
    double hr = 1.0 - post.H.cont[k];
    double cm = post.c(0.5 * (t[k - 1] + t[k]));
    double m1 = static_cast<double>(at_risk[k]) + 1.0;
    double den_l = cm * hl + m1;
    double den_r = cm * hr + m1;
    double dalpha = cm * (post.H.cont[k] - post.H.cont[k - 1]);
    double cont_log = dalpha > 0.0 ? std::log(den_r / den_l) : 0.0;
    lq += cont_log;
    log_q_pre[k] = lq;
    if (dn[k] > 0) {
      double den = post.cgrid[k] * hr + static_cast<double>(at_risk[k]);
      lq += std::log((den - static_cast<double>(dn[k]) + 1.0) / (den + 1.0));
    }
    log_q[k] = lq;
  }

  // Reverse cumulative integral R(r) = int_r^T E[1-G].
  std::vector<double> R(K, 0.0);
  for (std::size_t k = K - 1; k >= 1; --k) {
    double s_prev = 1.0 - post.hstar[k - 1];
    double s_pre = 1.0 - (post.hstar[k] - post.atom_mass[k]);
    R[k - 1] = R[k] + 0.5 * (s_prev + s_pre) * (t[k] - t[k - 1]);
  }

  double acc = 0.0;
  for (std::size_t k = 1; k < K; ++k) {
    double q_prev = std::exp(log_q[k - 1]);
    double q_pre = std::exp(log_q_pre[k]);
    acc += 0.5 * (q_prev * R[k - 1] + q_pre * R[k]) * (t[k] - t[k - 1]);
  }

  TailedValue out;
  out.value = 2.0 * acc;
  double s_end = std::exp(post.log_surv.back());
  out.tail_bound = post.trunc_M ? 0.0 : 2.0 * R[0] * detail::survival_tail_estimate(post);
  out.tail_warning = s_end > 1e-10 && !post.trunc_M;
  return out;
}

// Posterior variance of the random mean, clamped at zero (tiny negative
// values are quadrature noise).
inline double posterior_variance_of_mean(const BetaStacyState& post) {
  double m = posterior_mean_of_mean(post).value;
  double m2 = posterior_second_moment_of_mean(post).value;
  double var = m2 - m * m;
  if (var < -1e-6) throw DomainError("posterior variance of the mean is negative beyond tolerance");
  return std::max(0.0, var);
}

// One posterior path draw. Each grid cell contributes an independent Beta
// relative jump of the survival with the posterior's mean and concentration;
// each data atom contributes its exact posterior jump law. The pointwise mean
// of draws telescopes to the Bayes estimate Hn* exactly.
inline GridCdf sample_posterior_path(const BetaStacyState& post, std::uint64_t seed) {
  Rng rng(derive_seed(seed, "beta_stacy.path"));
  std::size_t K = post.grid.size();
  std::vector<double> cont(K, 0.0);
  std::vector<double> at, am;
  double ls = 0.0;  // log survival of the path
  double atom_acc = 0.0;
  for (std::size_t k = 1; k < K; ++k) {
    double v = rng.beta(post.cell_shape1[k], post.cell_shape2[k]);
    ls += v < 1.0 ? std::log1p(-v) : -std::numeric_limits<double>::infinity();
    if (post.atom_dn[k] > 0.0) {
      double s_pre = std::exp(ls);
      double va = rng.beta(post.atom_dn[k], post.atom_den[k] - post.atom_dn[k]);
      double mass = s_pre * va;
      if (mass > 0.0) {
        at.push_back(post.grid[k]);
        am.push_back(mass);
        atom_acc += mass;
      }
      ls += va < 1.0 ? std::log1p(-va) : -std::numeric_limits<double>::infinity();
    }
    cont[k] = std::max(0.0, -std::expm1(ls) - atom_acc);
    cont[k] = std::max(cont[k], cont[k - 1]);
  }
  return GridCdf(post.grid, std::move(cont), std::move(at), std::move(am));
}

}  // namespace mg1bayes
