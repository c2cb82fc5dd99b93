#pragma once
// Piecewise cdf on [0, T]: a continuous part interpolated linearly between
// grid values plus finitely many atoms sitting on grid points. Represents
// prior guesses, posterior Bayes estimates, and posterior path draws.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "mg1bayes/errors.hpp"

namespace mg1bayes {

struct GridCdf {
  std::vector<double> t;       // strictly increasing support, t.front() == 0
  std::vector<double> cont;    // continuous-part values at t, nondecreasing
  std::vector<double> atom_t;  // sorted atom locations, each equal to some t[k] > 0
  std::vector<double> atom_m;  // atom masses > 0

  // Derived lookup tables; rebuilt by finalize().
  std::vector<double> atom_cum;  // cumulative atom mass
  std::vector<double> full;      // cdf value at t[k] including atoms at t[k]

  GridCdf() = default;
  GridCdf(std::vector<double> t_, std::vector<double> cont_,
          std::vector<double> atom_t_ = {}, std::vector<double> atom_m_ = {})
      : t(std::move(t_)), cont(std::move(cont_)), atom_t(std::move(atom_t_)),
        atom_m(std::move(atom_m_)) {
    finalize();
  }

  void finalize() {
    validate();
    atom_cum.resize(atom_t.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < atom_t.size(); ++j) {
      acc += atom_m[j];
      atom_cum[j] = acc;
    }
    full.resize(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) full[k] = cont[k] + atoms_upto(t[k]);
  }

  std::size_t size() const { return t.size(); }
  double support_end() const { return t.back(); }
  double total() const { return full.back(); }

  double atoms_upto(double x) const {
    auto it = std::upper_bound(atom_t.begin(), atom_t.end(), x);
    if (it == atom_t.begin()) return 0.0;
    return atom_cum[static_cast<std::size_t>(it - atom_t.begin()) - 1];
  }

  // Right-continuous cdf value; clamps to the terminal value beyond support.
  double eval(double x) const {
    if (x <= t.front()) return x < t.front() ? 0.0 : full.front();
    if (x >= t.back()) return total();
    auto it = std::upper_bound(t.begin(), t.end(), x);
    std::size_t k = static_cast<std::size_t>(it - t.begin());
    double w = (x - t[k - 1]) / (t[k] - t[k - 1]);
    double c = cont[k - 1] + w * (cont[k] - cont[k - 1]);
    return c + atoms_upto(x);
  }

  // Generalized inverse: smallest x with eval(x) >= u, for u in [0, total()].
  double quantile(double u) const {
    if (u <= full.front()) return t.front();
    if (u >= total()) return t.back();
    auto it = std::lower_bound(full.begin(), full.end(), u);
    std::size_t k = static_cast<std::size_t>(it - full.begin());
    double lo = full[k - 1];
    double atom_here = full[k] - cont[k] - atoms_upto(t[k - 1]);
    double hi_cont = full[k] - atom_here;
    if (u > hi_cont) return t[k];
    if (hi_cont <= lo) return t[k];
    return t[k - 1] + (u - lo) / (hi_cont - lo) * (t[k] - t[k - 1]);
  }

  // Integral of the survival function over the support, T - int_0^T F.
  double mean() const {
    double T = t.back();
    double area = 0.0;
    for (std::size_t k = 0; k + 1 < t.size(); ++k) {
      area += 0.5 * (cont[k] + cont[k + 1]) * (t[k + 1] - t[k]);
    }
    for (std::size_t j = 0; j < atom_t.size(); ++j) area += atom_m[j] * (T - atom_t[j]);
    return T - area;
  }

  // int e^{-zx} dF over the support, exact per linear segment and atom.
  // Accepts small negative z (used by removable-singularity limits).
  double lst(double z) const {
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < t.size(); ++k) {
      double mass = cont[k + 1] - cont[k];
      if (mass == 0.0) continue;
      double dt = t[k + 1] - t[k];
      s += mass * std::exp(-z * t[k]) * segment_factor(z * dt);
    }
    for (std::size_t j = 0; j < atom_t.size(); ++j) {
      s += atom_m[j] * std::exp(-z * atom_t[j]);
    }
    return s;
  }

  void validate() const {
    if (t.size() < 2) throw ConfigError("GridCdf: need at least two support points");
    if (t.front() != 0.0) throw ConfigError("GridCdf: support must start at 0");
    if (cont.size() != t.size()) throw ConfigError("GridCdf: cont/t size mismatch");
    for (std::size_t k = 0; k + 1 < t.size(); ++k) {
      if (!(t[k] < t[k + 1])) throw ConfigError("GridCdf: support not strictly increasing");
      if (cont[k + 1] < cont[k] - 1e-12) throw ConfigError("GridCdf: cont part decreasing");
    }
    if (cont.front() < -1e-12) throw ConfigError("GridCdf: negative cdf value");
    if (atom_t.size() != atom_m.size()) throw ConfigError("GridCdf: atom size mismatch");
    double am = 0.0;
    for (std::size_t j = 0; j < atom_t.size(); ++j) {
      if (atom_m[j] <= 0.0) throw ConfigError("GridCdf: atom mass must be positive");
      if (j > 0 && atom_t[j] <= atom_t[j - 1]) throw ConfigError("GridCdf: atoms not sorted");
      if (!std::binary_search(t.begin(), t.end(), atom_t[j])) {
        throw ConfigError("GridCdf: atom location off the grid");
      }
      am += atom_m[j];
    }
    if (cont.back() + am > 1.0 + 1e-9) throw ConfigError("GridCdf: total mass above one");
  }

 private:
  // (1 - e^{-x}) / x with the removable singularity filled in.
  static double segment_factor(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - 0.5 * x;
    return -std::expm1(-x) / x;
  }
};

}  // namespace mg1bayes
