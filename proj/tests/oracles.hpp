#pragma once
// Independent reference computations for the test suite. Everything here is
// deliberately naive and slow: straightforward formulas a reviewer can check
// by hand, used to freeze expected values for the fast library code.
#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "lsjulia/polynomial.hpp"

namespace oracles {

using lsjulia::cplx;

// Expanded-form evaluation of z^2 - 1 (no Horner): z*z - 1.
inline cplx square_minus_one(cplx z) { return z * z - 1.0; }

// Expanded-form evaluation of 2z^3 + z.
inline cplx two_cubed_plus_z(cplx z) { return 2.0 * z * z * z + z; }

// Quadratic formula with explicit discriminant, both roots sorted (re, im).
inline std::vector<cplx> quadratic_roots(cplx a, cplx b, cplx c) {
  cplx disc = std::sqrt(b * b - 4.0 * a * c);
  std::vector<cplx> r{(-b + disc) / (2.0 * a), (-b - disc) / (2.0 * a)};
  std::sort(r.begin(), r.end(), lsjulia::lex_less);
  return r;
}

// Escape-rate value by plain iteration in log-polar coordinates:
// track log|w| exactly, stop after `iters` full applications even if huge.
// For z^2 - 1 at comfortably escaping points, 60 iterations put the
// truncation error far below 1e-10: after escape, log|w_{n+1}| =
// 2 log|w_n| + log|1 - w_n^{-2}| and the correction decays like d^{-n}.
inline double green_log_iteration(const lsjulia::Polynomial& p, cplx z, int iters) {
  const int d = p.degree();
  // Plain complex iteration until the modulus threatens double range, then
  // switch to the normalized variable v = w / |w| with the log tracked aside.
  cplx w = z;
  double logmod_extra = 0.0;  // log|true w| = log|w| + logmod_extra
  int n = 0;
  for (; n < iters; ++n) {
    if (std::abs(w) > 1e100) break;
    w = p.eval(w);
  }
  if (n == iters) {
    double m = std::abs(w);
    return m > 1.0 ? std::log(m) / std::pow(double(d), double(iters)) : 0.0;
  }
  // |w| in (1e100, ~1e200^...): continue with explicit normalization. For
  // |w| >= 1e100 the lower-order terms are below 1e-90 relative: the map is
  // numerically w -> a_d w^d, so recurse on logs exactly.
  double L = std::log(std::abs(w)) + logmod_extra;
  double la = std::log(std::abs(p.leading()));
  for (; n < iters; ++n) L = d * L + la;
  return L / std::pow(double(d), double(iters));
}

// Analytic escape-rate of the square map: log max(1, |z|).
inline double green_square_map(cplx z) { return std::log(std::max(1.0, std::abs(z))); }

// Analytic relative extremal function of the concentric annulus
// {r < |z| < R} with compact {|z| <= r}: -log(R/|z|) / log(R/r) on the
// annulus, -1 inside, 0 outside.
inline double annulus_relative_green(double r, double R, cplx z) {
  double m = std::abs(z);
  if (m <= r) return -1.0;
  if (m >= R) return 0.0;
  return -std::log(R / m) / std::log(R / r);
}

// Harmonic-measure fraction of the inner circle seen from z in the annulus,
// i.e. the value the best analytic disc can approach: same as the relative
// extremal function magnitude.
inline double annulus_best_fraction(double r, double R, cplx z) {
  return -annulus_relative_green(r, R, z);
}

// Least-squares line fit y = slope*x + intercept.
struct Line {
  double slope, intercept;
};
inline Line fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double n = double(x.size());
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {slope, (sy - slope * sx) / n};
}

// Exhaustive nearest neighbor (ties to the smallest index).
inline std::pair<std::size_t, double> nearest_exhaustive(const std::vector<cplx>& pts,
                                                         cplx z) {
  std::size_t bi = 0;
  double bd = std::abs(pts[0] - z);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    double d = std::abs(pts[i] - z);
    if (d < bd) {
      bd = d;
      bi = i;
    }
  }
  return {bi, bd};
}

}  // namespace oracles
