#include "lsjulia/dynamics.hpp"

#include <cmath>

#include "lsjulia/errors.hpp"

namespace lsjulia {

double escape_radius(const Polynomial& p) {
  const int d = p.degree();
  if (d < 2) throw precondition_error("escape_radius: degree must be >= 2");
  double s = 1.0;
  for (int k = 0; k < d; ++k) s += std::abs(p.coeffs()[k]);
  return std::max(1.0, s / std::abs(p.leading()));
}

EscapeParams EscapeParams::standard(const Polynomial& p, int max_iterations) {
  EscapeParams e;
  e.radius = escape_radius(p);
  e.big_radius = std::max(e.radius * 2.0, 1e6);
  e.max_iterations = max_iterations;
  return e;
}

OrbitResult iterate_orbit(const Polynomial& p, cplx z, const EscapeParams& params) {
  if (params.radius <= 0) throw precondition_error("iterate_orbit: escape radius not set");
  OrbitResult r;
  r.last = z;
  if (std::abs(z) > params.radius) {
    r.escaped = true;
    return r;
  }
  for (int n = 0; n < params.max_iterations; ++n) {
    cplx next = p.eval(r.last);
    if (!std::isfinite(next.real()) || !std::isfinite(next.imag())) {
      // Blow-up certainly escapes; keep the last finite point.
      r.escaped = true;
      return r;
    }
    r.last = next;
    r.steps = n + 1;
    if (std::abs(next) > params.radius) {
      r.escaped = true;
      return r;
    }
  }
  return r;  // never exceeded the radius within the budget
}

bool in_filled_julia(const Polynomial& p, cplx z, const EscapeParams& params) {
  return !iterate_orbit(p, z, params).escaped;
}

HyperbolicityReport hyperbolicity_certificate(const Polynomial& p, int max_iterations,
                                              double tol_cycle, int max_period) {
  const double R = escape_radius(p);
  Polynomial dp = p.derivative();
  HyperbolicityReport rep;
  rep.hyperbolic = true;

  for (cplx c : critical_points(p)) {
    CriticalOrbit co;
    co.start = c;
    // Ring buffer of the last window of orbit points for cycle detection.
    const int win = 2 * max_period + 1;
    std::vector<cplx> hist;
    hist.reserve(win);
    int head = 0;  // index of the oldest entry once full
    cplx z = c;
    auto at_back = [&](int back) {  // back = 0 is the newest point
      int n = int(hist.size());
      int pos = (head + n - 1 - back) % n;
      return hist[pos];
    };
    bool done = false;
    for (int n = 0; n < max_iterations && !done; ++n) {
      if (std::abs(z) > R) {
        co.fate = CriticalFate::escaped;
        co.steps_used = n;
        done = true;
        break;
      }
      if (int(hist.size()) < win) {
        hist.push_back(z);
      } else {
        hist[head] = z;
        head = (head + 1) % win;
      }
      int have = int(hist.size());
      for (int period = 1; period <= max_period && 2 * period <= have; ++period) {
        if (std::abs(at_back(0) - at_back(period)) >= tol_cycle) continue;
        bool window_ok = true;
        for (int k = 0; k < period && window_ok; ++k)
          window_ok = std::abs(at_back(k) - at_back(period + k)) < tol_cycle;
        if (!window_ok) continue;
        double mult = 1.0;
        for (int k = 0; k < period; ++k) mult *= std::abs(dp.eval(at_back(k)));
        if (mult < 1.0) {
          // The return distance |z_{n+q} - z_n| scales with |lambda^q - 1|,
          // which need not be smallest at the minimal period (negative or
          // complex multipliers). Tighten the orbit onto the cycle, then take
          // the smallest divisor that closes it.
          cplx w = at_back(0);
          double resid = std::numeric_limits<double>::infinity();
          for (int rounds = 0; rounds < 4000 && resid > tol_cycle * 1e-5; ++rounds) {
            cplx wp = w;
            for (int k = 0; k < period; ++k) wp = p.eval(wp);
            resid = std::abs(wp - w);
            w = wp;
          }
          std::vector<cplx> cyc(period);
          cyc[0] = w;
          for (int k = 1; k < period; ++k) cyc[k] = p.eval(cyc[k - 1]);
          const double close = std::max(200.0 * resid, tol_cycle);
          int minimal = period;
          for (int q = 1; q < period; ++q) {
            if (period % q != 0) continue;
            bool closes = true;
            for (int k = 0; k < period && closes; ++k)
              closes = std::abs(cyc[(k + q) % period] - cyc[k]) <= close;
            if (closes) {
              minimal = q;
              break;
            }
          }
          co.fate = CriticalFate::attracted;
          co.period = minimal;
          co.steps_used = n;
          co.cycle.assign(cyc.begin(), cyc.begin() + minimal);
          co.multiplier_abs = 1.0;
          for (int k = 0; k < minimal; ++k)
            co.multiplier_abs *= std::abs(dp.eval(cyc[k]));
          done = true;
        }
        break;  // non-attracting near-returns keep iterating
      }
      if (done) break;
      z = p.eval(z);
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        co.fate = CriticalFate::escaped;
        co.steps_used = n + 1;
        done = true;
      }
    }
    if (!done) {
      co.fate = CriticalFate::undecided;
      co.steps_used = max_iterations;
    }
    if (co.fate == CriticalFate::undecided) rep.hyperbolic = false;
    rep.orbits.push_back(std::move(co));
  }
  return rep;
}

}  // namespace lsjulia
