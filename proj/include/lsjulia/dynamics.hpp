#pragma once
#include <vector>

#include "lsjulia/polynomial.hpp"

namespace lsjulia {

// Radius outside which escape to infinity is certain: |f(z)| > |z| whenever
// |z| > R. Requires degree >= 2.
double escape_radius(const Polynomial& p);

struct EscapeParams {
  double radius = 0.0;       // certified escape radius of the map
  double big_radius = 1e6;   // orbit is declared escaped once |z| exceeds this
  int max_iterations = 1000;

  static EscapeParams standard(const Polynomial& p, int max_iterations = 1000);
};

struct OrbitResult {
  bool escaped = false;   // |orbit| exceeded params.radius within the budget
  int steps = 0;          // iterations actually taken
  cplx last;              // final orbit point (finite; stops before overflow)
};

// Iterates f until |z| > radius or the budget runs out.
OrbitResult iterate_orbit(const Polynomial& p, cplx z, const EscapeParams& params);

// True if the orbit stays bounded (never exceeds params.radius) for the full
// budget. A "true" is a numerical verdict at this budget, not a certificate.
bool in_filled_julia(const Polynomial& p, cplx z, const EscapeParams& params);

enum class CriticalFate { escaped, attracted, undecided };

struct CriticalOrbit {
  cplx start;
  CriticalFate fate = CriticalFate::undecided;
  int steps_used = 0;
  int period = 0;               // attracted only: minimal detected period
  double multiplier_abs = 0.0;  // attracted only: |prod f'(cycle)|
  std::vector<cplx> cycle;      // attracted only: one point per cycle slot
};

struct HyperbolicityReport {
  std::vector<CriticalOrbit> orbits;  // one per critical point (with multiplicity)
  bool hyperbolic = false;            // every critical orbit escaped or attracted
};

// Classifies every critical orbit: escape past the radius, or convergence to
// an attracting cycle (period <= max_period, window agreement below tol_cycle,
// |multiplier| < 1). Neither within the budget => undecided, not hyperbolic.
HyperbolicityReport hyperbolicity_certificate(const Polynomial& p,
                                              int max_iterations = 20000,
                                              double tol_cycle = 1e-9,
                                              int max_period = 64);

}  // namespace lsjulia
