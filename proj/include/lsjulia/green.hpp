#pragma once
#include <span>

#include "lsjulia/dynamics.hpp"
#include "lsjulia/grid.hpp"

namespace lsjulia {

struct GreenEval {
  double value = 0.0;        // 0 when the orbit never cleared big_radius
  double error_bound = 0.0;  // certified |value - exact| bound
  int escape_step = -1;      // first step with |orbit| > big_radius, -1 if none
  bool escaped = false;      // cleared big_radius within the budget
};

// Escape-rate value at one point: log|f^n z| / d^n at the first big-radius
// exit, refined by `series_terms` telescoped correction terms plus a closed
// form leading-coefficient tail. Bounded orbits yield value 0 with the
// truncation bound (log(1+big_radius)+C)/d^n as error_bound.
GreenEval green_value(const Polynomial& p, cplx z, const EscapeParams& params,
                      int series_terms = 8);

struct GreenField {
  GridSpec grid;
  std::vector<double> value;     // escape-rate value per cell
  std::vector<uint8_t> bounded;  // 1 = orbit stayed within the escape radius
  double max_error_bound = 0.0;  // worst per-cell certified error

  double at(int ix, int iy) const { return value[grid.idx(ix, iy)]; }
  bool is_bounded(int ix, int iy) const { return bounded[grid.idx(ix, iy)] != 0; }
};

GreenField green_field(const Polynomial& p, const GridSpec& grid,
                       const EscapeParams& params, int series_terms = 8,
                       int workers = 1);

struct InvarianceReport {
  double max_dev = 0.0;  // max |G(f(z)) - d*G(z)|
  cplx worst;
  int n = 0;
};

// Checks the functional equation G(f(z)) = d*G(z) over the given points.
InvarianceReport check_invariance(const Polynomial& p, std::span<const cplx> pts,
                                  const EscapeParams& params, int series_terms = 8);

struct DiscreteMeasure {
  GridSpec grid;
  std::vector<double> mass;          // normalized, sums to 1
  double raw_total = 0.0;            // five-point Laplacian mass before normalization
  double clamped_negative = 0.0;     // total negative mass clamped to zero
};

// Equilibrium measure of the field: mass = (five-point Laplacian)/(2*pi) per
// interior cell, negatives clamped, then normalized. Throws convergence_error
// if |raw_total - 1| > 0.05 (the grid missed too much of the charge).
DiscreteMeasure laplacian_measure(const GreenField& field);

// Central-difference gradient at z with stencil step `step`. Throws
// precondition_error if z or any stencil point has a bounded orbit.
cplx green_gradient(const Polynomial& p, cplx z, double step,
                    const EscapeParams& params, int series_terms = 8);

}  // namespace lsjulia
