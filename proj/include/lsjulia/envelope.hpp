#pragma once
#include <cstdint>
#include <optional>
#include <vector>

#include "lsjulia/boundary.hpp"
#include "lsjulia/green.hpp"
#include "lsjulia/grid.hpp"

namespace lsjulia {

// Compact A inside open region U, both as cell sets on one grid.
// Cells outside `in_u` are exterior; A must be contained in U.
struct RegionMask {
  GridSpec grid;
  std::vector<uint8_t> in_a;
  std::vector<uint8_t> in_u;

  bool a(int ix, int iy) const { return in_a[grid.idx(ix, iy)] != 0; }
  bool u(int ix, int iy) const { return in_u[grid.idx(ix, iy)] != 0; }
  void validate() const;  // throws precondition_error unless A subset of U, A nonempty
};

struct RelaxOptions {
  double tol = 1e-9;      // stop when the max update in a sweep drops below
  int max_sweeps = 200000;
  int workers = 1;
};

struct RelaxResult {
  ScalarField field;   // values in [-1, 0]; -1 on A, 0 outside U (or `outer`)
  int sweeps = 0;
  double final_update = 0.0;
};

// Largest function <= 0 on U, -1 on A, discretely subharmonic on U \ A:
// red-black projected SOR on the five-point stencil. `outer`, if given, must
// be grid-sized and supplies Dirichlet values for cells outside U (used to
// chain a refined window onto a coarser solve); off-grid neighbors read 0.
// Throws convergence_error if max_sweeps is exhausted.
RelaxResult relax_relative_green(const RegionMask& mask, const RelaxOptions& opt = {},
                                 const std::vector<double>* outer = nullptr);

// One candidate analytic disc: either a polynomial disc (coefficients c_1..c_m
// around the fixed center, h(t) = z + sum c_k t^k) or an annulus-cover disc
// h(t) = z * exp(beta*(s(mobius(u*t*e^{i rot})) - s(a))) recentred on a local
// annulus {r_loc < |w - q| < R_loc} probed from the masks.
struct DiscSample {
  bool is_cover = false;
  std::vector<cplx> poly_coeffs;              // polynomial family
  double u = 0, kappa = 0, rot = 0;           // cover family jitter
  cplx q;                                     // cover annulus center
  double r_loc = 0, R_loc = 0;
  bool valid = false;       // whole sampled disc image inside U (one-cell margin)
  double fraction = 0.0;    // boundary quadrature fraction landing in A
};

struct PoletskyResult {
  double estimate = 0.0;    // min over valid candidates of -fraction (and 0)
  int n_valid = 0;
  int n_total = 0;
  DiscSample best;
  // Running best after the first `first` candidates, at checkpoint counts.
  std::vector<std::pair<int, double>> curve;
};

struct PoletskyOptions {
  int n_discs = 2000;
  int max_degree = 6;        // polynomial family degree
  double radius_scale = 0.2; // Gaussian coefficient scale * dist(z, boundary of U)
  uint64_t seed = 1;
  int workers = 1;
  int net_radii = 16;        // validity net: net_radii x net_angles polar points
  int net_angles = 64;
  int boundary_samples = 256;
};

// Disc-envelope estimate of the relative extremal function at z: upper bound
// -E[1_A on the disc boundary], minimized over a deterministic candidate
// stream (constant disc, Gaussian polynomial discs, jittered annulus-cover
// discs when a local annulus is detectable). z must be a cell center inside U;
// returns -1 immediately if z's cell is in A.
PoletskyResult poletsky_estimate(const RegionMask& mask, cplx z,
                                 const PoletskyOptions& opt = {});

struct RelationReport {
  double a = 0.0;
  double max_dev = 0.0;   // max over U-cells of |G - a*(v+1)|
  cplx worst;
  std::size_t cells_compared = 0;
  int sweeps = 0;
};

// Checks G = a*(v+1) on U_a = {G < a}, where v solves the relaxation with
// A = bounded-orbit cells, U = U_a. Throws precondition_error if U_a touches
// the grid edge (the level set must be compactly contained).
RelationReport check_relation_level_sets(const GreenField& field, double a,
                                         const RelaxOptions& opt = {});

struct CoronaReport {
  double a = 0.0, ell = 0.0;
  double delta_hat = 0.0;   // min over corona of (v_thick+1)/(v_exact+1)
  cplx argmin;
  std::size_t corona_cells = 0;
  int sweeps_exact = 0, sweeps_thick = 0;
};

// Compares the relative extremal function of the filled set against that of
// its ell-thickening, over the corona {a/d <= G < a}. dist_fn must be the
// distance to the filled set (0 inside). Requires the thickening to stay
// inside {G < a/d}; throws precondition_error otherwise.
CoronaReport corona_delta(const GreenField& field, int degree,
                          const std::function<double(cplx)>& dist_fn, double a,
                          double ell, const RelaxOptions& opt = {});

}  // namespace lsjulia
