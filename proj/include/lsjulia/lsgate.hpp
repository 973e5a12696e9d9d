#pragma once
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "lsjulia/grid.hpp"
#include "lsjulia/polynomial.hpp"

namespace lsjulia {

// Pointwise data sources for the gate tests: a potential G >= 0 (0 on the
// compact) and a distance-to-compact function (0 on the compact). Both must
// be defined everywhere on the scan region.
struct ScanSources {
  std::function<double(cplx)> G;
  std::function<double(cplx)> dist;
};

struct FlaggedCell {
  int ix, iy;
  cplx z;
  double G, dist, rhs;  // rhs = c * dist^(1/c)
};

struct ScanReport {
  double c = 0.0;
  double guard = 0.0;     // cells with dist <= guard are excluded (grid noise)
  double dist_cap = 1.0;  // the comparison only applies where dist < dist_cap
  GridSpec grid;
  std::vector<FlaggedCell> flagged;  // cells with G < c*dist^(1/c), scan order
  std::size_t cells_tested = 0;
  bool nonempty() const { return !flagged.empty(); }
};

// Flags cells where the lower bound c*dist^(1/c) beats G, over guard < dist <
// dist_cap. Requires 0 < c <= 1 and guard >= 0.
ScanReport scan_obstructions(const ScanSources& src, const GridSpec& grid, double c,
                             double guard, double dist_cap = 1.0, int workers = 1);

// True if every cell flagged at c_small is flagged at c_large (c_small <
// c_large; the obstruction sets grow with c).
bool flags_nested(const ScanReport& at_c_small, const ScanReport& at_c_large);

struct CStarResult {
  // Largest ladder value with an empty scan, if any rung was empty.
  std::optional<double> c_star;
  std::vector<std::pair<double, std::size_t>> ladder_counts;  // (c, flag count)
};

// Walks a descending ladder of c values; c_star = first (largest) empty rung.
CStarResult find_c_star(const ScanSources& src, const GridSpec& grid,
                        std::span<const double> ladder, double guard,
                        double dist_cap = 1.0, int workers = 1);

struct ExponentFit {
  double slope = 0.0, intercept = 0.0;  // LS fit of log G vs log dist
  double sup_ratio = 0.0;               // sup over samples of dist/G
  cplx sup_at;
  int n = 0;
  double band_lo = 0.0, band_hi = 0.0;
};

// Regression of log G on log dist over uniform rejection samples with
// dist in [band_lo, band_hi] inside the grid box; sup_ratio is the worst
// c*dist^(1/c)/G at c = 1 (i.e. dist/G), the sharpest single-number
// obstruction detector on the band. Samples with G <= 0 are skipped.
// Throws convergence_error if the band starves (acceptance < 0.1%).
ExponentFit fit_exponent(const ScanSources& src, const GridSpec& box, double band_lo,
                         double band_hi, int n_samples, uint64_t seed);

struct ObstructionScale {
  double band_lo, band_hi;
  double grid_h;
  // Sup of dist / G over the band (c=1 detector). The sampled sup is polished
  // by a deterministic local search, so argmax is the in-band maximizer to
  // ~1e-9, not the luckiest draw; an infinite sup (G = 0 in-band) is reported
  // at the first such sample, unpolished.
  double sup_ratio = 0.0;
  cplx argmax;
  int n = 0;
};

struct ObstructionReport {
  std::vector<ObstructionScale> scales;
  bool ratios_increasing = false;  // strictly, across all scales
  cplx candidate;                  // power-law extrapolation of the argmax locations
  double fit_residual = 0.0;
};

struct ObstructionScaleInput {
  ScanSources src;
  GridSpec box;       // sample box; box.h records the source grid resolution
  double band_lo, band_hi;
  int n_samples = 20000;
  uint64_t seed = 1;
};

// Multi-scale obstruction detector: per scale, the sup of dist/G over a
// dist-band; divergence of these sups as the bands shrink flags a boundary
// point where no Lojasiewicz exponent can hold. The candidate location is the
// limit of per-scale argmaxes under a fitted power law z_k = z* + A*s_k^beta,
// extended by the next-order term B*s_k^(beta+1) once four scales are
// available (maximizer paths are power laws only to first order; the
// correction removes the O(s) extrapolation bias).
ObstructionReport obstruction_scan(std::span<const ObstructionScaleInput> scales);

// Fraction of `pts` whose r-ball contains a sample with G > c*dist^(1/c) and
// dist > 0 (each point gets `samples` draws from its own substream).
// Requires r > min_r (pass the source grid step; smaller balls see only noise).
double boundary_ball_check(const ScanSources& src, std::span<const cplx> pts,
                            double c, double r, int samples, uint64_t seed,
                            double min_r, int workers = 1);

enum class SlowGrowthStatus {
  applicable_ok,        // bound checked and satisfied
  applicable_violation, // bound checked and violated
  skipped_in_obstruction,  // iterate still satisfies G < c*dist^(1/c)
  skipped_out_of_band      // iterate left dist in (0,1)
};

struct SlowGrowthStep {
  cplx x;       // starting point
  int n;        // iterate index
  cplx xn;
  double dist_n, bound;
  SlowGrowthStatus status;
};

struct SlowGrowthReport {
  std::vector<SlowGrowthStep> steps;
  int applicable = 0;
  int violations = 0;
  int points_with_applicable_step = 0;
};

// For each flagged point x, follows iterates x_n = f^n(x) while they stay in
// the band, and whenever an iterate has *left* the obstruction region
// (G >= c*dist^(1/c)) checks the growth bound dist(x_n) < d^(n*c)*dist(x).
// A violation is evidence against the expected dichotomy, worth reporting.
SlowGrowthReport slow_growth_check(const Polynomial& p, const ScanSources& src,
                                   std::span<const cplx> flagged, double c,
                                   int max_steps);

struct HyperbolicBoundReport {
  double b_hat = 0.0;    // min over samples of dist(f z)/dist(z)
  double c_bound = 0.0;  // log(b_hat)/log(degree), meaningful when b_hat > 1
  cplx argmin;
  int n = 0;
};

// Empirical expansion constant near the compact: sampled over dist(z) in
// [band_lo, band_hi] within the box. Requires a hyperbolicity certificate
// from the caller (precondition, not re-checked here).
HyperbolicBoundReport hyperbolic_bound(const Polynomial& p,
                                       const std::function<double(cplx)>& dist,
                                       const GridSpec& box, double band_lo,
                                       double band_hi, int n_samples, uint64_t seed);

}  // namespace lsjulia
