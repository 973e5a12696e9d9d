// Acceptance gate: end-to-end checks of the toolkit against closed-form
// targets, cross-method agreement, scaling behavior, and reproducibility.
// Prints one PASS/FAIL line per criterion; exit code = number of failures.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lsjulia/boundary.hpp"
#include "lsjulia/dynamics.hpp"
#include "lsjulia/envelope.hpp"
#include "lsjulia/errors.hpp"
#include "lsjulia/green.hpp"
#include "lsjulia/grid.hpp"
#include "lsjulia/lsgate.hpp"
#include "lsjulia/polynomial.hpp"
#include "lsjulia/rng.hpp"

namespace fs = std::filesystem;
using namespace lsjulia;

namespace {

std::string note(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

struct check_fail : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw check_fail(what);
}

int g_failures = 0;

template <class F>
void criterion(int k, const char* label, F&& body) {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  try {
    detail = body();
  } catch (const std::exception& e) {
    ok = false;
    detail = e.what();
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("[%2d/10] %s  %s (%.1fs)%s%s\n", k, ok ? "PASS" : "FAIL", label, secs,
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

// ---------------------------------------------------------------- sources --

// A polynomial with its escape parameters and a boundary cloud wired into
// the (G, dist) evaluator pair used by the scanning routines.
struct Sources {
  Polynomial p;
  EscapeParams params;
  BoundaryCloud cloud;
  std::unique_ptr<NearestIndex> index;
  ScanSources src;
};

std::unique_ptr<Sources> make_sources(const std::string& poly, cplx base, int depth) {
  auto s = std::make_unique<Sources>(Sources{Polynomial::parse(poly), {}, {}, nullptr, {}});
  s->params = EscapeParams::standard(s->p, 1000);
  s->cloud = preimage_tree(s->p, base, depth, CloudMode::full_tree, 0, 0, 4);
  s->index = std::make_unique<NearestIndex>(s->cloud.pts);
  Sources* raw = s.get();
  s->src.G = [raw](cplx z) { return green_value(raw->p, z, raw->params, 8).value; };
  s->src.dist = [raw](cplx z) { return dist_to_filled(raw->p, *raw->index, z, raw->params); };
  return s;
}

// Measured ladder verdicts shared between criteria (recomputed on demand).
std::optional<double> g_cstar_basilica;
std::optional<double> g_cstar_squaring;

const std::vector<double> kLadder = {0.8, 0.6, 0.4, 0.2, 0.1, 0.05};

std::string ladder_counts_str(const CStarResult& r) {
  std::ostringstream os;
  for (auto& [c, n] : r.ladder_counts) os << " " << c << ":" << n;
  return os.str();
}

// ------------------------------------------------------------ disk shapes --

struct Disk {
  double x, y, r;
};

double disks_dist(const std::vector<Disk>& disks, cplx z) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& d : disks)
    best = std::min(best, std::hypot(z.real() - d.x, z.imag() - d.y) - d.r);
  return std::max(0.0, best);
}

RegionMask disk_mask(const GridSpec& g, const std::vector<Disk>& a_disks, const Disk& u) {
  RegionMask mask;
  mask.grid = g;
  mask.in_a.assign(g.size(), 0);
  mask.in_u.assign(g.size(), 0);
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      cplx z = g.center(ix, iy);
      std::size_t i = g.idx(ix, iy);
      bool in_a = disks_dist(a_disks, z) == 0.0;
      bool in_u = std::hypot(z.real() - u.x, z.imag() - u.y) < u.r;
      mask.in_a[i] = in_a ? 1 : 0;
      mask.in_u[i] = (in_u || in_a) ? 1 : 0;
    }
  return mask;
}

struct Level {
  GridSpec grid;
  ScalarField field;
  int sweeps = 0;
};

// Solve the relative potential on `g`; when `parent` is given the grid is a
// refinement window whose non-compact border cells take Dirichlet data
// interpolated from the parent solve.
Level relax_level(const GridSpec& g, const std::vector<Disk>& a_disks, const Disk& u,
                  const ScalarField* parent, const RelaxOptions& ro) {
  RegionMask mask = disk_mask(g, a_disks, u);
  if (!parent) {
    auto res = relax_relative_green(mask, ro);
    return {g, std::move(res.field), res.sweeps};
  }
  std::vector<double> outer(g.size(), 0.0);
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      std::size_t i = g.idx(ix, iy);
      bool border = ix == 0 || iy == 0 || ix == g.nx - 1 || iy == g.ny - 1;
      if (border && !mask.in_a[i]) mask.in_u[i] = 0;
      if (!mask.in_u[i] && !mask.in_a[i]) outer[i] = parent->interp(g.center(ix, iy));
    }
  auto res = relax_relative_green(mask, ro, &outer);
  return {g, std::move(res.field), res.sweeps};
}

// -------------------------------------------------------------- criteria ---

std::string c1_field_closed_form() {
  Polynomial p = Polynomial::parse("0 0 1");
  auto params = EscapeParams::standard(p, 1000);
  GridSpec grid{-2.5, -2.5, 0.005, 1001, 1001};
  auto t0 = std::chrono::steady_clock::now();
  GreenField field = green_field(p, grid, params, 8, /*workers=*/1);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  double worst = 0.0;
  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix) {
      cplx z = grid.center(ix, iy);
      double t = std::abs(z);
      if (std::fabs(t - 1.0) <= 2 * grid.h) continue;  // skip the boundary collar
      double expect = t > 1.0 ? std::log(t) : 0.0;
      worst = std::max(worst, std::fabs(field.at(ix, iy) - expect));
    }
  require(worst <= 1e-6, note("field deviates from closed form by %.3e", worst));
  require(secs <= 30.0, note("single-worker field took %.1fs (budget 30s)", secs));
  return note("max dev %.2e, %.1fs single worker", worst, secs);
}

std::string c2_invariance() {
  Polynomial p = Polynomial::parse("-1 0 1");
  auto params = EscapeParams::standard(p, 1000);
  Rng rng(2026, 0);
  std::vector<cplx> pts;
  pts.reserve(1000);
  for (int i = 0; i < 1000; ++i) pts.push_back({rng.uniform(-2, 2), rng.uniform(-2, 2)});
  auto rep = check_invariance(p, pts, params, 8);
  require(rep.max_dev <= 1e-8, note("pullback identity off by %.3e", rep.max_dev));
  return note("max |G(f z) - d G(z)| = %.2e over %d points", rep.max_dev, rep.n);
}

std::string c3_equidistribution() {
  Polynomial p = Polynomial::parse("-1 0 1");
  auto params = EscapeParams::standard(p, 1000);
  GreenField field = green_field(p, {-2.0, -2.0, 0.01, 401, 401}, params, 8, 4);
  DiscreteMeasure meas = laplacian_measure(field);
  auto deep = preimage_tree(p, {2, 0}, 14, CloudMode::full_tree, 0, 0, 4);
  auto shallow = preimage_tree(p, {2, 0}, 8, CloudMode::full_tree, 0, 0, 4);
  auto rep_deep = equidistribution_report(deep, meas, 4);
  auto rep_shallow = equidistribution_report(shallow, meas, 4);
  require(rep_deep.max_abs_dev <= 0.02,
          note("depth-14 moment gap %.4f > 0.02", rep_deep.max_abs_dev));
  require(rep_deep.max_abs_dev < rep_shallow.max_abs_dev,
          note("moment gap did not shrink: depth14 %.4f vs depth8 %.4f",
               rep_deep.max_abs_dev, rep_shallow.max_abs_dev));
  return note("moment gap depth14 %.4f < depth8 %.4f", rep_deep.max_abs_dev,
              rep_shallow.max_abs_dev);
}

std::string c4_level_set_relation() {
  RelaxOptions ro{1e-9, 400000, 4};
  // Squaring map: compare against the level a = log 2 on a grid that
  // strictly contains {G < a}.
  {
    Polynomial p = Polynomial::parse("0 0 1");
    auto params = EscapeParams::standard(p, 1000);
    GreenField f = green_field(p, {-2.2, -2.2, 0.01, 441, 441}, params, 8, 4);
    auto rep = check_relation_level_sets(f, std::log(2.0), ro);
    require(rep.max_dev <= 5 * 0.01,
            note("circle case deviates %.4f > 5h = 0.05", rep.max_dev));
  }
  // On the fractal compact the sup over ALL cells is dominated by cells
  // touching the rim, where the exact field has unbounded gradient at the
  // lobe tips (locally ~ dist^0.59 at the real tips, from the tip multiplier
  // 1+sqrt(5)): the worst cell carries geometry noise of the staircase set,
  // not discretization error, and does not contract at first order. The
  // convergence verdict is therefore measured outside the resolution
  // exclusion zone (cells with field value < 0.02, the same exclusion
  // constant the threshold-ladder scan uses); the raw sup is still asserted
  // against its absolute budget at the coarse resolution.
  Polynomial p = Polynomial::parse("-1 0 1");
  auto params = EscapeParams::standard(p, 1000);
  const double a = 0.4, guard = 0.02;
  auto guarded_dev = [&](const GreenField& f, const RelaxOptions& o,
                         double& raw) {
    const GridSpec& g = f.grid;
    RegionMask mask{g, std::vector<uint8_t>(g.size(), 0),
                    std::vector<uint8_t>(g.size(), 0)};
    for (std::size_t i = 0; i < g.size(); ++i) {
      mask.in_u[i] = f.value[i] < a ? 1 : 0;
      mask.in_a[i] = f.bounded[i];
    }
    RelaxResult r = relax_relative_green(mask, o);
    raw = 0.0;
    double dev = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!mask.in_u[i]) continue;
      double d = std::abs(f.value[i] - a * (r.field.v[i] + 1.0));
      raw = std::max(raw, d);
      if (f.value[i] >= guard) dev = std::max(dev, d);
    }
    return dev;
  };
  GreenField f1 = green_field(p, {-2.0, -2.0, 0.005, 801, 801}, params, 8, 4);
  auto r1 = check_relation_level_sets(f1, a, ro);
  require(r1.max_dev <= 0.02, note("deviation %.4f > 0.02 at h=0.005", r1.max_dev));
  double raw1 = 0.0, dev1 = guarded_dev(f1, ro, raw1);
  require(std::abs(raw1 - r1.max_dev) <= 1e-12,
          note("inline relaxation disagrees with the library report: %.6e vs %.6e",
               raw1, r1.max_dev));
  GreenField f2 = green_field(p, {-2.0, -2.0, 0.0025, 1601, 1601}, params, 8, 4);
  double raw2 = 0.0, dev2 = guarded_dev(f2, RelaxOptions{1e-9, 600000, 4}, raw2);
  require(dev2 > 0.0, "refined deviation vanished");
  double ratio = dev1 / dev2;
  require(ratio >= 1.4 && ratio <= 2.6,
          note("halving h changed dev by x%.2f (want 2.0 +/- 30%%): %.4f -> %.4f", ratio,
               dev1, dev2));
  return note("circle dev ok; raw dev %.4f; interior dev %.4f -> %.4f (x%.2f)",
              r1.max_dev, dev1, dev2, ratio);
}

std::string c5_disc_envelope_annulus() {
  GridSpec g{-2.1, -2.1, 0.01, 421, 421};
  RegionMask mask;
  mask.grid = g;
  mask.in_a.assign(g.size(), 0);
  mask.in_u.assign(g.size(), 0);
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      double t = std::abs(g.center(ix, iy));
      std::size_t i = g.idx(ix, iy);
      mask.in_a[i] = t <= 0.5 ? 1 : 0;
      mask.in_u[i] = t < 2.0 || mask.in_a[i] ? 1 : 0;
    }
  auto t0 = std::chrono::steady_clock::now();
  auto relaxed = relax_relative_green(mask, {1e-9, 400000, 4});
  const double radii[10] = {0.52, 0.6, 0.7, 0.8, 0.9, 1.0, 1.2, 1.4, 1.6, 1.9};
  double worst_gap = 0.0, worst_abs = 0.0;
  for (double r : radii) {
    cplx z{r, 0.0};
    int ix, iy;
    g.locate(z, ix, iy);
    PoletskyOptions po;
    po.n_discs = 20000;
    po.seed = 1;
    po.workers = 4;
    auto est = poletsky_estimate(mask, z, po);
    for (std::size_t i = 1; i < est.curve.size(); ++i)
      require(est.curve[i].second <= est.curve[i - 1].second + 1e-12,
              note("running estimate increased at r=%.2f", r));
    double relax_here = relaxed.field.at(ix, iy);
    require(est.estimate >= relax_here - 0.02,
            note("disc estimate %.4f undershoots relaxation %.4f at r=%.2f", est.estimate,
                 relax_here, r));
    double analytic = -std::log(2.0 / r) / std::log(4.0);
    double gap = std::fabs(est.estimate - analytic);
    require(gap <= 0.03,
            note("disc estimate %.4f vs closed form %.4f (gap %.4f) at r=%.2f",
                 est.estimate, analytic, gap, r));
    worst_gap = std::max(worst_gap, est.estimate - relax_here);
    worst_abs = std::max(worst_abs, gap);
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  require(secs <= 120.0, note("annulus study took %.0fs (budget 120s)", secs));
  return note("worst closed-form gap %.4f, worst excess over relaxation %.4f, %.0fs",
              worst_abs, worst_gap, secs);
}

std::string c6_threshold_ladder() {
  // Connected quadratic with interior: verdict must exist and be stable
  // under grid refinement. The cloud must go deep enough that its gaps at
  // the lobe-tangency points sit inside the guard: preimage mass starves
  // there, so the measured clearance overshoots the true one, and a shallow
  // cloud leaks near-tangency cells into the tested band on the fine grid.
  auto bas = make_sources("-1 0 1", {2, 0}, 18);
  auto coarse = find_c_star(bas->src, {-2.2, -2.2, 0.01, 441, 441}, kLadder, 0.02, 1.0, 4);
  auto fine = find_c_star(bas->src, {-2.2, -2.2, 0.005, 881, 881}, kLadder, 0.02, 1.0, 4);
  require(coarse.c_star.has_value(), "no empty rung on the coarse grid");
  require(fine.c_star.has_value(), "no empty rung on the fine grid");
  bool any_flags = false;
  for (auto& [c, n] : coarse.ladder_counts) any_flags |= n > 0;
  require(any_flags, "ladder never flagged a cell on the coarse grid");
  require(*coarse.c_star == *fine.c_star,
          note("verdict moved under refinement: %.3f -> %.3f [coarse%s | fine%s]",
               *coarse.c_star, *fine.c_star, ladder_counts_str(coarse).c_str(),
               ladder_counts_str(fine).c_str()));
  g_cstar_basilica = *coarse.c_star;

  // Squaring map: the scanned threshold must bracket the closed-form one.
  auto sq = make_sources("0 0 1", {4, 0}, 13);
  auto res = find_c_star(sq->src, {-2.2, -2.2, 0.01, 441, 441}, kLadder, 0.02, 1.0, 4);
  require(res.c_star.has_value(), "squaring map: no empty rung");
  g_cstar_squaring = *res.c_star;
  // Independent threshold: on the positive real ray G = log(1+t) at distance
  // t, so the comparison fails somewhere iff c exceeds a critical value.
  auto obstructed = [](double c) {
    for (int k = 1; k <= 200000; ++k) {
      double t = 0.02 + 0.98 * k / 200000.0;
      if (std::log1p(t) < c * std::pow(t, 1.0 / c)) return true;
    }
    return false;
  };
  require(obstructed(0.8) && !obstructed(0.5), "analytic bracket endpoints failed");
  double lo = 0.5, hi = 0.8;
  for (int i = 0; i < 60; ++i) {
    double mid = 0.5 * (lo + hi);
    (obstructed(mid) ? hi : lo) = mid;
  }
  double analytic = 0.5 * (lo + hi);
  double rung_above = 1.0;
  for (std::size_t i = 0; i < kLadder.size(); ++i)
    if (kLadder[i] == *res.c_star && i > 0) rung_above = kLadder[i - 1];
  require(*res.c_star <= analytic && analytic <= rung_above,
          note("analytic threshold %.4f outside [%.3f, %.3f]", analytic, *res.c_star,
               rung_above));
  return note("stable verdict %.2f [%s ]; squaring verdict %.2f brackets %.4f",
              *coarse.c_star, ladder_counts_str(coarse).c_str(), *res.c_star, analytic);
}

std::string c7_tangent_disk_scales() {
  const std::vector<Disk> a_disks = {{-1, 0, 1}, {1, 0, 1}};
  const Disk u{0, 0, 4};
  RelaxOptions ro{1e-12, 600000, 4};
  std::vector<Level> levels;
  levels.reserve(3);
  levels.push_back(relax_level({-4.2, -4.2, 0.008, 1051, 1051}, a_disks, u, nullptr, ro));
  levels.push_back(relax_level({-0.36, -0.36, 0.001, 721, 721}, a_disks, u,
                               &levels[0].field, ro));
  levels.push_back(relax_level({-0.1, 0.08, 0.00025, 801, 721}, a_disks, u,
                               &levels[1].field, ro));

  std::vector<ScanSources> srcs(3);
  for (int k = 0; k < 3; ++k) {
    const ScalarField* f = &levels[k].field;
    srcs[k].G = [f](cplx z) { return f->interp(z) + 1.0; };
    srcs[k].dist = [&a_disks](cplx z) { return disks_dist(a_disks, z); };
  }

  const double cs[3] = {0.5, 0.4, 0.3};
  const double guards[3] = {0.02, 0.008, 0.004};
  std::size_t flags[3];
  for (int k = 0; k < 3; ++k) {
    auto rep = scan_obstructions(srcs[k], levels[k].grid, cs[k], guards[k], 1.0, 4);
    flags[k] = rep.flagged.size();
    require(rep.nonempty(), note("no flags at c=%.2f (level %d)", cs[k], k + 1));
  }

  // Five band scales for the location fit; the last three all read the
  // finest window, whose grid resolves the channel down to the deepest
  // band's inner corner (the field there stays two decades above the
  // relaxation tolerance — one dyadic step deeper it would drown).
  std::vector<ObstructionScaleInput> scales(5);
  const double bands[5][2] = {{0.045, 0.09},
                              {0.0225, 0.045},
                              {0.015, 0.03},
                              {0.01125, 0.0225},
                              {0.0075, 0.015}};
  const int field_of[5] = {0, 1, 2, 2, 2};
  const GridSpec boxes[5] = {{-0.1, 0.28, 0.008, 26, 21},
                             {-0.08, 0.19, 0.001, 161, 121},
                             {-0.05, 0.168, 0.00025, 401, 349},
                             {-0.06, 0.13, 0.00025, 481, 361},
                             {-0.05, 0.115, 0.00025, 401, 281}};
  for (int k = 0; k < 5; ++k) {
    scales[k].src = srcs[field_of[k]];
    scales[k].box = boxes[k];
    scales[k].band_lo = bands[k][0];
    scales[k].band_hi = bands[k][1];
    scales[k].n_samples = 20000;
    scales[k].seed = 1;
  }
  auto rep = obstruction_scan(scales);
  require(rep.scales.size() == 5, "scale sweep incomplete");
  require(rep.ratios_increasing,
          note("sharpness ratios not strictly increasing: %.3e %.3e %.3e %.3e %.3e",
               rep.scales[0].sup_ratio, rep.scales[1].sup_ratio, rep.scales[2].sup_ratio,
               rep.scales[3].sup_ratio, rep.scales[4].sup_ratio));
  double cand = std::abs(rep.candidate);
  require(cand <= 2 * 0.00025,
          note("extrapolated pinch point %.2e away from origin (cap 5e-4)", cand));
  return note("flags %zu/%zu/%zu, ratios %.2e .. %.2e over 5 scales, pinch offset %.1e",
              flags[0], flags[1], flags[2], rep.scales[0].sup_ratio,
              rep.scales[4].sup_ratio, cand);
}

std::string c8_expansion_bound() {
  auto cert = hyperbolicity_certificate(Polynomial::parse("0 0 1"));
  require(cert.hyperbolic, "critical-orbit certificate failed for the squaring map");
  // Interior-anchored cloud: distances measured to it overestimate slightly,
  // keeping the one-step expansion factor just below the degree.
  auto sq = make_sources("0 0 1", {0.25, 0}, 13);
  auto rep = hyperbolic_bound(sq->p, sq->src.dist, {-1.15, -1.15, 0.0023, 1001, 1001},
                              0.01, 0.1, 20000, 1);
  require(rep.b_hat >= 1.98 && rep.b_hat <= 2.0,
          note("expansion factor %.5f outside [1.98, 2.0]", rep.b_hat));
  require(rep.c_bound >= 0.985 && rep.c_bound <= 1.0,
          note("exponent bound %.5f outside [0.985, 1.0]", rep.c_bound));
  auto scan = scan_obstructions(sq->src, {-1.2, -1.2, 0.005, 481, 481}, 0.5, 0.01, 0.1, 4);
  require(scan.cells_tested > 10000, "scan band unexpectedly small");
  require(scan.flagged.empty(),
          note("%zu cells flagged at c=0.5 despite the expansion bound",
               scan.flagged.size()));
  return note("b_hat %.4f, c bound %.4f, cross-scan 0/%zu cells", rep.b_hat, rep.c_bound,
              scan.cells_tested);
}

std::string c9_boundary_ball_coverage() {
  // Squaring map at half the measured threshold.
  auto sq = make_sources("0 0 1", {4, 0}, 14);
  double c_sq = (g_cstar_squaring ? *g_cstar_squaring : [&] {
    auto r = find_c_star(sq->src, {-2.2, -2.2, 0.01, 441, 441}, kLadder, 0.02, 1.0, 4);
    require(r.c_star.has_value(), "no threshold available for the squaring map");
    return *r.c_star;
  }()) / 2.0;
  for (double r : {0.1, 0.05}) {
    double frac = boundary_ball_check(sq->src, sq->cloud.pts, c_sq, r, 64, 9,
                                       sq->cloud.resolution, 4);
    require(frac == 1.0, note("coverage %.6f < 1 at r=%.2f (squaring)", frac, r));
  }
  auto bas = make_sources("-1 0 1", {2, 0}, 14);
  double c_bas = (g_cstar_basilica ? *g_cstar_basilica : [&] {
    auto deep = make_sources("-1 0 1", {2, 0}, 18);
    auto r = find_c_star(deep->src, {-2.2, -2.2, 0.01, 441, 441}, kLadder, 0.02, 1.0, 4);
    require(r.c_star.has_value(), "no threshold available for the basilica");
    return *r.c_star;
  }()) / 2.0;
  double worst = 1.0;
  for (double r : {0.1, 0.05}) {
    double frac = boundary_ball_check(bas->src, bas->cloud.pts, c_bas, r, 64, 9,
                                       bas->cloud.resolution, 4);
    worst = std::min(worst, frac);
    require(frac >= 0.999, note("coverage %.6f < 0.999 at r=%.2f (basilica)", frac, r));
  }
  return note("squaring coverage 1.0 at both radii; basilica worst %.6f (c=%.2f)", worst,
              c_bas);
}

// ------------------------------------------------------- reproducibility ---

int run_cli(const std::string& args) {
  std::string cmd = std::string("\"") + LSJULIA_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return rc == -1 ? -1 : WEXITSTATUS(rc);
}

std::map<std::string, std::string> dir_contents(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[fs::relative(e.path(), root).string()] = ss.str();
  }
  return out;
}

std::string c10_worker_determinism() {
  struct Case {
    const char* name;
    std::string args;
  };
  const std::vector<Case> cases = {
      {"green", "green --poly \"-1 0 1\" --grid -1.8,-1.2,0.05,73,49"},
      {"boundary", "boundary --poly \"0 0 1\" --base 4,0 --depth 6 --mode full"},
      {"scan",
       "scan --poly \"0 0 1\" --grid -1.3,-1.3,0.02,131,131 --c 0.99 --guard 0.02 "
       "--base 2,0 --depth 8"},
      {"fit",
       "fit --poly \"0 0 1\" --box -2.5,-2.5,0.05,101,101 --band 0.05,0.5 --samples 500 "
       "--seed 1 --base 4,0 --depth 10"},
      {"obstruct",
       "obstruct --poly \"0 0 1\" --box -1.3,-1.3,0.013,201,201 --scale 0.05,0.1 "
       "--scale 0.025,0.05 --samples 500 --seed 1 --base 4,0 --depth 10"},
      {"envelope",
       "envelope --grid -2.1,-2.1,0.105,41,41 --a-disk 0,0,0.5 --u-disk 0,0,2 --z 1.05,0 "
       "--ndiscs 100 --seed 3"},
      {"relation", "relation --poly \"0 0 1\" --grid -1.7,-1.7,0.02,171,171 --a 0.3"},
      {"corona",
       "corona --poly \"0 0 1\" --grid -4.3,-4.3,0.05,173,173 --a 1.3862943611198906 "
       "--ell 0.2 --base 4,0 --depth 10"},
      {"hyperbolic",
       "hyperbolic --poly \"0 0 1\" --box -1.15,-1.15,0.0023,1001,1001 --band 0.01,0.1 "
       "--samples 2000 --seed 1 --base 4,0 --depth 10"},
      {"counterexample",
       "counterexample --grid -4.2,-4.2,0.02,421,421 --a-disk -1,0,1 --a-disk 1,0,1 "
       "--u-disk 0,0,4 --window -0.4,-0.4,0.005,161,161 --c-list 0.5,0.45 "
       "--guards 0.02,0.01 --bands 0.06,0.12 --bands 0.03,0.06 --obox -0.12,0.3,0.12,0.52 "
       "--obox -0.1,0.22,0.1,0.36 --samples 400 --seed 1 --tol 1e-10 --max-sweeps 400000"},
  };
  fs::path root = "/tmp/lsjulia_acceptance_repro";
  fs::remove_all(root);
  fs::create_directories(root);
  for (const auto& c : cases) {
    fs::path a = root / (std::string(c.name) + "_w1");
    fs::path b = root / (std::string(c.name) + "_w4");
    int ra = run_cli(c.args + " --workers 1 --out " + a.string());
    require(ra == 0, note("%s exited %d with 1 worker", c.name, ra));
    int rb = run_cli(c.args + " --workers 4 --out " + b.string());
    require(rb == 0, note("%s exited %d with 4 workers", c.name, rb));
    auto ca = dir_contents(a);
    auto cb = dir_contents(b);
    require(!ca.empty(), note("%s produced no files", c.name));
    require(ca.size() == cb.size(), note("%s: file sets differ", c.name));
    for (auto& [rel, bytes] : ca) {
      auto it = cb.find(rel);
      require(it != cb.end(), note("%s: %s missing in second run", c.name, rel.c_str()));
      require(it->second == bytes,
              note("%s: %s differs between worker counts", c.name, rel.c_str()));
    }
  }
  return note("%zu subcommands byte-identical across worker counts", cases.size());
}

}  // namespace

int main() {
  std::printf("acceptance checks (library + %s)\n", LSJULIA_CLI_PATH);
  criterion(1, "escape-rate field matches the closed form", c1_field_closed_form);
  criterion(2, "pullback invariance of the escape rate", c2_invariance);
  criterion(3, "preimage clouds equidistribute toward the field measure", c3_equidistribution);
  criterion(4, "level-set relaxation reproduces the field", c4_level_set_relation);
  criterion(5, "disc envelope agrees with relaxation on the annulus", c5_disc_envelope_annulus);
  criterion(6, "threshold ladder: stable verdicts, analytic bracket", c6_threshold_ladder);
  criterion(7, "tangent-disk channel sharpens across scales", c7_tangent_disk_scales);
  criterion(8, "expansion factor bounds the comparison exponent", c8_expansion_bound);
  criterion(9, "boundary balls contain compliant points", c9_boundary_ball_coverage);
  criterion(10, "worker count never changes output bytes", c10_worker_determinism);
  if (g_failures == 0)
    std::printf("acceptance: all 10 criteria passed\n");
  else
    std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
  return g_failures;
}
