#include "lsjulia/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include "lsjulia/errors.hpp"
#include "lsjulia/parallel.hpp"
#include "lsjulia/rng.hpp"

namespace lsjulia {

void RegionMask::validate() const {
  if (in_a.size() != grid.size() || in_u.size() != grid.size())
    throw precondition_error("region mask: size mismatch with grid");
  std::size_t na = 0;
  for (std::size_t i = 0; i < in_a.size(); ++i) {
    if (in_a[i] && !in_u[i])
      throw precondition_error("region mask: compact must be contained in the open region");
    na += in_a[i] != 0;
  }
  if (na == 0) throw precondition_error("region mask: compact is empty");
  bool any_outside = false;
  for (auto u : in_u) any_outside |= (u == 0);
  if (!any_outside && !(grid.nx > 2 && grid.ny > 2))
    throw precondition_error("region mask: open region covers the whole grid");
}

RelaxResult relax_relative_green(const RegionMask& mask, const RelaxOptions& opt,
                                 const std::vector<double>* outer) {
  mask.validate();
  const GridSpec& g = mask.grid;
  if (outer && outer->size() != g.size())
    throw precondition_error("relax: outer value array size mismatch");

  RelaxResult res;
  res.field.grid = g;
  auto& v = res.field.v;
  v.assign(g.size(), 0.0);
  std::vector<uint8_t> free_cell(g.size(), 0);
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      std::size_t i = g.idx(ix, iy);
      if (mask.in_a[i]) {
        v[i] = -1.0;
      } else if (!mask.in_u[i]) {
        v[i] = outer ? (*outer)[i] : 0.0;
      } else {
        free_cell[i] = 1;
      }
    }

  const double omega = 2.0 / (1.0 + std::sin(3.141592653589793 / std::max(g.nx, g.ny)));
  const int workers = std::max(1, opt.workers);

  // Red-black sweeps: cells of one parity only read the other parity, so rows
  // can be relaxed concurrently with bitwise-reproducible results.
  auto neighbor = [&](int ix, int iy) -> double {
    if (ix < 0 || ix >= g.nx || iy < 0 || iy >= g.ny) return 0.0;
    return v[g.idx(ix, iy)];
  };

  double sweep_update = 0.0;
  std::mutex mu;
  for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
    sweep_update = 0.0;
    for (int color = 0; color < 2; ++color) {
      parallel_for(std::size_t(g.ny), workers, [&](std::size_t ylo, std::size_t yhi) {
        double local = 0.0;
        for (std::size_t iy = ylo; iy < yhi; ++iy) {
          int x0 = (int(iy) + color) & 1;
          for (int ix = x0; ix < g.nx; ix += 2) {
            std::size_t i = g.idx(ix, int(iy));
            if (!free_cell[i]) continue;
            double avg = 0.25 * (neighbor(ix + 1, int(iy)) + neighbor(ix - 1, int(iy)) +
                                 neighbor(ix, int(iy) + 1) + neighbor(ix, int(iy) - 1));
            double tgt = std::min(0.0, avg);
            double nv = std::clamp(v[i] + omega * (tgt - v[i]), -1.0, 0.0);
            local = std::max(local, std::abs(nv - v[i]));
            v[i] = nv;
          }
        }
        std::lock_guard<std::mutex> lk(mu);
        sweep_update = std::max(sweep_update, local);
      });
    }
    res.sweeps = sweep + 1;
    res.final_update = sweep_update;
    if (sweep_update < opt.tol) return res;
  }
  throw convergence_error("relax: not converged after " + std::to_string(opt.max_sweeps) +
                              " sweeps",
                          sweep_update);
}

namespace {

struct AnnulusProbe {
  bool ok = false;
  cplx q;                       // local annulus center
  double r_loc = 0, R_loc = 0;  // inner/outer radii
};

// Probes the masks for an annulus around the compact component nearest z:
// chord-march through A for the center and inner radius, ray-march to the
// region boundary for the outer radius.
AnnulusProbe probe_annulus(const RegionMask& mask, cplx z) {
  const GridSpec& g = mask.grid;
  AnnulusProbe pr;
  auto cell_in_a = [&](cplx w) {
    int ix, iy;
    g.locate(w, ix, iy);
    return g.contains(ix, iy) && mask.in_a[g.idx(ix, iy)];
  };
  auto cell_in_u = [&](cplx w) {
    int ix, iy;
    g.locate(w, ix, iy);
    return g.contains(ix, iy) && mask.in_u[g.idx(ix, iy)];
  };

  double bestd = std::numeric_limits<double>::infinity();
  cplx omega;
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix)
      if (mask.in_a[g.idx(ix, iy)]) {
        double d = std::abs(g.center(ix, iy) - z);
        if (d < bestd) {
          bestd = d;
          omega = g.center(ix, iy);
        }
      }
  if (!std::isfinite(bestd) || bestd == 0.0) return pr;

  cplx dir = (omega - z) / bestd;
  const double step = 0.5 * g.h;
  const double reach = std::hypot(g.nx * g.h, g.ny * g.h);
  auto march_while_a = [&](cplx from, cplx d) {
    cplx w = from;
    double t = 0;
    while (t < reach && cell_in_a(w + d * step)) {
      w += d * step;
      t += step;
    }
    return w;
  };
  cplx far_end = march_while_a(omega, dir);
  cplx near_end = march_while_a(omega, -dir);
  pr.q = 0.5 * (far_end + near_end);
  pr.r_loc = 0.5 * std::abs(far_end - near_end);

  double rmin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 32; ++k) {
    double ang = 6.283185307179586477 * (k + 0.5) / 32.0;
    cplx d{std::cos(ang), std::sin(ang)};
    cplx w = pr.q;
    double t = 0;
    while (t < reach && cell_in_u(w + d * step)) {
      w += d * step;
      t += step;
    }
    rmin = std::min(rmin, t);
  }
  pr.R_loc = rmin - g.h;

  double lz = std::abs(z - pr.q);
  pr.ok = pr.r_loc >= 2.0 * g.h && pr.R_loc > 1.05 * pr.r_loc &&
          lz > 1.02 * pr.r_loc && lz < 0.98 * pr.R_loc;
  return pr;
}

// Conformal vertical-strip coordinate of the unit disk: Re s in (-1, 1).
cplx strip(cplx w) {
  return cplx{0, 2.0 / 3.141592653589793} * std::log((1.0 + w) / (1.0 - w));
}

// Annulus-cover disc through z: t in closed unit disk -> q + (z-q)*exp(...),
// image pinned inside {rp < |w-q| < Rp}, h(0) = z exactly.
struct CoverMap {
  cplx q, zq;     // zq = z - q
  cplx a;         // Mobius parameter on the imaginary axis
  cplx sa;        // strip(a)
  double beta;    // half-width of the log-annulus
  double u, rot;  // shrink factor and rotation jitter

  cplx operator()(cplx t) const {
    cplx w = u * t * std::polar(1.0, rot);
    cplx m = (w + a) / (1.0 + std::conj(a) * w);
    return q + zq * std::exp(beta * (strip(m) - sa));
  }
};

CoverMap make_cover(cplx z, const AnnulusProbe& pr, double u, double kappa, double rot,
                    double grid_h) {
  CoverMap cm;
  cm.q = pr.q;
  cm.zq = z - pr.q;
  cm.u = u;
  cm.rot = rot;
  double lz = std::abs(cm.zq);
  double rp = std::max(1e-12, kappa * pr.r_loc);
  double Rp = std::max(rp * 1.05, pr.R_loc - grid_h);
  double alpha = 0.5 * (std::log(rp) + std::log(Rp));
  cm.beta = 0.5 * (std::log(Rp) - std::log(rp));
  double x = std::clamp((alpha - std::log(lz)) / cm.beta, -0.999, 0.999);
  cm.a = cplx{0.0, std::tan(0.25 * 3.141592653589793 * x)};
  cm.sa = strip(cm.a);
  return cm;
}

}  // namespace

PoletskyResult poletsky_estimate(const RegionMask& mask, cplx z,
                                 const PoletskyOptions& opt) {
  mask.validate();
  const GridSpec& g = mask.grid;
  int zx, zy;
  g.locate(z, zx, zy);
  if (!g.contains(zx, zy) || !mask.in_u[g.idx(zx, zy)])
    throw precondition_error("disc estimate: evaluation point must lie in the open region");

  PoletskyResult out;
  if (mask.in_a[g.idx(zx, zy)]) {
    out.estimate = -1.0;
    out.best.valid = true;
    out.best.fraction = 1.0;
    return out;
  }

  // Distance from z to the complement of U, for the Gaussian coefficient scale.
  double du = std::numeric_limits<double>::infinity();
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix)
      if (!mask.in_u[g.idx(ix, iy)])
        du = std::min(du, std::abs(g.center(ix, iy) - z));
  if (!std::isfinite(du)) du = 0.5 * std::hypot(g.nx * g.h, g.ny * g.h);

  const AnnulusProbe probe = probe_annulus(mask, z);

  // A candidate disc is scored by the fraction of its boundary landing in A,
  // and is admissible only if the whole sampled image keeps a one-cell margin
  // inside U. Validity spot-checks a polar net; boundary fraction uses
  // midpoint quadrature.
  auto evaluate = [&](auto&& hmap, DiscSample& ds) {
    for (int i = 0; i < opt.net_radii; ++i) {
      double rho = double(i + 1) / opt.net_radii;
      for (int j = 0; j < opt.net_angles; ++j) {
        double ang = 6.283185307179586477 * j / opt.net_angles;
        cplx w = hmap(std::polar(rho, ang));
        int ix, iy;
        g.locate(w, ix, iy);
        if (!g.contains(ix, iy) || !mask.in_u[g.idx(ix, iy)]) return;
        if (ix == 0 || ix + 1 == g.nx || iy == 0 || iy + 1 == g.ny) return;
        if (!mask.in_u[g.idx(ix + 1, iy)] || !mask.in_u[g.idx(ix - 1, iy)] ||
            !mask.in_u[g.idx(ix, iy + 1)] || !mask.in_u[g.idx(ix, iy - 1)])
          return;
      }
    }
    int hits = 0;
    for (int k = 0; k < opt.boundary_samples; ++k) {
      double ang = 6.283185307179586477 * (k + 0.5) / opt.boundary_samples;
      cplx w = hmap(std::polar(1.0, ang));
      int ix, iy;
      g.locate(w, ix, iy);
      if (g.contains(ix, iy) && mask.in_a[g.idx(ix, iy)]) ++hits;
    }
    ds.valid = true;
    ds.fraction = double(hits) / opt.boundary_samples;
  };

  std::vector<DiscSample> samples(std::size_t(std::max(0, opt.n_discs)));
  parallel_for(samples.size(), opt.workers, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      Rng rng(opt.seed, i);
      DiscSample& ds = samples[i];
      bool use_cover = probe.ok && (i % 2 == 1);
      if (use_cover) {
        ds.is_cover = true;
        ds.q = probe.q;
        ds.r_loc = probe.r_loc;
        ds.R_loc = probe.R_loc;
        ds.u = rng.uniform(0.985, 0.999);
        double lz = std::abs(z - probe.q);
        double kmax = std::min(1.0, 0.98 * lz / probe.r_loc);
        ds.kappa = rng.uniform(0.85 * kmax, kmax);
        ds.rot = rng.uniform(0.0, 6.283185307179586477);
        CoverMap cm = make_cover(z, probe, ds.u, ds.kappa, ds.rot, g.h);
        evaluate(cm, ds);
      } else {
        ds.poly_coeffs.resize(std::size_t(std::max(1, opt.max_degree)));
        double sigma = opt.radius_scale * du;
        for (auto& c : ds.poly_coeffs) c = sigma * rng.gaussian_complex();
        auto hmap = [&](cplx t) {
          cplx acc{0, 0};
          for (std::size_t k = ds.poly_coeffs.size(); k-- > 0;)
            acc = (acc + ds.poly_coeffs[k]) * t;
          return z + acc;
        };
        evaluate(hmap, ds);
      }
    }
  });

  out.n_total = int(samples.size());
  double run = 0.0;  // constant disc baseline: boundary stays at z, outside A
  std::size_t best_idx = std::numeric_limits<std::size_t>::max();
  auto is_checkpoint = [&](int count) {
    if (count == out.n_total) return true;
    for (int c : {1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000, 20000, 50000})
      if (count == c) return true;
    return false;
  };
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].valid) {
      ++out.n_valid;
      double val = -samples[i].fraction;
      if (val < run) {
        run = val;
        best_idx = i;
      }
    }
    if (is_checkpoint(int(i) + 1)) out.curve.emplace_back(int(i) + 1, run);
  }
  out.estimate = run;
  if (best_idx != std::numeric_limits<std::size_t>::max()) out.best = samples[best_idx];
  return out;
}

namespace {

void require_level_set_compact(const GreenField& field, double a) {
  const GridSpec& g = field.grid;
  for (int ix = 0; ix < g.nx; ++ix)
    if (field.at(ix, 0) < a || field.at(ix, g.ny - 1) < a)
      throw precondition_error("level set touches the grid edge; enlarge the grid");
  for (int iy = 0; iy < g.ny; ++iy)
    if (field.at(0, iy) < a || field.at(g.nx - 1, iy) < a)
      throw precondition_error("level set touches the grid edge; enlarge the grid");
}

}  // namespace

RelationReport check_relation_level_sets(const GreenField& field, double a,
                                         const RelaxOptions& opt) {
  if (!(a > 0)) throw precondition_error("relation check: level must be positive");
  require_level_set_compact(field, a);
  const GridSpec& g = field.grid;
  RegionMask mask{g, std::vector<uint8_t>(g.size(), 0), std::vector<uint8_t>(g.size(), 0)};
  for (std::size_t i = 0; i < g.size(); ++i) {
    mask.in_u[i] = field.value[i] < a ? 1 : 0;
    mask.in_a[i] = field.bounded[i];
  }
  RelaxResult r = relax_relative_green(mask, opt);

  RelationReport rep;
  rep.a = a;
  rep.sweeps = r.sweeps;
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      std::size_t i = g.idx(ix, iy);
      if (!mask.in_u[i]) continue;
      ++rep.cells_compared;
      double dev = std::abs(field.value[i] - a * (r.field.v[i] + 1.0));
      if (dev > rep.max_dev) {
        rep.max_dev = dev;
        rep.worst = g.center(ix, iy);
      }
    }
  return rep;
}

CoronaReport corona_delta(const GreenField& field, int degree,
                          const std::function<double(cplx)>& dist_fn, double a,
                          double ell, const RelaxOptions& opt) {
  if (!(a > 0)) throw precondition_error("corona: level must be positive");
  if (!(ell > 0)) throw precondition_error("corona: thickening must be positive");
  if (degree < 2) throw precondition_error("corona: degree must be >= 2");
  require_level_set_compact(field, a);
  const GridSpec& g = field.grid;
  const double ad = a / degree;

  RegionMask exact{g, std::vector<uint8_t>(g.size(), 0), std::vector<uint8_t>(g.size(), 0)};
  RegionMask thick = exact;
  std::vector<uint8_t> in_uad(g.size(), 0);
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      std::size_t i = g.idx(ix, iy);
      bool in_ua = field.value[i] < a;
      in_uad[i] = field.value[i] < ad ? 1 : 0;
      exact.in_u[i] = thick.in_u[i] = in_ua ? 1 : 0;
      exact.in_a[i] = field.bounded[i];
      bool thickened = dist_fn(g.center(ix, iy)) <= ell;
      if (thickened && !in_uad[i])
        throw precondition_error(
            "corona: thickened compact leaks out of the inner level set; reduce ell");
      thick.in_a[i] = thickened ? 1 : 0;
    }

  RelaxResult vK = relax_relative_green(exact, opt);
  RelaxResult vKl = relax_relative_green(thick, opt);

  CoronaReport rep;
  rep.a = a;
  rep.ell = ell;
  rep.sweeps_exact = vK.sweeps;
  rep.sweeps_thick = vKl.sweeps;
  rep.delta_hat = std::numeric_limits<double>::infinity();
  for (int iy = 0; iy < g.ny; ++iy)
    for (int ix = 0; ix < g.nx; ++ix) {
      std::size_t i = g.idx(ix, iy);
      if (!exact.in_u[i] || in_uad[i]) continue;  // corona = U_a minus U_{a/d}
      ++rep.corona_cells;
      double denom = vK.field.v[i] + 1.0;
      if (denom < 1e-12) continue;
      double ratio = (vKl.field.v[i] + 1.0) / denom;
      if (ratio < rep.delta_hat) {
        rep.delta_hat = ratio;
        rep.argmin = g.center(ix, iy);
      }
    }
  if (rep.corona_cells == 0) throw precondition_error("corona: empty corona; levels too close");
  if (!std::isfinite(rep.delta_hat)) rep.delta_hat = 0.0;
  return rep;
}

}  // namespace lsjulia
