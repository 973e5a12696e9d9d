#include "lsjulia/boundary.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "lsjulia/errors.hpp"
#include "lsjulia/parallel.hpp"
#include "lsjulia/rng.hpp"

namespace lsjulia {

namespace {

// f(z) = w as a root problem: subtract w from the constant term.
std::vector<cplx> preimages(const Polynomial& p, cplx w) {
  std::vector<cplx> c = p.coeffs();
  c[0] -= w;
  return roots(Polynomial(std::move(c)));
}

}  // namespace

BoundaryCloud preimage_tree(const Polynomial& p, cplx base, int depth, CloudMode mode,
                            int n_paths, uint64_t seed, int workers) {
  const int d = p.degree();
  if (d < 2) throw precondition_error("preimage_tree: degree must be >= 2");
  if (depth < 1) throw precondition_error("preimage_tree: depth must be >= 1");

  // A superattracting fixed point is its own entire preimage history.
  {
    cplx pv, dv;
    p.eval2(base, pv, dv);
    if (std::abs(pv - base) < 1e-12 && std::abs(dv) < 1e-12)
      throw precondition_error("preimage_tree: base is a superattracting fixed point");
  }

  BoundaryCloud cloud;
  cloud.base = base;
  cloud.depth = depth;
  cloud.mode = mode;
  cloud.seed = seed;

  if (mode == CloudMode::full_tree) {
    double count = std::pow(double(d), double(depth));
    if (count > double(1 << 22))
      throw precondition_error("preimage_tree: full tree exceeds 2^22 nodes");
    std::vector<cplx> level{base};
    for (int k = 0; k < depth; ++k) {
      std::vector<cplx> next(level.size() * d);
      parallel_for(level.size(), workers, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
          std::vector<cplx> rs = preimages(p, level[i]);
          for (int j = 0; j < d; ++j) next[i * d + j] = rs[j];
        }
      });
      level.swap(next);
    }
    cloud.pts = std::move(level);
  } else {
    if (n_paths < 1) throw precondition_error("preimage_tree: random mode needs n_paths >= 1");
    cloud.pts.assign(std::size_t(n_paths), cplx{});
    parallel_for(std::size_t(n_paths), workers, [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        Rng rng(seed, i);
        cplx w = base;
        for (int k = 0; k < depth; ++k) {
          std::vector<cplx> rs = preimages(p, w);
          w = rs[rng.below(uint64_t(d))];
        }
        cloud.pts[i] = w;
      }
    });
  }

  if (cloud.pts.size() >= 2) {
    NearestIndex idx(cloud.pts);
    cloud.resolution = idx.resolution();
  }
  return cloud;
}

NearestIndex::NearestIndex(std::vector<cplx> pts) : pts_(std::move(pts)) {
  if (pts_.empty()) throw precondition_error("nearest index: empty cloud");
  for (cplx p : pts_)
    if (!std::isfinite(p.real()) || !std::isfinite(p.imag()))
      throw precondition_error("nearest index: non-finite point");
  minx_ = pts_[0].real();
  miny_ = pts_[0].imag();
  for (cplx p : pts_) {
    minx_ = std::min(minx_, p.real());
    miny_ = std::min(miny_, p.imag());
  }
  double maxx = minx_, maxy = miny_;
  for (cplx p : pts_) {
    maxx = std::max(maxx, p.real());
    maxy = std::max(maxy, p.imag());
  }
  double diag = std::hypot(maxx - minx_, maxy - miny_);
  build(std::max(1e-12, diag / std::max(1.0, std::sqrt(double(pts_.size())))));

  if (pts_.size() >= 2) {
    // Resolution = max over points of the distance to the nearest *other*
    // point; queries are read-only, so the scan parallelizes and the max is
    // schedule-independent.
    int threads = int(std::min<unsigned>(8, std::max<unsigned>(1, std::thread::hardware_concurrency())));
    std::vector<double> worst(std::size_t(threads), 0.0);
    std::atomic<int> slot{0};
    parallel_for(pts_.size(), threads, [&](std::size_t lo, std::size_t hi) {
      int my = slot.fetch_add(1);
      double w = 0.0;
      for (std::size_t i = lo; i < hi; ++i)
        w = std::max(w, nearest(pts_[i], i).dist);
      worst[std::size_t(my)] = std::max(worst[std::size_t(my)], w);
    });
    for (double w : worst) resolution_ = std::max(resolution_, w);
    // Bucket invariant: side >= resolution keeps the ring search short.
    if (side_ < resolution_) build(resolution_);
  }
}

void NearestIndex::build(double side) {
  side_ = std::max(side, 1e-12);
  double maxx = minx_, maxy = miny_;
  for (cplx p : pts_) {
    maxx = std::max(maxx, p.real());
    maxy = std::max(maxy, p.imag());
  }
  cx_ = std::max(1, int((maxx - minx_) / side_) + 1);
  cy_ = std::max(1, int((maxy - miny_) / side_) + 1);
  // Cap the table so sparse spreads cannot blow memory; a larger side keeps
  // the search exact, only slower.
  while (double(cx_) * double(cy_) > 4.0 * double(pts_.size()) + 64.0) {
    side_ *= 2.0;
    cx_ = std::max(1, int((maxx - minx_) / side_) + 1);
    cy_ = std::max(1, int((maxy - miny_) / side_) + 1);
  }
  std::size_t nb = std::size_t(cx_) * cy_;
  std::vector<uint32_t> bucket_of(pts_.size());
  offsets_.assign(nb + 1, 0);
  for (std::size_t i = 0; i < pts_.size(); ++i) {
    int gx = std::clamp(int(std::floor((pts_[i].real() - minx_) / side_)), 0, cx_ - 1);
    int gy = std::clamp(int(std::floor((pts_[i].imag() - miny_) / side_)), 0, cy_ - 1);
    bucket_of[i] = uint32_t(std::size_t(gy) * cx_ + gx);
    ++offsets_[bucket_of[i] + 1];
  }
  for (std::size_t b = 0; b < nb; ++b) offsets_[b + 1] += offsets_[b];
  items_.assign(pts_.size(), 0);
  std::vector<uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t i = 0; i < pts_.size(); ++i) items_[fill[bucket_of[i]]++] = uint32_t(i);
}

NearestIndex::Hit NearestIndex::nearest(cplx z, std::size_t skip) const {
  int pcx = std::clamp(int(std::floor((z.real() - minx_) / side_)), 0, cx_ - 1);
  int pcy = std::clamp(int(std::floor((z.imag() - miny_) / side_)), 0, cy_ - 1);
  // Distance from z to its clamped cell's box (0 inside the hull). For any
  // point q in a Chebyshev-ring-r cell, |z - q| >= (r-1)*side - excess.
  double bx0 = minx_ + pcx * side_, by0 = miny_ + pcy * side_;
  double ex = std::max({0.0, bx0 - z.real(), z.real() - (bx0 + side_)});
  double ey = std::max({0.0, by0 - z.imag(), z.imag() - (by0 + side_)});
  double excess = std::hypot(ex, ey);

  Hit best{0, std::numeric_limits<double>::infinity()};
  auto visit = [&](int gx, int gy) {
    std::size_t b = std::size_t(gy) * cx_ + gx;
    if (offsets_[b] == offsets_[b + 1]) return;
    // Skip the bucket when its box provably holds nothing closer than the
    // incumbent. The 1e-12 relative slack absorbs the rounding of the
    // squared bound, so pruning never discards a genuinely closer point;
    // distances of surviving candidates use the same |.| as callers do.
    double bx0 = minx_ + gx * side_, by0 = miny_ + gy * side_;
    double ddx = std::max({0.0, bx0 - z.real(), z.real() - (bx0 + side_)});
    double ddy = std::max({0.0, by0 - z.imag(), z.imag() - (by0 + side_)});
    if (ddx * ddx + ddy * ddy > best.dist * best.dist * (1.0 + 1e-12)) return;
    for (uint32_t k = offsets_[b]; k < offsets_[b + 1]; ++k) {
      uint32_t j = items_[k];
      if (std::size_t(j) == skip) continue;
      double dist = std::abs(pts_[j] - z);
      if (dist < best.dist || (dist == best.dist && j < best.index)) {
        best.dist = dist;
        best.index = j;
      }
    }
  };
  const int max_ring = cx_ + cy_ + 2;  // rings beyond this cover no cells
  for (int ring = 0; ring <= max_ring; ++ring) {
    if (ring > 0 && double(ring - 1) * side_ - excess >= best.dist) break;
    // Perimeter cells only, with the loop bounds clamped to the table so
    // rings that mostly hang off the grid cost O(overlap), not O(ring).
    int dylo = std::max(-ring, -pcy), dyhi = std::min(ring, cy_ - 1 - pcy);
    int dxlo = std::max(-ring, -pcx), dxhi = std::min(ring, cx_ - 1 - pcx);
    for (int dy = dylo; dy <= dyhi; ++dy) {
      int gy = pcy + dy;
      if (std::abs(dy) == ring) {
        // Full row of the ring: buckets are contiguous in the table, so an
        // empty stretch is detected with a single offset comparison.
        std::size_t b0 = std::size_t(gy) * cx_ + (pcx + dxlo);
        std::size_t b1 = std::size_t(gy) * cx_ + (pcx + dxhi);
        if (offsets_[b0] == offsets_[b1 + 1]) continue;
        for (int dx = dxlo; dx <= dxhi; ++dx) visit(pcx + dx, gy);
      } else {
        if (-ring >= -pcx) visit(pcx - ring, gy);
        if (ring <= cx_ - 1 - pcx) visit(pcx + ring, gy);
      }
    }
  }
  return best;
}

NearestIndex::Hit NearestIndex::query(cplx z) const {
  return nearest(z, std::numeric_limits<std::size_t>::max());
}

double dist_to_filled(const Polynomial& p, const NearestIndex& boundary, cplx z,
                      const EscapeParams& params) {
  if (in_filled_julia(p, z, params)) return 0.0;
  return boundary.query(z).dist;
}

MomentReport equidistribution_report(const BoundaryCloud& cloud,
                                     const DiscreteMeasure& measure,
                                     int max_total_degree) {
  if (cloud.pts.empty()) throw precondition_error("moments: empty cloud");
  MomentReport rep;
  rep.max_total_degree = max_total_degree;
  for (int j = 0; j <= max_total_degree; ++j)
    for (int k = 0; j + k <= max_total_degree; ++k) {
      if (j == 0 && k == 0) continue;
      cplx cm{0, 0};
      for (cplx z : cloud.pts) cm += std::pow(z, j) * std::pow(std::conj(z), k);
      cm /= double(cloud.pts.size());
      cplx mm{0, 0};
      const GridSpec& g = measure.grid;
      for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
          double mass = measure.mass[g.idx(ix, iy)];
          if (mass == 0) continue;
          cplx z = g.center(ix, iy);
          mm += mass * std::pow(z, j) * std::pow(std::conj(z), k);
        }
      rep.entries.push_back({j, k, cm, mm});
      rep.max_abs_dev = std::max(rep.max_abs_dev, std::abs(cm - mm));
    }
  return rep;
}

double interior_density_check(const Polynomial& p, const BoundaryCloud& cloud, double rho,
                              int samples_per_ball, uint64_t seed,
                              const EscapeParams& params, int workers) {
  if (!(rho > 0)) throw precondition_error("interior density: rho must be positive");
  if (samples_per_ball < 1) throw precondition_error("interior density: no samples");
  if (cloud.pts.empty()) throw precondition_error("interior density: empty cloud");
  std::atomic<std::size_t> hits{0};
  parallel_for(cloud.pts.size(), workers, [&](std::size_t lo, std::size_t hi) {
    std::size_t local = 0;
    for (std::size_t i = lo; i < hi; ++i) {
      Rng rng(seed, i);
      for (int s = 0; s < samples_per_ball; ++s) {
        cplx z = cloud.pts[i] + rho * rng.unit_disk();
        if (in_filled_julia(p, z, params)) {
          ++local;
          break;
        }
      }
    }
    hits += local;
  });
  return double(hits.load()) / double(cloud.pts.size());
}

}  // namespace lsjulia
