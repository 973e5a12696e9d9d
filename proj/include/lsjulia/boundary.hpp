#pragma once
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lsjulia/dynamics.hpp"
#include "lsjulia/green.hpp"

namespace lsjulia {

enum class CloudMode { full_tree, random_paths };

struct BoundaryCloud {
  std::vector<cplx> pts;
  cplx base;
  int depth = 0;
  CloudMode mode = CloudMode::full_tree;
  uint64_t seed = 0;        // random_paths only
  double resolution = 0.0;  // max over points of nearest-neighbor distance
};

// Iterated preimages of `base` under f, approximating the Julia boundary.
// full_tree: all d^depth preimages (capped at 2^22 nodes); random_paths: the
// endpoints of n_paths independent random backward orbits, one RNG substream
// per path. Rejects a base at a superattracting fixed point (its preimages
// never spread). Throws convergence_error if a root solve fails.
BoundaryCloud preimage_tree(const Polynomial& p, cplx base, int depth,
                            CloudMode mode, int n_paths = 0, uint64_t seed = 0,
                            int workers = 1);

// Exact nearest-neighbor queries over a fixed point cloud via uniform
// buckets (bucket side >= cloud resolution; expanding ring search).
class NearestIndex {
 public:
  explicit NearestIndex(std::vector<cplx> pts);  // >= 1 point required

  struct Hit {
    std::size_t index;
    double dist;
  };
  Hit query(cplx z) const;

  const std::vector<cplx>& points() const { return pts_; }
  // Max over points of distance to their nearest distinct neighbor
  // (0 for a single-point cloud).
  double resolution() const { return resolution_; }

 private:
  void build(double side);
  Hit nearest(cplx z, std::size_t skip) const;
  std::vector<cplx> pts_;
  double resolution_ = 0.0;
  double side_ = 1.0;
  double minx_ = 0.0, miny_ = 0.0;
  int cx_ = 1, cy_ = 1;
  // Bucket table in offset form: bucket b holds point indices
  // items_[offsets_[b] .. offsets_[b+1]). Ring scans over empty buckets then
  // read a contiguous int array instead of chasing per-bucket allocations.
  std::vector<uint32_t> offsets_;
  std::vector<uint32_t> items_;
};

// Distance to the filled set: 0 if the orbit of z stays bounded, else the
// nearest-cloud distance. The cloud's resolution is the trust floor:
// distances at or below it are grid noise.
double dist_to_filled(const Polynomial& p, const NearestIndex& boundary, cplx z,
                      const EscapeParams& params);

struct MomentReport {
  int max_total_degree = 0;
  double max_abs_dev = 0.0;  // worst |cloud moment - measure moment|
  struct Entry {
    int j, k;
    cplx cloud_moment, measure_moment;
  };
  std::vector<Entry> entries;
};

// Compares cloud averages of z^j conj(z)^k against the measure's moments for
// all j + k <= max_total_degree, (j,k) != (0,0).
MomentReport equidistribution_report(const BoundaryCloud& cloud,
                                     const DiscreteMeasure& measure,
                                     int max_total_degree = 4);

// Fraction of cloud points whose rho-ball contains at least one bounded-orbit
// sample (samples_per_ball uniform draws, substream per point).
double interior_density_check(const Polynomial& p, const BoundaryCloud& cloud,
                              double rho, int samples_per_ball, uint64_t seed,
                              const EscapeParams& params, int workers = 1);

}  // namespace lsjulia
