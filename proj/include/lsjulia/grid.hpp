#pragma once
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lsjulia/polynomial.hpp"

namespace lsjulia {

// Uniform cell-centered grid: cell (ix, iy) has center
// (x0 + ix*h, y0 + iy*h), 0 <= ix < nx, 0 <= iy < ny.
struct GridSpec {
  double x0 = 0, y0 = 0, h = 0;
  int nx = 0, ny = 0;

  std::size_t size() const { return std::size_t(nx) * std::size_t(ny); }
  std::size_t idx(int ix, int iy) const { return std::size_t(iy) * nx + ix; }
  cplx center(int ix, int iy) const { return {x0 + ix * h, y0 + iy * h}; }
  bool contains(int ix, int iy) const { return ix >= 0 && ix < nx && iy >= 0 && iy < ny; }
  // Cell whose center is nearest to z (rounded); may be out of range.
  void locate(cplx z, int& ix, int& iy) const;

  // Parses "x0,y0,h,nx,ny". Throws precondition_error on malformed input,
  // h <= 0, nx/ny <= 0, or nx*ny too large to allocate sanely.
  static GridSpec parse(const std::string& text);
  std::string format() const;

  bool operator==(const GridSpec&) const = default;
};

// Scalar field on a grid.
struct ScalarField {
  GridSpec grid;
  std::vector<double> v;  // grid.size() values, row-major by iy

  double at(int ix, int iy) const { return v[grid.idx(ix, iy)]; }
  double& at(int ix, int iy) { return v[grid.idx(ix, iy)]; }
  // Bilinear interpolation on cell centers; clamps to the grid hull.
  double interp(cplx z) const;
};

// Boolean cell set on a grid (0/1 per cell).
struct CellSet {
  GridSpec grid;
  std::vector<uint8_t> in;

  bool at(int ix, int iy) const { return in[grid.idx(ix, iy)] != 0; }
  std::size_t count() const;
};

CellSet cells_where(const GridSpec& grid, const std::function<bool(cplx)>& pred);

// Cells whose center lies within distance ell of a set, per its distance
// function (dist_fn(center) <= ell). ell >= 0 required.
CellSet dilate_cells(const GridSpec& grid, const std::function<double(cplx)>& dist_fn,
                     double ell);

}  // namespace lsjulia
