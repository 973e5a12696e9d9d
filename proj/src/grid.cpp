#include "lsjulia/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "lsjulia/errors.hpp"

namespace lsjulia {

void GridSpec::locate(cplx z, int& ix, int& iy) const {
  ix = int(std::lround((z.real() - x0) / h));
  iy = int(std::lround((z.imag() - y0) / h));
}

GridSpec GridSpec::parse(const std::string& text) {
  GridSpec g;
  long nx = 0, ny = 0;
  char extra = 0;
  int got = std::sscanf(text.c_str(), "%lf,%lf,%lf,%ld,%ld%c", &g.x0, &g.y0, &g.h, &nx, &ny, &extra);
  if (got != 5) throw precondition_error("grid: expected 'x0,y0,h,nx,ny', got '" + text + "'");
  if (!(g.h > 0)) throw precondition_error("grid: step must be positive");
  if (nx <= 0 || ny <= 0 || nx * ny > (1L << 28))
    throw precondition_error("grid: cell counts out of range");
  g.nx = int(nx);
  g.ny = int(ny);
  return g;
}

std::string GridSpec::format() const {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%d,%d", x0, y0, h, nx, ny);
  return buf;
}

double ScalarField::interp(cplx z) const {
  double fx = (z.real() - grid.x0) / grid.h;
  double fy = (z.imag() - grid.y0) / grid.h;
  fx = std::clamp(fx, 0.0, double(grid.nx - 1));
  fy = std::clamp(fy, 0.0, double(grid.ny - 1));
  int ix = std::min(grid.nx - 2, int(fx)), iy = std::min(grid.ny - 2, int(fy));
  if (grid.nx == 1) ix = 0;
  if (grid.ny == 1) iy = 0;
  double tx = fx - ix, ty = fy - iy;
  if (grid.nx == 1) tx = 0;
  if (grid.ny == 1) ty = 0;
  int ix1 = std::min(ix + 1, grid.nx - 1), iy1 = std::min(iy + 1, grid.ny - 1);
  return (1 - tx) * (1 - ty) * at(ix, iy) + tx * (1 - ty) * at(ix1, iy) +
         (1 - tx) * ty * at(ix, iy1) + tx * ty * at(ix1, iy1);
}

std::size_t CellSet::count() const {
  std::size_t n = 0;
  for (auto v : in) n += (v != 0);
  return n;
}

CellSet cells_where(const GridSpec& grid, const std::function<bool(cplx)>& pred) {
  CellSet s{grid, std::vector<uint8_t>(grid.size(), 0)};
  for (int iy = 0; iy < grid.ny; ++iy)
    for (int ix = 0; ix < grid.nx; ++ix)
      s.in[grid.idx(ix, iy)] = pred(grid.center(ix, iy)) ? 1 : 0;
  return s;
}

CellSet dilate_cells(const GridSpec& grid, const std::function<double(cplx)>& dist_fn,
                     double ell) {
  if (ell < 0) throw precondition_error("dilate: negative thickness");
  return cells_where(grid, [&](cplx z) { return dist_fn(z) <= ell; });
}

}  // namespace lsjulia
