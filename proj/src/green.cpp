#include "lsjulia/green.hpp"

#include <cmath>
#include <mutex>

#include "lsjulia/errors.hpp"
#include "lsjulia/parallel.hpp"

namespace lsjulia {

namespace {

// f(w)/w^d as a polynomial in u = 1/w: a_d + a_{d-1} u + ... + a_0 u^d.
cplx reversed_eval(const Polynomial& p, cplx u) {
  const auto& a = p.coeffs();
  cplx acc = a.front();
  for (std::size_t i = 1; i < a.size(); ++i) acc = acc * u + a[i];
  return acc;
}

struct RawEval {
  GreenEval g;
  bool cleared_radius = false;  // orbit exceeded the certified escape radius
};

RawEval green_value_raw(const Polynomial& p, cplx z, const EscapeParams& params,
                        int series_terms) {
  const int d = p.degree();
  if (d < 2) throw precondition_error("green_value: degree must be >= 2");
  if (params.radius <= 0) throw precondition_error("green_value: escape radius not set");
  if (series_terms < 0) throw precondition_error("green_value: negative series terms");

  RawEval out;
  cplx w = z;
  int n = 0;
  bool overflowed = false;
  out.cleared_radius = std::abs(w) > params.radius;
  while (n < params.max_iterations && std::abs(w) <= params.big_radius) {
    cplx next = p.eval(w);
    ++n;
    if (!std::isfinite(next.real()) || !std::isfinite(next.imag())) {
      overflowed = true;  // escape is certain but the expansion anchor is lost
      break;
    }
    w = next;
    if (std::abs(w) > params.radius) out.cleared_radius = true;
  }
  if (std::abs(w) <= params.big_radius) {
    if (overflowed) out.cleared_radius = true;
    // No big-radius exit within the budget: value pinned to 0 with the
    // truncation bound sup G(w) / d^n over |w| <= big_radius.
    out.g.value = 0.0;
    out.g.escaped = false;
    out.g.escape_step = -1;
    const double slack = (std::abs(std::log(std::abs(p.leading()))) + 0.6931471805599453) /
                         (d - 1);
    out.g.error_bound =
        (std::log1p(params.big_radius) + slack) / std::pow(double(d), double(n));
    return out;
  }

  // N = first index with |f^N z| > big_radius.
  const int N = n;
  out.g.escaped = true;
  out.g.escape_step = N;

  double dn = std::pow(double(d), double(N));  // d^N, exact for d^N < 2^53
  double value = std::log(std::abs(w)) / dn;
  cplx u = 1.0 / w;
  for (int k = 0; k < series_terms; ++k) {
    dn *= d;
    cplx g = reversed_eval(p, u);
    value += std::log(std::abs(g)) / dn;
    // 1/f(w) = u^d / g(u); underflow of u^d is benign (g(0) = a_d exactly).
    cplx ud = std::pow(u, d);
    u = ud / g;
  }
  // Past the computed terms log|g(u_k)| ~ log|a_d|: add the geometric limit
  // in closed form. With dn = d^(N + series_terms), the neglected weights sum
  // to exactly 1/(dn*(d-1)); the first neglected deviation bounds the error.
  const double la = std::log(std::abs(p.leading()));
  const double tail_weight = 1.0 / (dn * (d - 1));
  value += la * tail_weight;
  double dev = std::abs(std::log(std::abs(reversed_eval(p, u))) - la);
  out.g.error_bound = dev * tail_weight + 4e-16 * (1.0 + std::abs(value));
  out.g.value = value;
  return out;
}

}  // namespace

GreenEval green_value(const Polynomial& p, cplx z, const EscapeParams& params,
                      int series_terms) {
  return green_value_raw(p, z, params, series_terms).g;
}

GreenField green_field(const Polynomial& p, const GridSpec& grid,
                       const EscapeParams& params, int series_terms, int workers) {
  GreenField f;
  f.grid = grid;
  f.value.assign(grid.size(), 0.0);
  f.bounded.assign(grid.size(), 0);
  double global_err = 0.0;
  std::mutex err_mu;

  parallel_for(grid.size(), workers, [&](std::size_t lo, std::size_t hi) {
    double werr = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      int ix = int(i % grid.nx), iy = int(i / grid.nx);
      RawEval r = green_value_raw(p, grid.center(ix, iy), params, series_terms);
      f.value[i] = r.g.value;
      f.bounded[i] = r.cleared_radius ? 0 : 1;
      werr = std::max(werr, r.g.error_bound);
    }
    std::lock_guard<std::mutex> lk(err_mu);  // max is schedule-independent
    global_err = std::max(global_err, werr);
  });
  f.max_error_bound = global_err;
  return f;
}

InvarianceReport check_invariance(const Polynomial& p, std::span<const cplx> pts,
                                  const EscapeParams& params, int series_terms) {
  InvarianceReport rep;
  rep.n = int(pts.size());
  const double d = p.degree();
  for (cplx z : pts) {
    double gz = green_value(p, z, params, series_terms).value;
    double gf = green_value(p, p.eval(z), params, series_terms).value;
    double dev = std::abs(gf - d * gz);
    if (dev > rep.max_dev) {
      rep.max_dev = dev;
      rep.worst = z;
    }
  }
  return rep;
}

DiscreteMeasure laplacian_measure(const GreenField& field) {
  const GridSpec& g = field.grid;
  if (g.nx < 3 || g.ny < 3) throw precondition_error("measure: grid too small");
  DiscreteMeasure m;
  m.grid = g;
  m.mass.assign(g.size(), 0.0);
  const double twopi = 6.283185307179586477;
  double positive = 0.0, clamped = 0.0;
  for (int iy = 1; iy + 1 < g.ny; ++iy)
    for (int ix = 1; ix + 1 < g.nx; ++ix) {
      double lap = field.at(ix + 1, iy) + field.at(ix - 1, iy) + field.at(ix, iy + 1) +
                   field.at(ix, iy - 1) - 4.0 * field.at(ix, iy);
      double mass = lap / twopi;
      if (mass < 0) {
        clamped -= mass;
        continue;
      }
      m.mass[g.idx(ix, iy)] = mass;
      positive += mass;
    }
  m.raw_total = positive - clamped;
  m.clamped_negative = clamped;
  if (std::abs(m.raw_total - 1.0) > 0.05)
    throw convergence_error("measure: grid captured mass " + std::to_string(m.raw_total) +
                                ", expected 1 within 5%",
                            std::abs(m.raw_total - 1.0));
  if (positive <= 0) throw convergence_error("measure: no positive mass");
  for (auto& v : m.mass) v /= positive;
  return m;
}

cplx green_gradient(const Polynomial& p, cplx z, double step, const EscapeParams& params,
                    int series_terms) {
  if (!(step > 0)) throw precondition_error("green_gradient: step must be positive");
  const cplx offs[5] = {{0, 0}, {step, 0}, {-step, 0}, {0, step}, {0, -step}};
  for (cplx o : offs)
    if (in_filled_julia(p, z + o, params))
      throw precondition_error("green_gradient: stencil touches the filled set");
  double gxp = green_value(p, z + offs[1], params, series_terms).value;
  double gxm = green_value(p, z + offs[2], params, series_terms).value;
  double gyp = green_value(p, z + offs[3], params, series_terms).value;
  double gym = green_value(p, z + offs[4], params, series_terms).value;
  return {(gxp - gxm) / (2 * step), (gyp - gym) / (2 * step)};
}

}  // namespace lsjulia
