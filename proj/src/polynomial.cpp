#include "lsjulia/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "lsjulia/errors.hpp"

namespace lsjulia {

Polynomial::Polynomial(std::vector<cplx> ascending_coeffs) : coeffs_(std::move(ascending_coeffs)) {
  while (!coeffs_.empty() && coeffs_.back() == cplx{0.0, 0.0}) coeffs_.pop_back();
  if (coeffs_.empty()) throw precondition_error("polynomial: all coefficients zero");
  for (auto c : coeffs_)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw precondition_error("polynomial: non-finite coefficient");
}

cplx Polynomial::eval(cplx z) const {
  cplx acc = coeffs_.back();
  for (std::size_t i = coeffs_.size() - 1; i-- > 0;) acc = acc * z + coeffs_[i];
  return acc;
}

void Polynomial::eval2(cplx z, cplx& p, cplx& dp) const {
  p = coeffs_.back();
  dp = {0.0, 0.0};
  for (std::size_t i = coeffs_.size() - 1; i-- > 0;) {
    dp = dp * z + p;
    p = p * z + coeffs_[i];
  }
}

Polynomial Polynomial::derivative() const {
  if (degree() == 0)
    throw precondition_error("derivative: constant polynomial has no representable derivative");
  std::vector<cplx> d(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = double(k) * coeffs_[k];
  return Polynomial(std::move(d));
}

Polynomial Polynomial::parse(const std::string& text) {
  std::istringstream in(text);
  std::vector<cplx> cs;
  std::string tok;
  while (in >> tok) {
    double re = 0, im = 0;
    auto comma = tok.find(',');
    try {
      std::size_t used = 0;
      if (comma == std::string::npos) {
        re = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
      } else {
        std::string a = tok.substr(0, comma), b = tok.substr(comma + 1);
        re = std::stod(a, &used);
        if (used != a.size()) throw std::invalid_argument(a);
        im = std::stod(b, &used);
        if (used != b.size()) throw std::invalid_argument(b);
      }
    } catch (const std::exception&) {
      throw precondition_error("polynomial: bad coefficient token '" + tok + "'");
    }
    cs.emplace_back(re, im);
  }
  if (cs.empty()) throw precondition_error("polynomial: empty coefficient list");
  return Polynomial(std::move(cs));
}

std::string Polynomial::format() const {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (i) out += ' ';
    std::snprintf(buf, sizeof buf, "%.17g,%.17g", coeffs_[i].real(), coeffs_[i].imag());
    out += buf;
  }
  return out;
}

std::vector<cplx> roots(const Polynomial& p, const RootOptions& opt) {
  const int d = p.degree();
  if (d < 1) throw precondition_error("roots: degree must be >= 1");
  if (d == 1) {
    // a0 + a1 z = 0
    return {-p.coeffs()[0] / p.coeffs()[1]};
  }
  // Monic normalization for the bound and the iteration.
  std::vector<cplx> b(p.coeffs());
  cplx lead = b.back();
  for (auto& c : b) c /= lead;
  double maxb = 0.0;
  for (int k = 0; k < d; ++k) maxb = std::max(maxb, std::abs(b[k]));
  const double r0 = 1.0 + maxb;  // every root has modulus <= r0

  Polynomial mp(b);
  std::vector<cplx> z(d);
  // Fixed irrational angular offset de-symmetrizes real-coefficient cases.
  const double offset = 0.61803398874989484820;
  for (int j = 0; j < d; ++j) {
    double ang = 6.283185307179586477 * (double(j) / d) + offset;
    z[j] = std::polar(0.9 * r0 + 0.1, ang);
  }

  double worst_step = 0.0;
  bool converged = false;
  for (int sweep = 0; sweep < opt.max_sweeps && !converged; ++sweep) {
    worst_step = 0.0;
    for (int j = 0; j < d; ++j) {
      cplx pv, dv;
      mp.eval2(z[j], pv, dv);
      if (pv == cplx{0.0, 0.0}) continue;
      // Backward-error stop: once |p(z)| is below the rounding noise of the
      // evaluation itself, the approximant cannot improve (multiple roots
      // stall the relative-step criterion at the cluster radius).
      {
        double zb = std::abs(z[j]), bnd = 0.0, zp = 1.0;
        for (int k = 0; k <= d; ++k) {
          bnd += std::abs(b[k]) * zp * double(2 * k + 1);
          zp *= zb;
        }
        if (std::abs(pv) <= 4.0 * std::numeric_limits<double>::epsilon() * bnd) continue;
      }
      if (dv == cplx{0.0, 0.0}) {  // stationary start; nudge off the symmetry
        z[j] += cplx{1e-8 * (1.0 + std::abs(z[j])), 1e-8};
        mp.eval2(z[j], pv, dv);
        if (dv == cplx{0.0, 0.0}) continue;
      }
      cplx newton = pv / dv;
      cplx s{0.0, 0.0};
      for (int k = 0; k < d; ++k)
        if (k != j) {
          cplx diff = z[j] - z[k];
          if (diff == cplx{0.0, 0.0}) diff = cplx{1e-14, 1e-14};
          s += 1.0 / diff;
        }
      cplx denom = 1.0 - newton * s;
      cplx step = (denom == cplx{0.0, 0.0}) ? newton : newton / denom;
      z[j] -= step;
      worst_step = std::max(worst_step, std::abs(step) / (1.0 + std::abs(z[j])));
    }
    converged = worst_step < opt.tol;
  }
  if (!converged)
    throw convergence_error("roots: Aberth iteration did not converge", worst_step);

  for (int polish = 0; polish < opt.polish_steps; ++polish)
    for (int j = 0; j < d; ++j) {
      cplx pv, dv;
      mp.eval2(z[j], pv, dv);
      if (dv != cplx{0.0, 0.0}) {
        cplx step = pv / dv;
        // Newton near a multiple root can bounce; keep the polish conservative.
        if (std::abs(step) < 1e-3 * (1.0 + std::abs(z[j]))) z[j] -= step;
      }
    }

  std::sort(z.begin(), z.end(), lex_less);
  return z;
}

std::vector<cplx> critical_points(const Polynomial& p, const RootOptions& opt) {
  if (p.degree() <= 1) return {};
  return roots(p.derivative(), opt);
}

}  // namespace lsjulia
