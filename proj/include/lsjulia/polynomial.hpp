#pragma once
#include <complex>
#include <string>
#include <vector>

namespace lsjulia {

using cplx = std::complex<double>;

// Dense polynomial over C, coefficients ascending by degree, leading
// coefficient nonzero (exact trailing zeros are trimmed at construction).
class Polynomial {
 public:
  // Throws precondition_error if all coefficients are zero / list is empty.
  explicit Polynomial(std::vector<cplx> ascending_coeffs);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<cplx>& coeffs() const { return coeffs_; }
  cplx leading() const { return coeffs_.back(); }

  cplx eval(cplx z) const;  // Horner
  // Value and derivative in one pass.
  void eval2(cplx z, cplx& p, cplx& dp) const;
  Polynomial derivative() const;  // requires degree >= 1

  // Text format: space-separated "re,im" pairs, ascending degree.
  // "-1,0 0,0 1,0" is z^2 - 1. Accepts bare reals ("-1 0 1").
  static Polynomial parse(const std::string& text);
  std::string format() const;

  bool operator==(const Polynomial& o) const { return coeffs_ == o.coeffs_; }

 private:
  std::vector<cplx> coeffs_;
};

struct RootOptions {
  int max_sweeps = 400;
  double tol = 1e-13;      // relative simultaneous-step tolerance
  int polish_steps = 2;    // Newton steps applied after convergence
};

// All complex roots with multiplicity, Aberth-Ehrlich simultaneous iteration.
// Deterministic: fixed initial configuration (circle of the coefficient root
// bound, irrational angular offset) and a canonical (re, im) lexicographic
// sort of the result. Throws convergence_error if sweeps run out, carrying
// the worst relative step as residual. degree >= 1 required.
std::vector<cplx> roots(const Polynomial& p, const RootOptions& opt = {});

// Roots of the derivative (empty for degree <= 1).
std::vector<cplx> critical_points(const Polynomial& p, const RootOptions& opt = {});

// Canonical ordering used for root lists.
inline bool lex_less(const cplx& a, const cplx& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

}  // namespace lsjulia
