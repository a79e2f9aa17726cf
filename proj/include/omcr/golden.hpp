#pragma once

#include <cmath>
#include <stdexcept>

namespace omcr {

// Golden-section search for the minimum of a unimodal scalar function on
// [lo, hi]. Returns the argmin to within tol. Terminates on any objective
// (the bracket shrinks geometrically), but the result is only the global
// minimum when f is unimodal.
template <typename F>
double golden_section_minimize(const F& f, double lo, double hi, double tol) {
  if (!(lo < hi)) throw std::invalid_argument("golden_section_minimize: need lo < hi");
  if (!(tol > 0.0)) throw std::invalid_argument("golden_section_minimize: need tol > 0");
  constexpr double invphi = 0.6180339887498949;  // 1/phi

  auto eval = [&](double x) {
    const double v = f(x);
    if (!std::isfinite(v))
      throw std::runtime_error("golden_section_minimize: non-finite objective value");
    return v;
  };

  double a = lo, b = hi;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = eval(x1), f2 = eval(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = eval(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = eval(x2);
    }
  }
  return f1 <= f2 ? x1 : x2;
}

}  // namespace omcr
