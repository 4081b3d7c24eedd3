#include "fhn/kernels.hpp"

#include <cstddef>

namespace fhn::kernels::scalar {

double sum_squares2(std::span<const double> x, std::span<const double> y) {
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) sum += x[i] * x[i] + y[i] * y[i];
  return sum;
}

void cubic_eval(std::span<const double> s, const CubicCoeffs& c, std::span<double> out) {
  for (std::size_t i = 0; i < s.size(); ++i)
    out[i] = c.c0[i] + s[i] * (c.c1[i] + s[i] * (c.c2[i] + s[i] * c.c3[i]));
}

void poly_eval(std::span<const double> coeffs, std::span<const double> t, std::span<double> out) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    double acc = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * t[i] + coeffs[k];
    out[i] = acc;
  }
}

}  // namespace fhn::kernels::scalar
