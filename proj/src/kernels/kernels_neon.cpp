#include "fhn/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cstddef>

namespace fhn::kernels::neon {

double sum_squares2(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  const std::size_t n4 = n & ~std::size_t{3};
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i < n4; i += 4) {
    const float64x2_t x0 = vld1q_f64(x.data() + i);
    const float64x2_t x1 = vld1q_f64(x.data() + i + 2);
    const float64x2_t y0 = vld1q_f64(y.data() + i);
    const float64x2_t y1 = vld1q_f64(y.data() + i + 2);
    acc0 = vfmaq_f64(acc0, x0, x0);
    acc1 = vfmaq_f64(acc1, x1, x1);
    acc0 = vfmaq_f64(acc0, y0, y0);
    acc1 = vfmaq_f64(acc1, y1, y1);
  }
  double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) sum += x[i] * x[i] + y[i] * y[i];
  return sum;
}

void cubic_eval(std::span<const double> s, const CubicCoeffs& c, std::span<double> out) {
  const std::size_t n = s.size();
  const std::size_t n2 = n & ~std::size_t{1};
  std::size_t i = 0;
  for (; i < n2; i += 2) {
    const float64x2_t sv = vld1q_f64(s.data() + i);
    float64x2_t acc = vld1q_f64(c.c3.data() + i);
    acc = vfmaq_f64(vld1q_f64(c.c2.data() + i), acc, sv);
    acc = vfmaq_f64(vld1q_f64(c.c1.data() + i), acc, sv);
    acc = vfmaq_f64(vld1q_f64(c.c0.data() + i), acc, sv);
    vst1q_f64(out.data() + i, acc);
  }
  for (; i < n; ++i) out[i] = c.c0[i] + s[i] * (c.c1[i] + s[i] * (c.c2[i] + s[i] * c.c3[i]));
}

void poly_eval(std::span<const double> coeffs, std::span<const double> t, std::span<double> out) {
  const std::size_t n = t.size();
  const std::size_t n2 = n & ~std::size_t{1};
  std::size_t i = 0;
  for (; i < n2; i += 2) {
    const float64x2_t tv = vld1q_f64(t.data() + i);
    float64x2_t acc = vdupq_n_f64(0.0);
    for (std::size_t k = coeffs.size(); k-- > 0;) acc = vfmaq_f64(vdupq_n_f64(coeffs[k]), acc, tv);
    vst1q_f64(out.data() + i, acc);
  }
  for (; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * t[i] + coeffs[k];
    out[i] = acc;
  }
}

}  // namespace fhn::kernels::neon

#endif
