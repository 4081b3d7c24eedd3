#include "fhn/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cstddef>

#define FHN_AVX2 __attribute__((target("avx2,fma")))

namespace fhn::kernels::avx2 {

FHN_AVX2 double sum_squares2(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  const std::size_t n8 = n & ~std::size_t{7};
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i < n8; i += 8) {
    const __m256d x0 = _mm256_loadu_pd(x.data() + i);
    const __m256d y0 = _mm256_loadu_pd(y.data() + i);
    const __m256d x1 = _mm256_loadu_pd(x.data() + i + 4);
    const __m256d y1 = _mm256_loadu_pd(y.data() + i + 4);
    acc0 = _mm256_fmadd_pd(x0, x0, acc0);
    acc1 = _mm256_fmadd_pd(x1, x1, acc1);
    acc0 = _mm256_fmadd_pd(y0, y0, acc0);
    acc1 = _mm256_fmadd_pd(y1, y1, acc1);
  }
  const __m256d acc = _mm256_add_pd(acc0, acc1);
  const __m128d lo = _mm256_castpd256_pd128(acc);
  const __m128d hi = _mm256_extractf128_pd(acc, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  double sum = _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
  for (; i < n; ++i) sum += x[i] * x[i] + y[i] * y[i];
  return sum;
}

FHN_AVX2 void cubic_eval(std::span<const double> s, const CubicCoeffs& c, std::span<double> out) {
  const std::size_t n = s.size();
  const std::size_t n4 = n & ~std::size_t{3};
  std::size_t i = 0;
  for (; i < n4; i += 4) {
    const __m256d sv = _mm256_loadu_pd(s.data() + i);
    __m256d acc = _mm256_loadu_pd(c.c3.data() + i);
    acc = _mm256_fmadd_pd(acc, sv, _mm256_loadu_pd(c.c2.data() + i));
    acc = _mm256_fmadd_pd(acc, sv, _mm256_loadu_pd(c.c1.data() + i));
    acc = _mm256_fmadd_pd(acc, sv, _mm256_loadu_pd(c.c0.data() + i));
    _mm256_storeu_pd(out.data() + i, acc);
  }
  for (; i < n; ++i) out[i] = c.c0[i] + s[i] * (c.c1[i] + s[i] * (c.c2[i] + s[i] * c.c3[i]));
}

FHN_AVX2 void poly_eval(std::span<const double> coeffs, std::span<const double> t,
                        std::span<double> out) {
  const std::size_t n = t.size();
  const std::size_t n4 = n & ~std::size_t{3};
  std::size_t i = 0;
  for (; i < n4; i += 4) {
    const __m256d tv = _mm256_loadu_pd(t.data() + i);
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t k = coeffs.size(); k-- > 0;)
      acc = _mm256_fmadd_pd(acc, tv, _mm256_set1_pd(coeffs[k]));
    _mm256_storeu_pd(out.data() + i, acc);
  }
  for (; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * t[i] + coeffs[k];
    out[i] = acc;
  }
}

}  // namespace fhn::kernels::avx2

#endif
