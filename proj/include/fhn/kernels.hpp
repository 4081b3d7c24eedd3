#pragma once

// Data-parallel arithmetic kernels used by trajectory quadrature and curve
// sampling. Each kernel has a scalar reference implementation and vector
// variants (AVX2+FMA on x86-64, NEON on AArch64); the variant is chosen once
// at runtime from the CPU's capabilities. Setting FHN_SIMD=scalar in the
// environment forces the reference path.
//
// Vector variants reassociate sums and fuse multiply-adds, so they agree with
// the reference to rounding, not bit for bit. Within one process the choice
// is fixed, which keeps results reproducible run to run.

#include <span>
#include <string_view>

namespace fhn::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);
bool isa_available(Isa isa);
/// The variant used by the dispatched entry points below.
Isa active_isa();

/// Per-point cubic coefficients in structure-of-arrays layout.
struct CubicCoeffs {
  std::span<const double> c0, c1, c2, c3;
};

/// sum_i (x_i^2 + y_i^2). x and y must have equal length.
double sum_squares2(std::span<const double> x, std::span<const double> y);

/// out_i = c0_i + s_i (c1_i + s_i (c2_i + s_i c3_i)).
void cubic_eval(std::span<const double> s, const CubicCoeffs& c, std::span<double> out);

/// out_i = sum_k coeffs[k] t_i^k, Horner's rule on a shared polynomial.
void poly_eval(std::span<const double> coeffs, std::span<const double> t, std::span<double> out);

namespace scalar {
double sum_squares2(std::span<const double> x, std::span<const double> y);
void cubic_eval(std::span<const double> s, const CubicCoeffs& c, std::span<double> out);
void poly_eval(std::span<const double> coeffs, std::span<const double> t, std::span<double> out);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double sum_squares2(std::span<const double> x, std::span<const double> y);
void cubic_eval(std::span<const double> s, const CubicCoeffs& c, std::span<double> out);
void poly_eval(std::span<const double> coeffs, std::span<const double> t, std::span<double> out);
}  // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
double sum_squares2(std::span<const double> x, std::span<const double> y);
void cubic_eval(std::span<const double> s, const CubicCoeffs& c, std::span<double> out);
void poly_eval(std::span<const double> coeffs, std::span<const double> t, std::span<double> out);
}  // namespace neon
#endif

}  // namespace fhn::kernels
