#include "fhn/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace fhn::kernels {

namespace {

struct Table {
  Isa isa;
  double (*sum_squares2)(std::span<const double>, std::span<const double>);
  void (*cubic_eval)(std::span<const double>, const CubicCoeffs&, std::span<double>);
  void (*poly_eval)(std::span<const double>, std::span<const double>, std::span<double>);
};

bool forced_scalar() {
  const char* env = std::getenv("FHN_SIMD");
  return env != nullptr && std::strcmp(env, "scalar") == 0;
}

Table select() {
#if defined(__x86_64__) || defined(_M_X64)
  if (!forced_scalar() && isa_available(Isa::Avx2))
    return {Isa::Avx2, &avx2::sum_squares2, &avx2::cubic_eval, &avx2::poly_eval};
#elif defined(__aarch64__)
  if (!forced_scalar())
    return {Isa::Neon, &neon::sum_squares2, &neon::cubic_eval, &neon::poly_eval};
#endif
  return {Isa::Scalar, &scalar::sum_squares2, &scalar::cubic_eval, &scalar::poly_eval};
}

const Table& table() {
  static const Table t = select();
  return t;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() { return table().isa; }

double sum_squares2(std::span<const double> x, std::span<const double> y) {
  return table().sum_squares2(x, y);
}

void cubic_eval(std::span<const double> s, const CubicCoeffs& c, std::span<double> out) {
  table().cubic_eval(s, c, out);
}

void poly_eval(std::span<const double> coeffs, std::span<const double> t, std::span<double> out) {
  table().poly_eval(coeffs, t, out);
}

}  // namespace fhn::kernels
