#include "fhn/kernels.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace fhn::kernels;

namespace {

using Span = std::span<const double>;
using MutSpan = std::span<double>;

struct Data {
  std::vector<double> s, c0, c1, c2, c3, x, y, t;
};

Data make(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Data d;
  for (std::size_t i = 0; i < n; ++i) {
    d.s.push_back(unit(rng));
    d.c0.push_back(u(rng));
    d.c1.push_back(u(rng));
    d.c2.push_back(u(rng));
    d.c3.push_back(u(rng));
    d.x.push_back(u(rng));
    d.y.push_back(u(rng));
    d.t.push_back(u(rng));
  }
  return d;
}

template <class SumFn, class CubicFn, class PolyFn>
void compare_with_reference(SumFn sum, CubicFn cubic, PolyFn poly) {
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 9u, 33u, 1000u, 40001u}) {
    const Data d = make(n, static_cast<unsigned>(n) + 1);
    const double ref = scalar::sum_squares2(d.x, d.y);
    const double got = sum(d.x, d.y);
    CHECK(std::abs(got - ref) <= 1e-13 * std::max(1.0, ref));

    const CubicCoeffs c{d.c0, d.c1, d.c2, d.c3};
    std::vector<double> a(n), b(n);
    scalar::cubic_eval(d.s, c, a);
    cubic(d.s, c, b);
    for (std::size_t i = 0; i < n; ++i) REQUIRE(std::abs(a[i] - b[i]) <= 1e-14 * 8);

    const std::vector<double> coeffs{0.0, 3.1, -0.7, 0.25, 1.5, -0.125};
    scalar::poly_eval(coeffs, d.t, a);
    poly(coeffs, d.t, b);
    for (std::size_t i = 0; i < n; ++i) REQUIRE(std::abs(a[i] - b[i]) <= 1e-13 * std::max(1.0, std::abs(a[i])));
  }
}

}  // namespace

TEST_CASE("scalar reference kernels") {
  const std::vector<double> x(40000, 3.0);
  const std::vector<double> y(40000, 4.0);
  CHECK(scalar::sum_squares2(x, y) == 40000.0 * 25.0);

  const std::vector<double> s{0.0, 0.5, 1.0};
  const std::vector<double> c0(3, 1.0), c1(3, 2.0), c2(3, 3.0), c3(3, 4.0);
  std::vector<double> out(3);
  scalar::cubic_eval(s, {c0, c1, c2, c3}, out);
  CHECK(out[0] == 1.0);
  CHECK(out[1] == 1.0 + 1.0 + 0.75 + 0.5);
  CHECK(out[2] == 10.0);

  const std::vector<double> coeffs{1.0, -2.0, 1.0};
  const std::vector<double> t{0.0, 1.0, 3.0};
  scalar::poly_eval(coeffs, t, out);
  CHECK(out[0] == 1.0);
  CHECK(out[1] == 0.0);
  CHECK(out[2] == 4.0);
}

TEST_CASE("dispatched kernels agree with the reference") {
  MESSAGE("active isa: " << isa_name(active_isa()));
  compare_with_reference(
      [](Span x, Span y) { return sum_squares2(x, y); },
      [](Span s, const CubicCoeffs& c, MutSpan o) { cubic_eval(s, c, o); },
      [](Span k, Span t, MutSpan o) { poly_eval(k, t, o); });
}

#if defined(__x86_64__) || defined(_M_X64)
TEST_CASE("avx2 kernels agree with the reference") {
  if (!isa_available(Isa::Avx2)) return;
  compare_with_reference(
      [](Span x, Span y) { return avx2::sum_squares2(x, y); },
      [](Span s, const CubicCoeffs& c, MutSpan o) { avx2::cubic_eval(s, c, o); },
      [](Span k, Span t, MutSpan o) { avx2::poly_eval(k, t, o); });
  // Constant data sums exactly in any association order.
  const std::vector<double> x(40000, 3.0);
  const std::vector<double> y(40000, 4.0);
  CHECK(avx2::sum_squares2(x, y) == 1e6);
}
#endif

#if defined(__aarch64__)
TEST_CASE("neon kernels agree with the reference") {
  compare_with_reference(
      [](Span x, Span y) { return neon::sum_squares2(x, y); },
      [](Span s, const CubicCoeffs& c, MutSpan o) { neon::cubic_eval(s, c, o); },
      [](Span k, Span t, MutSpan o) { neon::poly_eval(k, t, o); });
}
#endif
