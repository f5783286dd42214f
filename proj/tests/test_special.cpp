#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <random>

#include "cylbem/special.hpp"

using namespace cylbem;

// Oracle: the standard library's cyl_bessel_k / cyl_bessel_i. The library
// itself never calls these; they exist here as the independent reference.

TEST_CASE("K0/K1 match the reference implementation", "[special]") {
  // Outside the series/asymptotic seam the evaluator is good to 1e-12 relative.
  const double tight[] = {1e-3, 1e-2, 0.1, 0.3, 0.7, 1.0, 1.7, 2.5, 3.9, 5.0, 5.9,
                          14.5, 17.0, 21.0, 30.0, 50.0};
  for (double x : tight) {
    const double k0_ref = std::cyl_bessel_k(0.0, x);
    const double k1_ref = std::cyl_bessel_k(1.0, x);
    CHECK(std::fabs(bessel_K0(x) - k0_ref) <= 1e-12 * std::fabs(k0_ref));
    CHECK(std::fabs(bessel_K1(x) - k1_ref) <= 1e-12 * std::fabs(k1_ref));
  }
  // Inside the seam the attainable accuracy is limited by series cancellation
  // (~e^{2x} eps in long double) below the crossover and by the optimal
  // asymptotic truncation (~e^{-2x}) above it.
  for (double x = 6.0; x <= 14.0; x += 0.5) {
    const double k0_ref = std::cyl_bessel_k(0.0, x);
    const double k1_ref = std::cyl_bessel_k(1.0, x);
    CHECK(std::fabs(bessel_K0(x) - k0_ref) <= 2e-9 * std::fabs(k0_ref));
    CHECK(std::fabs(bessel_K1(x) - k1_ref) <= 2e-9 * std::fabs(k1_ref));
  }
}

TEST_CASE("I0/I1 match the reference implementation", "[special]") {
  for (double x : {1e-4, 0.05, 0.4, 1.0, 2.2, 4.5, 8.0, 12.0}) {
    CHECK(std::fabs(bessel_I0(x) - std::cyl_bessel_i(0.0, x)) <=
          1e-13 * std::cyl_bessel_i(0.0, x));
    CHECK(std::fabs(bessel_I1(x) - std::cyl_bessel_i(1.0, x)) <=
          1e-13 * std::cyl_bessel_i(1.0, x));
  }
  CHECK(bessel_I1(0.0) == 0.0);
}

TEST_CASE("K0' = -K1 finite difference sanity", "[special]") {
  for (double x : {0.5, 2.0, 4.0, 20.0}) {
    const double h = 1e-6 * x;
    const double fd = (bessel_K0(x + h) - bessel_K0(x - h)) / (2 * h);
    CHECK(std::fabs(fd + bessel_K1(x)) <= 1e-7 * std::fabs(bessel_K1(x)));
  }
}

TEST_CASE("Gauss-Legendre exactness", "[special]") {
  const GaussRule r = gauss_legendre(6);
  double wsum = 0.0;
  for (double w : r.w) wsum += w;
  CHECK(std::fabs(wsum - 2.0) < 1e-14);
  // exact for polynomials of degree <= 11
  for (int d = 0; d <= 11; ++d) {
    double acc = 0.0;
    for (std::size_t i = 0; i < r.x.size(); ++i) acc += r.w[i] * std::pow(r.x[i], d);
    const double exact = (d % 2) ? 0.0 : 2.0 / (d + 1);
    CHECK(std::fabs(acc - exact) < 1e-14);
  }
  // mapped rule integrates over [a,b]
  const GaussRule m = gauss_on(r, 1.0, 3.5);
  double acc = 0.0;
  for (std::size_t i = 0; i < m.x.size(); ++i) acc += m.w[i] * m.x[i] * m.x[i];
  CHECK(std::fabs(acc - (std::pow(3.5, 3) - 1.0) / 3.0) < 1e-13);
}

TEST_CASE("Kress log weights integrate the periodic log kernel exactly", "[special]") {
  // Oracle: int_0^{2pi} log(4 sin^2((s-t)/2)) cos(m t) dt = -(2 pi/m) cos(m s),
  // and the constant integrates to zero.
  const int n = 32;
  const auto R = kress_log_weights(n);
  for (int i : {0, 5, 17}) {
    const double s = 2.0 * pi * i / n;
    double c0 = 0.0;
    for (int j = 0; j < n; ++j) c0 += R[std::abs(i - j) % n];
    CHECK(std::fabs(c0) < 1e-12);
    for (int m : {1, 2, 5, 10, 15}) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j)
        acc += R[std::abs(i - j) % n] * std::cos(m * 2.0 * pi * j / n);
      CHECK(std::fabs(acc + (2.0 * pi / m) * std::cos(m * s)) < 1e-11);
    }
  }
}

namespace {
// Independent quadrature of int_a^b ln|x-x0| f(x) dx: geometric panels graded
// toward x0, GL-10 on each.
double graded_log_integral(double a, double b, double x0,
                           const std::function<double(double)>& f) {
  const GaussRule g10 = gauss_legendre(10);
  double acc = 0.0;
  auto side = [&](double lo, double hi) {
    if (hi - lo < 1e-300) return;
    // grade toward whichever end is closer to x0
    const bool x0_at_lo = std::fabs(lo - x0) < std::fabs(hi - x0);
    double len = hi - lo;
    double near = x0_at_lo ? lo : hi;
    double far = x0_at_lo ? hi : lo;
    double t = 1.0;
    for (int k = 0; k < 60; ++k) {
      if (t * std::fabs(far - near) < 1e-15) break; // sliver ~ 1e-14, below test tol
      const double t2 = t / 2;
      const double pa = near + (far - near) * t2;
      const double pb = near + (far - near) * t;
      const GaussRule m = gauss_on(g10, std::min(pa, pb), std::max(pa, pb));
      for (std::size_t i = 0; i < m.x.size(); ++i)
        acc += m.w[i] * std::log(std::fabs(m.x[i] - x0)) * f(m.x[i]);
      t = t2;
    }
  };
  if (x0 > a && x0 < b) {
    side(a, x0);
    side(x0, b);
  } else {
    side(a, b);
  }
  return acc;
}
} // namespace

TEST_CASE("panel log moments agree with graded quadrature", "[special]") {
  const GaussRule g6 = gauss_legendre(6);
  const double a = 0.0, b = 0.5;
  const GaussRule panel = gauss_on(g6, a, b);
  for (double x0 : {0.2, 0.7, -0.3, panel.x[2]}) {
    const auto c = panel_log_moments(panel.x, a, b, x0);
    for (int k = 0; k < 6; ++k) {
      auto lk = [&](double x) {
        double v = 1.0;
        for (int j = 0; j < 6; ++j)
          if (j != k) v *= (x - panel.x[j]) / (panel.x[k] - panel.x[j]);
        return v;
      };
      const double ref = graded_log_integral(a, b, x0, lk);
      CHECK(std::fabs(c[k] - ref) < 1e-12);
    }
  }
}

TEST_CASE("trigonometric and Lagrange interpolation reproduce exact data", "[special]") {
  const int n = 16;
  auto f = [](double s) { return 1.0 + std::cos(s) - 0.4 * std::sin(2 * s) + 0.2 * std::cos(5 * s); };
  std::vector<double> vals(n);
  for (int j = 0; j < n; ++j) vals[j] = f(2.0 * pi * j / n);
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> U(0.0, 2.0 * pi);
  for (int t = 0; t < 50; ++t) {
    const double s = U(rng);
    CHECK(std::fabs(trig_interp(vals, s) - f(s)) < 1e-12);
  }
  CHECK(std::fabs(trig_interp(vals, 2.0 * pi * 3 / n) - vals[3]) < 1e-14);

  const GaussRule g5 = gauss_legendre(5);
  auto p = [](double x) { return 2.0 - x + 3 * x * x - x * x * x * x; };
  std::vector<double> pv(5);
  for (int k = 0; k < 5; ++k) pv[k] = p(g5.x[k]);
  for (int t = 0; t < 20; ++t) {
    const double x = -1.0 + 2.0 * t / 19.0;
    CHECK(std::fabs(lagrange_interp(g5.x, pv.data(), x) - p(x)) < 1e-12);
  }
}
