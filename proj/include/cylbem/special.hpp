#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "cylbem/errors.hpp"

namespace cylbem {

inline constexpr double euler_gamma = 0.5772156649015328606065120900824024;
inline constexpr double pi = 3.1415926535897932384626433832795029;

// ---------------------------------------------------------------------------
// Modified Bessel functions I0, I1, K0, K1 for x > 0.
//
// Ascending series below the crossover, asymptotic expansion above it.
// Series sums are accumulated in long double: the K-series suffer a
// cancellation that grows like e^{2x} * eps, which long double keeps below
// 1e-12 through the crossover region.
// ---------------------------------------------------------------------------

inline constexpr double bessel_crossover = 9.0;

namespace detail {

inline long double i0_series(long double x) {
  const long double t = x * x / 4.0L;
  long double term = 1.0L, sum = 1.0L;
  for (int m = 1; m < 400; ++m) {
    term *= t / (static_cast<long double>(m) * m);
    sum += term;
    if (term < sum * 1e-22L) break;
  }
  return sum;
}

inline long double i1_series(long double x) {
  const long double t = x * x / 4.0L;
  long double term = 1.0L, sum = 1.0L; // sum of t^k/(k!(k+1)!)
  for (int k = 1; k < 400; ++k) {
    term *= t / (static_cast<long double>(k) * (k + 1));
    sum += term;
    if (term < sum * 1e-22L) break;
  }
  return (x / 2.0L) * sum;
}

// K_nu(x) ~ sqrt(pi/(2x)) e^{-x} sum_k a_k, a_k = a_{k-1} (4 nu^2-(2k-1)^2)/(8xk)
inline long double k_asymptotic(long double x, int nu) {
  const long double mu = 4.0L * nu * nu;
  long double a = 1.0L, sum = 1.0L, prev = 1.0L;
  for (int k = 1; k < 60; ++k) {
    a *= (mu - (2.0L * k - 1.0L) * (2.0L * k - 1.0L)) / (8.0L * x * k);
    if (std::fabs(a) >= std::fabs(prev)) break; // past optimal truncation
    sum += a;
    prev = a;
    if (std::fabs(a) < 1e-20L * std::fabs(sum)) break;
  }
  return std::sqrt(pi / (2.0L * x)) * std::exp(-x) * sum;
}

} // namespace detail

inline double bessel_I0(double x) {
  return static_cast<double>(detail::i0_series(std::fabs(x)));
}

inline double bessel_I1(double x) {
  const double s = x < 0 ? -1.0 : 1.0;
  return s * static_cast<double>(detail::i1_series(std::fabs(x)));
}

inline double bessel_K0(double x) {
  if (!(x > 0)) throw Error("bessel_K0: argument must be positive");
  if (x > 700.0) return 0.0; // underflow of e^{-x}
  const long double xl = x;
  if (x <= bessel_crossover) {
    const long double t = xl * xl / 4.0L;
    long double term = 1.0L, hsum = 0.0L, acc = 0.0L, i0 = 1.0L;
    for (int m = 1; m < 400; ++m) {
      term *= t / (static_cast<long double>(m) * m);
      hsum += 1.0L / m;
      acc += hsum * term;
      i0 += term;
      if (term < i0 * 1e-22L) break;
    }
    const long double lead = -(std::log(xl / 2.0L) + static_cast<long double>(euler_gamma));
    return static_cast<double>(lead * i0 + acc);
  }
  return static_cast<double>(detail::k_asymptotic(xl, 0));
}

inline double bessel_K1(double x) {
  if (!(x > 0)) throw Error("bessel_K1: argument must be positive");
  if (x > 700.0) return 0.0;
  const long double xl = x;
  if (x <= bessel_crossover) {
    const long double t = xl * xl / 4.0L;
    // psi(k+1)+psi(k+2) = -2 gamma + h_k + h_{k+1}
    long double term = 1.0L, sum_i1 = 1.0L, sum_psi = 0.0L;
    long double hk = 0.0L, hk1 = 1.0L;
    sum_psi = (-2.0L * euler_gamma + hk + hk1) * term;
    for (int k = 1; k < 400; ++k) {
      term *= t / (static_cast<long double>(k) * (k + 1));
      hk += 1.0L / k;
      hk1 += 1.0L / (k + 1);
      sum_i1 += term;
      sum_psi += (-2.0L * euler_gamma + hk + hk1) * term;
      if (term < sum_i1 * 1e-22L) break;
    }
    const long double i1 = (xl / 2.0L) * sum_i1;
    return static_cast<double>(1.0L / xl + std::log(xl / 2.0L) * i1 - (xl / 4.0L) * sum_psi);
  }
  return static_cast<double>(detail::k_asymptotic(xl, 1));
}

// ---------------------------------------------------------------------------
// Gauss-Legendre rules on [-1,1], by Newton iteration on Legendre polynomials.
// ---------------------------------------------------------------------------

struct GaussRule {
  std::vector<double> x; // nodes in (-1,1), ascending
  std::vector<double> w;
};

inline GaussRule gauss_legendre(int q) {
  if (q < 1) throw Error("gauss_legendre: order must be >= 1");
  GaussRule r;
  r.x.resize(q);
  r.w.resize(q);
  for (int i = 0; i < q; ++i) {
    // Chebyshev-based initial guess, refined by Newton on P_q.
    double x = std::cos(pi * (i + 0.75) / (q + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      if (q == 1) { p1 = x; }
      for (int k = 2; k <= q; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = q * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= q; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = q * (x * p1 - p0) / (x * x - 1.0);
    r.x[q - 1 - i] = x; // store ascending
    r.w[q - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

// Map a [-1,1] rule to [a,b].
inline GaussRule gauss_on(const GaussRule& base, double a, double b) {
  GaussRule r = base;
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (std::size_t i = 0; i < r.x.size(); ++i) {
    r.x[i] = mid + half * base.x[i];
    r.w[i] = half * base.w[i];
  }
  return r;
}

// ---------------------------------------------------------------------------
// Periodic log quadrature (Martensen-Kussmaul / Kress).
//
// For even n and nodes t_j = 2 pi j / n,
//   int_0^{2pi} log(4 sin^2((t_i - t)/2)) g(t) dt ~= sum_j R[|i-j| mod n] g(t_j),
// exact for trigonometric polynomials g of degree < n/2.
// ---------------------------------------------------------------------------

inline std::vector<double> kress_log_weights(int n) {
  if (n < 2 || n % 2 != 0) throw Error("kress_log_weights: n must be even and >= 2");
  const int M = n / 2;
  std::vector<double> R(n);
  for (int j = 0; j < n; ++j) {
    const double t = 2.0 * pi * j / n;
    double s = 0.0;
    for (int m = 1; m < M; ++m) s += std::cos(m * t) / m;
    R[j] = -(4.0 * pi / n) * s - (pi / (M * static_cast<double>(M))) * std::cos(M * t);
  }
  return R;
}

// ---------------------------------------------------------------------------
// Panelwise analytic log moments.
//
// c_k = int_a^b ln|x - x0| L_k(x) dx for the Lagrange basis L_k on the given
// panel nodes. Exact: L_k is expanded in monomials of u = x - x0 and
// int u^m ln|u| du = u^{m+1} (ln|u| - 1/(m+1))/(m+1) is applied on each side
// of u = 0 (the antiderivative extends continuously by 0).
// ---------------------------------------------------------------------------

namespace detail {
inline double log_moment_antideriv(double u, int m) {
  if (u == 0.0) return 0.0;
  const double p = m + 1.0;
  return std::pow(u, m + 1) * (std::log(std::fabs(u)) - 1.0 / p) / p;
}
} // namespace detail

inline std::vector<double> panel_log_moments(const std::vector<double>& nodes,
                                             double a, double b, double x0) {
  const int q = static_cast<int>(nodes.size());
  const double ua = a - x0, ub = b - x0;
  std::vector<double> moments(q);
  for (int m = 0; m < q; ++m)
    moments[m] = detail::log_moment_antideriv(ub, m) - detail::log_moment_antideriv(ua, m);
  std::vector<double> c(q, 0.0);
  std::vector<double> poly(q);
  for (int k = 0; k < q; ++k) {
    // monomial coefficients of L_k in u = x - x0
    std::fill(poly.begin(), poly.end(), 0.0);
    poly[0] = 1.0;
    int deg = 0;
    for (int j = 0; j < q; ++j) {
      if (j == k) continue;
      const double uk = nodes[k] - x0, uj = nodes[j] - x0;
      const double s = 1.0 / (uk - uj);
      // poly <- poly * (u - uj) * s
      for (int d = deg + 1; d >= 1; --d) poly[d] = (poly[d - 1] - uj * poly[d]) * s;
      poly[0] *= -uj * s;
      ++deg;
    }
    double acc = 0.0;
    for (int m = 0; m < q; ++m) acc += poly[m] * moments[m];
    c[k] = acc;
  }
  return c;
}

// ---------------------------------------------------------------------------
// Barycentric trigonometric interpolation at even n equispaced nodes.
// ---------------------------------------------------------------------------

inline double trig_interp(const std::vector<double>& values, double s) {
  const int n = static_cast<int>(values.size());
  double num = 0.0, den = 0.0;
  for (int j = 0; j < n; ++j) {
    const double half = 0.5 * (s - 2.0 * pi * j / n);
    const double sn = std::sin(half);
    if (std::fabs(sn) < 1e-14) return values[j];
    const double w = ((j % 2) ? -1.0 : 1.0) * std::cos(half) / sn;
    num += w * values[j];
    den += w;
  }
  return num / den;
}

// Lagrange evaluation on arbitrary nodes (used for panel densities).
inline double lagrange_interp(const std::vector<double>& nodes,
                              const double* values, double x) {
  const int q = static_cast<int>(nodes.size());
  double acc = 0.0;
  for (int k = 0; k < q; ++k) {
    double lk = 1.0;
    for (int j = 0; j < q; ++j) {
      if (j == k) continue;
      lk *= (x - nodes[j]) / (nodes[k] - nodes[j]);
    }
    acc += lk * values[k];
  }
  return acc;
}

} // namespace cylbem
