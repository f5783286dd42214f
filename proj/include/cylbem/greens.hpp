#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "cylbem/errors.hpp"
#include "cylbem/model.hpp"
#include "cylbem/special.hpp"
#include "cylbem/spectrum.hpp"

namespace cylbem {

// ---------------------------------------------------------------------------
// Fundamental solution E(p, q) of Delta + V on the cylinder R x S^1_ell,
// Delta = -d^2/dx^2 - d^2/dtheta^2, normalized by (Delta + V) E = delta_p.
//
// Representation: a periodized free-space part for the averaged potential
// c = mean V (a sum of Macdonald functions over images), plus a separable
// mode correction
//   corr = sum_j phi_j(th) phi_j(th') w(mu_j, |dx|) - truncated constant-V modes,
// with w(mu, s) = exp(-sqrt(mu) s) / (2 sqrt(mu)). The two truncated sums are
// kernels over the same trigonometric space, so their |dx| kinks cancel and
// corr is C^1 across dx = 0; it vanishes identically for constant V.
// Beyond x_far the image part is swapped for its own truncated mode sum,
// which turns the whole kernel into the plain retained-mode sum (the dropped
// tail is below machine precision there).
// ---------------------------------------------------------------------------

enum class KernelRoute { Auto, ImageSum, ModeSum };

struct GreenKernel {
  Eigensystem es;
  double c = 1.0;      // mean of V
  double sqrt_c = 1.0;
  int n_img = 0;       // image range for the periodized Macdonald sum
  double x_far = 0.5;  // beyond this axial separation the mode sum is exact
  Eigen::VectorXd sqrt_mu;  // sqrt of the cross-section eigenvalues
  Eigen::VectorXd mu0, sqrt_mu0, coef0; // constant-V reference modes k = 0..m
};

inline GreenKernel make_kernel(const Eigensystem& es) {
  GreenKernel k;
  k.es = es;
  k.c = es.mean_V;
  k.sqrt_c = std::sqrt(k.c);
  k.n_img = static_cast<int>(std::ceil(46.0 / k.sqrt_c / es.ell + 0.5)) + 1;
  k.x_far = std::max(0.5, 36.0 / (es.omega * es.mode_cutoff));
  k.sqrt_mu = es.mu.cwiseSqrt();
  const int m = es.mode_cutoff;
  k.mu0.resize(m + 1);
  k.sqrt_mu0.resize(m + 1);
  k.coef0.resize(m + 1);
  for (int i = 0; i <= m; ++i) {
    k.mu0(i) = k.c + (i * es.omega) * (i * es.omega);
    k.sqrt_mu0(i) = std::sqrt(k.mu0(i));
    k.coef0(i) = (i == 0 ? 1.0 : 2.0) / es.ell;
  }
  return k;
}

inline GreenKernel make_kernel(const CylinderModel& cyl) {
  return make_kernel(compute_eigensystem(cyl));
}

/** \brief Per-point cache for batch kernel evaluation. */
struct PointData {
  Vec2 p;
  ModeTable modes; // eigenfunction values/derivatives; empty for constant V
};

inline PointData kernel_point(const GreenKernel& k, Vec2 p) {
  PointData d;
  d.p = p;
  if (!k.es.constant_V) d.modes = eval_modes(k.es, p.theta);
  return d;
}

namespace detail {

struct KernelGeom {
  double dx = 0.0;    // p.x - q.x
  double delta = 0.0; // reduced p.theta - q.theta
  double s = 0.0;     // |dx|
  double sgn = 0.0;   // sign(dx), 0 at dx = 0 (principal value)
};

inline KernelGeom kernel_geom(const GreenKernel& k, const Vec2& p, const Vec2& q) {
  KernelGeom g;
  g.dx = p.x - q.x;
  g.delta = reduce_angle(p.theta - q.theta, k.es.ell);
  g.s = std::fabs(g.dx);
  g.sgn = g.dx > 0 ? 1.0 : (g.dx < 0 ? -1.0 : 0.0);
  return g;
}

// ---- image-sum (Macdonald) part and its derivatives ----

inline double base_value(const GreenKernel& k, const KernelGeom& g) {
  double acc = 0.0;
  for (int n = -k.n_img; n <= k.n_img; ++n) {
    const double t = g.delta + n * k.es.ell;
    const double z = k.sqrt_c * std::hypot(g.dx, t);
    if (z > 700.0) continue;
    acc += bessel_K0(z);
  }
  return acc / (2.0 * pi);
}

inline Vec2 base_gradq(const GreenKernel& k, const KernelGeom& g) {
  Vec2 out;
  for (int n = -k.n_img; n <= k.n_img; ++n) {
    const double t = g.delta + n * k.es.ell;
    const double r = std::hypot(g.dx, t);
    const double z = k.sqrt_c * r;
    if (z > 700.0) continue;
    const double f = k.sqrt_c * bessel_K1(z) / (2.0 * pi * r);
    out.x += f * g.dx;
    out.theta += f * t;
  }
  return out;
}

// d/dp_a d/dq_b of (1/2pi) K0(sqrt(c) r), rows and cols ordered (x, theta)
inline Eigen::Matrix2d base_hess(const GreenKernel& k, const KernelGeom& g) {
  Eigen::Matrix2d H = Eigen::Matrix2d::Zero();
  for (int n = -k.n_img; n <= k.n_img; ++n) {
    const double t = g.delta + n * k.es.ell;
    const double r = std::hypot(g.dx, t);
    const double z = k.sqrt_c * r;
    if (z > 700.0) continue;
    const double k0 = bessel_K0(z), k1 = bessel_K1(z);
    const double fp = -k.sqrt_c * k1 / (2.0 * pi);          // f'(r)
    const double fpp = k.c * (k0 + k1 / z) / (2.0 * pi);    // f''(r)
    const double v[2] = {g.dx, t};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const double vv = v[a] * v[b] / (r * r);
        H(a, b) += -fpp * vv - fp * ((a == b ? 1.0 : 0.0) - vv) / r;
      }
  }
  return H;
}

// ---- separable mode sums ----
// Axial factors for weight w(mu, s) = exp(-lam s)/(2 lam), lam = sqrt(mu):
//   value w, d/dq_x = sgn e/2, d/dp_x = -sgn e/2, d2/dp_x dq_x = -lam e/2,
// where e = exp(-lam s). Angular factors multiply them mode by mode.

// constant-V truncated mode sum (the "bracket"); der selects the angular
// derivative order (dp_theta, dq_theta) in {0,1} each
inline double bracket_term(const GreenKernel& k, const KernelGeom& g, int dp_th, int dq_th,
                           int dx_kind) {
  // dx_kind: 0 = value, 1 = d/dq_x, 2 = d/dp_x, 3 = d2/dp_x dq_x
  double acc = 0.0;
  const int m = k.es.mode_cutoff;
  for (int i = 0; i <= m; ++i) {
    const double lam = k.sqrt_mu0(i);
    const double e = std::exp(-lam * g.s);
    double xf = 0.0;
    switch (dx_kind) {
      case 0: xf = e / (2.0 * lam); break;
      case 1: xf = g.sgn * e / 2.0; break;
      case 2: xf = -g.sgn * e / 2.0; break;
      case 3: xf = -lam * e / 2.0; break;
    }
    const double ko = i * k.es.omega;
    double th = 0.0;
    if (dp_th == 0 && dq_th == 0) th = std::cos(ko * g.delta);
    else if (dp_th == 0 && dq_th == 1) th = ko * std::sin(ko * g.delta);
    else if (dp_th == 1 && dq_th == 0) th = -ko * std::sin(ko * g.delta);
    else th = ko * ko * std::cos(ko * g.delta);
    acc += k.coef0(i) * th * xf;
  }
  return acc;
}

// eigenmode sum with the same axial factors
inline double eig_term(const GreenKernel& k, const PointData& a, const PointData& b,
                       const KernelGeom& g, int dp_th, int dq_th, int dx_kind) {
  double acc = 0.0;
  for (int j = 0; j < k.es.dim; ++j) {
    const double lam = k.sqrt_mu(j);
    const double e = std::exp(-lam * g.s);
    double xf = 0.0;
    switch (dx_kind) {
      case 0: xf = e / (2.0 * lam); break;
      case 1: xf = g.sgn * e / 2.0; break;
      case 2: xf = -g.sgn * e / 2.0; break;
      case 3: xf = -lam * e / 2.0; break;
    }
    const double fa = dp_th == 0 ? a.modes.phi(j) : a.modes.dphi(j);
    const double fb = dq_th == 0 ? b.modes.phi(j) : b.modes.dphi(j);
    acc += fa * fb * xf;
  }
  return acc;
}

inline void check_separation(const KernelGeom& g) {
  if (std::hypot(g.dx, g.delta) < 1e-10)
    throw CoincidentPoints("kernel evaluated at coincident points");
}

inline bool use_modes(const GreenKernel& k, const KernelGeom& g, KernelRoute route) {
  if (route == KernelRoute::Auto) return g.s >= k.x_far;
  return route == KernelRoute::ModeSum;
}

} // namespace detail

inline double kernel_E(const GreenKernel& k, const PointData& a, const PointData& b,
                       KernelRoute route = KernelRoute::Auto) {
  const detail::KernelGeom g = detail::kernel_geom(k, a.p, b.p);
  detail::check_separation(g);
  if (k.es.constant_V)
    return detail::use_modes(k, g, route) ? detail::bracket_term(k, g, 0, 0, 0)
                                          : detail::base_value(k, g);
  const double eig = detail::eig_term(k, a, b, g, 0, 0, 0);
  if (detail::use_modes(k, g, route)) return eig;
  return detail::base_value(k, g) + eig - detail::bracket_term(k, g, 0, 0, 0);
}

/** \brief Gradient of E in the second argument. */
inline Vec2 kernel_gradq_E(const GreenKernel& k, const PointData& a, const PointData& b,
                           KernelRoute route = KernelRoute::Auto) {
  const detail::KernelGeom g = detail::kernel_geom(k, a.p, b.p);
  detail::check_separation(g);
  const bool far = detail::use_modes(k, g, route);
  Vec2 out;
  if (k.es.constant_V) {
    if (far) {
      out.x = detail::bracket_term(k, g, 0, 0, 1);
      out.theta = detail::bracket_term(k, g, 0, 1, 0);
    } else {
      out = detail::base_gradq(k, g);
    }
    return out;
  }
  out.x = detail::eig_term(k, a, b, g, 0, 0, 1);
  out.theta = detail::eig_term(k, a, b, g, 0, 1, 0);
  if (!far) {
    const Vec2 bg = detail::base_gradq(k, g);
    out.x += bg.x - detail::bracket_term(k, g, 0, 0, 1);
    out.theta += bg.theta - detail::bracket_term(k, g, 0, 1, 0);
  }
  return out;
}

/** \brief Gradient of E in the first argument. */
inline Vec2 kernel_gradp_E(const GreenKernel& k, const PointData& a, const PointData& b,
                           KernelRoute route = KernelRoute::Auto) {
  const detail::KernelGeom g = detail::kernel_geom(k, a.p, b.p);
  detail::check_separation(g);
  const bool far = detail::use_modes(k, g, route);
  Vec2 out;
  if (k.es.constant_V) {
    if (far) {
      out.x = detail::bracket_term(k, g, 0, 0, 2);
      out.theta = detail::bracket_term(k, g, 1, 0, 0);
    } else {
      const Vec2 bg = detail::base_gradq(k, g);
      out.x = -bg.x; // the image part depends on p - q only
      out.theta = -bg.theta;
    }
    return out;
  }
  out.x = detail::eig_term(k, a, b, g, 0, 0, 2);
  out.theta = detail::eig_term(k, a, b, g, 1, 0, 0);
  if (!far) {
    const Vec2 bg = detail::base_gradq(k, g);
    out.x += -bg.x - detail::bracket_term(k, g, 0, 0, 2);
    out.theta += -bg.theta - detail::bracket_term(k, g, 1, 0, 0);
  }
  return out;
}

/** \brief Mixed second derivatives H(a,b) = d/dp_a d/dq_b E, order (x, theta). */
inline Eigen::Matrix2d kernel_hess_E(const GreenKernel& k, const PointData& a,
                                     const PointData& b, KernelRoute route = KernelRoute::Auto) {
  const detail::KernelGeom g = detail::kernel_geom(k, a.p, b.p);
  detail::check_separation(g);
  const bool far = detail::use_modes(k, g, route);
  auto mode_hess = [&](auto term) {
    Eigen::Matrix2d H;
    H(0, 0) = term(0, 0, 3);
    H(0, 1) = term(0, 1, 2);
    H(1, 0) = term(1, 0, 1);
    H(1, 1) = term(1, 1, 0);
    return H;
  };
  auto bracket = [&](int dp, int dq, int dx) { return detail::bracket_term(k, g, dp, dq, dx); };
  if (k.es.constant_V)
    return far ? mode_hess(bracket) : detail::base_hess(k, g);
  auto eig = [&](int dp, int dq, int dx) { return detail::eig_term(k, a, b, g, dp, dq, dx); };
  Eigen::Matrix2d H = mode_hess(eig);
  if (!far) H += detail::base_hess(k, g) - mode_hess(bracket);
  return H;
}

/** \brief Coincidence limit of E(p, q) + log(dist) / (2 pi). */
inline double kernel_E_reg(const GreenKernel& k, const PointData& a) {
  double acc = -std::log(0.5 * k.sqrt_c) - euler_gamma;
  for (int n = 1; n <= k.n_img; ++n) {
    const double z = k.sqrt_c * n * k.es.ell;
    if (z > 700.0) break;
    acc += 2.0 * bessel_K0(z);
  }
  double val = acc / (2.0 * pi);
  if (!k.es.constant_V) {
    detail::KernelGeom g; // coincident: s = 0, delta = 0
    val += detail::eig_term(k, a, a, g, 0, 0, 0) - detail::bracket_term(k, g, 0, 0, 0);
  }
  return val;
}

// convenience overloads for single evaluations
inline double kernel_E(const GreenKernel& k, Vec2 p, Vec2 q, KernelRoute route = KernelRoute::Auto) {
  return kernel_E(k, kernel_point(k, p), kernel_point(k, q), route);
}
inline Vec2 kernel_gradq_E(const GreenKernel& k, Vec2 p, Vec2 q,
                           KernelRoute route = KernelRoute::Auto) {
  return kernel_gradq_E(k, kernel_point(k, p), kernel_point(k, q), route);
}
inline Vec2 kernel_gradp_E(const GreenKernel& k, Vec2 p, Vec2 q,
                           KernelRoute route = KernelRoute::Auto) {
  return kernel_gradp_E(k, kernel_point(k, p), kernel_point(k, q), route);
}
inline Eigen::Matrix2d kernel_hess_E(const GreenKernel& k, Vec2 p, Vec2 q,
                                     KernelRoute route = KernelRoute::Auto) {
  return kernel_hess_E(k, kernel_point(k, p), kernel_point(k, q), route);
}

// ---------------------------------------------------------------------------
// Residual of the defining equation, measured with a plain five-point finite
// difference stencil. Deliberately naive: it touches nothing but kernel
// values, so it cross-checks signs and normalization end to end.
// ---------------------------------------------------------------------------

struct FundamentalResidual {
  double h = 0.0;
  double residual = 0.0;
};

inline std::vector<FundamentalResidual> verify_fundamental(const GreenKernel& k,
                                                           const CylinderModel& cyl, Vec2 p0,
                                                           Vec2 q,
                                                           const std::vector<double>& hs) {
  std::vector<FundamentalResidual> out;
  const PointData a = kernel_point(k, p0);
  auto val = [&](double x, double th) { return kernel_E(k, a, kernel_point(k, {x, th})); };
  for (double h : hs) {
    const double center = val(q.x, q.theta);
    const double lap = (val(q.x + h, q.theta) + val(q.x - h, q.theta) + val(q.x, q.theta + h) +
                        val(q.x, q.theta - h) - 4.0 * center) /
                       (h * h);
    out.push_back({h, std::fabs(-lap + cyl.V(q.theta) * center)});
  }
  return out;
}

} // namespace cylbem
