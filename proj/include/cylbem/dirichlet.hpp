#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "cylbem/layerops.hpp"
#include "cylbem/taufamily.hpp"

namespace cylbem {

// ---------------------------------------------------------------------------
// Dirichlet solvers on top of the assembled layer operators: the interior
// problem via the second-kind system (-1/2 I + K) g = f represented as a
// double layer, the first-kind route S^{-1} f represented as a single layer,
// the Dirichlet-to-Neumann matrix (1/2 I + K*) S^{-1}, and the interior
// source variant u = (volume potential) + (boundary correction).
// ---------------------------------------------------------------------------

enum class Representation { Double, SingleSinv };

struct DirichletSolution {
  Representation kind = Representation::Double;
  Eigen::VectorXd f;       // boundary data at the nodes
  Eigen::VectorXd density; // solved layer density
  double condition = 0.0;  // power-iteration estimate for the solved system
  double residual = 0.0;   // linear-system residual, infinity norm
};

namespace detail {

// deterministic two-sided power iteration; an order-of-magnitude estimate is
// all the threshold checks need
inline double estimate_condition(const Eigen::MatrixXd& A,
                                 const Eigen::PartialPivLU<Eigen::MatrixXd>& lu) {
  const int n = static_cast<int>(A.rows());
  const Eigen::PartialPivLU<Eigen::MatrixXd> luT(A.transpose().eval());
  Eigen::VectorXd v(n), w(n);
  for (int i = 0; i < n; ++i) {
    v(i) = 1.0 + 0.3 * std::sin(1.7 * i + 0.4);
    w(i) = std::cos(2.3 * i) + 0.1;
  }
  v.normalize();
  w.normalize();
  double smax = 0.0, sinv = 0.0;
  for (int it = 0; it < 40; ++it) {
    v = A.transpose() * (A * v);
    smax = std::sqrt(v.norm());
    v /= v.norm();
    w = lu.solve(luT.solve(w));
    sinv = std::sqrt(w.norm());
    w /= w.norm();
  }
  return smax * sinv;
}

inline void require_condition(double cond, const char* what) {
  if (!(cond < 1e10)) throw IllConditioned(what);
}

} // namespace detail

inline double interior_condition(const LayerOperatorSet& ops) {
  const int n = static_cast<int>(ops.K.rows());
  const Eigen::MatrixXd A = -0.5 * Eigen::MatrixXd::Identity(n, n) + ops.K;
  return detail::estimate_condition(A, Eigen::PartialPivLU<Eigen::MatrixXd>(A));
}

inline DirichletSolution solve_dirichlet(const LayerOperatorSet& ops, const Eigen::VectorXd& f) {
  const int n = static_cast<int>(ops.K.rows());
  const Eigen::MatrixXd A = -0.5 * Eigen::MatrixXd::Identity(n, n) + ops.K;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  DirichletSolution sol;
  sol.kind = Representation::Double;
  sol.f = f;
  sol.condition = detail::estimate_condition(A, lu);
  detail::require_condition(sol.condition, "interior system -1/2 I + K");
  sol.density = lu.solve(f);
  sol.residual = (A * sol.density - f).lpNorm<Eigen::Infinity>();
  return sol;
}

inline DirichletSolution ssinv_solve(const LayerOperatorSet& ops, const Eigen::VectorXd& f) {
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(ops.S);
  DirichletSolution sol;
  sol.kind = Representation::SingleSinv;
  sol.f = f;
  sol.condition = detail::estimate_condition(ops.S, lu);
  detail::require_condition(sol.condition, "single-layer system S");
  sol.density = lu.solve(f);
  sol.residual = (ops.S * sol.density - f).lpNorm<Eigen::Infinity>();
  return sol;
}

inline double eval_solution(const LayerOperatorSet& ops, const DirichletSolution& sol, Vec2 p,
                            double quad_tol = 1e-11) {
  return sol.kind == Representation::Double ? eval_double(ops.ctx, sol.density, p, quad_tol)
                                            : eval_single(ops.ctx, sol.density, p, quad_tol);
}

/** \brief Interior normal derivative at node i from one-sided offsets of the
 *  representation, using the known trace f(p_i) at t = 0. */
inline double normal_derivative(const LayerOperatorSet& ops, const DirichletSolution& sol, int i,
                                double t0 = 0.02) {
  const BoundaryNode& nd = ops.ctx.disc.nodes[i];
  auto D = [&](double t) {
    const Vec2 z{nd.point.x - t * nd.normal.x, nd.point.theta - t * nd.normal.theta};
    return (sol.f(i) - eval_solution(ops, sol, z, 1e-12)) / t;
  };
  return (8.0 * D(t0 / 4) - 6.0 * D(t0 / 2) + D(t0)) / 3.0;
}

// ---------------------------------------------------------------------------
// Dirichlet-to-Neumann map.
// ---------------------------------------------------------------------------

struct DtNReport {
  Eigen::MatrixXd N;            // (1/2 I + K*) S^{-1}
  double condition_S = 0.0;
  double symmetry_defect = 0.0; // relative skew part of D_w N
  double min_quadform = std::numeric_limits<double>::infinity(); // min of <Nf,f>_w / <f,f>_w
};

inline DtNReport dtn(const LayerOperatorSet& ops, int quadform_samples = 100,
                     unsigned seed = 7) {
  const int n = static_cast<int>(ops.S.rows());
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(ops.S);
  DtNReport rep;
  rep.condition_S = detail::estimate_condition(ops.S, lu);
  detail::require_condition(rep.condition_S, "single-layer system S");
  rep.N = (0.5 * Eigen::MatrixXd::Identity(n, n) + ops.Kstar) * lu.inverse();

  const Eigen::VectorXd w = node_weights(ops.ctx);
  const Eigen::MatrixXd B = w.asDiagonal() * rep.N;
  rep.symmetry_defect = (B - B.transpose()).norm() / B.norm();

  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss;
  for (int s = 0; s < quadform_samples; ++s) {
    Eigen::VectorXd f(n);
    for (int i = 0; i < n; ++i) f(i) = gauss(rng);
    const double num = f.dot(B * f);
    const double den = f.dot(w.asDiagonal() * f);
    rep.min_quadform = std::min(rep.min_quadform, num / den);
  }
  return rep;
}

/** \brief Modewise DtN on the straight two-line strip: (1/2 I + K_tau^T) S_tau^{-1}. */
inline Eigen::Matrix2d strip_dtn_symbol(const Eigensystem& es, double alpha, double beta,
                                        double tau) {
  const TauMatrices tm = tau_layer_matrices(es, alpha, beta, tau);
  return (0.5 * Eigen::Matrix2d::Identity() + tm.K.transpose()) * tm.S.inverse();
}

// ---------------------------------------------------------------------------
// Pure-cylinder Fourier solve: cosine modes in x, a 2x2 system per mode. The
// synthesis over a supplied mode list is the inverse transform; it doubles
// as the oracle for the truncated dense solver on straight boundaries.
// ---------------------------------------------------------------------------

struct StripMode {
  double xi = 0.0;
  Eigen::Vector2d fhat = Eigen::Vector2d::Zero(); // data amplitude per line
};

struct StripFourierSolution {
  Eigensystem es;
  double alpha = 0.0, beta = 0.0;
  std::vector<StripMode> modes;
  std::vector<Eigen::Vector2d> densities;

  double density(int line, double x) const {
    double s = 0.0;
    for (std::size_t m = 0; m < modes.size(); ++m)
      s += densities[m](line) * std::cos(modes[m].xi * x);
    return s;
  }
  double value(double x, double theta) const {
    double s = 0.0;
    for (std::size_t m = 0; m < modes.size(); ++m)
      s += std::cos(modes[m].xi * x) * tau_double_eval(es, modes[m].xi, alpha, beta,
                                                       densities[m](0), densities[m](1), theta);
    return s;
  }
};

inline StripFourierSolution solve_strip_fourier(const Eigensystem& es, double alpha, double beta,
                                                const std::vector<StripMode>& modes) {
  StripFourierSolution sol{es, alpha, beta, modes, {}};
  sol.densities.reserve(modes.size());
  for (const StripMode& m : modes) {
    const TauMatrices tm = tau_layer_matrices(es, alpha, beta, m.xi);
    const Eigen::Matrix2d A = -0.5 * Eigen::Matrix2d::Identity() + tm.K;
    if (std::fabs(A.determinant()) < 1e-14) throw SingularFamily("mode system is singular");
    sol.densities.push_back(A.inverse() * m.fhat);
  }
  return sol;
}

// ---------------------------------------------------------------------------
// Well-posedness with an interior source: u = volume potential + boundary
// correction. The volume quadrature is tensor Gauss-Legendre on cells of the
// support box, with dyadic refinement of cells near the evaluation point.
// ---------------------------------------------------------------------------

struct SourceTerm {
  std::function<double(double, double)> g; // g(x, theta), zero outside the box
  double x_lo = 0.0, x_hi = 0.0;
  double th_lo = 0.0, th_hi = 0.0; // one chart, no wrap across theta = 0
};

inline double volume_potential(const GreenKernel& kern, const SourceTerm& src, Vec2 p,
                               double h = 1.0 / 64) {
  const PointData tp = kernel_point(kern, p);
  static const GaussRule g4 = gauss_legendre(4);

  auto cell = [&](double ax, double bx, double at, double bt) {
    const GaussRule gx = gauss_on(g4, ax, bx);
    const GaussRule gt = gauss_on(g4, at, bt);
    double s = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        const Vec2 q{gx.x[i], gt.x[j]};
        const double val = src.g(q.x, q.theta);
        if (val == 0.0 || cylinder_dist(p, q, kern.es.ell) < 1e-12) continue;
        s += kernel_E(kern, tp, kernel_point(kern, q)) * val * gx.w[i] * gt.w[j];
      }
    return s;
  };
  const std::function<double(double, double, double, double, int)> rec =
      [&](double ax, double bx, double at, double bt, int depth) {
        const double diag = std::hypot(bx - ax, bt - at);
        const double dx = std::max({0.0, ax - p.x, p.x - bx});
        const double dt = std::max({0.0, at - p.theta, p.theta - bt});
        if (std::hypot(dx, dt) > 1.5 * diag || depth >= 10) return cell(ax, bx, at, bt);
        const double mx = 0.5 * (ax + bx), mt = 0.5 * (at + bt);
        return rec(ax, mx, at, mt, depth + 1) + rec(mx, bx, at, mt, depth + 1) +
               rec(ax, mx, mt, bt, depth + 1) + rec(mx, bx, mt, bt, depth + 1);
      };

  const int nx = std::max(1, static_cast<int>(std::ceil((src.x_hi - src.x_lo) / h)));
  const int nt = std::max(1, static_cast<int>(std::ceil((src.th_hi - src.th_lo) / h)));
  const double hx = (src.x_hi - src.x_lo) / nx, ht = (src.th_hi - src.th_lo) / nt;
  double acc = 0.0;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nt; ++j)
      acc += rec(src.x_lo + i * hx, src.x_lo + (i + 1) * hx, src.th_lo + j * ht,
                 src.th_lo + (j + 1) * ht, 0);
  return acc;
}

struct WellposedSolution {
  DirichletSolution boundary_part;
  SourceTerm src;
  double h = 1.0 / 64;
};

inline WellposedSolution wellposedness_solve(const LayerOperatorSet& ops, const SourceTerm& src,
                                             const Eigen::VectorXd& f, double h = 1.0 / 64) {
  const auto& nodes = ops.ctx.disc.nodes;
  for (const BoundaryNode& nd : nodes) {
    const double dx = std::max({0.0, src.x_lo - nd.point.x, nd.point.x - src.x_hi});
    const double dt = std::max({0.0, src.th_lo - nd.point.theta, nd.point.theta - src.th_hi});
    if (std::hypot(dx, dt) < 0.5) throw SourceTooClose("source support within 0.5 of the boundary");
  }
  Eigen::VectorXd u1(static_cast<int>(nodes.size()));
  for (int i = 0; i < u1.size(); ++i)
    u1(i) = volume_potential(ops.ctx.kern, src, nodes[i].point, h);
  WellposedSolution ws{solve_dirichlet(ops, f - u1), src, h};
  return ws;
}

inline double eval_wellposed(const LayerOperatorSet& ops, const WellposedSolution& ws, Vec2 p,
                             double quad_tol = 1e-11) {
  return volume_potential(ops.ctx.kern, ws.src, p, ws.h) +
         eval_solution(ops, ws.boundary_part, p, quad_tol);
}

} // namespace cylbem
