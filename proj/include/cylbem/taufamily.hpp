#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "cylbem/chebyshev.hpp"
#include "cylbem/errors.hpp"
#include "cylbem/spectrum.hpp"

namespace cylbem {

// ---------------------------------------------------------------------------
// The tau-family on the cross-section circle: for each tau, the operator
// A + tau^2 = -d^2/dtheta^2 + V + tau^2 restricted to an arc (alpha, beta),
// with its two-point boundary { alpha, beta }. Outward normals are -1 at
// alpha and +1 at beta. Layer operators become 2x2 matrices built from the
// circle Green's function g_tau.
// ---------------------------------------------------------------------------

struct TauMatrices {
  Eigen::Matrix2d S; // single layer: g(p_a, p_b)
  Eigen::Matrix2d K; // double layer: nu_b d/dtheta' g(p_a, p_b), principal value on the diagonal
};

inline TauMatrices tau_layer_matrices(const Eigensystem& es, double alpha, double beta,
                                      double tau) {
  const double p[2] = {alpha, beta};
  const double nu[2] = {-1.0, 1.0};
  TauMatrices t;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      t.S(a, b) = circle_green(es, tau, p[a], p[b]);
      t.K(a, b) = nu[b] * (a == b ? circle_green_dp_pv(es, tau, p[a])
                                  : circle_green_dp(es, tau, p[a], p[b]));
    }
  return t;
}

/** \brief Single-layer potential u(theta) = sum_b g(theta, p_b) h_b. */
inline double tau_single_eval(const Eigensystem& es, double tau, double alpha, double beta,
                              double h0, double h1, double theta) {
  return circle_green(es, tau, theta, alpha) * h0 + circle_green(es, tau, theta, beta) * h1;
}

/** \brief d/dtheta of the single-layer potential, away from the endpoints. */
inline double tau_single_deriv(const Eigensystem& es, double tau, double alpha, double beta,
                               double h0, double h1, double theta) {
  // by symmetry of g, d/dtheta g(theta, p) = (d/dtheta' g)(p, theta)
  return circle_green_dp(es, tau, alpha, theta) * h0 + circle_green_dp(es, tau, beta, theta) * h1;
}

/** \brief Double-layer potential u(theta) = sum_b nu_b (d/dtheta' g)(theta, p_b) h_b. */
inline double tau_double_eval(const Eigensystem& es, double tau, double alpha, double beta,
                              double h0, double h1, double theta) {
  return -circle_green_dp(es, tau, theta, alpha) * h0 + circle_green_dp(es, tau, theta, beta) * h1;
}

// ---------------------------------------------------------------------------
// Independent oracle: Chebyshev collocation for the two-point boundary value
// problem -u'' + (W + tau^2) u = 0 on (alpha, beta), u(alpha) = f_alpha,
// u(beta) = f_beta. Grid index 0 is at beta (x = +1), index N at alpha.
// ---------------------------------------------------------------------------

struct ArcSolution {
  double alpha = 0.0, beta = 0.0;
  std::vector<double> nodes; // theta at the collocation points, descending from beta
  Eigen::VectorXcd u;
  Eigen::VectorXcd du; // d u / d theta at the nodes
  std::complex<double> dnu_alpha{}, dnu_beta{}; // outward normal derivatives
};

inline ArcSolution solve_arc_dirichlet_oracle(const std::function<double(double)>& W,
                                              double alpha, double beta, double tau,
                                              std::complex<double> f_alpha,
                                              std::complex<double> f_beta, int N = 256) {
  const auto x = cheb_points(N);
  const double half = 0.5 * (beta - alpha);
  ArcSolution sol;
  sol.alpha = alpha;
  sol.beta = beta;
  sol.nodes.resize(N + 1);
  for (int j = 0; j <= N; ++j) sol.nodes[j] = alpha + half * (x[j] + 1.0);

  const Eigen::MatrixXd D = cheb_diff(N) / half;
  Eigen::MatrixXd L = -(D * D);
  for (int j = 0; j <= N; ++j) L(j, j) += tau * tau + W(sol.nodes[j]);
  L.row(0).setZero();
  L(0, 0) = 1.0;
  L.row(N).setZero();
  L(N, N) = 1.0;

  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(N + 1, 2);
  rhs(0, 0) = f_beta.real();
  rhs(0, 1) = f_beta.imag();
  rhs(N, 0) = f_alpha.real();
  rhs(N, 1) = f_alpha.imag();

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(L);
  const Eigen::MatrixXd sol2 = lu.solve(rhs);
  const double scale = std::max({1.0, std::abs(f_alpha), std::abs(f_beta)});
  if (!sol2.allFinite() || sol2.cwiseAbs().maxCoeff() > 1e12 * scale ||
      (L * sol2 - rhs).cwiseAbs().maxCoeff() > 1e-7 * scale)
    throw SolveFailure("arc collocation solve did not converge");

  sol.u = sol2.col(0).cast<std::complex<double>>() +
          std::complex<double>(0, 1) * sol2.col(1).cast<std::complex<double>>();
  const Eigen::MatrixXd dsol = D * sol2;
  sol.du = dsol.col(0).cast<std::complex<double>>() +
           std::complex<double>(0, 1) * dsol.col(1).cast<std::complex<double>>();
  sol.dnu_beta = sol.du(0);    // outward at beta is +d/dtheta
  sol.dnu_alpha = -sol.du(N);  // outward at alpha is -d/dtheta
  return sol;
}

// ---------------------------------------------------------------------------
// Boundary-vs-interior identities on the arc. Both are exact for any C^2
// complex u and C^1 real w; the checks report |lhs - rhs| computed with
// spectral quadrature.
// ---------------------------------------------------------------------------

struct RellichResult {
  double residual_gradient = 0.0; // identity pairing w against |u'|^2
  double residual_value = 0.0;    // identity pairing w against |u|^2
};

inline RellichResult rellich_check(double alpha, double beta,
                                   const std::function<std::complex<double>(double)>& u,
                                   const std::function<std::complex<double>(double)>& du,
                                   const std::function<std::complex<double>(double)>& d2u,
                                   const std::function<double(double)>& w,
                                   const std::function<double(double)>& dw, int N = 256) {
  const auto x = cheb_points(N);
  const double half = 0.5 * (beta - alpha);
  Eigen::VectorXd grad_integrand(N + 1), value_integrand(N + 1);
  for (int j = 0; j <= N; ++j) {
    const double th = alpha + half * (x[j] + 1.0);
    const std::complex<double> uj = u(th), duj = du(th), d2uj = d2u(th);
    grad_integrand(j) = dw(th) * std::norm(duj) + 2.0 * w(th) * std::real(std::conj(duj) * d2uj);
    value_integrand(j) = dw(th) * std::norm(uj) + 2.0 * w(th) * std::real(std::conj(uj) * duj);
  }
  const double grad_interior = half * cheb_integrate(grad_integrand);
  const double value_interior = half * cheb_integrate(value_integrand);
  // boundary sums with outward normals nu(alpha) = -1, nu(beta) = +1
  const double grad_boundary = w(beta) * std::norm(du(beta)) - w(alpha) * std::norm(du(alpha));
  const double value_boundary = w(beta) * std::norm(u(beta)) - w(alpha) * std::norm(u(alpha));
  return {std::fabs(grad_boundary - grad_interior), std::fabs(value_boundary - value_interior)};
}

// ---------------------------------------------------------------------------
// Energy and trace ratios for solutions of -u'' + (W + tau^2) u = 0.
// r8 <= 1 exactly (integration by parts plus Cauchy-Schwarz); the others
// stay O(1) across tau and data, which the tests pin down empirically.
// ---------------------------------------------------------------------------

struct EstimateSample {
  double r4 = 0.0;  // tau^2 ||u||^2 over the boundary pairing
  double r5 = 0.0;  // ||u'||^2 over the boundary pairing
  double r6 = 0.0;  // (1 + tau^2) boundary values over boundary fluxes
  double r8 = 0.0;  // full energy over the boundary pairing, <= 1
  double r17 = 0.0; // Poincare-type: ||u||^2 over scaled gradient + trace
  bool degenerate = false;
};

inline EstimateSample estimate_suite(const std::function<double(double)>& W, double alpha,
                                     double beta, double tau, std::complex<double> f_alpha,
                                     std::complex<double> f_beta, int N = 256) {
  const ArcSolution sol = solve_arc_dirichlet_oracle(W, alpha, beta, tau, f_alpha, f_beta, N);
  const double half = 0.5 * (beta - alpha);
  Eigen::VectorXd u2(N + 1), du2(N + 1), wu2(N + 1);
  for (int j = 0; j <= N; ++j) {
    u2(j) = std::norm(sol.u(j));
    du2(j) = std::norm(sol.du(j));
    wu2(j) = (tau * tau + W(sol.nodes[j])) * u2(j);
  }
  const double int_u2 = half * cheb_integrate(u2);
  const double int_du2 = half * cheb_integrate(du2);
  const double int_energy = int_du2 + half * cheb_integrate(wu2);

  const double ua = std::abs(f_alpha), ub = std::abs(f_beta);
  const double na = std::abs(sol.dnu_alpha), nb = std::abs(sol.dnu_beta);
  const double pairing = ua * na + ub * nb;
  const double traces = ua * ua + ub * ub;
  const double fluxes = na * na + nb * nb;
  const double len = beta - alpha;

  EstimateSample e;
  if (pairing < 1e-14 || fluxes < 1e-14) {
    e.degenerate = true;
    return e;
  }
  e.r4 = tau * tau * int_u2 / pairing;
  e.r5 = int_du2 / pairing;
  e.r6 = (1.0 + tau * tau) * traces / fluxes;
  e.r8 = int_energy / pairing;
  e.r17 = int_u2 / (len * len * int_du2 + len * traces);
  return e;
}

// ---------------------------------------------------------------------------
// Uniform-in-tau invertibility sweep. Operator norms of the 2x2 inverses via
// singular values; the single-layer inverse is measured H^1_tau -> L^2, i.e.
// scaled by 1/(1 + |tau|).
// ---------------------------------------------------------------------------

struct SweepRow {
  double tau = 0.0;
  double norm_S_inv = 0.0;     // || S_tau^{-1} ||, H^1_tau -> L^2
  double norm_halfK_inv = 0.0; // || (-1/2 I + K_tau)^{-1} ||, L^2 -> L^2
  double cond_S = 0.0;
  double cond_halfK = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double sup_norm_S_inv = 0.0;
  double sup_norm_halfK_inv = 0.0;
};

inline SweepResult uniform_bound_sweep(const Eigensystem& es, double alpha, double beta,
                                       double tau_min, double tau_max, double step) {
  SweepResult res;
  const int n = static_cast<int>(std::lround((tau_max - tau_min) / step));
  for (int i = 0; i <= n; ++i) {
    const double tau = tau_min + i * step;
    const TauMatrices t = tau_layer_matrices(es, alpha, beta, tau);
    const Eigen::Matrix2d half_K = -0.5 * Eigen::Matrix2d::Identity() + t.K;
    Eigen::JacobiSVD<Eigen::Matrix2d> svd_S(t.S);
    Eigen::JacobiSVD<Eigen::Matrix2d> svd_K(half_K);
    SweepRow row;
    row.tau = tau;
    const double s_min = svd_S.singularValues()(1), s_max = svd_S.singularValues()(0);
    const double k_min = svd_K.singularValues()(1), k_max = svd_K.singularValues()(0);
    if (s_min <= 0 || k_min <= 0 || s_max / s_min > 1e12 || k_max / k_min > 1e12)
      throw SingularFamily("layer family degenerates near tau = " + std::to_string(tau));
    row.norm_S_inv = 1.0 / s_min / (1.0 + std::fabs(tau));
    row.norm_halfK_inv = 1.0 / k_min;
    row.cond_S = s_max / s_min;
    row.cond_halfK = k_max / k_min;
    res.sup_norm_S_inv = std::max(res.sup_norm_S_inv, row.norm_S_inv);
    res.sup_norm_halfK_inv = std::max(res.sup_norm_halfK_inv, row.norm_halfK_inv);
    res.rows.push_back(row);
  }
  return res;
}

inline void write_sweep_csv(std::ostream& out, const SweepResult& res) {
  out << "tau,norm_S_inv,norm_halfK_inv,cond_S,cond_halfK\n";
  out.precision(17);
  for (const SweepRow& r : res.rows)
    out << r.tau << ',' << r.norm_S_inv << ',' << r.norm_halfK_inv << ',' << r.cond_S << ','
        << r.cond_halfK << '\n';
}

} // namespace cylbem
