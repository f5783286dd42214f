#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "cylbem/errors.hpp"
#include "cylbem/model.hpp"
#include "cylbem/special.hpp"

namespace cylbem {

// ---------------------------------------------------------------------------
// Eigensystem of the cross-section operator A = -d^2/dtheta^2 + V on S^1_ell,
// discretized by Galerkin projection onto the real trigonometric basis
//   b_0 = 1/sqrt(ell), b_{2k-1} = sqrt(2/ell) cos(k w th), b_{2k} = sqrt(2/ell) sin(k w th)
// for k = 1..m. The projection is assembled exactly: V is a trigonometric
// polynomial, so a periodic trapezoid rule with enough points integrates
// every matrix entry without aliasing error.
// ---------------------------------------------------------------------------

struct Eigensystem {
  double ell = 2.0 * pi;
  double omega = 1.0;
  int mode_cutoff = 0;  // m
  int dim = 0;          // 2m + 1
  Eigen::VectorXd mu;   // eigenvalues, ascending
  Eigen::MatrixXd U;    // column j = coordinates of eigenfunction j in the trig basis
  int n_validated = 0;  // leading eigenvalues stable under doubling the cutoff
  bool constant_V = false;
  double mean_V = 0.0;
};

namespace detail {

inline void trig_basis(double ell, double omega, int m, double theta, Eigen::VectorXd& b) {
  b.resize(2 * m + 1);
  b(0) = 1.0 / std::sqrt(ell);
  const double amp = std::sqrt(2.0 / ell);
  for (int k = 1; k <= m; ++k) {
    b(2 * k - 1) = amp * std::cos(k * omega * theta);
    b(2 * k) = amp * std::sin(k * omega * theta);
  }
}

inline void trig_basis_d1(double ell, double omega, int m, double theta, Eigen::VectorXd& db) {
  db.resize(2 * m + 1);
  db(0) = 0.0;
  const double amp = std::sqrt(2.0 / ell);
  for (int k = 1; k <= m; ++k) {
    db(2 * k - 1) = -amp * k * omega * std::sin(k * omega * theta);
    db(2 * k) = amp * k * omega * std::cos(k * omega * theta);
  }
}

inline Eigen::MatrixXd galerkin_matrix(const CylinderModel& cyl, int m) {
  const double ell = cyl.circumference;
  const double omega = cyl.omega();
  const int dim = 2 * m + 1;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
  for (int k = 1; k <= m; ++k) {
    const double t = (k * omega) * (k * omega);
    H(2 * k - 1, 2 * k - 1) = t;
    H(2 * k, 2 * k) = t;
  }
  // product of two basis functions and V has trig degree <= 2m + deg V
  const int N = 4 * m + 4 * cyl.potential.degree() + 8;
  Eigen::VectorXd b;
  for (int i = 0; i < N; ++i) {
    const double theta = ell * i / N;
    const double v = cyl.V(theta) * ell / N;
    trig_basis(ell, omega, m, theta, b);
    H.selfadjointView<Eigen::Lower>().rankUpdate(b, v);
  }
  return H.selfadjointView<Eigen::Lower>();
}

} // namespace detail

inline Eigensystem compute_eigensystem(const CylinderModel& cyl) {
  Eigensystem es;
  es.ell = cyl.circumference;
  es.omega = cyl.omega();
  es.mode_cutoff = cyl.mode_cutoff;
  es.dim = 2 * cyl.mode_cutoff + 1;
  es.constant_V = cyl.potential.is_constant();
  es.mean_V = cyl.potential.mean();

  const Eigen::MatrixXd H = detail::galerkin_matrix(cyl, cyl.mode_cutoff);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H);
  if (solver.info() != Eigen::Success)
    throw Error("eigensolver failed on the cross-section operator");
  es.mu = solver.eigenvalues();
  es.U = solver.eigenvectors();
  if (es.mu(0) <= 1e-10)
    throw NonPositiveGroundState("ground state " + std::to_string(es.mu(0)));

  // validated prefix: eigenvalues that are already converged at this cutoff,
  // certified against the doubled-cutoff projection
  const Eigen::MatrixXd H2 = detail::galerkin_matrix(cyl, 2 * cyl.mode_cutoff);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver2(H2, Eigen::EigenvaluesOnly);
  es.n_validated = 0;
  for (int j = 0; j < es.dim; ++j) {
    const double err = std::fabs(es.mu(j) - solver2.eigenvalues()(j));
    if (err > 1e-8 * (1.0 + std::fabs(es.mu(j)))) break;
    es.n_validated = j + 1;
  }
  return es;
}

// ---------------------------------------------------------------------------
// Eigenfunction evaluation
// ---------------------------------------------------------------------------

/** \brief Values and first derivatives of all eigenfunctions at one angle. */
struct ModeTable {
  Eigen::VectorXd phi;
  Eigen::VectorXd dphi;
};

inline ModeTable eval_modes(const Eigensystem& es, double theta) {
  Eigen::VectorXd b, db;
  detail::trig_basis(es.ell, es.omega, es.mode_cutoff, theta, b);
  detail::trig_basis_d1(es.ell, es.omega, es.mode_cutoff, theta, db);
  ModeTable t;
  t.phi = es.U.transpose() * b;
  t.dphi = es.U.transpose() * db;
  return t;
}

inline double eig_phi(const Eigensystem& es, int j, double theta) {
  Eigen::VectorXd b;
  detail::trig_basis(es.ell, es.omega, es.mode_cutoff, theta, b);
  return es.U.col(j).dot(b);
}

inline double eig_dphi(const Eigensystem& es, int j, double theta) {
  Eigen::VectorXd db;
  detail::trig_basis_d1(es.ell, es.omega, es.mode_cutoff, theta, db);
  return es.U.col(j).dot(db);
}

// ---------------------------------------------------------------------------
// Indicial resolvent norms (A + tau^2)^{-1}
// ---------------------------------------------------------------------------

struct ResolventNorms {
  double l2 = 0.0;       // L^2 -> L^2
  double l2_to_h2 = 0.0; // L^2 -> H^2 with the graph norm of A
};

inline ResolventNorms indicial_resolvent_norm(const Eigensystem& es, double tau) {
  ResolventNorms r;
  r.l2 = 1.0 / (es.mu(0) + tau * tau);
  for (int j = 0; j < es.dim; ++j)
    r.l2_to_h2 = std::max(r.l2_to_h2, (1.0 + es.mu(j)) / (es.mu(j) + tau * tau));
  return r;
}

// ---------------------------------------------------------------------------
// Green's function of A + tau^2 on the cross-section circle.
//
// Split form: the exact closed-form Green's function for the averaged
// potential carries the kink at theta = theta', and a smooth spectral
// correction accounts for V - mean(V):
//   g = closed(c) + [ sum_j phi_j phi_j' / (mu_j + tau^2) - truncated closed modes ].
// The two truncated sums share their tails, so the correction converges fast;
// it vanishes identically when V is constant.
// ---------------------------------------------------------------------------

namespace detail {

// cosh(lambda (ell/2 - d)) / (2 lambda sinh(lambda ell/2)), overflow-safe
inline double ring_green_closed(double lambda, double d, double ell) {
  const double e1 = std::exp(-lambda * d);
  const double e2 = std::exp(-lambda * (ell - d));
  return (e1 + e2) / (2.0 * lambda * (1.0 - std::exp(-lambda * ell)));
}

// derivative of the closed form with respect to d
inline double ring_green_closed_dd(double lambda, double d, double ell) {
  const double e1 = std::exp(-lambda * d);
  const double e2 = std::exp(-lambda * (ell - d));
  return (-e1 + e2) / (2.0 * (1.0 - std::exp(-lambda * ell)));
}

} // namespace detail

/** \brief Smooth part of g_tau; defined for all (theta, theta') including coincidence. */
inline double circle_green_corr(const Eigensystem& es, double tau, double theta, double theta_p) {
  if (es.constant_V) return 0.0;
  const ModeTable ta = eval_modes(es, theta);
  const ModeTable tb = eval_modes(es, theta_p);
  const double t2 = tau * tau;
  double s = 0.0;
  for (int j = 0; j < es.dim; ++j) s += ta.phi(j) * tb.phi(j) / (es.mu(j) + t2);
  const double c = es.mean_V;
  const double delta = reduce_angle(theta - theta_p, es.ell);
  double ref = (1.0 / es.ell) / (c + t2);
  for (int k = 1; k <= es.mode_cutoff; ++k) {
    const double ko = k * es.omega;
    ref += (2.0 / es.ell) * std::cos(ko * delta) / (c + ko * ko + t2);
  }
  return s - ref;
}

/** \brief d/dtheta' of the smooth part. */
inline double circle_green_corr_dp(const Eigensystem& es, double tau, double theta,
                                   double theta_p) {
  if (es.constant_V) return 0.0;
  const ModeTable ta = eval_modes(es, theta);
  const ModeTable tb = eval_modes(es, theta_p);
  const double t2 = tau * tau;
  double s = 0.0;
  for (int j = 0; j < es.dim; ++j) s += ta.phi(j) * tb.dphi(j) / (es.mu(j) + t2);
  const double c = es.mean_V;
  const double delta = reduce_angle(theta - theta_p, es.ell);
  double ref = 0.0;
  for (int k = 1; k <= es.mode_cutoff; ++k) {
    const double ko = k * es.omega;
    ref += (2.0 / es.ell) * ko * std::sin(ko * delta) / (c + ko * ko + t2);
  }
  return s - ref;
}

/** \brief g_tau(theta, theta'): Green's function of A + tau^2 on the circle. */
inline double circle_green(const Eigensystem& es, double tau, double theta, double theta_p) {
  const double lambda = std::sqrt(es.mean_V + tau * tau);
  const double d = std::fabs(reduce_angle(theta - theta_p, es.ell));
  return detail::ring_green_closed(lambda, d, es.ell) + circle_green_corr(es, tau, theta, theta_p);
}

/** \brief d/dtheta' of g_tau away from coincidence. */
inline double circle_green_dp(const Eigensystem& es, double tau, double theta, double theta_p) {
  const double lambda = std::sqrt(es.mean_V + tau * tau);
  const double delta = reduce_angle(theta - theta_p, es.ell);
  const double d = std::fabs(delta);
  if (d < 1e-14) throw CoincidentPoints("circle_green_dp at coincidence");
  // d(d)/dtheta' = -sign(delta)
  const double closed_dp =
      -detail::ring_green_closed_dd(lambda, d, es.ell) * (delta > 0 ? 1.0 : -1.0);
  return closed_dp + circle_green_corr_dp(es, tau, theta, theta_p);
}

/** \brief Principal value of d/dtheta' at theta' = theta (mean of one-sided limits). */
inline double circle_green_dp_pv(const Eigensystem& es, double tau, double theta) {
  return circle_green_corr_dp(es, tau, theta, theta);
}

} // namespace cylbem
