#include <cmath>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "cylbem/dirichlet.hpp"

using namespace cylbem;

namespace {

CylinderModel unit_cyl(int m = 16) {
  CylinderModel cyl;
  cyl.mode_cutoff = m;
  cyl.potential.fourier_cos = {1.0};
  return cyl;
}

Curve circle_curve(double r = 0.5, double x0 = 0.0, double th0 = pi) {
  Curve c;
  c.kind = Curve::Kind::Closed;
  c.interior = Curve::Side::Inside;
  c.x0 = x0;
  c.theta0 = th0;
  c.x_cos = {r};
  c.theta_sin = {r};
  finalize_curve(c);
  return c;
}

struct Setup {
  Model model;
  Eigensystem es;
  LayerOperatorSet ops;
};

Setup circle_setup(int n, bool cosine_potential = false, int m = 16) {
  Model md;
  md.cyl = unit_cyl(m);
  if (cosine_potential) md.cyl.potential.fourier_cos = {1.0, 1.0};
  md.region.curves = {circle_curve()};
  Eigensystem es = compute_eigensystem(md.cyl);
  DiscretizeOptions opts;
  opts.n_closed = n;
  const Discretization disc = discretize(md, es, opts);
  return {md, es, assemble_operators(make_kernel(es), disc)};
}

Setup strip_setup(double halflength, double bump_amp = 0.0, double bump_halfwidth = 1.25) {
  Model md;
  md.cyl = unit_cyl(16);
  Curve lower;
  lower.kind = Curve::Kind::Graph;
  lower.level = 0.0;
  lower.interior = Curve::Side::Above;
  Curve upper;
  upper.kind = Curve::Kind::Graph;
  upper.level = pi;
  upper.interior = Curve::Side::Below;
  if (bump_amp != 0.0) upper.bump = {bump_amp, 0.0, bump_halfwidth};
  md.region.curves = {lower, upper};
  Eigensystem es = compute_eigensystem(md.cyl);
  DiscretizeOptions opts;
  opts.graph_halflength = halflength;
  const Discretization disc = discretize(md, es, opts);
  return {md, es, assemble_operators(make_kernel(es), disc)};
}

Eigen::VectorXd sample_kernel_data(const LayerOperatorSet& ops, Vec2 p0) {
  const PointData pd = kernel_point(ops.ctx.kern, p0);
  Eigen::VectorXd f(static_cast<int>(ops.ctx.disc.nodes.size()));
  for (int i = 0; i < f.size(); ++i) f(i) = kernel_E(ops.ctx.kern, ops.ctx.pdata[i], pd);
  return f;
}

std::vector<Vec2> circle_probes(double radius, int count) {
  std::vector<Vec2> out;
  for (int k = 0; k < count; ++k) {
    const double a = 2.0 * pi * k / count;
    out.push_back({radius * std::cos(a), pi + radius * std::sin(a)});
  }
  return out;
}

// compactly supported radial bump and its (Delta + V) image for V = 1
struct BumpSource {
  double cx, cth, R;
  double psi(double x, double th) const {
    const double rho = std::hypot(x - cx, th - cth) / R;
    if (rho >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - rho * rho));
  }
  double g(double x, double th) const {
    const double rho = std::hypot(x - cx, th - cth) / R;
    if (rho >= 1.0) return 0.0;
    const double s = 1.0 - rho * rho;
    const double p = psi(x, th);
    const double dp = -2.0 * rho / (s * s) * p;
    const double ddp = (4.0 * rho * rho / (s * s * s * s) - 2.0 / (s * s) -
                        8.0 * rho * rho / (s * s * s)) *
                       p;
    const double lap = rho < 1e-12 ? 2.0 * ddp / (R * R) : (ddp + dp / rho) / (R * R);
    return -lap + p; // positive Laplacian plus V = 1
  }
};

} // namespace

TEST_CASE("manufactured solution on the circle", "[dirichlet]") {
  Setup s = circle_setup(256);
  const Vec2 p0{1.2, pi};
  const Eigen::VectorXd f = sample_kernel_data(s.ops, p0);

  const DirichletSolution sol = solve_dirichlet(s.ops, f);
  CHECK(sol.condition < 100.0);
  CHECK(sol.residual <= 1e-12);

  const PointData p0d = kernel_point(s.ops.ctx.kern, p0);
  double rel = 0.0;
  for (const Vec2& p : circle_probes(0.2, 20)) {
    const double exact = kernel_E(s.ops.ctx.kern, kernel_point(s.ops.ctx.kern, p), p0d);
    rel = std::max(rel, std::fabs(eval_solution(s.ops, sol, p) - exact) / std::fabs(exact));
  }
  CHECK(rel <= 1e-6);

  const DirichletSolution zero = solve_dirichlet(s.ops, Eigen::VectorXd::Zero(f.size()));
  CHECK(zero.density.lpNorm<Eigen::Infinity>() <= 1e-15);
}

TEST_CASE("representation equivalence and Green closure", "[dirichlet]") {
  Setup s = circle_setup(256);
  const Vec2 p0{1.2, pi};
  const Eigen::VectorXd f = sample_kernel_data(s.ops, p0);

  const DirichletSolution dsol = solve_dirichlet(s.ops, f);
  const DirichletSolution ssol = ssinv_solve(s.ops, f);
  const DtNReport rep = dtn(s.ops);
  const Eigen::VectorXd Nf = rep.N * f;

  const PointData p0d = kernel_point(s.ops.ctx.kern, p0);
  double rep_diff = 0.0, closure = 0.0;
  for (const Vec2& p : circle_probes(0.2, 20)) {
    const double ud = eval_solution(s.ops, dsol, p);
    const double us = eval_solution(s.ops, ssol, p);
    rep_diff = std::max(rep_diff, std::fabs(ud - us));
    const double exact = kernel_E(s.ops.ctx.kern, kernel_point(s.ops.ctx.kern, p), p0d);
    // Green's identity for the positive Laplacian with outward normal:
    // u = S(Nu) - D(u) inside the region
    const double green = eval_single(s.ops.ctx, Nf, p) - eval_double(s.ops.ctx, f, p);
    closure = std::max(closure, std::fabs(green - exact));
  }
  CHECK(rep_diff <= 1e-5);
  CHECK(closure <= 1e-4);
}

TEST_CASE("strip Fourier mode solve matches the closed form", "[dirichlet]") {
  const Eigensystem es = compute_eigensystem(unit_cyl(16));
  const double xi = 1.0, lam = std::sqrt(1.0 + xi * xi);
  const StripFourierSolution sol =
      solve_strip_fourier(es, 0.0, pi, {{xi, Eigen::Vector2d(1.0, 0.0)}});

  double err = 0.0;
  for (double x : {0.0, 0.7, -1.3})
    for (double th : {0.5, 1.5, 2.8}) {
      const double exact = std::cos(xi * x) * std::sinh(lam * (pi - th)) / std::sinh(lam * pi);
      err = std::max(err, std::fabs(sol.value(x, th) - exact));
    }
  CHECK(err <= 1e-8);
}

TEST_CASE("Fourier solve is decomposable and unitary", "[dirichlet]") {
  const Eigensystem es = compute_eigensystem(unit_cyl(16));
  std::vector<StripMode> modes = {{1.0, Eigen::Vector2d(0.8, 0.1)},
                                  {2.0, Eigen::Vector2d(0.0, 0.0)},
                                  {3.0, Eigen::Vector2d(-0.4, 0.6)}};
  const StripFourierSolution sol = solve_strip_fourier(es, 0.0, pi, modes);

  // a zero-data mode stays zero
  CHECK(sol.densities[1].norm() == 0.0);

  // Parseval over one x-period per line: trapezoid in x vs pi sum of squares
  const int grid = 4096;
  double xnorm = 0.0;
  for (int line = 0; line < 2; ++line)
    for (int k = 0; k < grid; ++k) {
      const double g = sol.density(line, 2.0 * pi * k / grid);
      xnorm += g * g * (2.0 * pi / grid);
    }
  double tnorm = 0.0;
  for (const Eigen::Vector2d& d : sol.densities) tnorm += pi * d.squaredNorm();
  CHECK(std::fabs(xnorm - tnorm) <= 1e-8 * tnorm);
}

TEST_CASE("dense strip solve matches the closed form", "[dirichlet]") {
  Setup s = strip_setup(20.0);
  const double xi = 1.0, lam = std::sqrt(1.0 + xi * xi);
  const auto& nodes = s.ops.ctx.disc.nodes;
  Eigen::VectorXd f(static_cast<int>(nodes.size()));
  for (int i = 0; i < f.size(); ++i)
    f(i) = nodes[i].patch == 0 ? std::cos(xi * nodes[i].param) : 0.0;

  const DirichletSolution sol = solve_dirichlet(s.ops, f);
  double err = 0.0;
  for (double x : {-1.0, 0.0, 1.0})
    for (double th : {0.8, 1.6, 2.4}) {
      const double exact = std::cos(xi * x) * std::sinh(lam * (pi - th)) / std::sinh(lam * pi);
      err = std::max(err, std::fabs(eval_solution(s.ops, sol, Vec2{x, th}) - exact));
    }
  CHECK(err <= 1e-4);
}

TEST_CASE("DtN map on the circle", "[dirichlet]") {
  Setup s = circle_setup(256);
  const DtNReport rep = dtn(s.ops);
  CHECK(rep.symmetry_defect <= 1e-8);
  CHECK(rep.min_quadform >= -1e-8);

  const auto& nodes = s.ops.ctx.disc.nodes;
  Eigen::VectorXd f(static_cast<int>(nodes.size()));
  for (int i = 0; i < f.size(); ++i) {
    const double t = nodes[i].param;
    f(i) = 1.0 + std::cos(t) + 0.3 * std::sin(2.0 * t);
  }
  const Eigen::VectorXd Nf = rep.N * f;
  const DirichletSolution sol = solve_dirichlet(s.ops, f);
  double diff = 0.0;
  for (int i = 0; i < f.size(); i += 32)
    diff = std::max(diff, std::fabs(Nf(i) - normal_derivative(s.ops, sol, i)));
  CHECK(diff <= 1e-4);
}

TEST_CASE("DtN quadratic form is stable under refinement", "[dirichlet]") {
  auto quadform = [](int n) {
    Setup s = circle_setup(n);
    const DtNReport rep = dtn(s.ops, 1);
    const auto& nodes = s.ops.ctx.disc.nodes;
    Eigen::VectorXd f(n);
    for (int i = 0; i < n; ++i) f(i) = std::cos(2.0 * nodes[i].param);
    const Eigen::VectorXd w = node_weights(s.ops.ctx);
    return f.dot(w.asDiagonal() * (rep.N * f));
  };
  const double q128 = quadform(128), q256 = quadform(256);
  CHECK(std::fabs(q128 - q256) <= 0.01 * std::fabs(q256));
}

TEST_CASE("strip DtN symbol matches the closed form", "[dirichlet]") {
  const Eigensystem es = compute_eigensystem(unit_cyl(16));
  for (double xi : {0.0, 1.0, 2.0}) {
    const double lam = std::sqrt(1.0 + xi * xi);
    const Eigen::Matrix2d N = strip_dtn_symbol(es, 0.0, pi, xi);
    CHECK(std::fabs(N(0, 0) - lam / std::tanh(lam * pi)) <= 1e-6);
    CHECK(std::fabs(N(1, 1) - lam / std::tanh(lam * pi)) <= 1e-6);
    CHECK(std::fabs(N(0, 1) + lam / std::sinh(lam * pi)) <= 1e-6);
    CHECK(std::fabs(N(1, 0) + lam / std::sinh(lam * pi)) <= 1e-6);
  }
}

TEST_CASE("wellposedness solve recovers a manufactured bump", "[dirichlet]") {
  Setup s = strip_setup(10.0);
  const BumpSource bump{0.0, 0.5 * pi, 0.45};
  SourceTerm src;
  src.g = [&](double x, double th) { return bump.g(x, th); };
  src.x_lo = -0.45;
  src.x_hi = 0.45;
  src.th_lo = 0.5 * pi - 0.45;
  src.th_hi = 0.5 * pi + 0.45;

  const Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<int>(s.ops.ctx.disc.nodes.size()));
  const WellposedSolution ws = wellposedness_solve(s.ops, src, f);

  const std::vector<Vec2> probes = {{0.0, 0.5 * pi},  {0.2, 0.5 * pi + 0.1},
                                    {-0.3, 0.5 * pi - 0.2}, {0.8, 0.5 * pi},
                                    {0.0, 2.6},       {-1.5, 1.0}};
  double err = 0.0;
  for (const Vec2& p : probes)
    err = std::max(err, std::fabs(eval_wellposed(s.ops, ws, p) - bump.psi(p.x, p.theta)));
  CHECK(err <= 1e-4);
}

TEST_CASE("wellposedness edge cases", "[dirichlet]") {
  Setup s = strip_setup(6.0);
  const int n = static_cast<int>(s.ops.ctx.disc.nodes.size());

  SourceTerm close;
  close.g = [](double, double) { return 1.0; };
  close.x_lo = -0.2;
  close.x_hi = 0.2;
  close.th_lo = 0.2;
  close.th_hi = 0.6;
  CHECK_THROWS_AS(wellposedness_solve(s.ops, close, Eigen::VectorXd::Zero(n)), SourceTooClose);

  // zero source reduces exactly to the plain Dirichlet solve
  SourceTerm vac;
  vac.g = [](double, double) { return 0.0; };
  vac.x_lo = -0.4;
  vac.x_hi = 0.4;
  vac.th_lo = 0.5 * pi - 0.4;
  vac.th_hi = 0.5 * pi + 0.4;
  Eigen::VectorXd f(n);
  for (int i = 0; i < n; ++i) f(i) = std::exp(-s.ops.ctx.disc.nodes[i].param *
                                              s.ops.ctx.disc.nodes[i].param / 8.0);
  const WellposedSolution ws = wellposedness_solve(s.ops, vac, f, 1.0 / 8);
  const DirichletSolution plain = solve_dirichlet(s.ops, f);
  CHECK((ws.boundary_part.density - plain.density).lpNorm<Eigen::Infinity>() == 0.0);

  // linearity in (g, f) at a probe
  const BumpSource bump{0.0, 0.5 * pi, 0.4};
  SourceTerm src1;
  src1.g = [&](double x, double th) { return bump.g(x, th); };
  src1.x_lo = -0.4;
  src1.x_hi = 0.4;
  src1.th_lo = 0.5 * pi - 0.4;
  src1.th_hi = 0.5 * pi + 0.4;
  SourceTerm src2 = src1;
  src2.g = [&](double x, double th) { return -0.5 * bump.g(x, th) + 0.2 * bump.psi(x, th); };
  SourceTerm srcc = src1;
  srcc.g = [&](double x, double th) { return src1.g(x, th) + 2.0 * src2.g(x, th); };

  const Eigen::VectorXd f2 = 0.3 * f;
  const double h = 1.0 / 16;
  const WellposedSolution w1 = wellposedness_solve(s.ops, src1, f, h);
  const WellposedSolution w2 = wellposedness_solve(s.ops, src2, f2, h);
  const WellposedSolution wc = wellposedness_solve(s.ops, srcc, f + 2.0 * f2, h);
  const Vec2 probe{0.3, 1.9};
  const double lhs = eval_wellposed(s.ops, wc, probe);
  const double rhs = eval_wellposed(s.ops, w1, probe) + 2.0 * eval_wellposed(s.ops, w2, probe);
  CHECK(std::fabs(lhs - rhs) <= 1e-10);
}

TEST_CASE("condition stays bounded as the truncation grows", "[dirichlet]") {
  const double c10 = interior_condition(strip_setup(10.0, 0.3).ops);
  const double c15 = interior_condition(strip_setup(15.0, 0.3).ops);
  CHECK(c10 < 1e6);
  CHECK(c15 < 1e6);
  CHECK(c15 <= 2.0 * c10 + 10.0);
}

TEST_CASE("manufactured solution with a cosine potential", "[dirichlet]") {
  Setup s = circle_setup(128, true, 32);
  const Vec2 p0{1.2, pi};
  const Eigen::VectorXd f = sample_kernel_data(s.ops, p0);
  const DirichletSolution sol = solve_dirichlet(s.ops, f);

  const PointData p0d = kernel_point(s.ops.ctx.kern, p0);
  double rel = 0.0;
  for (const Vec2& p : circle_probes(0.2, 10)) {
    const double exact = kernel_E(s.ops.ctx.kern, kernel_point(s.ops.ctx.kern, p), p0d);
    rel = std::max(rel, std::fabs(eval_solution(s.ops, sol, p) - exact) / std::fabs(exact));
  }
  CHECK(rel <= 1e-4);
}

TEST_CASE("degenerate systems are rejected", "[dirichlet]") {
  Setup s = circle_setup(32);
  LayerOperatorSet bad = s.ops;
  const int n = 32;
  bad.K = 0.5 * Eigen::MatrixXd::Identity(n, n); // makes -1/2 I + K vanish
  bad.S = Eigen::MatrixXd::Zero(n, n);
  CHECK_THROWS_AS(solve_dirichlet(bad, Eigen::VectorXd::Ones(n)), IllConditioned);
  CHECK_THROWS_AS(dtn(bad), IllConditioned);
}
