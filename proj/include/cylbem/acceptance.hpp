#pragma once

// End-to-end acceptance suite: ten checks covering the kernel oracle, jump
// relations, arc identities, uniform-in-tau bounds, indicial reduction,
// Dirichlet solves, truncation stability, the DtN map, representation
// equivalence, and the interior-source problem. Each check prints one
// PASS/FAIL line with the measured quantity and its gate.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cylbem/dirichlet.hpp"

namespace cylbem {

struct AcceptanceCheck {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

namespace acceptance_detail {

inline std::string num(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.2e", v);
  return b;
}

inline CylinderModel reference_cylinder(int m, bool cosine) {
  CylinderModel cyl;
  cyl.mode_cutoff = m;
  cyl.potential.fourier_cos = cosine ? std::vector<double>{1.0, 1.0} : std::vector<double>{1.0};
  return cyl;
}

inline Model circle_model() {
  Model md;
  md.cyl = reference_cylinder(16, false);
  Curve c;
  c.kind = Curve::Kind::Closed;
  c.interior = Curve::Side::Inside;
  c.theta0 = pi;
  c.x_cos = {0.5};
  c.theta_sin = {0.5};
  finalize_curve(c);
  md.region.curves = {c};
  return md;
}

inline Model strip_model(double bump_amp) {
  Model md;
  md.cyl = reference_cylinder(16, false);
  Curve lower;
  lower.kind = Curve::Kind::Graph;
  lower.level = 0.0;
  lower.interior = Curve::Side::Above;
  Curve upper;
  upper.kind = Curve::Kind::Graph;
  upper.level = pi;
  upper.interior = Curve::Side::Below;
  if (bump_amp != 0.0) upper.bump = {bump_amp, 0.0, 1.25};
  md.region.curves = {lower, upper};
  return md;
}

inline LayerOperatorSet circle_operators(int n) {
  const Model md = circle_model();
  const Eigensystem es = compute_eigensystem(md.cyl);
  DiscretizeOptions o;
  o.n_closed = n;
  return assemble_operators(make_kernel(es), discretize(md, es, o));
}

inline LayerOperatorSet strip_operators(double L, double bump_amp) {
  const Model md = strip_model(bump_amp);
  const Eigensystem es = compute_eigensystem(md.cyl);
  DiscretizeOptions o;
  o.graph_halflength = L;
  return assemble_operators(make_kernel(es), discretize(md, es, o));
}

inline std::vector<Vec2> circle_probes(double radius, int count) {
  std::vector<Vec2> out;
  for (int k = 0; k < count; ++k) {
    const double a = 2.0 * pi * k / count;
    out.push_back({radius * std::cos(a), pi + radius * std::sin(a)});
  }
  return out;
}

inline Eigen::VectorXd kernel_data(const LayerOperatorSet& ops, Vec2 p0) {
  const PointData pd = kernel_point(ops.ctx.kern, p0);
  Eigen::VectorXd f(static_cast<int>(ops.ctx.disc.nodes.size()));
  for (int i = 0; i < f.size(); ++i) f(i) = kernel_E(ops.ctx.kern, ops.ctx.pdata[i], pd);
  return f;
}

// compactly supported radial bump and its image under the positive
// Laplacian plus V = 1; the manufactured interior source
struct RadialBump {
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
    const double ddp =
        (4.0 * rho * rho / (s * s * s * s) - 2.0 / (s * s) - 8.0 * rho * rho / (s * s * s)) * p;
    const double lap = rho < 1e-12 ? 2.0 * ddp / (R * R) : (ddp + dp / rho) / (R * R);
    return -lap + p;
  }
};

template <class Body>
AcceptanceCheck run_check(int id, const std::string& name, double budget, Body body) {
  AcceptanceCheck c;
  c.id = id;
  c.name = name;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.pass = false;
    c.detail = std::string("exception: ") + e.what();
  }
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (c.pass && c.seconds > budget) {
    c.pass = false;
    c.detail += " (exceeded " + num(budget) + "s budget)";
  }
  return c;
}

} // namespace acceptance_detail

inline std::vector<AcceptanceCheck> run_acceptance_suite() {
  using namespace acceptance_detail;
  std::vector<AcceptanceCheck> out;

  std::optional<LayerOperatorSet> circle; // closed circle, n = 256, V = 1
  std::optional<LayerOperatorSet> strip;  // straight strip, L = 20, V = 1
  auto need_circle = [&]() -> LayerOperatorSet& {
    if (!circle) circle.emplace(circle_operators(256));
    return *circle;
  };
  auto need_strip = [&]() -> LayerOperatorSet& {
    if (!strip) strip.emplace(strip_operators(20.0, 0.0));
    return *strip;
  };

  // 1: kernel values against an independent plain mode sum, V = 1
  out.push_back(run_check(1, "kernel cross-validation (mode sum vs image sum)", 5.0,
                          [&](AcceptanceCheck& c) {
    const Eigensystem es = compute_eigensystem(reference_cylinder(16, false));
    const GreenKernel kern = make_kernel(es);
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> ux(-2.0, 2.0), ut(0.0, 2.0 * pi);
    double worst = 0.0;
    int done = 0;
    while (done < 500) {
      const Vec2 p{ux(rng), ut(rng)}, q{ux(rng), ut(rng)};
      const double dx = std::fabs(p.x - q.x);
      if (cylinder_dist(p, q, es.ell) < 0.1 || dx < 0.05) continue;
      double oracle = std::exp(-dx) / (4.0 * pi);
      for (int k = 1; k <= 4000; ++k) {
        const double lam = std::sqrt(1.0 + static_cast<double>(k) * k);
        oracle += std::cos(k * (p.theta - q.theta)) * std::exp(-lam * dx) / (2.0 * pi * lam);
        if (std::exp(-lam * dx) / lam < 1e-18) break;
      }
      const double val = kernel_E(kern, kernel_point(kern, p), kernel_point(kern, q));
      worst = std::max(worst, std::fabs(val - oracle) / std::fabs(oracle));
      ++done;
    }
    c.pass = worst <= 1e-10;
    c.detail = "max rel " + num(worst) + " over 500 pairs, gate 1e-10";
  }));

  // 2: boundary-limit jump relations on the circle, n = 256
  out.push_back(run_check(2, "jump relations on the closed circle", 60.0,
                          [&](AcceptanceCheck& c) {
    const LayerOperatorSet& ops = need_circle();
    const auto& nodes = ops.ctx.disc.nodes;
    Eigen::VectorXd f(static_cast<int>(nodes.size()));
    for (int i = 0; i < f.size(); ++i)
      f(i) = 1.0 + std::cos(nodes[i].param) + 0.3 * std::sin(2.0 * nodes[i].param);
    const JumpReport rep = jump_check(ops, f, {1e-1, 3e-2, 1e-2, 3e-3, 1e-3}, 16);
    double worst = 0.0, min_order = 1e30;
    for (const JumpRelation& r : rep.relations) {
      worst = std::max(worst, r.extrapolated);
      min_order = std::min(min_order, r.order);
    }
    c.pass = worst <= 1e-4 && min_order >= 0.8 && rep.total_double_jump <= 1e-4 &&
             rep.total_dnu_jump <= 1e-4;
    char ord[16];
    std::snprintf(ord, sizeof ord, "%.2f", min_order);
    c.detail = "max limit err " + num(worst) + " (gate 1e-4), min order " + ord + ", totals " +
               num(rep.total_double_jump) + " / " + num(rep.total_dnu_jump);
  }));

  // 3: unconditional boundary-vs-interior identities on random smooth data
  out.push_back(run_check(3, "Rellich and divergence identities on the arc", 5.0,
                          [&](AcceptanceCheck& c) {
    std::mt19937 rng(777);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      const double alpha = 0.2 + 0.5 * u01(rng);
      const double beta = alpha + 0.8 + 1.5 * u01(rng);
      std::vector<std::complex<double>> ac(5), as(5);
      std::vector<double> wc(4), ws(4);
      for (int k = 0; k < 5; ++k) {
        ac[k] = {gauss(rng), gauss(rng)};
        as[k] = {gauss(rng), gauss(rng)};
      }
      for (int k = 0; k < 4; ++k) {
        wc[k] = gauss(rng);
        ws[k] = gauss(rng);
      }
      auto u = [ac, as](double th) {
        std::complex<double> v = 0.0;
        for (int k = 0; k < 5; ++k) v += ac[k] * std::cos(k * th) + as[k] * std::sin(k * th);
        return v;
      };
      auto du = [ac, as](double th) {
        std::complex<double> v = 0.0;
        for (int k = 1; k < 5; ++k)
          v += static_cast<double>(k) * (as[k] * std::cos(k * th) - ac[k] * std::sin(k * th));
        return v;
      };
      auto d2u = [ac, as](double th) {
        std::complex<double> v = 0.0;
        for (int k = 1; k < 5; ++k)
          v -= static_cast<double>(k * k) * (ac[k] * std::cos(k * th) + as[k] * std::sin(k * th));
        return v;
      };
      auto w = [wc, ws](double th) {
        double v = 0.0;
        for (int k = 0; k < 4; ++k) v += wc[k] * std::cos(k * th) + ws[k] * std::sin(k * th);
        return v;
      };
      auto dw = [wc, ws](double th) {
        double v = 0.0;
        for (int k = 1; k < 4; ++k) v += k * (ws[k] * std::cos(k * th) - wc[k] * std::sin(k * th));
        return v;
      };
      const RellichResult r = rellich_check(alpha, beta, u, du, d2u, w, dw);
      worst = std::max({worst, r.residual_gradient, r.residual_value});
    }
    c.pass = worst <= 1e-8;
    c.detail = "max residual " + num(worst) + " over 50 random (u, w), gate 1e-8";
  }));

  // 4: uniform-in-tau inverse bounds, stable under grid and mode refinement
  out.push_back(run_check(4, "uniform-in-tau inverse bounds on [-20, 20]", 30.0,
                          [&](AcceptanceCheck& c) {
    auto sweep = [](int m, double step) {
      const Eigensystem es = compute_eigensystem(reference_cylinder(m, true));
      const int n = static_cast<int>(std::lround(40.0 / step));
      double supK = 0.0, supS = 0.0;
      for (int i = 0; i <= n; ++i) {
        const double tau = -20.0 + i * step;
        const TauMatrices t = tau_layer_matrices(es, 0.0, pi, tau);
        const Eigen::Matrix2d A = 0.5 * Eigen::Matrix2d::Identity() + t.K;
        const Eigen::JacobiSVD<Eigen::Matrix2d> sa(A), ss(t.S);
        supK = std::max(supK, 1.0 / sa.singularValues()(1));
        supS = std::max(supS, 1.0 / ss.singularValues()(1) / (1.0 + std::fabs(tau)));
      }
      return std::pair<double, double>{supK, supS};
    };
    const auto [k1, s1] = sweep(16, 0.5);
    const auto [k2, s2] = sweep(32, 0.25);
    const double dk = std::fabs(k1 - k2) / k2, ds = std::fabs(s1 - s2) / s2;
    c.pass = std::isfinite(k1) && std::isfinite(s1) && dk <= 0.01 && ds <= 0.01;
    c.detail = "sup|(I/2+K_t)^-1| = " + num(k2) + " (drift " + num(dk) +
               "), sup|S_t^-1|_{H1->L2} = " + num(s2) + " (drift " + num(ds) + "), gate 1%";
  }));

  // 5: indicial reduction of the assembled global operators
  out.push_back(run_check(5, "indicial consistency on the straight two-line boundary", 30.0,
                          [&](AcceptanceCheck& c) {
    const LayerOperatorSet& ops = need_strip();
    double worst = 0.0;
    for (double tau : {0.0, 1.0, 2.0}) {
      const TauMatrices t = tau_layer_matrices(ops.ctx.kern.es, 0.0, pi, tau);
      const Eigen::Matrix2cd Sh = indicial_hat(ops.ctx, ops.S, tau);
      const Eigen::Matrix2cd Kh = indicial_hat(ops.ctx, ops.K, tau);
      worst = std::max(worst, (Sh - t.S.cast<std::complex<double>>()).cwiseAbs().maxCoeff());
      worst = std::max(worst, (Kh - t.K.cast<std::complex<double>>()).cwiseAbs().maxCoeff());
    }
    c.pass = worst <= 1e-6;
    c.detail = "max entry diff " + num(worst) + " at tau in {0, 1, 2}, gate 1e-6";
  }));

  // 6: Dirichlet solve against a manufactured and a closed-form solution
  out.push_back(run_check(6, "Dirichlet solve (manufactured / Fourier / dense strip)", 120.0,
                          [&](AcceptanceCheck& c) {
    const LayerOperatorSet& ops = need_circle();
    const Vec2 p0{1.2, pi};
    const Eigen::VectorXd f = kernel_data(ops, p0);
    const DirichletSolution sol = solve_dirichlet(ops, f);
    const PointData p0d = kernel_point(ops.ctx.kern, p0);
    double rel = 0.0;
    for (const Vec2& p : circle_probes(0.2, 20)) {
      const double exact = kernel_E(ops.ctx.kern, kernel_point(ops.ctx.kern, p), p0d);
      rel = std::max(rel, std::fabs(eval_solution(ops, sol, p) - exact) / std::fabs(exact));
    }

    const double xi = 1.0, lam = std::sqrt(2.0);
    auto closed_form = [&](double x, double th) {
      return std::cos(xi * x) * std::sinh(lam * (pi - th)) / std::sinh(lam * pi);
    };
    const StripFourierSolution fs = solve_strip_fourier(
        ops.ctx.kern.es, 0.0, pi, {{xi, Eigen::Vector2d(1.0, 0.0)}});
    double errF = 0.0;
    for (double x : {0.0, 0.7, -1.3})
      for (double th : {0.5, 1.5, 2.8})
        errF = std::max(errF, std::fabs(fs.value(x, th) - closed_form(x, th)));

    const LayerOperatorSet& sops = need_strip();
    const auto& snodes = sops.ctx.disc.nodes;
    Eigen::VectorXd sf(static_cast<int>(snodes.size()));
    for (int i = 0; i < sf.size(); ++i)
      sf(i) = snodes[i].patch == 0 ? std::cos(xi * snodes[i].param) : 0.0;
    const DirichletSolution ssol = solve_dirichlet(sops, sf);
    double errD = 0.0;
    for (double x : {-1.0, 0.0, 1.0})
      for (double th : {0.8, 1.6, 2.4})
        errD = std::max(errD, std::fabs(eval_solution(sops, ssol, Vec2{x, th}) -
                                        closed_form(x, th)));

    c.pass = rel <= 1e-6 && errF <= 1e-8 && errD <= 1e-4;
    c.detail = "circle rel " + num(rel) + " (1e-6), Fourier " + num(errF) + " (1e-8), dense " +
               num(errD) + " (1e-4)";
  }));

  // 7: condition of the interior system across truncation lengths
  out.push_back(run_check(7, "condition stability across truncations (bumped strip)", 120.0,
                          [&](AcceptanceCheck& c) {
    std::vector<double> conds;
    for (double L : {10.0, 15.0, 20.0, 25.0})
      conds.push_back(interior_condition(strip_operators(L, 0.3)));
    const double lo = *std::min_element(conds.begin(), conds.end());
    const double hi = *std::max_element(conds.begin(), conds.end());
    c.pass = hi < 1e6 && hi <= 2.0 * lo;
    c.detail = "cond(-I/2+K) = " + num(conds[0]) + ", " + num(conds[1]) + ", " + num(conds[2]) +
               ", " + num(conds[3]) + " at L = 10/15/20/25, gate <1e6 and spread <= 2x";
  }));

  // 8: Dirichlet-to-Neumann map: consistency, symbol, positivity
  out.push_back(run_check(8, "Dirichlet-to-Neumann map", 60.0, [&](AcceptanceCheck& c) {
    const LayerOperatorSet& ops = need_circle();
    const DtNReport rep = dtn(ops);
    const auto& nodes = ops.ctx.disc.nodes;
    Eigen::VectorXd f(static_cast<int>(nodes.size()));
    for (int i = 0; i < f.size(); ++i)
      f(i) = 1.0 + std::cos(nodes[i].param) + 0.3 * std::sin(2.0 * nodes[i].param);
    const Eigen::VectorXd Nf = rep.N * f;
    const DirichletSolution sol = solve_dirichlet(ops, f);
    double cons = 0.0;
    for (int i = 0; i < f.size(); i += 32)
      cons = std::max(cons, std::fabs(Nf(i) - normal_derivative(ops, sol, i)));

    double errSym = 0.0;
    for (double xi : {0.0, 1.0, 2.0}) {
      const double lam = std::sqrt(1.0 + xi * xi);
      const Eigen::Matrix2d N2 = strip_dtn_symbol(ops.ctx.kern.es, 0.0, pi, xi);
      errSym = std::max({errSym, std::fabs(N2(0, 0) - lam / std::tanh(lam * pi)),
                         std::fabs(N2(1, 1) - lam / std::tanh(lam * pi))});
    }
    c.pass = cons <= 1e-4 && errSym <= 1e-6 && rep.min_quadform >= -1e-8;
    c.detail = "consistency " + num(cons) + " (1e-4), symbol " + num(errSym) +
               " (1e-6), min quadform " + num(rep.min_quadform) + " (>= -1e-8)";
  }));

  // 9: the two solution representations agree; Green closure holds
  out.push_back(run_check(9, "representation equivalence and Green closure", 60.0,
                          [&](AcceptanceCheck& c) {
    const LayerOperatorSet& ops = need_circle();
    const Vec2 p0{1.2, pi};
    const Eigen::VectorXd f = kernel_data(ops, p0);
    const DirichletSolution dsol = solve_dirichlet(ops, f);
    const DirichletSolution ssol = ssinv_solve(ops, f);
    const DtNReport rep = dtn(ops, 1);
    const Eigen::VectorXd Nf = rep.N * f;
    const PointData p0d = kernel_point(ops.ctx.kern, p0);
    double repdiff = 0.0, closure = 0.0;
    for (const Vec2& p : circle_probes(0.2, 20)) {
      const double ud = eval_solution(ops, dsol, p);
      const double us = eval_solution(ops, ssol, p);
      repdiff = std::max(repdiff, std::fabs(ud - us));
      const double exact = kernel_E(ops.ctx.kern, kernel_point(ops.ctx.kern, p), p0d);
      const double green = eval_single(ops.ctx, Nf, p) - eval_double(ops.ctx, f, p);
      closure = std::max(closure, std::fabs(green - exact));
    }
    c.pass = repdiff <= 1e-5 && closure <= 1e-4;
    c.detail = "representations " + num(repdiff) + " (1e-5), closure " + num(closure) + " (1e-4)";
  }));

  // 10: interior source plus boundary data, manufactured pair recovered
  out.push_back(run_check(10, "well-posedness with an interior source", 120.0,
                          [&](AcceptanceCheck& c) {
    const LayerOperatorSet ops = strip_operators(10.0, 0.0);
    const RadialBump bump{0.0, 0.5 * pi, 0.45};
    SourceTerm src;
    src.g = [&](double x, double th) { return bump.g(x, th); };
    src.x_lo = -0.45;
    src.x_hi = 0.45;
    src.th_lo = 0.5 * pi - 0.45;
    src.th_hi = 0.5 * pi + 0.45;

    // exterior pole adds a nonzero boundary trace on top of the bump
    const Vec2 p0{0.3, -0.9};
    const Eigen::VectorXd f = kernel_data(ops, p0);
    const WellposedSolution ws = wellposedness_solve(ops, src, f);

    const PointData p0d = kernel_point(ops.ctx.kern, p0);
    const std::vector<Vec2> probes = {{0.0, 0.5 * pi},      {0.2, 0.5 * pi + 0.1},
                                      {-0.3, 0.5 * pi - 0.2}, {0.8, 0.5 * pi},
                                      {0.0, 2.6},           {-1.5, 1.0}};
    double err = 0.0;
    for (const Vec2& p : probes) {
      const double exact = bump.psi(p.x, p.theta) +
                           kernel_E(ops.ctx.kern, kernel_point(ops.ctx.kern, p), p0d);
      err = std::max(err, std::fabs(eval_wellposed(ops, ws, p) - exact));
    }
    c.pass = err <= 1e-4;
    c.detail = "max probe err " + num(err) + ", gate 1e-4";
  }));

  return out;
}

inline int run_acceptance(std::ostream& os) {
  const std::vector<AcceptanceCheck> checks = run_acceptance_suite();
  int failed = 0;
  for (const AcceptanceCheck& c : checks) {
    char line[512];
    std::snprintf(line, sizeof line, "%s %2d  %-55s %s  [%.1fs]", c.pass ? "PASS" : "FAIL", c.id,
                  c.name.c_str(), c.detail.c_str(), c.seconds);
    os << line << '\n';
    if (!c.pass) ++failed;
  }
  os << (failed == 0 ? "acceptance: all 10 criteria passed\n"
                     : "acceptance: " + std::to_string(failed) + " of 10 criteria FAILED\n");
  return failed == 0 ? 0 : 2;
}

} // namespace cylbem
