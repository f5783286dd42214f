#pragma once

#include <cmath>
#include <limits>
#include <ostream>
#include <vector>

#include "cylbem/errors.hpp"
#include "cylbem/model.hpp"
#include "cylbem/special.hpp"
#include "cylbem/spectrum.hpp"

namespace cylbem {

// ---------------------------------------------------------------------------
// Boundary discretization. Closed curves get the uniform trapezoid rule in
// the curve parameter (spectrally accurate, and the layout the singular
// quadrature in layerops expects); graphs get composite Gauss-Legendre panels
// on [-L, L], straight tails included.
// ---------------------------------------------------------------------------

struct BoundaryNode {
  Vec2 point;
  Vec2 normal; // unit, outward from the domain
  double weight = 0.0;
  double speed = 0.0;
  double param = 0.0;
  int patch = 0;
};

struct CurvePatch {
  Curve curve;
  int first = 0;
  int count = 0;
  // closed rule
  int n = 0;
  // graph rule
  double panel = 0.5;
  double halflength = 0.0;
  int q = 6;
  int panels = 0;
};

struct DiscretizeOptions {
  int n_closed = 256;        // nodes per closed curve, even
  double panel = 0.5;        // target panel width on graphs
  double graph_halflength = 0.0; // 0 selects R + 10/sqrt(mu0), rounded to panels
  int panel_order = 6;       // Gauss-Legendre points per panel
};

struct Discretization {
  std::vector<BoundaryNode> nodes;
  std::vector<CurvePatch> patches;
  double min_spacing = std::numeric_limits<double>::infinity();
};

namespace detail {

inline Curve::Kind root_kind(const Curve& c) {
  const Curve* p = &c;
  while (p->kind == Curve::Kind::Offset) p = p->base.get();
  return p->kind;
}

inline BoundaryNode make_node(const Curve& c, double s, double rule_weight, int patch) {
  BoundaryNode nd;
  nd.point = curve_point(c, s);
  nd.normal = curve_normal(c, s);
  nd.speed = curve_speed(c, s);
  if (nd.speed < 1e-8) throw IrregularCurve("curve parameterization degenerates");
  nd.weight = nd.speed * rule_weight;
  nd.param = s;
  nd.patch = patch;
  return nd;
}

} // namespace detail

inline Discretization discretize(const Model& model, const Eigensystem& es,
                                 DiscretizeOptions opts = {}) {
  if (opts.n_closed < 8 || opts.n_closed % 2 != 0)
    throw ConfigError("closed-curve node count must be even and at least 8");
  if (opts.panel_order < 2 || opts.panel_order > 12)
    throw ConfigError("panel order out of range");
  if (opts.panel <= 0) throw ConfigError("panel width must be positive");

  Discretization d;
  const double mu0 = es.mu(0);
  for (const Curve& c : model.region.curves) {
    CurvePatch patch;
    patch.curve = c;
    patch.first = static_cast<int>(d.nodes.size());
    const int pid = static_cast<int>(d.patches.size());

    if (detail::root_kind(c) == Curve::Kind::Closed) {
      patch.n = opts.n_closed;
      const double h = 2.0 * pi / patch.n;
      for (int i = 0; i < patch.n; ++i) d.nodes.push_back(detail::make_node(c, i * h, h, pid));
    } else {
      const double lmin = model.cyl.end_marker + 5.0 / std::sqrt(mu0);
      double L = opts.graph_halflength;
      if (L == 0.0) {
        const double want = model.cyl.end_marker + 10.0 / std::sqrt(mu0);
        L = std::ceil(want / opts.panel - 1e-9) * opts.panel;
      } else if (L < lmin - 1e-12) {
        throw TruncationTooShort("graph truncation too short for the density decay");
      }
      patch.halflength = L;
      patch.panels = static_cast<int>(std::ceil(2.0 * L / opts.panel - 1e-12));
      patch.panel = 2.0 * L / patch.panels;
      patch.q = opts.panel_order;
      const GaussRule gl = gauss_legendre(patch.q);
      for (int j = 0; j < patch.panels; ++j) {
        const double a = -L + j * patch.panel, b = a + patch.panel;
        const GaussRule on = gauss_on(gl, a, b);
        for (int i = 0; i < patch.q; ++i)
          d.nodes.push_back(detail::make_node(c, on.x[i], on.w[i], pid));
      }
    }
    patch.count = static_cast<int>(d.nodes.size()) - patch.first;
    d.patches.push_back(patch);

    for (int i = patch.first; i < patch.first + patch.count; ++i) {
      const int j = (i + 1 < patch.first + patch.count)
                        ? i + 1
                        : (patch.n > 0 ? patch.first : -1);
      if (j < 0) break;
      const double gap = cylinder_dist(d.nodes[i].point, d.nodes[j].point, es.ell);
      d.min_spacing = std::min(d.min_spacing, gap);
    }
  }
  return d;
}

// ---------------------------------------------------------------------------
// Normal offset of a curve: gamma_t(s) = gamma(s) - t nu(s). Positive t moves
// into the domain. The offset must stay below the curvature radius and below
// any caller-supplied clearance to other curves.
// ---------------------------------------------------------------------------

inline Curve offset_curve(const Curve& base, double t,
                          double clearance = std::numeric_limits<double>::infinity()) {
  if (base.kind == Curve::Kind::Offset) throw ConfigError("cannot offset an offset curve");
  double max_curv = 0.0;
  if (base.kind == Curve::Kind::Closed) {
    for (int i = 0; i < 1024; ++i) {
      const double s = 2.0 * pi * i / 1024;
      if (curve_speed(base, s) < 1e-8) throw IrregularCurve("curve parameterization degenerates");
      max_curv = std::max(max_curv, curve_curvature(base, s));
    }
  } else if (base.bump.amplitude != 0.0) {
    for (int i = 0; i <= 1024; ++i) {
      const double s = base.bump.center + base.bump.width * (2.0 * i / 1024.0 - 1.0);
      max_curv = std::max(max_curv, curve_curvature(base, s));
    }
  }
  double cap = 0.25;
  if (max_curv > 0.0) cap = std::min(cap, 0.5 / max_curv);
  cap = std::min(cap, 0.5 * clearance);
  if (std::fabs(t) > cap + 1e-15) throw OffsetTooLarge("offset exceeds curvature or clearance cap");

  Curve c;
  c.kind = Curve::Kind::Offset;
  c.interior = base.interior;
  c.orient = base.orient;
  c.base = std::make_shared<Curve>(base);
  c.offset_t = t;
  return c;
}

inline void write_nodes_csv(std::ostream& os, const Discretization& d) {
  os << "patch,param,x,theta,nu_x,nu_theta,weight,speed\n";
  os.precision(17);
  for (const BoundaryNode& n : d.nodes)
    os << n.patch << ',' << n.param << ',' << n.point.x << ',' << n.point.theta << ','
       << n.normal.x << ',' << n.normal.theta << ',' << n.weight << ',' << n.speed << '\n';
}

} // namespace cylbem
