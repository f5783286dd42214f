#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "cylbem/errors.hpp"
#include "cylbem/special.hpp"

namespace cylbem {

using json = nlohmann::json;

struct Vec2 {
  double x = 0.0;
  double theta = 0.0;
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.theta * b.theta; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.theta); }

/** \brief Reduce an angular difference to (-ell/2, ell/2]. */
inline double reduce_angle(double d, double ell) {
  d = std::fmod(d, ell);
  if (d > 0.5 * ell) d -= ell;
  if (d <= -0.5 * ell) d += ell;
  return d;
}

/** \brief Distance on the cylinder R x S^1 of circumference ell. */
inline double cylinder_dist(const Vec2& p, const Vec2& q, double ell) {
  return std::hypot(p.x - q.x, reduce_angle(p.theta - q.theta, ell));
}

// ---------------------------------------------------------------------------
// Potential V(theta) >= 0 as a finite Fourier series.
// fourier_cos[k] multiplies cos(k w theta) (k = 0 is the constant term),
// fourier_sin[k] multiplies sin((k+1) w theta).
// ---------------------------------------------------------------------------
struct Potential {
  std::vector<double> fourier_cos;
  std::vector<double> fourier_sin;

  double mean() const { return fourier_cos.empty() ? 0.0 : fourier_cos[0]; }
  int degree() const {
    const int dc = static_cast<int>(fourier_cos.size()) - 1;
    const int ds = static_cast<int>(fourier_sin.size());
    return std::max({0, dc, ds});
  }
  bool is_constant() const {
    for (std::size_t k = 1; k < fourier_cos.size(); ++k)
      if (fourier_cos[k] != 0.0) return false;
    for (double v : fourier_sin)
      if (v != 0.0) return false;
    return true;
  }
  double eval(double theta, double omega) const {
    double v = mean();
    for (std::size_t k = 1; k < fourier_cos.size(); ++k)
      v += fourier_cos[k] * std::cos(k * omega * theta);
    for (std::size_t k = 0; k < fourier_sin.size(); ++k)
      v += fourier_sin[k] * std::sin((k + 1) * omega * theta);
    return v;
  }
};

// ---------------------------------------------------------------------------
// Bump profile: amplitude * exp(-1/(1-u^2)) with u = (x-center)/width,
// identically zero (all derivatives) for |u| >= 1.
// ---------------------------------------------------------------------------
struct BumpProfile {
  double amplitude = 0.0;
  double center = 0.0;
  double width = 1.0;

  double value(double x) const {
    const double u = (x - center) / width;
    if (std::fabs(u) >= 1.0) return 0.0;
    return amplitude * std::exp(-1.0 / (1.0 - u * u));
  }
  double d1(double x) const {
    const double u = (x - center) / width;
    if (std::fabs(u) >= 1.0) return 0.0;
    const double g = std::exp(-1.0 / (1.0 - u * u));
    const double q = 1.0 - u * u;
    return amplitude * g * (-2.0 * u / (q * q)) / width;
  }
  double d2(double x) const {
    const double u = (x - center) / width;
    if (std::fabs(u) >= 1.0) return 0.0;
    const double g = std::exp(-1.0 / (1.0 - u * u));
    const double q = 1.0 - u * u;
    const double gp = -2.0 * u / (q * q);
    return amplitude * g * (gp * gp - 2.0 * (1.0 + 3.0 * u * u) / (q * q * q)) /
           (width * width);
  }
};

// ---------------------------------------------------------------------------
// Boundary curve: a closed trigonometric curve, a graph theta = f(x) that is
// exactly straight for |x| >= R, or a normal offset of another curve.
// ---------------------------------------------------------------------------
struct Curve {
  enum class Kind { Closed, Graph, Offset };
  enum class Side { Inside, Outside, Above, Below };

  Kind kind = Kind::Graph;
  Side interior = Side::Above; // which side of the curve belongs to N

  // Closed: x(s) = x0 + sum_k x_cos[k] cos((k+1)s) + x_sin[k] sin((k+1)s), same for theta.
  double x0 = 0.0, theta0 = 0.0;
  std::vector<double> x_cos, x_sin, theta_cos, theta_sin;
  int orient = 0; // +1 counterclockwise parameterization, -1 clockwise (set by finalize_curve)

  // Graph: theta = level + bump(x)
  double level = 0.0;
  BumpProfile bump;

  // Offset: base curve displaced by offset_t toward the interior of N
  std::shared_ptr<const Curve> base;
  double offset_t = 0.0;
};

inline Vec2 curve_point(const Curve& c, double s);
inline Vec2 curve_velocity(const Curve& c, double s);
inline Vec2 curve_normal(const Curve& c, double s);

inline Vec2 curve_point_raw(const Curve& c, double s) {
  switch (c.kind) {
    case Curve::Kind::Closed: {
      double x = c.x0, th = c.theta0;
      for (std::size_t k = 0; k < c.x_cos.size(); ++k) x += c.x_cos[k] * std::cos((k + 1) * s);
      for (std::size_t k = 0; k < c.x_sin.size(); ++k) x += c.x_sin[k] * std::sin((k + 1) * s);
      for (std::size_t k = 0; k < c.theta_cos.size(); ++k) th += c.theta_cos[k] * std::cos((k + 1) * s);
      for (std::size_t k = 0; k < c.theta_sin.size(); ++k) th += c.theta_sin[k] * std::sin((k + 1) * s);
      return {x, th};
    }
    case Curve::Kind::Graph:
      return {s, c.level + c.bump.value(s)};
    case Curve::Kind::Offset: {
      const Vec2 p = curve_point(*c.base, s);
      const Vec2 nu = curve_normal(*c.base, s);
      return {p.x - c.offset_t * nu.x, p.theta - c.offset_t * nu.theta};
    }
  }
  return {};
}

inline Vec2 curve_point(const Curve& c, double s) { return curve_point_raw(c, s); }

inline Vec2 curve_velocity(const Curve& c, double s) {
  switch (c.kind) {
    case Curve::Kind::Closed: {
      double x = 0.0, th = 0.0;
      for (std::size_t k = 0; k < c.x_cos.size(); ++k) x += -(k + 1.0) * c.x_cos[k] * std::sin((k + 1) * s);
      for (std::size_t k = 0; k < c.x_sin.size(); ++k) x += (k + 1.0) * c.x_sin[k] * std::cos((k + 1) * s);
      for (std::size_t k = 0; k < c.theta_cos.size(); ++k) th += -(k + 1.0) * c.theta_cos[k] * std::sin((k + 1) * s);
      for (std::size_t k = 0; k < c.theta_sin.size(); ++k) th += (k + 1.0) * c.theta_sin[k] * std::cos((k + 1) * s);
      return {x, th};
    }
    case Curve::Kind::Graph:
      return {1.0, c.bump.d1(s)};
    case Curve::Kind::Offset: {
      // d/ds [gamma - t nu] with nu = sgn * J gamma'/|gamma'|, J(v) = (v_theta, -v_x)
      const Curve& b = *c.base;
      const Vec2 v = curve_velocity(b, s);
      const double h = 1e-6;
      const Vec2 n1 = curve_normal(b, s + h), n0 = curve_normal(b, s - h);
      return {v.x - c.offset_t * (n1.x - n0.x) / (2 * h),
              v.theta - c.offset_t * (n1.theta - n0.theta) / (2 * h)};
    }
  }
  return {};
}

inline Vec2 curve_accel(const Curve& c, double s) {
  switch (c.kind) {
    case Curve::Kind::Closed: {
      double x = 0.0, th = 0.0;
      for (std::size_t k = 0; k < c.x_cos.size(); ++k) {
        const double f = (k + 1.0) * (k + 1.0);
        x += -f * c.x_cos[k] * std::cos((k + 1) * s);
      }
      for (std::size_t k = 0; k < c.x_sin.size(); ++k) {
        const double f = (k + 1.0) * (k + 1.0);
        x += -f * c.x_sin[k] * std::sin((k + 1) * s);
      }
      for (std::size_t k = 0; k < c.theta_cos.size(); ++k) {
        const double f = (k + 1.0) * (k + 1.0);
        th += -f * c.theta_cos[k] * std::cos((k + 1) * s);
      }
      for (std::size_t k = 0; k < c.theta_sin.size(); ++k) {
        const double f = (k + 1.0) * (k + 1.0);
        th += -f * c.theta_sin[k] * std::sin((k + 1) * s);
      }
      return {x, th};
    }
    case Curve::Kind::Graph:
      return {0.0, c.bump.d2(s)};
    case Curve::Kind::Offset: {
      const double h = 1e-5;
      const Vec2 a = curve_velocity(c, s + h), b = curve_velocity(c, s - h);
      return {(a.x - b.x) / (2 * h), (a.theta - b.theta) / (2 * h)};
    }
  }
  return {};
}

inline double curve_speed(const Curve& c, double s) { return norm(curve_velocity(c, s)); }

inline Vec2 curve_tangent(const Curve& c, double s) {
  const Vec2 v = curve_velocity(c, s);
  const double sp = norm(v);
  return {v.x / sp, v.theta / sp};
}

/** \brief Outward-from-N unit normal. Closed curves need finalize_curve first. */
inline Vec2 curve_normal(const Curve& c, double s) {
  switch (c.kind) {
    case Curve::Kind::Closed: {
      const Vec2 v = curve_velocity(c, s);
      const double sp = norm(v);
      // (theta', -x')/speed points away from the enclosed disk when the
      // parameterization is counterclockwise.
      double sgn = static_cast<double>(c.orient);
      if (c.interior == Curve::Side::Outside) sgn = -sgn;
      return {sgn * v.theta / sp, -sgn * v.x / sp};
    }
    case Curve::Kind::Graph: {
      const double fp = c.bump.d1(s);
      const double sp = std::hypot(1.0, fp);
      if (c.interior == Curve::Side::Above) return {fp / sp, -1.0 / sp};
      return {-fp / sp, 1.0 / sp};
    }
    case Curve::Kind::Offset:
      // the unit normal is invariant under normal offsets below the curvature radius
      return curve_normal(*c.base, s);
  }
  return {};
}

/** \brief Curvature magnitude |x' th'' - th' x''| / speed^3. */
inline double curve_curvature(const Curve& c, double s) {
  const Vec2 v = curve_velocity(c, s);
  const Vec2 a = curve_accel(c, s);
  const double sp = norm(v);
  return std::fabs(v.x * a.theta - v.theta * a.x) / (sp * sp * sp);
}

/** \brief Fix the orientation flag of a closed curve from its signed area. */
inline void finalize_curve(Curve& c) {
  if (c.kind != Curve::Kind::Closed) return;
  const int n = 256;
  double area2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = 2.0 * pi * i / n;
    const Vec2 p = curve_point_raw(c, s);
    const Vec2 v = curve_velocity(c, s);
    area2 += p.x * v.theta - p.theta * v.x;
  }
  c.orient = area2 > 0 ? 1 : -1;
}

// ---------------------------------------------------------------------------
// Model types
// ---------------------------------------------------------------------------

struct CylinderModel {
  double circumference = 2.0 * pi;
  Potential potential;
  int mode_cutoff = 64;
  double end_marker = 1.0; // R: the boundary is straight and V is x-independent for |x| >= R

  double omega() const { return 2.0 * pi / circumference; }
  double V(double theta) const { return potential.eval(theta, omega()); }
};

struct RegionSpec {
  std::vector<Curve> curves;
  std::vector<double> asymptote_angles; // circle points where non-compact curves run straight
};

struct Model {
  CylinderModel cyl;
  RegionSpec region;
};

// ---------------------------------------------------------------------------
// JSON serialization (bit-exact round trip for all finite doubles)
// ---------------------------------------------------------------------------

inline json curve_to_json(const Curve& c) {
  json j;
  switch (c.kind) {
    case Curve::Kind::Closed:
      j["kind"] = "closed";
      j["x0"] = c.x0;
      j["theta0"] = c.theta0;
      j["x_cos"] = c.x_cos;
      j["x_sin"] = c.x_sin;
      j["theta_cos"] = c.theta_cos;
      j["theta_sin"] = c.theta_sin;
      j["interior"] = c.interior == Curve::Side::Inside ? "inside" : "outside";
      break;
    case Curve::Kind::Graph:
      j["kind"] = "graph";
      j["level"] = c.level;
      j["bump"] = {{"amplitude", c.bump.amplitude}, {"center", c.bump.center}, {"width", c.bump.width}};
      j["interior"] = c.interior == Curve::Side::Above ? "above" : "below";
      break;
    case Curve::Kind::Offset:
      throw ConfigError("offset curves are not serializable");
  }
  return j;
}

inline Curve curve_from_json(const json& j) {
  Curve c;
  const std::string kind = j.at("kind").get<std::string>();
  const std::string side = j.value("interior", "");
  if (kind == "closed") {
    c.kind = Curve::Kind::Closed;
    c.x0 = j.value("x0", 0.0);
    c.theta0 = j.value("theta0", 0.0);
    c.x_cos = j.value("x_cos", std::vector<double>{});
    c.x_sin = j.value("x_sin", std::vector<double>{});
    c.theta_cos = j.value("theta_cos", std::vector<double>{});
    c.theta_sin = j.value("theta_sin", std::vector<double>{});
    if (side == "inside")
      c.interior = Curve::Side::Inside;
    else if (side == "outside")
      c.interior = Curve::Side::Outside;
    else
      throw ConfigError("closed curve needs interior: inside|outside");
    finalize_curve(c);
  } else if (kind == "graph") {
    c.kind = Curve::Kind::Graph;
    c.level = j.at("level").get<double>();
    if (j.contains("bump")) {
      c.bump.amplitude = j["bump"].value("amplitude", 0.0);
      c.bump.center = j["bump"].value("center", 0.0);
      c.bump.width = j["bump"].value("width", 1.0);
    }
    if (side == "above")
      c.interior = Curve::Side::Above;
    else if (side == "below")
      c.interior = Curve::Side::Below;
    else
      throw ConfigError("graph curve needs interior: above|below");
  } else {
    throw ConfigError("unknown curve kind '" + kind + "'");
  }
  return c;
}

inline json model_to_json(const Model& m) {
  json j;
  j["circumference"] = m.cyl.circumference;
  j["mode_cutoff"] = m.cyl.mode_cutoff;
  j["end_marker"] = m.cyl.end_marker;
  j["potential"] = {{"fourier_cos", m.cyl.potential.fourier_cos},
                    {"fourier_sin", m.cyl.potential.fourier_sin}};
  j["curves"] = json::array();
  for (const Curve& c : m.region.curves) j["curves"].push_back(curve_to_json(c));
  return j;
}

// ---------------------------------------------------------------------------
// Validation and construction
// ---------------------------------------------------------------------------

namespace detail {

inline void validate_potential(const CylinderModel& cyl) {
  const int n = 4096;
  double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
  for (int i = 0; i < n; ++i) {
    const double v = cyl.V(cyl.circumference * i / n);
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  if (vmax <= 1e-14) throw ZeroPotential("V is identically zero");
  if (vmin < -1e-12) throw NegativePotential("min V = " + std::to_string(vmin));
}

inline std::vector<Vec2> sample_curve(const Curve& c, double span) {
  std::vector<Vec2> pts;
  const int n = 512;
  if (c.kind == Curve::Kind::Closed) {
    for (int i = 0; i < n; ++i) pts.push_back(curve_point(c, 2.0 * pi * i / n));
  } else {
    for (int i = 0; i <= n; ++i) pts.push_back(curve_point(c, -span + 2.0 * span * i / n));
  }
  return pts;
}

struct ParamRange {
  double lo = 0.0, hi = 0.0;
  bool periodic = false;
};

inline ParamRange param_range(const Curve& c, double span) {
  if (c.kind == Curve::Kind::Closed) return {0.0, 2.0 * pi, true};
  return {-span, span, false};
}

/** \brief True minimum distance between two curves: coarse scan plus grid zoom.
 *
 * A pure sample-to-sample minimum overestimates the distance of crossing
 * curves, so the coarse winner is refined by repeated local 9x9 zooms.
 */
inline double min_curve_distance(const Curve& a, const Curve& b, double ell, double span) {
  const ParamRange ra = param_range(a, span), rb = param_range(b, span);
  const int n = 512;
  double best = std::numeric_limits<double>::infinity();
  double sa = ra.lo, sb = rb.lo;
  for (int i = 0; i <= n; ++i) {
    const double u = ra.lo + (ra.hi - ra.lo) * i / n;
    const Vec2 p = curve_point(a, u);
    for (int j = 0; j <= n; ++j) {
      const double v = rb.lo + (rb.hi - rb.lo) * j / n;
      const double d = cylinder_dist(p, curve_point(b, v), ell);
      if (d < best) {
        best = d;
        sa = u;
        sb = v;
      }
    }
  }
  double ha = (ra.hi - ra.lo) / n, hb = (rb.hi - rb.lo) / n;
  for (int level = 0; level < 8; ++level) {
    double bsa = sa, bsb = sb;
    for (int i = -4; i <= 4; ++i) {
      double u = sa + ha * i / 4.0;
      if (!ra.periodic) u = std::clamp(u, ra.lo, ra.hi);
      const Vec2 p = curve_point(a, u);
      for (int j = -4; j <= 4; ++j) {
        double v = sb + hb * j / 4.0;
        if (!rb.periodic) v = std::clamp(v, rb.lo, rb.hi);
        const double d = cylinder_dist(p, curve_point(b, v), ell);
        if (d < best) {
          best = d;
          bsa = u;
          bsb = v;
        }
      }
    }
    sa = bsa;
    sb = bsb;
    ha /= 4.0;
    hb /= 4.0;
  }
  return best;
}

inline void validate_region(const Model& m) {
  const double ell = m.cyl.circumference;
  // closed curves must not wrap around the cylinder
  for (const Curve& c : m.region.curves) {
    if (c.kind != Curve::Kind::Closed) continue;
    double lo = 1e300, hi = -1e300;
    for (const Vec2& p : detail::sample_curve(c, 0)) {
      lo = std::min(lo, p.theta);
      hi = std::max(hi, p.theta);
    }
    if (hi - lo >= 0.5 * ell)
      throw ConfigError("closed curve wraps too far around the cylinder");
  }
  // pairwise disjointness (true min distance, not just sample-to-sample)
  const double span = m.cyl.end_marker + 3.0;
  for (std::size_t a = 0; a < m.region.curves.size(); ++a) {
    for (std::size_t b = a + 1; b < m.region.curves.size(); ++b) {
      const double dmin =
          detail::min_curve_distance(m.region.curves[a], m.region.curves[b], ell, span);
      if (dmin < 1e-6)
        throw CurveIntersection("curves " + std::to_string(a) + " and " + std::to_string(b) +
                                " come within " + std::to_string(dmin));
    }
  }
  // graph bumps must be flat beyond the end marker
  for (const Curve& c : m.region.curves) {
    if (c.kind != Curve::Kind::Graph) continue;
    if (std::fabs(c.bump.center) + c.bump.width > m.cyl.end_marker + 1e-12)
      throw ConfigError("graph bump support exceeds the end marker radius");
  }
}

// The cross-section trace X of N at infinity, as intervals between graph levels.
inline std::vector<std::pair<double, double>> asymptotic_trace(const Model& m) {
  std::vector<std::pair<double, Curve::Side>> levels;
  for (const Curve& c : m.region.curves)
    if (c.kind == Curve::Kind::Graph) levels.emplace_back(c.level, c.interior);
  std::sort(levels.begin(), levels.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<double, double>> trace;
  if (levels.empty()) return trace;
  if (levels.size() % 2 != 0)
    throw ConfigError("graph curves must pair up into strips");
  // rotate so the list starts with an interval-opening curve (N above it)
  if (levels.front().second == Curve::Side::Below) {
    std::rotate(levels.begin(), levels.begin() + 1, levels.end());
    levels.back().first += m.cyl.circumference; // wrapped interval
  }
  for (std::size_t i = 0; i + 1 < levels.size(); i += 2) {
    if (levels[i].second != Curve::Side::Above || levels[i + 1].second != Curve::Side::Below)
      throw ConfigError("inconsistent graph orientations: N does not form strips");
    trace.emplace_back(levels[i].first, levels[i + 1].first);
  }
  return trace;
}

inline void validate_exterior_potential(const Model& m) {
  const auto trace = asymptotic_trace(m);
  if (trace.empty()) return; // compact boundary: the whole circle is exterior
  const double ell = m.cyl.circumference;
  const int n = 4096;
  double vmax = 0.0;
  for (int i = 0; i < n; ++i) {
    const double th = ell * i / n;
    bool inside = false;
    for (const auto& [a, b] : trace) {
      double d = th;
      while (d < a) d += ell;
      if (d > a + 1e-9 && d < b - 1e-9) inside = true;
    }
    if (!inside) vmax = std::max(vmax, m.cyl.V(th));
  }
  if (vmax <= 1e-14)
    throw ConfigError("V must be positive somewhere on the cross-section outside N");
}

} // namespace detail

inline Model build_model(const json& j) {
  Model m;
  m.cyl.circumference = j.value("circumference", 2.0 * pi);
  m.cyl.mode_cutoff = j.value("mode_cutoff", 64);
  m.cyl.end_marker = j.value("end_marker", 1.0);
  if (j.contains("potential")) {
    m.cyl.potential.fourier_cos = j["potential"].value("fourier_cos", std::vector<double>{});
    m.cyl.potential.fourier_sin = j["potential"].value("fourier_sin", std::vector<double>{});
  }
  if (!(m.cyl.circumference > 0)) throw ConfigError("circumference must be positive");
  if (m.cyl.mode_cutoff < 8) throw ConfigError("mode_cutoff must be >= 8");
  if (!(m.cyl.end_marker > 0)) throw ConfigError("end_marker must be positive");
  detail::validate_potential(m.cyl);
  if (j.contains("curves"))
    for (const auto& cj : j["curves"]) m.region.curves.push_back(curve_from_json(cj));
  detail::validate_region(m);
  for (const Curve& c : m.region.curves)
    if (c.kind == Curve::Kind::Graph) m.region.asymptote_angles.push_back(c.level);
  detail::validate_exterior_potential(m);
  return m;
}

inline Model build_model_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("model file '" + path + "' is not valid JSON: " + e.what());
  }
  return build_model(j);
}

} // namespace cylbem
