#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>

#include "cylbem/model.hpp"

using namespace cylbem;

namespace {

json strip_json() {
  return json{
      {"circumference", 2.0 * pi},
      {"mode_cutoff", 64},
      {"end_marker", 1.0},
      {"potential", {{"fourier_cos", {1.0}}, {"fourier_sin", json::array()}}},
      {"curves",
       {{{"kind", "graph"},
         {"level", 0.0},
         {"interior", "above"},
         {"bump", {{"amplitude", 0.0}, {"center", 0.0}, {"width", 1.0}}}},
        {{"kind", "graph"},
         {"level", pi},
         {"interior", "below"},
         {"bump", {{"amplitude", 0.0}, {"center", 0.0}, {"width", 1.0}}}}}}};
}

json circle_json() {
  return json{
      {"circumference", 2.0 * pi},
      {"mode_cutoff", 64},
      {"end_marker", 1.0},
      {"potential", {{"fourier_cos", {1.0, 1.0}}, {"fourier_sin", json::array()}}},
      {"curves",
       {{{"kind", "closed"},
         {"x0", 0.0},
         {"theta0", pi},
         {"x_cos", {0.5}},
         {"x_sin", json::array()},
         {"theta_cos", json::array()},
         {"theta_sin", {0.5}},
         {"interior", "inside"}}}}};
}

} // namespace

TEST_CASE("angle reduction and cylinder distance", "[model]") {
  const double ell = 2.0 * pi;
  CHECK(reduce_angle(0.3, ell) == Catch::Approx(0.3));
  CHECK(reduce_angle(0.3 + ell, ell) == Catch::Approx(0.3));
  CHECK(reduce_angle(-0.3, ell) == Catch::Approx(-0.3));
  CHECK(reduce_angle(pi + 0.1, ell) == Catch::Approx(0.1 - pi));
  CHECK(reduce_angle(pi, ell) == Catch::Approx(pi)); // half point maps to +ell/2
  CHECK(cylinder_dist({0, 0.1}, {0, ell - 0.1}, ell) == Catch::Approx(0.2));
  CHECK(cylinder_dist({3, 1}, {0, 1}, ell) == Catch::Approx(3.0));
}

TEST_CASE("potential evaluation and properties", "[model]") {
  Potential p;
  p.fourier_cos = {1.0, 1.0};
  CHECK(p.eval(0.0, 1.0) == Catch::Approx(2.0));
  CHECK(p.eval(pi, 1.0) == Catch::Approx(0.0).margin(1e-15));
  CHECK(p.mean() == 1.0);
  CHECK(p.degree() == 1);
  CHECK_FALSE(p.is_constant());

  Potential c;
  c.fourier_cos = {2.5};
  CHECK(c.is_constant());
  CHECK(c.eval(1.234, 1.0) == 2.5);

  // frequency scales with omega = 2 pi / ell
  Potential q;
  q.fourier_cos = {0.0, 1.0};
  q.fourier_sin = {1.0};
  const double omega = 0.5;
  CHECK(q.eval(1.0, omega) == Catch::Approx(std::cos(0.5) + std::sin(0.5)));
}

TEST_CASE("bump profile derivatives match finite differences", "[model]") {
  BumpProfile b;
  b.amplitude = 0.3;
  b.center = 0.4;
  b.width = 1.7;
  const double h = 1e-5;
  for (double x : {0.4, 0.9, 1.6, -0.7, 1.9}) {
    const double d1_fd = (b.value(x + h) - b.value(x - h)) / (2 * h);
    const double d2_fd = (b.value(x + h) - 2 * b.value(x) + b.value(x - h)) / (h * h);
    CHECK(b.d1(x) == Catch::Approx(d1_fd).margin(1e-8));
    CHECK(b.d2(x) == Catch::Approx(d2_fd).margin(1e-5));
  }
  // identically flat outside the support, including all derivatives
  CHECK(b.value(b.center + b.width) == 0.0);
  CHECK(b.d1(b.center + b.width + 0.1) == 0.0);
  CHECK(b.d2(b.center - b.width - 0.1) == 0.0);
}

TEST_CASE("circle geometry: normals, curvature, orientation invariance", "[model]") {
  Curve c;
  c.kind = Curve::Kind::Closed;
  c.interior = Curve::Side::Inside;
  c.theta0 = pi;
  c.x_cos = {0.5};
  c.theta_sin = {0.5};
  finalize_curve(c);
  CHECK(c.orient == 1);

  for (double s : {0.0, 0.7, 2.0, 4.5}) {
    const Vec2 p = curve_point(c, s);
    const Vec2 nu = curve_normal(c, s);
    CHECK(norm(nu) == Catch::Approx(1.0));
    // outward from the disk: nu parallel to p - center
    const Vec2 r{p.x - 0.0, p.theta - pi};
    CHECK(dot(nu, r) == Catch::Approx(0.5));
    CHECK(curve_speed(c, s) == Catch::Approx(0.5));
    CHECK(curve_curvature(c, s) == Catch::Approx(2.0));
  }

  // clockwise parameterization of the same circle gives the same outward normal
  Curve cw = c;
  cw.theta_sin = {-0.5};
  finalize_curve(cw);
  CHECK(cw.orient == -1);
  const Vec2 n1 = curve_normal(c, 0.3);
  const Vec2 n2 = curve_normal(cw, -0.3); // same geometric point
  CHECK(n1.x == Catch::Approx(n2.x));
  CHECK(n1.theta == Catch::Approx(n2.theta));

  // interior "outside": normal flips toward the center
  Curve out = c;
  out.interior = Curve::Side::Outside;
  const Vec2 n3 = curve_normal(out, 0.3);
  CHECK(n3.x == Catch::Approx(-n1.x));
  CHECK(n3.theta == Catch::Approx(-n1.theta));
}

TEST_CASE("graph geometry: normals point away from N", "[model]") {
  Curve g;
  g.kind = Curve::Kind::Graph;
  g.level = 0.0;
  g.interior = Curve::Side::Above; // N = {theta > 0} near this curve: outward is -theta-hat
  CHECK(curve_normal(g, 0.2).theta == Catch::Approx(-1.0));
  CHECK(curve_normal(g, 0.2).x == Catch::Approx(0.0).margin(1e-15));

  g.interior = Curve::Side::Below;
  CHECK(curve_normal(g, 0.2).theta == Catch::Approx(1.0));

  // bumped graph: normal orthogonal to the tangent, unit length
  g.bump = {0.4, 0.0, 2.0};
  g.interior = Curve::Side::Above;
  for (double x : {-1.5, 0.0, 0.3, 1.2}) {
    const Vec2 nu = curve_normal(g, x);
    const Vec2 v = curve_velocity(g, x);
    CHECK(norm(nu) == Catch::Approx(1.0));
    CHECK(dot(nu, v) == Catch::Approx(0.0).margin(1e-14));
    CHECK(nu.theta < 0.0);
  }
}

TEST_CASE("offset curve displaces along the outward normal", "[model]") {
  auto base = std::make_shared<Curve>();
  base->kind = Curve::Kind::Closed;
  base->interior = Curve::Side::Inside;
  base->theta0 = pi;
  base->x_cos = {0.5};
  base->theta_sin = {0.5};
  finalize_curve(*base);

  Curve off;
  off.kind = Curve::Kind::Offset;
  off.base = base;
  off.offset_t = 0.1; // toward the interior of N (the disk)
  for (double s : {0.0, 1.1, 3.9}) {
    const Vec2 p = curve_point(off, s);
    const Vec2 r{p.x, p.theta - pi};
    CHECK(norm(r) == Catch::Approx(0.4)); // radius shrinks by t
    const Vec2 nu = curve_normal(off, s);
    const Vec2 nb = curve_normal(*base, s);
    CHECK(nu.x == Catch::Approx(nb.x));
    CHECK(nu.theta == Catch::Approx(nb.theta));
    CHECK(curve_speed(off, s) == Catch::Approx(0.4).epsilon(1e-6));
  }
}

TEST_CASE("strip model builds and exposes asymptote angles", "[model]") {
  const Model m = build_model(strip_json());
  REQUIRE(m.region.curves.size() == 2);
  REQUIRE(m.region.asymptote_angles.size() == 2);
  CHECK(m.region.asymptote_angles[0] == Catch::Approx(0.0).margin(1e-15));
  CHECK(m.region.asymptote_angles[1] == Catch::Approx(pi));
  CHECK(m.cyl.V(0.77) == Catch::Approx(1.0));
  CHECK(m.cyl.omega() == Catch::Approx(1.0));
}

TEST_CASE("circle model with nonconstant potential builds", "[model]") {
  const Model m = build_model(circle_json());
  REQUIRE(m.region.curves.size() == 1);
  CHECK(m.region.asymptote_angles.empty());
  CHECK(m.cyl.V(0.0) == Catch::Approx(2.0));
  CHECK(m.region.curves[0].orient == 1);
}

TEST_CASE("json round trip is bit exact", "[model]") {
  for (const json& j : {strip_json(), circle_json()}) {
    const Model m = build_model(j);
    const json j2 = model_to_json(m);
    const Model m2 = build_model(j2);
    const json j3 = model_to_json(m2);
    CHECK(j2 == j3);
    CHECK(j2["circumference"].get<double>() == j["circumference"].get<double>());
    CHECK(j2["potential"]["fourier_cos"] == j["potential"]["fourier_cos"]);
    CHECK(j2["curves"].size() == j["curves"].size());
  }
}

TEST_CASE("model file loading", "[model]") {
  const std::string path = "test_model_tmp.json";
  {
    std::ofstream out(path);
    out << strip_json().dump(2);
  }
  const Model m = build_model_from_file(path);
  CHECK(m.region.curves.size() == 2);
  std::remove(path.c_str());
  CHECK_THROWS_AS(build_model_from_file("no_such_file.json"), ConfigError);
  {
    std::ofstream out(path);
    out << "{not json";
  }
  CHECK_THROWS_AS(build_model_from_file(path), ConfigError);
  std::remove(path.c_str());
}

TEST_CASE("validation: rejects bad potentials and parameters", "[model]") {
  json j = strip_json();
  j["potential"]["fourier_cos"] = json::array();
  CHECK_THROWS_AS(build_model(j), ZeroPotential);

  j = strip_json();
  j["potential"]["fourier_cos"] = {0.0, 1.0}; // V = cos(theta), negative on half the circle
  CHECK_THROWS_AS(build_model(j), NegativePotential);

  j = strip_json();
  j["mode_cutoff"] = 4;
  CHECK_THROWS_AS(build_model(j), ConfigError);

  j = strip_json();
  j["circumference"] = -1.0;
  CHECK_THROWS_AS(build_model(j), ConfigError);

  j = strip_json();
  j["end_marker"] = 0.0;
  CHECK_THROWS_AS(build_model(j), ConfigError);
}

TEST_CASE("validation: curve layout errors", "[model]") {
  // overlapping circles
  json j = circle_json();
  json second = j["curves"][0];
  second["theta0"] = pi + 0.3; // overlaps the first circle
  j["curves"].push_back(second);
  CHECK_THROWS_AS(build_model(j), CurveIntersection);

  // closed curve wrapping more than half the circumference
  j = circle_json();
  j["curves"][0]["x_cos"] = {1.8};
  j["curves"][0]["theta_sin"] = {1.8};
  CHECK_THROWS_AS(build_model(j), ConfigError);

  // graphs whose interiors disagree cannot bound a region
  j = strip_json();
  j["curves"][1]["interior"] = "above";
  CHECK_THROWS_AS(build_model(j), ConfigError);

  // bump support must stay inside the flat-end marker
  j = strip_json();
  j["curves"][1]["bump"] = {{"amplitude", 0.2}, {"center", 0.0}, {"width", 3.0}};
  CHECK_THROWS_AS(build_model(j), ConfigError);

  // curve missing a side designation
  j = strip_json();
  j["curves"][0].erase("interior");
  CHECK_THROWS_AS(build_model(j), ConfigError);
}

TEST_CASE("wrapped strip: interval through theta = 0 is handled", "[model]") {
  // N = {theta in (pi, 2 pi)}: lower curve at pi (above), upper at 2 pi == 0 (below)
  json j = strip_json();
  j["curves"][0]["level"] = pi;
  j["curves"][0]["interior"] = "above";
  j["curves"][1]["level"] = 0.0;
  j["curves"][1]["interior"] = "below";
  const Model m = build_model(j);
  CHECK(m.region.curves.size() == 2);
}
