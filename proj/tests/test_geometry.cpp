#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "drt/geometry.hpp"

using drt::DualScalar;
using drt::Point;
using drt::Scene;
using drt::Vec2;
using drt::Wall;

TEST_CASE("wall derived quantities") {
  const Wall w({0.0, 0.0}, {2.0, 0.0});
  CHECK(w.length() == 2.0);
  CHECK(w.direction().x == 1.0);
  CHECK(w.direction().y == 0.0);
  CHECK(w.normal().x == 0.0);
  CHECK(w.normal().y == 1.0);  // left-hand normal of b - a
  const double ortho = w.normal().x * w.direction().x + w.normal().y * w.direction().y;
  CHECK(std::fabs(ortho) < 1e-12);
  CHECK_THROWS_AS(Wall({1.0, 1.0}, {1.0, 1.0}), drt::SceneError);
}

TEST_CASE("point_on_wall interpolates and extrapolates") {
  const Wall w({0.0, 0.0}, {1.0, 0.0});
  CHECK(drt::point_on_wall(w, DualScalar(0.0)).value().x == 0.0);
  CHECK(drt::point_on_wall(w, DualScalar(1.0)).value().x == 1.0);
  CHECK(drt::point_on_wall(w, DualScalar(0.5)).value().x == 0.5);
  const Point far = drt::point_on_wall(w, DualScalar(2.0)).value();
  CHECK(far.x == 2.0);
  CHECK(far.y == 0.0);
}

TEST_CASE("segment_intersection solves the two-line system") {
  const Wall diag({0.0, 2.0}, {2.0, 0.0});
  const auto hit = drt::segment_intersection(Vec2(Point{0, 0}), Vec2(Point{2, 2}), diag);
  REQUIRE(hit.has_value());
  CHECK(hit->t.value() == doctest::Approx(0.5));
  CHECK(hit->u.value() == doctest::Approx(0.5));

  // Both parametrizations reconstruct the same crossing point.
  const Point from_seg{hit->t.value() * 2.0, hit->t.value() * 2.0};
  const Point from_wall = drt::point_on_wall(diag, hit->u).value();
  CHECK(std::hypot(from_seg.x - from_wall.x, from_seg.y - from_wall.y) < 1e-9);

  const Wall horizontal({0.0, 1.0}, {1.0, 1.0});
  CHECK(!drt::segment_intersection(Vec2(Point{0, 0}), Vec2(Point{1, 0}), horizontal).has_value());

  const Wall x_axis({-1.0, 0.0}, {1.0, 0.0});
  const auto v = drt::segment_intersection(Vec2(Point{0, -1}), Vec2(Point{0, 1}), x_axis);
  REQUIRE(v.has_value());
  CHECK(v->t.value() == doctest::Approx(0.5));
  CHECK(v->u.value() == doctest::Approx(0.5));
}

TEST_CASE("mirror_point basics") {
  const Wall x_axis({-1.0, 0.0}, {1.0, 0.0});
  const Point m = drt::mirror_point(Vec2(Point{0.0, 1.0}), x_axis).value();
  CHECK(m.x == doctest::Approx(0.0));
  CHECK(m.y == doctest::Approx(-1.0));

  const Point fixed = drt::mirror_point(Vec2(Point{0.25, 0.0}), x_axis).value();
  CHECK(fixed.y == doctest::Approx(0.0));
  CHECK(fixed.x == doctest::Approx(0.25));

  const Wall y_axis({0.0, -1.0}, {0.0, 1.0});
  const Point m2 = drt::mirror_point(Vec2(Point{2.0, 3.0}), y_axis).value();
  CHECK(m2.x == doctest::Approx(-2.0));
  CHECK(m2.y == doctest::Approx(3.0));
}

TEST_CASE("mirror_point is an involution and isometry") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 50; ++i) {
    const Wall w({u(rng), u(rng)}, {u(rng) + 0.5, u(rng) + 0.5});
    const Point p{u(rng), u(rng)};
    const Vec2 once = drt::mirror_point(Vec2(p), w);
    const Point twice = drt::mirror_point(once, w).value();
    CHECK(std::hypot(twice.x - p.x, twice.y - p.y) < 1e-12);
    // Signed distance to the wall line flips exactly.
    const double h0 = (p.x - w.a().x) * w.normal().x + (p.y - w.a().y) * w.normal().y;
    const Point q = once.value();
    const double h1 = (q.x - w.a().x) * w.normal().x + (q.y - w.a().y) * w.normal().y;
    CHECK(std::fabs(h0 + h1) < 1e-12);
  }
}

TEST_CASE("reflect_direction") {
  const double s = 1.0 / std::sqrt(2.0);
  const Point r = drt::reflect_direction(Vec2(Point{s, -s}), Vec2(Point{0.0, 1.0})).value();
  CHECK(r.x == doctest::Approx(s));
  CHECK(r.y == doctest::Approx(s));

  // Grazing: d orthogonal to n is unchanged.
  const Point g = drt::reflect_direction(Vec2(Point{1.0, 0.0}), Vec2(Point{0.0, 1.0})).value();
  CHECK(g.x == doctest::Approx(1.0));
  CHECK(g.y == doctest::Approx(0.0));

  // Normal incidence bounces straight back.
  const Point b = drt::reflect_direction(Vec2(Point{0.0, -1.0}), Vec2(Point{0.0, 1.0})).value();
  CHECK(b.y == doctest::Approx(1.0));

  CHECK_THROWS_AS(drt::reflect_direction(Vec2(Point{2.0, 0.0}), Vec2(Point{0.0, 1.0})),
                  std::invalid_argument);
}

TEST_CASE("load_scene accepts a minimal document") {
  const std::string doc = R"({
    "walls": [[[0.0, 0.0], [1.0, 0.0]]],
    "tx": [[0.5, 0.5]],
    "rx": [[0.5, -0.5]]
  })";
  const Scene s = drt::load_scene(doc);
  CHECK(s.walls.size() == 1);
  CHECK(s.tx.size() == 1);
  CHECK(s.rx.size() == 1);
  CHECK(s.visibility.size() == 1);
  CHECK(!s.visible(0, 0));
}

TEST_CASE("load_scene diagnostics") {
  CHECK_THROWS_WITH_AS(
      drt::load_scene(R"({"walls": [[[0,0],[0,0]]], "tx": [[0,0]], "rx": [[1,1]]})"),
      doctest::Contains("degenerate wall"), drt::SceneError);
  CHECK_THROWS_WITH_AS(drt::load_scene(R"({"walls": [], "tx": [[0,0]]})"),
                       doctest::Contains("missing field 'rx'"), drt::SceneError);
  CHECK_THROWS_WITH_AS(drt::load_scene(R"({"walls": [], "tx": [[0,0]], "rx": [[1,1]], "foo": 1})"),
                       doctest::Contains("unknown scene key"), drt::SceneError);
  CHECK_THROWS_AS(drt::load_scene("not json"), drt::SceneError);
  CHECK_THROWS_WITH_AS(
      drt::load_scene(R"({"walls": [], "tx": [[0,0]], "rx": [[1,1]], "visibility": [[0,1]]})"),
      doctest::Contains("out of range"), drt::SceneError);
}

TEST_CASE("scene round-trips through serialization") {
  const Scene s = drt::random_scene(42, 4, 3, drt::Bounds{0, 0, 1, 1});
  const Scene back = drt::load_scene(drt::serialize_scene(s));
  REQUIRE(back.walls.size() == s.walls.size());
  for (std::size_t i = 0; i < s.walls.size(); ++i) {
    CHECK(back.walls[i].a().x == s.walls[i].a().x);
    CHECK(back.walls[i].a().y == s.walls[i].a().y);
    CHECK(back.walls[i].b().x == s.walls[i].b().x);
    CHECK(back.walls[i].b().y == s.walls[i].b().y);
  }
  REQUIRE(back.rx.size() == s.rx.size());
  for (std::size_t i = 0; i < s.rx.size(); ++i) {
    CHECK(back.rx[i].x == s.rx[i].x);
    CHECK(back.rx[i].y == s.rx[i].y);
  }
  CHECK(back.visibility == s.visibility);

  // Non-default visibility survives the round trip too.
  Scene pruned = s;
  pruned.visibility = drt::full_visibility(4);
  pruned.visibility[0][1] = false;
  pruned.visibility[1][0] = false;
  const Scene back2 = drt::load_scene(drt::serialize_scene(pruned));
  CHECK(back2.visibility == pruned.visibility);
}

TEST_CASE("random_scene is deterministic and respects the length band") {
  const drt::Bounds bounds{0, 0, 1, 1};
  const Scene a = drt::random_scene(7, 5, 4, bounds);
  const Scene b = drt::random_scene(7, 5, 4, bounds);
  REQUIRE(a.walls.size() == 5);
  CHECK(a.rx.size() == 4);
  for (std::size_t i = 0; i < a.walls.size(); ++i) {
    CHECK(a.walls[i].a().x == b.walls[i].a().x);
    CHECK(a.walls[i].b().y == b.walls[i].b().y);
    CHECK(a.walls[i].length() >= 0.1 * bounds.diagonal());
    CHECK(a.walls[i].length() <= 0.5 * bounds.diagonal());
    CHECK(bounds.contains(a.walls[i].a()));
    CHECK(bounds.contains(a.walls[i].b()));
  }
  const Scene empty = drt::random_scene(1, 0, 1, bounds);
  CHECK(empty.walls.empty());
  CHECK_THROWS_AS(drt::random_scene(1, -1, 1, bounds), std::invalid_argument);
  CHECK_THROWS_AS(drt::random_scene(1, 0, 0, bounds), std::invalid_argument);
}

TEST_CASE("scene_bounds covers geometry and widens degenerate boxes") {
  Scene s;
  s.tx.push_back({-1.0, 0.0});
  s.rx.push_back({1.0, 0.0});
  s.visibility = drt::full_visibility(0);
  const drt::Bounds b = drt::scene_bounds(s);
  CHECK(b.xmin == doctest::Approx(-1.0));
  CHECK(b.xmax == doctest::Approx(1.0));
  CHECK(b.height() > 0.5);  // widened from the degenerate axis
}

TEST_CASE("gradients flow through the geometric primitives") {
  const Wall x_axis({-5.0, 0.0}, {5.0, 0.0});
  const Vec2 p{DualScalar(0.3), drt::lift_variable(1.2, 0, 1)};
  const Vec2 m = drt::mirror_point(p, x_axis);
  CHECK(m.y.value() == doctest::Approx(-1.2));
  CHECK(m.y.grad(0) == doctest::Approx(-1.0));
  CHECK(m.x.grad(0) == doctest::Approx(0.0));

  // Crossing parameter t = py / (py - qy); seed sits on qy.
  const Vec2 top(Point{0.3, 1.2});
  const Vec2 bottom{DualScalar(0.3), drt::lift_variable(-1.0, 0, 1)};
  const auto hit = drt::segment_intersection(top, bottom, x_axis);
  REQUIRE(hit.has_value());
  const double py = 1.2, qy = -1.0;
  CHECK(hit->t.value() == doctest::Approx(py / (py - qy)));
  CHECK(hit->t.grad(0) == doctest::Approx(py / ((py - qy) * (py - qy))));
}
