#include "drt/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

namespace drt {

namespace {

bool finite_point(const Point& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

}  // namespace

Wall::Wall(Point a, Point b) : a_(a), b_(b) {
  if (!finite_point(a) || !finite_point(b)) {
    throw SceneError("wall endpoint is not finite");
  }
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  length_ = std::hypot(dx, dy);
  if (length_ < 1e-12) {
    throw SceneError("degenerate wall: endpoints coincide");
  }
  dir_ = {dx / length_, dy / length_};
  normal_ = {-dir_.y, dir_.x};
}

std::vector<std::vector<bool>> full_visibility(int n_walls) {
  std::vector<std::vector<bool>> v(static_cast<std::size_t>(n_walls),
                                   std::vector<bool>(static_cast<std::size_t>(n_walls), true));
  for (int i = 0; i < n_walls; ++i) v[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = false;
  return v;
}

double Bounds::diagonal() const { return std::hypot(width(), height()); }

Vec2 point_on_wall(const Wall& w, const DualScalar& t) {
  const Vec2 a(w.a());
  const Vec2 d(Point{w.b().x - w.a().x, w.b().y - w.a().y});
  return a + t * d;
}

std::optional<LineHit> segment_intersection(const Vec2& p, const Vec2& q, const Wall& w) {
  const Vec2 r = q - p;                      // segment direction
  const Vec2 s = Vec2(w.b()) - Vec2(w.a());  // wall direction
  const Vec2 v = Vec2(w.a()) - p;
  const DualScalar det = cross(s, r);
  const double scale = std::sqrt(squared_norm(r).value()) * w.length();
  if (std::fabs(det.value()) < 1e-12 * scale) {
    return std::nullopt;  // near-parallel: no crossing
  }
  return LineHit{cross(s, v) / det, cross(r, v) / det};
}

Vec2 mirror_point(const Vec2& p, const Wall& w) {
  const Vec2 n(w.normal());
  const DualScalar h = dot(p - Vec2(w.a()), n);
  return p - (DualScalar(2.0) * h) * n;
}

Vec2 reflect_direction(const Vec2& d, const Vec2& n) {
  constexpr double kUnitTol = 1e-9;
  if (std::fabs(norm(d).value() - 1.0) > kUnitTol ||
      std::fabs(norm(n).value() - 1.0) > kUnitTol) {
    throw std::invalid_argument("reflect_direction requires unit vectors");
  }
  return d - (DualScalar(2.0) * dot(d, n)) * n;
}

Bounds scene_bounds(const Scene& scene) {
  Bounds b{1e300, 1e300, -1e300, -1e300};
  auto grow = [&b](const Point& p) {
    b.xmin = std::min(b.xmin, p.x);
    b.ymin = std::min(b.ymin, p.y);
    b.xmax = std::max(b.xmax, p.x);
    b.ymax = std::max(b.ymax, p.y);
  };
  for (const Wall& w : scene.walls) {
    grow(w.a());
    grow(w.b());
  }
  for (const Point& p : scene.tx) grow(p);
  for (const Point& p : scene.rx) grow(p);
  if (b.xmin > b.xmax) return Bounds{0.0, 0.0, 1.0, 1.0};  // empty scene
  // Widen collapsed axes so grids over the bounds stay two-dimensional.
  const double span = std::max({b.width(), b.height(), 1.0});
  if (b.width() < 1e-9) {
    const double cx = 0.5 * (b.xmin + b.xmax);
    b.xmin = cx - 0.5 * span;
    b.xmax = cx + 0.5 * span;
  }
  if (b.height() < 1e-9) {
    const double cy = 0.5 * (b.ymin + b.ymax);
    b.ymin = cy - 0.5 * span;
    b.ymax = cy + 0.5 * span;
  }
  return b;
}

namespace {

using nlohmann::json;

Point parse_point(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw SceneError(where + ": expected [x, y]");
  }
  Point p{j[0].get<double>(), j[1].get<double>()};
  if (!finite_point(p)) throw SceneError(where + ": coordinate is not finite");
  return p;
}

}  // namespace

Scene load_scene(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SceneError(std::string("scene parse error: ") + e.what());
  }
  if (!doc.is_object()) throw SceneError("scene document must be a JSON object");

  static const char* kKnown[] = {"walls", "tx", "rx", "visibility"};
  for (const auto& [key, _] : doc.items()) {
    if (std::find_if(std::begin(kKnown), std::end(kKnown),
                     [&key](const char* k) { return key == k; }) == std::end(kKnown)) {
      throw SceneError("unknown scene key '" + key + "'");
    }
  }
  for (const char* key : {"walls", "tx", "rx"}) {
    if (!doc.contains(key)) throw SceneError(std::string("missing field '") + key + "'");
    if (!doc[key].is_array()) throw SceneError(std::string("field '") + key + "' must be a list");
  }

  Scene scene;
  int idx = 0;
  for (const auto& jw : doc["walls"]) {
    const std::string where = "walls[" + std::to_string(idx) + "]";
    if (!jw.is_array() || jw.size() != 2) throw SceneError(where + ": expected [[ax,ay],[bx,by]]");
    try {
      scene.walls.emplace_back(parse_point(jw[0], where), parse_point(jw[1], where));
    } catch (const SceneError& e) {
      throw SceneError(where + ": " + e.what());
    }
    ++idx;
  }
  idx = 0;
  for (const auto& jp : doc["tx"]) {
    scene.tx.push_back(parse_point(jp, "tx[" + std::to_string(idx++) + "]"));
  }
  idx = 0;
  for (const auto& jp : doc["rx"]) {
    scene.rx.push_back(parse_point(jp, "rx[" + std::to_string(idx++) + "]"));
  }

  const int n = static_cast<int>(scene.walls.size());
  if (doc.contains("visibility")) {
    scene.visibility.assign(static_cast<std::size_t>(n),
                            std::vector<bool>(static_cast<std::size_t>(n), false));
    idx = 0;
    for (const auto& jp : doc["visibility"]) {
      const std::string where = "visibility[" + std::to_string(idx++) + "]";
      if (!jp.is_array() || jp.size() != 2 || !jp[0].is_number_integer() ||
          !jp[1].is_number_integer()) {
        throw SceneError(where + ": expected [i, j]");
      }
      const int i = jp[0].get<int>();
      const int j = jp[1].get<int>();
      if (i < 0 || i >= n || j < 0 || j >= n) throw SceneError(where + ": wall index out of range");
      if (i == j) throw SceneError(where + ": self-pair not allowed");
      scene.visibility[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = true;
      scene.visibility[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = true;
    }
  } else {
    scene.visibility = full_visibility(n);
  }
  return scene;
}

std::string serialize_scene(const Scene& scene) {
  json doc;
  doc["walls"] = json::array();
  for (const Wall& w : scene.walls) {
    doc["walls"].push_back({{w.a().x, w.a().y}, {w.b().x, w.b().y}});
  }
  doc["tx"] = json::array();
  for (const Point& p : scene.tx) doc["tx"].push_back({p.x, p.y});
  doc["rx"] = json::array();
  for (const Point& p : scene.rx) doc["rx"].push_back({p.x, p.y});

  const int n = static_cast<int>(scene.walls.size());
  if (scene.visibility != full_visibility(n)) {
    doc["visibility"] = json::array();
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (scene.visible(i, j)) doc["visibility"].push_back({i, j});
      }
    }
  }
  return doc.dump(2) + "\n";
}

namespace {

double segment_point_distance(const Point& p, const Wall& w) {
  const double vx = p.x - w.a().x;
  const double vy = p.y - w.a().y;
  const double t =
      std::clamp((vx * w.direction().x + vy * w.direction().y) / w.length(), 0.0, 1.0);
  const double cx = w.a().x + t * (w.b().x - w.a().x);
  const double cy = w.a().y + t * (w.b().y - w.a().y);
  return std::hypot(p.x - cx, p.y - cy);
}

}  // namespace

Scene random_scene(std::uint64_t seed, int n_walls, int n_rx, const Bounds& bounds) {
  if (n_walls < 0 || n_rx < 1) {
    throw std::invalid_argument("random_scene requires n_walls >= 0 and n_rx >= 1");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(bounds.xmin, bounds.xmax);
  std::uniform_real_distribution<double> uy(bounds.ymin, bounds.ymax);
  auto draw_point = [&]() { return Point{ux(rng), uy(rng)}; };

  const double diag = bounds.diagonal();
  Scene scene;
  scene.walls.reserve(static_cast<std::size_t>(n_walls));
  for (int i = 0; i < n_walls; ++i) {
    for (;;) {
      const Point a = draw_point();
      const Point b = draw_point();
      const double len = std::hypot(b.x - a.x, b.y - a.y);
      if (len >= 0.1 * diag && len <= 0.5 * diag) {
        scene.walls.emplace_back(a, b);
        break;
      }
    }
  }
  scene.tx.push_back(draw_point());
  for (int i = 0; i < n_rx; ++i) {
    for (;;) {
      const Point p = draw_point();
      const bool on_wall = std::any_of(scene.walls.begin(), scene.walls.end(), [&p](const Wall& w) {
        return segment_point_distance(p, w) < 1e-9;
      });
      if (!on_wall) {
        scene.rx.push_back(p);
        break;
      }
    }
  }
  scene.visibility = full_visibility(n_walls);
  return scene;
}

}  // namespace drt
