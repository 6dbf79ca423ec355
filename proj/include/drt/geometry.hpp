// 2D scene model: walls as segments, node positions, visibility matrix, and
// the exact geometric primitives (mirroring, intersection, reflection) shared
// by the path solvers. Scene geometry is stored in plain doubles; all
// computations run over DualScalar so seeded coordinates carry gradients.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "drt/dual.hpp"

namespace drt {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Point with differentiable components.
struct Vec2 {
  DualScalar x;
  DualScalar y;

  Vec2() = default;
  Vec2(DualScalar x_, DualScalar y_) : x(x_), y(y_) {}
  explicit Vec2(const Point& p) : x(p.x), y(p.y) {}

  Point value() const { return {x.value(), y.value()}; }

  friend Vec2 operator+(const Vec2& a, const Vec2& b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(const DualScalar& s, const Vec2& v) { return {s * v.x, s * v.y}; }
  friend Vec2 operator-(const Vec2& v) { return {-v.x, -v.y}; }
};

inline DualScalar dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline DualScalar cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline DualScalar squared_norm(const Vec2& v) { return dot(v, v); }
inline DualScalar norm(const Vec2& v) { return sqrt(squared_norm(v)); }
inline DualScalar distance(const Vec2& a, const Vec2& b) { return norm(b - a); }

// Unit vector; guarded against zero length so solver iterates never divide
// by an exactly degenerate segment.
inline Vec2 unit(const Vec2& v) {
  DualScalar n = max(norm(v), DualScalar(1e-150));
  return {v.x / n, v.y / n};
}

struct SceneError : std::runtime_error {
  explicit SceneError(const std::string& what) : std::runtime_error(what) {}
};

class Wall {
 public:
  // Throws SceneError on a degenerate (zero-length) wall.
  Wall(Point a, Point b);

  const Point& a() const { return a_; }
  const Point& b() const { return b_; }
  double length() const { return length_; }
  // Unit direction a -> b.
  const Point& direction() const { return dir_; }
  // Unit left-hand normal of b - a.
  const Point& normal() const { return normal_; }

 private:
  Point a_, b_;
  double length_;
  Point dir_;
  Point normal_;
};

struct Scene {
  std::vector<Wall> walls;
  std::vector<Point> tx;
  std::vector<Point> rx;
  // visible[i][j]: walls i and j may appear consecutively in a path.
  // Symmetric, false on the diagonal.
  std::vector<std::vector<bool>> visibility;

  bool visible(int i, int j) const {
    return visibility[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
};

// All-true off the diagonal.
std::vector<std::vector<bool>> full_visibility(int n_walls);

struct Bounds {
  double xmin = 0.0, ymin = 0.0, xmax = 1.0, ymax = 1.0;

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double diagonal() const;
  bool contains(const Point& p) const {
    return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
  }
};

// w.a + t * (w.b - w.a); t outside [0,1] extrapolates along the infinite line.
Vec2 point_on_wall(const Wall& w, const DualScalar& t);

struct LineHit {
  DualScalar t;  // parameter along p -> q
  DualScalar u;  // parameter along wall a -> b
};

// Infinite-line crossing of segment p->q with the wall's line. Near-parallel
// configurations return nullopt; the caller treats that as no obstruction.
std::optional<LineHit> segment_intersection(const Vec2& p, const Vec2& q, const Wall& w);

// Reflection of p across the infinite line through w. Involution.
Vec2 mirror_point(const Vec2& p, const Wall& w);

// d - 2 (d.n) n for unit d and n. Throws on non-unit inputs.
Vec2 reflect_direction(const Vec2& d, const Vec2& n);

// Axis-aligned box around all walls and nodes; degenerate axes are widened.
Bounds scene_bounds(const Scene& scene);

// Parses the JSON scene document. Throws SceneError with a field diagnostic.
Scene load_scene(const std::string& text);

// Inverse of load_scene on valid scenes.
std::string serialize_scene(const Scene& scene);

// Deterministic random scene: wall endpoints uniform in bounds with length
// in [0.1, 0.5] of the bounds diagonal, receivers uniform and never on a wall.
Scene random_scene(std::uint64_t seed, int n_walls, int n_rx, const Bounds& bounds);

}  // namespace drt
