#include "drt/radio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace drt {

DualScalar smooth_on_segment(const DualScalar& t, const SmoothingConfig& cfg) {
  return smooth(t, cfg) * smooth(DualScalar(1.0) - t, cfg);
}

DualScalar smooth_obstruction_factor(const Vec2& p, const Vec2& q, const Scene& scene,
                                     std::span<const int> skip, const SmoothingConfig& cfg) {
  DualScalar factor(1.0);
  if (distance(p, q).value() < 1e-12) return factor;  // empty segment
  for (int w = 0; w < static_cast<int>(scene.walls.size()); ++w) {
    if (std::find(skip.begin(), skip.end(), w) != skip.end()) continue;
    const auto hit = segment_intersection(p, q, scene.walls[static_cast<std::size_t>(w)]);
    if (!hit) continue;  // parallel: indicator exactly 0
    const DualScalar indicator = smooth_on_segment(hit->t, cfg) * smooth_on_segment(hit->u, cfg);
    factor = factor * (DualScalar(1.0) - indicator);
  }
  return factor;
}

DualScalar path_validity(const TracedPath& path, const PathCandidate& candidate,
                         const Scene& scene, const RadioConfig& cfg) {
  if (!path.reachable) return DualScalar(0.0);
  const int k = candidate.order();

  DualScalar v = residual_to_validity(path.residual_loss, cfg.smoothing);
  for (const DualScalar& t : path.wall_params) {
    v = v * smooth_on_segment(t, cfg.smoothing);
  }
  for (int seg = 0; seg <= k; ++seg) {
    // A reflection point does not block its own segments; skip by identity.
    int skip[2];
    int n_skip = 0;
    if (seg > 0) skip[n_skip++] = candidate.walls[static_cast<std::size_t>(seg - 1)];
    if (seg < k) skip[n_skip++] = candidate.walls[static_cast<std::size_t>(seg)];
    v = v * smooth_obstruction_factor(path.points[static_cast<std::size_t>(seg)],
                                      path.points[static_cast<std::size_t>(seg + 1)], scene,
                                      std::span<const int>(skip, static_cast<std::size_t>(n_skip)),
                                      cfg.smoothing);
  }
  return v;
}

DualScalar path_gain(const TracedPath& path, const RadioConfig& cfg) {
  const int order = static_cast<int>(path.wall_params.size());
  const double gamma_factor = std::pow(cfg.reflection_coeff, 2 * order);
  const DualScalar d = max(path.length, DualScalar(cfg.min_distance));
  return DualScalar(gamma_factor) / (d * d);
}

DualScalar received_power_over(std::span<const PathCandidate> candidates, const Vec2& tx,
                               const Vec2& rx, const Scene& scene, const RadioConfig& cfg,
                               PathSolver solver) {
  cfg.validate();
  DualScalar total(0.0);
  std::vector<Wall> walls;
  for (const PathCandidate& cand : candidates) {
    walls.clear();
    walls.reserve(cand.walls.size());
    for (int w : cand.walls) walls.push_back(scene.walls[static_cast<std::size_t>(w)]);
    const TracedPath path = trace_path(tx, rx, walls, solver, cfg.solver);
    if (!path.reachable) continue;
    total += path_validity(path, cand, scene, cfg) * path_gain(path, cfg);
  }
  return total;
}

DualScalar received_power(const Vec2& tx, const Vec2& rx, const Scene& scene,
                          const RadioConfig& cfg, PathSolver solver) {
  const auto candidates = enumerate_candidates(scene, cfg.max_order);
  return received_power_over(candidates, tx, rx, scene, cfg, solver);
}

PowerGrid power_map(const Scene& scene, const Point& tx, const RadioConfig& cfg,
                    const GridSpec& grid, PathSolver solver) {
  if (grid.nx < 1 || grid.ny < 1) throw std::invalid_argument("grid must be at least 1x1");
  PowerGrid out;
  out.nx = grid.nx;
  out.ny = grid.ny;
  out.x0 = grid.bounds.xmin;
  out.y0 = grid.bounds.ymin;
  out.dx = grid.bounds.width() / grid.nx;
  out.dy = grid.bounds.height() / grid.ny;
  out.values.resize(static_cast<std::size_t>(grid.nx) * static_cast<std::size_t>(grid.ny));
  out.grad_norms.resize(out.values.size());

  const auto candidates = enumerate_candidates(scene, cfg.max_order);
  const Vec2 tx_point{DualScalar(tx.x), DualScalar(tx.y)};

  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const Point c = out.cell_center(i, j);
      const Vec2 rx{DualScalar::variable(c.x, 0, 2), DualScalar::variable(c.y, 1, 2)};
      const DualScalar p = received_power_over(candidates, tx_point, rx, scene, cfg, solver);
      const std::size_t idx =
          static_cast<std::size_t>(j) * static_cast<std::size_t>(grid.nx) + static_cast<std::size_t>(i);
      out.values[idx] = p.value();
      out.grad_norms[idx] = std::hypot(p.grad(0), p.grad(1));
    }
  }
  out.max_value = *std::max_element(out.values.begin(), out.values.end());
  return out;
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

void write_power_csv(std::ostream& out, const PowerGrid& grid) {
  out << "x,y,power,normalized\n";
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const Point c = grid.cell_center(i, j);
      out << fmt_double(c.x) << ',' << fmt_double(c.y) << ',' << fmt_double(grid.value_at(i, j))
          << ',' << fmt_double(grid.normalized_at(i, j)) << '\n';
    }
  }
}

void write_power_ppm(std::ostream& out, const PowerGrid& grid) {
  out << "P6\n" << grid.nx << ' ' << grid.ny << "\n255\n";
  for (int j = grid.ny - 1; j >= 0; --j) {  // top row first
    for (int i = 0; i < grid.nx; ++i) {
      const double v = std::clamp(grid.normalized_at(i, j), 0.0, 1.0);
      const unsigned char byte = static_cast<unsigned char>(std::lround(v * 255.0));
      const char px[3] = {static_cast<char>(byte), static_cast<char>(byte), static_cast<char>(byte)};
      out.write(px, 3);
    }
  }
}

}  // namespace drt
