// Smooth path validity (obstruction and on-segment checks), per-path gain,
// received power as an incoherent sum over candidates, and power maps.
//
// Validity multiplies three smooth indicator families: the residual-based
// convergence check of the solver, the on-segment check of every interaction
// parameter, and the obstruction check of every free sub-segment. At large
// alpha the product tends to the exact Boolean validity away from shadow
// boundaries.

#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "drt/paths.hpp"

namespace drt {

struct RadioConfig {
  SmoothingConfig smoothing;
  // Scalar per-reflection coefficient standing in for the full dyadic
  // Fresnel product; the LOS factor is 1.
  double reflection_coeff = 0.5;
  // Distance clamp keeping 1/d^2 finite when endpoints meet.
  double min_distance = 1e-3;
  int max_order = 1;
  SolverConfig solver;

  void validate() const {
    smoothing.validate();
    if (reflection_coeff < 0.0 || reflection_coeff > 1.0) {
      throw std::invalid_argument("reflection coefficient must be in [0,1]");
    }
    if (!(min_distance > 0.0)) throw std::invalid_argument("min_distance must be > 0");
    if (max_order < 0) throw std::invalid_argument("max_order must be >= 0");
  }
};

struct GridSpec {
  Bounds bounds;
  int nx = 1;
  int ny = 1;
};

struct PowerGrid {
  double x0 = 0.0, y0 = 0.0;  // lower-left corner of the covered region
  double dx = 0.0, dy = 0.0;  // cell sizes
  int nx = 0, ny = 0;
  std::vector<double> values;      // row-major, j * nx + i
  std::vector<double> grad_norms;  // |d power / d cell position|
  double max_value = 0.0;          // normalization constant

  Point cell_center(int i, int j) const {
    return {x0 + (i + 0.5) * dx, y0 + (j + 0.5) * dy};
  }
  double value_at(int i, int j) const {
    return values[static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) +
                  static_cast<std::size_t>(i)];
  }
  double normalized_at(int i, int j) const {
    return max_value > 0.0 ? value_at(i, j) / max_value : 0.0;
  }
  double grad_norm_at(int i, int j) const {
    return grad_norms[static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) +
                      static_cast<std::size_t>(i)];
  }
};

// s(t) s(1-t): near 1 inside the segment, near 0 outside.
DualScalar smooth_on_segment(const DualScalar& t, const SmoothingConfig& cfg);

// prod over walls not in `skip` of (1 - intersection indicator) for the
// segment p -> q. A near-parallel wall contributes indicator exactly 0.
DualScalar smooth_obstruction_factor(const Vec2& p, const Vec2& q, const Scene& scene,
                                     std::span<const int> skip, const SmoothingConfig& cfg);

// V(P): residual validity x on-segment checks x obstruction of every free
// sub-segment (each sub-segment skips the walls it touches).
DualScalar path_validity(const TracedPath& path, const PathCandidate& candidate,
                         const Scene& scene, const RadioConfig& cfg);

// gamma^(2 order) / max(length, min_distance)^2.
DualScalar path_gain(const TracedPath& path, const RadioConfig& cfg);

// Incoherent power sum over all candidates up to cfg.max_order. Solver
// failures contribute zero validity; the sum never throws for a valid scene.
DualScalar received_power(const Vec2& tx, const Vec2& rx, const Scene& scene,
                          const RadioConfig& cfg, PathSolver solver);

// Same, over a precomputed candidate list (hoisted for grid sweeps).
DualScalar received_power_over(std::span<const PathCandidate> candidates, const Vec2& tx,
                               const Vec2& rx, const Scene& scene, const RadioConfig& cfg,
                               PathSolver solver);

// Received power at every cell center, swept over the receiver coordinate
// with the transmitter fixed. Cell coordinates are seeded, so every cell
// also records the gradient magnitude of power w.r.t. position.
PowerGrid power_map(const Scene& scene, const Point& tx, const RadioConfig& cfg,
                    const GridSpec& grid, PathSolver solver);

// CSV columns: x, y, power, normalized.
void write_power_csv(std::ostream& out, const PowerGrid& grid);

// Binary P6 grayscale of the normalized values, gamma 1.0, top row first.
void write_power_ppm(std::ostream& out, const PowerGrid& grid);

}  // namespace drt
