// Path-candidate enumeration and the three path solvers: the image method
// (exact for specular reflections), Fermat path tracing (length minimization
// over wall-line parameters), and min-path tracing (residual minimization
// over free interaction points). All solvers run in DualScalar arithmetic,
// so the unrolled iterations carry derivatives of the resulting geometry
// with respect to seeded endpoint coordinates.

#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "drt/geometry.hpp"
#include "drt/smoothing.hpp"

namespace drt {

// Ordered wall indices a ray interacts with; empty = line of sight.
struct PathCandidate {
  std::vector<int> walls;

  int order() const { return static_cast<int>(walls.size()); }
};

struct SolverConfig {
  int max_iters = 100;
  double tol = 1e-8;
};

enum class PathSolver { kImage, kFermat, kMinPath };

struct TracedPath {
  // tx, interaction points..., rx.
  std::vector<Vec2> points;
  // One wall-line parameter per interaction; in [0,1] iff on the segment.
  std::vector<DualScalar> wall_params;
  // Specular residual at the returned points; zero on a valid path.
  DualScalar residual_loss;
  DualScalar length;
  // False when the geometry admits no solution (parallel mirror segment).
  bool reachable = true;
};

// All wall-index sequences of length 0..max_order without immediate repeats
// and honoring the visibility matrix, in lexicographic order (LOS first).
std::vector<PathCandidate> enumerate_candidates(const Scene& scene, int max_order);

// Sum over interactions of squared distance to the wall line plus squared
// mirror-law mismatch of the adjacent segment directions. Zero exactly on a
// specular path lying on the wall lines. `points` spans tx..rx.
DualScalar specular_residual(std::span<const Vec2> points, std::span<const Wall> walls);

TracedPath image_method(const Vec2& tx, const Vec2& rx, std::span<const Wall> walls);

TracedPath fermat_path_tracing(const Vec2& tx, const Vec2& rx, std::span<const Wall> walls,
                               const SolverConfig& cfg);

TracedPath min_path_tracing(const Vec2& tx, const Vec2& rx, std::span<const Wall> walls,
                            const SolverConfig& cfg);

TracedPath trace_path(const Vec2& tx, const Vec2& rx, std::span<const Wall> walls,
                      PathSolver solver, const SolverConfig& cfg);

// 2 (1 - s(loss)): equals 1 at zero loss, decreasing, vanishing for large
// loss. Throws on negative loss.
DualScalar residual_to_validity(const DualScalar& loss, const SmoothingConfig& cfg);

struct TraceRecord {
  int candidate = 0;
  PathCandidate sequence;
  TracedPath path;
  double validity = 0.0;
};

// CSV rows: candidate, order, wall_sequence, interleaved point coordinates
// (padded to the widest path), residual, validity, length.
void write_trace_csv(std::ostream& out, std::span<const TraceRecord> records);

}  // namespace drt
