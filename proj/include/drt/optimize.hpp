// Transmitter-placement optimization: gradient ascent on the min-over-
// receivers received power, with a geometric annealing schedule on the
// smoothing sharpness, plus the randomized convergence-rate experiment.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "drt/radio.hpp"

namespace drt {

struct OptimizerConfig {
  int n_iters = 150;
  // Ascent step; the per-iteration displacement is additionally capped at
  // this length so inverse-square gradients near a receiver cannot launch
  // the iterate out of the scene.
  double step_size = 0.01;
  double alpha_start = 1.0;
  double alpha_end = 100.0;
  bool annealed = true;
  PathSolver solver = PathSolver::kImage;
  double success_fraction = 0.9;

  void validate() const {
    if (n_iters < 1) throw std::invalid_argument("n_iters must be >= 1");
    if (!(alpha_start > 0.0) || !(alpha_end >= alpha_start)) {
      throw std::invalid_argument("alpha schedule requires alpha_end >= alpha_start > 0");
    }
    if (!(success_fraction > 0.0) || success_fraction > 1.0) {
      throw std::invalid_argument("success_fraction must be in (0,1]");
    }
  }
};

struct IterationRecord {
  Point position;     // iterate at the start of the iteration
  double alpha = 0.0;
  double objective = 0.0;
  double grad_norm = 0.0;
  bool skipped = false;  // non-finite gradient, zero step taken
};

struct Trajectory {
  std::vector<IterationRecord> records;
  Point final_position;
  // Objective at the final position, re-evaluated at alpha_end.
  double final_objective = 0.0;
  // The run ended on a non-vanishing objective (it found, or started in,
  // a region actually covered by the transmitter).
  bool converged = false;
};

// min over receivers of the received power at tx; ties keep the earlier
// receiver's gradient.
DualScalar objective(const Vec2& tx, const Scene& scene, const RadioConfig& cfg,
                     PathSolver solver);

// Geometric progression from start to end with n terms; n = 1 gives {end}.
std::vector<double> alpha_schedule(double start, double end, int n);

Trajectory optimize_tx(const Scene& scene, const Point& init, const OptimizerConfig& opt,
                       const RadioConfig& radio);

// Exhaustive objective evaluation over a resolution x resolution grid of the
// given bounds (scene bounds when absent); the independent success oracle.
std::pair<Point, double> grid_search_optimum(const Scene& scene, const RadioConfig& radio,
                                             int resolution, PathSolver solver,
                                             const std::optional<Bounds>& bounds = std::nullopt);

struct ExperimentConfig {
  int n_walls = 3;
  Bounds bounds{0.0, 0.0, 1.0, 1.0};
  int grid_resolution = 48;
  OptimizerConfig optimizer;  // annealed variant; the baseline runs the same
                              // config with annealed = false
  RadioConfig radio;
};

struct ExperimentRun {
  std::uint64_t seed = 0;
  int n_rx = 0;
  bool annealed = false;
  Point init;
  Point final;
  double final_objective = 0.0;
  double grid_optimum = 0.0;
  bool success = false;
};

struct ExperimentReport {
  int n_rx = 0;
  int n_scenes = 0;
  std::uint64_t base_seed = 0;
  ExperimentConfig config;
  std::vector<ExperimentRun> runs;  // two per scene: annealed then baseline
  double rate_annealed = 0.0;
  double rate_baseline = 0.0;
  double ratio = 0.0;        // rate_annealed / rate_baseline (inf if baseline 0)
  double conditional = 0.0;  // P(annealed success | baseline success)
};

// Seeded random scenes with a random initial transmitter each; runs the
// annealed optimizer and the fixed-alpha baseline against the grid-search
// oracle. Success: final objective >= success_fraction x grid optimum.
ExperimentReport convergence_experiment(int n_scenes, int n_rx, std::uint64_t base_seed,
                                        const ExperimentConfig& cfg);

// Rows for every run followed by key=value summary lines per report.
void write_experiment_csv(std::ostream& out, std::span<const ExperimentReport> reports);

// Per-iteration rows followed by key=value summary lines.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

}  // namespace drt
