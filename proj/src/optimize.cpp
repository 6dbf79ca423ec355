#include "drt/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>

namespace drt {

DualScalar objective(const Vec2& tx, const Scene& scene, const RadioConfig& cfg,
                     PathSolver solver) {
  if (scene.rx.empty()) throw std::invalid_argument("objective requires at least one receiver");
  const auto candidates = enumerate_candidates(scene, cfg.max_order);
  DualScalar worst;
  bool first = true;
  for (const Point& rx : scene.rx) {
    const DualScalar p =
        received_power_over(candidates, tx, Vec2(rx), scene, cfg, solver);
    worst = first ? p : min(worst, p);
    first = false;
  }
  return worst;
}

std::vector<double> alpha_schedule(double start, double end, int n) {
  if (!(start > 0.0) || !(end > 0.0)) {
    throw std::invalid_argument("alpha_schedule requires positive bounds");
  }
  if (n < 1) throw std::invalid_argument("alpha_schedule requires n >= 1");
  if (n == 1) return {end};
  std::vector<double> alphas(static_cast<std::size_t>(n));
  const double log_ratio = std::log(end / start);
  for (int k = 0; k < n; ++k) {
    alphas[static_cast<std::size_t>(k)] = start * std::exp(log_ratio * k / (n - 1));
  }
  alphas.front() = start;  // pin the endpoints exactly
  alphas.back() = end;
  return alphas;
}

namespace {

constexpr double kConvergedFloor = 1e-9;

}  // namespace

Trajectory optimize_tx(const Scene& scene, const Point& init, const OptimizerConfig& opt,
                       const RadioConfig& radio) {
  opt.validate();
  radio.validate();

  const std::vector<double> alphas =
      opt.annealed ? alpha_schedule(opt.alpha_start, opt.alpha_end, opt.n_iters)
                   : std::vector<double>(static_cast<std::size_t>(opt.n_iters), opt.alpha_end);

  Trajectory traj;
  traj.records.reserve(static_cast<std::size_t>(opt.n_iters));
  Point pos = init;
  RadioConfig cfg = radio;

  for (int k = 0; k < opt.n_iters; ++k) {
    cfg.smoothing.alpha = alphas[static_cast<std::size_t>(k)];
    const Vec2 tx{DualScalar::variable(pos.x, 0, 2), DualScalar::variable(pos.y, 1, 2)};
    const DualScalar f = objective(tx, scene, cfg, opt.solver);
    const double gx = f.grad(0);
    const double gy = f.grad(1);
    const double gnorm = std::hypot(gx, gy);

    IterationRecord rec{pos, cfg.smoothing.alpha, f.value(), gnorm, false};
    if (!std::isfinite(gx) || !std::isfinite(gy) || !std::isfinite(f.value())) {
      rec.skipped = true;
    } else {
      double sx = opt.step_size * gx;
      double sy = opt.step_size * gy;
      const double slen = std::hypot(sx, sy);
      if (slen > opt.step_size) {  // cap the displacement at one step_size
        sx *= opt.step_size / slen;
        sy *= opt.step_size / slen;
      }
      pos.x += sx;
      pos.y += sy;
    }
    traj.records.push_back(rec);
  }

  cfg.smoothing.alpha = opt.alpha_end;
  traj.final_position = pos;
  traj.final_objective = objective(Vec2(pos), scene, cfg, opt.solver).value();
  traj.converged = traj.final_objective > kConvergedFloor;
  return traj;
}

std::pair<Point, double> grid_search_optimum(const Scene& scene, const RadioConfig& radio,
                                             int resolution, PathSolver solver,
                                             const std::optional<Bounds>& bounds) {
  if (resolution < 2) throw std::invalid_argument("grid search needs resolution >= 2 per axis");
  const Bounds b = bounds ? *bounds : scene_bounds(scene);
  const double dx = b.width() / resolution;
  const double dy = b.height() / resolution;

  Point best{b.xmin + 0.5 * dx, b.ymin + 0.5 * dy};
  double best_value = -1.0;
  for (int j = 0; j < resolution; ++j) {
    for (int i = 0; i < resolution; ++i) {
      const Point p{b.xmin + (i + 0.5) * dx, b.ymin + (j + 0.5) * dy};
      const double v = objective(Vec2(p), scene, radio, solver).value();
      if (v > best_value) {
        best_value = v;
        best = p;
      }
    }
  }
  return {best, best_value};
}

ExperimentReport convergence_experiment(int n_scenes, int n_rx, std::uint64_t base_seed,
                                        const ExperimentConfig& cfg) {
  if (n_scenes < 1) throw std::invalid_argument("n_scenes must be >= 1");
  cfg.optimizer.validate();
  cfg.radio.validate();

  ExperimentReport report;
  report.n_rx = n_rx;
  report.n_scenes = n_scenes;
  report.base_seed = base_seed;
  report.config = cfg;

  RadioConfig hard = cfg.radio;
  hard.smoothing.alpha = cfg.optimizer.alpha_end;

  int n_annealed = 0;
  int n_baseline = 0;
  int n_both = 0;

  for (int s = 0; s < n_scenes; ++s) {
    const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(s);
    const Scene scene = random_scene(seed, cfg.n_walls, n_rx, cfg.bounds);

    // Initial transmitter: drawn from the scene's own stream, kept off walls.
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<double> ux(cfg.bounds.xmin, cfg.bounds.xmax);
    std::uniform_real_distribution<double> uy(cfg.bounds.ymin, cfg.bounds.ymax);
    Point init;
    for (;;) {
      init = {ux(rng), uy(rng)};
      const bool near_wall =
          std::any_of(scene.walls.begin(), scene.walls.end(), [&](const Wall& w) {
            const double vx = init.x - w.a().x;
            const double vy = init.y - w.a().y;
            const double t =
                std::clamp((vx * w.direction().x + vy * w.direction().y) / w.length(), 0.0, 1.0);
            const double cx = w.a().x + t * (w.b().x - w.a().x);
            const double cy = w.a().y + t * (w.b().y - w.a().y);
            return std::hypot(init.x - cx, init.y - cy) < cfg.radio.min_distance;
          });
      if (!near_wall) break;
    }

    const auto [opt_pos, opt_value] =
        grid_search_optimum(scene, hard, cfg.grid_resolution, cfg.optimizer.solver, cfg.bounds);
    (void)opt_pos;
    const double threshold = cfg.optimizer.success_fraction * opt_value;

    OptimizerConfig annealed_cfg = cfg.optimizer;
    annealed_cfg.annealed = true;
    OptimizerConfig baseline_cfg = cfg.optimizer;
    baseline_cfg.annealed = false;

    bool ok[2];
    const OptimizerConfig* variants[2] = {&annealed_cfg, &baseline_cfg};
    for (int v = 0; v < 2; ++v) {
      const Trajectory traj = optimize_tx(scene, init, *variants[v], cfg.radio);
      const bool success = traj.final_objective >= threshold;
      ok[v] = success;
      report.runs.push_back(ExperimentRun{seed, n_rx, variants[v]->annealed, init,
                                          traj.final_position, traj.final_objective, opt_value,
                                          success});
    }
    n_annealed += ok[0] ? 1 : 0;
    n_baseline += ok[1] ? 1 : 0;
    n_both += (ok[0] && ok[1]) ? 1 : 0;
  }

  report.rate_annealed = static_cast<double>(n_annealed) / n_scenes;
  report.rate_baseline = static_cast<double>(n_baseline) / n_scenes;
  report.ratio = n_baseline > 0 ? report.rate_annealed / report.rate_baseline
                                : std::numeric_limits<double>::infinity();
  report.conditional = n_baseline > 0 ? static_cast<double>(n_both) / n_baseline : 1.0;
  return report;
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

void write_experiment_csv(std::ostream& out, std::span<const ExperimentReport> reports) {
  if (!reports.empty()) {
    const ExperimentConfig& c = reports.front().config;
    out << "# n_iters=" << c.optimizer.n_iters << " step_size=" << fmt_double(c.optimizer.step_size)
        << " alpha_start=" << fmt_double(c.optimizer.alpha_start)
        << " alpha_end=" << fmt_double(c.optimizer.alpha_end)
        << " success_fraction=" << fmt_double(c.optimizer.success_fraction)
        << " n_walls=" << c.n_walls << " grid_resolution=" << c.grid_resolution
        << " gamma=" << fmt_double(c.radio.reflection_coeff) << " max_order=" << c.radio.max_order
        << "\n";
  }
  out << "seed,n_rx,variant,init_x,init_y,final_x,final_y,final_F,grid_opt_F,success\n";
  for (const ExperimentReport& rep : reports) {
    for (const ExperimentRun& run : rep.runs) {
      out << run.seed << ',' << run.n_rx << ',' << (run.annealed ? "annealed" : "baseline") << ','
          << fmt_double(run.init.x) << ',' << fmt_double(run.init.y) << ','
          << fmt_double(run.final.x) << ',' << fmt_double(run.final.y) << ','
          << fmt_double(run.final_objective) << ',' << fmt_double(run.grid_optimum) << ','
          << (run.success ? 1 : 0) << '\n';
    }
  }
  for (const ExperimentReport& rep : reports) {
    out << "n_rx=" << rep.n_rx << '\n';
    out << "rate_annealed=" << fmt_double(rep.rate_annealed) << '\n';
    out << "rate_baseline=" << fmt_double(rep.rate_baseline) << '\n';
    out << "ratio=" << fmt_double(rep.ratio) << '\n';
    out << "conditional=" << fmt_double(rep.conditional) << '\n';
  }
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "iter,x,y,alpha,objective,grad_norm,skipped\n";
  for (std::size_t i = 0; i < traj.records.size(); ++i) {
    const IterationRecord& r = traj.records[i];
    out << i << ',' << fmt_double(r.position.x) << ',' << fmt_double(r.position.y) << ','
        << fmt_double(r.alpha) << ',' << fmt_double(r.objective) << ','
        << fmt_double(r.grad_norm) << ',' << (r.skipped ? 1 : 0) << '\n';
  }
  out << "final_x=" << fmt_double(traj.final_position.x) << '\n';
  out << "final_y=" << fmt_double(traj.final_position.y) << '\n';
  out << "final_objective=" << fmt_double(traj.final_objective) << '\n';
  out << "converged=" << (traj.converged ? 1 : 0) << '\n';
}

}  // namespace drt
