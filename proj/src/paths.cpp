#include "drt/paths.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace drt {

namespace {

void enumerate_rec(const Scene& scene, int max_order, std::vector<int>& prefix,
                   std::vector<PathCandidate>& out) {
  if (static_cast<int>(prefix.size()) >= max_order) return;
  const int n = static_cast<int>(scene.walls.size());
  for (int w = 0; w < n; ++w) {
    if (!prefix.empty() && !scene.visible(prefix.back(), w)) continue;
    prefix.push_back(w);
    out.push_back(PathCandidate{prefix});
    enumerate_rec(scene, max_order, prefix, out);
    prefix.pop_back();
  }
}

DualScalar path_length_of(std::span<const Vec2> points) {
  DualScalar len(0.0);
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    len += distance(points[i], points[i + 1]);
  }
  return len;
}

// Reflection across the wall normal without the public unit-vector checks;
// inputs are normalized by construction.
Vec2 reflect_unchecked(const Vec2& d, const Point& n) {
  const Vec2 nv(n);
  return d - (DualScalar(2.0) * dot(d, nv)) * nv;
}

TracedPath line_of_sight(const Vec2& tx, const Vec2& rx) {
  TracedPath p;
  p.points = {tx, rx};
  p.residual_loss = DualScalar(0.0);
  p.length = distance(tx, rx);
  return p;
}

TracedPath unreachable_path(const Vec2& tx, const Vec2& rx) {
  TracedPath p;
  p.points = {tx, rx};
  p.residual_loss = DualScalar(1e30);
  p.length = distance(tx, rx);
  p.reachable = false;
  return p;
}

// Gaussian elimination with partial pivoting over DualScalar; n is tiny
// (at most 2 * max_order). Returns false on a singular pivot.
bool solve_linear(std::vector<std::vector<DualScalar>>& a, std::vector<DualScalar>& b) {
  const int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::fabs(a[r][col].value()) > std::fabs(a[pivot][col].value())) pivot = r;
    }
    if (std::fabs(a[pivot][col].value()) < 1e-280) return false;
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (int r = col + 1; r < n; ++r) {
      const DualScalar f = a[r][col] / a[col][col];
      for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  for (int col = n - 1; col >= 0; --col) {
    DualScalar s = b[col];
    for (int c = col + 1; c < n; ++c) s -= a[col][c] * b[c];
    b[col] = s / a[col][col];
  }
  return true;
}

}  // namespace

std::vector<PathCandidate> enumerate_candidates(const Scene& scene, int max_order) {
  if (max_order < 0) throw std::invalid_argument("max_order must be >= 0");
  std::vector<PathCandidate> out;
  out.push_back(PathCandidate{});  // LOS
  std::vector<int> prefix;
  enumerate_rec(scene, max_order, prefix, out);
  // Depth-first emission above is ordered by prefix; re-sort by (order, lex)
  // so all candidates of one order group together.
  std::stable_sort(out.begin(), out.end(), [](const PathCandidate& a, const PathCandidate& b) {
    if (a.order() != b.order()) return a.order() < b.order();
    return a.walls < b.walls;
  });
  return out;
}

DualScalar specular_residual(std::span<const Vec2> points, std::span<const Wall> walls) {
  const std::size_t k = walls.size();
  if (points.size() != k + 2) {
    throw std::invalid_argument("specular_residual: points must span tx..rx");
  }
  DualScalar cost(0.0);
  for (std::size_t j = 0; j < k; ++j) {
    const Wall& w = walls[j];
    const Vec2& x = points[j + 1];
    const DualScalar h = dot(x - Vec2(w.a()), Vec2(w.normal()));
    const Vec2 incoming = unit(x - points[j]);
    const Vec2 outgoing = unit(points[j + 2] - x);
    const Vec2 mismatch = outgoing - reflect_unchecked(incoming, w.normal());
    cost += h * h + squared_norm(mismatch);
  }
  return cost;
}

TracedPath image_method(const Vec2& tx, const Vec2& rx, std::span<const Wall> walls) {
  const std::size_t k = walls.size();
  if (k == 0) return line_of_sight(tx, rx);

  std::vector<Vec2> images(k + 1);
  images[0] = tx;
  for (std::size_t j = 1; j <= k; ++j) {
    images[j] = mirror_point(images[j - 1], walls[j - 1]);
  }

  TracedPath path;
  path.points.assign(k + 2, Vec2());
  path.points.front() = tx;
  path.points.back() = rx;
  path.wall_params.assign(k, DualScalar(0.0));

  Vec2 cur = rx;
  for (std::size_t j = k; j >= 1; --j) {
    if (distance(cur, images[j]).value() < 1e-12) return unreachable_path(tx, rx);
    const auto hit = segment_intersection(cur, images[j], walls[j - 1]);
    if (!hit) return unreachable_path(tx, rx);
    cur = point_on_wall(walls[j - 1], hit->u);
    path.points[j] = cur;
    path.wall_params[j - 1] = hit->u;
  }
  path.length = path_length_of(path.points);
  path.residual_loss = specular_residual(path.points, walls);
  return path;
}

namespace {

struct FermatState {
  std::vector<Vec2> points;  // tx, x_1..x_k, rx
  DualScalar length;
};

FermatState fermat_assemble(const Vec2& tx, const Vec2& rx, std::span<const Wall> walls,
                            const std::vector<DualScalar>& t) {
  FermatState s;
  s.points.reserve(walls.size() + 2);
  s.points.push_back(tx);
  for (std::size_t j = 0; j < walls.size(); ++j) {
    s.points.push_back(point_on_wall(walls[j], t[j]));
  }
  s.points.push_back(rx);
  s.length = path_length_of(s.points);
  return s;
}

// u' P(v) v' / |v| with P the projector orthogonal to v; the curvature
// kernel of the path-length Hessian.
DualScalar curvature_term(const Vec2& seg, const Vec2& u, const Vec2& v) {
  const DualScalar len = max(norm(seg), DualScalar(1e-150));
  const Vec2 dir = unit(seg);
  return (dot(u, v) - dot(u, dir) * dot(v, dir)) / len;
}

}  // namespace

TracedPath fermat_path_tracing(const Vec2& tx, const Vec2& rx, std::span<const Wall> walls,
                               const SolverConfig& cfg) {
  const std::size_t k = walls.size();
  if (k == 0) return line_of_sight(tx, rx);

  std::vector<Vec2> wall_dirs;
  wall_dirs.reserve(k);
  for (const Wall& w : walls) {
    wall_dirs.emplace_back(Point{w.b().x - w.a().x, w.b().y - w.a().y});
  }

  // Wall midpoints: deterministic, scale-free start.
  std::vector<DualScalar> t(k, DualScalar(0.5));
  FermatState state = fermat_assemble(tx, rx, walls, t);
  double lambda = 1e-8;

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    // Gradient of total length w.r.t. each wall parameter.
    std::vector<DualScalar> g(k);
    double gnorm2 = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const Vec2 incoming = unit(state.points[j + 1] - state.points[j]);
      const Vec2 outgoing = unit(state.points[j + 2] - state.points[j + 1]);
      g[j] = dot(incoming - outgoing, wall_dirs[j]);
      gnorm2 += g[j].value() * g[j].value();
    }
    if (std::sqrt(gnorm2) < cfg.tol) break;

    // Tridiagonal Hessian of the (convex) length objective.
    std::vector<std::vector<DualScalar>> h(k, std::vector<DualScalar>(k, DualScalar(0.0)));
    for (std::size_t j = 0; j < k; ++j) {
      const Vec2 seg_in = state.points[j + 1] - state.points[j];
      const Vec2 seg_out = state.points[j + 2] - state.points[j + 1];
      h[j][j] = curvature_term(seg_in, wall_dirs[j], wall_dirs[j]) +
                curvature_term(seg_out, wall_dirs[j], wall_dirs[j]);
      if (j + 1 < k) {
        const DualScalar off = -curvature_term(seg_out, wall_dirs[j], wall_dirs[j + 1]);
        h[j][j + 1] = off;
        h[j + 1][j] = off;
      }
    }
    double diag_scale = 0.0;
    for (std::size_t j = 0; j < k; ++j) diag_scale = std::max(diag_scale, std::fabs(h[j][j].value()));
    if (diag_scale == 0.0) diag_scale = 1.0;

    bool stepped = false;
    for (int attempt = 0; attempt < 8 && !stepped; ++attempt) {
      auto a = h;
      for (std::size_t j = 0; j < k; ++j) a[j][j] += DualScalar(lambda * diag_scale);
      std::vector<DualScalar> step(k);
      for (std::size_t j = 0; j < k; ++j) step[j] = -g[j];
      if (solve_linear(a, step)) {
        std::vector<DualScalar> trial(k);
        for (std::size_t j = 0; j < k; ++j) trial[j] = t[j] + step[j];
        FermatState next = fermat_assemble(tx, rx, walls, trial);
        if (next.length.value() < state.length.value() ||
            std::sqrt(gnorm2) < 1e3 * cfg.tol) {
          t = std::move(trial);
          state = std::move(next);
          lambda = std::max(lambda * 0.25, 1e-12);
          stepped = true;
        }
      }
      if (!stepped) lambda *= 10.0;
    }
    if (!stepped) {
      // Damped gradient descent fallback.
      double eta = 1.0 / (diag_scale + lambda);
      for (int back = 0; back < 20 && !stepped; ++back, eta *= 0.5) {
        std::vector<DualScalar> trial(k);
        for (std::size_t j = 0; j < k; ++j) trial[j] = t[j] - DualScalar(eta) * g[j];
        FermatState next = fermat_assemble(tx, rx, walls, trial);
        if (next.length.value() < state.length.value()) {
          t = std::move(trial);
          state = std::move(next);
          stepped = true;
        }
      }
      if (!stepped) break;  // stalled; return current point with its residual
    }
  }

  TracedPath path;
  path.points = std::move(state.points);
  path.wall_params = std::move(t);
  path.length = state.length;
  path.residual_loss = specular_residual(path.points, walls);
  return path;
}

namespace {

struct Mat2 {
  DualScalar m00, m01, m10, m11;
};

// (I - u u^T) / |v| for u = unit(v).
Mat2 unit_jacobian(const Vec2& v) {
  const DualScalar len = max(norm(v), DualScalar(1e-150));
  const Vec2 u = unit(v);
  return {(DualScalar(1.0) - u.x * u.x) / len, (-u.x * u.y) / len,
          (-u.x * u.y) / len, (DualScalar(1.0) - u.y * u.y) / len};
}

Mat2 reflect_times(const Point& n, const Mat2& p) {
  // (I - 2 n n^T) * P
  const double r00 = 1.0 - 2.0 * n.x * n.x;
  const double r01 = -2.0 * n.x * n.y;
  const double r11 = 1.0 - 2.0 * n.y * n.y;
  return {DualScalar(r00) * p.m00 + DualScalar(r01) * p.m10,
          DualScalar(r00) * p.m01 + DualScalar(r01) * p.m11,
          DualScalar(r01) * p.m00 + DualScalar(r11) * p.m10,
          DualScalar(r01) * p.m01 + DualScalar(r11) * p.m11};
}

struct MinPathEval {
  std::vector<DualScalar> residuals;  // 3 per interaction
  DualScalar cost;
};

MinPathEval min_path_residuals(std::span<const Vec2> points, std::span<const Wall> walls) {
  MinPathEval e;
  e.cost = DualScalar(0.0);
  const std::size_t k = walls.size();
  e.residuals.reserve(3 * k);
  for (std::size_t j = 0; j < k; ++j) {
    const Wall& w = walls[j];
    const Vec2& x = points[j + 1];
    const DualScalar h = dot(x - Vec2(w.a()), Vec2(w.normal()));
    const Vec2 incoming = unit(x - points[j]);
    const Vec2 outgoing = unit(points[j + 2] - x);
    const Vec2 mismatch = outgoing - reflect_unchecked(incoming, w.normal());
    e.residuals.push_back(h);
    e.residuals.push_back(mismatch.x);
    e.residuals.push_back(mismatch.y);
    e.cost += h * h + squared_norm(mismatch);
  }
  return e;
}

// One Levenberg-Marquardt descent from the given interior points.
// Returns the final points and cost.
struct MinPathRun {
  std::vector<Vec2> points;
  DualScalar cost;
};

MinPathRun min_path_descend(const Vec2& tx, const Vec2& rx, std::span<const Wall> walls,
                            std::vector<Vec2> interior, const SolverConfig& cfg) {
  const std::size_t k = walls.size();
  const std::size_t nvar = 2 * k;

  auto assemble = [&](const std::vector<Vec2>& inner) {
    std::vector<Vec2> pts;
    pts.reserve(k + 2);
    pts.push_back(tx);
    for (const Vec2& p : inner) pts.push_back(p);
    pts.push_back(rx);
    return pts;
  };

  std::vector<Vec2> points = assemble(interior);
  MinPathEval eval = min_path_residuals(points, walls);
  double lambda = 1e-6;

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    if (eval.cost.value() < 1e-26) break;

    // Jacobian of the residual stack w.r.t. the free points, built from the
    // analytic unit-direction derivatives.
    const std::size_t nres = 3 * k;
    std::vector<std::vector<DualScalar>> jac(nres, std::vector<DualScalar>(nvar, DualScalar(0.0)));
    for (std::size_t j = 0; j < k; ++j) {
      const Wall& w = walls[j];
      const std::size_t col = 2 * j;
      // distance residual row
      jac[3 * j][col] = DualScalar(w.normal().x);
      jac[3 * j][col + 1] = DualScalar(w.normal().y);
      // direction residual rows
      const Mat2 p_out = unit_jacobian(points[j + 2] - points[j + 1]);
      const Mat2 rp_in = reflect_times(w.normal(), unit_jacobian(points[j + 1] - points[j]));
      // w.r.t. x_j
      jac[3 * j + 1][col] = -p_out.m00 - rp_in.m00;
      jac[3 * j + 1][col + 1] = -p_out.m01 - rp_in.m01;
      jac[3 * j + 2][col] = -p_out.m10 - rp_in.m10;
      jac[3 * j + 2][col + 1] = -p_out.m11 - rp_in.m11;
      if (j + 1 < k) {  // w.r.t. x_{j+1}
        jac[3 * j + 1][col + 2] = p_out.m00;
        jac[3 * j + 1][col + 3] = p_out.m01;
        jac[3 * j + 2][col + 2] = p_out.m10;
        jac[3 * j + 2][col + 3] = p_out.m11;
      }
      if (j >= 1) {  // w.r.t. x_{j-1}
        jac[3 * j + 1][col - 2] = rp_in.m00;
        jac[3 * j + 1][col - 1] = rp_in.m01;
        jac[3 * j + 2][col - 2] = rp_in.m10;
        jac[3 * j + 2][col - 1] = rp_in.m11;
      }
    }

    // Normal equations J^T J delta = -J^T r.
    std::vector<std::vector<DualScalar>> jtj(nvar, std::vector<DualScalar>(nvar, DualScalar(0.0)));
    std::vector<DualScalar> jtr(nvar, DualScalar(0.0));
    for (std::size_t r = 0; r < nres; ++r) {
      for (std::size_t c = 0; c < nvar; ++c) {
        if (jac[r][c].value() == 0.0 && jac[r][c].seed_dim() == 0) continue;
        jtr[c] += jac[r][c] * eval.residuals[r];
        for (std::size_t c2 = c; c2 < nvar; ++c2) {
          jtj[c][c2] += jac[r][c] * jac[r][c2];
        }
      }
    }
    for (std::size_t c = 0; c < nvar; ++c) {
      for (std::size_t c2 = 0; c2 < c; ++c2) jtj[c][c2] = jtj[c2][c];
    }

    double grad_inf = 0.0;
    for (const DualScalar& v : jtr) grad_inf = std::max(grad_inf, std::fabs(v.value()));
    if (grad_inf < 1e-14) break;

    double diag_scale = 0.0;
    for (std::size_t c = 0; c < nvar; ++c) diag_scale = std::max(diag_scale, std::fabs(jtj[c][c].value()));
    if (diag_scale == 0.0) diag_scale = 1.0;

    bool stepped = false;
    for (int attempt = 0; attempt < 10 && !stepped; ++attempt) {
      auto a = jtj;
      for (std::size_t c = 0; c < nvar; ++c) a[c][c] += DualScalar(lambda * diag_scale);
      std::vector<DualScalar> step(nvar);
      for (std::size_t c = 0; c < nvar; ++c) step[c] = -jtr[c];
      if (solve_linear(a, step)) {
        std::vector<Vec2> trial(interior);
        for (std::size_t j = 0; j < k; ++j) {
          trial[j].x += step[2 * j];
          trial[j].y += step[2 * j + 1];
        }
        std::vector<Vec2> trial_points = assemble(trial);
        MinPathEval next = min_path_residuals(trial_points, walls);
        if (next.cost.value() < eval.cost.value()) {
          interior = std::move(trial);
          points = std::move(trial_points);
          eval = std::move(next);
          lambda = std::max(lambda * 0.25, 1e-12);
          stepped = true;
        }
      }
      if (!stepped) lambda *= 10.0;
    }
    if (!stepped) break;  // stalled
  }

  return {std::move(points), eval.cost};
}

}  // namespace

TracedPath min_path_tracing(const Vec2& tx, const Vec2& rx, std::span<const Wall> walls,
                            const SolverConfig& cfg) {
  const std::size_t k = walls.size();
  if (k == 0) return line_of_sight(tx, rx);

  auto interior_at = [&](double frac) {
    std::vector<Vec2> inner;
    inner.reserve(k);
    for (const Wall& w : walls) inner.push_back(point_on_wall(w, DualScalar(frac)));
    return inner;
  };

  MinPathRun best = min_path_descend(tx, rx, walls, interior_at(0.5), cfg);

  // A stalled descent from the midpoints retries from a few deterministic
  // alternative starts before settling for a positive residual.
  if (best.cost.value() > 1e-16) {
    for (const double frac : {0.25, 0.75}) {
      MinPathRun run = min_path_descend(tx, rx, walls, interior_at(frac), cfg);
      if (run.cost.value() < best.cost.value()) best = std::move(run);
      if (best.cost.value() < 1e-20) break;
    }
  }

  TracedPath path;
  path.points = std::move(best.points);
  path.wall_params.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    const Wall& w = walls[j];
    const Vec2 rel = path.points[j + 1] - Vec2(w.a());
    path.wall_params.push_back(dot(rel, Vec2(w.direction())) / DualScalar(w.length()));
  }
  path.length = path_length_of(path.points);
  path.residual_loss = best.cost;
  return path;
}

TracedPath trace_path(const Vec2& tx, const Vec2& rx, std::span<const Wall> walls,
                      PathSolver solver, const SolverConfig& cfg) {
  switch (solver) {
    case PathSolver::kImage:
      return image_method(tx, rx, walls);
    case PathSolver::kFermat:
      return fermat_path_tracing(tx, rx, walls, cfg);
    case PathSolver::kMinPath:
      return min_path_tracing(tx, rx, walls, cfg);
  }
  throw std::invalid_argument("unknown path solver");
}

DualScalar residual_to_validity(const DualScalar& loss, const SmoothingConfig& cfg) {
  if (loss.value() < 0.0) throw std::invalid_argument("residual loss must be >= 0");
  return DualScalar(2.0) * (DualScalar(1.0) - smooth(loss, cfg));
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

void write_trace_csv(std::ostream& out, std::span<const TraceRecord> records) {
  std::size_t max_points = 2;
  for (const TraceRecord& r : records) max_points = std::max(max_points, r.path.points.size());

  out << "candidate,order,wall_sequence";
  for (std::size_t i = 0; i < max_points; ++i) out << ",x" << i << ",y" << i;
  out << ",residual,validity,length\n";

  for (const TraceRecord& r : records) {
    out << r.candidate << ',' << r.sequence.order() << ',';
    for (std::size_t i = 0; i < r.sequence.walls.size(); ++i) {
      if (i) out << '-';
      out << r.sequence.walls[i];
    }
    for (std::size_t i = 0; i < max_points; ++i) {
      if (i < r.path.points.size()) {
        const Point p = r.path.points[i].value();
        out << ',' << fmt_double(p.x) << ',' << fmt_double(p.y);
      } else {
        out << ",,";
      }
    }
    out << ',' << fmt_double(r.path.residual_loss.value()) << ','
        << fmt_double(r.validity) << ',' << fmt_double(r.path.length.value()) << '\n';
  }
}

}  // namespace drt
