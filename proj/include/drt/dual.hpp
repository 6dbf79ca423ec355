// Forward-mode automatic differentiation over a small fixed seed space.
//
// A DualScalar carries a value plus the gradient of that value with respect
// to up to kMaxSeed seeded parameters. Constants have seed dimension 0 and
// unify with any dimension; two nonzero dimensions must match exactly.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace drt {

inline constexpr int kMaxSeed = 4;

class DualScalar {
 public:
  // Constants carry no seeds; they adopt the other operand's dimension.
  constexpr DualScalar() = default;
  constexpr DualScalar(double value) : v_(value) {}  // NOLINT: implicit by design

  // Seeds the index-th parameter of a dim-dimensional differentiation.
  static DualScalar variable(double value, int index, int dim) {
    if (dim < 1 || dim > kMaxSeed) {
      throw std::invalid_argument("seed dimension must be in [1, " +
                                  std::to_string(kMaxSeed) + "], got " +
                                  std::to_string(dim));
    }
    if (index < 0 || index >= dim) {
      throw std::invalid_argument("seed index " + std::to_string(index) +
                                  " out of range for dimension " +
                                  std::to_string(dim));
    }
    DualScalar d(value);
    d.dim_ = dim;
    d.g_[static_cast<std::size_t>(index)] = 1.0;
    return d;
  }

  static constexpr DualScalar constant(double value) { return DualScalar(value); }

  double value() const { return v_; }
  int seed_dim() const { return dim_; }

  // Derivative with respect to seed i. Constants differentiate to zero.
  double grad(int i) const {
    if (i < 0 || i >= kMaxSeed) {
      throw std::invalid_argument("gradient index out of range");
    }
    return i < dim_ ? g_[static_cast<std::size_t>(i)] : 0.0;
  }

  std::span<const double> grad() const {
    return {g_.data(), static_cast<std::size_t>(dim_)};
  }

  friend DualScalar operator+(const DualScalar& a, const DualScalar& b) {
    DualScalar r(a.v_ + b.v_);
    r.dim_ = unify(a.dim_, b.dim_);
    for (int i = 0; i < r.dim_; ++i) r.g_[i] = a.grad(i) + b.grad(i);
    return r;
  }

  friend DualScalar operator-(const DualScalar& a, const DualScalar& b) {
    DualScalar r(a.v_ - b.v_);
    r.dim_ = unify(a.dim_, b.dim_);
    for (int i = 0; i < r.dim_; ++i) r.g_[i] = a.grad(i) - b.grad(i);
    return r;
  }

  friend DualScalar operator*(const DualScalar& a, const DualScalar& b) {
    DualScalar r(a.v_ * b.v_);
    r.dim_ = unify(a.dim_, b.dim_);
    for (int i = 0; i < r.dim_; ++i) r.g_[i] = a.grad(i) * b.v_ + a.v_ * b.grad(i);
    return r;
  }

  friend DualScalar operator/(const DualScalar& a, const DualScalar& b) {
    if (b.v_ == 0.0) throw std::domain_error("dual division by zero");
    DualScalar r(a.v_ / b.v_);
    r.dim_ = unify(a.dim_, b.dim_);
    const double inv = 1.0 / b.v_;
    for (int i = 0; i < r.dim_; ++i) {
      r.g_[i] = (a.grad(i) - r.v_ * b.grad(i)) * inv;
    }
    return r;
  }

  friend DualScalar operator-(const DualScalar& a) {
    DualScalar r(-a.v_);
    r.dim_ = a.dim_;
    for (int i = 0; i < r.dim_; ++i) r.g_[i] = -a.g_[i];
    return r;
  }

  DualScalar& operator+=(const DualScalar& b) { return *this = *this + b; }
  DualScalar& operator-=(const DualScalar& b) { return *this = *this - b; }
  DualScalar& operator*=(const DualScalar& b) { return *this = *this * b; }
  DualScalar& operator/=(const DualScalar& b) { return *this = *this / b; }

  friend DualScalar exp(const DualScalar& a) {
    DualScalar r(std::exp(a.v_));
    r.dim_ = a.dim_;
    for (int i = 0; i < r.dim_; ++i) r.g_[i] = r.v_ * a.g_[i];
    return r;
  }

  friend DualScalar sqrt(const DualScalar& a) {
    if (a.v_ < 0.0) throw std::domain_error("dual sqrt of negative value");
    DualScalar r(std::sqrt(a.v_));
    r.dim_ = a.dim_;
    const double d = 0.5 / r.v_;  // inf at 0, as for the real function
    for (int i = 0; i < r.dim_; ++i) r.g_[i] = d * a.g_[i];
    return r;
  }

  // Symmetric subgradient at 0: derivative taken as 0.
  friend DualScalar abs(const DualScalar& a) {
    DualScalar r(std::fabs(a.v_));
    r.dim_ = a.dim_;
    const double s = a.v_ > 0.0 ? 1.0 : (a.v_ < 0.0 ? -1.0 : 0.0);
    for (int i = 0; i < r.dim_; ++i) r.g_[i] = s * a.g_[i];
    return r;
  }

  // Ties resolve to the first argument's gradient.
  friend DualScalar min(const DualScalar& a, const DualScalar& b) {
    return select(a.v_ <= b.v_, a, b);
  }

  friend DualScalar max(const DualScalar& a, const DualScalar& b) {
    return select(a.v_ >= b.v_, a, b);
  }

 private:
  static int unify(int da, int db) {
    if (da == db || db == 0) return da;
    if (da == 0) return db;
    throw std::invalid_argument("seed dimension mismatch: " +
                                std::to_string(da) + " vs " + std::to_string(db));
  }

  static DualScalar select(bool first, const DualScalar& a, const DualScalar& b) {
    const DualScalar& picked = first ? a : b;
    DualScalar r(picked.v_);
    r.dim_ = unify(a.dim_, b.dim_);
    for (int i = 0; i < r.dim_; ++i) r.g_[i] = picked.grad(i);
    return r;
  }

  double v_ = 0.0;
  int dim_ = 0;
  std::array<double, kMaxSeed> g_{};
};

inline DualScalar lift_variable(double value, int index, int dim) {
  return DualScalar::variable(value, index, dim);
}

struct GradientResult {
  double value = 0.0;
  std::vector<double> grad;
};

// Evaluates f at `point` with every coordinate seeded, returning the value and
// the full gradient. f receives a span of DualScalar variables.
template <typename F>
GradientResult gradient(F&& f, std::span<const double> point) {
  const int dim = static_cast<int>(point.size());
  if (dim < 1 || dim > kMaxSeed) {
    throw std::invalid_argument("gradient: point dimension must be in [1, " +
                                std::to_string(kMaxSeed) + "]");
  }
  std::vector<DualScalar> vars;
  vars.reserve(point.size());
  for (int i = 0; i < dim; ++i) {
    vars.push_back(DualScalar::variable(point[static_cast<std::size_t>(i)], i, dim));
  }
  const DualScalar out = f(std::span<const DualScalar>(vars));
  GradientResult r;
  r.value = out.value();
  r.grad.resize(point.size());
  for (int i = 0; i < dim; ++i) r.grad[static_cast<std::size_t>(i)] = out.grad(i);
  return r;
}

}  // namespace drt
