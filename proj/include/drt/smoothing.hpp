// Smoothing functions replacing the unit step, plus the smooth Boolean
// algebra used to combine per-wall indicators.
//
// Both kinds map R -> [0,1], are monotone, take the value 1/2 at 0, are
// odd-symmetric about (0, 1/2), and approach the unit step as alpha grows.
// The sigmoid is smooth everywhere; the hard sigmoid is piecewise linear,
// saturating exactly at +-3/alpha with a derivative jump there.

#pragma once

#include <span>
#include <stdexcept>

#include "drt/dual.hpp"

namespace drt {

enum class SmoothingKind { kSigmoid, kHardSigmoid };

struct SmoothingConfig {
  SmoothingKind kind = SmoothingKind::kHardSigmoid;
  double alpha = 1.0;

  // Cutoff for mapping a smooth indicator back to a Boolean.
  double boolean_threshold = 0.5;

  void validate() const {
    if (!(alpha > 0.0)) throw std::invalid_argument("smoothing alpha must be > 0");
  }
};

// The hard step being approximated; 0 at the origin ("otherwise" branch).
inline double unit_step(double x) { return x > 0.0 ? 1.0 : 0.0; }

namespace detail {

// Exponent clamp: beyond +-500 the sigmoid is 0 or 1 to machine precision,
// so the result is pinned exactly with zero gradient.
inline constexpr double kSigmoidClamp = 500.0;

inline DualScalar pinned(double value, const DualScalar& like) {
  DualScalar zero = like - like;  // keeps the seed dimension
  return zero + DualScalar(value);
}

}  // namespace detail

inline DualScalar sigmoid(const DualScalar& x, const SmoothingConfig& cfg) {
  cfg.validate();
  const DualScalar z = DualScalar(cfg.alpha) * x;
  if (z.value() > detail::kSigmoidClamp) return detail::pinned(1.0, z);
  if (z.value() < -detail::kSigmoidClamp) return detail::pinned(0.0, z);
  return DualScalar(1.0) / (DualScalar(1.0) + exp(-z));
}

inline DualScalar relu6(const DualScalar& x) {
  return min(max(DualScalar(0.0), x), DualScalar(6.0));
}

inline DualScalar hard_sigmoid(const DualScalar& x, const SmoothingConfig& cfg) {
  cfg.validate();
  return relu6(DualScalar(cfg.alpha) * x + DualScalar(3.0)) / DualScalar(6.0);
}

inline DualScalar smooth(const DualScalar& x, const SmoothingConfig& cfg) {
  switch (cfg.kind) {
    case SmoothingKind::kSigmoid:
      return sigmoid(x, cfg);
    case SmoothingKind::kHardSigmoid:
      return hard_sigmoid(x, cfg);
  }
  throw std::invalid_argument("unknown smoothing kind");
}

// Smooth surrogate for a > b.
inline DualScalar smooth_greater_than(const DualScalar& a, const DualScalar& b,
                                      const SmoothingConfig& cfg) {
  return smooth(a - b, cfg);
}

namespace detail {

inline void check_indicator(const DualScalar& v) {
  constexpr double kTol = 1e-9;
  if (v.value() < -kTol || v.value() > 1.0 + kTol) {
    throw std::invalid_argument("smooth Boolean input outside [0,1]");
  }
}

}  // namespace detail

// Conjunction as a product: differentiable everywhere, exact on {0,1}.
// A long product of near-1 factors drifts slightly below 1; acceptable for
// the path counts involved here.
inline DualScalar smooth_and(std::span<const DualScalar> values) {
  DualScalar r(1.0);
  for (const DualScalar& v : values) {
    detail::check_indicator(v);
    r = r * v;
  }
  return r;
}

inline DualScalar smooth_not(const DualScalar& v) {
  detail::check_indicator(v);
  return DualScalar(1.0) - v;
}

inline DualScalar smooth_or(std::span<const DualScalar> values) {
  DualScalar r(1.0);
  for (const DualScalar& v : values) {
    detail::check_indicator(v);
    r = r * (DualScalar(1.0) - v);
  }
  return DualScalar(1.0) - r;
}

inline bool to_boolean(const DualScalar& v, const SmoothingConfig& cfg) {
  return v.value() > cfg.boolean_threshold;
}

}  // namespace drt
