#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "drt/dual.hpp"
#include "support/oracles.hpp"

using drt::DualScalar;

TEST_CASE("lift_variable seeds basis vectors") {
  const DualScalar a = drt::lift_variable(3.0, 0, 2);
  CHECK(a.value() == 3.0);
  CHECK(a.grad(0) == 1.0);
  CHECK(a.grad(1) == 0.0);

  const DualScalar b = drt::lift_variable(0.0, 1, 2);
  CHECK(b.value() == 0.0);
  CHECK(b.grad(0) == 0.0);
  CHECK(b.grad(1) == 1.0);

  CHECK_THROWS_AS(drt::lift_variable(1.0, 2, 2), std::invalid_argument);
  CHECK_THROWS_AS(drt::lift_variable(1.0, -1, 2), std::invalid_argument);
  CHECK_THROWS_AS(drt::lift_variable(1.0, 0, drt::kMaxSeed + 1), std::invalid_argument);
}

TEST_CASE("chain rule basics") {
  const DualScalar x = drt::lift_variable(3.0, 0, 1);
  const DualScalar sq = x * x;
  CHECK(sq.value() == 9.0);
  CHECK(sq.grad(0) == 6.0);

  const DualScalar e = exp(drt::lift_variable(0.0, 0, 1));
  CHECK(e.value() == 1.0);
  CHECK(e.grad(0) == 1.0);

  const DualScalar r = sqrt(drt::lift_variable(4.0, 0, 1));
  CHECK(r.value() == 2.0);
  CHECK(r.grad(0) == doctest::Approx(0.25));

  const DualScalar q = DualScalar(1.0) / x;
  CHECK(q.value() == doctest::Approx(1.0 / 3.0));
  CHECK(q.grad(0) == doctest::Approx(-1.0 / 9.0));
}

TEST_CASE("min and max ties pick the first argument") {
  const DualScalar a = drt::lift_variable(1.0, 0, 2);
  const DualScalar b = drt::lift_variable(1.0, 1, 2);
  const DualScalar lo = min(a, b);
  CHECK(lo.value() == 1.0);
  CHECK(lo.grad(0) == 1.0);
  CHECK(lo.grad(1) == 0.0);
  const DualScalar hi = max(a, b);
  CHECK(hi.grad(0) == 1.0);
  CHECK(hi.grad(1) == 0.0);
}

TEST_CASE("abs uses the symmetric subgradient at zero") {
  const DualScalar z = abs(drt::lift_variable(0.0, 0, 1));
  CHECK(z.value() == 0.0);
  CHECK(z.grad(0) == 0.0);
  CHECK(abs(drt::lift_variable(-2.0, 0, 1)).grad(0) == -1.0);
}

TEST_CASE("domain errors") {
  const DualScalar x = drt::lift_variable(1.0, 0, 1);
  CHECK_THROWS_AS(x / DualScalar(0.0), std::domain_error);
  CHECK_THROWS_AS(sqrt(DualScalar(-1.0)), std::domain_error);
}

TEST_CASE("seed dimension mismatch raises, never truncates") {
  const DualScalar a = drt::lift_variable(1.0, 0, 2);
  const DualScalar b = drt::lift_variable(1.0, 0, 3);
  CHECK_THROWS_AS(a + b, std::invalid_argument);
  CHECK_THROWS_AS(a * b, std::invalid_argument);
  CHECK_THROWS_AS(min(a, b), std::invalid_argument);
  // Constants unify with anything.
  CHECK_NOTHROW(a + DualScalar(2.0));
  CHECK((a + DualScalar(2.0)).seed_dim() == 2);
}

TEST_CASE("gradient of x^2 + y^2") {
  const double pt[] = {1.0, 2.0};
  const auto r = drt::gradient(
      [](std::span<const DualScalar> v) { return v[0] * v[0] + v[1] * v[1]; }, pt);
  CHECK(r.value == 5.0);
  CHECK(r.grad[0] == doctest::Approx(2.0));
  CHECK(r.grad[1] == doctest::Approx(4.0));
}

namespace {

// A fixed composition of the supported operations, awkward enough to make
// a finite-difference comparison meaningful.
DualScalar test_function(std::span<const DualScalar> v) {
  const DualScalar a = v[0] * v[1] + exp(DualScalar(0.3) * v[0]);
  const DualScalar b = sqrt(v[0] * v[0] + v[1] * v[1] + DualScalar(0.5));
  const DualScalar c = max(a, b) + min(a * DualScalar(0.25), b) / (v[1] + DualScalar(3.0));
  return c + abs(v[0]) * DualScalar(0.125);
}

}  // namespace

TEST_CASE("AD matches central finite differences away from kinks") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  auto value_fn = [](std::span<const double> p) {
    std::vector<DualScalar> v{DualScalar(p[0]), DualScalar(p[1])};
    return test_function(v).value();
  };

  int checked = 0;
  for (int i = 0; i < 200 && checked < 100; ++i) {
    const double pt[] = {u(rng), u(rng)};
    const auto ad = drt::gradient(test_function, pt);
    const auto fd = oracle::fd_gradient(value_fn, pt, 1e-6);
    // Skip points where the two FD half-steps straddle a kink.
    const auto fd2 = oracle::fd_gradient(value_fn, pt, 5e-7);
    bool kink = false;
    for (int d = 0; d < 2; ++d) {
      if (std::fabs(fd[d] - fd2[d]) > 1e-5 * (1.0 + std::fabs(fd[d]))) kink = true;
    }
    if (kink) continue;
    for (int d = 0; d < 2; ++d) {
      CHECK(std::fabs(ad.grad[d] - fd[d]) < 1e-5 * (1.0 + std::fabs(fd[d])));
    }
    ++checked;
  }
  CHECK(checked >= 80);
}

TEST_CASE("gradient is linear in the function") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int i = 0; i < 25; ++i) {
    const double pt[] = {u(rng), u(rng)};
    const double a = u(rng);
    const double b = u(rng);
    auto f = [](std::span<const DualScalar> v) { return v[0] * v[0] * v[1]; };
    auto g = [](std::span<const DualScalar> v) { return exp(v[1]) + v[0]; };
    auto combined = [&](std::span<const DualScalar> v) {
      return DualScalar(a) * f(v) + DualScalar(b) * g(v);
    };
    const auto rf = drt::gradient(f, pt);
    const auto rg = drt::gradient(g, pt);
    const auto rc = drt::gradient(combined, pt);
    for (int d = 0; d < 2; ++d) {
      CHECK(rc.grad[d] == doctest::Approx(a * rf.grad[d] + b * rg.grad[d]).epsilon(1e-12));
    }
  }
}
