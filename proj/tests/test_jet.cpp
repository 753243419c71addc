#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "jet.hpp"

using contdef::Jet4;

namespace {

// Central finite differences on a scalar function, used as the independent
// oracle for every jet derivative below.
template <typename F>
double fd_derivative(F f, double t, int order, double h) {
  if (order == 0) return f(t);
  auto lower = [&](double x) { return fd_derivative(f, x, order - 1, h); };
  return (lower(t + h) - lower(t - h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("jet arithmetic matches finite differences") {
  auto f = [](auto t) {
    auto a = contdef::sin(t * 0.7 + 1.2);
    auto b = contdef::cos(t * t * 0.3);
    return a * b + t * 2.5 - a * 0.25;
  };
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double t0 = dist(rng);
    Jet4 result = f(Jet4::variable(t0));
    auto scalar = [&](double t) { return f(Jet4(t)).value(); };
    CHECK(result.value() == doctest::Approx(scalar(t0)).epsilon(1e-12));
    CHECK(result.derivative(1) == doctest::Approx(fd_derivative(scalar, t0, 1, 1e-5)).epsilon(1e-6));
    CHECK(result.derivative(2) == doctest::Approx(fd_derivative(scalar, t0, 2, 1e-4)).epsilon(1e-5));
    // The FD oracle's own truncation error dominates at higher orders.
    CHECK(result.derivative(3) == doctest::Approx(fd_derivative(scalar, t0, 3, 1e-3)).epsilon(1e-3));
    CHECK(result.derivative(4) == doctest::Approx(fd_derivative(scalar, t0, 4, 1e-2)).epsilon(2e-2));
  }
}

TEST_CASE("polynomial jets are exact") {
  // p(t) = t^4 - 3 t^2 + 2 t, derivatives known in closed form.
  auto p = [](auto t) { return t * t * t * t - 3.0 * (t * t) + t * 2.0; };
  const double t0 = 1.5;
  Jet4 j = p(Jet4::variable(t0));
  CHECK(j.value() == doctest::Approx(t0 * t0 * t0 * t0 - 3 * t0 * t0 + 2 * t0));
  CHECK(j.derivative(1) == doctest::Approx(4 * t0 * t0 * t0 - 6 * t0 + 2));
  CHECK(j.derivative(2) == doctest::Approx(12 * t0 * t0 - 6));
  CHECK(j.derivative(3) == doctest::Approx(24 * t0));
  CHECK(j.derivative(4) == doctest::Approx(24.0));
}

TEST_CASE("sincos identity holds through all orders") {
  Jet4 t = Jet4::variable(0.835);
  Jet4 s, c;
  contdef::sincos(t * 1.3 + 0.2, s, c);
  Jet4 unit = s * s + c * c;
  CHECK(unit.value() == doctest::Approx(1.0).epsilon(1e-14));
  for (int k = 1; k <= 4; ++k) CHECK(std::abs(unit.derivative(k)) < 1e-12);
}
