#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "padsim/errors.hpp"
#include "padsim/numerics.hpp"

using namespace padsim::numerics;

TEST_CASE("dopri5 reproduces exponential decay") {
  OdeProblem p;
  p.rhs = [](double, std::span<const double> y, std::span<double> dy) { dy[0] = -0.7 * y[0]; };
  p.initial = {2.0};
  p.t1 = 10.0;
  p.rel_tol = 1e-10;
  const std::vector<double> ts{0.0, 0.5, 3.0, 10.0};
  IntegrationStats stats;
  const auto ys = integrate(p, ts, &stats);
  REQUIRE(ys.size() == ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) CHECK(ys[i][0] == doctest::Approx(2.0 * std::exp(-0.7 * ts[i])).epsilon(1e-9));
  CHECK(stats.accepted > 0);
}

TEST_CASE("dopri5 keeps a harmonic oscillator on its circle") {
  OdeProblem p;
  p.rhs = [](double, std::span<const double> y, std::span<double> dy) {
    dy[0] = y[1];
    dy[1] = -y[0];
  };
  p.initial = {1.0, 0.0};
  p.t1 = 20.0 * std::numbers::pi;
  p.rel_tol = 1e-10;
  p.abs_tol = 1e-13;
  std::vector<double> ts;
  for (int k = 0; k <= 200; ++k) ts.push_back(p.t1 * k / 200.0);
  const auto ys = integrate(p, ts);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    CHECK(ys[i][0] == doctest::Approx(std::cos(ts[i])).epsilon(1e-7));
    CHECK(ys[i][1] == doctest::Approx(-std::sin(ts[i])).epsilon(1e-7));
  }
}

TEST_CASE("dopri5 honours max_step and rejects bad samples") {
  OdeProblem p;
  p.rhs = [](double, std::span<const double>, std::span<double> dy) { dy[0] = 1.0; };
  p.initial = {0.0};
  p.t1 = 1.0;
  p.max_step = 0.01;
  IntegrationStats stats;
  const std::vector<double> ts{1.0};
  integrate(p, ts, &stats);
  CHECK(stats.accepted >= 100);

  const std::vector<double> outside{2.0};
  CHECK_THROWS(integrate(p, outside));
  const std::vector<double> backwards{0.5, 0.2};
  CHECK_THROWS(integrate(p, backwards));
}

TEST_CASE("quadrature rules") {
  std::vector<double> lin, cube;
  const double dx = 0.01;
  for (int k = 0; k <= 100; ++k) {
    const double x = k * dx;
    lin.push_back(3.0 * x + 1.0);
    cube.push_back(x * x * x);
  }
  CHECK(trapezoid(lin, dx) == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(simpson(cube, dx) == doctest::Approx(0.25).epsilon(1e-12));

  std::vector<double> even(cube.begin(), cube.end() - 1);
  CHECK(simpson(even, dx) == doctest::Approx(std::pow(0.99, 4) / 4.0).epsilon(1e-5));

  GridFunction<double> g{0.0, dx, lin};
  CHECK(quad(g) == doctest::Approx(2.5));
}

TEST_CASE("bisection root") {
  const double r = find_root([](double x) { return x * x - 2.0; }, 0.0, 2.0, 1e-12);
  CHECK(r == doctest::Approx(std::sqrt(2.0)).epsilon(1e-11));
  CHECK_THROWS_AS(find_root([](double x) { return x * x + 1.0; }, -1.0, 1.0, 1e-9), padsim::ConvergenceError);
}

TEST_CASE("peak search") {
  const auto f = [](double x) { return -(x - 1.3) * (x - 1.3) + 4.0; };
  const Peak g = golden_max(f, 0.0, 3.0, 1e-8);
  CHECK(g.x == doctest::Approx(1.3).epsilon(1e-6));
  CHECK(g.value == doctest::Approx(4.0));
  CHECK_FALSE(g.at_boundary);

  // Two bumps: the coarse scan must pick the higher one.
  const auto two = [](double x) { return std::exp(-(x - 1) * (x - 1) * 20) + 2 * std::exp(-(x - 4) * (x - 4) * 20); };
  const Peak p = find_peak(two, 0.0, 5.0, 1e-7);
  CHECK(p.x == doctest::Approx(4.0).epsilon(1e-5));

  const Peak edge = find_peak([](double x) { return x; }, 0.0, 1.0, 1e-8);
  CHECK(edge.at_boundary);
  CHECK(edge.x == doctest::Approx(1.0));
}
