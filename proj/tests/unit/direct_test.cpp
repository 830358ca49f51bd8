#include "mdt/direct.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace mdt;

TEST_CASE("first sample is the box center") {
  int calls = 0;
  const auto f = [&](std::span<const double> x) {
    ++calls;
    double s = 0.0;
    for (double v : x) s += (v - 0.5) * (v - 0.5);
    return s;
  };
  const DirectResult r = direct_minimize(3, f, {.budget = 1});
  CHECK(calls == 1);
  CHECK(r.evaluations == 1);
  for (double v : r.best_x) CHECK(std::abs(v - 0.5) < 1e-6);
  CHECK(r.best_value == 0.0);
}

TEST_CASE("branin within one percent of the optimum") {
  const auto branin = [](std::span<const double> u) {
    const double x = -5.0 + 15.0 * u[0];
    const double y = 15.0 * u[1];
    const double pi = std::numbers::pi;
    const double b = 5.1 / (4 * pi * pi);
    const double c = 5.0 / pi;
    const double t = 1.0 / (8 * pi);
    return std::pow(y - b * x * x + c * x - 6.0, 2) + 10.0 * (1 - t) * std::cos(x) + 10.0;
  };
  const DirectResult r = direct_minimize(2, branin, {.budget = 500});
  CHECK(r.evaluations <= 500);
  CHECK(r.best_value <= 0.397887 * 1.01);
}

TEST_CASE("failures count as +inf and results are thread independent") {
  const auto f = [](std::span<const double> x) {
    if (x[0] > 0.8) throw std::runtime_error("outside");
    if (x[0] < 0.2) return std::nan("");
    return std::abs(x[0] - 0.3) + std::abs(x[1] - 0.7);
  };
  const DirectResult a = direct_minimize(2, f, {.budget = 120, .threads = 1});
  const DirectResult b = direct_minimize(2, f, {.budget = 120, .threads = 4});
  CHECK(a.best_x == b.best_x);
  CHECK(a.best_value == b.best_value);
  CHECK(a.trace.size() == b.trace.size());
  CHECK(a.best_value < 0.05);
  CHECK_THROWS_AS(direct_minimize(2, f, {.budget = 0}), std::exception);
}
