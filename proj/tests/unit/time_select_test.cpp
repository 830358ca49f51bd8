#include "mdt/time_select.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace mdt;

TEST_CASE("singular entropy") {
  Matrix r1(3, 3);
  r1.rowwise() = Eigen::RowVector3d(0.2, 0.3, 0.5);
  CHECK(singular_entropy(r1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(singular_entropy(Matrix::Identity(5, 5)) == doctest::Approx(std::log(5.0)).epsilon(1e-14));
}

TEST_CASE("kneedle elbow") {
  std::vector<double> xs;
  std::vector<double> ys;
  for (int x = 1; x <= 10; ++x) {
    xs.push_back(x);
    ys.push_back(std::exp(-static_cast<double>(x)));
  }
  // The reference Kneedle implementation returns 3 on this curve.
  const ElbowResult e = elbow_detect(xs, ys);
  CHECK(e.x == 3.0);
  CHECK_FALSE(e.fallback);

  SUBCASE("single sharp corner") {
    const std::vector<double> corner{1, 0.1, 0.09, 0.08, 0.07, 0.06, 0.05, 0.04, 0.03, 0.02};
    CHECK(elbow_detect(xs, corner).x == 2.0);
  }
  SUBCASE("straight line falls back") {
    std::vector<double> line;
    for (double x : xs) line.push_back(-x);
    CHECK(elbow_detect(xs, line).fallback);
  }
  CHECK_THROWS_AS(elbow_detect(std::vector<double>{1, 2}, std::vector<double>{1, 0}), Error);
  CHECK_THROWS_AS(elbow_detect(std::vector<double>{1, 3, 2}, std::vector<double>{3, 2, 1}), Error);
}

TEST_CASE("entropy curves") {
  SUBCASE("ring graph curve is nonincreasing") {
    const Index n = 20;
    Matrix p = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
      p(i, i) = 0.5;
      p(i, (i + 1) % n) = 0.25;
      p(i, (i + n - 1) % n) = 0.25;
    }
    const OperatorSet set = OperatorSet::canonical({TransitionMatrix(p)});
    const EntropyCurve c = entropy_curve(set, {}, 30);
    REQUIRE(c.entropies.size() == 30);
    for (std::size_t t = 1; t < c.entropies.size(); ++t) CHECK(c.entropies[t] <= c.entropies[t - 1] + 1e-12);
    CHECK(c.elbow >= 1);
    CHECK(c.elbow <= 30);
  }
  SUBCASE("rank-one operator gives a flat curve with elbow 1") {
    Matrix r1(4, 4);
    r1.rowwise() = Eigen::RowVector4d(0.1, 0.2, 0.3, 0.4);
    const EntropyCurve c = entropy_curve_of(r1, 10);
    for (double h : c.entropies) CHECK(std::abs(h) < 1e-10);
    CHECK(c.elbow == 1);
    CHECK(c.fallback);
  }
  CHECK_THROWS_AS(entropy_curve_of(Matrix::Identity(3, 3), 2), Error);
}
