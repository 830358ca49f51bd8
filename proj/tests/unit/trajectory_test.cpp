#include "mdt/trajectory.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace mdt;

TEST_CASE("compose follows the left-product order") {
  std::mt19937_64 rng(11);
  const auto ops = test::random_operators(5, 2, rng);
  const OperatorSet set = OperatorSet::canonical(ops);
  const Matrix& p1 = ops[0].values();
  const Matrix& p2 = ops[1].values();

  CHECK(compose(set, Trajectory::discrete({1})).matrix == p2);
  const Matrix w = compose(set, Trajectory::discrete({0, 0, 1})).matrix;
  CHECK(test::max_abs(w - p2 * p1 * p1) < 1e-15);

  const OperatorSet single = OperatorSet::canonical({ops[0]});
  const Matrix w4 = compose(single, Trajectory::discrete({0, 0, 0, 0})).matrix;
  CHECK(test::max_abs(w4 - p1 * p1 * p1 * p1) < 1e-15);
}

TEST_CASE("convex trajectories compose weighted steps") {
  std::mt19937_64 rng(12);
  const auto ops = test::random_operators(4, 2, rng);
  const OperatorSet set = OperatorSet::canonical(ops);
  const Trajectory t = Trajectory::convex({SimplexWeights({0.25, 0.75}), SimplexWeights({1.0, 0.0})});
  const Matrix s1 = 0.25 * ops[0].values() + 0.75 * ops[1].values();
  CHECK(test::max_abs(compose(set, t).matrix - ops[0].values() * s1) < 1e-15);
}

TEST_CASE("trajectory validation and json") {
  CHECK_THROWS_AS(Trajectory::discrete({}), Error);
  CHECK_THROWS_AS(Trajectory::discrete({0, 3}).validate(2), Error);
  CHECK_THROWS_AS(Trajectory::convex({SimplexWeights({0.5, 0.5})}).validate(3), Error);

  const Trajectory d = Trajectory::discrete({0, 1, 1});
  CHECK(Trajectory::from_json(d.to_json()) == d);
  const Trajectory c = Trajectory::convex({SimplexWeights({0.2, 0.8}), SimplexWeights({1.0, 0.0})});
  const Trajectory back = Trajectory::from_json(c.to_json());
  CHECK(back.kind() == Trajectory::Kind::Convex);
  CHECK(back.weights()[0][1] == 0.8);
  CHECK(d.key() != Trajectory::discrete({1, 1, 0}).key());
}

TEST_CASE("stationary distribution") {
  Matrix w(2, 2);
  w << 0.9, 0.1, 0.2, 0.8;
  const Vector pi = stationary(w);
  CHECK(pi(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(pi(1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(test::max_abs(stationary(w * w) - pi) < 1e-13);

  // Oracle from an eigensolver of W^T.
  Matrix p3(3, 3);
  p3 << 0.5, 0.3, 0.2, 0.1, 0.6, 0.3, 0.25, 0.25, 0.5;
  const Vector pi3 = stationary(p3);
  CHECK(pi3(0) == doctest::Approx(0.2525252525252525).epsilon(1e-12));
  CHECK(pi3(1) == doctest::Approx(0.4040404040404039).epsilon(1e-12));
  CHECK(pi3(2) == doctest::Approx(0.3434343434343436).epsilon(1e-12));

  // Doubly stochastic matrices have the uniform law.
  Matrix ds(3, 3);
  ds << 0.5, 0.25, 0.25, 0.25, 0.5, 0.25, 0.25, 0.25, 0.5;
  CHECK(test::max_abs(stationary(ds) - Vector::Constant(3, 1.0 / 3.0)) < 1e-14);
}

TEST_CASE("diffusion distance") {
  Matrix w(2, 2);
  w << 0.9, 0.1, 0.2, 0.8;
  const MDTOperator op = MDTOperator::from_matrix(w);
  CHECK(diffusion_distance_sq(op, 0, 1) == doctest::Approx(2.205).epsilon(1e-12));
  CHECK(diffusion_distance_sq(op, 1, 1) == 0.0);

  Matrix rank_one(3, 3);
  rank_one.rowwise() = Eigen::RowVector3d(0.2, 0.3, 0.5);
  const MDTOperator r1 = MDTOperator::from_matrix(rank_one);
  CHECK(diffusion_distance(r1, 0, 2) == 0.0);
}

TEST_CASE("diffusion map is an isometry at l = N") {
  std::mt19937_64 rng(13);
  const auto ops = test::random_operators(6, 2, rng);
  const OperatorSet set = OperatorSet::canonical(ops);
  const MDTOperator w = compose(set, Trajectory::discrete({0, 1, 1, 0}));
  const DiffusionMap map = diffusion_map(w, 6);
  for (Index i = 0; i < 6; ++i) {
    for (Index j = i + 1; j < 6; ++j) {
      // Brute-force definition: sum_k (W_ik - W_jk)^2 / pi_k.
      double d2 = 0.0;
      for (Index k = 0; k < 6; ++k) d2 += std::pow(w.matrix(i, k) - w.matrix(j, k), 2) / w.stationary(k);
      const double e2 = (map.embedding.row(i) - map.embedding.row(j)).squaredNorm();
      CHECK(std::abs(e2 - d2) / std::max(d2, 1e-12) < 1e-8);
    }
  }
  for (Index c = 1; c < 6; ++c) CHECK(map.singular_values(c) <= map.singular_values(c - 1));
  CHECK(map.singular_values(0) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("diffusion map of a rank-one operator collapses") {
  Matrix w(4, 4);
  w.rowwise() = Eigen::RowVector4d(0.1, 0.2, 0.3, 0.4);
  const DiffusionMap map = diffusion_map(MDTOperator::from_matrix(w), 4);
  for (Index i = 1; i < 4; ++i) CHECK((map.embedding.row(i) - map.embedding.row(0)).norm() < 1e-12);
  CHECK_THROWS_AS(diffusion_map(MDTOperator::from_matrix(w), 5), Error);
}

TEST_CASE("expected operator") {
  std::mt19937_64 rng(14);
  const auto ops = test::random_operators(4, 2, rng);
  const OperatorSet set = OperatorSet::canonical(ops);
  const std::vector<double> e1{1.0, 0.0};
  CHECK(test::max_abs(expected_operator(set, e1, 1) - ops[0].values()) < 1e-15);

  const OperatorSet twin = OperatorSet::canonical({ops[0], ops[0]});
  CHECK(test::max_abs(expected_operator(twin, {}, 3) - matrix_power(ops[0].values(), 3)) < 1e-14);

  SUBCASE("matches a Monte-Carlo mean of random compositions") {
    const int samples = 10000;
    Matrix sum = Matrix::Zero(4, 4);
    Matrix sum_sq = Matrix::Zero(4, 4);
    std::bernoulli_distribution coin(0.5);
    for (int s = 0; s < samples; ++s) {
      std::vector<std::size_t> steps;
      for (int k = 0; k < 3; ++k) steps.push_back(coin(rng) ? 1 : 0);
      const Matrix w = compose(set, Trajectory::discrete(steps)).matrix;
      sum += w;
      sum_sq += w.cwiseProduct(w);
    }
    const Matrix mean = sum / samples;
    const Matrix var = sum_sq / samples - mean.cwiseProduct(mean);
    const Matrix expected = expected_operator(set, std::vector<double>{0.5, 0.5}, 3);
    for (Index i = 0; i < 4; ++i) {
      for (Index j = 0; j < 4; ++j) {
        CHECK(std::abs(mean(i, j) - expected(i, j)) <= 3.0 * std::sqrt(var(i, j) / samples) + 1e-12);
      }
    }
  }
}

TEST_CASE("products stay row-stochastic with a positive diagonal") {
  std::mt19937_64 rng(15);
  for (int inst = 0; inst < 20; ++inst) {
    const auto ops = test::random_operators(7, 3, rng);
    const OperatorSet set = OperatorSet::canonical(ops);
    std::uniform_int_distribution<std::size_t> pick(0, 2);
    std::uniform_int_distribution<int> len(1, 10);
    std::vector<std::size_t> steps(static_cast<std::size_t>(len(rng)));
    for (auto& s : steps) s = pick(rng);
    const Matrix w = compose(set, Trajectory::discrete(steps)).matrix;
    CHECK_NOTHROW(check_stochastic(w));
    CHECK((w.diagonal().array() > 0.0).all());
  }
}
