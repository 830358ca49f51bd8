#include "mdt/datasets.hpp"
#include "mdt/learn.hpp"
#include "mdt/quality.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>

using namespace mdt;

TEST_CASE("calinski-harabasz index") {
  Matrix x(4, 1);
  x << 0, 1, 10, 11;
  CHECK(ch_index(x, PartitionLabels({0, 0, 1, 1}, 2)) == doctest::Approx(200.0).epsilon(1e-14));

  Matrix coincident(4, 2);
  coincident << 0, 0, 0, 0, 10, 0, 10, 0;
  CHECK(ch_index(coincident, PartitionLabels({0, 0, 1, 1}, 2)) == std::numeric_limits<double>::infinity());

  // Reference value from scikit-learn's calinski_harabasz_score.
  Matrix y(8, 2);
  y << 0, 0, 1, 0, 0, 1, 5, 5, 6, 5, 5, 7, 9, 0, 10, 1;
  CHECK(ch_index(y, PartitionLabels({0, 0, 0, 1, 1, 1, 2, 2}, 3)) == doctest::Approx(68.91544117647061).epsilon(1e-12));

  CHECK_THROWS_AS(ch_index(x, PartitionLabels({0, 1, 2, 3}, 4)), Error);
}

TEST_CASE("CH of random labels is far below the true split") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    Matrix x(60, 2);
    x.topRows(30) = test::gaussian_points(30, 2, rng, 0.0);
    x.bottomRows(30) = test::gaussian_points(30, 2, rng, 8.0);
    std::vector<int> truth(60);
    std::vector<int> random(60);
    std::bernoulli_distribution coin(0.5);
    for (int i = 0; i < 60; ++i) {
      truth[static_cast<std::size_t>(i)] = i < 30 ? 0 : 1;
      random[static_cast<std::size_t>(i)] = i < 2 ? i : (coin(rng) ? 1 : 0);
    }
    CHECK(ch_index(x, PartitionLabels(random, 2)) * 10.0 < ch_index(x, PartitionLabels(truth, 2)));
  }
}

TEST_CASE("partition labels") {
  const std::vector<int> raw{7, 7, 3, 9, 3};
  const PartitionLabels p = PartitionLabels::from_raw(raw);
  CHECK(p.k() == 3);
  CHECK(p.labels() == std::vector<int>{0, 0, 1, 2, 1});
  CHECK_THROWS_AS(PartitionLabels({0, 0, 2}, 3), Error);
  CHECK_THROWS_AS(PartitionLabels({0, 3}, 2), Error);
}

TEST_CASE("adjusted mutual information") {
  const PartitionLabels a({0, 0, 0, 1, 1, 1, 2, 2, 2, 2}, 3);
  const PartitionLabels b({0, 0, 1, 1, 1, 2, 2, 2, 0, 0}, 3);
  // Reference values from scikit-learn's adjusted_mutual_info_score.
  CHECK(ami(a, b) == doctest::Approx(0.17152423540072848).epsilon(1e-12));
  CHECK(ami(b, a) == doctest::Approx(0.17152423540072848).epsilon(1e-12));
  const PartitionLabels c({0, 1, 0, 1, 0, 1, 2, 2, 3, 3, 3, 0}, 4);
  const PartitionLabels d({1, 1, 0, 0, 2, 2, 2, 0, 1, 3, 3, 3}, 4);
  CHECK(ami(c, d) == doctest::Approx(-0.17661033036511653).epsilon(1e-12));
  CHECK(ami(PartitionLabels({0, 0, 1, 1}, 2), PartitionLabels({0, 1, 0, 1}, 2)) ==
        doctest::Approx(-0.5).epsilon(1e-12));

  CHECK(ami(a, a) == 1.0);
  const PartitionLabels permuted({2, 2, 2, 0, 0, 0, 1, 1, 1, 1}, 3);
  CHECK(ami(a, permuted) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(ami(a, PartitionLabels({0, 1}, 2)), Error);
}

TEST_CASE("AMI of independent random partitions is near zero") {
  double sum = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, 2);
    std::vector<int> x(300);
    std::vector<int> y(300);
    for (std::size_t i = 0; i < 300; ++i) {
      x[i] = i < 3 ? static_cast<int>(i) : pick(rng);
      y[i] = i < 3 ? static_cast<int>(i) : pick(rng);
    }
    sum += ami(PartitionLabels(x, 3), PartitionLabels(y, 3));
  }
  CHECK(std::abs(sum / 100.0) <= 0.02);
}

TEST_CASE("performance ratio to random") {
  const auto r = prr({{"a", 0.5}, {"b", 0.4}}, 0.4);
  CHECK(r.at("a") == doctest::Approx(1.25));
  CHECK(r.at("b") == 1.0);
  CHECK_THROWS_AS(prr({{"a", 0.5}}, 0.0), Error);

  // Nine-dataset AMI values: per-dataset ratios against the random baseline,
  // averaged over the nine datasets.
  const std::vector<double> rand{68.20, 61.33, 75.95, 57.14, 70.51, 77.78, 61.27, 80.28, 58.57};
  const std::vector<double> direct{68.53, 62.24, 76.91, 59.40, 91.35, 77.91, 76.18, 85.37, 63.56};
  const std::vector<double> cvx{68.51, 61.69, 76.49, 58.68, 86.19, 78.00, 74.62, 84.84, 63.46};
  auto mean_ratio = [&](const std::vector<double>& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) s += prr({{"m", m[i]}}, rand[i]).at("m");
    return s / static_cast<double>(m.size());
  };
  CHECK(std::round(mean_ratio(direct) * 100.0) / 100.0 == doctest::Approx(1.08));
  CHECK(std::round(mean_ratio(cvx) * 100.0) / 100.0 == doctest::Approx(1.07));
}

TEST_CASE("contrastive loss") {
  NeighborSets pair;
  pair.neighbors = {{{1}, {0}}};
  const std::vector<double> one{1.0};
  CHECK(contrastive_loss(Matrix::Constant(2, 2, 0.5), pair, one) == doctest::Approx(0.0));
  const std::vector<double> zero{0.0};
  std::mt19937_64 rng(31);
  CHECK(contrastive_loss(test::random_stochastic(2, rng), pair, zero) == 0.0);

  // Two triangles {0,1,2} and {3,4,5}.
  NeighborSets tri;
  tri.neighbors = {{{1, 2}, {0, 2}, {0, 1}, {4, 5}, {3, 5}, {3, 4}}};
  Matrix block = Matrix::Zero(6, 6);
  block.topLeftCorner(3, 3).setConstant(1.0 / 3.0);
  block.bottomRightCorner(3, 3).setConstant(1.0 / 3.0);
  CHECK(contrastive_loss(block, tri, one) < contrastive_loss(Matrix::Constant(6, 6, 1.0 / 6.0), tri, one));
}

TEST_CASE("contrastive gradient matches finite differences") {
  std::mt19937_64 rng(32);
  const Matrix w = test::random_stochastic(8, rng);
  NeighborSets neigh;
  neigh.neighbors.resize(2);
  for (int v = 0; v < 2; ++v) {
    for (Index i = 0; i < 8; ++i) neigh.neighbors[static_cast<std::size_t>(v)].push_back({(i + 1 + v) % 8, (i + 3) % 8});
  }
  const std::vector<double> lambdas{0.6, 0.4};
  const Matrix g = contrastive_loss_gradient(w, neigh, lambdas);
  const double h = 1e-5;
  for (Index i = 0; i < 8; ++i) {
    for (Index j = 0; j < 8; ++j) {
      Matrix wp = w;
      Matrix wm = w;
      wp(i, j) += h;
      wm(i, j) -= h;
      const double fd = (contrastive_loss(wp, neigh, lambdas) - contrastive_loss(wm, neigh, lambdas)) / (2 * h);
      CHECK(std::abs(fd - g(i, j)) <= 1e-4 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("neighbor sets follow the kernel support") {
  Matrix k(3, 3);
  k << 1, 0.5, 0, 0.5, 1, 0.2, 0, 0.2, 1;
  const NeighborSets n = neighbor_sets({KernelMatrix(k, 1.0)});
  CHECK(n.neighbors[0][0] == std::vector<Index>{1});
  CHECK(n.neighbors[0][1] == std::vector<Index>{0, 2});
}

TEST_CASE("Q_CH objective") {
  BlobsConfig bc;
  bc.n = 60;
  bc.clusters = 3;
  bc.views = 2;
  bc.noise_views = 0;
  const MultiViewDataset data = gen_blobs(bc);
  const ViewOperators ops = build_canonical_set(data);
  const OperatorSet set = OperatorSet::canonical(ops.operators);
  const Trajectory tau = Trajectory::discrete({0, 1, 0});
  const MDTOperator w = compose(set, tau);
  const QchEvaluation ev = q_ch_evaluate(w, data, 3);
  const double ch1 = ch_index(data.view(0).points(), ev.partition);
  const double ch2 = ch_index(data.view(1).points(), ev.partition);
  CHECK(ev.score == doctest::Approx(0.5 * (ch1 + ch2)).epsilon(1e-12));
  const std::vector<double> e1{1.0, 0.0};
  CHECK(q_ch_of(w, data, 3, e1) == doctest::Approx(ch1).epsilon(1e-12));
  CHECK(q_ch(tau, data, set, 3) == ev.score);

  const MultiViewDataset twin({data.view(0), ViewDataset(data.view(0).points(), 2)}, data.labels());
  const ViewOperators twin_ops = build_canonical_set(twin);
  const MDTOperator tw = compose(OperatorSet::canonical(twin_ops.operators), tau);
  const QchEvaluation tev = q_ch_evaluate(tw, twin, 3);
  CHECK(tev.score == doctest::Approx(ch_index(twin.view(0).points(), tev.partition)).epsilon(1e-12));

  const MultiViewDataset single({data.view(0)}, data.labels());
  const ViewOperators sops = build_canonical_set(single);
  const QchEvaluation sev = q_ch_evaluate(compose(OperatorSet::canonical(sops.operators), Trajectory::discrete({0, 0})),
                                          single, 3);
  CHECK(sev.score == ch_index(single.view(0).points(), sev.partition));

  const std::vector<double> bad{1.0};
  CHECK_THROWS_AS(q_ch_of(w, data, 3, bad), Error);
}
