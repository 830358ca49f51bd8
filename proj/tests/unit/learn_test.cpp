#include "mdt/datasets.hpp"
#include "mdt/learn.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>

using namespace mdt;

namespace {

// Arbitrary deterministic score of a discrete trajectory.
double pseudo_score(const Trajectory& t) {
  double s = 0.0;
  for (std::size_t k = 0; k < t.length(); ++k) {
    s += std::sin(1.7 * static_cast<double>(t.indices()[k] + 1) * static_cast<double>(k + 2)) + 0.1 * static_cast<double>(k);
  }
  return s;
}

void enumerate(std::size_t set_size, int depth, std::vector<std::size_t>& prefix,
               const std::function<void(const Trajectory&)>& visit) {
  if (!prefix.empty()) visit(Trajectory::discrete(prefix));
  if (static_cast<int>(prefix.size()) == depth) return;
  for (std::size_t s = 0; s < set_size; ++s) {
    prefix.push_back(s);
    enumerate(set_size, depth, prefix, visit);
    prefix.pop_back();
  }
}

NeighborSets ring_neighbors(Index n, int views) {
  NeighborSets neigh;
  neigh.neighbors.resize(static_cast<std::size_t>(views));
  for (int v = 0; v < views; ++v) {
    for (Index i = 0; i < n; ++i) neigh.neighbors[static_cast<std::size_t>(v)].push_back({(i + 1 + v) % n, (i + n - 1) % n});
  }
  return neigh;
}

}  // namespace

TEST_CASE("strategy names") {
  CHECK(strategy_from_string("cvx-rand") == Strategy::CvxRand);
  CHECK(strategy_from_string("cvx_rand") == Strategy::CvxRand);
  CHECK(to_string(Strategy::Contrastive) == "contrastive");
  CHECK_THROWS_AS(strategy_from_string("greedy"), Error);
}

TEST_CASE("random discrete trajectories") {
  const Trajectory one = sample_random_trajectory(1, {}, 5, 3);
  CHECK(one == Trajectory::discrete({0, 0, 0, 0, 0}));
  CHECK(sample_random_trajectory(3, {}, 8, 42) == sample_random_trajectory(3, {}, 8, 42));

  int ones = 0;
  const int samples = 10000;
  for (int s = 0; s < samples; ++s) {
    const Trajectory t = sample_random_trajectory(2, {}, 10, static_cast<std::uint64_t>(s));
    for (std::size_t i : t.indices()) ones += static_cast<int>(i);
  }
  const double n = samples * 10.0;
  CHECK(std::abs(ones / n - 0.5) <= 3.0 * std::sqrt(0.25 / n));
}

TEST_CASE("random convex trajectories") {
  const Trajectory one = sample_random_convex_trajectory(1, 4, 9);
  for (const auto& w : one.weights()) CHECK(w.values() == std::vector<double>{1.0});

  std::vector<double> sum(3, 0.0);
  const int samples = 10000;
  for (int s = 0; s < samples; ++s) {
    const Trajectory t = sample_random_convex_trajectory(3, 1, static_cast<std::uint64_t>(s));
    const auto& w = t.weights()[0].values();
    CHECK(std::abs(w[0] + w[1] + w[2] - 1.0) <= 1e-12);
    for (std::size_t i = 0; i < 3; ++i) sum[i] += w[i];
  }
  // Dirichlet(1,1,1) marginals have variance 1/18.
  for (double s : sum) CHECK(std::abs(s / samples - 1.0 / 3.0) <= 3.0 * std::sqrt(1.0 / 18.0 / samples));
}

TEST_CASE("beam search") {
  std::vector<std::size_t> prefix;
  double best = -std::numeric_limits<double>::infinity();
  int count = 0;
  enumerate(2, 3, prefix, [&](const Trajectory& t) {
    best = std::max(best, pseudo_score(t));
    ++count;
  });
  CHECK(count == 14);

  const SearchResult wide = beam_search(2, pseudo_score, 3, 8, 1000);
  CHECK(wide.score == best);
  CHECK(pseudo_score(wide.trajectory) == best);

  const SearchResult greedy = beam_search(2, pseudo_score, 3, 1, 1000);
  CHECK(greedy.score <= best);

  const SearchResult capped = beam_search(3, pseudo_score, 4, 5, 7);
  CHECK(capped.evaluations <= 7);

  const SearchResult parallel = beam_search(2, pseudo_score, 3, 8, 1000, 4);
  CHECK(parallel.trajectory == wide.trajectory);

  SUBCASE("failing candidates are dropped") {
    const auto flaky = [](const Trajectory& t) {
      if (t.indices().back() == 1) throw Error("bad step");
      return pseudo_score(t);
    };
    const SearchResult r = beam_search(2, flaky, 2, 4, 100);
    CHECK(r.trajectory.indices().back() == 0);
    CHECK_FALSE(r.warnings.empty());
  }
  CHECK_THROWS_AS(beam_search(2, [](const Trajectory&) -> double { throw Error("no"); }, 2, 2, 10), Error);
}

TEST_CASE("stick breaking") {
  const std::vector<double> box{0.5, 0.5};
  const SimplexWeights w = stick_breaking(box);
  CHECK(w.values() == std::vector<double>{0.5, 0.25, 0.25});
  const std::vector<double> corner{1.0, 0.3};
  CHECK(stick_breaking(corner).values()[0] == 1.0);
  const std::vector<double> two{0.2, 0.9, 0.5, 0.5};
  const Trajectory t = box_to_trajectory(two, 3, 2);
  CHECK(t.length() == 2);
  CHECK(t.weights()[0][0] == doctest::Approx(0.2));
}

TEST_CASE("direct over convex trajectories") {
  SUBCASE("single operator returns at once") {
    int calls = 0;
    const SearchResult r = direct_optimize(1, 3, [&](const Trajectory&) { ++calls; return 1.0; }, 50);
    CHECK(r.trajectory.length() == 3);
    CHECK(calls <= 1);
  }
  SUBCASE("finds the favoured vertex region") {
    const auto f = [](const Trajectory& t) { return t.weights()[0][1] + t.weights()[1][1]; };
    const SearchResult r = direct_optimize(2, 2, f, 100);
    CHECK(r.score > 1.9);
    CHECK(r.evaluations <= 100);
  }
}

TEST_CASE("contrastive objective gradient") {
  std::mt19937_64 rng(41);
  const NeighborSets neigh = ring_neighbors(8, 2);
  const std::vector<double> lambdas{0.5, 0.5};
  for (int inst = 0; inst < 5; ++inst) {
    const OperatorSet set = OperatorSet::canonical(test::random_operators(8, 2, rng));
    const int t = 2 + inst % 2;
    Matrix logits = test::gaussian_points(t, 2, rng);
    Matrix grad;
    contrastive_objective(set, logits, neigh, lambdas, &grad);
    const double h = 1e-5;
    for (Index r = 0; r < logits.rows(); ++r) {
      for (Index c = 0; c < logits.cols(); ++c) {
        Matrix lp = logits;
        Matrix lm = logits;
        lp(r, c) += h;
        lm(r, c) -= h;
        const double fd = (contrastive_objective(set, lp, neigh, lambdas) - contrastive_objective(set, lm, neigh, lambdas)) /
                          (2 * h);
        CHECK(std::abs(fd - grad(r, c)) <= 1e-4 * std::max(std::abs(fd), 1e-3));
      }
    }
  }

  SUBCASE("single operator has a flat loss") {
    const OperatorSet one = OperatorSet::canonical(test::random_operators(8, 1, rng));
    const NeighborSets n1 = ring_neighbors(8, 1);
    const std::vector<double> l1{1.0};
    Matrix grad;
    contrastive_objective(one, Matrix::Random(3, 1), n1, l1, &grad);
    CHECK(grad.norm() <= 1e-10);
  }
}

TEST_CASE("adam lowers the contrastive loss") {
  // Two 3-point clusters seen through two noisy operators.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed);
    NeighborSets neigh;
    neigh.neighbors = {{{1, 2}, {0, 2}, {0, 1}, {4, 5}, {3, 5}, {3, 4}}};
    const OperatorSet set = OperatorSet::canonical(test::random_operators(6, 2, rng));
    const std::vector<double> lambdas{1.0};
    const Matrix init = Matrix::Zero(3, 2);
    const double start = contrastive_objective(set, init, neigh, lambdas);
    const SearchResult r = adam_optimize_contrastive(set, 3, neigh, lambdas, 0.05, 200, seed);
    CHECK(r.score <= start + 1e-9);
    CHECK(r.trajectory.length() == 3);
  }
}

TEST_CASE("run_variant") {
  BlobsConfig bc;
  bc.n = 60;
  bc.clusters = 3;
  bc.views = 2;
  bc.noise_views = 0;
  const MultiViewDataset data = gen_blobs(bc);
  const ViewOperators ops = build_canonical_set(data);

  SUBCASE("random strategy is reproducible") {
    SearchConfig c;
    c.seed = 5;
    const VariantResult a = run_variant(data, ops, c, 3, 3);
    const VariantResult b = run_variant(data, ops, c, 3, 3);
    CHECK(a.map.embedding == b.map.embedding);
    CHECK(a.t_from_elbow);
    CHECK(std::isnan(a.search.score));
  }
  SUBCASE("exhaustive beam equals the brute-force Q_CH argmax") {
    SearchConfig c;
    c.strategy = Strategy::Beam;
    c.t = 3;
    c.beam_width = 8;
    c.budget = 1000;
    c.seed = 2;
    const VariantResult r = run_variant(data, ops, c, 3, 3);
    const OperatorSet set = OperatorSet::canonical(ops.operators);
    double best = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> prefix;
    enumerate(2, 3, prefix, [&](const Trajectory& t) {
      best = std::max(best, q_ch(t, data, set, 3, {}, q_ch_seed(2)));
    });
    CHECK(r.search.score == best);
  }
  SUBCASE("direct on identical views is flat") {
    const MultiViewDataset twin({data.view(0), ViewDataset(data.view(0).points(), 2)}, data.labels());
    const ViewOperators tops = build_canonical_set(twin);
    SearchConfig c;
    c.strategy = Strategy::Direct;
    c.t = 2;
    c.budget = 20;
    const VariantResult r = run_variant(twin, tops, c, 3, 3);
    for (const auto& e : r.search.trace) CHECK(e.score == doctest::Approx(r.search.score).epsilon(1e-9));
  }
  SUBCASE("config json round trip") {
    SearchConfig c;
    c.strategy = Strategy::Contrastive;
    c.t = 4;
    c.learning_rate = 0.1;
    c.set.include_identity = true;
    const SearchConfig back = SearchConfig::from_json(c.to_json());
    CHECK(back.strategy == Strategy::Contrastive);
    CHECK(*back.t == 4);
    CHECK(back.learning_rate == 0.1);
    CHECK(back.set.include_identity);
  }
}
