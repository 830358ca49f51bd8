#include "mdt/cluster.hpp"
#include "mdt/datasets.hpp"
#include "mdt/methods.hpp"
#include "test_util.hpp"

#include <doctest.h>

using namespace mdt;

TEST_CASE("k-means on two separated 1-d blobs") {
  Matrix x(20, 1);
  for (Index i = 0; i < 20; ++i) x(i, 0) = i < 10 ? 0.1 * static_cast<double>(i) : 50.0 + 0.1 * static_cast<double>(i);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const KMeansResult r = kmeans(x, 2, seed);
    for (Index i = 1; i < 20; ++i) {
      CHECK((r.labels[static_cast<std::size_t>(i)] == r.labels[0]) == (i < 10));
    }
  }
}

TEST_CASE("k-means edge cases") {
  std::mt19937_64 rng(51);
  const Matrix x = test::gaussian_points(6, 2, rng);
  const KMeansResult all = kmeans(x, 6, 3);
  CHECK(all.inertia == doctest::Approx(0.0));
  CHECK(kmeans(x, 3, 7).labels.labels() == kmeans(x, 3, 7).labels.labels());

  CHECK_THROWS_AS(kmeans(x, 1, 0), Error);
  CHECK_THROWS_AS(kmeans(x, 7, 0), Error);
  Matrix dup = Matrix::Zero(5, 2);
  dup(4, 0) = 1.0;
  CHECK_THROWS_AS(kmeans(dup, 3, 0), Error);
  Matrix nan = x;
  nan(0, 0) = std::nan("");
  CHECK_THROWS_AS(kmeans(nan, 2, 0), Error);
}

TEST_CASE("cluster pipeline") {
  BlobsConfig bc;
  bc.n = 90;
  bc.clusters = 3;
  bc.views = 2;
  bc.noise_views = 0;
  bc.separation = 10.0;
  const MultiViewDataset data = gen_blobs(bc);
  const ViewOperators ops = build_canonical_set(data);
  MethodConfig m;
  m.method = "mdt-rand";
  m.t = 3;

  SUBCASE("one run has zero spread") {
    const ClusterRunReport r = cluster_pipeline(data, ops, m, 3, 1, 4);
    CHECK(r.ami_std == 0.0);
  }
  SUBCASE("reports are reproducible and thread independent") {
    const ClusterRunReport a = cluster_pipeline(data, ops, m, 3, 5, 4, 1);
    const ClusterRunReport b = cluster_pipeline(data, ops, m, 3, 5, 4, 3);
    CHECK(a.to_json().dump() == b.to_json().dump());
  }
  SUBCASE("unambiguous blobs are recovered") {
    const ClusterRunReport r = cluster_pipeline(data, ops, m, 3, 20, 0);
    CHECK(r.ami_mean >= 0.95);
    CHECK(r.ch_per_view.size() == 2);
    CHECK(*r.resolved_t == 3);
  }
  SUBCASE("labels are required") {
    const MultiViewDataset unlabeled({data.view(0), data.view(1)});
    CHECK_THROWS_AS(cluster_pipeline(unlabeled, ops, m, 3, 2, 0), Error);
  }
}
