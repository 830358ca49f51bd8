#include "mdt/datasets.hpp"
#include "mdt/io.hpp"
#include "mdt/methods.hpp"
#include "mdt/parallel.hpp"
#include "mdt/rng.hpp"

#include <doctest.h>

#include <atomic>
#include <stdexcept>

using namespace mdt;

TEST_CASE("derived seeds") {
  CHECK(derive_seed(1, "a") == derive_seed(1, "a"));
  CHECK(derive_seed(1, "a") != derive_seed(1, "b"));
  CHECK(derive_seed(1, "a", 0) != derive_seed(1, "a", 1));
  CHECK(derive_seed(1, "a") != derive_seed(2, "a"));
}

TEST_CASE("parallel_for") {
  std::vector<int> out(100, 0);
  parallel_for(100, 4, [&](std::size_t i) { out[i] = static_cast<int>(i * i); });
  for (std::size_t i = 0; i < 100; ++i) CHECK(out[i] == static_cast<int>(i * i));

  for (std::size_t threads : {1u, 4u}) {
    try {
      parallel_for(50, threads, [](std::size_t i) {
        if (i == 7 || i == 30) throw std::runtime_error("fail " + std::to_string(i));
      });
      FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()) == "fail 7");
    }
  }
}

TEST_CASE("csv round trip keeps doubles exact") {
  Matrix m(2, 2);
  m << 0.1, 1.0 / 3.0, -2.5e-17, 12345.678;
  const std::string csv = io::matrix_to_csv(m, {"a", "b"});
  const auto path = std::filesystem::temp_directory_path() / "mdt_io_roundtrip.csv";
  io::write_text_atomic(path, csv);
  CHECK(io::read_csv_matrix(path, true) == m);
  std::filesystem::remove(path);
}

TEST_CASE("method configs") {
  CHECK(method_names().size() == 11);
  const MethodConfig c = MethodConfig::from_json({{"method", "mdt-bs"}, {"t", 4}, {"budget", 30}});
  CHECK(c.method == "mdt-bs");
  CHECK(*c.t == 4);
  CHECK(c.search.budget == 30);
  CHECK(c.is_mdt());
  CHECK_FALSE(c.stochastic());
  CHECK(MethodConfig::from_json(c.to_json()).to_json() == c.to_json());
  CHECK_THROWS_AS(MethodConfig::from_json({{"method", "nope"}}).validate(), Error);
}

TEST_CASE("subsumed baselines embed like their trajectories") {
  const MultiViewDataset data = gen_helix_a(60);
  const ViewOperators ops = build_canonical_set(data);
  for (const std::string name : {"ad", "pad", "id"}) {
    MethodConfig m;
    m.method = name;
    const MethodEmbedding e = embed(data, ops, m, 3, 2, 0);
    REQUIRE(e.trajectory);
    const DiffusionMap direct = diffusion_map(compose(OperatorSet::canonical(ops.operators), *e.trajectory), 3);
    CHECK(e.embedding == direct.embedding);
  }
  MethodConfig com;
  com.method = "comdiff";
  const MultiViewDataset three({data.view(0), data.view(1), ViewDataset(data.view(0).points(), 3)});
  CHECK_THROWS_WITH_AS(embed(three, build_canonical_set(three), com, 2, 2, 0), doctest::Contains("two-view method"),
                       Error);
}
